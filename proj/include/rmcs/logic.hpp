#pragma once

#include <memory>
#include <string_view>
#include <vector>

#include "rmcs/belief.hpp"

namespace rmcs {

/// Thrown when a brute-force enumeration bound is exceeded.
class EnumerationGuardError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Abstract logic: admissible KBs, possible belief sets, and the acceptability
/// function mapping a KB to its acceptable belief sets.
class Logic {
public:
    virtual ~Logic() = default;

    virtual std::string_view name() const = 0;

    /// All beliefs the logic may mention for this KB; finite.
    virtual BeliefSet universe(const KnowledgeBase& kb) const = 0;

    /// Acceptable belief sets, canonically sorted. Deterministic in kb.
    virtual std::vector<BeliefSet> acc(const KnowledgeBase& kb) const = 0;

    /// True when every accepted belief set is exactly the heads of the KB,
    /// so belief-level effects of management operations can be tracked
    /// predicate by predicate.
    virtual bool kb_determines_beliefs() const = 0;
};

/// ACC_id(kb) = { heads of kb }; admits fact-only KBs.
inline std::vector<BeliefSet> acc_identity(const KnowledgeBase& kb) {
    BeliefSet s;
    for (const auto& e : kb) {
        if (!e.is_fact())
            throw std::invalid_argument("identity logic admits only fact KBs, got: " + e.str());
        s.insert(e.head());
    }
    return {std::move(s)};
}

class IdentityLogic final : public Logic {
public:
    std::string_view name() const override { return "identity"; }

    BeliefSet universe(const KnowledgeBase& kb) const override {
        BeliefSet u;
        for (const auto& e : kb)
            u.insert(e.head());
        return u;
    }

    std::vector<BeliefSet> acc(const KnowledgeBase& kb) const override {
        return acc_identity(kb);
    }

    bool kb_determines_beliefs() const override { return true; }
};

/// Gelfond-Lifschitz reduct: drop rules with a neg-body belief in the
/// candidate, strip neg bodies from the rest.
inline KnowledgeBase gl_reduct(const KnowledgeBase& kb, const BeliefSet& candidate) {
    KnowledgeBase out;
    for (const auto& e : kb) {
        bool blocked = false;
        for (const auto& n : e.neg())
            if (candidate.count(n)) {
                blocked = true;
                break;
            }
        if (!blocked)
            out.insert(KBElement(e.head(), e.pos()));
    }
    return out;
}

/// Least fixpoint of the immediate-consequence operator of a negation-free
/// program.
inline BeliefSet least_model(const KnowledgeBase& kb) {
    for (const auto& e : kb)
        if (!e.neg().empty())
            throw std::invalid_argument("least_model requires a negation-free program");
    BeliefSet model;
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& e : kb) {
            if (model.count(e.head()))
                continue;
            bool satisfied = true;
            for (const auto& p : e.pos())
                if (!model.count(p)) {
                    satisfied = false;
                    break;
                }
            if (satisfied) {
                model.insert(e.head());
                changed = true;
            }
        }
    }
    return model;
}

inline BeliefSet program_universe(const KnowledgeBase& kb) {
    BeliefSet u;
    for (const auto& e : kb) {
        u.insert(e.head());
        u.insert(e.pos().begin(), e.pos().end());
        u.insert(e.neg().begin(), e.neg().end());
    }
    return u;
}

inline bool classically_consistent(const BeliefSet& s) {
    for (const auto& b : s)
        if (b.negated() && s.count(b.complement()))
            return false;
    return true;
}

/// Answer sets by exhaustive enumeration of subsets of the occurring beliefs.
/// Candidate sets containing a classically conflicting pair are rejected.
inline std::vector<BeliefSet> answer_sets(const KnowledgeBase& kb,
                                          std::size_t max_universe = 20) {
    BeliefSet universe = program_universe(kb);
    if (universe.size() > max_universe)
        throw EnumerationGuardError("answer-set universe of " + std::to_string(universe.size()) +
                                    " beliefs exceeds the guard of " +
                                    std::to_string(max_universe));
    std::vector<Belief> atoms(universe.begin(), universe.end());
    std::vector<BeliefSet> result;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << atoms.size()); ++mask) {
        BeliefSet candidate;
        for (std::size_t i = 0; i < atoms.size(); ++i)
            if (mask & (std::uint64_t{1} << i))
                candidate.insert(atoms[i]);
        if (!classically_consistent(candidate))
            continue;
        if (least_model(gl_reduct(kb, candidate)) == candidate)
            result.push_back(std::move(candidate));
    }
    return result;
}

class AnswerSetLogic final : public Logic {
public:
    explicit AnswerSetLogic(std::size_t max_universe = 20) : max_universe_(max_universe) {}

    std::string_view name() const override { return "asp"; }

    BeliefSet universe(const KnowledgeBase& kb) const override {
        return program_universe(kb);
    }

    std::vector<BeliefSet> acc(const KnowledgeBase& kb) const override {
        return answer_sets(kb, max_universe_);
    }

    bool kb_determines_beliefs() const override { return false; }

private:
    std::size_t max_universe_;
};

inline std::shared_ptr<const Logic> make_logic(std::string_view name) {
    if (name == "identity")
        return std::make_shared<IdentityLogic>();
    if (name == "asp")
        return std::make_shared<AnswerSetLogic>();
    throw std::invalid_argument("unknown logic: " + std::string(name));
}

} // namespace rmcs
