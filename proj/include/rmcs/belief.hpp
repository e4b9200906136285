#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "rmcs/term.hpp"

namespace rmcs {

/// A ground belief: an atom with an optional classical negation flag.
/// Distinct from negation as failure, which lives in rule bodies.
class Belief {
public:
    Belief() : atom_(Term::symbol("true")) {}

    explicit Belief(Term atom, bool negated = false)
        : negated_(negated), atom_(std::move(atom)) {
        if (atom_.is_integer())
            throw std::invalid_argument("a belief atom must be a symbol or compound");
    }

    bool negated() const { return negated_; }
    const Term& atom() const { return atom_; }

    /// Predicate name, ignoring classical negation.
    const std::string& predicate() const { return atom_.name(); }
    std::size_t arity() const { return atom_.arity(); }

    Belief complement() const { return Belief(atom_, !negated_); }

    std::strong_ordering operator<=>(const Belief& other) const {
        if (auto c = atom_ <=> other.atom_; c != 0)
            return c;
        return (negated_ ? 1 : 0) <=> (other.negated_ ? 1 : 0);
    }
    bool operator==(const Belief& other) const = default;

    std::string str() const { return (negated_ ? "~" : "") + atom_.str(); }

private:
    bool negated_ = false;
    Term atom_;
};

inline std::ostream& operator<<(std::ostream& out, const Belief& b) {
    return out << b.str();
}

inline Belief parse_belief(std::string_view text) {
    detail::Scanner s(text);
    s.skip_ws();
    bool negated = s.try_consume('~');
    Term atom = s.term();
    s.skip_ws();
    if (!s.done())
        throw ParseError("trailing input after belief", s.pos());
    return Belief(std::move(atom), negated);
}

/// Converts an operation argument into a belief. Classical negation may be
/// embedded as neg(<atom>), so beliefs can travel inside operation heads.
inline Belief term_to_belief(const Term& t) {
    if (t.is_compound() && t.name() == "neg" && t.arity() == 1)
        return Belief(t.args()[0], true);
    return Belief(t);
}

inline Term belief_to_term(const Belief& b) {
    if (b.negated())
        return Term::compound("neg", {b.atom()});
    return b.atom();
}

/// A rule of a context knowledge base; a fact has empty pos and neg.
class KBElement {
public:
    KBElement() = default;

    explicit KBElement(Belief head, std::vector<Belief> pos = {}, std::vector<Belief> neg = {})
        : head_(std::move(head)), pos_(std::move(pos)), neg_(std::move(neg)) {
        normalize(pos_);
        normalize(neg_);
    }

    const Belief& head() const { return head_; }
    const std::vector<Belief>& pos() const { return pos_; }
    const std::vector<Belief>& neg() const { return neg_; }
    bool is_fact() const { return pos_.empty() && neg_.empty(); }

    std::strong_ordering operator<=>(const KBElement& other) const {
        if (auto c = head_ <=> other.head_; c != 0)
            return c;
        if (auto c = compare(pos_, other.pos_); c != 0)
            return c;
        return compare(neg_, other.neg_);
    }
    bool operator==(const KBElement& other) const = default;

    std::string str() const {
        std::string out = head_.str();
        if (!is_fact()) {
            out += " <- ";
            bool first = true;
            for (const auto& b : pos_) {
                if (!first)
                    out += ", ";
                out += b.str();
                first = false;
            }
            for (const auto& b : neg_) {
                if (!first)
                    out += ", ";
                out += "not " + b.str();
                first = false;
            }
        }
        return out;
    }

private:
    static void normalize(std::vector<Belief>& v) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    }

    static std::strong_ordering compare(const std::vector<Belief>& a, const std::vector<Belief>& b) {
        if (auto c = a.size() <=> b.size(); c != 0)
            return c;
        for (std::size_t i = 0; i < a.size(); ++i)
            if (auto c = a[i] <=> b[i]; c != 0)
                return c;
        return std::strong_ordering::equal;
    }

    Belief head_;
    std::vector<Belief> pos_;
    std::vector<Belief> neg_;
};

inline std::ostream& operator<<(std::ostream& out, const KBElement& e) {
    return out << e.str();
}

using KnowledgeBase = std::set<KBElement>;
using BeliefSet = std::set<Belief>;

inline KBElement fact(Belief b) { return KBElement(std::move(b)); }
inline KBElement fact(const Term& t) { return KBElement(Belief(t)); }

/// Declares a predicate whose value positions are single-valued: two beliefs
/// that agree everywhere else but differ on a value position conflict.
struct FunctionalDecl {
    std::string predicate;
    std::size_t arity = 0;
    std::set<std::size_t> value_positions;

    FunctionalDecl() = default;
    FunctionalDecl(std::string pred, std::size_t ar, std::set<std::size_t> positions)
        : predicate(std::move(pred)), arity(ar), value_positions(std::move(positions)) {
        for (std::size_t p : value_positions)
            if (p >= arity)
                throw std::invalid_argument("functional value position out of range for " +
                                            predicate);
    }

    auto operator<=>(const FunctionalDecl&) const = default;
};

/// What counts as conflicting data: classical clash plus declared
/// functional predicates.
struct ConsistencyPolicy {
    std::vector<FunctionalDecl> functional;
};

inline bool conflicts(const Belief& a, const Belief& b, const ConsistencyPolicy& policy) {
    if (a.atom() == b.atom() && a.negated() != b.negated())
        return true;
    if (a.negated() || b.negated())
        return false;
    if (a.predicate() != b.predicate() || a.arity() != b.arity())
        return false;
    for (const auto& decl : policy.functional) {
        if (decl.predicate != a.predicate() || decl.arity != a.arity())
            continue;
        bool differs_on_value = false;
        bool agrees_elsewhere = true;
        for (std::size_t i = 0; i < decl.arity; ++i) {
            bool same = a.atom().args()[i] == b.atom().args()[i];
            if (decl.value_positions.count(i)) {
                if (!same)
                    differs_on_value = true;
            } else if (!same) {
                agrees_elsewhere = false;
            }
        }
        if (differs_on_value && agrees_elsewhere)
            return true;
    }
    return false;
}

} // namespace rmcs
