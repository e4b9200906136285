#pragma once

#include "rmcs/engine.hpp"

namespace rmcs {

enum class QueryMode { Exists, Forall };

/// Does belief b hold in context i at some step, for some run (exists) or
/// for all runs (forall), of the finite trace?
struct Query {
    QueryMode mode = QueryMode::Exists;
    std::size_t context = 0;
    Belief belief;
    ObservationTrace trace;
};

/// RB_j(M, i:b): beliefs of context j mentioned by any ground bridge-rule
/// body, plus the queried belief itself when i = j.
inline BeliefSet relevant_beliefs(const std::vector<std::vector<BridgeRule>>& rules,
                                  std::size_t i, const Belief& b, std::size_t j) {
    BeliefSet out;
    for (const auto& ctx_rules : rules)
        for (const auto& rule : ctx_rules)
            for (const auto& lit : rule.body)
                if (const auto* ca = std::get_if<ContextAtom>(&lit.atom))
                    if (ca->context == j)
                        out.insert(ca->belief);
    if (i == j)
        out.insert(b);
    return out;
}

/// Componentwise intersection with the relevant beliefs.
inline BeliefState project(const BeliefState& state,
                           const std::vector<std::vector<BridgeRule>>& rules, std::size_t i,
                           const Belief& b) {
    BeliefState out(state.size());
    for (std::size_t j = 0; j < state.size(); ++j) {
        BeliefSet relevant = relevant_beliefs(rules, i, b, j);
        for (const auto& belief : state[j])
            if (relevant.count(belief))
                out[j].insert(belief);
    }
    return out;
}

struct DecideResult {
    bool value = false;
    std::size_t run_count = 0;
    /// For a true exists verdict: (run index, step index) of the witness.
    std::optional<std::pair<std::size_t, std::size_t>> witness;
    /// Forall over zero runs is vacuously true; surfaced rather than hidden.
    bool no_runs = false;
};

inline DecideResult decide(const Query& q, const RMCS& system, std::size_t bound,
                           const EngineOptions& opts = {}) {
    if (q.context >= system.contexts.size())
        throw std::invalid_argument("query context index out of range");
    auto runs = enumerate_runs(system, q.trace, bound, opts);

    DecideResult result;
    result.run_count = runs.size();
    if (runs.empty()) {
        result.no_runs = true;
        result.value = q.mode == QueryMode::Forall;
        return result;
    }

    auto occurs_in = [&](const Run& run) -> std::optional<std::size_t> {
        for (std::size_t t = 0; t < run.size(); ++t)
            if (run[t].state[q.context].count(q.belief))
                return t;
        return std::nullopt;
    };

    if (q.mode == QueryMode::Exists) {
        for (std::size_t r = 0; r < runs.size(); ++r)
            if (auto t = occurs_in(runs[r])) {
                result.value = true;
                result.witness = {r, *t};
                return result;
            }
        result.value = false;
    } else {
        result.value = true;
        for (const auto& run : runs)
            if (!occurs_in(run)) {
                result.value = false;
                break;
            }
    }
    return result;
}

} // namespace rmcs
