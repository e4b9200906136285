#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>

#include "rmcs/system.hpp"

namespace rmcs {

/// Semantic failure: the system has no equilibrium under the observation.
/// A reportable outcome, not a crash.
class NoEquilibriumError : public std::runtime_error {
public:
    explicit NoEquilibriumError(std::size_t step)
        : std::runtime_error("no equilibrium exists at step " + std::to_string(step)),
          step_(step) {}

    std::size_t step() const { return step_; }

private:
    std::size_t step_;
};

class AmbiguousError : public std::runtime_error {
public:
    AmbiguousError(std::size_t step, std::size_t count)
        : std::runtime_error("ambiguous: " + std::to_string(count) +
                             " equilibria at step " + std::to_string(step)),
          step_(step) {}

    std::size_t step() const { return step_; }

private:
    std::size_t step_;
};

enum class StepPolicy { First, ErrorIfAmbiguous };

struct EngineOptions {
    long long horizon = 1;
    std::uint64_t max_head_combos = std::uint64_t{1} << 16;
    std::size_t max_runs = 4096;
    StepPolicy policy = StepPolicy::First;
};

/// An equilibrium paired with the tuple of KBs it generates.
struct FullEquilibrium {
    BeliefState state;
    std::vector<KnowledgeBase> kbs;

    bool operator==(const FullEquilibrium&) const = default;
};

using Run = std::vector<FullEquilibrium>;

namespace detail {

inline std::vector<std::vector<BridgeRule>> ground_all(const RMCS& system,
                                                       const Observation& obs, long long now,
                                                       const EngineOptions& opts) {
    GroundingContext ctx;
    ctx.obs = &obs;
    ctx.now = now;
    ctx.horizon = opts.horizon;
    ctx.context_ids = system.context_ids();
    std::vector<std::vector<BridgeRule>> rules;
    rules.reserve(system.contexts.size());
    for (const auto& schemas : system.bridge)
        rules.push_back(ground_schemas(schemas, ctx, system.global_domains));
    return rules;
}

} // namespace detail

/// The equilibrium condition: S_i in ACC_i(mng_i(app_i(B,Obs), kb_i)) for
/// every context. Evaluated directly from the definition.
inline bool check_equilibrium(const RMCS& system, const Observation& obs, long long now,
                              const BeliefState& state, const EngineOptions& opts = {}) {
    if (state.size() != system.contexts.size())
        throw std::invalid_argument("belief state arity mismatch");
    auto rules = detail::ground_all(system, obs, now, opts);
    for (std::size_t i = 0; i < system.contexts.size(); ++i) {
        auto heads = app_heads(rules[i], state, obs);
        KnowledgeBase kb = apply_management(heads, system.kbs[i], system.contexts[i].mng, now);
        auto accepted = system.contexts[i].logic->acc(kb);
        if (std::find(accepted.begin(), accepted.end(), state[i]) == accepted.end())
            return false;
    }
    return true;
}

namespace detail {

/// Head-set guess-and-check equilibrium search.
///
/// mng_i depends on the belief state only through app_i, so candidates are
/// head sets rather than belief sets. The guessed part is narrowed further to
/// the heads that can influence some belief a rule body reads; all remaining
/// heads follow functionally from the guessed fixpoint.
struct Search {
    const RMCS& system;
    const Observation& obs;
    long long now;
    const EngineOptions& opts;
    std::vector<std::vector<BridgeRule>> rules;

    // Per context: distinct heads, and the guessed ("load-bearing") subset.
    std::vector<std::vector<Operation>> heads;
    std::vector<std::vector<Operation>> guessed;
    std::vector<bool> is_read; // some rule body reads this context
    std::vector<std::set<std::string>> read_preds;

    explicit Search(const RMCS& system_, const Observation& obs_, long long now_,
                    const EngineOptions& opts_)
        : system(system_), obs(obs_), now(now_), opts(opts_),
          rules(ground_all(system_, obs_, now_, opts_)) {
        const std::size_t n = system.contexts.size();

        // Beliefs read by any rule body, as (context, predicate) pairs.
        read_preds.resize(n);
        for (const auto& ctx_rules : rules)
            for (const auto& rule : ctx_rules)
                for (const auto& lit : rule.body)
                    if (const auto* ca = std::get_if<ContextAtom>(&lit.atom))
                        read_preds[ca->context].insert(ca->belief.predicate());
        is_read.assign(n, false);
        for (std::size_t i = 0; i < n; ++i)
            is_read[i] = !read_preds[i].empty();

        heads.resize(n);
        guessed.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            std::set<Operation> distinct;
            for (const auto& rule : rules[i])
                distinct.insert(rule.head);
            heads[i].assign(distinct.begin(), distinct.end());
            const bool opaque = !system.contexts[i].logic->kb_determines_beliefs();
            for (const auto& op : heads[i]) {
                bool load_bearing;
                if (!is_read[i]) {
                    load_bearing = false;
                } else if (opaque) {
                    // Derived beliefs may hinge on any fact of the KB.
                    load_bearing = true;
                } else {
                    auto effects = operation_effects(op, system.contexts[i].mng);
                    load_bearing = !effects.has_value();
                    if (effects)
                        for (const auto& pred : *effects)
                            if (read_preds[i].count(pred))
                                load_bearing = true;
                }
                if (load_bearing)
                    guessed[i].push_back(op);
            }
        }
    }

    std::uint64_t combos() const {
        std::uint64_t total = 1;
        for (const auto& g : guessed) {
            if (g.size() >= 63)
                return std::numeric_limits<std::uint64_t>::max();
            std::uint64_t c = std::uint64_t{1} << g.size();
            if (total > std::numeric_limits<std::uint64_t>::max() / c)
                return std::numeric_limits<std::uint64_t>::max();
            total *= c;
        }
        return total;
    }

    std::vector<BeliefState> run() {
        if (combos() > opts.max_head_combos)
            throw EnumerationGuardError(
                "equilibrium search space exceeds the guard of " +
                std::to_string(opts.max_head_combos) + " head-set combinations");

        const std::size_t n = system.contexts.size();
        std::set<BeliefState> found;

        std::vector<std::uint64_t> masks(n, 0);
        while (true) {
            // Guess: subset of load-bearing heads per context.
            std::vector<std::set<Operation>> guess(n);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t b = 0; b < guessed[i].size(); ++b)
                    if (masks[i] & (std::uint64_t{1} << b))
                        guess[i].insert(guessed[i][b]);

            try {
                expand_guess(guess, found);
            } catch (const ManagementError&) {
                // A guessed batch the management function rejects cannot be
                // the applicable head set of an equilibrium.
            } catch (const std::invalid_argument&) {
                // Likewise for batches producing KBs a logic rejects.
            }

            std::size_t k = 0;
            for (; k < n; ++k) {
                if (++masks[k] < (std::uint64_t{1} << guessed[k].size()))
                    break;
                masks[k] = 0;
            }
            if (k == n)
                break;
        }
        return {found.begin(), found.end()};
    }

private:
    BeliefSet read_projection(std::size_t i, const BeliefSet& s) const {
        BeliefSet out;
        for (const auto& b : s)
            if (read_preds[i].count(b.predicate()))
                out.insert(b);
        return out;
    }

    void expand_guess(const std::vector<std::set<Operation>>& guess,
                      std::set<BeliefState>& found) {
        const std::size_t n = system.contexts.size();

        // Probe belief sets for read contexts: unread contexts cannot change
        // the applicability of any rule, so they probe as empty.
        std::vector<std::vector<BeliefSet>> probe_choices(n);
        for (std::size_t i = 0; i < n; ++i) {
            if (!is_read[i]) {
                probe_choices[i] = {BeliefSet{}};
                continue;
            }
            KnowledgeBase kb =
                apply_management(guess[i], system.kbs[i], system.contexts[i].mng, now);
            probe_choices[i] = system.contexts[i].logic->acc(kb);
        }

        std::vector<std::size_t> pick(n, 0);
        for (const auto& choices : probe_choices)
            if (choices.empty())
                return;
        while (true) {
            BeliefState probe(n);
            for (std::size_t i = 0; i < n; ++i)
                probe[i] = probe_choices[i][pick[i]];

            try {
                verify_probe(guess, probe, found);
            } catch (const ManagementError&) {
                // This probe's full head set is rejected by management; other
                // probes of the same guess may still succeed.
            } catch (const std::invalid_argument&) {
            }

            std::size_t k = 0;
            for (; k < n; ++k) {
                if (++pick[k] < probe_choices[k].size())
                    break;
                pick[k] = 0;
            }
            if (k == n)
                break;
        }
    }

    void verify_probe(const std::vector<std::set<Operation>>& guess, const BeliefState& probe,
                      std::set<BeliefState>& found) {
        const std::size_t n = system.contexts.size();

        // The full applicable head sets under the probe must agree with the
        // guess on every load-bearing head.
        std::vector<std::set<Operation>> full(n);
        for (std::size_t i = 0; i < n; ++i) {
            full[i] = app_heads(rules[i], probe, obs);
            for (const auto& op : guessed[i]) {
                if ((full[i].count(op) > 0) != (guess[i].count(op) > 0))
                    return;
            }
        }

        // Final belief sets from the full head sets; read components must
        // agree with the probe on every read predicate or applicability
        // could differ. Unread predicates are free to diverge.
        std::vector<std::vector<BeliefSet>> final_choices(n);
        for (std::size_t i = 0; i < n; ++i) {
            KnowledgeBase kb =
                apply_management(full[i], system.kbs[i], system.contexts[i].mng, now);
            auto accepted = system.contexts[i].logic->acc(kb);
            if (is_read[i]) {
                BeliefSet probe_view = read_projection(i, probe[i]);
                for (const auto& s : accepted)
                    if (read_projection(i, s) == probe_view)
                        final_choices[i].push_back(s);
            } else {
                final_choices[i] = std::move(accepted);
            }
            if (final_choices[i].empty())
                return;
        }

        std::vector<std::size_t> pick(n, 0);
        while (true) {
            BeliefState candidate(n);
            for (std::size_t i = 0; i < n; ++i)
                candidate[i] = final_choices[i][pick[i]];
            if (!found.count(candidate)) {
                // Authoritative final check straight from the definition.
                bool ok = true;
                for (std::size_t i = 0; i < n && ok; ++i) {
                    auto heads_i = app_heads(rules[i], candidate, obs);
                    KnowledgeBase kb = apply_management(heads_i, system.kbs[i],
                                                        system.contexts[i].mng, now);
                    auto accepted = system.contexts[i].logic->acc(kb);
                    ok = std::find(accepted.begin(), accepted.end(), candidate[i]) !=
                         accepted.end();
                }
                if (ok)
                    found.insert(std::move(candidate));
            }
            std::size_t k = 0;
            for (; k < n; ++k) {
                if (++pick[k] < final_choices[k].size())
                    break;
                pick[k] = 0;
            }
            if (k == n)
                break;
        }
    }
};

} // namespace detail

/// All equilibria of the system under the observation, canonically ordered.
inline std::vector<BeliefState> equilibria(const RMCS& system, const Observation& obs,
                                           long long now, const EngineOptions& opts = {}) {
    detail::Search search(system, obs, now, opts);
    return search.run();
}

/// KB^B: the tuple of KBs generated by an equilibrium.
inline std::vector<KnowledgeBase> generated_kbs(const RMCS& system, const Observation& obs,
                                                long long now, const BeliefState& state,
                                                const EngineOptions& opts = {}) {
    if (!check_equilibrium(system, obs, now, state, opts))
        throw std::invalid_argument("belief state is not an equilibrium");
    auto rules = detail::ground_all(system, obs, now, opts);
    std::vector<KnowledgeBase> kbs;
    kbs.reserve(system.contexts.size());
    for (std::size_t i = 0; i < system.contexts.size(); ++i)
        kbs.push_back(apply_management(app_heads(rules[i], state, obs), system.kbs[i],
                                       system.contexts[i].mng, now));
    return kbs;
}

namespace detail {

/// Current time for a step: the time sensor's reading when present, else the
/// step index.
inline long long resolve_now(const RMCS& system, const Observation& obs, std::size_t step) {
    if (auto ts = system.time_sensor()) {
        const auto& reading = obs.readings.at(*ts);
        if (!reading.empty()) {
            const Term& t = *reading.begin();
            if (t.is_compound() && t.name() == "now" && t.arity() == 1 &&
                t.args()[0].is_integer())
                return t.args()[0].value();
        }
    }
    return static_cast<long long>(step);
}

/// Injects the now(t) reading for an auto-advancing time sensor when the
/// trace omits it.
inline Observation with_auto_time(const RMCS& system, Observation obs, std::size_t step) {
    obs.readings.resize(system.sensors.size());
    if (auto ts = system.time_sensor())
        if (obs.readings[*ts].empty())
            obs.readings[*ts].insert(
                Term::compound("now", {Term::integer(static_cast<long long>(step))}));
    return obs;
}

} // namespace detail

/// One reactive step. Policy "first" takes the canonically least equilibrium;
/// "error-if-ambiguous" requires it to be unique.
inline FullEquilibrium step(const RMCS& system, const Observation& obs, std::size_t step_index,
                            const EngineOptions& opts = {}) {
    Observation full_obs = detail::with_auto_time(system, obs, step_index);
    long long now = detail::resolve_now(system, full_obs, step_index);
    auto states = equilibria(system, full_obs, now, opts);
    if (states.empty())
        throw NoEquilibriumError(step_index);
    if (opts.policy == StepPolicy::ErrorIfAmbiguous && states.size() > 1)
        throw AmbiguousError(step_index, states.size());
    return {states.front(), generated_kbs(system, full_obs, now, states.front(), opts)};
}

/// Folds step over the trace, threading generated KBs into the next system.
inline Run run(const RMCS& system, const ObservationTrace& trace,
               const EngineOptions& opts = {}) {
    Run result;
    RMCS current = system;
    for (std::size_t t = 0; t < trace.size(); ++t) {
        FullEquilibrium eq = step(current, trace[t], t, opts);
        current.kbs = eq.kbs;
        result.push_back(std::move(eq));
    }
    return result;
}

/// All runs induced by the trace, by depth-first branching over the
/// equilibria of every step; throws when more than `bound` runs exist.
inline std::vector<Run> enumerate_runs(const RMCS& system, const ObservationTrace& trace,
                                       std::size_t bound, const EngineOptions& opts = {}) {
    std::vector<Run> runs;
    Run partial;

    auto dfs = [&](auto&& self, const RMCS& current, std::size_t t) -> void {
        if (t == trace.size()) {
            if (runs.size() >= bound)
                throw EnumerationGuardError("run bound of " + std::to_string(bound) +
                                            " exceeded");
            runs.push_back(partial);
            return;
        }
        Observation obs = detail::with_auto_time(current, trace[t], t);
        long long now = detail::resolve_now(current, obs, t);
        for (const auto& state : equilibria(current, obs, now, opts)) {
            RMCS next = current;
            next.kbs = generated_kbs(current, obs, now, state, opts);
            partial.push_back({state, next.kbs});
            self(self, next, t + 1);
            partial.pop_back();
        }
    };
    dfs(dfs, system, 0);
    return runs;
}

} // namespace rmcs
