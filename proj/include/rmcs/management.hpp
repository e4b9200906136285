#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "rmcs/belief.hpp"
#include "rmcs/bridge.hpp"

namespace rmcs {

class ManagementError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class HandlerKind {
    Add,         // add(b) unions a fact; add(b,t,src) joins the ranked merge
    Del,         // del(b) removes the fact b
    DelAll,      // delAll(p,prefix...) removes all p-facts matching the prefix
    Set,         // set(f(..,v)) replaces f-facts agreeing on all but the last arg
    Incr,        // replaces pred(t) by pred(t+1)
    Alarm,       // alarm(e) records the fact alarm(e)
    Buffer,      // bf(b,t,src) stores a buffer fact untouched by reasoning
    EmptyBuffer, // re-admits in-window buffered items through the ranked merge
    ExtVal,      // replaces the declared input-fact predicates wholesale
    Setter,      // op(v..) replaces facts of its target predicate
};

/// Deterministic management function configuration of one context.
struct ManagementConfig {
    std::map<std::string, HandlerKind> handlers;
    std::map<std::string, std::string> setter_targets; // setter op -> predicate
    std::string incr_predicate = "now";
    std::vector<std::pair<std::string, std::size_t>> extval_predicates;
    std::vector<std::string> ranking; // sensor names, highest priority first
    ConsistencyPolicy policy;
    std::string buffer_predicate = "bf";
    std::string window_predicate = "win";
    bool idle_retention = false;

    std::set<std::string> ops() const {
        std::set<std::string> names;
        for (const auto& [name, kind] : handlers)
            names.insert(name);
        return names;
    }
};

/// p@t: the time tag is the extra final argument of the tagged belief.
inline Belief with_time_tag(const Belief& b, long long time) {
    std::vector<Term> args = b.atom().args();
    args.push_back(Term::integer(time));
    return Belief(Term::compound(b.atom().name(), std::move(args)), b.negated());
}

struct RankedAdd {
    Belief belief;
    long long time = 0;
    std::string source;
};

namespace detail {

struct TaggedItem {
    Belief fact; // final fact form, time tag already applied where applicable
    long long time = 0;
    std::string source;
};

/// The Add-chain: sources in descending priority; an item survives iff it does
/// not conflict with an item accepted at a strictly higher priority.
inline KnowledgeBase merge_tagged(std::vector<TaggedItem> items, const KnowledgeBase& kb,
                                  const ManagementConfig& cfg) {
    std::map<std::string, std::size_t> priority;
    for (std::size_t i = 0; i < cfg.ranking.size(); ++i)
        priority[cfg.ranking[i]] = i;
    for (const auto& item : items)
        if (!priority.count(item.source))
            throw ManagementError("sensor " + item.source + " missing from the priority ranking");

    // Readings of a single sensor at one time point must be consistent.
    for (std::size_t i = 0; i < items.size(); ++i)
        for (std::size_t j = i + 1; j < items.size(); ++j)
            if (items[i].source == items[j].source && items[i].time == items[j].time &&
                conflicts(items[i].fact, items[j].fact, cfg.policy))
                throw ManagementError("conflicting items from sensor " + items[i].source +
                                      " at time " + std::to_string(items[i].time));

    std::sort(items.begin(), items.end(), [&](const TaggedItem& a, const TaggedItem& b) {
        if (priority[a.source] != priority[b.source])
            return priority[a.source] < priority[b.source];
        return a.fact < b.fact;
    });

    KnowledgeBase out = kb;
    std::vector<Belief> accepted;
    std::size_t level_start = 0;
    std::size_t i = 0;
    while (i < items.size()) {
        std::size_t level_end = i;
        while (level_end < items.size() && items[level_end].source == items[i].source)
            ++level_end;
        std::vector<Belief> level_accepted;
        for (std::size_t k = i; k < level_end; ++k) {
            bool clash = false;
            for (std::size_t a = 0; a < level_start; ++a)
                if (conflicts(items[k].fact, accepted[a], cfg.policy)) {
                    clash = true;
                    break;
                }
            if (!clash)
                level_accepted.push_back(items[k].fact);
        }
        for (auto& b : level_accepted)
            accepted.push_back(std::move(b));
        level_start = accepted.size();
        i = level_end;
    }
    for (const auto& b : accepted)
        out.insert(fact(b));
    return out;
}

} // namespace detail

/// Preference-ranked sensor merge; time tags are appended to the added facts.
inline KnowledgeBase merge_prioritized_adds(const std::vector<RankedAdd>& adds,
                                            const KnowledgeBase& kb,
                                            const ManagementConfig& cfg) {
    std::vector<detail::TaggedItem> items;
    for (const auto& a : adds)
        items.push_back({with_time_tag(a.belief, a.time), a.time, a.source});
    return detail::merge_tagged(std::move(items), kb, cfg);
}

/// Empties the buffer: every bf(belief,time,source) fact is removed and the
/// item re-admitted through the ranked merge iff its time still lies within
/// the current window of its predicate; no window means keep.
inline KnowledgeBase restore_buffer(const KnowledgeBase& kb, const ManagementConfig& cfg,
                                    long long now) {
    KnowledgeBase out;
    std::vector<detail::TaggedItem> items;
    std::map<std::string, long long> windows;
    for (const auto& e : kb) {
        const Belief& h = e.head();
        if (e.is_fact() && !h.negated() && h.predicate() == cfg.window_predicate &&
            h.arity() == 2 && h.atom().args()[0].is_symbol() &&
            h.atom().args()[1].is_integer()) {
            const auto& pred = h.atom().args()[0].name();
            long long w = h.atom().args()[1].value();
            auto it = windows.find(pred);
            if (it == windows.end() || w > it->second)
                windows[pred] = w;
        }
    }
    for (const auto& e : kb) {
        const Belief& h = e.head();
        if (e.is_fact() && !h.negated() && h.predicate() == cfg.buffer_predicate) {
            if (h.arity() != 3 || !h.atom().args()[1].is_integer() ||
                !h.atom().args()[2].is_symbol())
                throw ManagementError("malformed buffer atom: " + h.str());
            Belief stored = term_to_belief(h.atom().args()[0]);
            long long time = h.atom().args()[1].value();
            auto win = windows.find(stored.predicate());
            if (win != windows.end() && time < now - win->second)
                continue; // stale, dropped
            items.push_back({stored, time, h.atom().args()[2].name()});
        } else {
            out.insert(e);
        }
    }
    return detail::merge_tagged(std::move(items), out, cfg);
}

namespace detail {

inline Belief op_arg_belief(const Operation& op, std::size_t idx) {
    if (idx >= op.args.size())
        throw ManagementError("operation " + op.str() + " lacks argument " +
                              std::to_string(idx));
    return term_to_belief(op.args[idx]);
}

inline bool matches_prefix(const Belief& head, const std::string& pred,
                           const std::vector<Term>& prefix) {
    if (head.negated() || head.predicate() != pred || head.arity() < prefix.size())
        return false;
    for (std::size_t i = 0; i < prefix.size(); ++i)
        if (head.atom().args()[i] != prefix[i])
            return false;
    return true;
}

inline void erase_facts_if(KnowledgeBase& kb, auto&& pred) {
    for (auto it = kb.begin(); it != kb.end();) {
        if (it->is_fact() && pred(it->head()))
            it = kb.erase(it);
        else
            ++it;
    }
}

} // namespace detail

/// mng_i: applies the batch of operation heads to the KB in a fixed phase
/// order: set; del/delAll; setters; incr; ranked and plain adds with extVal
/// replacement; bf buffering; empty.buffer; alarm; idle retention cleanup.
inline KnowledgeBase apply_management(const std::set<Operation>& batch, const KnowledgeBase& kb,
                                      const ManagementConfig& cfg, long long now) {
    using detail::erase_facts_if;
    using detail::matches_prefix;
    using detail::op_arg_belief;

    std::map<HandlerKind, std::vector<const Operation*>> phases;
    for (const auto& op : batch) {
        auto it = cfg.handlers.find(op.name);
        if (it == cfg.handlers.end())
            throw ManagementError("unknown operation: " + op.str());
        phases[it->second].push_back(&op);
    }
    KnowledgeBase out = kb;

    // (1) set: replace facts agreeing on all arguments but the last.
    for (const auto* op : phases[HandlerKind::Set]) {
        if (op->args.size() != 1)
            throw ManagementError("set expects one argument: " + op->str());
        Belief b = op_arg_belief(*op, 0);
        if (b.arity() == 0) {
            erase_facts_if(out, [&](const Belief& h) { return h == b; });
        } else {
            std::vector<Term> prefix(b.atom().args().begin(), b.atom().args().end() - 1);
            erase_facts_if(out, [&](const Belief& h) {
                return !h.negated() && h.predicate() == b.predicate() &&
                       h.arity() == b.arity() && matches_prefix(h, b.predicate(), prefix);
            });
        }
        out.insert(fact(b));
    }

    // (2) deletions, in accordance with the determined windows.
    for (const auto* op : phases[HandlerKind::Del]) {
        if (op->args.size() != 1)
            throw ManagementError("del expects one argument: " + op->str());
        Belief b = op_arg_belief(*op, 0);
        erase_facts_if(out, [&](const Belief& h) { return h == b; });
    }
    for (const auto* op : phases[HandlerKind::DelAll]) {
        if (op->args.empty() || !op->args[0].is_symbol())
            throw ManagementError("delAll expects a predicate name first: " + op->str());
        const std::string& pred = op->args[0].name();
        std::vector<Term> prefix(op->args.begin() + 1, op->args.end());
        erase_facts_if(out, [&](const Belief& h) { return matches_prefix(h, pred, prefix); });
    }

    // (3) replace-style setters; absent ops keep the previous value.
    {
        std::set<std::string> touched;
        for (const auto* op : phases[HandlerKind::Setter])
            touched.insert(cfg.setter_targets.at(op->name));
        for (const auto& pred : touched)
            erase_facts_if(out, [&](const Belief& h) {
                return !h.negated() && h.predicate() == pred;
            });
        for (const auto* op : phases[HandlerKind::Setter]) {
            const std::string& pred = cfg.setter_targets.at(op->name);
            out.insert(fact(Belief(Term::compound(pred, op->args))));
        }
    }

    // (4) incr: now(t) -> now(t+1).
    if (!phases[HandlerKind::Incr].empty()) {
        std::vector<long long> ticks;
        erase_facts_if(out, [&](const Belief& h) {
            if (!h.negated() && h.predicate() == cfg.incr_predicate && h.arity() == 1 &&
                h.atom().args()[0].is_integer()) {
                ticks.push_back(h.atom().args()[0].value());
                return true;
            }
            return false;
        });
        for (long long t : ticks)
            out.insert(fact(Belief(
                Term::compound(cfg.incr_predicate, {Term::integer(t + 1)}))));
    }

    // (5) adds: extVal replaces its declared input predicates wholesale;
    // three-argument adds run through the ranked merge; plain adds union.
    if (!cfg.extval_predicates.empty()) {
        erase_facts_if(out, [&](const Belief& h) {
            for (const auto& [pred, arity] : cfg.extval_predicates)
                if (!h.negated() && h.predicate() == pred && h.arity() == arity)
                    return true;
            return false;
        });
    }
    for (const auto* op : phases[HandlerKind::ExtVal]) {
        if (op->args.size() != 1)
            throw ManagementError("extVal expects one argument: " + op->str());
        out.insert(fact(op_arg_belief(*op, 0)));
    }
    {
        std::vector<RankedAdd> ranked;
        for (const auto* op : phases[HandlerKind::Add]) {
            if (op->args.size() == 1) {
                out.insert(fact(op_arg_belief(*op, 0)));
            } else if (op->args.size() == 3) {
                if (!op->args[1].is_integer() || !op->args[2].is_symbol())
                    throw ManagementError("add(b,t,src) expects an integer time and a symbol "
                                          "source: " + op->str());
                ranked.push_back({op_arg_belief(*op, 0), op->args[1].value(),
                                  op->args[2].name()});
            } else {
                throw ManagementError("add expects 1 or 3 arguments: " + op->str());
            }
        }
        if (!ranked.empty())
            out = merge_prioritized_adds(ranked, out, cfg);
    }

    // (6) bf: buffered data sits in the KB for later use only.
    for (const auto* op : phases[HandlerKind::Buffer]) {
        if (op->args.size() != 3)
            throw ManagementError("bf expects 3 arguments: " + op->str());
        out.insert(fact(Belief(Term::compound(cfg.buffer_predicate, op->args))));
    }

    // (7) empty.buffer.
    if (!phases[HandlerKind::EmptyBuffer].empty())
        out = restore_buffer(out, cfg, now);

    // (8) alarm.
    for (const auto* op : phases[HandlerKind::Alarm])
        out.insert(fact(Belief(op->args.empty() ? Term::symbol("alarm")
                                                : Term::compound("alarm", op->args))));

    // (9) idle(i,t) facts are kept for exactly two steps past their horizon.
    if (cfg.idle_retention) {
        erase_facts_if(out, [&](const Belief& h) {
            return !h.negated() && h.predicate() == "idle" && h.arity() == 2 &&
                   h.atom().args()[1].is_integer() && h.atom().args()[1].value() < now - 1;
        });
    }
    return out;
}

/// Predicates a ground operation may affect in its context's KB, or nullopt
/// when the effect cannot be bounded (empty.buffer).
inline std::optional<std::set<std::string>> operation_effects(const Operation& op,
                                                              const ManagementConfig& cfg) {
    auto it = cfg.handlers.find(op.name);
    if (it == cfg.handlers.end())
        throw ManagementError("unknown operation: " + op.str());
    std::set<std::string> preds;
    switch (it->second) {
    case HandlerKind::Add:
    case HandlerKind::Del:
    case HandlerKind::Set:
        if (!op.args.empty())
            preds.insert(term_to_belief(op.args[0]).predicate());
        return preds;
    case HandlerKind::DelAll:
        if (!op.args.empty() && op.args[0].is_symbol())
            preds.insert(op.args[0].name());
        return preds;
    case HandlerKind::Incr:
        preds.insert(cfg.incr_predicate);
        return preds;
    case HandlerKind::Alarm:
        preds.insert("alarm");
        return preds;
    case HandlerKind::Buffer:
        preds.insert(cfg.buffer_predicate);
        return preds;
    case HandlerKind::EmptyBuffer:
        return std::nullopt;
    case HandlerKind::ExtVal:
        for (const auto& [pred, arity] : cfg.extval_predicates)
            preds.insert(pred);
        if (!op.args.empty())
            preds.insert(term_to_belief(op.args[0]).predicate());
        return preds;
    case HandlerKind::Setter:
        preds.insert(cfg.setter_targets.at(op.name));
        return preds;
    }
    return std::nullopt;
}

} // namespace rmcs
