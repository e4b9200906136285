#pragma once

#include <map>
#include <optional>
#include <set>
#include <variant>
#include <vector>

#include "rmcs/belief.hpp"
#include "rmcs/observation.hpp"

namespace rmcs {

using BeliefState = std::vector<BeliefSet>;

// ---------------------------------------------------------------------------
// Ground bridge rules
// ---------------------------------------------------------------------------

struct ContextAtom {
    std::size_t context = 0;
    Belief belief;

    auto operator<=>(const ContextAtom&) const = default;
};

struct SensorAtom {
    std::size_t sensor = 0;
    Term datum;

    auto operator<=>(const SensorAtom&) const = default;
};

using BridgeAtom = std::variant<ContextAtom, SensorAtom>;

struct BridgeLiteral {
    BridgeAtom atom;
    bool naf = false;

    auto operator<=>(const BridgeLiteral&) const = default;
};

/// A ground management operation: op head of a bridge rule, or an element of
/// a management batch. Args may embed beliefs via neg(...) compounds.
struct Operation {
    std::string name;
    std::vector<Term> args;

    auto operator<=>(const Operation&) const = default;

    std::string str() const {
        std::string out = name;
        if (!args.empty()) {
            out += '(';
            for (std::size_t i = 0; i < args.size(); ++i) {
                if (i > 0)
                    out += ',';
                out += args[i].str();
            }
            out += ')';
        }
        return out;
    }
};

inline std::ostream& operator<<(std::ostream& out, const Operation& op) {
    return out << op.str();
}

struct BridgeRule {
    Operation head;
    std::vector<BridgeLiteral> body;

    auto operator<=>(const BridgeRule&) const = default;
};

// ---------------------------------------------------------------------------
// Satisfaction and applicability
// ---------------------------------------------------------------------------

inline bool literal_satisfied(const BridgeLiteral& lit, const BeliefState& state,
                              const Observation& obs) {
    bool holds;
    if (const auto* ca = std::get_if<ContextAtom>(&lit.atom)) {
        if (ca->context >= state.size())
            throw std::out_of_range("context index out of range in bridge literal");
        holds = state[ca->context].count(ca->belief) > 0;
    } else {
        const auto& sa = std::get<SensorAtom>(lit.atom);
        if (sa.sensor >= obs.readings.size())
            throw std::out_of_range("sensor index out of range in bridge literal");
        holds = obs.readings[sa.sensor].count(sa.datum) > 0;
    }
    return lit.naf ? !holds : holds;
}

inline bool applicable(const BridgeRule& rule, const BeliefState& state, const Observation& obs) {
    for (const auto& lit : rule.body)
        if (!literal_satisfied(lit, state, obs))
            return false;
    return true;
}

/// Heads of all applicable bridge rules: app_i(B, Obs).
inline std::set<Operation> app_heads(const std::vector<BridgeRule>& rules,
                                     const BeliefState& state, const Observation& obs) {
    std::set<Operation> heads;
    for (const auto& rule : rules)
        if (applicable(rule, state, obs))
            heads.insert(rule.head);
    return heads;
}

// ---------------------------------------------------------------------------
// Schemas: term patterns with variables and arithmetic, literal templates,
// guards, domain declarations, and negated existential blocks.
// ---------------------------------------------------------------------------

class GroundingError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A term with variables (uppercase identifiers) and integer arithmetic.
class TermPattern {
public:
    enum class Kind { Integer, Symbol, Compound, Variable, Arith };

    static TermPattern ground(const Term& t) {
        TermPattern p;
        switch (t.kind()) {
        case Term::Kind::Integer:
            p.kind_ = Kind::Integer;
            p.value_ = t.value();
            break;
        case Term::Kind::Symbol:
            p.kind_ = Kind::Symbol;
            p.name_ = t.name();
            break;
        case Term::Kind::Compound: {
            p.kind_ = Kind::Compound;
            p.name_ = t.name();
            for (const auto& a : t.args())
                p.args_.push_back(ground(a));
            break;
        }
        }
        return p;
    }

    static TermPattern integer(long long v) {
        TermPattern p;
        p.kind_ = Kind::Integer;
        p.value_ = v;
        return p;
    }

    static TermPattern symbol(std::string name) {
        TermPattern p;
        p.kind_ = Kind::Symbol;
        p.name_ = std::move(name);
        return p;
    }

    static TermPattern variable(std::string name) {
        TermPattern p;
        p.kind_ = Kind::Variable;
        p.name_ = std::move(name);
        return p;
    }

    static TermPattern compound(std::string functor, std::vector<TermPattern> args) {
        TermPattern p;
        p.kind_ = Kind::Compound;
        p.name_ = std::move(functor);
        p.args_ = std::move(args);
        return p;
    }

    /// op is "+" or "-" over two integer-valued subpatterns.
    static TermPattern arith(std::string op, TermPattern lhs, TermPattern rhs) {
        TermPattern p;
        p.kind_ = Kind::Arith;
        p.name_ = std::move(op);
        p.args_.push_back(std::move(lhs));
        p.args_.push_back(std::move(rhs));
        return p;
    }

    Kind kind() const { return kind_; }
    const std::string& name() const { return name_; }
    long long value() const { return value_; }
    const std::vector<TermPattern>& args() const { return args_; }

    bool is_ground() const {
        switch (kind_) {
        case Kind::Variable:
            return false;
        case Kind::Compound:
        case Kind::Arith:
            for (const auto& a : args_)
                if (!a.is_ground())
                    return false;
            return true;
        default:
            return true;
        }
    }

    bool contains_arith() const {
        if (kind_ == Kind::Arith)
            return true;
        for (const auto& a : args_)
            if (a.contains_arith())
                return true;
        return false;
    }

    void collect_variables(std::set<std::string>& out) const {
        if (kind_ == Kind::Variable)
            out.insert(name_);
        for (const auto& a : args_)
            a.collect_variables(out);
    }

    void collect_arith_variables(std::set<std::string>& out) const {
        if (kind_ == Kind::Arith)
            for (const auto& a : args_)
                a.collect_variables(out);
        for (const auto& a : args_)
            a.collect_arith_variables(out);
    }

    std::string str() const {
        switch (kind_) {
        case Kind::Integer:
            return std::to_string(value_);
        case Kind::Symbol:
        case Kind::Variable:
            return name_;
        case Kind::Arith:
            return args_[0].str() + " " + name_ + " " + args_[1].str();
        case Kind::Compound: {
            std::string out = name_ + '(';
            for (std::size_t i = 0; i < args_.size(); ++i) {
                if (i > 0)
                    out += ',';
                out += args_[i].str();
            }
            return out + ')';
        }
        }
        return {};
    }

private:
    Kind kind_ = Kind::Symbol;
    long long value_ = 0;
    std::string name_;
    std::vector<TermPattern> args_;
};

struct BeliefPattern {
    bool negated = false;
    TermPattern atom;

    std::string str() const { return (negated ? "~" : "") + atom.str(); }
};

/// Context slot is either a resolved index or a context-valued variable,
/// resolved by grounding over a finite domain of context names.
struct SchemaContextAtom {
    std::variant<std::size_t, std::string> context;
    BeliefPattern belief;
};

struct SchemaSensorAtom {
    std::size_t sensor = 0;
    TermPattern datum;
};

struct SchemaLiteral {
    std::variant<SchemaContextAtom, SchemaSensorAtom> atom;
    bool naf = false;
};

enum class RelOp { Lt, Le, Eq, Ne, Ge, Gt };

inline std::string_view rel_op_str(RelOp op) {
    switch (op) {
    case RelOp::Lt: return "<";
    case RelOp::Le: return "<=";
    case RelOp::Eq: return "=";
    case RelOp::Ne: return "!=";
    case RelOp::Ge: return ">=";
    case RelOp::Gt: return ">";
    }
    return "?";
}

struct SchemaGuard {
    TermPattern lhs;
    RelOp op = RelOp::Eq;
    TermPattern rhs;
};

/// not { <literal>, <guards> } — satisfied when no instantiation of its local
/// variables makes the literal and guards hold. Grounds to one plain naf
/// literal per in-bound local instantiation whose guards evaluate true.
struct NafBlock {
    SchemaLiteral literal; // stored non-naf; the block itself negates
    std::vector<SchemaGuard> guards;
};

using VariableDomains = std::map<std::string, std::vector<Term>>;

struct BridgeSchema {
    std::string op;
    std::vector<TermPattern> args;
    std::vector<SchemaLiteral> literals;
    std::vector<SchemaGuard> guards;
    std::vector<NafBlock> blocks;
    VariableDomains domains;
};

// ---------------------------------------------------------------------------
// Grounding
// ---------------------------------------------------------------------------

namespace detail {

using Substitution = std::map<std::string, Term>;

inline std::optional<Term> eval_pattern(const TermPattern& p, const Substitution& sub,
                                        long long time_bound, bool* out_of_bounds) {
    switch (p.kind()) {
    case TermPattern::Kind::Integer:
        return Term::integer(p.value());
    case TermPattern::Kind::Symbol:
        return Term::symbol(p.name());
    case TermPattern::Kind::Variable: {
        auto it = sub.find(p.name());
        if (it == sub.end())
            return std::nullopt;
        return it->second;
    }
    case TermPattern::Kind::Arith: {
        auto lhs = eval_pattern(p.args()[0], sub, time_bound, out_of_bounds);
        auto rhs = eval_pattern(p.args()[1], sub, time_bound, out_of_bounds);
        if (!lhs || !rhs)
            return std::nullopt;
        if (!lhs->is_integer() || !rhs->is_integer())
            throw GroundingError("non-integer operand in arithmetic expression: " + p.str());
        long long v = p.name() == "+" ? lhs->value() + rhs->value()
                                      : lhs->value() - rhs->value();
        // Instantiated time expressions are only kept up to the horizon.
        if (out_of_bounds && (v < 0 || v > time_bound))
            *out_of_bounds = true;
        return Term::integer(v);
    }
    case TermPattern::Kind::Compound: {
        std::vector<Term> args;
        for (const auto& a : p.args()) {
            auto t = eval_pattern(a, sub, time_bound, out_of_bounds);
            if (!t)
                return std::nullopt;
            args.push_back(std::move(*t));
        }
        return Term::compound(p.name(), std::move(args));
    }
    }
    return std::nullopt;
}

inline long long eval_guard_side(const TermPattern& p, const Substitution& sub) {
    auto t = eval_pattern(p, sub, 0, nullptr);
    if (!t)
        throw GroundingError("unbound variable in guard: " + p.str());
    if (!t->is_integer())
        throw GroundingError("non-integer bound in arithmetic guard: " + p.str());
    return t->value();
}

inline bool guard_holds(const SchemaGuard& g, const Substitution& sub) {
    long long l = eval_guard_side(g.lhs, sub);
    long long r = eval_guard_side(g.rhs, sub);
    switch (g.op) {
    case RelOp::Lt: return l < r;
    case RelOp::Le: return l <= r;
    case RelOp::Eq: return l == r;
    case RelOp::Ne: return l != r;
    case RelOp::Ge: return l >= r;
    case RelOp::Gt: return l > r;
    }
    return false;
}

/// Collects, for each variable occurring in the pattern, the ground values it
/// can take when matching the pattern against the datum.
inline void match_candidates(const TermPattern& p, const Term& datum,
                             std::map<std::string, std::set<Term>>& out) {
    switch (p.kind()) {
    case TermPattern::Kind::Variable:
        out[p.name()].insert(datum);
        return;
    case TermPattern::Kind::Compound:
        if (!datum.is_compound() || datum.name() != p.name() ||
            datum.arity() != p.args().size())
            return;
        for (std::size_t i = 0; i < p.args().size(); ++i)
            match_candidates(p.args()[i], datum.args()[i], out);
        return;
    default:
        return; // ground or arithmetic subpatterns never bind
    }
}

struct VariableInfo {
    std::vector<Term> candidates;
};

} // namespace detail

struct GroundingContext {
    const Observation* obs = nullptr;
    long long now = 0;
    long long horizon = 1;
    /// Maps context names to indices, for context-valued variables.
    std::map<std::string, std::size_t> context_ids;

    long long time_bound() const { return now + horizon; }
};

namespace detail {

inline void collect_literal_variables(const SchemaLiteral& lit, std::set<std::string>& vars,
                                      std::set<std::string>& arith_vars) {
    if (const auto* ca = std::get_if<SchemaContextAtom>(&lit.atom)) {
        if (const auto* v = std::get_if<std::string>(&ca->context))
            vars.insert(*v);
        ca->belief.atom.collect_variables(vars);
        ca->belief.atom.collect_arith_variables(arith_vars);
    } else {
        const auto& sa = std::get<SchemaSensorAtom>(lit.atom);
        sa.datum.collect_variables(vars);
        sa.datum.collect_arith_variables(arith_vars);
    }
}

/// Candidate values for one variable: declared domain first, then data bound
/// by positive sensor literals, then the time range for variables used in
/// arithmetic or guards. Anything else is unresolvable.
inline std::vector<Term> variable_candidates(
    const std::string& var, const BridgeSchema& schema, const VariableDomains& merged_domains,
    const std::set<std::string>& arith_vars, const GroundingContext& ctx,
    const std::vector<const SchemaLiteral*>& positive_sensor_literals) {
    if (auto it = merged_domains.find(var); it != merged_domains.end())
        return it->second;

    std::map<std::string, std::set<Term>> matches;
    bool sensor_bound = false;
    for (const auto* lit : positive_sensor_literals) {
        const auto& sa = std::get<SchemaSensorAtom>(lit->atom);
        std::set<std::string> lit_vars;
        sa.datum.collect_variables(lit_vars);
        if (!lit_vars.count(var))
            continue;
        sensor_bound = true;
        for (const auto& datum : ctx.obs->readings.at(sa.sensor))
            match_candidates(sa.datum, datum, matches);
    }
    if (auto it = matches.find(var); it != matches.end())
        return {it->second.begin(), it->second.end()};
    // The variable is bound by a positive sensor literal, but nothing in the
    // current reading matches: the schema simply has no instances this step.
    if (sensor_bound)
        return {};

    if (arith_vars.count(var)) {
        std::vector<Term> range;
        for (long long t = 0; t <= ctx.time_bound(); ++t)
            range.push_back(Term::integer(t));
        return range;
    }
    throw GroundingError("unresolvable variable " + var + " in schema for operation " +
                         schema.op + " (no finite domain)");
}

inline Belief instantiate_belief(const BeliefPattern& p, const Substitution& sub,
                                 long long time_bound, bool* oob) {
    auto t = eval_pattern(p.atom, sub, time_bound, oob);
    if (!t)
        throw GroundingError("unbound variable in belief pattern: " + p.atom.str());
    return Belief(std::move(*t), p.negated);
}

inline std::size_t resolve_context(const std::variant<std::size_t, std::string>& c,
                                   const Substitution& sub, const GroundingContext& ctx) {
    if (const auto* idx = std::get_if<std::size_t>(&c))
        return *idx;
    const auto& var = std::get<std::string>(c);
    auto it = sub.find(var);
    if (it == sub.end())
        throw GroundingError("unbound context variable " + var);
    if (!it->second.is_symbol())
        throw GroundingError("context variable " + var + " bound to non-symbol");
    auto ctx_it = ctx.context_ids.find(it->second.name());
    if (ctx_it == ctx.context_ids.end())
        throw GroundingError("context variable " + var + " bound to unknown context " +
                             it->second.name());
    return ctx_it->second;
}

} // namespace detail

/// All ground instances of the schemas within the time bound [0, now+horizon],
/// with variables drawn from declared domains, sensor data, or the time range,
/// guards evaluated and removed, and naf blocks expanded into naf literals.
inline std::vector<BridgeRule> ground_schemas(const std::vector<BridgeSchema>& schemas,
                                              const GroundingContext& ctx,
                                              const VariableDomains& global_domains = {}) {
    using namespace detail;
    if (ctx.horizon < 0)
        throw GroundingError("grounding horizon must be nonnegative");

    std::set<BridgeRule> out;
    for (const auto& schema : schemas) {
        VariableDomains merged = global_domains;
        for (const auto& [v, d] : schema.domains)
            merged[v] = d;

        // Outer variables: everything mentioned outside naf blocks, plus
        // block variables that also occur outside.
        std::set<std::string> vars, arith_vars;
        for (const auto& a : schema.args) {
            a.collect_variables(vars);
            a.collect_arith_variables(arith_vars);
        }
        for (const auto& lit : schema.literals)
            collect_literal_variables(lit, vars, arith_vars);
        for (const auto& g : schema.guards) {
            g.lhs.collect_variables(vars);
            g.rhs.collect_variables(vars);
            g.lhs.collect_variables(arith_vars);
            g.rhs.collect_variables(arith_vars);
        }
        std::set<std::string> outer_vars = vars;

        std::vector<const SchemaLiteral*> positive_sensor_literals;
        for (const auto& lit : schema.literals)
            if (!lit.naf && std::holds_alternative<SchemaSensorAtom>(lit.atom))
                positive_sensor_literals.push_back(&lit);

        std::vector<std::string> var_names(outer_vars.begin(), outer_vars.end());
        std::vector<VariableInfo> infos;
        for (const auto& v : var_names)
            infos.push_back({variable_candidates(v, schema, merged, arith_vars, ctx,
                                                 positive_sensor_literals)});

        // Odometer over the candidate product.
        std::vector<std::size_t> idx(var_names.size(), 0);
        bool empty_product = false;
        for (const auto& info : infos)
            if (info.candidates.empty())
                empty_product = true;
        while (!empty_product) {
            Substitution sub;
            for (std::size_t i = 0; i < var_names.size(); ++i)
                sub[var_names[i]] = infos[i].candidates[idx[i]];

            bool guards_ok = true;
            for (const auto& g : schema.guards)
                if (!guard_holds(g, sub)) {
                    guards_ok = false;
                    break;
                }
            if (guards_ok) {
                bool oob = false;
                BridgeRule rule;
                std::vector<Term> head_args;
                for (const auto& a : schema.args) {
                    auto t = eval_pattern(a, sub, ctx.time_bound(), &oob);
                    if (!t)
                        throw GroundingError("unbound variable in head of " + schema.op);
                    head_args.push_back(std::move(*t));
                }
                rule.head = Operation{schema.op, std::move(head_args)};

                for (const auto& lit : schema.literals) {
                    BridgeLiteral ground_lit;
                    ground_lit.naf = lit.naf;
                    if (const auto* ca = std::get_if<SchemaContextAtom>(&lit.atom)) {
                        ContextAtom atom;
                        atom.context = resolve_context(ca->context, sub, ctx);
                        atom.belief = instantiate_belief(ca->belief, sub, ctx.time_bound(), &oob);
                        ground_lit.atom = std::move(atom);
                    } else {
                        const auto& sa = std::get<SchemaSensorAtom>(lit.atom);
                        auto t = eval_pattern(sa.datum, sub, ctx.time_bound(), &oob);
                        if (!t)
                            throw GroundingError("unbound variable in sensor atom of " +
                                                 schema.op);
                        ground_lit.atom = SensorAtom{sa.sensor, std::move(*t)};
                    }
                    rule.body.push_back(std::move(ground_lit));
                }

                // Expand naf blocks: one naf literal per in-bound local
                // instantiation whose guards hold.
                for (const auto& block : schema.blocks) {
                    std::set<std::string> bvars, barith;
                    collect_literal_variables(block.literal, bvars, barith);
                    for (const auto& g : block.guards) {
                        g.lhs.collect_variables(bvars);
                        g.rhs.collect_variables(bvars);
                        g.lhs.collect_variables(barith);
                        g.rhs.collect_variables(barith);
                    }
                    std::vector<std::string> local;
                    for (const auto& v : bvars)
                        if (!sub.count(v))
                            local.push_back(v);
                    std::vector<VariableInfo> local_infos;
                    for (const auto& v : local)
                        local_infos.push_back(
                            {variable_candidates(v, schema, merged, barith, ctx, {})});
                    std::vector<std::size_t> lidx(local.size(), 0);
                    bool local_empty = false;
                    for (const auto& info : local_infos)
                        if (info.candidates.empty())
                            local_empty = true;
                    std::set<BridgeLiteral> expanded;
                    while (!local_empty) {
                        Substitution block_sub = sub;
                        for (std::size_t i = 0; i < local.size(); ++i)
                            block_sub[local[i]] = local_infos[i].candidates[lidx[i]];
                        bool ok = true;
                        for (const auto& g : block.guards)
                            if (!guard_holds(g, block_sub)) {
                                ok = false;
                                break;
                            }
                        if (ok) {
                            bool lit_oob = false;
                            BridgeLiteral ground_lit;
                            ground_lit.naf = true;
                            if (const auto* ca =
                                    std::get_if<SchemaContextAtom>(&block.literal.atom)) {
                                ContextAtom atom;
                                atom.context = resolve_context(ca->context, block_sub, ctx);
                                atom.belief = instantiate_belief(ca->belief, block_sub,
                                                                 ctx.time_bound(), &lit_oob);
                                ground_lit.atom = std::move(atom);
                            } else {
                                const auto& sa = std::get<SchemaSensorAtom>(block.literal.atom);
                                auto t = eval_pattern(sa.datum, block_sub, ctx.time_bound(),
                                                      &lit_oob);
                                if (!t)
                                    throw GroundingError("unbound variable in naf block of " +
                                                         schema.op);
                                ground_lit.atom = SensorAtom{sa.sensor, std::move(*t)};
                            }
                            if (!lit_oob)
                                expanded.insert(std::move(ground_lit));
                        }
                        // advance local odometer
                        std::size_t k = 0;
                        for (; k < local.size(); ++k) {
                            if (++lidx[k] < local_infos[k].candidates.size())
                                break;
                            lidx[k] = 0;
                        }
                        if (k == local.size())
                            break;
                    }
                    for (auto& lit : expanded)
                        rule.body.push_back(lit);
                }

                if (!oob)
                    out.insert(std::move(rule));
            }

            // advance odometer
            std::size_t k = 0;
            for (; k < var_names.size(); ++k) {
                if (++idx[k] < infos[k].candidates.size())
                    break;
                idx[k] = 0;
            }
            if (k == var_names.size())
                break;
            if (var_names.empty())
                break;
        }
    }
    return {out.begin(), out.end()};
}

} // namespace rmcs
