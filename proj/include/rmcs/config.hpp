#pragma once

#include <cctype>
#include <sstream>
#include <string>
#include <vector>

#include "rmcs/system.hpp"

namespace rmcs {

/// A validated system description; parse_system is the only constructor.
struct SystemConfig {
    RMCS system;
    long long horizon = 1;
};

namespace detail {

struct Line {
    std::size_t number = 0;
    std::string text;
};

inline std::vector<Line> split_lines(std::string_view text) {
    std::vector<Line> lines;
    std::size_t lineno = 1;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos)
            end = text.size();
        std::string line(text.substr(start, end - start));
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        while (!line.empty() && (line.back() == ' ' || line.back() == '\t' || line.back() == '\r'))
            line.pop_back();
        std::size_t indent = line.find_first_not_of(" \t");
        if (indent != std::string::npos)
            lines.push_back({lineno, line.substr(indent)});
        if (end == text.size())
            break;
        start = end + 1;
        ++lineno;
    }
    return lines;
}

[[noreturn]] inline void config_fail(std::size_t lineno, const std::string& msg) {
    throw ConfigError("line " + std::to_string(lineno) + ": " + msg);
}

inline bool is_variable_start(char c) { return c >= 'A' && c <= 'Z'; }

/// Pattern scanner: terms with variables, arithmetic, and the ~ shorthand
/// for classical negation (parsed into neg(...) compounds in operation args).
class PatternScanner {
public:
    PatternScanner(std::string_view text, std::size_t lineno)
        : text_(text), lineno_(lineno) {}

    std::size_t pos() const { return pos_; }
    bool done() {
        skip_ws();
        return pos_ >= text_.size();
    }

    void skip_ws() {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t'))
            ++pos_;
    }

    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    void expect(char c) {
        if (peek() != c)
            config_fail(lineno_, std::string("expected '") + c + "' in pattern: " +
                                     std::string(text_));
        ++pos_;
    }

    bool try_consume(char c) {
        if (peek() == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    std::string identifier() {
        skip_ws();
        if (pos_ >= text_.size() ||
            !(is_variable_start(text_[pos_]) || is_symbol_start(text_[pos_])))
            config_fail(lineno_, "expected identifier in: " + std::string(text_));
        std::size_t start = pos_;
        while (pos_ < text_.size() && is_ident_char(text_[pos_]))
            ++pos_;
        while (pos_ < text_.size() && text_[pos_] == '.' && pos_ + 1 < text_.size() &&
               is_ident_char(text_[pos_ + 1])) {
            ++pos_;
            while (pos_ < text_.size() && is_ident_char(text_[pos_]))
                ++pos_;
        }
        return std::string(text_.substr(start, pos_ - start));
    }

    TermPattern primary(bool allow_neg) {
        skip_ws();
        if (pos_ >= text_.size())
            config_fail(lineno_, "unexpected end of pattern: " + std::string(text_));
        char c = text_[pos_];
        if (allow_neg && c == '~') {
            ++pos_;
            TermPattern inner = primary(false);
            return TermPattern::compound("neg", {std::move(inner)});
        }
        if (c == '-' || std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            if (c == '-')
                ++pos_;
            if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
                config_fail(lineno_, "expected integer in: " + std::string(text_));
            long long v = 0;
            bool neg = c == '-';
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                v = v * 10 + (text_[pos_++] - '0');
            (void)start;
            return TermPattern::integer(neg ? -v : v);
        }
        std::string name = identifier();
        if (is_variable_start(name[0])) {
            return TermPattern::variable(std::move(name));
        }
        skip_ws();
        if (peek() != '(')
            return TermPattern::symbol(std::move(name));
        ++pos_;
        std::vector<TermPattern> args;
        args.push_back(pattern(true));
        while (try_consume(','))
            args.push_back(pattern(true));
        expect(')');
        return TermPattern::compound(std::move(name), std::move(args));
    }

    /// additive chain of primaries: T, T+1, T-Z+1, ...
    TermPattern pattern(bool allow_neg) {
        TermPattern lhs = primary(allow_neg);
        while (true) {
            skip_ws();
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) {
                char op = text_[pos_++];
                TermPattern rhs = primary(false);
                lhs = TermPattern::arith(std::string(1, op), std::move(lhs), std::move(rhs));
            } else {
                break;
            }
        }
        return lhs;
    }

private:
    std::string_view text_;
    std::size_t lineno_;
    std::size_t pos_ = 0;
};

/// Splits a list on a separator at paren/brace depth zero.
inline std::vector<std::string> split_top_level(std::string_view text, char sep) {
    std::vector<std::string> parts;
    int depth = 0;
    std::string current;
    for (char c : text) {
        if (c == '(' || c == '{')
            ++depth;
        else if (c == ')' || c == '}')
            --depth;
        if (c == sep && depth == 0) {
            parts.push_back(current);
            current.clear();
        } else {
            current += c;
        }
    }
    parts.push_back(current);
    for (auto& p : parts) {
        std::size_t a = p.find_first_not_of(" \t");
        std::size_t b = p.find_last_not_of(" \t");
        p = a == std::string::npos ? std::string() : p.substr(a, b - a + 1);
    }
    while (!parts.empty() && parts.back().empty())
        parts.pop_back();
    return parts;
}

inline std::optional<std::pair<RelOp, std::size_t>> find_top_level_relop(std::string_view s) {
    int depth = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        char c = s[i];
        if (c == '(' || c == '{')
            ++depth;
        else if (c == ')' || c == '}')
            --depth;
        if (depth != 0)
            continue;
        auto two = [&](std::size_t i) {
            return i + 1 < s.size() ? s.substr(i, 2) : std::string_view{};
        };
        if (two(i) == "<=")
            return {{RelOp::Le, i}};
        if (two(i) == ">=")
            return {{RelOp::Ge, i}};
        if (two(i) == "!=")
            return {{RelOp::Ne, i}};
        if (c == '<')
            return {{RelOp::Lt, i}};
        if (c == '>')
            return {{RelOp::Gt, i}};
        if (c == '=')
            return {{RelOp::Eq, i}};
    }
    return std::nullopt;
}

struct NameResolver {
    const RMCS* system;

    std::optional<std::size_t> sensor(const std::string& name) const {
        for (std::size_t i = 0; i < system->sensors.size(); ++i)
            if (system->sensors[i].name == name)
                return i;
        return std::nullopt;
    }
    std::optional<std::size_t> context(const std::string& name) const {
        for (std::size_t i = 0; i < system->contexts.size(); ++i)
            if (system->contexts[i].name == name)
                return i;
        return std::nullopt;
    }
};

inline BeliefPattern parse_belief_pattern(std::string_view text, std::size_t lineno) {
    PatternScanner s(text, lineno);
    BeliefPattern p;
    if (s.try_consume('~'))
        p.negated = true;
    p.atom = s.pattern(false);
    if (!s.done())
        config_fail(lineno, "trailing input in belief pattern: " + std::string(text));
    return p;
}

/// One body element that is a context or sensor atom (no naf, no guard).
inline SchemaLiteral parse_plain_atom(const std::string& text, std::size_t lineno,
                                      const NameResolver& names) {
    // context atoms use ':', sensor atoms use '@'; both at top level
    int depth = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (c == '(' || c == '{')
            ++depth;
        else if (c == ')' || c == '}')
            --depth;
        if (depth != 0)
            continue;
        if (c == ':') {
            std::string lhs = text.substr(0, i);
            std::size_t a = lhs.find_last_not_of(" \t");
            lhs = lhs.substr(0, a + 1);
            SchemaContextAtom atom;
            if (!lhs.empty() && is_variable_start(lhs[0])) {
                atom.context = lhs;
            } else if (auto idx = names.context(lhs)) {
                atom.context = *idx;
            } else {
                config_fail(lineno, "unknown context '" + lhs + "' in bridge literal");
            }
            atom.belief = parse_belief_pattern(text.substr(i + 1), lineno);
            return SchemaLiteral{std::move(atom), false};
        }
        if (c == '@') {
            std::string lhs = text.substr(0, i);
            std::size_t a = lhs.find_last_not_of(" \t");
            lhs = lhs.substr(0, a + 1);
            auto idx = names.sensor(lhs);
            if (!idx)
                config_fail(lineno, "unknown sensor '" + lhs + "' in bridge literal");
            std::string datum_text = text.substr(i + 1);
            PatternScanner s(datum_text, lineno);
            SchemaSensorAtom atom;
            atom.sensor = *idx;
            atom.datum = s.pattern(false);
            if (!s.done())
                config_fail(lineno, "trailing input in sensor atom: " + text);
            return SchemaLiteral{std::move(atom), false};
        }
    }
    config_fail(lineno, "expected a context or sensor atom: " + text);
}

inline SchemaGuard parse_guard(const std::string& text, std::size_t lineno, RelOp op,
                               std::size_t op_pos) {
    std::size_t op_len = (op == RelOp::Le || op == RelOp::Ge || op == RelOp::Ne) ? 2 : 1;
    PatternScanner lhs(std::string_view(text).substr(0, op_pos), lineno);
    PatternScanner rhs(std::string_view(text).substr(op_pos + op_len), lineno);
    SchemaGuard g;
    g.lhs = lhs.pattern(false);
    g.op = op;
    g.rhs = rhs.pattern(false);
    if (!lhs.done() || !rhs.done())
        config_fail(lineno, "trailing input in guard: " + text);
    return g;
}

inline bool starts_with_word(const std::string& s, std::string_view word) {
    if (s.size() < word.size() || s.compare(0, word.size(), word) != 0)
        return false;
    return s.size() == word.size() || s[word.size()] == ' ' || s[word.size()] == '\t' ||
           s[word.size()] == '{';
}

inline BridgeSchema parse_schema(const std::string& text, std::size_t lineno,
                                 const NameResolver& names,
                                 const std::set<std::string>& global_vars = {}) {
    std::size_t arrow = text.find("<-");
    if (arrow == std::string::npos)
        config_fail(lineno, "bridge schema needs '<-': " + text);

    BridgeSchema schema;
    {
        PatternScanner s(std::string_view(text).substr(0, arrow), lineno);
        schema.op = s.identifier();
        if (s.try_consume('(')) {
            schema.args.push_back(s.pattern(true));
            while (s.try_consume(','))
                schema.args.push_back(s.pattern(true));
            s.expect(')');
        }
        if (!s.done())
            config_fail(lineno, "trailing input in schema head: " + text);
    }

    for (const auto& element : split_top_level(text.substr(arrow + 2), ',')) {
        if (element.empty())
            continue;
        if (starts_with_word(element, "not")) {
            std::string rest = element.substr(3);
            std::size_t a = rest.find_first_not_of(" \t");
            rest = a == std::string::npos ? std::string() : rest.substr(a);
            if (!rest.empty() && rest.front() == '{') {
                if (rest.back() != '}')
                    config_fail(lineno, "unterminated naf block: " + element);
                NafBlock block;
                bool have_literal = false;
                for (const auto& inner :
                     split_top_level(rest.substr(1, rest.size() - 2), ',')) {
                    if (auto rel = find_top_level_relop(inner)) {
                        block.guards.push_back(
                            parse_guard(inner, lineno, rel->first, rel->second));
                    } else if (!have_literal) {
                        block.literal = parse_plain_atom(inner, lineno, names);
                        have_literal = true;
                    } else {
                        config_fail(lineno,
                                    "a naf block holds one atom plus guards: " + element);
                    }
                }
                if (!have_literal)
                    config_fail(lineno, "naf block without an atom: " + element);
                schema.blocks.push_back(std::move(block));
            } else {
                SchemaLiteral lit = parse_plain_atom(rest, lineno, names);
                lit.naf = true;
                schema.literals.push_back(std::move(lit));
            }
            continue;
        }
        // domain declaration: VAR in {t1, t2, ...}
        if (!element.empty() && is_variable_start(element[0])) {
            std::size_t sp = element.find_first_of(" \t");
            if (sp != std::string::npos) {
                std::string var = element.substr(0, sp);
                std::size_t kw = element.find_first_not_of(" \t", sp);
                if (kw != std::string::npos && element.compare(kw, 2, "in") == 0) {
                    std::size_t brace = element.find('{', kw);
                    if (brace == std::string::npos || element.back() != '}')
                        config_fail(lineno, "domain declaration needs { ... }: " + element);
                    std::vector<Term> values;
                    for (const auto& v : split_top_level(
                             element.substr(brace + 1, element.size() - brace - 2), ',')) {
                        try {
                            values.push_back(parse_term(v));
                        } catch (const ParseError& e) {
                            config_fail(lineno, "bad domain value '" + v + "': " + e.what());
                        }
                    }
                    schema.domains[var] = std::move(values);
                    continue;
                }
            }
        }
        if (auto rel = find_top_level_relop(element)) {
            schema.guards.push_back(parse_guard(element, lineno, rel->first, rel->second));
            continue;
        }
        schema.literals.push_back(parse_plain_atom(element, lineno, names));
    }

    // Safety: every head variable must be resolvable from a body literal,
    // a guard's time range, or a finite domain.
    std::set<std::string> head_vars;
    for (const auto& a : schema.args)
        a.collect_variables(head_vars);
    std::set<std::string> body_vars;
    std::set<std::string> arith_dummy;
    for (const auto& lit : schema.literals) {
        if (lit.naf)
            continue; // negated literals never bind variables
        if (const auto* ca = std::get_if<SchemaContextAtom>(&lit.atom)) {
            ca->belief.atom.collect_variables(body_vars);
        } else {
            std::get<SchemaSensorAtom>(lit.atom).datum.collect_variables(body_vars);
        }
    }
    (void)arith_dummy;
    for (const auto& g : schema.guards) {
        g.lhs.collect_variables(body_vars);
        g.rhs.collect_variables(body_vars);
    }
    for (const auto& [v, d] : schema.domains)
        body_vars.insert(v);
    body_vars.insert(global_vars.begin(), global_vars.end());
    for (const auto& v : head_vars)
        if (!body_vars.count(v))
            config_fail(lineno, "unsafe head variable " + v + " in schema for " + schema.op);

    return schema;
}

inline KBElement parse_kb_rule(const std::string& text, std::size_t lineno) {
    auto as_belief = [&](const std::string& s) {
        try {
            return parse_belief(s);
        } catch (const ParseError& e) {
            config_fail(lineno, "bad belief '" + s + "': " + e.what());
        }
    };
    std::size_t arrow = text.find("<-");
    if (arrow == std::string::npos)
        return KBElement(as_belief(text));
    Belief head = as_belief(text.substr(0, arrow));
    std::vector<Belief> pos, neg;
    for (const auto& element : split_top_level(text.substr(arrow + 2), ',')) {
        if (element.empty())
            continue;
        if (starts_with_word(element, "not"))
            neg.push_back(as_belief(element.substr(3)));
        else
            pos.push_back(as_belief(element));
    }
    return KBElement(std::move(head), std::move(pos), std::move(neg));
}

inline void parse_ops_decl(const std::string& decl, std::size_t lineno, ManagementConfig& cfg) {
    std::istringstream in(decl);
    std::string word;
    if (!(in >> word))
        return;
    auto simple = [&](HandlerKind kind) { cfg.handlers[word] = kind; };
    if (word == "add") {
        simple(HandlerKind::Add);
    } else if (word == "del") {
        simple(HandlerKind::Del);
    } else if (word == "delAll") {
        simple(HandlerKind::DelAll);
    } else if (word == "set") {
        simple(HandlerKind::Set);
    } else if (word == "alarm") {
        simple(HandlerKind::Alarm);
    } else if (word == "bf") {
        simple(HandlerKind::Buffer);
    } else if (word == "empty.buffer") {
        simple(HandlerKind::EmptyBuffer);
    } else if (word == "incr") {
        cfg.handlers["incr"] = HandlerKind::Incr;
        std::string pred;
        if (in >> pred)
            cfg.incr_predicate = pred;
    } else if (word == "setter") {
        std::string op, pred;
        if (!(in >> op >> pred))
            config_fail(lineno, "setter declaration needs an operation and a predicate");
        cfg.handlers[op] = HandlerKind::Setter;
        cfg.setter_targets[op] = pred;
    } else if (word == "extVal") {
        cfg.handlers["extVal"] = HandlerKind::ExtVal;
        std::string spec;
        while (in >> spec) {
            std::size_t slash = spec.find('/');
            if (slash == std::string::npos)
                config_fail(lineno, "extVal predicate needs name/arity: " + spec);
            cfg.extval_predicates.emplace_back(
                spec.substr(0, slash),
                static_cast<std::size_t>(std::stoul(spec.substr(slash + 1))));
        }
    } else {
        config_fail(lineno, "unknown handler declaration: " + decl);
    }
}

inline FunctionalDecl parse_functional_decl(const std::string& text, std::size_t lineno) {
    std::size_t slash = text.find('/');
    std::size_t at = text.find('@', slash == std::string::npos ? 0 : slash);
    if (slash == std::string::npos || at == std::string::npos)
        config_fail(lineno, "functional declaration needs pred/arity@pos: " + text);
    std::string pred = text.substr(0, slash);
    std::size_t arity = std::stoul(text.substr(slash + 1, at - slash - 1));
    std::set<std::size_t> positions;
    std::string rest = text.substr(at + 1);
    for (std::size_t start = 0; start <= rest.size();) {
        std::size_t next = rest.find('@', start);
        if (next == std::string::npos)
            next = rest.size();
        positions.insert(static_cast<std::size_t>(std::stoul(rest.substr(start, next - start))));
        start = next + 1;
    }
    try {
        return FunctionalDecl(pred, arity, positions);
    } catch (const std::invalid_argument& e) {
        config_fail(lineno, e.what());
    }
}

} // namespace detail

inline SystemConfig parse_system(std::string_view text) {
    using namespace detail;
    auto lines = split_lines(text);
    SystemConfig config;
    RMCS& system = config.system;

    struct RawBlock {
        std::string kind; // "sensor" or "context"
        std::string name;
        bool auto_time = false;
        std::vector<std::pair<std::size_t, std::string>> entries; // key: value lines
    };
    std::vector<RawBlock> blocks;

    for (std::size_t li = 0; li < lines.size(); ++li) {
        const auto& [lineno, line] = lines[li];
        if (line.empty())
            continue;
        if (starts_with_word(line, "horizon")) {
            config.horizon = std::stoll(line.substr(7));
            continue;
        }
        if (starts_with_word(line, "domain")) {
            std::string rest = line.substr(6);
            std::size_t colon = rest.find(':');
            if (colon == std::string::npos)
                config_fail(lineno, "domain needs 'domain VAR: v1, v2'");
            std::string var = rest.substr(0, colon);
            var.erase(0, var.find_first_not_of(" \t"));
            var.erase(var.find_last_not_of(" \t") + 1);
            std::vector<Term> values;
            for (const auto& v : split_top_level(rest.substr(colon + 1), ','))
                values.push_back(parse_term(v));
            system.global_domains[var] = std::move(values);
            continue;
        }
        if (starts_with_word(line, "sensor") || starts_with_word(line, "context")) {
            RawBlock block;
            std::size_t brace = line.find('{');
            if (brace == std::string::npos)
                config_fail(lineno, "sensor/context block needs '{'");
            std::istringstream in(line.substr(0, brace));
            in >> block.kind >> block.name;
            std::string word;
            while (in >> word) {
                if (word == "auto-time")
                    block.auto_time = true;
                else
                    config_fail(lineno, "unexpected token '" + word + "'");
            }
            if (block.name.empty())
                config_fail(lineno, block.kind + " needs a name");

            std::string inline_part = line.substr(brace + 1);
            bool closed = false;
            if (auto close = inline_part.find('}'); close != std::string::npos) {
                inline_part = inline_part.substr(0, close);
                closed = true;
            }
            std::size_t a = inline_part.find_first_not_of(" \t");
            if (a != std::string::npos)
                block.entries.emplace_back(lineno, inline_part.substr(a));
            if (!closed) {
                ++li;
                for (; li < lines.size(); ++li) {
                    const auto& [ln, inner] = lines[li];
                    if (inner == "}") {
                        closed = true;
                        break;
                    }
                    block.entries.emplace_back(ln, inner);
                }
            }
            if (!closed)
                config_fail(lineno, "unterminated " + block.kind + " block");
            blocks.push_back(std::move(block));
            continue;
        }
        config_fail(lineno, "unexpected line: " + line);
    }

    // Sensors first, then context shells, so bridge rules can cross-reference.
    for (const auto& block : blocks) {
        if (block.kind != "sensor")
            continue;
        Sensor sensor;
        sensor.name = block.name;
        sensor.is_time = block.auto_time;
        for (const auto& [lineno, entry] : block.entries) {
            std::size_t colon = entry.find(':');
            if (colon == std::string::npos)
                config_fail(lineno, "expected 'key: value' in sensor block");
            std::string key = entry.substr(0, colon);
            key.erase(key.find_last_not_of(" \t") + 1);
            std::string value = entry.substr(colon + 1);
            if (key != "lang")
                config_fail(lineno, "unknown sensor key: " + key);
            for (const auto& sig : split_top_level(value, ',')) {
                if (sig == "integers") {
                    sensor.integers = true;
                    continue;
                }
                std::size_t slash = sig.find('/');
                if (slash == std::string::npos)
                    config_fail(lineno, "sensor signature needs name/arity: " + sig);
                sensor.signatures.push_back(
                    {sig.substr(0, slash),
                     static_cast<std::size_t>(std::stoul(sig.substr(slash + 1)))});
            }
        }
        system.sensors.push_back(std::move(sensor));
    }
    for (const auto& block : blocks) {
        if (block.kind != "context")
            continue;
        Context ctx;
        ctx.name = block.name;
        ctx.logic = std::make_shared<IdentityLogic>();
        system.contexts.push_back(std::move(ctx));
        system.bridge.emplace_back();
        system.kbs.emplace_back();
    }

    NameResolver names{&system};
    std::size_t ci = 0;
    for (const auto& block : blocks) {
        if (block.kind != "context")
            continue;
        Context& ctx = system.contexts[ci];
        for (const auto& [lineno, entry] : block.entries) {
            std::size_t colon = entry.find(':');
            if (colon == std::string::npos)
                config_fail(lineno, "expected 'key: value' in context block");
            std::string key = entry.substr(0, colon);
            key.erase(key.find_last_not_of(" \t") + 1);
            std::string value = entry.substr(colon + 1);
            std::size_t a = value.find_first_not_of(" \t");
            value = a == std::string::npos ? std::string() : value.substr(a);

            if (key == "logic") {
                try {
                    ctx.logic = make_logic(value);
                } catch (const std::exception& e) {
                    config_fail(lineno, e.what());
                }
            } else if (key == "kb") {
                for (const auto& rule : split_top_level(value, ';'))
                    if (!rule.empty())
                        system.kbs[ci].insert(parse_kb_rule(rule, lineno));
            } else if (key == "ops") {
                for (const auto& decl : split_top_level(value, ';'))
                    if (!decl.empty())
                        parse_ops_decl(decl, lineno, ctx.mng);
            } else if (key == "ranking") {
                for (const auto& sensor : split_top_level(value, '>')) {
                    if (!names.sensor(sensor))
                        config_fail(lineno, "ranking names unknown sensor: " + sensor);
                    ctx.mng.ranking.push_back(sensor);
                }
            } else if (key == "functional") {
                for (const auto& decl : split_top_level(value, ','))
                    if (!decl.empty())
                        ctx.mng.policy.functional.push_back(
                            parse_functional_decl(decl, lineno));
            } else if (key == "bridge") {
                std::set<std::string> global_vars;
                for (const auto& [v, d] : system.global_domains)
                    global_vars.insert(v);
                for (const auto& schema : split_top_level(value, ';'))
                    if (!schema.empty())
                        system.bridge[ci].push_back(
                            parse_schema(schema, lineno, names, global_vars));
            } else if (key == "idle-retention") {
                ctx.mng.idle_retention = value == "on" || value == "true";
            } else if (key == "buffer") {
                ctx.mng.buffer_predicate = value;
            } else if (key == "window") {
                ctx.mng.window_predicate = value;
            } else {
                config_fail(lineno, "unknown context key: " + key);
            }
        }
        ++ci;
    }

    system.validate();
    return config;
}

// ---------------------------------------------------------------------------
// Printing (round-trip partner of parse_system / parse_trace)
// ---------------------------------------------------------------------------

namespace detail {

inline std::string schema_str(const BridgeSchema& schema, const RMCS& system) {
    std::string out = Operation{schema.op, {}}.str();
    if (!schema.args.empty()) {
        out += '(';
        for (std::size_t i = 0; i < schema.args.size(); ++i) {
            if (i > 0)
                out += ',';
            out += schema.args[i].str();
        }
        out += ')';
    }
    out += " <-";
    std::vector<std::string> parts;
    auto literal_str = [&](const SchemaLiteral& lit) {
        std::string s;
        if (const auto* ca = std::get_if<SchemaContextAtom>(&lit.atom)) {
            if (const auto* idx = std::get_if<std::size_t>(&ca->context))
                s = system.contexts[*idx].name;
            else
                s = std::get<std::string>(ca->context);
            s += ':';
            s += ca->belief.str();
        } else {
            const auto& sa = std::get<SchemaSensorAtom>(lit.atom);
            s = system.sensors[sa.sensor].name + "@" + sa.datum.str();
        }
        return lit.naf ? "not " + s : s;
    };
    for (const auto& lit : schema.literals)
        parts.push_back(literal_str(lit));
    for (const auto& g : schema.guards)
        parts.push_back(g.lhs.str() + " " + std::string(rel_op_str(g.op)) + " " + g.rhs.str());
    for (const auto& block : schema.blocks) {
        std::string s = "not { " + literal_str(block.literal);
        for (const auto& g : block.guards)
            s += ", " + g.lhs.str() + " " + std::string(rel_op_str(g.op)) + " " + g.rhs.str();
        parts.push_back(s + " }");
    }
    for (const auto& [var, values] : schema.domains) {
        std::string s = var + " in {";
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i > 0)
                s += ", ";
            s += values[i].str();
        }
        parts.push_back(s + "}");
    }
    for (std::size_t i = 0; i < parts.size(); ++i)
        out += (i == 0 ? " " : ", ") + parts[i];
    return out;
}

} // namespace detail

inline std::string print_system(const SystemConfig& config) {
    std::ostringstream out;
    const RMCS& system = config.system;
    out << "horizon " << config.horizon << "\n";
    for (const auto& [var, values] : system.global_domains) {
        out << "domain " << var << ":";
        for (std::size_t i = 0; i < values.size(); ++i)
            out << (i == 0 ? " " : ", ") << values[i].str();
        out << "\n";
    }
    for (const auto& sensor : system.sensors) {
        out << "sensor " << sensor.name << (sensor.is_time ? " auto-time" : "") << " {\n";
        out << "  lang:";
        bool first = true;
        if (sensor.integers) {
            out << " integers";
            first = false;
        }
        for (const auto& sig : sensor.signatures) {
            out << (first ? " " : ", ") << sig.name << "/" << sig.arity;
            first = false;
        }
        out << "\n}\n";
    }
    for (std::size_t i = 0; i < system.contexts.size(); ++i) {
        const Context& ctx = system.contexts[i];
        out << "context " << ctx.name << " {\n";
        out << "  logic: " << ctx.logic->name() << "\n";
        if (!system.kbs[i].empty()) {
            out << "  kb:";
            bool first = true;
            for (const auto& e : system.kbs[i]) {
                out << (first ? " " : "; ") << e.str();
                first = false;
            }
            out << "\n";
        }
        for (const auto& [name, kind] : ctx.mng.handlers) {
            out << "  ops: ";
            switch (kind) {
            case HandlerKind::Incr:
                out << "incr " << ctx.mng.incr_predicate;
                break;
            case HandlerKind::Setter:
                out << "setter " << name << " " << ctx.mng.setter_targets.at(name);
                break;
            case HandlerKind::ExtVal:
                out << "extVal";
                for (const auto& [pred, arity] : ctx.mng.extval_predicates)
                    out << " " << pred << "/" << arity;
                break;
            default:
                out << name;
            }
            out << "\n";
        }
        if (!ctx.mng.ranking.empty()) {
            out << "  ranking:";
            for (std::size_t k = 0; k < ctx.mng.ranking.size(); ++k)
                out << (k == 0 ? " " : " > ") << ctx.mng.ranking[k];
            out << "\n";
        }
        if (!ctx.mng.policy.functional.empty()) {
            out << "  functional:";
            bool first = true;
            for (const auto& decl : ctx.mng.policy.functional) {
                out << (first ? " " : ", ") << decl.predicate << "/" << decl.arity;
                for (std::size_t p : decl.value_positions)
                    out << "@" << p;
                first = false;
            }
            out << "\n";
        }
        if (ctx.mng.idle_retention)
            out << "  idle-retention: on\n";
        for (const auto& schema : system.bridge[i])
            out << "  bridge: " << detail::schema_str(schema, system) << "\n";
        out << "}\n";
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Traces
// ---------------------------------------------------------------------------

inline ObservationTrace parse_trace(std::string_view text, const SystemConfig& config) {
    using namespace detail;
    const RMCS& system = config.system;
    ObservationTrace trace;
    auto lines = split_lines(text);
    std::size_t li = 0;
    while (li < lines.size()) {
        const auto& [lineno, line] = lines[li];
        if (line.empty()) {
            ++li;
            continue;
        }
        if (!starts_with_word(line, "obs"))
            config_fail(lineno, "expected 'obs <k>': " + line);
        std::size_t k = static_cast<std::size_t>(std::stoul(line.substr(3)));
        if (k != trace.size())
            config_fail(lineno, "non-contiguous observation index " + std::to_string(k) +
                                    ", expected " + std::to_string(trace.size()));
        Observation obs;
        obs.readings.resize(system.sensors.size());
        ++li;
        bool closed = false;
        for (; li < lines.size(); ++li) {
            const auto& [ln, inner] = lines[li];
            if (inner == "end") {
                closed = true;
                ++li;
                break;
            }
            std::size_t colon = inner.find(':');
            if (colon == std::string::npos)
                config_fail(ln, "expected '<sensor>: <term>, ...': " + inner);
            std::string name = inner.substr(0, colon);
            name.erase(name.find_last_not_of(" \t") + 1);
            std::size_t idx = system.sensor_index(name);
            for (const auto& t : split_top_level(inner.substr(colon + 1), ',')) {
                Term datum = parse_term(t);
                if (!reading_in_language(system.sensors[idx], datum) &&
                    !system.sensors[idx].is_time)
                    config_fail(ln, "reading " + datum.str() + " outside the language of sensor " +
                                        name);
                obs.readings[idx].insert(std::move(datum));
            }
        }
        if (!closed)
            config_fail(lineno, "observation block without 'end'");
        if (auto ts = system.time_sensor()) {
            if (obs.readings[*ts].empty())
                obs.readings[*ts].insert(
                    Term::compound("now", {Term::integer(static_cast<long long>(k))}));
            if (obs.readings[*ts].size() != 1)
                config_fail(lineno, "the time reading must be a singleton");
        }
        trace.push_back(std::move(obs));
    }
    return trace;
}

inline std::string print_trace(const ObservationTrace& trace, const SystemConfig& config) {
    std::ostringstream out;
    for (std::size_t k = 0; k < trace.size(); ++k) {
        out << "obs " << k << "\n";
        for (std::size_t s = 0; s < trace[k].readings.size(); ++s) {
            if (trace[k].readings[s].empty())
                continue;
            out << "  " << config.system.sensors[s].name << ":";
            bool first = true;
            for (const auto& t : trace[k].readings[s]) {
                out << (first ? " " : ", ") << t.str();
                first = false;
            }
            out << "\n";
        }
        out << "end\n";
    }
    return out.str();
}

} // namespace rmcs
