#pragma once

#include <compare>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rmcs {

/// Error thrown by the term/belief/config parsers; carries the offset of the
/// offending character within the parsed text.
class ParseError : public std::runtime_error {
public:
    ParseError(std::string message, std::size_t position)
        : std::runtime_error(std::move(message)), position_(position) {}

    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

/// A ground first-order term: integer, symbol, or compound.
///
/// Canonical ordering is integers < symbols < compounds, lexicographic within
/// each kind; all deterministic enumeration in the engine rests on it.
class Term {
public:
    enum class Kind { Integer, Symbol, Compound };

    static Term integer(long long value) {
        Term t;
        t.kind_ = Kind::Integer;
        t.value_ = value;
        return t;
    }

    static Term symbol(std::string name) {
        if (name.empty())
            throw std::invalid_argument("symbol name must be nonempty");
        Term t;
        t.kind_ = Kind::Symbol;
        t.name_ = std::move(name);
        return t;
    }

    static Term compound(std::string functor, std::vector<Term> args) {
        if (functor.empty())
            throw std::invalid_argument("functor must be nonempty");
        if (args.empty())
            return symbol(std::move(functor));
        Term t;
        t.kind_ = Kind::Compound;
        t.name_ = std::move(functor);
        t.args_ = std::move(args);
        return t;
    }

    Kind kind() const { return kind_; }
    bool is_integer() const { return kind_ == Kind::Integer; }
    bool is_symbol() const { return kind_ == Kind::Symbol; }
    bool is_compound() const { return kind_ == Kind::Compound; }

    long long value() const { return value_; }

    /// Symbol name or compound functor.
    const std::string& name() const { return name_; }

    const std::vector<Term>& args() const { return args_; }

    std::size_t arity() const { return args_.size(); }

    std::strong_ordering operator<=>(const Term& other) const {
        if (auto c = rank() <=> other.rank(); c != 0)
            return c;
        switch (kind_) {
        case Kind::Integer:
            return value_ <=> other.value_;
        case Kind::Symbol:
            return name_ <=> other.name_;
        case Kind::Compound:
            if (auto c = name_ <=> other.name_; c != 0)
                return c;
            if (auto c = args_.size() <=> other.args_.size(); c != 0)
                return c;
            for (std::size_t i = 0; i < args_.size(); ++i)
                if (auto c = args_[i] <=> other.args_[i]; c != 0)
                    return c;
            return std::strong_ordering::equal;
        }
        return std::strong_ordering::equal;
    }

    bool operator==(const Term& other) const { return (*this <=> other) == 0; }

    std::string str() const {
        std::ostringstream out;
        print(out);
        return out.str();
    }

    void print(std::ostream& out) const {
        switch (kind_) {
        case Kind::Integer:
            out << value_;
            break;
        case Kind::Symbol:
            out << name_;
            break;
        case Kind::Compound:
            out << name_ << '(';
            for (std::size_t i = 0; i < args_.size(); ++i) {
                if (i > 0)
                    out << ',';
                args_[i].print(out);
            }
            out << ')';
            break;
        }
    }

private:
    int rank() const {
        switch (kind_) {
        case Kind::Integer: return 0;
        case Kind::Symbol: return 1;
        case Kind::Compound: return 2;
        }
        return 3;
    }

    Kind kind_ = Kind::Symbol;
    long long value_ = 0;
    std::string name_;
    std::vector<Term> args_;
};

inline std::ostream& operator<<(std::ostream& out, const Term& t) {
    t.print(out);
    return out;
}

namespace detail {

inline bool is_symbol_start(char c) { return c >= 'a' && c <= 'z'; }

inline bool is_ident_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

/// Cursor over a piece of text, shared by the term and config parsers.
class Scanner {
public:
    explicit Scanner(std::string_view text) : text_(text) {}

    std::size_t pos() const { return pos_; }
    bool done() const { return pos_ >= text_.size(); }
    char peek() const { return done() ? '\0' : text_[pos_]; }
    char get() { return done() ? '\0' : text_[pos_++]; }

    void skip_ws() {
        while (!done() && (text_[pos_] == ' ' || text_[pos_] == '\t'))
            ++pos_;
    }

    bool try_consume(char c) {
        skip_ws();
        if (peek() == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        skip_ws();
        if (peek() != c)
            throw ParseError(std::string("expected '") + c + "'", pos_);
        ++pos_;
    }

    /// Symbol: lowercase identifier, with interior dots allowed so names such
    /// as def.win and empty.buffer parse as single symbols.
    std::string symbol() {
        skip_ws();
        if (!is_symbol_start(peek()))
            throw ParseError("expected symbol", pos_);
        std::size_t start = pos_;
        while (!done() && is_ident_char(text_[pos_]))
            ++pos_;
        while (!done() && text_[pos_] == '.' && pos_ + 1 < text_.size() &&
               is_ident_char(text_[pos_ + 1])) {
            ++pos_;
            while (!done() && is_ident_char(text_[pos_]))
                ++pos_;
        }
        return std::string(text_.substr(start, pos_ - start));
    }

    long long integer() {
        skip_ws();
        std::size_t start = pos_;
        if (peek() == '-')
            ++pos_;
        if (done() || !(peek() >= '0' && peek() <= '9'))
            throw ParseError("expected integer", start);
        long long v = 0;
        bool neg = text_[start] == '-';
        while (!done() && peek() >= '0' && peek() <= '9')
            v = v * 10 + (get() - '0');
        return neg ? -v : v;
    }

    Term term() {
        skip_ws();
        if (done())
            throw ParseError("expected term", pos_);
        char c = peek();
        if (c == '-' || (c >= '0' && c <= '9'))
            return Term::integer(integer());
        std::string name = symbol();
        skip_ws();
        if (peek() != '(')
            return Term::symbol(std::move(name));
        get();
        std::vector<Term> args;
        args.push_back(term());
        while (try_consume(','))
            args.push_back(term());
        expect(')');
        return Term::compound(std::move(name), std::move(args));
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
};

} // namespace detail

/// Parses the grammar term := symbol | integer | symbol "(" term ("," term)* ")".
inline Term parse_term(std::string_view text) {
    detail::Scanner s(text);
    Term t = s.term();
    s.skip_ws();
    if (!s.done())
        throw ParseError("trailing input after term", s.pos());
    return t;
}

} // namespace rmcs
