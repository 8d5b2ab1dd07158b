#pragma once

// Text formats.
//
//   .rules   T(x, f(y)) <- R(x, y, z).
//   .facts   R(a, b, c).
//   .xfacts  T(a, f(b)).
//
// identifier = [a-zA-Z_][a-zA-Z0-9_]*; whitespace is insignificant; '%' and
// '#' start a comment running to the end of the line. In rule files every
// identifier in argument position is a variable, in fact files a constant.

#include <algorithm>
#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "sifo/model.hpp"

namespace sifo {

namespace detail {

enum class Tok { Ident, LParen, RParen, Comma, Dot, Arrow, End };

struct Token {
    Tok kind;
    std::string text;
    SourcePos pos;
};

inline const char* describe(Tok t) {
    switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::Comma: return "','";
    case Tok::Dot: return "'.'";
    case Tok::Arrow: return "'<-'";
    case Tok::End: return "end of input";
    }
    return "token";
}

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (true) {
            skip();
            SourcePos pos{line_, col_};
            if (at_end()) {
                out.push_back({Tok::End, "", pos});
                return out;
            }
            char c = peek();
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                std::string id;
                while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_'))
                    id += get();
                out.push_back({Tok::Ident, id, pos});
                continue;
            }
            get();
            switch (c) {
            case '(': out.push_back({Tok::LParen, "(", pos}); break;
            case ')': out.push_back({Tok::RParen, ")", pos}); break;
            case ',': out.push_back({Tok::Comma, ",", pos}); break;
            case '.': out.push_back({Tok::Dot, ".", pos}); break;
            case '<':
                if (!at_end() && peek() == '-') {
                    get();
                    out.push_back({Tok::Arrow, "<-", pos});
                    break;
                }
                [[fallthrough]];
            default:
                throw Error(ErrorKind::Syntax, std::string("unexpected character '") + c + "'", pos);
            }
        }
    }

private:
    bool at_end() const { return i_ >= text_.size(); }
    char peek() const { return text_[i_]; }
    char get() {
        char c = text_[i_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }
    void skip() {
        while (!at_end()) {
            char c = peek();
            if (c == '%' || c == '#') {
                while (!at_end() && peek() != '\n') get();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                get();
            } else {
                return;
            }
        }
    }

    std::string_view text_;
    std::size_t i_ = 0;
    int line_ = 1;
    int col_ = 1;
};

class Parser {
public:
    enum class Mode { Rules, Facts, ExtendedFacts };

    Parser(std::string_view text, Mode mode) : toks_(Lexer(text).run()), mode_(mode) {}

    bool done() const { return toks_[i_].kind == Tok::End; }

    RawRule rule() {
        RawRule r;
        r.pos = toks_[i_].pos;
        r.head = atom();
        expect(Tok::Arrow, "'<-' after rule head");
        r.body.push_back(atom());
        while (accept(Tok::Comma)) r.body.push_back(atom());
        expect(Tok::Dot, "',' or '.' after body atom");
        return r;
    }

    RawAtom fact() {
        RawAtom a = atom();
        expect(Tok::Dot, "'.' after fact");
        return a;
    }

private:
    const Token& cur() const { return toks_[i_]; }

    bool accept(Tok k) {
        if (cur().kind != k) return false;
        ++i_;
        return true;
    }

    Token expect(Tok k, const std::string& what) {
        if (cur().kind != k) {
            std::string msg = "expected " + what + ", found " + describe(cur().kind);
            if (!cur().text.empty() && cur().kind != Tok::End) msg += " '" + cur().text + "'";
            throw Error(ErrorKind::Syntax, msg, cur().pos);
        }
        return toks_[i_++];
    }

    RawAtom atom() {
        auto name = expect(Tok::Ident, "predicate name");
        RawAtom a{name.text, {}, name.pos};
        expect(Tok::LParen, "'(' after predicate " + name.text);
        a.args = arguments();
        return a;
    }

    // Parses "t1, ..., tk )" after an opening parenthesis.
    std::vector<Term> arguments() {
        std::vector<Term> args;
        if (accept(Tok::RParen)) return args;
        while (true) {
            args.push_back(term());
            if (accept(Tok::Comma)) continue;
            expect(Tok::RParen, "',' or ')' (unbalanced parenthesis)");
            return args;
        }
    }

    Term term() {
        auto id = expect(Tok::Ident, "term");
        if (cur().kind == Tok::LParen) {
            if (mode_ == Mode::Facts)
                throw Error(ErrorKind::NestedTerm, "function term " + id.text + " in a fact file",
                            id.pos);
            ++i_;
            Term t = Term::func(id.text, arguments());
            t.pos = id.pos;
            return t;
        }
        Term t = mode_ == Mode::Rules ? Term::variable(id.text) : Term::constant(id.text);
        t.pos = id.pos;
        return t;
    }

    std::vector<Token> toks_;
    std::size_t i_ = 0;
    Mode mode_;
};

}  // namespace detail

inline std::vector<RawRule> parse_raw_rules(std::string_view text) {
    detail::Parser p(text, detail::Parser::Mode::Rules);
    std::vector<RawRule> out;
    while (!p.done()) out.push_back(p.rule());
    return out;
}

/// Parses and validates every rule; arities are enforced across the file.
inline std::vector<SifoQuery> parse_rules(std::string_view text) {
    ArityTable arities;
    std::vector<SifoQuery> out;
    for (const auto& raw : parse_raw_rules(text)) out.push_back(validate_sifo(raw, arities));
    return out;
}

/// Exactly one rule.
inline SifoQuery parse_rule(std::string_view text) {
    auto rules = parse_rules(text);
    if (rules.size() != 1)
        throw Error(ErrorKind::Syntax, "expected exactly one rule, found " + std::to_string(rules.size()));
    return rules.front();
}

inline Instance parse_instance(std::string_view text) {
    detail::Parser p(text, detail::Parser::Mode::Facts);
    ArityTable arities;
    Instance out;
    while (!p.done()) {
        auto raw = p.fact();
        arities.check("predicate", raw.predicate, raw.args.size(), raw.pos);
        Fact f{raw.predicate, {}};
        for (const auto& t : raw.args) f.args.push_back(t.name);
        out.insert(std::move(f));
    }
    return out;
}

inline ExtendedInstance parse_extended_instance(std::string_view text) {
    detail::Parser p(text, detail::Parser::Mode::ExtendedFacts);
    ArityTable arities;
    ExtendedInstance out;
    while (!p.done()) {
        auto raw = p.fact();
        arities.check("predicate", raw.predicate, raw.args.size(), raw.pos);
        ExtendedFact f{raw.predicate, {}};
        for (const auto& t : raw.args) {
            if (!t.is_func()) {
                f.args.push_back(DataTerm::constant(t.name));
                continue;
            }
            arities.check("function", t.name, t.args.size(), t.pos);
            std::vector<Constant> cargs;
            for (const auto& a : t.args) {
                if (a.is_func()) throw Error(ErrorKind::NestedTerm, "nested function term " + a.name, a.pos);
                cargs.push_back(a.name);
            }
            f.args.push_back(DataTerm::skolem(t.name, std::move(cargs)));
        }
        out.insert(std::move(f));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Rendering

inline std::string join(const std::vector<std::string>& parts, const std::string& sep = ",") {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

inline std::string render(const Atom& a) { return a.predicate + "(" + join(a.args) + ")"; }

inline std::string render(const Fact& f) { return f.predicate + "(" + join(f.args) + ")"; }

inline std::vector<std::string> rendered_args(const ExtendedFact& f) {
    std::vector<std::string> out;
    for (const auto& t : f.args) out.push_back(t.render());
    return out;
}

inline std::string render(const ExtendedFact& f) {
    return f.predicate + "(" + join(rendered_args(f)) + ")";
}

inline std::string render_body(const std::vector<Atom>& body) {
    std::vector<std::string> parts;
    for (const auto& a : body) parts.push_back(render(a));
    return join(parts, ", ");
}

inline std::string render_head(const SifoQuery& q) {
    std::vector<std::string> parts;
    for (const auto& t : q.head_terms()) {
        if (!t.is_func()) {
            parts.push_back(t.name);
            continue;
        }
        std::vector<std::string> inner;
        for (const auto& a : t.args) inner.push_back(a.name);
        parts.push_back(t.name + "(" + join(inner) + ")");
    }
    return q.head_predicate + "(" + join(parts) + ")";
}

inline std::string render(const SifoQuery& q) {
    return render_head(q) + " <- " + render_body(q.body) + ".";
}

inline std::string render(const ConjunctiveQuery& q) {
    return render(q.head) + " <- " + render_body(q.body) + ".";
}

/// One fact per line, sorted by (predicate, rendered arguments).
inline std::string serialize_extended_instance(const ExtendedInstance& j) {
    std::vector<std::pair<std::string, std::vector<std::string>>> rows;
    for (const auto& f : j) rows.emplace_back(f.predicate, rendered_args(f));
    std::sort(rows.begin(), rows.end());
    std::string out;
    for (const auto& [pred, args] : rows) out += pred + "(" + join(args) + ").\n";
    return out;
}

inline std::string serialize_instance(const Instance& i) {
    // Instance ordering already is (predicate, args) lexicographic.
    std::string out;
    for (const auto& f : i) out += render(f) + ".\n";
    return out;
}

}  // namespace sifo
