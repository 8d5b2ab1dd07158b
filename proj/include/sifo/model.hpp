#pragma once

// Core vocabulary: terms, atoms, facts, instances and single-function
// object-creating conjunctive queries (sifo CQs).

#include <algorithm>
#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sifo {

using Variable = std::string;
using Constant = std::string;
using Valuation = std::map<Variable, Constant>;
using VariableMapping = std::map<Variable, Variable>;

/// Prefix of constants obtained by freezing a variable. Never valid in input.
inline constexpr const char* kFrozenPrefix = "frz:";

enum class ErrorKind {
    Syntax,
    NoFunction,
    MultipleFunctions,
    NestedTerm,
    UnsafeVariable,
    HeadPredicateInBody,
    ArityClash,
    ArityMismatch,
    HeadMismatch,
    HeadArityMismatch,
    InvalidKeyIndex,
};

inline const char* to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::Syntax: return "SyntaxError";
    case ErrorKind::NoFunction: return "NoFunction";
    case ErrorKind::MultipleFunctions: return "MultipleFunctions";
    case ErrorKind::NestedTerm: return "NestedTerm";
    case ErrorKind::UnsafeVariable: return "UnsafeVariable";
    case ErrorKind::HeadPredicateInBody: return "HeadPredicateInBody";
    case ErrorKind::ArityClash: return "ArityClash";
    case ErrorKind::ArityMismatch: return "ArityMismatch";
    case ErrorKind::HeadMismatch: return "HeadMismatch";
    case ErrorKind::HeadArityMismatch: return "HeadArityMismatch";
    case ErrorKind::InvalidKeyIndex: return "InvalidKeyIndex";
    }
    return "Error";
}

struct SourcePos {
    int line = 0;  // 1-based; 0 when unknown
    int column = 0;
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message, SourcePos pos = {})
        : std::runtime_error(format(kind, message, pos)), kind_(kind), pos_(pos), message_(message) {}

    ErrorKind kind() const { return kind_; }
    SourcePos position() const { return pos_; }
    const std::string& message() const { return message_; }

private:
    static std::string format(ErrorKind kind, const std::string& message, SourcePos pos) {
        std::string out = to_string(kind);
        if (pos.line > 0) {
            out += " at " + std::to_string(pos.line) + ":" + std::to_string(pos.column);
        }
        return out + ": " + message;
    }

    ErrorKind kind_;
    SourcePos pos_;
    std::string message_;
};

// ---------------------------------------------------------------------------
// Syntax-level terms

/// A formula or data term as written in a file. Nesting is representable so
/// that it can be rejected with a precise error.
struct Term {
    enum class Kind { Variable, Constant, FuncApp };

    Kind kind = Kind::Variable;
    std::string name;
    std::vector<Term> args;
    SourcePos pos;

    static Term variable(std::string n) { return {Kind::Variable, std::move(n), {}, {}}; }
    static Term constant(std::string n) { return {Kind::Constant, std::move(n), {}, {}}; }
    static Term func(std::string n, std::vector<Term> a) {
        return {Kind::FuncApp, std::move(n), std::move(a), {}};
    }

    bool is_func() const { return kind == Kind::FuncApp; }
};

struct RawAtom {
    std::string predicate;
    std::vector<Term> args;
    SourcePos pos;
};

struct RawRule {
    RawAtom head;
    std::vector<RawAtom> body;
    SourcePos pos;
};

// ---------------------------------------------------------------------------
// Atoms, facts, instances

struct Atom {
    std::string predicate;
    std::vector<Variable> args;

    auto operator<=>(const Atom&) const = default;
    bool operator==(const Atom&) const = default;
};

struct Fact {
    std::string predicate;
    std::vector<Constant> args;

    auto operator<=>(const Fact&) const = default;
    bool operator==(const Fact&) const = default;
};

/// A constant or a Skolem term f(c1,...,ck) over constants (an oid).
struct DataTerm {
    std::string symbol;
    std::vector<Constant> args;
    bool oid = false;

    static DataTerm constant(Constant c) { return {std::move(c), {}, false}; }
    static DataTerm skolem(std::string f, std::vector<Constant> a) {
        return {std::move(f), std::move(a), true};
    }

    bool is_oid() const { return oid; }

    std::string render() const {
        if (!oid) return symbol;
        std::string out = symbol + "(";
        for (std::size_t i = 0; i < args.size(); ++i) {
            if (i) out += ",";
            out += args[i];
        }
        return out + ")";
    }

    auto operator<=>(const DataTerm&) const = default;
    bool operator==(const DataTerm&) const = default;
};

struct ExtendedFact {
    std::string predicate;
    std::vector<DataTerm> args;

    auto operator<=>(const ExtendedFact&) const = default;
    bool operator==(const ExtendedFact&) const = default;
};

using Instance = std::set<Fact>;
using ExtendedInstance = std::set<ExtendedFact>;

inline std::set<Constant> adom(const Instance& instance) {
    std::set<Constant> out;
    for (const auto& fact : instance) out.insert(fact.args.begin(), fact.args.end());
    return out;
}

inline std::set<DataTerm> adom(const ExtendedInstance& instance) {
    std::set<DataTerm> out;
    for (const auto& fact : instance) out.insert(fact.args.begin(), fact.args.end());
    return out;
}

inline std::set<DataTerm> oids(const ExtendedInstance& instance) {
    std::set<DataTerm> out;
    for (const auto& fact : instance)
        for (const auto& t : fact.args)
            if (t.is_oid()) out.insert(t);
    return out;
}

inline std::set<Constant> consts(const ExtendedInstance& instance) {
    std::set<Constant> out;
    for (const auto& fact : instance)
        for (const auto& t : fact.args)
            if (!t.is_oid()) out.insert(t.symbol);
    return out;
}

inline ExtendedInstance to_extended(const Instance& instance) {
    ExtendedInstance out;
    for (const auto& fact : instance) {
        ExtendedFact e{fact.predicate, {}};
        for (const auto& c : fact.args) e.args.push_back(DataTerm::constant(c));
        out.insert(std::move(e));
    }
    return out;
}

/// Predicate name -> arity over every fact of the instance.
inline std::map<std::string, std::size_t> schema_of(const Instance& instance) {
    std::map<std::string, std::size_t> out;
    for (const auto& f : instance) out.emplace(f.predicate, f.args.size());
    return out;
}

// ---------------------------------------------------------------------------
// Queries

inline std::set<Variable> vars_of(const std::vector<Atom>& atoms) {
    std::set<Variable> out;
    for (const auto& a : atoms) out.insert(a.args.begin(), a.args.end());
    return out;
}

/// Atoms in first-occurrence order with duplicates removed.
inline std::vector<Atom> dedupe_atoms(const std::vector<Atom>& atoms) {
    std::vector<Atom> out;
    std::set<Atom> seen;
    for (const auto& a : atoms)
        if (seen.insert(a).second) out.push_back(a);
    return out;
}

struct ConjunctiveQuery {
    Atom head;
    std::vector<Atom> body;
};

/// T(x̄, f(z̄)) <- B, with the function term at `func_position` of the head.
struct SifoQuery {
    std::string head_predicate;
    std::vector<Variable> distinguished;
    std::string func_symbol;
    std::vector<Variable> creation;
    std::size_t func_position = 0;
    std::vector<Atom> body;

    std::size_t head_arity() const { return distinguished.size() + 1; }
    std::size_t func_arity() const { return creation.size(); }

    std::set<Variable> distinguished_set() const {
        return {distinguished.begin(), distinguished.end()};
    }
    std::set<Variable> creation_set() const { return {creation.begin(), creation.end()}; }
    std::set<Variable> body_vars() const { return vars_of(body); }
    std::set<Atom> body_set() const { return {body.begin(), body.end()}; }

    /// Head arguments in order, with the function term at its position.
    std::vector<Term> head_terms() const {
        std::vector<Term> out;
        std::vector<Term> fargs;
        for (const auto& z : creation) fargs.push_back(Term::variable(z));
        std::size_t next = 0;
        for (std::size_t i = 0; i < head_arity(); ++i) {
            if (i == func_position)
                out.push_back(Term::func(func_symbol, fargs));
            else
                out.push_back(Term::variable(distinguished[next++]));
        }
        return out;
    }
};

inline std::set<Variable> set_minus(const std::set<Variable>& a, const std::set<Variable>& b) {
    std::set<Variable> out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
    return out;
}

inline std::set<Variable> set_intersect(const std::set<Variable>& a, const std::set<Variable>& b) {
    std::set<Variable> out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
    return out;
}

/// Records the arity of every predicate and function symbol seen so far.
/// Shared across the rules of one file.
class ArityTable {
public:
    void check(const std::string& kind, const std::string& name, std::size_t arity, SourcePos pos) {
        auto key = kind + ":" + name;
        auto [it, inserted] = arities_.emplace(key, arity);
        if (!inserted && it->second != arity) {
            throw Error(ErrorKind::ArityClash,
                        kind + " " + name + " used with arity " + std::to_string(arity) +
                            " but previously with arity " + std::to_string(it->second),
                        pos);
        }
    }

private:
    std::map<std::string, std::size_t> arities_;
};

/// Checks the structural conditions of a sifo CQ and builds it.
inline SifoQuery validate_sifo(const RawRule& rule, ArityTable& arities) {
    const auto& head = rule.head;
    SifoQuery q;
    q.head_predicate = head.predicate;

    std::vector<Atom> body;
    for (const auto& raw : rule.body) {
        Atom atom{raw.predicate, {}};
        for (const auto& t : raw.args) {
            if (t.kind == Term::Kind::FuncApp)
                throw Error(ErrorKind::NestedTerm,
                            "function term " + t.name + " in body atom " + raw.predicate, t.pos);
            if (t.kind == Term::Kind::Constant)
                throw Error(ErrorKind::Syntax, "constants are not allowed in rule bodies", t.pos);
            atom.args.push_back(t.name);
        }
        if (raw.predicate == head.predicate)
            throw Error(ErrorKind::HeadPredicateInBody,
                        "head predicate " + head.predicate + " occurs in the body", raw.pos);
        arities.check("predicate", raw.predicate, atom.args.size(), raw.pos);
        body.push_back(std::move(atom));
    }
    arities.check("predicate", head.predicate, head.args.size(), head.pos);

    std::optional<std::size_t> func_at;
    for (std::size_t i = 0; i < head.args.size(); ++i) {
        const auto& t = head.args[i];
        if (t.kind == Term::Kind::Constant)
            throw Error(ErrorKind::Syntax, "constants are not allowed in rule heads", t.pos);
        if (t.kind != Term::Kind::FuncApp) {
            q.distinguished.push_back(t.name);
            continue;
        }
        if (func_at)
            throw Error(ErrorKind::MultipleFunctions, "head has more than one function term", t.pos);
        func_at = i;
        q.func_symbol = t.name;
        for (const auto& a : t.args) {
            if (a.kind == Term::Kind::FuncApp)
                throw Error(ErrorKind::NestedTerm, "nested function term " + a.name, a.pos);
            if (a.kind == Term::Kind::Constant)
                throw Error(ErrorKind::Syntax, "constants are not allowed in function terms", a.pos);
            q.creation.push_back(a.name);
        }
        arities.check("function", t.name, t.args.size(), t.pos);
    }
    if (!func_at) throw Error(ErrorKind::NoFunction, "head has no function term", head.pos);
    q.func_position = *func_at;

    q.body = dedupe_atoms(body);
    auto bv = vars_of(q.body);
    for (const auto& v : q.distinguished)
        if (!bv.count(v))
            throw Error(ErrorKind::UnsafeVariable, "head variable " + v + " does not occur in the body",
                        head.pos);
    for (const auto& v : q.creation)
        if (!bv.count(v))
            throw Error(ErrorKind::UnsafeVariable,
                        "creation variable " + v + " does not occur in the body", head.pos);
    return q;
}

inline SifoQuery validate_sifo(const RawRule& rule) {
    ArityTable arities;
    return validate_sifo(rule, arities);
}

/// A head predicate name derived from `base` that no body atom uses.
inline std::string fresh_predicate(const std::string& base, const std::vector<Atom>& body) {
    std::set<std::string> used;
    for (const auto& a : body) used.insert(a.predicate);
    std::string name = base;
    while (used.count(name)) name += "_";
    return name;
}

/// T̂(x̄, z̄) <- B.
inline ConjunctiveQuery flatten(const SifoQuery& q) {
    ConjunctiveQuery out;
    out.head.predicate = fresh_predicate(q.head_predicate + "_hat", q.body);
    out.head.args = q.distinguished;
    out.head.args.insert(out.head.args.end(), q.creation.begin(), q.creation.end());
    out.body = q.body;
    return out;
}

inline Constant frozen(const Variable& v, const std::string& suffix = "") {
    return kFrozenPrefix + v + suffix;
}

/// The body read as an instance, each variable v becoming the constant frz:v.
inline Instance freeze(const std::vector<Atom>& body, const std::string& suffix = "") {
    Instance out;
    for (const auto& a : body) {
        Fact f{a.predicate, {}};
        for (const auto& v : a.args) f.args.push_back(frozen(v, suffix));
        out.insert(std::move(f));
    }
    return out;
}

inline Atom apply(const VariableMapping& h, const Atom& atom) {
    Atom out{atom.predicate, {}};
    for (const auto& v : atom.args) {
        auto it = h.find(v);
        out.args.push_back(it == h.end() ? v : it->second);
    }
    return out;
}

inline std::vector<Atom> apply(const VariableMapping& h, const std::vector<Atom>& atoms) {
    std::vector<Atom> out;
    for (const auto& a : atoms) out.push_back(sifo::apply(h, a));
    return dedupe_atoms(out);
}

inline Variable apply(const VariableMapping& h, const Variable& v) {
    auto it = h.find(v);
    return it == h.end() ? v : it->second;
}

inline std::vector<Variable> apply(const VariableMapping& h, const std::vector<Variable>& vs) {
    std::vector<Variable> out;
    for (const auto& v : vs) out.push_back(sifo::apply(h, v));
    return out;
}

/// Renames every variable of q through h (identity outside its domain).
inline SifoQuery rename(const SifoQuery& q, const VariableMapping& h) {
    SifoQuery out = q;
    out.distinguished = sifo::apply(h, q.distinguished);
    out.creation = sifo::apply(h, q.creation);
    out.body = sifo::apply(h, q.body);
    return out;
}

}  // namespace sifo
