#pragma once

// Reference semantics: matchings, CQ / oCQ evaluation, combined (MV)
// semantics, tableau queries and the chase.

#include <algorithm>
#include <cstddef>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "sifo/model.hpp"

namespace sifo {

namespace detail {

/// Backtracking enumeration of the matchings of a body in an instance.
///
/// Atoms are visited greedily: next is the atom with the fewest unbound
/// variables, ties broken by the number of facts of its predicate.
class MatchEngine {
public:
    MatchEngine(const std::vector<Atom>& body, const Instance& instance) {
        for (const auto& f : instance) index_[f.predicate].push_back(&f);

        std::map<Variable, int> slots;
        for (const auto& a : body)
            for (const auto& v : a.args)
                if (slots.emplace(v, static_cast<int>(vars_.size())).second) vars_.push_back(v);

        std::vector<bool> used(body.size(), false);
        std::vector<bool> bound(vars_.size(), false);
        for (std::size_t step = 0; step < body.size(); ++step) {
            std::size_t best = body.size();
            std::pair<std::size_t, std::size_t> best_key{std::numeric_limits<std::size_t>::max(), 0};
            for (std::size_t i = 0; i < body.size(); ++i) {
                if (used[i]) continue;
                std::set<int> unbound;
                for (const auto& v : body[i].args)
                    if (!bound[slots[v]]) unbound.insert(slots[v]);
                auto it = index_.find(body[i].predicate);
                std::size_t n = it == index_.end() ? 0 : it->second.size();
                std::pair<std::size_t, std::size_t> key{unbound.size(), n};
                if (best == body.size() || key < best_key) {
                    best = i;
                    best_key = key;
                }
            }
            used[best] = true;
            Compiled c{body[best].predicate, {}, nullptr};
            for (const auto& v : body[best].args) {
                c.slots.push_back(slots[v]);
                bound[slots[v]] = true;
            }
            auto it = index_.find(c.predicate);
            c.facts = it == index_.end() ? &empty_ : &it->second;
            atoms_.push_back(std::move(c));
        }
    }

    const std::vector<Variable>& vars() const { return vars_; }

    /// Calls fn(values) for every matching, values[i] bound to vars()[i].
    /// Stops early when fn returns false.
    template <class Fn>
    void run(Fn&& fn) {
        values_.assign(vars_.size(), nullptr);
        stop_ = false;
        search(0, fn);
    }

private:
    struct Compiled {
        std::string predicate;
        std::vector<int> slots;
        const std::vector<const Fact*>* facts;
    };

    template <class Fn>
    void search(std::size_t depth, Fn& fn) {
        if (stop_) return;
        if (depth == atoms_.size()) {
            if (!fn(static_cast<const std::vector<const Constant*>&>(values_))) stop_ = true;
            return;
        }
        const auto& atom = atoms_[depth];
        std::vector<int> newly;
        for (const Fact* f : *atom.facts) {
            if (f->args.size() != atom.slots.size()) continue;
            bool ok = true;
            newly.clear();
            for (std::size_t j = 0; j < atom.slots.size(); ++j) {
                int s = atom.slots[j];
                if (values_[s] == nullptr) {
                    values_[s] = &f->args[j];
                    newly.push_back(s);
                } else if (*values_[s] != f->args[j]) {
                    ok = false;
                    break;
                }
            }
            if (ok) search(depth + 1, fn);
            for (int s : newly) values_[s] = nullptr;
            if (stop_) return;
        }
    }

    std::map<std::string, std::vector<const Fact*>> index_;
    std::vector<const Fact*> empty_;
    std::vector<Variable> vars_;
    std::vector<Compiled> atoms_;
    std::vector<const Constant*> values_;
    bool stop_ = false;
};

inline std::vector<int> slots_for(const MatchEngine& engine, const std::vector<Variable>& vs) {
    std::vector<int> out;
    const auto& all = engine.vars();
    for (const auto& v : vs) {
        auto it = std::find(all.begin(), all.end(), v);
        out.push_back(it == all.end() ? -1 : static_cast<int>(it - all.begin()));
    }
    return out;
}

inline std::vector<Constant> pick(const std::vector<const Constant*>& values, const std::vector<int>& slots) {
    std::vector<Constant> out;
    out.reserve(slots.size());
    for (int s : slots) out.push_back(*values[s]);
    return out;
}

}  // namespace detail

/// Mat(B, I): every valuation α on var(B) with α(B) ⊆ I.
using MatchingSet = std::set<Valuation>;

template <class Fn>
void for_each_matching(const std::vector<Atom>& body, const Instance& instance, Fn&& fn) {
    detail::MatchEngine engine(body, instance);
    const auto& vars = engine.vars();
    engine.run([&](const std::vector<const Constant*>& values) {
        Valuation alpha;
        for (std::size_t i = 0; i < vars.size(); ++i) alpha.emplace(vars[i], *values[i]);
        fn(alpha);
        return true;
    });
}

inline MatchingSet matchings(const std::vector<Atom>& body, const Instance& instance) {
    MatchingSet out;
    for_each_matching(body, instance, [&](const Valuation& a) { out.insert(a); });
    return out;
}

inline bool has_matching(const std::vector<Atom>& body, const Instance& instance) {
    detail::MatchEngine engine(body, instance);
    bool found = false;
    engine.run([&](const std::vector<const Constant*>&) {
        found = true;
        return false;
    });
    return found;
}

inline Instance eval_cq(const ConjunctiveQuery& q, const Instance& instance) {
    detail::MatchEngine engine(q.body, instance);
    auto slots = detail::slots_for(engine, q.head.args);
    Instance out;
    engine.run([&](const std::vector<const Constant*>& values) {
        out.insert(Fact{q.head.predicate, detail::pick(values, slots)});
        return true;
    });
    return out;
}

inline ExtendedInstance eval_ocq(const SifoQuery& q, const Instance& instance) {
    detail::MatchEngine engine(q.body, instance);
    auto xs = detail::slots_for(engine, q.distinguished);
    auto zs = detail::slots_for(engine, q.creation);
    ExtendedInstance out;
    engine.run([&](const std::vector<const Constant*>& values) {
        ExtendedFact e{q.head_predicate, {}};
        e.args.reserve(q.head_arity());
        std::size_t next = 0;
        for (std::size_t i = 0; i < q.head_arity(); ++i) {
            if (i == q.func_position)
                e.args.push_back(DataTerm::skolem(q.func_symbol, detail::pick(values, zs)));
            else
                e.args.push_back(DataTerm::constant(*values[xs[next++]]));
        }
        out.insert(std::move(e));
        return true;
    });
    return out;
}

/// A CQ paired with multiset variables, evaluated under combined semantics.
struct MVQuery {
    ConjunctiveQuery core;
    std::set<Variable> multiset_vars;
};

using MultisetResult = std::map<Fact, std::size_t>;

/// Multiplicity of e = #{γ|_M : γ : B → I, γ(H) = e}.
inline MultisetResult eval_mv(const MVQuery& q, const Instance& instance) {
    detail::MatchEngine engine(q.core.body, instance);
    auto head = detail::slots_for(engine, q.core.head.args);
    std::vector<Variable> m(q.multiset_vars.begin(), q.multiset_vars.end());
    auto ms = detail::slots_for(engine, m);
    std::map<Fact, std::set<std::vector<Constant>>> restrictions;
    engine.run([&](const std::vector<const Constant*>& values) {
        restrictions[Fact{q.core.head.predicate, detail::pick(values, head)}].insert(
            detail::pick(values, ms));
        return true;
    });
    MultisetResult out;
    for (const auto& [fact, r] : restrictions) out.emplace(fact, r.size());
    return out;
}

/// #{o : T(c̄, o) ∈ Q(I)}, c̄ listing the non-function head columns in order.
inline std::size_t oid_count(const SifoQuery& q, const Instance& instance, const std::vector<Constant>& tuple) {
    std::set<DataTerm> seen;
    for (const auto& e : eval_ocq(q, instance)) {
        std::vector<Constant> rest;
        for (std::size_t i = 0; i < e.args.size(); ++i)
            if (i != q.func_position) rest.push_back(e.args[i].symbol);
        if (rest == tuple) seen.insert(e.args[q.func_position]);
    }
    return seen.size();
}

/// (B, U): evaluates to π_U(Mat(B, I)).
struct TableauQuery {
    std::vector<Atom> body;
    std::set<Variable> columns;
};

/// Tuples list the values of the columns in sorted column order.
using Relation = std::set<std::vector<Constant>>;

inline Relation eval_tableau(const TableauQuery& t, const Instance& instance) {
    detail::MatchEngine engine(t.body, instance);
    auto slots = detail::slots_for(engine, {t.columns.begin(), t.columns.end()});
    Relation out;
    engine.run([&](const std::vector<const Constant*>& values) {
        out.insert(detail::pick(values, slots));
        return true;
    });
    return out;
}

/// Ground target instance plus the oid -> fresh constant table.
struct ChaseResult {
    Instance target;
    std::vector<std::pair<Constant, DataTerm>> assignment;
};

/// Q(I) with every distinct oid replaced by a fresh constant "@k". k follows
/// the lexicographic order of the rendered Skolem terms and skips any name
/// already in adom(I).
inline ChaseResult chase(const SifoQuery& q, const Instance& instance) {
    auto j = eval_ocq(q, instance);
    std::map<std::string, DataTerm> by_rendering;
    for (const auto& o : oids(j)) by_rendering.emplace(o.render(), o);

    auto taken = adom(instance);
    ChaseResult out;
    std::map<DataTerm, Constant> rho;
    std::size_t k = 0;
    for (const auto& [text, term] : by_rendering) {
        Constant c;
        do {
            c = "@" + std::to_string(++k);
        } while (taken.count(c));
        rho.emplace(term, c);
        out.assignment.emplace_back(c, term);
    }
    for (const auto& e : j) {
        Fact f{e.predicate, {}};
        for (const auto& t : e.args) f.args.push_back(t.is_oid() ? rho.at(t) : t.symbol);
        out.target.insert(std::move(f));
    }
    return out;
}

}  // namespace sifo
