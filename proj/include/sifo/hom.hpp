#pragma once

// Constrained homomorphism search between sets of atoms. Containment,
// equivalence, multiset homomorphisms and the entailment test all run on
// this one engine.

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "sifo/eval.hpp"
#include "sifo/model.hpp"

namespace sifo {

/// h(B) ⊆ B′, keyed by every variable of B.
using Homomorphism = VariableMapping;

struct HomConstraint {
    VariableMapping fixed;                            // pre-assigned images
    std::set<Variable> injective_on;                  // no two of these share an image
    std::map<Variable, std::set<Variable>> image_in;  // allowed images per variable
};

namespace detail {

class HomSearch {
public:
    HomSearch(const std::vector<Atom>& source, const std::vector<Atom>& target, const HomConstraint& c) {
        auto sv = vars_of(source);
        auto tv = vars_of(target);
        svars_.assign(sv.begin(), sv.end());
        tvars_.assign(tv.begin(), tv.end());
        std::map<Variable, int> tindex;
        for (std::size_t i = 0; i < tvars_.size(); ++i) tindex[tvars_[i]] = static_cast<int>(i);

        // positional candidates: allowed[(pred, arity, pos)] = target vars seen there
        std::map<std::tuple<std::string, std::size_t, std::size_t>, std::set<int>> allowed;
        for (const auto& a : dedupe_atoms(target)) {
            std::vector<int> tuple;
            for (std::size_t p = 0; p < a.args.size(); ++p) {
                tuple.push_back(tindex[a.args[p]]);
                allowed[{a.predicate, a.args.size(), p}].insert(tindex[a.args[p]]);
            }
            targets_[{a.predicate, a.args.size()}].push_back(std::move(tuple));
        }

        std::map<Variable, std::size_t> occurrences;
        std::map<Variable, std::set<int>> domain;
        for (const auto& v : svars_) {
            std::set<int> all;
            for (std::size_t i = 0; i < tvars_.size(); ++i) all.insert(static_cast<int>(i));
            domain[v] = std::move(all);
        }
        for (const auto& a : source) {
            if (!targets_.count({a.predicate, a.args.size()})) feasible_ = false;
            for (std::size_t p = 0; p < a.args.size(); ++p) {
                ++occurrences[a.args[p]];
                auto it = allowed.find({a.predicate, a.args.size(), p});
                auto& d = domain[a.args[p]];
                if (it == allowed.end()) {
                    d.clear();
                    continue;
                }
                std::set<int> keep;
                std::set_intersection(d.begin(), d.end(), it->second.begin(), it->second.end(),
                                      std::inserter(keep, keep.end()));
                d = std::move(keep);
            }
        }
        for (const auto& [v, allowed_images] : c.image_in) {
            if (!domain.count(v)) continue;
            std::set<int> keep;
            for (int t : domain[v])
                if (allowed_images.count(tvars_[t])) keep.insert(t);
            domain[v] = std::move(keep);
        }
        for (const auto& [v, image] : c.fixed) {
            if (!domain.count(v)) continue;
            auto it = tindex.find(image);
            bool present = it != tindex.end() && domain[v].count(it->second);
            domain[v].clear();
            if (present) domain[v].insert(it->second);
        }

        // constrained first, then by descending occurrence count, then by name
        order_ = svars_;
        auto rank = [&](const Variable& v) {
            int cls = c.fixed.count(v) ? 0 : (c.image_in.count(v) || c.injective_on.count(v)) ? 1 : 2;
            return std::make_tuple(cls, -static_cast<long>(occurrences[v]), v);
        };
        std::stable_sort(order_.begin(), order_.end(),
                         [&](const Variable& a, const Variable& b) { return rank(a) < rank(b); });

        std::map<Variable, int> pos;
        for (std::size_t i = 0; i < order_.size(); ++i) pos[order_[i]] = static_cast<int>(i);
        domains_.resize(order_.size());
        injective_.resize(order_.size());
        checks_.resize(order_.size() + 1);
        for (std::size_t i = 0; i < order_.size(); ++i) {
            const auto& d = domain[order_[i]];
            domains_[i].assign(d.begin(), d.end());
            injective_[i] = c.injective_on.count(order_[i]) > 0;
        }
        for (const auto& a : source) {
            Check ch{{a.predicate, a.args.size()}, {}};
            int ready = 0;
            for (const auto& v : a.args) {
                ch.slots.push_back(pos[v]);
                ready = std::max(ready, pos[v] + 1);
            }
            checks_[ready].push_back(std::move(ch));
        }
        if (!checks_[0].empty()) {
            // nullary atoms: only need a nullary target atom with the same predicate
            for (const auto& ch : checks_[0])
                if (!targets_.count(ch.key)) feasible_ = false;
        }
    }

    /// fn(h) for each homomorphism in canonical order; stops when fn returns false.
    template <class Fn>
    void run(Fn&& fn) {
        if (!feasible_) return;
        assignment_.assign(order_.size(), -1);
        used_.assign(tvars_.size(), 0);
        stop_ = false;
        search(0, fn);
    }

private:
    struct Check {
        std::pair<std::string, std::size_t> key;
        std::vector<int> slots;
    };

    bool atom_ok(const Check& ch) const {
        const auto& tuples = targets_.at(ch.key);
        for (const auto& t : tuples) {
            bool same = true;
            for (std::size_t p = 0; p < t.size() && same; ++p) same = t[p] == assignment_[ch.slots[p]];
            if (same) return true;
        }
        return false;
    }

    template <class Fn>
    void search(std::size_t depth, Fn& fn) {
        if (depth == order_.size()) {
            Homomorphism h;
            for (std::size_t i = 0; i < order_.size(); ++i) h[order_[i]] = tvars_[assignment_[i]];
            if (!fn(static_cast<const Homomorphism&>(h))) stop_ = true;
            return;
        }
        for (int t : domains_[depth]) {
            if (injective_[depth] && used_[t]) continue;
            assignment_[depth] = t;
            bool ok = true;
            for (const auto& ch : checks_[depth + 1])
                if (!atom_ok(ch)) {
                    ok = false;
                    break;
                }
            if (ok) {
                if (injective_[depth]) ++used_[t];
                search(depth + 1, fn);
                if (injective_[depth]) --used_[t];
            }
            assignment_[depth] = -1;
            if (stop_) return;
        }
    }

    std::vector<Variable> svars_, tvars_, order_;
    std::map<std::pair<std::string, std::size_t>, std::vector<std::vector<int>>> targets_;
    std::vector<std::vector<int>> domains_;
    std::vector<bool> injective_;
    std::vector<std::vector<Check>> checks_;
    std::vector<int> assignment_;
    std::vector<int> used_;
    bool feasible_ = true;
    bool stop_ = false;
};

}  // namespace detail

template <class Fn>
void for_each_homomorphism(const std::vector<Atom>& source, const std::vector<Atom>& target,
                           const HomConstraint& c, Fn&& fn) {
    detail::HomSearch search(source, target, c);
    search.run(fn);
}

inline std::optional<Homomorphism> find_homomorphism(const std::vector<Atom>& source,
                                                     const std::vector<Atom>& target,
                                                     const HomConstraint& c = {}) {
    std::optional<Homomorphism> out;
    for_each_homomorphism(source, target, c, [&](const Homomorphism& h) {
        out = h;
        return false;
    });
    return out;
}

inline bool is_homomorphism(const Homomorphism& h, const std::vector<Atom>& source,
                            const std::vector<Atom>& target) {
    std::set<Atom> t(target.begin(), target.end());
    for (const auto& a : source) {
        for (const auto& v : a.args)
            if (!h.count(v)) return false;
        if (!t.count(sifo::apply(h, a))) return false;
    }
    return true;
}

/// Positional head mapping a_i -> b_i, or nullopt when it is not a function.
inline std::optional<VariableMapping> head_mapping(const Atom& a, const Atom& b) {
    if (a.predicate != b.predicate || a.args.size() != b.args.size())
        throw Error(ErrorKind::HeadMismatch, "heads " + a.predicate + "/" + std::to_string(a.args.size()) +
                                                 " and " + b.predicate + "/" + std::to_string(b.args.size()) +
                                                 " differ");
    VariableMapping m;
    for (std::size_t i = 0; i < a.args.size(); ++i) {
        auto [it, inserted] = m.emplace(a.args[i], b.args[i]);
        if (!inserted && it->second != b.args[i]) return std::nullopt;
    }
    return m;
}

/// A homomorphism qa -> qb, which exists iff qb is contained in qa.
inline std::optional<Homomorphism> cq_contained(const ConjunctiveQuery& qa, const ConjunctiveQuery& qb) {
    auto fixed = head_mapping(qa.head, qb.head);
    if (!fixed) return std::nullopt;
    return find_homomorphism(qa.body, qb.body, HomConstraint{*fixed, {}, {}});
}

inline std::optional<std::pair<Homomorphism, Homomorphism>> cq_equivalent(const ConjunctiveQuery& qa,
                                                                         const ConjunctiveQuery& qb) {
    auto forward = cq_contained(qa, qb);
    if (!forward) return std::nullopt;
    auto backward = cq_contained(qb, qa);
    if (!backward) return std::nullopt;
    return std::make_pair(*forward, *backward);
}

/// Homomorphism of the cores that is injective on M_a with h(M_a) ⊆ M_b.
inline std::optional<Homomorphism> mv_homomorphism(const MVQuery& qa, const MVQuery& qb) {
    auto fixed = head_mapping(qa.core.head, qb.core.head);
    if (!fixed) return std::nullopt;
    HomConstraint c{*fixed, qa.multiset_vars, {}};
    for (const auto& m : qa.multiset_vars) c.image_in[m] = qb.multiset_vars;
    return find_homomorphism(qa.core.body, qb.core.body, c);
}

}  // namespace sifo
