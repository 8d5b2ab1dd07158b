#pragma once

// Rewrites a pair of sifo CQs with the same head predicate into the normal
// form T(x̄, f(z̄)) <- B, T(x̄, f′(z̄)) <- B′ (identical, duplicate-free z̄),
// or refutes oid-equivalence on the way.

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "sifo/constructions.hpp"
#include "sifo/model.hpp"
#include "sifo/oracle.hpp"
#include "sifo/parser.hpp"

namespace sifo {

enum class RefutationStage {
    DistinguishedPattern,   // no bijection σ with σ(x̄) = x̄′
    DistinguishedCreation,  // X∩Z ≠ X∩Z′
    CreationCardinality,    // |Z−X| ≠ |Z′−X|
    FunctionPosition,       // function terms in different head columns
    Theorem,                // normal form reached, no witnesses
};

inline const char* to_string(RefutationStage s) {
    switch (s) {
    case RefutationStage::DistinguishedPattern: return "DistinguishedPattern";
    case RefutationStage::DistinguishedCreation: return "DistinguishedCreation";
    case RefutationStage::CreationCardinality: return "CreationCardinality";
    case RefutationStage::FunctionPosition: return "FunctionPosition";
    case RefutationStage::Theorem: return "Theorem";
    }
    return "Unknown";
}

struct NormalizeRefutation {
    RefutationStage failed;
    std::optional<Instance> counterexample;
    std::string detail;
};

/// How Q′ was rewritten. `total` maps each variable of the input Q′ to its
/// name in the normalized Q′.
struct Renaming {
    VariableMapping sigma;      // X -> X′, positional
    VariableMapping freshened;  // non-distinguished Q′ variable -> fresh name
    VariableMapping creation;   // fresh creation variable of Q′ -> creation variable of Q
    VariableMapping total;
};

/// Q′ renamed so that x̄′ = x̄; creation tuples not yet aligned.
struct AlignedPair {
    SifoQuery q;
    SifoQuery qprime;
    SifoQuery qprime_input;  // deduplicated Q′ before any renaming
    Renaming renaming;
};

struct NormalizedPair {
    SifoQuery q;
    SifoQuery qprime;
    std::set<Variable> distinguished;  // X
    std::set<Variable> creation;       // Z
    Renaming renaming;
};

/// Hands out names base_k, k from one counter, avoiding every name seen.
class Freshener {
public:
    void reserve(const SifoQuery& q) {
        for (const auto& v : q.body_vars()) used_.insert(v);
    }

    Variable fresh(const Variable& base) {
        while (true) {
            Variable candidate = base + "_" + std::to_string(++counter_);
            if (used_.insert(candidate).second) return candidate;
        }
    }

private:
    std::set<Variable> used_;
    std::size_t counter_ = 0;
};

/// Drops repeated creation variables, keeping first occurrences. The
/// function symbol is renamed when its arity changes.
inline SifoQuery dedupe_creation_vars(const SifoQuery& q) {
    std::vector<Variable> unique;
    std::set<Variable> seen;
    for (const auto& z : q.creation)
        if (seen.insert(z).second) unique.push_back(z);
    if (unique.size() == q.creation.size()) return q;
    SifoQuery out = q;
    out.creation = std::move(unique);
    out.func_symbol = q.func_symbol + "_" + std::to_string(out.creation.size());
    return out;
}

namespace detail {

inline void check_same_head(const SifoQuery& q, const SifoQuery& qprime) {
    if (q.head_predicate != qprime.head_predicate)
        throw Error(ErrorKind::HeadMismatch,
                    "head predicates " + q.head_predicate + " and " + qprime.head_predicate + " differ");
    if (q.head_arity() != qprime.head_arity())
        throw Error(ErrorKind::HeadArityMismatch, "head arities " + std::to_string(q.head_arity()) + " and " +
                                                      std::to_string(qprime.head_arity()) + " differ");
}

inline std::optional<Instance> first_separating(const SifoQuery& q, const SifoQuery& qprime,
                                                std::vector<Instance> candidates) {
    for (auto& c : candidates)
        if (separates(q, qprime, c)) return std::move(c);
    return std::nullopt;
}

}  // namespace detail

/// Renames Q′ so that x̄′ becomes x̄ via the positional σ, freshening every
/// other Q′ variable first so nothing is captured.
inline std::variant<AlignedPair, NormalizeRefutation> align_distinguished(const SifoQuery& q,
                                                                          const SifoQuery& qprime,
                                                                          Freshener& fresh) {
    detail::check_same_head(q, qprime);
    VariableMapping sigma, inverse;
    bool bijective = true;
    for (std::size_t i = 0; i < q.distinguished.size() && bijective; ++i) {
        const auto& x = q.distinguished[i];
        const auto& xp = qprime.distinguished[i];
        auto [a, fresh_a] = sigma.emplace(x, xp);
        auto [b, fresh_b] = inverse.emplace(xp, x);
        bijective = a->second == xp && b->second == x;
    }
    if (!bijective) {
        return NormalizeRefutation{
            RefutationStage::DistinguishedPattern,
            detail::first_separating(q, qprime, {freeze(q.body), freeze(qprime.body)}),
            "distinguished tuples (" + join(q.distinguished) + ") and (" + join(qprime.distinguished) +
                ") do not correspond by a bijection"};
    }

    AlignedPair out{q, qprime, qprime, {}};
    out.renaming.sigma = sigma;
    fresh.reserve(q);
    fresh.reserve(qprime);
    VariableMapping total;
    for (const auto& v : qprime.body_vars()) {
        auto it = inverse.find(v);
        if (it != inverse.end()) {
            total[v] = it->second;
        } else {
            total[v] = fresh.fresh(v);
            out.renaming.freshened[v] = total[v];
        }
    }
    out.renaming.total = total;
    out.qprime = rename(qprime, total);
    return out;
}

inline std::variant<AlignedPair, NormalizeRefutation> align_distinguished(const SifoQuery& q,
                                                                          const SifoQuery& qprime) {
    Freshener fresh;
    return align_distinguished(q, qprime, fresh);
}

/// ok iff X∩Z = X∩Z′ and |Z−X| = |Z′−X|. Refutations carry the separating
/// instance from the duplication or multiplication construction.
inline std::optional<NormalizeRefutation> check_creation_profile(const AlignedPair& p,
                                                                 std::size_t max_multiplication = 6) {
    auto x = p.q.distinguished_set();
    auto z = p.q.creation_set();
    auto zp = p.qprime.creation_set();
    auto xz = set_intersect(x, z);
    auto xzp = set_intersect(x, zp);
    if (xz != xzp) {
        auto only_q = set_minus(xz, xzp);
        auto only_qp = set_minus(xzp, xz);
        Instance instance;
        std::string detail;
        if (!only_q.empty()) {
            // Q′ ignores x when creating: duplicate x in B′
            const auto& v = *only_q.begin();
            instance = duplication_instance(p.qprime_input, p.renaming.sigma.at(v));
            detail = "distinguished variable " + v + " is a creation variable of Q only";
        } else {
            const auto& v = *only_qp.begin();
            instance = duplication_instance(p.q, v);
            detail = "distinguished variable " + v + " is a creation variable of Q' only";
        }
        std::optional<Instance> counterexample;
        if (separates(p.q, p.qprime, instance)) counterexample = std::move(instance);
        return NormalizeRefutation{RefutationStage::DistinguishedCreation, std::move(counterexample), detail};
    }

    auto k = set_minus(z, x).size();
    auto kp = set_minus(zp, x).size();
    if (k == kp) return std::nullopt;
    const SifoQuery& larger = k > kp ? p.q : p.qprime_input;
    NormalizeRefutation r{RefutationStage::CreationCardinality, std::nullopt,
                          "|Z-X| = " + std::to_string(k) + " but |Z'-X| = " + std::to_string(kp)};
    for (std::size_t n = 2; n <= max_multiplication; ++n) {
        auto instance = multiplication_instance(larger, n);
        if (!separates(p.q, p.qprime, instance)) continue;
        r.counterexample = minimize_instance(
            std::move(instance), [&](const Instance& i) { return separates(p.q, p.qprime, i); });
        r.detail += "; separated from the multiplication instance with n = " + std::to_string(n);
        break;
    }
    return r;
}

/// Reorders z̄′ so shared distinguished creation variables sit where they
/// sit in z̄, then renames Z′−X positionally onto Z−X.
inline NormalizedPair align_creation(const AlignedPair& p, Freshener& fresh) {
    auto x = p.q.distinguished_set();
    std::vector<Variable> rest;
    for (const auto& v : p.qprime.creation)
        if (!x.count(v)) rest.push_back(v);

    VariableMapping onto;
    std::set<Variable> targets;
    std::size_t next = 0;
    for (const auto& v : p.q.creation) {
        if (x.count(v)) continue;
        onto[rest.at(next++)] = v;
        targets.insert(v);
    }

    // a Q′ variable already named like a target would be captured
    fresh.reserve(p.q);
    fresh.reserve(p.qprime);
    VariableMapping step = onto;
    VariableMapping freshened;
    for (const auto& v : p.qprime.body_vars())
        if (!onto.count(v) && !x.count(v) && targets.count(v)) step[v] = freshened[v] = fresh.fresh(v);

    NormalizedPair out;
    out.q = p.q;
    out.qprime = rename(p.qprime, step);
    out.qprime.creation = p.q.creation;
    out.distinguished = x;
    out.creation = p.q.creation_set();
    out.renaming = p.renaming;
    out.renaming.creation = onto;
    for (const auto& [from, to] : freshened) out.renaming.freshened[from] = to;
    for (auto& [orig, now] : out.renaming.total) now = sifo::apply(step, now);
    return out;
}

inline NormalizedPair align_creation(const AlignedPair& p) {
    Freshener fresh;
    return align_creation(p, fresh);
}

/// Full pipeline: function position, deduplication, distinguished
/// alignment, creation profile, creation alignment.
inline std::variant<NormalizedPair, NormalizeRefutation> normalize_pair(const SifoQuery& q,
                                                                        const SifoQuery& qprime) {
    detail::check_same_head(q, qprime);
    if (q.func_position != qprime.func_position) {
        Instance both = freeze(q.body);
        auto other = freeze(qprime.body, "'");
        both.insert(other.begin(), other.end());
        std::optional<Instance> counterexample;
        if (separates(q, qprime, both)) counterexample = std::move(both);
        return NormalizeRefutation{RefutationStage::FunctionPosition, std::move(counterexample),
                                   "function terms at head positions " + std::to_string(q.func_position + 1) +
                                       " and " + std::to_string(qprime.func_position + 1)};
    }
    auto a = dedupe_creation_vars(q);
    auto b = dedupe_creation_vars(qprime);
    Freshener fresh;
    auto aligned = align_distinguished(a, b, fresh);
    if (auto* r = std::get_if<NormalizeRefutation>(&aligned)) return std::move(*r);
    const auto& pair = std::get<AlignedPair>(aligned);
    if (auto r = check_creation_profile(pair)) return std::move(*r);
    return align_creation(pair, fresh);
}

}  // namespace sifo
