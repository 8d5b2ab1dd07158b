#pragma once

// Oid-equivalence of sifo CQs. After normalization two independent tests
// decide it: multiset homomorphisms between the MV queries, and CQ
// equivalence of the flattened queries up to a permutation of Z−X.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "sifo/hom.hpp"
#include "sifo/model.hpp"
#include "sifo/normalize.hpp"
#include "sifo/oracle.hpp"
#include "sifo/parser.hpp"

namespace sifo {

struct EquivWitness {
    VariableMapping pi;  // permutation of Z−X
    Homomorphism forward;
    Homomorphism backward;
    Homomorphism mv_forward;
    Homomorphism mv_backward;
};

struct EquivRefutation {
    RefutationStage stage;
    std::optional<Instance> counterexample;
    std::string explanation;
};

struct EquivDecision {
    bool equivalent = false;
    std::optional<EquivWitness> witness;
    std::optional<EquivRefutation> refutation;
    std::optional<NormalizedPair> normalized;
    bool permutation_path_ran = false;
};

struct EquivOptions {
    bool assert_dual_path = true;
    std::size_t permutation_cap = 8;
    SearchOptions search;
};

struct PermutationWitness {
    VariableMapping pi;
    Homomorphism forward;
    Homomorphism backward;
};

namespace detail {

inline std::string shared_hat(const NormalizedPair& p) {
    auto both = p.q.body;
    both.insert(both.end(), p.qprime.body.begin(), p.qprime.body.end());
    return fresh_predicate(p.q.head_predicate + "_hat", both);
}

/// T̂(x̄, π(z̄)) <- B
inline ConjunctiveQuery flattened(const SifoQuery& q, const std::string& head, const VariableMapping& pi = {}) {
    ConjunctiveQuery out;
    out.head.predicate = head;
    out.head.args = q.distinguished;
    for (const auto& z : q.creation) out.head.args.push_back(sifo::apply(pi, z));
    out.body = q.body;
    return out;
}

inline MVQuery mv_of(const SifoQuery& q, const std::set<Variable>& multiset_vars, const std::string& head) {
    return MVQuery{ConjunctiveQuery{Atom{head, q.distinguished}, q.body}, multiset_vars};
}

inline Homomorphism compose(const Homomorphism& outer, const Homomorphism& inner) {
    Homomorphism out;
    for (const auto& [v, w] : inner) out[v] = sifo::apply(outer, w);
    return out;
}

}  // namespace detail

inline std::optional<std::pair<Homomorphism, Homomorphism>> equiv_via_mv(const NormalizedPair& p) {
    auto m = set_minus(p.creation, p.distinguished);
    auto head = fresh_predicate(p.q.head_predicate + "_0", [&] {
        auto both = p.q.body;
        both.insert(both.end(), p.qprime.body.begin(), p.qprime.body.end());
        return both;
    }());
    auto a = detail::mv_of(p.q, m, head);
    auto b = detail::mv_of(p.qprime, m, head);
    auto forward = mv_homomorphism(a, b);
    if (!forward) return std::nullopt;
    auto backward = mv_homomorphism(b, a);
    if (!backward) return std::nullopt;
    return std::make_pair(*forward, *backward);
}

/// First π in lexicographic order of Z−X with Q̂^π ≡ Q̂′.
inline std::optional<PermutationWitness> equiv_via_permutation(const NormalizedPair& p) {
    auto zx = set_minus(p.creation, p.distinguished);
    std::vector<Variable> domain(zx.begin(), zx.end());
    std::vector<Variable> image = domain;
    auto head = detail::shared_hat(p);
    auto target = detail::flattened(p.qprime, head);
    do {
        VariableMapping pi;
        for (std::size_t i = 0; i < domain.size(); ++i) pi[domain[i]] = image[i];
        if (auto hs = cq_equivalent(detail::flattened(p.q, head, pi), target))
            return PermutationWitness{pi, hs->first, hs->second};
    } while (std::next_permutation(image.begin(), image.end()));
    return std::nullopt;
}

/// π = (h|Z−X)⁻¹, h_forward = h, h_backward = (h′h)^{m−1} h′ where m is the
/// order of the permutation h′h on Z−X.
inline EquivWitness witness_from_mv(const NormalizedPair& p, const Homomorphism& h, const Homomorphism& hp) {
    auto zx = set_minus(p.creation, p.distinguished);
    EquivWitness w;
    w.mv_forward = h;
    w.mv_backward = hp;
    for (const auto& z : zx) w.pi[h.at(z)] = z;

    auto cycle = detail::compose(hp, h);
    auto identity_on_zx = [&](const Homomorphism& g) {
        return std::all_of(zx.begin(), zx.end(), [&](const Variable& z) { return g.at(z) == z; });
    };
    Homomorphism power;  // (h′h)^{m−1}
    for (const auto& v : vars_of(p.q.body)) power[v] = v;
    while (!identity_on_zx(detail::compose(cycle, power))) power = detail::compose(cycle, power);
    w.forward = h;
    w.backward = detail::compose(power, hp);

    auto head = detail::shared_hat(p);
    auto qpi = detail::flattened(p.q, head, w.pi);
    auto qp = detail::flattened(p.qprime, head);
    auto heads_ok = [](const Homomorphism& g, const ConjunctiveQuery& a, const ConjunctiveQuery& b) {
        return sifo::apply(g, a.head.args) == b.head.args && is_homomorphism(g, a.body, b.body);
    };
    if (!heads_ok(w.forward, qpi, qp) || !heads_ok(w.backward, qp, qpi))
        throw std::logic_error("witness reconstruction from multiset homomorphisms failed");
    return w;
}

inline EquivDecision decide_oid_equiv(const SifoQuery& q, const SifoQuery& qprime, const EquivOptions& options = {}) {
    EquivDecision d;
    auto normalized = normalize_pair(q, qprime);
    if (auto* r = std::get_if<NormalizeRefutation>(&normalized)) {
        EquivRefutation ref{r->failed, r->counterexample, r->detail};
        if (!ref.counterexample) ref.counterexample = search_counterexample_oid(q, qprime, options.search);
        d.refutation = std::move(ref);
        return d;
    }
    const auto& p = std::get<NormalizedPair>(normalized);
    d.normalized = p;

    auto mv = equiv_via_mv(p);
    auto zx = set_minus(p.creation, p.distinguished).size();
    if (zx <= options.permutation_cap && options.assert_dual_path) {
        d.permutation_path_ran = true;
        auto perm = equiv_via_permutation(p);
        if (perm.has_value() != mv.has_value())
            throw std::logic_error("multiset and permutation tests disagree on " + render(q) + " vs " +
                                   render(qprime));
    }

    if (mv) {
        d.equivalent = true;
        d.witness = witness_from_mv(p, mv->first, mv->second);
        return d;
    }
    EquivRefutation ref{RefutationStage::Theorem, search_counterexample_oid(q, qprime, options.search),
                        "no multiset homomorphisms in both directions"};
    if (!ref.counterexample) ref.explanation += "; no small counterexample found";
    d.refutation = std::move(ref);
    return d;
}

}  // namespace sifo
