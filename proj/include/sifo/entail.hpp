#pragma once

// Logical entailment between sifo CQs read as SO-tgds. The syntactic test
// looks for h: B -> B′ plus a join-dependency certificate; the semantic test
// chases the colored canonical instance of Q′ with Q and checks Q′ on it.

#include <cstddef>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>

#include "sifo/constructions.hpp"
#include "sifo/eval.hpp"
#include "sifo/hom.hpp"
#include "sifo/model.hpp"
#include "sifo/normalize.hpp"
#include "sifo/oracle.hpp"
#include "sifo/parser.hpp"

namespace sifo {

struct EntailWitness {
    Homomorphism h;
    std::set<Variable> yh;  // h⁻¹(Z′)
    Homomorphism jd_certificate;
};

struct EntailDecision {
    bool entails = false;
    std::optional<EntailWitness> witness;
    std::optional<std::pair<Instance, Instance>> counterexample;  // (I, J) ⊨ Q, ⊭ Q′
    std::string explanation;
};

struct EntailOptions {
    bool assert_dual_path = true;
    bool minimize = true;
};

/// m: B -> B₂ sending X−Y to 0-copies, Y to itself and Z−Y to 1-copies,
/// which exists iff (B, X∪Y∪Z) implies the join dependency XY ⋈ YZ.
inline std::optional<Homomorphism> check_jd_implication(const std::vector<Atom>& body, const std::set<Variable>& x,
                                                        const std::set<Variable>& y, const std::set<Variable>& z) {
    for (const auto& v : set_intersect(x, z))
        if (!y.count(v)) throw std::invalid_argument("X∩Z must be contained in Y, " + v + " is not");
    auto two = two_copy_body(body, y);
    HomConstraint c;
    for (const auto& v : vars_of(body)) {
        if (y.count(v))
            c.fixed[v] = v;
        else if (x.count(v))
            c.fixed[v] = copy_of(v, 0);
        else if (z.count(v))
            c.fixed[v] = copy_of(v, 1);
    }
    return find_homomorphism(body, two.b2, c);
}

/// Chases I* = the colored instance of Q′ with ar(f) + 1 colors and checks Q′.
inline bool decide_entails_semantic(const SifoQuery& q, const SifoQuery& qprime) {
    if (q.func_position != qprime.func_position)
        throw std::invalid_argument("semantic entailment test needs equal function positions");
    auto colored_instance = canonical_colored_instance(qprime, q.func_arity()).instance;
    return satisfies_sotgd(colored_instance, chase(q, colored_instance).target, qprime).satisfied;
}

namespace detail {

inline std::pair<Instance, Instance> entail_counterexample(const SifoQuery& q, const SifoQuery& qprime,
                                                           Instance instance, bool minimize) {
    auto fails = [&](const Instance& i) { return !satisfies_sotgd(i, chase(q, i).target, qprime).satisfied; };
    if (!fails(instance)) throw std::logic_error("entailment counterexample does not separate");
    if (minimize) instance = minimize_instance(std::move(instance), fails);
    auto target = chase(q, instance).target;
    return {std::move(instance), std::move(target)};
}

}  // namespace detail

inline EntailDecision decide_entails(const SifoQuery& q, const SifoQuery& qprime, const EntailOptions& options = {}) {
    detail::check_same_head(q, qprime);
    EntailDecision d;
    if (q.func_position != qprime.func_position) {
        Instance both = freeze(q.body);
        auto other = freeze(qprime.body, "'");
        both.insert(other.begin(), other.end());
        d.counterexample = detail::entail_counterexample(q, qprime, std::move(both), options.minimize);
        d.explanation = "function terms at head positions " + std::to_string(q.func_position + 1) + " and " +
                        std::to_string(qprime.func_position + 1);
        return d;
    }

    HomConstraint c;
    bool consistent = true;
    for (std::size_t i = 0; i < q.distinguished.size(); ++i) {
        auto [it, inserted] = c.fixed.emplace(q.distinguished[i], qprime.distinguished[i]);
        if (!inserted && it->second != qprime.distinguished[i]) consistent = false;
    }
    auto x = q.distinguished_set();
    auto z = q.creation_set();
    auto zp = qprime.creation_set();
    for (const auto& v : set_intersect(x, z)) c.image_in[v] = zp;

    if (consistent) {
        for_each_homomorphism(q.body, qprime.body, c, [&](const Homomorphism& h) {
            std::set<Variable> yh;
            for (const auto& [v, w] : h)
                if (zp.count(w)) yh.insert(v);
            auto m = check_jd_implication(q.body, x, yh, z);
            if (!m) return true;
            d.entails = true;
            d.witness = EntailWitness{h, yh, *m};
            return false;
        });
    }

    if (options.assert_dual_path && decide_entails_semantic(q, qprime) != d.entails)
        throw std::logic_error("homomorphism and colored-instance tests disagree on " + render(q) + " vs " +
                               render(qprime));

    if (d.entails) {
        d.explanation = "homomorphism with join-dependency certificate found";
        return d;
    }
    auto colored_instance = canonical_colored_instance(qprime, q.func_arity()).instance;
    d.counterexample = detail::entail_counterexample(q, qprime, std::move(colored_instance), options.minimize);
    d.explanation = consistent ? "no homomorphism passes the join-dependency test"
                               : "distinguished tuples cannot be matched positionally";
    return d;
}

struct LogicalEquivDecision {
    EntailDecision forward;
    EntailDecision backward;
    bool equivalent = false;
};

inline LogicalEquivDecision decide_logical_equiv(const SifoQuery& q, const SifoQuery& qprime,
                                                 const EntailOptions& options = {}) {
    LogicalEquivDecision d{decide_entails(q, qprime, options), decide_entails(qprime, q, options), false};
    d.equivalent = d.forward.entails && d.backward.entails;
    return d;
}

}  // namespace sifo
