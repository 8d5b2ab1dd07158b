#pragma once

// Brute-force semantics used to validate decisions and to produce
// counterexamples: oid-isomorphism, SO-tgd satisfaction, instance
// enumeration and bounded counterexample search.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sifo/constructions.hpp"
#include "sifo/eval.hpp"
#include "sifo/model.hpp"

namespace sifo {

// ---------------------------------------------------------------------------
// oid-isomorphism

/// Bijection oids(J1) -> oids(J2); constants map to themselves.
struct OidIsomorphism {
    std::map<DataTerm, DataTerm> mapping;
};

enum class IsoStrategy { Auto, Fast, General };

inline ExtendedFact apply(const OidIsomorphism& rho, const ExtendedFact& e) {
    ExtendedFact out{e.predicate, {}};
    for (const auto& t : e.args) {
        auto it = rho.mapping.find(t);
        out.args.push_back(it == rho.mapping.end() ? t : it->second);
    }
    return out;
}

inline ExtendedInstance apply(const OidIsomorphism& rho, const ExtendedInstance& j) {
    ExtendedInstance out;
    for (const auto& e : j) out.insert(sifo::apply(rho, e));
    return out;
}

namespace detail {

/// The column holding the single oid of every fact, if there is such a column.
inline std::optional<std::size_t> single_oid_column(const ExtendedInstance& j) {
    std::optional<std::size_t> column;
    for (const auto& e : j) {
        std::optional<std::size_t> here;
        for (std::size_t i = 0; i < e.args.size(); ++i) {
            if (!e.args[i].is_oid()) continue;
            if (here) return std::nullopt;
            here = i;
        }
        if (!here || (column && *column != *here)) return std::nullopt;
        column = here;
    }
    return column;
}

// Every fact carries exactly one oid, always in `column`: the instances are
// isomorphic iff the multisets of per-oid companion sets agree.
inline std::optional<OidIsomorphism> oid_isomorphic_fast(const ExtendedInstance& j1, const ExtendedInstance& j2,
                                                         std::size_t column) {
    using Companion = std::pair<std::string, std::vector<DataTerm>>;
    auto groups = [column](const ExtendedInstance& j) {
        std::map<DataTerm, std::set<Companion>> per_oid;
        for (const auto& e : j) {
            std::vector<DataTerm> rest;
            for (std::size_t i = 0; i < e.args.size(); ++i)
                if (i != column) rest.push_back(e.args[i]);
            per_oid[e.args[column]].insert({e.predicate, std::move(rest)});
        }
        std::map<std::set<Companion>, std::vector<DataTerm>> by_signature;
        for (auto& [o, sig] : per_oid) by_signature[sig].push_back(o);
        return by_signature;
    };
    auto g1 = groups(j1);
    auto g2 = groups(j2);
    if (g1.size() != g2.size()) return std::nullopt;
    OidIsomorphism rho;
    for (auto it1 = g1.begin(), it2 = g2.begin(); it1 != g1.end(); ++it1, ++it2) {
        if (it1->first != it2->first || it1->second.size() != it2->second.size()) return std::nullopt;
        for (std::size_t i = 0; i < it1->second.size(); ++i) rho.mapping[it1->second[i]] = it2->second[i];
    }
    return rho;
}

inline std::optional<OidIsomorphism> oid_isomorphic_general(const ExtendedInstance& j1,
                                                            const ExtendedInstance& j2) {
    if (j1.size() != j2.size() || consts(j1) != consts(j2)) return std::nullopt;
    auto o1 = oids(j1);
    auto o2 = oids(j2);
    if (o1.size() != o2.size()) return std::nullopt;

    // occurrence signature: multiset of (predicate, column)
    using Signature = std::multiset<std::pair<std::string, std::size_t>>;
    auto signatures = [](const ExtendedInstance& j) {
        std::map<DataTerm, Signature> out;
        for (const auto& e : j)
            for (std::size_t i = 0; i < e.args.size(); ++i)
                if (e.args[i].is_oid()) out[e.args[i]].insert({e.predicate, i});
        return out;
    };
    auto s1 = signatures(j1);
    auto s2 = signatures(j2);

    std::vector<DataTerm> order(o1.begin(), o1.end());
    std::stable_sort(order.begin(), order.end(),
                     [&](const DataTerm& a, const DataTerm& b) { return s1[a].size() > s1[b].size(); });
    std::map<DataTerm, std::size_t> depth_of;
    for (std::size_t i = 0; i < order.size(); ++i) depth_of[order[i]] = i;

    // facts of j1 checked once their last oid is assigned
    std::vector<std::vector<const ExtendedFact*>> ready(order.size() + 1);
    for (const auto& e : j1) {
        std::size_t r = 0;
        for (const auto& t : e.args)
            if (t.is_oid()) r = std::max(r, depth_of[t] + 1);
        ready[r].push_back(&e);
    }
    for (const auto* e : ready[0])
        if (!j2.count(*e)) return std::nullopt;

    std::vector<DataTerm> candidates(o2.begin(), o2.end());
    OidIsomorphism rho;
    std::set<DataTerm> used;
    std::function<bool(std::size_t)> search = [&](std::size_t d) {
        if (d == order.size()) return true;
        const auto& o = order[d];
        for (const auto& c : candidates) {
            if (used.count(c) || s2[c] != s1[o]) continue;
            rho.mapping[o] = c;
            used.insert(c);
            bool ok = true;
            for (const auto* e : ready[d + 1])
                if (!j2.count(sifo::apply(rho, *e))) {
                    ok = false;
                    break;
                }
            if (ok && search(d + 1)) return true;
            used.erase(c);
            rho.mapping.erase(o);
        }
        return false;
    };
    if (!search(0)) return std::nullopt;
    return rho;
}

}  // namespace detail

inline std::optional<OidIsomorphism> oid_isomorphic(const ExtendedInstance& j1, const ExtendedInstance& j2,
                                                    IsoStrategy strategy = IsoStrategy::Auto) {
    if (strategy != IsoStrategy::General) {
        auto c1 = detail::single_oid_column(j1);
        auto c2 = detail::single_oid_column(j2);
        bool applicable = (j1.empty() && j2.empty()) || (c1 && c2 && *c1 == *c2);
        if (applicable) {
            if (j1.empty()) return OidIsomorphism{};
            return detail::oid_isomorphic_fast(j1, j2, *c1);
        }
        if (strategy == IsoStrategy::Fast)
            throw std::invalid_argument("fast oid-isomorphism check needs one oid column in both instances");
    }
    return detail::oid_isomorphic_general(j1, j2);
}

/// True when Q(I) and Q′(I) are not oid-isomorphic.
inline bool separates(const SifoQuery& q, const SifoQuery& qprime, const Instance& instance) {
    return !oid_isomorphic(eval_ocq(q, instance), eval_ocq(qprime, instance));
}

// ---------------------------------------------------------------------------
// SO-tgd satisfaction

struct ViolatingGroup {
    std::vector<Constant> key;  // α(z̄)
    // every α(x̄) demanded for this key, with its candidate values in J
    std::vector<std::pair<std::vector<Constant>, std::set<Constant>>> required;
};

struct SatisfactionReport {
    bool satisfied = false;
    // α(z̄) -> chosen f value; f is unconstrained elsewhere
    std::map<std::vector<Constant>, Constant> witness;
    std::optional<ViolatingGroup> violation;
};

/// Decides (I, J) ⊨ ∃f ∀v̄ (B → T(x̄, f(z̄))). Matchings are grouped by α(z̄);
/// a group is met iff the candidate sets of its α(x̄) share a value.
inline SatisfactionReport satisfies_sotgd(const Instance& source, const Instance& target, const SifoQuery& q) {
    std::map<std::vector<Constant>, std::set<Constant>> candidates;
    for (const auto& f : target) {
        if (f.predicate != q.head_predicate) continue;
        if (f.args.size() != q.head_arity())
            throw Error(ErrorKind::ArityMismatch, "target fact " + f.predicate + " has arity " +
                                                      std::to_string(f.args.size()) + ", expected " +
                                                      std::to_string(q.head_arity()));
        std::vector<Constant> rest;
        for (std::size_t i = 0; i < f.args.size(); ++i)
            if (i != q.func_position) rest.push_back(f.args[i]);
        candidates[rest].insert(f.args[q.func_position]);
    }

    detail::MatchEngine engine(q.body, source);
    auto xs = detail::slots_for(engine, q.distinguished);
    auto zs = detail::slots_for(engine, q.creation);
    std::map<std::vector<Constant>, std::set<std::vector<Constant>>> groups;
    engine.run([&](const std::vector<const Constant*>& values) {
        groups[detail::pick(values, zs)].insert(detail::pick(values, xs));
        return true;
    });

    SatisfactionReport report;
    report.satisfied = true;
    static const std::set<Constant> none;
    for (const auto& [key, tuples] : groups) {
        std::optional<std::set<Constant>> common;
        for (const auto& t : tuples) {
            auto it = candidates.find(t);
            const auto& c = it == candidates.end() ? none : it->second;
            if (!common) {
                common = c;
                continue;
            }
            std::set<Constant> keep;
            std::set_intersection(common->begin(), common->end(), c.begin(), c.end(),
                                  std::inserter(keep, keep.end()));
            common = std::move(keep);
        }
        if (common && !common->empty()) {
            report.witness[key] = *common->begin();
            continue;
        }
        report.satisfied = false;
        report.witness.clear();
        ViolatingGroup g{key, {}};
        for (const auto& t : tuples) {
            auto it = candidates.find(t);
            g.required.emplace_back(t, it == candidates.end() ? none : it->second);
        }
        report.violation = std::move(g);
        return report;
    }
    return report;
}

// ---------------------------------------------------------------------------
// Instance generation

/// Every instance over constants d1..dN with at most max_facts facts, by
/// size, then lexicographically by fact index.
class InstanceEnumerator {
public:
    InstanceEnumerator(const std::map<std::string, std::size_t>& schema, std::size_t domain_size,
                       std::size_t max_facts)
        : max_facts_(max_facts) {
        if (domain_size < 1) throw std::invalid_argument("domain size must be at least 1");
        for (const auto& [pred, arity] : schema) {
            std::vector<std::size_t> tuple(arity, 0);
            while (true) {
                Fact f{pred, {}};
                for (auto i : tuple) f.args.push_back("d" + std::to_string(i + 1));
                facts_.push_back(std::move(f));
                std::size_t i = arity;
                while (i > 0 && tuple[i - 1] + 1 == domain_size) tuple[--i] = 0;
                if (i == 0) break;
                ++tuple[i - 1];
            }
        }
        max_facts_ = std::min(max_facts_, facts_.size());
    }

    std::size_t fact_count() const { return facts_.size(); }

    std::optional<Instance> next() {
        if (done_) return std::nullopt;
        Instance out;
        for (auto i : combo_) out.insert(facts_[i]);
        advance();
        return out;
    }

private:
    void advance() {
        std::size_t k = combo_.size();
        std::size_t n = facts_.size();
        std::size_t i = k;
        while (i > 0 && combo_[i - 1] == n - k + i - 1) --i;
        if (i > 0) {
            ++combo_[i - 1];
            for (std::size_t j = i; j < k; ++j) combo_[j] = combo_[j - 1] + 1;
            return;
        }
        if (k + 1 > max_facts_) {
            done_ = true;
            return;
        }
        combo_.resize(k + 1);
        for (std::size_t j = 0; j <= k; ++j) combo_[j] = j;
    }

    std::vector<Fact> facts_;
    std::vector<std::size_t> combo_;
    std::size_t max_facts_;
    bool done_ = false;
};

/// Seeded random instances over d1..dN, N drawn from 1..max_domain.
class RandomInstances {
public:
    RandomInstances(std::map<std::string, std::size_t> schema, std::size_t max_domain, std::size_t max_facts,
                    std::uint64_t seed)
        : schema_(schema.begin(), schema.end()), max_domain_(std::max<std::size_t>(1, max_domain)),
          max_facts_(std::max<std::size_t>(1, max_facts)), rng_(seed) {}

    Instance next() {
        Instance out;
        if (schema_.empty()) return out;
        auto domain = pick(1, max_domain_);
        auto count = pick(1, max_facts_);
        for (std::size_t i = 0; i < count; ++i) {
            const auto& [pred, arity] = schema_[pick(0, schema_.size() - 1)];
            Fact f{pred, {}};
            for (std::size_t a = 0; a < arity; ++a) f.args.push_back("d" + std::to_string(pick(1, domain)));
            out.insert(std::move(f));
        }
        return out;
    }

private:
    std::size_t pick(std::size_t lo, std::size_t hi) {
        return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
    }

    std::vector<std::pair<std::string, std::size_t>> schema_;
    std::size_t max_domain_;
    std::size_t max_facts_;
    std::mt19937_64 rng_;
};

inline std::map<std::string, std::size_t> joint_schema(const SifoQuery& q, const SifoQuery& qprime) {
    std::map<std::string, std::size_t> out;
    for (const auto* body : {&q.body, &qprime.body})
        for (const auto& a : *body) out.emplace(a.predicate, a.args.size());
    return out;
}

/// Greedily drops facts while `still_fails` keeps holding.
inline Instance minimize_instance(Instance instance, const std::function<bool(const Instance&)>& still_fails) {
    bool changed = true;
    while (changed) {
        changed = false;
        for (auto it = instance.begin(); it != instance.end(); ++it) {
            Instance smaller = instance;
            smaller.erase(*it);
            if (still_fails(smaller)) {
                instance = std::move(smaller);
                changed = true;
                break;
            }
        }
    }
    return instance;
}

// ---------------------------------------------------------------------------
// Counterexample search

struct SearchOptions {
    std::size_t max_domain = 4;
    std::size_t budget = 2000;  // total candidate instances tried
    std::uint64_t seed = 0;
    std::size_t max_random_facts = 6;
    bool minimize = true;
};

/// Proof-derived candidates first: frozen bodies, duplication instances,
/// multiplication instances for n = 2, 3.
inline std::vector<Instance> structured_candidates(const SifoQuery& q, const SifoQuery& qprime) {
    std::vector<Instance> out;
    out.push_back(freeze(q.body));
    out.push_back(freeze(qprime.body));
    Instance both = freeze(q.body);
    auto other = freeze(qprime.body, "'");
    both.insert(other.begin(), other.end());
    out.push_back(std::move(both));
    for (const auto* query : {&q, &qprime})
        for (const auto& x : query->distinguished_set()) out.push_back(duplication_instance(*query, x));
    for (std::size_t n : {2, 3})
        for (const auto* query : {&q, &qprime}) out.push_back(multiplication_instance(*query, n));
    return out;
}

namespace detail {

inline std::optional<Instance> search_instances(std::vector<Instance> structured,
                                                const std::map<std::string, std::size_t>& schema,
                                                const SearchOptions& options,
                                                const std::function<bool(const Instance&)>& fails) {
    std::size_t tried = 0;
    std::optional<Instance> found;
    for (auto& candidate : structured) {
        if (tried++ >= options.budget) break;
        if (fails(candidate)) {
            found = std::move(candidate);
            break;
        }
    }
    // then every small instance over two constants, for up to half the budget
    if (!found && !schema.empty()) {
        InstanceEnumerator small(schema, std::min<std::size_t>(2, options.max_domain), 3);
        while (tried < options.budget / 2) {
            auto candidate = small.next();
            if (!candidate) break;
            ++tried;
            if (fails(*candidate)) {
                found = std::move(candidate);
                break;
            }
        }
    }
    if (!found) {
        RandomInstances random(schema, options.max_domain, options.max_random_facts, options.seed);
        while (tried++ < options.budget) {
            auto candidate = random.next();
            if (fails(candidate)) {
                found = std::move(candidate);
                break;
            }
        }
    }
    if (found && options.minimize) found = minimize_instance(std::move(*found), fails);
    return found;
}

}  // namespace detail

/// An instance on which Q(I) and Q′(I) are not oid-isomorphic, if one is
/// found within the budget.
inline std::optional<Instance> search_counterexample_oid(const SifoQuery& q, const SifoQuery& qprime,
                                                         const SearchOptions& options = {}) {
    return detail::search_instances(structured_candidates(q, qprime), joint_schema(q, qprime), options,
                                    [&](const Instance& i) { return separates(q, qprime, i); });
}

/// (I, chase(Q, I)) with (I, J) ⊭ Q′, if found within the budget.
inline std::optional<std::pair<Instance, Instance>> search_counterexample_entail(const SifoQuery& q,
                                                                                 const SifoQuery& qprime,
                                                                                 const SearchOptions& options = {}) {
    auto fails = [&](const Instance& i) {
        return !satisfies_sotgd(i, chase(q, i).target, qprime).satisfied;
    };
    auto candidates = structured_candidates(q, qprime);
    candidates.push_back(canonical_colored_instance(qprime, q.func_arity()).instance);
    auto found = detail::search_instances(std::move(candidates), joint_schema(q, qprime), options, fails);
    if (!found) return std::nullopt;
    auto target = chase(q, *found).target;
    return std::make_pair(std::move(*found), std::move(target));
}

}  // namespace sifo
