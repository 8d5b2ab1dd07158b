#pragma once

// Test helpers: data files and brute-force reference implementations that
// share no code with the library's search engines.

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "sifo/sifo.hpp"

namespace testing_support {

using namespace sifo;

inline std::string read_data(const std::string& name) {
    std::ifstream in(std::string(SIFO_DATA_DIR) + "/" + name);
    if (!in) throw std::runtime_error("missing data file " + name);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline SifoQuery rule(const std::string& name) { return parse_rule(read_data(name)); }
inline Instance facts(const std::string& name) { return parse_instance(read_data(name)); }

/// Every valuation var(B) -> adom(I), kept when α(B) ⊆ I.
inline std::set<Valuation> brute_matchings(const std::vector<Atom>& body, const Instance& instance) {
    auto vs = vars_of(body);
    std::vector<Variable> vars(vs.begin(), vs.end());
    auto dom = adom(instance);
    std::vector<Constant> values(dom.begin(), dom.end());
    std::set<Valuation> out;
    if (values.empty() && !vars.empty()) return out;
    std::vector<std::size_t> idx(vars.size(), 0);
    while (true) {
        Valuation alpha;
        for (std::size_t i = 0; i < vars.size(); ++i) alpha[vars[i]] = values[idx[i]];
        bool ok = true;
        for (const auto& a : body) {
            Fact f{a.predicate, {}};
            for (const auto& v : a.args) f.args.push_back(alpha.at(v));
            if (!instance.count(f)) {
                ok = false;
                break;
            }
        }
        if (ok) out.insert(alpha);
        std::size_t i = 0;
        while (i < idx.size() && ++idx[i] == values.size()) idx[i++] = 0;
        if (i == idx.size()) break;
    }
    return out;
}

inline ExtendedInstance brute_eval_ocq(const SifoQuery& q, const Instance& instance) {
    ExtendedInstance out;
    for (const auto& alpha : brute_matchings(q.body, instance)) {
        ExtendedFact e{q.head_predicate, {}};
        std::size_t next = 0;
        for (std::size_t i = 0; i < q.head_arity(); ++i) {
            if (i == q.func_position) {
                std::vector<Constant> args;
                for (const auto& z : q.creation) args.push_back(alpha.at(z));
                e.args.push_back(DataTerm::skolem(q.func_symbol, args));
            } else {
                e.args.push_back(DataTerm::constant(alpha.at(q.distinguished[next++])));
            }
        }
        out.insert(e);
    }
    return out;
}

/// Tries every bijection between the oid sets.
inline bool brute_oid_isomorphic(const ExtendedInstance& j1, const ExtendedInstance& j2) {
    auto o1 = oids(j1);
    auto o2 = oids(j2);
    if (o1.size() != o2.size() || consts(j1) != consts(j2)) return false;
    std::vector<DataTerm> a(o1.begin(), o1.end());
    std::vector<DataTerm> b(o2.begin(), o2.end());
    do {
        OidIsomorphism rho;
        for (std::size_t i = 0; i < a.size(); ++i) rho.mapping[a[i]] = b[i];
        if (sifo::apply(rho, j1) == j2) return true;
    } while (std::next_permutation(b.begin(), b.end()));
    return false;
}

/// Every variable mapping var(B) -> var(B′), filtered by h(B) ⊆ B′.
inline bool brute_hom_exists(const std::vector<Atom>& src, const std::vector<Atom>& dst,
                             const std::function<bool(const VariableMapping&)>& accept) {
    auto sv = vars_of(src);
    auto tv = vars_of(dst);
    std::vector<Variable> s(sv.begin(), sv.end()), t(tv.begin(), tv.end());
    std::set<Atom> target(dst.begin(), dst.end());
    if (t.empty()) return s.empty() && src.empty();
    std::vector<std::size_t> idx(s.size(), 0);
    while (true) {
        VariableMapping h;
        for (std::size_t i = 0; i < s.size(); ++i) h[s[i]] = t[idx[i]];
        bool ok = true;
        for (const auto& a : src)
            if (!target.count(sifo::apply(h, a))) {
                ok = false;
                break;
            }
        if (ok && accept(h)) return true;
        std::size_t i = 0;
        while (i < idx.size() && ++idx[i] == t.size()) idx[i++] = 0;
        if (i == idx.size()) return false;
    }
}

inline Instance random_instance(std::mt19937_64& rng, const std::map<std::string, std::size_t>& schema,
                                std::size_t max_domain, std::size_t max_facts) {
    RandomInstances gen(schema, max_domain, max_facts, rng());
    return gen.next();
}

}  // namespace testing_support
