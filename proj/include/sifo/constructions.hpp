#pragma once

// Instances and bodies built from queries: the duplication and
// multiplication instances that separate queries with different creation
// profiles, the colored canonical instance and the two-copy body used for
// join-dependency implication.

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "sifo/model.hpp"

namespace sifo {

/// freeze(B) ∪ d(freeze(B)) where d sends frz:x to the new constant frz:x'.
inline Instance duplication_instance(const SifoQuery& q, const Variable& x) {
    Instance out = freeze(q.body);
    for (const auto& a : q.body) {
        Fact f{a.predicate, {}};
        for (const auto& v : a.args) f.args.push_back(v == x ? frozen(v, "'") : frozen(v));
        out.insert(std::move(f));
    }
    return out;
}

/// Union over d : (Z − X) → {1..n} of d̂(freeze(B)), each non-distinguished
/// creation variable z replaced by its copy frz:z~d(z).
inline Instance multiplication_instance(const SifoQuery& q, std::size_t n) {
    auto zx = set_minus(q.creation_set(), q.distinguished_set());
    std::vector<Variable> multiplied(zx.begin(), zx.end());
    std::vector<std::size_t> choice(multiplied.size(), 1);
    Instance out;
    if (n == 0) return out;
    while (true) {
        std::map<Variable, std::size_t> copy;
        for (std::size_t i = 0; i < multiplied.size(); ++i) copy[multiplied[i]] = choice[i];
        for (const auto& a : q.body) {
            Fact f{a.predicate, {}};
            for (const auto& v : a.args) {
                auto it = copy.find(v);
                f.args.push_back(it == copy.end() ? frozen(v) : frozen(v, "~" + std::to_string(it->second)));
            }
            out.insert(std::move(f));
        }
        std::size_t i = 0;
        while (i < choice.size() && choice[i] == n) choice[i++] = 1;
        if (i == choice.size()) break;
        ++choice[i];
    }
    return out;
}

inline Constant colored(const Variable& v, std::size_t color) { return v + "#" + std::to_string(color); }

/// ⋃_{l=0..n} B′^l: creation variables of q′ stay white (one shared frozen
/// constant), every other variable u gets one copy u#l per color l.
struct ColoredInstance {
    std::vector<Atom> base;
    std::size_t colors = 0;  // n + 1
    Instance instance;
    std::map<Constant, Variable> decolor;  // s
};

inline ColoredInstance canonical_colored_instance(const SifoQuery& qprime, std::size_t n) {
    ColoredInstance out;
    out.base = qprime.body;
    out.colors = n + 1;
    auto white = qprime.creation_set();
    for (std::size_t l = 0; l <= n; ++l) {
        for (const auto& a : qprime.body) {
            Fact f{a.predicate, {}};
            for (const auto& u : a.args) {
                Constant c = white.count(u) ? frozen(u) : colored(u, l);
                out.decolor[c] = u;
                f.args.push_back(std::move(c));
            }
            out.instance.insert(std::move(f));
        }
    }
    return out;
}

inline Variable copy_of(const Variable& u, int copy) { return u + "^" + std::to_string(copy); }

/// B₂ = B₀ ∪ B₁: two copies of B sharing exactly the variables of Y.
struct TwoCopyBody {
    std::vector<Atom> b0;
    std::vector<Atom> b1;
    std::vector<Atom> b2;
};

inline TwoCopyBody two_copy_body(const std::vector<Atom>& body, const std::set<Variable>& shared) {
    TwoCopyBody out;
    VariableMapping c0, c1;
    for (const auto& v : vars_of(body)) {
        c0[v] = shared.count(v) ? v : copy_of(v, 0);
        c1[v] = shared.count(v) ? v : copy_of(v, 1);
    }
    out.b0 = sifo::apply(c0, body);
    out.b1 = sifo::apply(c1, body);
    out.b2 = out.b0;
    out.b2.insert(out.b2.end(), out.b1.begin(), out.b1.end());
    out.b2 = dedupe_atoms(out.b2);
    return out;
}

}  // namespace sifo
