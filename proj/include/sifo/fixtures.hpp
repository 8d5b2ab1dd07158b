#pragma once

// Benchmark-style mapping primitives, seeded random sifo CQs and
// equivalence-preserving rewrites used by the property suites.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <random>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sifo/model.hpp"

namespace sifo {

enum class PrimitiveKind { GAVBase, ADD, ADL, MA };

/// Fixed uses the primitive's native arguments (its head variables).
enum class SkolemKind { Fixed, All, Key, Random };

struct SkolemStrategy {
    SkolemKind kind = SkolemKind::All;
    std::vector<std::size_t> key;  // 1-based positions among the body variables
    std::uint64_t seed = 0;
};

struct PrimitiveSpec {
    PrimitiveKind kind = PrimitiveKind::GAVBase;
    SkolemStrategy skolem;
    std::vector<std::size_t> arities;  // source relations; empty picks the default
};

inline const char* to_string(PrimitiveKind k) {
    switch (k) {
    case PrimitiveKind::GAVBase: return "GAVBase";
    case PrimitiveKind::ADD: return "ADD";
    case PrimitiveKind::ADL: return "ADL";
    case PrimitiveKind::MA: return "MA";
    }
    return "Unknown";
}

namespace detail {

inline Variable nth_variable(std::size_t i) {
    static const char* names[] = {"x", "y", "z", "w"};
    return i < 4 ? Variable(names[i]) : "v" + std::to_string(i + 1);
}

inline std::vector<Variable> first_variables(std::size_t from, std::size_t n) {
    std::vector<Variable> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(nth_variable(from + i));
    return out;
}

}  // namespace detail

inline SifoQuery gen_primitive(const PrimitiveSpec& spec) {
    auto arities = spec.arities;
    if (arities.empty()) {
        switch (spec.kind) {
        case PrimitiveKind::GAVBase: arities = {4}; break;
        case PrimitiveKind::ADD:
        case PrimitiveKind::ADL: arities = {2}; break;
        case PrimitiveKind::MA: arities = {2, 2}; break;
        }
    }
    std::size_t needed = spec.kind == PrimitiveKind::MA ? 2 : 1;
    if (arities.size() != needed || std::count(arities.begin(), arities.end(), 0))
        throw std::invalid_argument(std::string(to_string(spec.kind)) + " needs " + std::to_string(needed) +
                                    " positive source arities");

    SifoQuery q;
    q.head_predicate = "T";
    q.func_symbol = "f";
    auto b = detail::first_variables(0, arities[0]);
    q.body.push_back(Atom{"B", b});
    std::vector<Variable> all = b;
    switch (spec.kind) {
    case PrimitiveKind::GAVBase:
        q.distinguished.assign(b.begin(), b.begin() + std::min<std::size_t>(2, b.size()));
        break;
    case PrimitiveKind::ADD: q.distinguished = b; break;
    case PrimitiveKind::ADL: q.distinguished.assign(b.begin(), b.size() > 1 ? b.end() - 1 : b.end()); break;
    case PrimitiveKind::MA: {
        // merge on the last attribute of B; the body copy of T is renamed
        Atom src{"T_src", {b.back()}};
        for (const auto& v : detail::first_variables(b.size(), arities[1] - 1)) {
            src.args.push_back(v);
            all.push_back(v);
        }
        q.body.push_back(std::move(src));
        q.distinguished = all;
        break;
    }
    }

    switch (spec.skolem.kind) {
    case SkolemKind::Fixed: q.creation = q.distinguished; break;
    case SkolemKind::All: q.creation = all; break;
    case SkolemKind::Key:
        if (spec.skolem.key.empty()) throw Error(ErrorKind::InvalidKeyIndex, "empty key");
        for (auto k : spec.skolem.key) {
            if (k < 1 || k > all.size())
                throw Error(ErrorKind::InvalidKeyIndex, "key index " + std::to_string(k) + " outside 1.." +
                                                            std::to_string(all.size()));
            q.creation.push_back(all[k - 1]);
        }
        break;
    case SkolemKind::Random: {
        std::mt19937_64 rng(spec.skolem.seed);
        std::uniform_int_distribution<std::uint64_t> mask(1, (std::uint64_t{1} << all.size()) - 1);
        auto chosen = mask(rng);
        for (std::size_t i = 0; i < all.size(); ++i)
            if (chosen >> i & 1) q.creation.push_back(all[i]);
        break;
    }
    }
    q.func_position = q.distinguished.size();
    return q;
}

struct RandomQueryParams {
    std::size_t num_atoms = 2;
    std::size_t num_vars = 4;
    std::size_t max_arity = 3;
    std::size_t num_predicates = 2;
    std::size_t max_distinguished = 2;
    std::size_t max_creation = 3;
    bool random_position = false;
};

inline SifoQuery gen_random_sifo(std::uint64_t seed, const RandomQueryParams& params = {}) {
    if (!params.num_atoms || !params.num_vars || !params.max_arity || !params.num_predicates)
        throw std::invalid_argument("random query parameters must be positive");
    static const char* predicates[] = {"R", "S", "P", "U", "V", "W"};
    static const char* letters[] = {"x", "y", "z", "u", "v", "w", "s", "t"};
    std::mt19937_64 rng(seed);
    auto uniform = [&](std::size_t lo, std::size_t hi) {
        return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
    };
    auto pred_name = [&](std::size_t i) {
        return i < 6 ? std::string(predicates[i]) : "R" + std::to_string(i);
    };
    auto var_name = [&](std::size_t i) { return i < 8 ? Variable(letters[i]) : "v" + std::to_string(i); };

    std::vector<Atom> body;
    for (std::size_t a = 0; a < params.num_atoms; ++a) {
        auto p = uniform(0, params.num_predicates - 1);
        auto arity = params.max_arity > p ? std::max<std::size_t>(1, params.max_arity - p) : 1;
        Atom atom{pred_name(p), {}};
        for (std::size_t i = 0; i < arity; ++i) atom.args.push_back(var_name(uniform(0, params.num_vars - 1)));
        body.push_back(std::move(atom));
    }

    // pull unused variables in where a slot holds a variable seen elsewhere too
    for (std::size_t v = 0; v < params.num_vars; ++v) {
        auto name = var_name(v);
        if (vars_of(body).count(name)) continue;
        std::map<Variable, std::size_t> count;
        for (const auto& a : body)
            for (const auto& w : a.args) ++count[w];
        std::vector<std::pair<std::size_t, std::size_t>> slots;
        for (std::size_t a = 0; a < body.size(); ++a)
            for (std::size_t i = 0; i < body[a].args.size(); ++i)
                if (count[body[a].args[i]] > 1) slots.emplace_back(a, i);
        if (slots.empty()) break;
        auto [a, i] = slots[uniform(0, slots.size() - 1)];
        body[a].args[i] = name;
    }

    SifoQuery q;
    q.head_predicate = "T";
    q.func_symbol = "f";
    q.body = dedupe_atoms(body);
    auto vs = vars_of(q.body);
    std::vector<Variable> pool(vs.begin(), vs.end());
    auto draw = [&] { return pool[uniform(0, pool.size() - 1)]; };
    for (std::size_t n = uniform(0, params.max_distinguished); n > 0; --n) q.distinguished.push_back(draw());
    for (std::size_t n = uniform(0, params.max_creation); n > 0; --n) q.creation.push_back(draw());
    q.func_position = params.random_position ? uniform(0, q.distinguished.size()) : q.distinguished.size();
    return q;
}

// ---------------------------------------------------------------------------
// Rewrites that keep a query oid-equivalent to the original

/// Random bijection from the body variables onto fresh names a0, a1, ...
inline SifoQuery rename_variables(const SifoQuery& q, std::uint64_t seed) {
    auto vs = vars_of(q.body);
    std::vector<Variable> names;
    for (std::size_t i = 0; names.size() < vs.size(); ++i) {
        Variable n = "a" + std::to_string(i);
        if (!vs.count(n)) names.push_back(n);
    }
    std::mt19937_64 rng(seed);
    std::shuffle(names.begin(), names.end(), rng);
    VariableMapping h;
    std::size_t i = 0;
    for (const auto& v : vs) h[v] = names[i++];
    return rename(q, h);
}

/// A new creation tuple over the same set of variables: shuffled, with up
/// to two repeats, under a new function symbol.
inline SifoQuery rewrite_creation(const SifoQuery& q, std::uint64_t seed) {
    auto zs = q.creation_set();
    std::vector<Variable> tuple(zs.begin(), zs.end());
    std::mt19937_64 rng(seed);
    std::shuffle(tuple.begin(), tuple.end(), rng);
    if (!tuple.empty()) {
        auto repeats = std::uniform_int_distribution<std::size_t>(0, 2)(rng);
        for (std::size_t i = 0; i < repeats; ++i) {
            auto v = tuple[std::uniform_int_distribution<std::size_t>(0, zs.size() - 1)(rng)];
            tuple.insert(tuple.begin() + std::uniform_int_distribution<std::size_t>(0, tuple.size())(rng), v);
        }
    }
    SifoQuery out = q;
    out.creation = std::move(tuple);
    out.func_symbol = q.func_symbol == "g" ? "h" : "g";
    return out;
}

/// Adds a copy of some body atoms with every variable outside X ∪ Z renamed
/// apart. The copy folds back onto the originals.
inline SifoQuery add_redundant_copy(const SifoQuery& q, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto keep = q.distinguished_set();
    for (const auto& z : q.creation) keep.insert(z);
    auto vs = vars_of(q.body);
    VariableMapping rho;
    std::size_t k = 0;
    for (const auto& v : vs) {
        if (keep.count(v)) continue;
        Variable n;
        do {
            n = "c" + std::to_string(k++);
        } while (vs.count(n));
        rho[v] = n;
    }
    SifoQuery out = q;
    for (const auto& a : q.body)
        if (std::bernoulli_distribution(0.5)(rng)) out.body.push_back(sifo::apply(rho, a));
    out.body = dedupe_atoms(out.body);
    return out;
}

/// Swaps two non-distinguished creation variables in the body only. The
/// result is oid-equivalent through the swap permutation.
inline SifoQuery swap_creation_in_body(const SifoQuery& q, std::uint64_t seed) {
    auto zx = set_minus(q.creation_set(), q.distinguished_set());
    if (zx.size() < 2) return q;
    std::vector<Variable> pool(zx.begin(), zx.end());
    std::mt19937_64 rng(seed);
    std::shuffle(pool.begin(), pool.end(), rng);
    VariableMapping swap{{pool[0], pool[1]}, {pool[1], pool[0]}};
    SifoQuery out = q;
    out.body = sifo::apply(swap, q.body);
    return out;
}

inline SifoQuery equivalent_variant(const SifoQuery& q, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto s = [&] { return rng(); };
    auto out = add_redundant_copy(q, s());
    if (rng() & 1) out = swap_creation_in_body(out, s());
    out = rewrite_creation(out, s());
    return rename_variables(out, s());
}

/// Small perturbations that usually break equivalence: drop an atom, add
/// an atom, identify two variables, or change the creation tuple.
inline SifoQuery mutate(const SifoQuery& q, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto uniform = [&](std::size_t lo, std::size_t hi) {
        return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
    };
    auto vs = vars_of(q.body);
    std::vector<Variable> pool(vs.begin(), vs.end());
    SifoQuery out = q;
    switch (uniform(0, 3)) {
    case 0: {
        if (q.body.size() < 2) break;
        auto trial = q;
        trial.body.erase(trial.body.begin() + uniform(0, trial.body.size() - 1));
        auto left = vars_of(trial.body);
        bool safe = std::all_of(q.distinguished.begin(), q.distinguished.end(),
                                [&](const Variable& v) { return left.count(v) > 0; }) &&
                    std::all_of(q.creation.begin(), q.creation.end(),
                                [&](const Variable& v) { return left.count(v) > 0; });
        if (safe) out = trial;
        break;
    }
    case 1: {
        Atom copy = q.body[uniform(0, q.body.size() - 1)];
        for (auto& v : copy.args) v = pool[uniform(0, pool.size() - 1)];
        out.body.push_back(copy);
        out.body = dedupe_atoms(out.body);
        break;
    }
    case 2: {
        auto a = pool[uniform(0, pool.size() - 1)];
        auto b = pool[uniform(0, pool.size() - 1)];
        out = rename(q, VariableMapping{{a, b}});
        break;
    }
    default: {
        if (out.creation.empty() || uniform(0, 1))
            out.creation.push_back(pool[uniform(0, pool.size() - 1)]);
        else
            out.creation.erase(out.creation.begin() + uniform(0, out.creation.size() - 1));
        break;
    }
    }
    return out;
}

/// A pair with the same head, mixing equivalent variants, mutated variants
/// and unrelated queries.
inline std::pair<SifoQuery, SifoQuery> random_pair(std::uint64_t seed, const RandomQueryParams& params = {}) {
    std::mt19937_64 rng(seed);
    auto q = gen_random_sifo(rng(), params);
    SifoQuery qp;
    switch (rng() % 4) {
    case 0: qp = equivalent_variant(q, rng()); break;
    case 1: qp = rename_variables(mutate(q, rng()), rng()); break;
    case 2: qp = mutate(equivalent_variant(q, rng()), rng()); break;
    default: {
        auto p = params;
        p.max_distinguished = q.distinguished.size();
        do {
            qp = gen_random_sifo(rng(), p);
        } while (qp.distinguished.size() != q.distinguished.size());
        qp.func_position = q.func_position;
        break;
    }
    }
    if (qp.func_position > qp.distinguished.size()) qp.func_position = qp.distinguished.size();
    return {q, qp};
}

}  // namespace sifo
