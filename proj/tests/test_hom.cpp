#include <gtest/gtest.h>

#include <chrono>
#include <random>

#include "support.hpp"

using namespace sifo;
using namespace testing_support;

namespace {

std::vector<Atom> body(const std::string& text) { return parse_rule("Q(f()) <- " + text + ".").body; }

ConjunctiveQuery cq(const std::vector<Variable>& head, const std::string& text) {
    return ConjunctiveQuery{Atom{"H", head}, body(text)};
}

std::map<std::string, std::size_t> schema_for(const std::vector<Atom>& b) {
    std::map<std::string, std::size_t> out;
    for (const auto& a : b) out[a.predicate] = a.args.size();
    return out;
}

}  // namespace

TEST(FindHomomorphism, Identity) {
    auto b = body("R(x,y,z)");
    auto h = find_homomorphism(b, b, HomConstraint{{{"x", "x"}}, {}, {}});
    ASSERT_TRUE(h);
    EXPECT_EQ(*h, (Homomorphism{{"x", "x"}, {"y", "y"}, {"z", "z"}}));
}

TEST(FindHomomorphism, ImageConstraintBlocks) {
    auto b = body("R(x,y,z)");
    HomConstraint c{{{"x", "x"}}, {}, {{"x", {"y"}}}};
    EXPECT_FALSE(find_homomorphism(b, b, c));
}

TEST(FindHomomorphism, InjectiveFamily) {
    auto b = body("Mother(c,x), Father(c,y)");
    auto h = find_homomorphism(b, b, HomConstraint{{}, {"x", "y"}, {}});
    ASSERT_TRUE(h);
    EXPECT_EQ(*h, (Homomorphism{{"c", "c"}, {"x", "x"}, {"y", "y"}}));
}

TEST(FindHomomorphism, InjectivityEnforced) {
    // both x and y have to land on u
    auto src = body("R(x), R(y)");
    auto dst = body("R(u)");
    EXPECT_TRUE(find_homomorphism(src, dst));
    EXPECT_FALSE(find_homomorphism(src, dst, HomConstraint{{}, {"x", "y"}, {}}));
}

TEST(FindHomomorphism, Deterministic) {
    auto src = body("R(x,y), R(y,z)");
    auto dst = body("R(a,b), R(b,c), R(c,a), R(a,a)");
    auto first = find_homomorphism(src, dst);
    for (int i = 0; i < 5; ++i) EXPECT_EQ(find_homomorphism(src, dst), first);
}

TEST(Containment, Examples) {
    auto qa = cq({"x", "y"}, "R(x,y,z)");
    auto qb = cq({"x", "y"}, "R(x,y,z), R(x,y,w)");
    EXPECT_TRUE(cq_contained(qa, qb));
    EXPECT_TRUE(cq_contained(qb, qa));
    EXPECT_TRUE(cq_equivalent(qa, qb));
    EXPECT_TRUE(cq_contained(qa, qa));

    auto loop = cq({"x"}, "R(x,x)");
    auto edge = cq({"x"}, "R(x,y)");
    EXPECT_FALSE(cq_contained(loop, edge));
    EXPECT_TRUE(cq_contained(edge, loop));
    EXPECT_FALSE(cq_equivalent(loop, edge));
}

TEST(Containment, HeadMismatch) {
    EXPECT_THROW(cq_contained(cq({"x"}, "R(x,y)"), cq({"x", "y"}, "R(x,y)")), Error);
}

TEST(MvHomomorphism, Family) {
    auto b = body("Mother(c,x), Father(c,y)");
    MVQuery q{{Atom{"T_0", {"c"}}, b}, {"x", "y"}};
    auto h = mv_homomorphism(q, q);
    ASSERT_TRUE(h);
    EXPECT_EQ(*h, (Homomorphism{{"c", "c"}, {"x", "x"}, {"y", "y"}}));
    MVQuery plain{{Atom{"T_0", {"c"}}, b}, {}};
    EXPECT_EQ(mv_homomorphism(plain, plain), cq_contained(plain.core, plain.core));
}

// Soundness and completeness at desk scale, checked against evaluation and
// an exhaustive mapping search.
TEST(Property, ContainmentMatchesSemantics) {
    std::mt19937_64 rng(5);
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        auto a = gen_random_sifo(seed, {2, 4, 2, 2, 2, 0, false});
        auto b = gen_random_sifo(seed + 100000, {2, 4, 2, 2, 2, 0, false});
        if (a.distinguished.size() != b.distinguished.size()) continue;
        ConjunctiveQuery qa{Atom{"H", a.distinguished}, a.body};
        ConjunctiveQuery qb{Atom{"H", b.distinguished}, b.body};
        auto h = cq_contained(qa, qb);
        auto fixed = head_mapping(qa.head, qb.head);
        bool brute = fixed && brute_hom_exists(qa.body, qb.body, [&](const VariableMapping& g) {
                         for (const auto& [v, w] : *fixed)
                             if (g.at(v) != w) return false;
                         return true;
                     });
        EXPECT_EQ(h.has_value(), brute);
        if (h) {
            EXPECT_TRUE(is_homomorphism(*h, qa.body, qb.body));
            std::map<std::string, std::size_t> schema = schema_for(qa.body);
            for (const auto& [p, n] : schema_for(qb.body)) schema[p] = n;
            for (int k = 0; k < 20; ++k) {
                auto i = random_instance(rng, schema, 4, 6);
                auto ra = eval_cq(qa, i);
                for (const auto& f : eval_cq(qb, i)) EXPECT_TRUE(ra.count(f));
            }
        } else {
            // the frozen body of qb is a witness
            Instance i = freeze(qb.body);
            Fact head{"H", {}};
            for (const auto& v : qb.head.args) head.args.push_back(frozen(v));
            EXPECT_TRUE(eval_cq(qb, i).count(head));
            EXPECT_FALSE(eval_cq(qa, i).count(head));
        }
    }
}

TEST(Property, MvHomomorphismMatchesBruteForce) {
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        auto a = gen_random_sifo(seed, {2, 4, 3, 2, 1, 3, false});
        auto b = gen_random_sifo(seed * 7 + 3, {2, 4, 3, 2, 1, 3, false});
        if (a.distinguished.size() != b.distinguished.size()) continue;
        MVQuery qa{{Atom{"T_0", a.distinguished}, a.body}, set_minus(a.creation_set(), a.distinguished_set())};
        MVQuery qb{{Atom{"T_0", b.distinguished}, b.body}, set_minus(b.creation_set(), b.distinguished_set())};
        auto fixed = head_mapping(qa.core.head, qb.core.head);
        bool brute = fixed && brute_hom_exists(qa.core.body, qb.core.body, [&](const VariableMapping& g) {
                         for (const auto& [v, w] : *fixed)
                             if (g.at(v) != w) return false;
                         std::set<Variable> images;
                         for (const auto& m : qa.multiset_vars) {
                             if (!qb.multiset_vars.count(g.at(m))) return false;
                             if (!images.insert(g.at(m)).second) return false;
                         }
                         return true;
                     });
        EXPECT_EQ(mv_homomorphism(qa, qb).has_value(), brute) << render(a) << " / " << render(b);
    }
}

// Worst-case shape: homomorphisms into a triangle are 3-colourings. An odd
// wheel has none, so the search must exhaust the space.

namespace {

std::vector<Atom> symmetric_edges(const std::vector<std::pair<std::string, std::string>>& edges) {
    std::vector<Atom> out;
    for (const auto& [a, b] : edges) {
        out.push_back(Atom{"E", {a, b}});
        out.push_back(Atom{"E", {b, a}});
    }
    return out;
}

std::vector<Atom> odd_wheel(int rim) {
    std::vector<std::pair<std::string, std::string>> edges;
    for (int i = 0; i < rim; ++i) {
        edges.emplace_back("v" + std::to_string(i), "v" + std::to_string((i + 1) % rim));
        edges.emplace_back("hub", "v" + std::to_string(i));
    }
    return symmetric_edges(edges);
}

}  // namespace

TEST(Stress, OddWheelHasNoThreeColouring) {
    auto wheel = odd_wheel(13);
    auto triangle = symmetric_edges({{"a", "b"}, {"b", "c"}, {"c", "a"}});
    auto start = std::chrono::steady_clock::now();
    EXPECT_FALSE(find_homomorphism(wheel, triangle));
    EXPECT_TRUE(find_homomorphism(triangle, wheel));
    SifoQuery q{"T", {}, "f", {}, 0, wheel};
    SifoQuery qp{"T", {}, "f", {}, 0, triangle};
    EXPECT_FALSE(decide_entails(q, qp).entails);
    EXPECT_TRUE(decide_entails(qp, q).entails);
    EXPECT_FALSE(decide_oid_equiv(q, qp, {true, 8, {2, 20, 0, 4, false}}).equivalent);
    EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(), 30.0);
}
