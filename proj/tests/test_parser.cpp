#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "support.hpp"

using namespace sifo;
using namespace testing_support;

TEST(ParseRules, SingleRule) {
    auto rules = parse_rules("T(x,f(y)) <- R(x,y,z).");
    ASSERT_EQ(rules.size(), 1u);
    EXPECT_EQ(render(rules[0]), "T(x,f(y)) <- R(x,y,z).");
}

TEST(ParseRules, CommentsAndWhitespace) {
    auto rules = parse_rules("% comment\n# another\n  T ( x , f ( y ) )\n <- R(x,y,z) . % trailing\n");
    ASSERT_EQ(rules.size(), 1u);
    EXPECT_EQ(render(rules[0]), "T(x,f(y)) <- R(x,y,z).");
}

TEST(ParseRules, UnbalancedParenthesis) {
    try {
        parse_rules("T(x,f(y) <- R(x,y,z).");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Syntax);
        EXPECT_NE(std::string(e.what()).find("unbalanced parenthesis"), std::string::npos);
        EXPECT_EQ(e.position().line, 1u);
        EXPECT_EQ(e.position().column, 10u);
    }
}

TEST(ParseRules, ArityAcrossRules) {
    EXPECT_THROW(parse_rules("T(x,f(y)) <- R(x,y). U(x,f(y)) <- R(x,y,y)."), Error);
    EXPECT_EQ(parse_rules("T(x,f(y)) <- R(x,y). U(x,g(y)) <- R(x,y).").size(), 2u);
}

TEST(ParseRules, ReservedPrefixRejected) {
    EXPECT_THROW(parse_rules("T(x,f(y)) <- R(frz:x,y)."), Error);
}

TEST(ParseRule, ExactlyOne) {
    EXPECT_THROW(parse_rule(""), Error);
    EXPECT_THROW(parse_rule("T(x,f(y)) <- R(x,y). T(x,f(x)) <- R(x,y)."), Error);
}

TEST(ParseInstance, ArFacts) {
    auto i = parse_instance("R(a,b,c). R(a,b,d). R(c,b,d). R(d,c,a).");
    EXPECT_EQ(i.size(), 4u);
    EXPECT_TRUE(i.count(Fact{"R", {"d", "c", "a"}}));
}

TEST(ParseInstance, SetSemantics) { EXPECT_EQ(parse_instance("R(a,b,c). R(a,b,c).").size(), 1u); }

TEST(ParseInstance, ArityClash) {
    try {
        parse_instance("R(a,b). R(a,b,c).");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::ArityClash);
    }
}

TEST(ParseInstance, NoFunctionTerms) { EXPECT_THROW(parse_instance("R(a,f(b))."), Error); }

TEST(Serialize, ArResult) {
    ExtendedInstance j{{"T", {DataTerm::constant("a"), DataTerm::skolem("f", {"b"})}},
                       {"T", {DataTerm::constant("c"), DataTerm::skolem("f", {"b"})}},
                       {"T", {DataTerm::constant("d"), DataTerm::skolem("f", {"c"})}}};
    EXPECT_EQ(serialize_extended_instance(j), "T(a,f(b)).\nT(c,f(b)).\nT(d,f(c)).\n");
    EXPECT_EQ(serialize_extended_instance({}), "");
}

TEST(Serialize, FamilyFact) {
    ExtendedInstance j{{"Family", {DataTerm::constant("beth"), DataTerm::skolem("f", {"anne", "adam"})}}};
    EXPECT_EQ(serialize_extended_instance(j), "Family(beth,f(anne,adam)).\n");
}

TEST(Property, ExtendedRoundTrip) {
    std::mt19937_64 rng(7);
    auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
    const char* preds[] = {"T", "U"};
    const std::size_t arity[] = {2, 3};
    for (int round = 0; round < 500; ++round) {
        ExtendedInstance j;
        for (std::size_t k = pick(6); k > 0; --k) {
            auto p = pick(2);
            ExtendedFact e{preds[p], {}};
            for (std::size_t i = 0; i < arity[p]; ++i) {
                if (pick(3) == 0) {
                    std::vector<Constant> args;
                    for (std::size_t a = 0; a < 2; ++a) args.push_back("c" + std::to_string(pick(3)));
                    e.args.push_back(DataTerm::skolem("f", args));
                } else {
                    e.args.push_back(DataTerm::constant("c" + std::to_string(pick(4))));
                }
            }
            j.insert(e);
        }
        auto text = serialize_extended_instance(j);
        EXPECT_EQ(parse_extended_instance(text), j) << text;
        EXPECT_EQ(serialize_extended_instance(parse_extended_instance(text)), text);
    }
}

TEST(Property, FactOrderIrrelevant) {
    std::mt19937_64 rng(11);
    for (int round = 0; round < 300; ++round) {
        auto i = random_instance(rng, {{"R", 2}, {"S", 1}}, 4, 6);
        std::vector<std::string> lines;
        for (const auto& f : i) lines.push_back(render(f) + ".");
        std::shuffle(lines.begin(), lines.end(), rng);
        EXPECT_EQ(parse_instance(join(lines, "\n")), i);
    }
}

TEST(Property, RuleRoundTrip) {
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        auto q = gen_random_sifo(seed, {3, 5, 3, 3, 3, 3, true});
        auto again = parse_rule(render(q));
        EXPECT_EQ(render(again), render(q));
        EXPECT_EQ(again.func_position, q.func_position);
    }
}
