#include <gtest/gtest.h>

#include <random>
#include <variant>

#include "support.hpp"

using namespace sifo;
using namespace testing_support;

namespace {

std::map<std::string, std::size_t> schema_for(const SifoQuery& a, const SifoQuery& b) {
    std::map<std::string, std::size_t> out;
    for (const auto* q : {&a, &b})
        for (const auto& atom : q->body) out[atom.predicate] = atom.args.size();
    return out;
}

// Q and Q′ agree up to oid-isomorphism on a batch of sampled instances.
void expect_agree_on_samples(const SifoQuery& a, const SifoQuery& b, std::mt19937_64& rng, int samples = 40) {
    auto schema = schema_for(a, b);
    for (int k = 0; k < samples; ++k) {
        auto i = random_instance(rng, schema, 4, 6);
        EXPECT_TRUE(oid_isomorphic(eval_ocq(a, i), eval_ocq(b, i)))
            << render(a) << " vs " << render(b) << " on\n" << serialize_instance(i);
    }
}

}  // namespace

TEST(Dedupe, Examples) {
    auto g = dedupe_creation_vars(rule("family_g.rules"));
    EXPECT_EQ(g.creation, (std::vector<Variable>{"x", "y"}));
    EXPECT_EQ(g.func_symbol, "g_2");
    auto f = rule("family.rules");
    auto same = dedupe_creation_vars(f);
    EXPECT_EQ(render(same), render(f));
    auto z = dedupe_creation_vars(parse_rule("T(x,f(z,z,z)) <- R(x,z)."));
    EXPECT_EQ(z.creation, (std::vector<Variable>{"z"}));
    EXPECT_EQ(z.func_arity(), 1u);
}

TEST(AlignDistinguished, Identity) {
    auto r = align_distinguished(rule("family.rules"), dedupe_creation_vars(rule("family_g.rules")));
    ASSERT_TRUE(std::holds_alternative<AlignedPair>(r));
    const auto& p = std::get<AlignedPair>(r);
    EXPECT_EQ(p.renaming.sigma, (VariableMapping{{"c", "c"}}));
    EXPECT_EQ(p.qprime.distinguished, p.q.distinguished);
}

TEST(AlignDistinguished, NotAFunction) {
    auto q = parse_rule("T(x,x,f(y)) <- R(x,y).");
    auto qp = parse_rule("T(x,y,f(y)) <- R(x,y).");
    auto r = align_distinguished(q, qp);
    ASSERT_TRUE(std::holds_alternative<NormalizeRefutation>(r));
    const auto& ref = std::get<NormalizeRefutation>(r);
    EXPECT_EQ(ref.failed, RefutationStage::DistinguishedPattern);
    ASSERT_TRUE(ref.counterexample);
    EXPECT_TRUE(separates(q, qp, *ref.counterexample));
}

TEST(AlignDistinguished, PlainRenaming) {
    auto q = parse_rule("T(u,v,f(w)) <- R(u,v,w).");
    auto qp = parse_rule("T(p,q,f(w)) <- R(p,q,w), R(q,p,w).");
    auto r = align_distinguished(q, qp);
    ASSERT_TRUE(std::holds_alternative<AlignedPair>(r));
    const auto& p = std::get<AlignedPair>(r);
    EXPECT_EQ(p.renaming.sigma, (VariableMapping{{"u", "p"}, {"v", "q"}}));
    EXPECT_EQ(p.qprime.distinguished, (std::vector<Variable>{"u", "v"}));
    EXPECT_EQ(p.renaming.total.at("p"), "u");
    EXPECT_EQ(p.renaming.total.at("q"), "v");
    EXPECT_NE(p.renaming.total.at("w"), "w");
}

TEST(AlignDistinguished, CaptureAvoiding) {
    // x̄′ = (y) must become (x), while Q′'s own x is moved out of the way
    auto q = parse_rule("T(x,f(x)) <- R(x,y).");
    auto qp = parse_rule("T(y,f(y)) <- R(y,x).");
    auto r = align_distinguished(q, qp);
    const auto& p = std::get<AlignedPair>(r);
    EXPECT_EQ(p.qprime.body.size(), 1u);
    EXPECT_EQ(p.qprime.body[0].args[0], "x");
    EXPECT_NE(p.qprime.body[0].args[1], "x");
    EXPECT_NE(p.qprime.body[0].args[1], "y");
}

TEST(AlignDistinguished, HeadArityMismatch) {
    try {
        align_distinguished(parse_rule("T(x,f(y)) <- R(x,y)."), parse_rule("T(x,y,f(y)) <- R(x,y)."));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::HeadArityMismatch);
    }
}

TEST(CreationProfile, ArVsArXy) {
    auto q = rule("ar.rules");
    auto qp = rule("ar_xy.rules");
    auto a = std::get<AlignedPair>(align_distinguished(q, qp));
    auto r = check_creation_profile(a);
    ASSERT_TRUE(r);
    EXPECT_EQ(r->failed, RefutationStage::DistinguishedCreation);
    ASSERT_TRUE(r->counterexample);
    const auto& i = *r->counterexample;
    EXPECT_EQ(i.size(), 2u);
    // Q yields one oid, Q′ two
    EXPECT_EQ(oids(eval_ocq(q, i)).size(), 1u);
    EXPECT_EQ(oids(eval_ocq(qp, i)).size(), 2u);
}

TEST(CreationProfile, ArXVsArXyz) {
    auto q = rule("ar_x.rules");
    auto qp = rule("ar_xyz.rules");
    auto a = std::get<AlignedPair>(align_distinguished(q, qp));
    auto r = check_creation_profile(a);
    ASSERT_TRUE(r);
    EXPECT_EQ(r->failed, RefutationStage::CreationCardinality);
    ASSERT_TRUE(r->counterexample);
    const auto& i = *r->counterexample;
    EXPECT_TRUE(separates(q, qp, i));
    EXPECT_EQ(i.size(), 2u);
    auto x = eval_ocq(q, i).begin()->args[0].symbol;
    EXPECT_EQ(oid_count(q, i, {x}), 1u);
    EXPECT_EQ(oid_count(qp, i, {x}), 2u);
}

TEST(CreationProfile, FamilyOk) {
    auto a = std::get<AlignedPair>(
        align_distinguished(rule("family.rules"), dedupe_creation_vars(rule("family_g.rules"))));
    EXPECT_FALSE(check_creation_profile(a));
}

TEST(AlignCreation, Reorders) {
    auto q = parse_rule("T(x,f(u,x)) <- R(x,u).");
    auto qp = parse_rule("T(x,f(x,w)) <- R(x,w).");
    auto a = std::get<AlignedPair>(align_distinguished(q, qp));
    ASSERT_FALSE(check_creation_profile(a));
    auto n = align_creation(a);
    EXPECT_EQ(n.qprime.creation, n.q.creation);
    EXPECT_EQ(render(n.qprime), "T(x,f(u,x)) <- R(x,u).");
    EXPECT_EQ(n.renaming.total.at("w"), "u");
}

TEST(AlignCreation, AvoidsCapture) {
    // Q′ uses u as a non-creation variable; renaming w to u must not merge them
    auto q = parse_rule("T(x,f(u)) <- R(x,u).");
    auto qp = parse_rule("T(x,f(w)) <- R(x,w), S(u,w).");
    auto n = std::get<NormalizedPair>(normalize_pair(q, qp));
    EXPECT_EQ(n.qprime.creation, (std::vector<Variable>{"u"}));
    ASSERT_EQ(n.qprime.body.size(), 2u);
    EXPECT_EQ(n.qprime.body[0], (Atom{"R", {"x", "u"}}));
    EXPECT_NE(n.qprime.body[1].args[0], "u");
    EXPECT_EQ(n.qprime.body[1].args[1], "u");
}

TEST(NormalizePair, FunctionPosition) {
    auto q = parse_rule("T(x,f(y)) <- R(x,y).");
    auto qp = parse_rule("T(f(y),x) <- R(x,y).");
    auto r = normalize_pair(q, qp);
    ASSERT_TRUE(std::holds_alternative<NormalizeRefutation>(r));
    const auto& ref = std::get<NormalizeRefutation>(r);
    EXPECT_EQ(ref.failed, RefutationStage::FunctionPosition);
    ASSERT_TRUE(ref.counterexample);
    EXPECT_TRUE(separates(q, qp, *ref.counterexample));
}

TEST(NormalizePair, HeadMismatch) {
    try {
        normalize_pair(parse_rule("T(x,f(y)) <- R(x,y)."), parse_rule("U(x,f(y)) <- R(x,y)."));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::HeadMismatch);
    }
}

// Invariants over random pairs

TEST(Property, DedupePreservesOidEquivalence) {
    std::mt19937_64 rng(21);
    for (std::uint64_t seed = 0; seed < 150; ++seed) {
        auto q = gen_random_sifo(seed, {2, 4, 3, 2, 2, 4, false});
        expect_agree_on_samples(q, dedupe_creation_vars(q), rng, 10);
    }
}

TEST(Property, RefutationsSeparate) {
    std::size_t refuted = 0;
    for (std::uint64_t seed = 0; seed < 400; ++seed) {
        auto [q, qp] = random_pair(seed, {2, 4, 3, 2, 2, 3, true});
        auto r = normalize_pair(q, qp);
        auto* ref = std::get_if<NormalizeRefutation>(&r);
        if (!ref) continue;
        ++refuted;
        if (ref->counterexample) {
            EXPECT_TRUE(separates(q, qp, *ref->counterexample)) << render(q) << " / " << render(qp);
        }
        if (ref->failed != RefutationStage::CreationCardinality) {
            EXPECT_TRUE(ref->counterexample) << render(q) << " / " << render(qp);
        }
    }
    EXPECT_GT(refuted, 20u);
}

TEST(Property, NormalizationOnlyRewritesQprime) {
    std::mt19937_64 rng(22);
    std::size_t normalized = 0;
    for (std::uint64_t seed = 0; seed < 400; ++seed) {
        auto [q, qp] = random_pair(seed, {2, 4, 3, 2, 2, 3, false});
        auto r = normalize_pair(q, qp);
        auto* n = std::get_if<NormalizedPair>(&r);
        if (!n) continue;
        ++normalized;
        auto dq = dedupe_creation_vars(q);
        EXPECT_EQ(render(n->q), render(dq));
        EXPECT_EQ(n->qprime.distinguished, n->q.distinguished);
        EXPECT_EQ(n->qprime.creation, n->q.creation);
        EXPECT_EQ(n->distinguished, n->q.distinguished_set());
        EXPECT_EQ(n->creation, n->q.creation_set());
        std::set<Variable> seen;
        for (const auto& z : n->q.creation) EXPECT_TRUE(seen.insert(z).second);
        expect_agree_on_samples(qp, n->qprime, rng, 8);
    }
    EXPECT_GT(normalized, 50u);
}
