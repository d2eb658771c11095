#include <trapdoor/semantic/ast.hpp>
#include <trapdoor/tokenvm/bytecode_stub.hpp>
#include <trapdoor/tokenvm/contract_fixture.hpp>
#include <trapdoor/tokenvm/synth.hpp>

#include <gtest/gtest.h>

using namespace trapdoor;
using namespace trapdoor::tokenvm;
using semantic::Category;

TEST(ClassCounts, ParsesAndRejects) {
    const auto c = parse_class_counts("EP=2,benign=3");
    EXPECT_EQ(c.at("EP"), 2u);
    EXPECT_EQ(c.at("benign"), 3u);
    EXPECT_THROW(parse_class_counts("XX=1"), Error);
    EXPECT_THROW(parse_class_counts("EP=two"), Error);
    EXPECT_THROW(parse_class_counts("EP"), Error);
    EXPECT_TRUE(parse_class_counts("").empty());
}

TEST(Synthesize, DeterministicPerSeed) {
    const auto a = synthesize_corpus(7, {{"EP", 2}});
    const auto b = synthesize_corpus(7, {{"EP", 2}});
    ASSERT_EQ(a.size(), 2u);
    EXPECT_EQ(a, b);
    EXPECT_NE(a, synthesize_corpus(8, {{"EP", 2}}));
    for (const auto& t : a) EXPECT_EQ(t.categories, std::set<Category>{Category::EP});
}

TEST(Synthesize, BenignSpecsCarryNoTraps) {
    const auto tokens = synthesize_corpus(7, {{"benign", 3}});
    ASSERT_EQ(tokens.size(), 3u);
    for (const auto& t : tokens) {
        EXPECT_TRUE(t.benign());
        EXPECT_TRUE(t.spec.traps.empty());
        EXPECT_TRUE(t.arming.empty());
    }
}

TEST(Synthesize, CallbackTokenListsItself) {
    const auto tokens = synthesize_corpus(7, {{"IC", 1}});
    ASSERT_EQ(tokens.size(), 1u);
    const auto& s = tokens[0].spec;
    ASSERT_TRUE(s.traps.callback);
    EXPECT_TRUE(s.traps.callback->enabled);
    ASSERT_TRUE(s.traps.permission);
    EXPECT_TRUE(s.traps.permission->members.count(s.id));
}

TEST(Synthesize, ClassOrderAndValidity) {
    const auto tokens =
        synthesize_corpus(3, {{"benign", 5}, {"EP", 5}, {"ES", 5}, {"AL", 5}, {"FM", 5}, {"IC", 5}});
    ASSERT_EQ(tokens.size(), 30u);
    const Category order[] = {Category::EP, Category::ES, Category::AL, Category::FM, Category::IC};
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const auto& t = tokens[i];
        EXPECT_NO_THROW(validate(t.spec));
        if (i < 5) {
            EXPECT_TRUE(t.benign());
        } else {
            EXPECT_EQ(t.categories, std::set<Category>{order[(i - 5) / 5]});
        }
    }
    EXPECT_THROW(synthesize_corpus(3, {{"XX", 1}}), Error);
}

TEST(Synthesize, ArmedTokensTrapInvestorsButNotCreator) {
    const Address pool{"0xpool"}, investor{"0xinvestor"};
    const auto tokens = synthesize_corpus(5, {{"EP", 20}, {"ES", 20}, {"AL", 20}, {"FM", 20}, {"IC", 20}});
    for (const auto& t : tokens) {
        auto inst = deploy(t.spec);
        ASSERT_TRUE(transfer(inst, t.spec.owner, pool, t.spec.total_supply / 2, pool).ok);
        ASSERT_TRUE(transfer(inst, t.spec.owner, investor, 1000, pool).ok);
        ASSERT_TRUE(arm(inst, t)) << nlohmann::json(t).dump();
        const auto sell = transfer(inst, investor, pool, 1000, pool);
        const bool trapped = !sell.ok || sell.delivered * 10 < 1000 * 7;
        EXPECT_TRUE(trapped) << nlohmann::json(t).dump();
        const auto exit = transfer(inst, t.spec.owner, pool, 1000, pool);
        EXPECT_TRUE(exit.ok);
        EXPECT_EQ(exit.delivered, 1000u);
    }
}

TEST(Synthesize, MisleadingNamesComeFromPool) {
    const auto tokens = synthesize_corpus(11, {{"EP", 60}, {"AL", 60}});
    int seen = 0;
    for (const auto& t : tokens) {
        if (!t.spec.has(Concealment::misleading_name)) continue;
        ++seen;
        const auto ids = trap_identifiers(t.spec.traps);
        const std::set<std::string> pool{"router", "bots", "balances1", "uniswapRouter", "_rOwned", "_tOwned"};
        EXPECT_TRUE(pool.count(ids.front())) << ids.front();
    }
    EXPECT_GT(seen, 0);
}

TEST(Synthesize, CallbackTokensNeverBlankTheirErrors) {
    for (const auto& t : synthesize_corpus(1, {{"IC", 200}})) {
        EXPECT_FALSE(t.spec.has(Concealment::blank_error));
    }
}

TEST(Synthesize, JsonRoundTrip) {
    for (const auto& t : synthesize_corpus(9, {{"benign", 2}, {"FM", 3}, {"IC", 2}})) {
        EXPECT_EQ(nlohmann::json(t).get<SynthToken>(), t);
    }
}

TEST(Fixtures, DeterministicAndParseable) {
    for (const auto& t : synthesize_corpus(4, {{"benign", 3}, {"EP", 3}, {"ES", 3}, {"AL", 3}, {"FM", 3}, {"IC", 3}})) {
        const auto doc = contract_fixture(t.spec);
        EXPECT_EQ(doc, contract_fixture(t.spec));
        EXPECT_NO_THROW(semantic::parse_ast(doc));
        const auto code = bytecode_stub(t.spec, t.stub_seed);
        EXPECT_EQ(code, bytecode_stub(t.spec, t.stub_seed));
        EXPECT_EQ(code.substr(0, 2), "0x");
        EXPECT_EQ(code.size() % 2, 0u);
    }
}

TEST(Fixtures, SetterNames) {
    EXPECT_EQ(setter_name("_maxTxAmount"), "setMaxTxAmount");
    EXPECT_EQ(setter_name("enableTrading"), "setEnableTrading");
}
