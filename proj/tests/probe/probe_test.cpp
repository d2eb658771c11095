#include <trapdoor/probe/probe.hpp>
#include <trapdoor/tokenvm/synth.hpp>

#include <gtest/gtest.h>

using namespace trapdoor;
using namespace trapdoor::probe;
using namespace trapdoor::tokenvm;

namespace {

const Address kOwner{"0xowner"};
const Address kQuote{"0xweth"};

TokenSpec spec_with(TrapConfig traps) {
    TokenSpec s;
    s.id = Address{"0xtoken"};
    s.name = "Probe Target";
    s.symbol = "PRB";
    s.total_supply = 10'000'000;
    s.owner = kOwner;
    s.traps = std::move(traps);
    return s;
}

Market market_for(const TokenSpec& spec, Amount token_liq = 1'000'000, Amount quote_liq = 1'000'000'000) {
    return open_market(deploy(spec), kQuote, token_liq, quote_liq);
}

TrapConfig sell_fee(std::uint32_t buy_bps, std::uint32_t sell_bps) {
    TrapConfig t;
    t.fee = FeeTrap{buy_bps, sell_bps, "_taxFee", true};
    return t;
}

} // namespace

TEST(Rational, ParseAndFormat) {
    EXPECT_EQ(parse_rational("0.30"), Rational(3, 10));
    EXPECT_EQ(parse_rational("3/10"), Rational(3, 10));
    EXPECT_EQ(parse_rational("1"), Rational(1));
    EXPECT_EQ(parse_rational("0"), Rational(0));
    EXPECT_EQ(format_rational(Rational(3, 10)), "3/10");
    EXPECT_DOUBLE_EQ(to_double(Rational(1, 4)), 0.25);
    EXPECT_THROW(parse_rational("abc"), Error);
    EXPECT_THROW(parse_rational("1/0"), Error);
}

TEST(ProbeConfig, Validates) {
    ProbeConfig c;
    EXPECT_NO_THROW(c.validate());
    c.acc_fee = 1;
    EXPECT_THROW(c.validate(), Error);
    c.acc_fee = Rational(-1, 10);
    EXPECT_THROW(c.validate(), Error);
    c = {};
    c.sell_fraction = 0;
    EXPECT_THROW(c.validate(), Error);
}

TEST(BuyTest, AmountIsCappedByLiquidity) {
    auto m = market_for(spec_with({}), 500);
    const auto leg = buy_test(m, probe_investor(), Rational(3, 10));
    EXPECT_EQ(leg.amount, 500u);
    EXPECT_TRUE(leg.ok);
}

TEST(BuyTest, BenignBuyReceivesAll) {
    auto m = market_for(spec_with({}));
    const auto leg = buy_test(m, probe_investor(), Rational(3, 10));
    EXPECT_TRUE(leg.ok);
    EXPECT_EQ(leg.amount, 1000u);
    EXPECT_EQ(leg.received, 1000u);
    EXPECT_EQ(*leg.fee_observed, Rational(0));
    EXPECT_EQ(m.token.balance_of(probe_investor()), 1000u);
}

TEST(BuyTest, ThirtyFivePercentBuyFeeFails) {
    auto m = market_for(spec_with(sell_fee(3500, 0)));
    const auto leg = buy_test(m, probe_investor(), Rational(3, 10));
    EXPECT_FALSE(leg.ok);
    EXPECT_EQ(leg.received, 650u);
    EXPECT_EQ(*leg.fee_observed, Rational(35, 100));
    EXPECT_EQ(leg.fee_identifier, "_taxFee");
}

TEST(BuyTest, EmptyPoolIsAnInfrastructureError) {
    auto m = market_for(spec_with({}));
    m.pool.reserve_x = m.pool.reserve_y = 0;
    EXPECT_THROW(buy_test(m, probe_investor(), Rational(3, 10)), ProbeError);
}

TEST(SellTest, BenignSellsHalf) {
    auto m = market_for(spec_with({}));
    ASSERT_TRUE(buy_test(m, probe_investor(), Rational(3, 10)).ok);
    const auto leg = sell_test(m, probe_investor(), Rational(3, 10));
    EXPECT_TRUE(leg.ok);
    EXPECT_EQ(leg.amount, 500u);
    EXPECT_EQ(leg.received, 500u);
    EXPECT_EQ(m.token.balance_of(probe_investor()), 500u);
}

TEST(SellTest, NothingToSellIsAnError) {
    auto m = market_for(spec_with({}));
    EXPECT_THROW(sell_test(m, probe_investor(), Rational(3, 10)), ProbeError);
}

TEST(SellTest, WhitelistFailsNamingTheList) {
    TrapConfig t;
    t.permission = PermissionTrap{ListKind::whitelist, {kOwner}, "_safeOwner", true};
    const auto o = run_probe(market_for(spec_with(t)));
    EXPECT_TRUE(o.buy_ok);
    EXPECT_TRUE(o.sell_attempted);
    EXPECT_FALSE(o.sell_ok);
    ASSERT_TRUE(o.sell_trace);
    EXPECT_EQ(o.sell_trace->cause.identifier, "_safeOwner");
}

TEST(SellTest, NinetyNinePercentFeeFails) {
    const auto o = run_probe(market_for(spec_with(sell_fee(0, 9900))));
    EXPECT_TRUE(o.buy_ok);
    EXPECT_FALSE(o.sell_ok);
    EXPECT_EQ(o.sell_amount, 500u);
    EXPECT_EQ(o.sell_received, 5u);
    EXPECT_EQ(*o.sell_fee_observed, Rational(99, 100));
    EXPECT_FALSE(o.sell_trace);
    EXPECT_EQ(o.fee_identifiers, std::vector<std::string>{"_taxFee"});
}

TEST(SellTest, OverflowingFeeFailsWithTrace) {
    const auto o = run_probe(market_for(spec_with(sell_fee(0, 11'000))));
    EXPECT_FALSE(o.sell_ok);
    ASSERT_TRUE(o.sell_trace);
    EXPECT_EQ(o.sell_trace->cause.kind, CauseKind::numeric_overflow);
}

TEST(RunProbe, BenignPassesCleanly) {
    const auto o = run_probe(market_for(spec_with({})));
    EXPECT_TRUE(o.buy_ok);
    EXPECT_TRUE(o.sell_ok);
    EXPECT_EQ(*o.buy_fee_observed, Rational(0));
    EXPECT_EQ(*o.sell_fee_observed, Rational(0));
    EXPECT_FALSE(o.buy_trace);
    EXPECT_FALSE(o.sell_trace);
}

TEST(RunProbe, SuspendedTradingFailsTheBuy) {
    TrapConfig t;
    t.suspension = SuspensionTrap{true, "tradingOpen", true, TrapScope::all};
    const auto o = run_probe(market_for(spec_with(t)));
    EXPECT_FALSE(o.buy_ok);
    EXPECT_FALSE(o.sell_attempted);
    ASSERT_TRUE(o.buy_trace);
    EXPECT_EQ(o.buy_trace->cause.identifier, "tradingOpen");
}

TEST(RunProbe, AmountLimitFollowsScope) {
    TrapConfig t;
    t.amount_limit = AmountLimitTrap{1, "_maxTxAmount", true, TrapScope::non_buys};
    auto o = run_probe(market_for(spec_with(t)));
    EXPECT_TRUE(o.buy_ok);
    EXPECT_FALSE(o.sell_ok);
    EXPECT_EQ(o.sell_trace->cause.identifier, "_maxTxAmount");

    t.amount_limit->scope = TrapScope::all;
    o = run_probe(market_for(spec_with(t), 500));
    EXPECT_FALSE(o.buy_ok);
    EXPECT_EQ(o.buy_amount, 500u);
    EXPECT_EQ(o.buy_trace->cause.identifier, "_maxTxAmount");
}

TEST(RunProbe, FeeThresholdAtThirtyPercent) {
    EXPECT_TRUE(run_probe(market_for(spec_with(sell_fee(0, 2900)))).sell_ok);
    EXPECT_TRUE(run_probe(market_for(spec_with(sell_fee(0, 3000)))).sell_ok);
    EXPECT_FALSE(run_probe(market_for(spec_with(sell_fee(0, 3100)))).sell_ok);
}

TEST(RunProbe, LeavesTheCallersMarketAlone) {
    TrapConfig t;
    t.permission = PermissionTrap{ListKind::whitelist, {kOwner}, "_enable", true};
    const auto m = market_for(spec_with(t));
    const auto before = nlohmann::json(m);
    run_probe(m);
    run_probe(market_for(spec_with({})));
    EXPECT_EQ(nlohmann::json(m), before);
    EXPECT_EQ(m.token.balance_of(probe_investor()), 0u);
}

TEST(RunProbe, MonotoneInAcceptedFee) {
    const Rational levels[] = {Rational(1, 10), Rational(3, 10), Rational(5, 10)};
    for (std::uint32_t buy = 0; buy <= 6000; buy += 750) {
        for (std::uint32_t sell = 0; sell <= 10'000; sell += 625) {
            const auto m = market_for(spec_with(sell_fee(buy, sell)));
            bool failed_higher = false;
            for (int i = 2; i >= 0; --i) {
                ProbeConfig c;
                c.acc_fee = levels[i];
                const auto o = run_probe(m, c);
                const bool fail = !(o.buy_ok && o.sell_ok);
                if (failed_higher) {
                    EXPECT_TRUE(fail) << buy << " " << sell << " at " << format_rational(levels[i]);
                }
                failed_higher = failed_higher || fail;
            }
        }
    }
}

TEST(RunProbe, ArmedSyntheticTrapsFailTheSell) {
    const auto tokens = synthesize_corpus(21, {{"EP", 15}, {"ES", 15}, {"AL", 15}, {"IC", 15}});
    for (const auto& t : tokens) {
        auto m = market_for(t.spec);
        ASSERT_TRUE(arm(m.token, t));
        const auto o = run_probe(m);
        ASSERT_TRUE(o.buy_ok) << nlohmann::json(t).dump();
        ASSERT_FALSE(o.sell_ok) << nlohmann::json(t).dump();
        ASSERT_TRUE(o.sell_trace);
        if (t.spec.has(Concealment::blank_error)) {
            EXPECT_TRUE(o.sell_trace->cause.identifier.empty());
            EXPECT_EQ(o.sell_trace->cause.kind, CauseKind::assertion_failed);
        } else {
            const auto ids = trap_identifiers(t.spec.traps);
            EXPECT_EQ(o.sell_trace->cause.identifier, ids.front());
        }
    }
}

TEST(RunProbe, BenignSyntheticTokensPass) {
    for (const auto& t : synthesize_corpus(22, {{"benign", 40}})) {
        const auto o = run_probe(market_for(t.spec));
        EXPECT_TRUE(o.buy_ok && o.sell_ok);
    }
}

TEST(Trades, EventsAreRecordedInOrder) {
    auto m = market_for(spec_with(sell_fee(0, 500)));
    m.record_events = true;
    m.block = 100;
    const auto b = buy(m, Address{"0xalice"}, 10'000);
    ASSERT_TRUE(b.ok);
    EXPECT_TRUE(b.quote_leg);
    EXPECT_GT(b.quote_amount, 0u);
    m.block = 101;
    const auto s = sell(m, Address{"0xalice"}, 10'000);
    ASSERT_TRUE(s.ok);
    EXPECT_EQ(s.received, 9'500u);
    EXPECT_TRUE(is_ordered(m.token_events));
    EXPECT_TRUE(is_ordered(m.pool_events));
    EXPECT_EQ(m.token_reserve(), m.token.balance_of(m.pool_address));
}

TEST(ProbeJson, MarketAndOutcomeRoundTrip) {
    TrapConfig t;
    t.permission = PermissionTrap{ListKind::whitelist, {kOwner}, "_enable", true};
    const auto m = market_for(spec_with(t));
    const auto back = nlohmann::json(m).get<Market>();
    EXPECT_EQ(nlohmann::json(back), nlohmann::json(m));

    const auto o = run_probe(m);
    const auto j = nlohmann::json(o);
    EXPECT_EQ(j.at("buy_fee_observed"), "0/1");
    EXPECT_EQ(nlohmann::json(j.get<ProbeOutcome>()), j);

    auto bad = nlohmann::json(m);
    bad["pool_address"] = "0x1234";
    EXPECT_THROW(bad.get<Market>(), std::exception);
}
