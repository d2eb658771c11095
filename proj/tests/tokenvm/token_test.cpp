#include <trapdoor/tokenvm/token.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

using namespace trapdoor;
using namespace trapdoor::tokenvm;

namespace {

const Address kOwner{"0xowner"};
const Address kPool{"0xpool"};
const Address kAlice{"0xalice"};
const Address kBob{"0xbob"};

TokenSpec base_spec() {
    TokenSpec s;
    s.id = Address{"0xtoken"};
    s.name = "Example";
    s.symbol = "EXM";
    s.total_supply = 1'000'000;
    s.owner = kOwner;
    return s;
}

TokenInstance funded(const TokenSpec& spec) {
    auto t = deploy(spec);
    EXPECT_TRUE(transfer(t, kOwner, kAlice, 10'000, kPool).ok);
    EXPECT_TRUE(transfer(t, kOwner, kPool, 100'000, kPool).ok);
    return t;
}

TokenSpec with_whitelist() {
    auto s = base_spec();
    s.traps.permission = PermissionTrap{ListKind::whitelist, {kOwner}, "_enable", true};
    return s;
}

TokenSpec with_switch(bool on) {
    auto s = base_spec();
    s.traps.suspension = SuspensionTrap{on, "enableTrading", true, TrapScope::non_buys};
    return s;
}

TokenSpec with_limit(Amount limit) {
    auto s = base_spec();
    s.traps.amount_limit = AmountLimitTrap{limit, "_maxTxAmount", true, TrapScope::all};
    return s;
}

TokenSpec with_fee(std::uint32_t buy, std::uint32_t sell) {
    auto s = base_spec();
    s.traps.fee = FeeTrap{buy, sell, "_sellFee", true};
    return s;
}

TokenSpec with_callback() {
    auto s = base_spec();
    s.traps.callback = CallbackTrap{true, "_isBot", "_transfer"};
    s.traps.permission = PermissionTrap{ListKind::blacklist, {s.id}, "_isBot", false};
    return s;
}

BackdoorPayload switch_to(bool on) {
    BackdoorPayload p;
    p.flag = on;
    return p;
}

BackdoorPayload limit_to(Amount limit) {
    BackdoorPayload p;
    p.limit = limit;
    return p;
}

BackdoorPayload sell_fee(std::uint32_t bps) {
    BackdoorPayload p;
    p.sell_fee_bps = bps;
    return p;
}

BackdoorPayload member(const Address& a, bool add) {
    BackdoorPayload p;
    p.member = a;
    p.flag = add;
    return p;
}

} // namespace

TEST(Deploy, OwnerHoldsSupply) {
    auto t = deploy(base_spec());
    EXPECT_EQ(t.balance_of(kOwner), 1'000'000u);
    EXPECT_EQ(t.total_balance(), 1'000'000u);
    EXPECT_EQ(t.live, t.spec.traps);
}

TEST(Deploy, WhitelistStartsWithCreatorOnly) {
    auto t = deploy(with_whitelist());
    EXPECT_EQ(t.live.permission->members, std::set<Address>{kOwner});
}

TEST(Deploy, RejectsBrokenSpecs) {
    auto s = base_spec();
    s.total_supply = 0;
    EXPECT_THROW(deploy(s), Error);
    s = base_spec();
    s.nesting_depth = 0;
    EXPECT_THROW(deploy(s), Error);
    s = with_fee(0, 30'000);
    EXPECT_THROW(deploy(s), Error);
    s = with_limit(5);
    s.traps.amount_limit->identifier.clear();
    EXPECT_THROW(deploy(s), Error);
    s = base_spec();
    s.concealment.insert(Concealment::incomplete_renouncement);
    EXPECT_THROW(deploy(s), Error);
}

TEST(Transfer, BenignDeliversEverything) {
    auto t = funded(base_spec());
    auto r = transfer(t, kAlice, kPool, 100, kPool);
    ASSERT_TRUE(r.ok);
    EXPECT_EQ(r.delivered, 100u);
    EXPECT_FALSE(r.trace);
}

TEST(Transfer, WhitelistBlocksInvestorSell) {
    auto t = funded(with_whitelist());
    auto r = transfer(t, kAlice, kPool, 100, kPool);
    ASSERT_FALSE(r.ok);
    EXPECT_EQ(r.trace->cause.identifier, "_enable");
    EXPECT_EQ(r.trace->cause.kind, CauseKind::assertion_failed);
    // buying and wallet-to-wallet moves are untouched
    EXPECT_TRUE(transfer(t, kPool, kBob, 100, kPool).ok);
    EXPECT_TRUE(transfer(t, kAlice, kBob, 100, kPool).ok);
}

TEST(Transfer, BlacklistBlocksMembersOnly) {
    auto s = base_spec();
    s.traps.permission = PermissionTrap{ListKind::blacklist, {kAlice}, "bots", true};
    auto t = funded(s);
    EXPECT_TRUE(transfer(t, kAlice, kBob, 500, kPool).ok);
    EXPECT_TRUE(transfer(t, kBob, kPool, 500, kPool).ok);
    auto r = transfer(t, kAlice, kPool, 1, kPool);
    ASSERT_FALSE(r.ok);
    EXPECT_EQ(r.trace->cause.identifier, "bots");
}

TEST(Transfer, SuspensionSparesOwnerAndBuys) {
    auto t = funded(with_switch(true));
    auto r = transfer(t, kAlice, kBob, 10, kPool);
    ASSERT_FALSE(r.ok);
    EXPECT_EQ(r.trace->cause.identifier, "enableTrading");
    EXPECT_TRUE(transfer(t, kOwner, kPool, 10, kPool).ok);
    EXPECT_TRUE(transfer(t, kPool, kBob, 10, kPool).ok);
}

TEST(Transfer, SuspensionOffAtDeployLetsInvestorsTrade) {
    auto t = funded(with_switch(false));
    EXPECT_TRUE(transfer(t, kPool, kBob, 10, kPool).ok);
    EXPECT_TRUE(transfer(t, kBob, kPool, 10, kPool).ok);
}

TEST(Transfer, SuspensionScopeAllBlocksBuysToo) {
    auto s = with_switch(true);
    s.traps.suspension->scope = TrapScope::all;
    auto t = funded(s);
    EXPECT_FALSE(transfer(t, kPool, kBob, 10, kPool).ok);
}

TEST(Transfer, LimitOfOneBlocksSell) {
    auto t = funded(with_limit(1));
    auto r = transfer(t, kAlice, kPool, 50, kPool);
    ASSERT_FALSE(r.ok);
    EXPECT_EQ(r.trace->cause.identifier, "_maxTxAmount");
    EXPECT_TRUE(transfer(t, kAlice, kPool, 1, kPool).ok);
    EXPECT_TRUE(transfer(t, kOwner, kPool, 5'000, kPool).ok);
}

TEST(Transfer, LimitScopeNonBuysLetsBuysThrough) {
    auto s = with_limit(1);
    s.traps.amount_limit->scope = TrapScope::non_buys;
    auto t = funded(s);
    EXPECT_TRUE(transfer(t, kPool, kBob, 50, kPool).ok);
    EXPECT_FALSE(transfer(t, kBob, kPool, 50, kPool).ok);
}

TEST(Transfer, NinetyNinePercentSellFee) {
    auto t = funded(with_fee(0, 9900));
    const auto sink_before = t.balance_of(kBurnSink);
    auto r = transfer(t, kAlice, kPool, 1000, kPool);
    ASSERT_TRUE(r.ok);
    EXPECT_EQ(r.delivered, 10u);
    EXPECT_EQ(r.fee, 990u);
    EXPECT_EQ(r.fee_identifier, "_sellFee");
    EXPECT_EQ(t.balance_of(kBurnSink) - sink_before, 990u);
}

TEST(Transfer, BuyFeeUsesBuyRate) {
    auto t = funded(with_fee(2500, 9900));
    auto r = transfer(t, kPool, kBob, 1000, kPool);
    ASSERT_TRUE(r.ok);
    EXPECT_EQ(r.delivered, 750u);
    // plain wallet moves are fee free
    auto w = transfer(t, kAlice, kBob, 1000, kPool);
    EXPECT_EQ(w.delivered, 1000u);
    EXPECT_TRUE(w.fee_identifier.empty());
}

TEST(Transfer, FeeAboveHundredPercentOverflows) {
    auto t = funded(with_fee(0, 11'000));
    auto r = transfer(t, kAlice, kPool, 1000, kPool);
    ASSERT_FALSE(r.ok);
    EXPECT_EQ(r.trace->cause.kind, CauseKind::numeric_overflow);
    EXPECT_EQ(r.trace->cause.identifier, "_sellFee");
}

TEST(Transfer, FeeAtExactlyHundredPercentDeliversNothing) {
    auto t = funded(with_fee(0, 10'000));
    auto r = transfer(t, kAlice, kPool, 1000, kPool);
    ASSERT_TRUE(r.ok);
    EXPECT_EQ(r.delivered, 0u);
}

TEST(Transfer, CallbackReentersAndNamesTheHook) {
    auto t = funded(with_callback());
    auto r = transfer(t, kAlice, kPool, 100, kPool);
    ASSERT_FALSE(r.ok);
    EXPECT_EQ(r.trace->cause.identifier, "_isBot");
    ASSERT_GE(r.trace->frames.size(), 4u);
    EXPECT_EQ(r.trace->frames[0].function_name, "transfer");
    EXPECT_EQ(r.trace->frames[2].function_name, "_isBot");
    EXPECT_EQ(r.trace->frames[3].function_name, "_transfer");
    EXPECT_TRUE(transfer(t, kOwner, kPool, 100, kPool).ok);
}

TEST(Transfer, InsufficientBalanceIsPlainRevert) {
    auto t = funded(base_spec());
    auto r = transfer(t, kBob, kPool, 1, kPool);
    ASSERT_FALSE(r.ok);
    EXPECT_EQ(r.trace->cause.kind, CauseKind::reverted);
    EXPECT_TRUE(r.trace->cause.identifier.empty());
}

TEST(Transfer, TrapOrderFirstFailureWins) {
    auto s = base_spec();
    s.traps.permission = PermissionTrap{ListKind::whitelist, {kOwner}, "_enable", true};
    s.traps.suspension = SuspensionTrap{true, "enableTrading", true, TrapScope::all};
    s.traps.amount_limit = AmountLimitTrap{1, "_maxTxAmount", true, TrapScope::all};
    auto t = funded(s);
    EXPECT_EQ(transfer(t, kAlice, kPool, 50, kPool).trace->cause.identifier, "_enable");
    EXPECT_EQ(transfer(t, kAlice, kBob, 50, kPool).trace->cause.identifier, "enableTrading");
    EXPECT_EQ(trap_identifiers(s.traps),
              (std::vector<std::string>{"_enable", "enableTrading", "_maxTxAmount"}));
}

TEST(Transfer, BlankErrorHidesIdentifier) {
    auto s = with_whitelist();
    s.concealment.insert(Concealment::blank_error);
    auto t = funded(s);
    auto r = transfer(t, kAlice, kPool, 10, kPool);
    ASSERT_FALSE(r.ok);
    EXPECT_TRUE(r.trace->cause.identifier.empty());
    EXPECT_FALSE(r.trace->frames.empty());
}

TEST(Placement, FramesReflectPlacement) {
    auto s = with_whitelist();
    s.placement = Placement::via_modifier;
    s.helper_names = {"onlyEligible"};
    auto t = funded(s);
    auto r = transfer(t, kAlice, kPool, 1, kPool);
    ASSERT_EQ(r.trace->frames.size(), 3u);
    EXPECT_EQ(r.trace->frames[2].function_name, "onlyEligible");

    s.placement = Placement::via_nested_function;
    s.nesting_depth = 3;
    s.helper_names = {"_a", "_b", "_c"};
    t = funded(s);
    r = transfer(t, kAlice, kPool, 1, kPool);
    ASSERT_EQ(r.trace->frames.size(), 5u);
    EXPECT_EQ(r.trace->frames[4].function_name, "_c");
    for (std::size_t i = 0; i < r.trace->frames.size(); ++i) {
        EXPECT_EQ(r.trace->frames[i].site_id, static_cast<int>(i));
    }

    s.placement = Placement::via_external_contract;
    s.helper_names = {"verify"};
    s.external_contract = "Guard";
    t = funded(s);
    r = transfer(t, kAlice, kPool, 1, kPool);
    ASSERT_EQ(r.trace->frames.size(), 4u);
    EXPECT_EQ(r.trace->frames[2].function_name, "Guard");
    EXPECT_EQ(r.trace->frames[3].function_name, "verify");
}

TEST(Backdoor, OwnerArmsSwitch) {
    auto t = funded(with_switch(false));
    EXPECT_EQ(invoke_backdoor(t, kOwner, BackdoorAction::set_switch, switch_to(true)), BackdoorStatus::applied);
    EXPECT_FALSE(transfer(t, kAlice, kPool, 10, kPool).ok);
}

TEST(Backdoor, NonOwnerRejected) {
    auto t = funded(with_limit(1'000'000));
    const auto before = t.live;
    EXPECT_EQ(invoke_backdoor(t, kAlice, BackdoorAction::set_limit, limit_to(1)),
              BackdoorStatus::not_privileged);
    EXPECT_EQ(t.live, before);
}

TEST(Backdoor, MissingTrapAndNoSetter) {
    auto t = funded(with_limit(10));
    EXPECT_EQ(invoke_backdoor(t, kOwner, BackdoorAction::set_fee, {}), BackdoorStatus::missing_trap);
    t.live.amount_limit->has_setter = false;
    EXPECT_EQ(invoke_backdoor(t, kOwner, BackdoorAction::set_limit, limit_to(1)), BackdoorStatus::no_setter);
}

TEST(Backdoor, RenounceRevokesOwnerButNotHiddenController) {
    auto s = with_fee(0, 0);
    s.concealment.insert(Concealment::incomplete_renouncement);
    s.hidden_controller = Address{"0xhidden"};
    auto t = funded(s);
    EXPECT_FALSE(renounce(t, kAlice));
    EXPECT_TRUE(renounce(t, kOwner));
    EXPECT_EQ(invoke_backdoor(t, kOwner, BackdoorAction::set_fee, sell_fee(5000)),
              BackdoorStatus::not_privileged);
    EXPECT_EQ(invoke_backdoor(t, s.hidden_controller, BackdoorAction::set_fee, sell_fee(9900)),
              BackdoorStatus::applied);
    EXPECT_EQ(transfer(t, kAlice, kPool, 1000, kPool).delivered, 10u);
    // the creator can still exit after renouncing
    EXPECT_EQ(transfer(t, kOwner, kPool, 1000, kPool).delivered, 1000u);
}

TEST(Backdoor, ListMembershipToggles) {
    auto t = funded(with_whitelist());
    EXPECT_EQ(invoke_backdoor(t, kOwner, BackdoorAction::set_list_member, member(kAlice, true)),
              BackdoorStatus::applied);
    EXPECT_TRUE(transfer(t, kAlice, kPool, 10, kPool).ok);
    invoke_backdoor(t, kOwner, BackdoorAction::set_list_member, member(kAlice, false));
    EXPECT_FALSE(transfer(t, kAlice, kPool, 10, kPool).ok);
}

namespace {

TokenSpec random_spec(std::mt19937_64& rng) {
    auto s = base_spec();
    auto coin = [&] { return std::bernoulli_distribution(0.5)(rng); };
    std::uniform_int_distribution<std::uint32_t> bps(0, 12'000);
    if (coin()) {
        s.traps.permission = PermissionTrap{coin() ? ListKind::whitelist : ListKind::blacklist,
                                            {kOwner, coin() ? kAlice : kBob}, "perm", true};
    }
    if (coin()) s.traps.suspension = SuspensionTrap{coin(), "susp", true, coin() ? TrapScope::all : TrapScope::non_buys};
    if (coin()) s.traps.amount_limit = AmountLimitTrap{std::uniform_int_distribution<Amount>(0, 3000)(rng), "lim", true};
    if (coin()) s.traps.fee = FeeTrap{bps(rng), bps(rng), "fee", true};
    if (coin()) {
        s.traps.callback = CallbackTrap{true, "hook", "_transfer"};
        if (!s.traps.permission) s.traps.permission = PermissionTrap{ListKind::blacklist, {s.id}, "hook", false};
    }
    return s;
}

} // namespace

TEST(TokenProperties, ConservationRollbackExemptionFidelity) {
    std::mt19937_64 rng(2024);
    const std::vector<Address> who{kOwner, kPool, kAlice, kBob};
    for (int i = 0; i < 400; ++i) {
        const auto spec = random_spec(rng);
        auto t = deploy(spec);
        transfer(t, kOwner, kPool, 200'000, kPool);
        transfer(t, kOwner, kAlice, 5'000, kPool);
        transfer(t, kPool, kBob, 5'000, kPool);
        const auto ids = trap_identifiers(spec.traps);
        for (int k = 0; k < 30; ++k) {
            const auto& from = who[rng() % who.size()];
            const auto& to = who[rng() % who.size()];
            if (from == to) continue;
            const Amount amount = std::uniform_int_distribution<Amount>(0, 6'000)(rng);
            const auto before = t.balances;
            const auto r = transfer(t, from, to, amount, kPool);
            ASSERT_EQ(t.total_balance(), spec.total_supply);
            if (!r.ok) {
                ASSERT_EQ(t.balances, before);
                ASSERT_FALSE(r.trace->frames.empty());
                if (r.trace->cause.kind != CauseKind::reverted) {
                    ASSERT_NE(std::find(ids.begin(), ids.end(), r.trace->cause.identifier), ids.end())
                        << r.trace->cause.identifier;
                }
            }
        }
        const Amount owner_bal = t.balance_of(kOwner);
        const auto exit = transfer(t, kOwner, kPool, owner_bal, kPool);
        ASSERT_TRUE(exit.ok);
        ASSERT_EQ(exit.delivered, owner_bal);
    }
}

TEST(TokenJson, SpecAndInstanceRoundTrip) {
    auto s = with_callback();
    s.traps.fee = FeeTrap{100, 200, "fee", true};
    s.concealment = {Concealment::dummy_function, Concealment::single_char_name};
    s.placement = Placement::via_nested_function;
    s.nesting_depth = 2;
    s.helper_names = {"_x", "_y"};
    EXPECT_EQ(nlohmann::json(s).get<TokenSpec>(), s);

    auto t = funded(s);
    const auto back = nlohmann::json(t).get<TokenInstance>();
    EXPECT_EQ(back.spec, t.spec);
    EXPECT_EQ(back.balances, t.balances);
    EXPECT_EQ(back.live, t.live);
    EXPECT_EQ(back.owner, t.owner);

    auto r = transfer(t, kAlice, kPool, 10, kPool);
    EXPECT_EQ(nlohmann::json(*r.trace).get<ErrorTrace>(), *r.trace);
}

TEST(TokenEnums, NamesRoundTrip) {
    for (auto c : {Concealment::blank_error, Concealment::numeric_exception}) {
        EXPECT_EQ(parse_concealment(to_string(c)), c);
    }
    EXPECT_EQ(to_string(Placement::inline_check), "inline");
    EXPECT_EQ(parse_placement("via_external_contract"), Placement::via_external_contract);
    EXPECT_FALSE(parse_cause_kind("panic"));
}
