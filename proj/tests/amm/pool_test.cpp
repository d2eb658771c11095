#include <trapdoor/amm/pool.hpp>

#include <oracles.hpp>

#include <gtest/gtest.h>

#include <numeric>
#include <random>

using namespace trapdoor;
using namespace trapdoor::amm;

namespace {

const Address A{"0xaaaa"};
const Address B{"0xbbbb"};
const Address LP{"0x1111"};

PoolState seeded(Amount x, Amount y) { return add_liquidity(create_pair(A, B), x, y, LP).pool; }

__extension__ typedef unsigned __int128 u128;

} // namespace

TEST(CreatePair, StartsEmpty) {
    auto p = create_pair(A, B);
    EXPECT_EQ(p.reserve_x, 0u);
    EXPECT_EQ(p.reserve_y, 0u);
    EXPECT_EQ(p.lp_total, 0u);
    EXPECT_EQ(p.fee_numerator, 997u);
    EXPECT_EQ(p.fee_denominator, 1000u);
}

TEST(CreatePair, OrderIsCanonical) {
    EXPECT_EQ(create_pair(A, B), create_pair(B, A));
    EXPECT_EQ(create_pair(B, A).token_x_id, A);
    EXPECT_EQ(pool_address(create_pair(A, B)), pool_address(create_pair(B, A)));
}

TEST(CreatePair, RejectsIdenticalTokens) { EXPECT_THROW(create_pair(A, A), PoolError); }

TEST(AddLiquidity, FirstDepositMintsIntegerSqrt) {
    auto r = add_liquidity(create_pair(A, B), 400, 900, LP);
    EXPECT_EQ(r.lp_amount, 600u);
    EXPECT_EQ(r.pool.lp_balances.at(LP), 600u);
    ASSERT_EQ(r.events.size(), 2u);
    EXPECT_EQ(r.events[0].kind, EventKind::Mint);
    EXPECT_EQ(r.events[1].kind, EventKind::Sync);
    EXPECT_EQ(r.events[1].reserve0, 400u);
    EXPECT_EQ(r.events[1].reserve1, 900u);
}

TEST(AddLiquidity, ProportionalDepositDoubles) {
    auto r = add_liquidity(seeded(400, 900), 400, 900, Address{"0x2222"});
    EXPECT_EQ(r.lp_amount, 600u);
    EXPECT_EQ(r.pool.lp_total, 1200u);
}

TEST(AddLiquidity, RejectsZeroAndSkewedDeposits) {
    EXPECT_THROW(add_liquidity(create_pair(A, B), 0, 900, LP), PoolError);
    EXPECT_THROW(add_liquidity(seeded(400, 900), 400, 1000, LP), PoolError);
}

TEST(AddLiquidity, ToleratesOneUnitOfRounding) {
    // 3 * 900 / 400 = 6.75
    EXPECT_NO_THROW(add_liquidity(seeded(400, 900), 3, 7, LP));
    EXPECT_NO_THROW(add_liquidity(seeded(400, 900), 3, 6, LP));
}

TEST(RemoveLiquidity, FullAndHalfWithdrawals) {
    auto full = remove_liquidity(seeded(400, 900), 600, LP);
    EXPECT_EQ(full.amount_x, 400u);
    EXPECT_EQ(full.amount_y, 900u);
    EXPECT_EQ(full.pool.lp_total, 0u);
    EXPECT_TRUE(full.pool.lp_balances.empty());

    auto half = remove_liquidity(seeded(400, 900), 300, LP);
    EXPECT_EQ(half.amount_x, 200u);
    EXPECT_EQ(half.amount_y, 450u);
    EXPECT_EQ(half.events[0].kind, EventKind::Burn);
}

TEST(RemoveLiquidity, RejectsOverWithdrawal) {
    EXPECT_THROW(remove_liquidity(seeded(400, 900), 601, LP), PoolError);
    EXPECT_THROW(remove_liquidity(seeded(400, 900), 1, Address{"0x9999"}), PoolError);
}

TEST(QuoteSwap, WorkedExamples) {
    EXPECT_EQ(quote_swap(seeded(1'000'000, 1'000'000), 10'000, SwapSide::x_in_y_out).amount_out, 9'871u);
    EXPECT_EQ(quote_swap(seeded(1000, 1000), 1000, SwapSide::x_in_y_out).amount_out, 499u);
    EXPECT_THROW(quote_swap(seeded(1000, 1000), 0, SwapSide::x_in_y_out), PoolError);
}

TEST(QuoteSwap, MatchesBruteForceOracle) {
    std::mt19937_64 rng(42);
    std::uniform_int_distribution<Amount> d(1, 10'000);
    for (int i = 0; i < 2000; ++i) {
        PoolState p = create_pair(A, B);
        p.reserve_x = d(rng);
        p.reserve_y = d(rng);
        const Amount dx = d(rng);
        ASSERT_EQ(quote_swap(p, dx, SwapSide::x_in_y_out).amount_out, oracle::max_swap_out(p.reserve_x, p.reserve_y, dx))
            << p.reserve_x << " " << p.reserve_y << " " << dx;
        ASSERT_EQ(quote_swap(p, dx, SwapSide::y_in_x_out).amount_out, oracle::max_swap_out(p.reserve_y, p.reserve_x, dx));
    }
}

TEST(QuoteAmountIn, IsSmallestSufficientInput) {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<Amount> d(2, 50'000);
    for (int i = 0; i < 1000; ++i) {
        PoolState p = create_pair(A, B);
        p.reserve_x = d(rng);
        p.reserve_y = d(rng);
        const Amount want = std::uniform_int_distribution<Amount>(1, p.reserve_y - 1)(rng);
        const Amount in = quote_amount_in(p, want, SwapSide::x_in_y_out);
        ASSERT_GE(quote_swap(p, in, SwapSide::x_in_y_out).amount_out, want);
        if (in > 1) {
            ASSERT_LT(quote_swap(p, in - 1, SwapSide::x_in_y_out).amount_out, want);
        }
    }
    EXPECT_THROW(quote_amount_in(seeded(100, 100), 100, SwapSide::x_in_y_out), PoolError);
}

TEST(ExecuteSwap, UpdatesReservesAndEmitsSwapThenSync) {
    auto r = execute_swap(seeded(1'000'000, 1'000'000), 10'000, SwapSide::x_in_y_out, LP);
    EXPECT_EQ(r.pool.reserve_x, 1'010'000u);
    EXPECT_EQ(r.pool.reserve_y, 990'129u);
    ASSERT_EQ(r.events.size(), 2u);
    EXPECT_EQ(r.events[0].kind, EventKind::Swap);
    EXPECT_EQ(r.events[0].amount0_in, 10'000u);
    EXPECT_EQ(r.events[0].amount1_out, 9'871u);
    EXPECT_EQ(r.events[1].reserve1, 990'129u);
}

TEST(ExecuteSwap, SplittingATradeNeverPaysMore) {
    const auto p = seeded(1'000'000, 1'000'000);
    const auto first = execute_swap(p, 5'000, SwapSide::x_in_y_out);
    const auto second = execute_swap(first.pool, 5'000, SwapSide::x_in_y_out);
    const auto single = quote_swap(p, 10'000, SwapSide::x_in_y_out);
    EXPECT_LE(first.quote.amount_out + second.quote.amount_out, single.amount_out);
}

TEST(ExecuteSwap, RejectsEmptyReserve) {
    PoolState p = create_pair(A, B);
    p.reserve_y = 1000;
    EXPECT_THROW(execute_swap(p, 10, SwapSide::x_in_y_out), PoolError);
}

TEST(PoolProperties, FeeAdjustedProductNeverDecreases) {
    std::mt19937_64 rng(9);
    std::uniform_int_distribution<Amount> d(1, 1'000'000);
    for (int i = 0; i < 2000; ++i) {
        PoolState p = create_pair(A, B);
        p.reserve_x = d(rng);
        p.reserve_y = d(rng);
        const Amount dx = d(rng);
        const auto after = execute_swap(p, dx, SwapSide::x_in_y_out).pool;
        const u128 lhs = (static_cast<u128>(after.reserve_x) * 1000 - static_cast<u128>(dx) * 3) * after.reserve_y;
        ASSERT_GE(lhs, static_cast<u128>(p.reserve_x) * 1000 * p.reserve_y);
    }
}

TEST(PoolProperties, FeelessProductSlackIsRoundingOnly) {
    std::mt19937_64 rng(10);
    std::uniform_int_distribution<Amount> d(1, 1'000'000);
    for (int i = 0; i < 2000; ++i) {
        PoolState p = create_pair(A, B);
        p.fee_numerator = 1000;
        p.reserve_x = d(rng);
        p.reserve_y = d(rng);
        const auto after = execute_swap(p, d(rng), SwapSide::x_in_y_out).pool;
        const u128 before = static_cast<u128>(p.reserve_x) * p.reserve_y;
        const u128 now = static_cast<u128>(after.reserve_x) * after.reserve_y;
        ASSERT_GE(now, before);
        ASSERT_LT(now - before, static_cast<u128>(after.reserve_x) + after.reserve_y);
    }
}

TEST(PoolProperties, AddThenRemoveReturnsDeposit) {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<Amount> d(1, 1'000'000'000);
    for (int i = 0; i < 500; ++i) {
        const Amount x = d(rng), y = d(rng);
        const auto added = add_liquidity(create_pair(A, B), x, y, LP);
        const auto removed = remove_liquidity(added.pool, added.lp_amount, LP);
        ASSERT_EQ(removed.amount_x, x);
        ASSERT_EQ(removed.amount_y, y);
    }
}

TEST(PoolProperties, LpBalancesSumToSupply) {
    auto p = seeded(10'000, 40'000);
    p = add_liquidity(p, 5'000, 20'000, Address{"0x2"}).pool;
    p = add_liquidity(p, 1'000, 4'000, Address{"0x3"}).pool;
    p = remove_liquidity(p, 1'000, LP).pool;
    const Amount sum = std::accumulate(p.lp_balances.begin(), p.lp_balances.end(), Amount{0},
                                       [](Amount s, const auto& kv) { return s + kv.second; });
    EXPECT_EQ(sum, p.lp_total);
}

TEST(PoolJson, RoundTrips) {
    auto p = add_liquidity(seeded(400, 900), 400, 900, Address{"0x2"}).pool;
    EXPECT_EQ(nlohmann::json(p).get<PoolState>(), p);
}
