#pragma once

// UniswapV2-style constant-product pair. Every operation is a pure function
// from a PoolState value to a new PoolState value.

#include <trapdoor/common.hpp>
#include <trapdoor/events.hpp>

#include <map>
#include <vector>

namespace trapdoor::amm {

class PoolError : public Error {
public:
    using Error::Error;
};

enum class SwapSide { x_in_y_out, y_in_x_out };

struct PoolState {
    Address token_x_id;
    Address token_y_id;
    Amount reserve_x = 0;
    Amount reserve_y = 0;
    // 997/1000 encodes the 0.3% swap fee.
    std::uint32_t fee_numerator = 997;
    std::uint32_t fee_denominator = 1000;
    Amount lp_total = 0;
    std::map<Address, Amount> lp_balances;

    bool operator==(const PoolState&) const = default;
};

struct SwapQuote {
    Amount amount_in = 0;
    Amount amount_out = 0;
    SwapSide side = SwapSide::x_in_y_out;
};

struct LiquidityResult {
    PoolState pool;
    Amount lp_amount = 0;
    Amount amount_x = 0;
    Amount amount_y = 0;
    std::vector<EventRecord> events;  // Mint or Burn, then Sync
};

struct SwapResult {
    PoolState pool;
    SwapQuote quote;
    std::vector<EventRecord> events;  // Swap, then Sync
};

/// Empty pool with the two identifiers in lexicographic order.
PoolState create_pair(const Address& token_a, const Address& token_b);

/// Deterministic pair address for the canonical (x, y) ordering.
Address pool_address(const PoolState& pool);

Amount reserve_of(const PoolState& pool, const Address& token);
/// Side that takes `token_in` as input. Throws if the token is not in the pair.
SwapSide side_for_input(const PoolState& pool, const Address& token_in);

/// Deposits (dx, dy). The first deposit mints floor(sqrt(dx*dy)); later ones
/// mint lp_total*dx/reserve_x and must match the reserve ratio to within one
/// base unit of token y.
LiquidityResult add_liquidity(const PoolState& pool, Amount dx, Amount dy,
                              const Address& provider);

LiquidityResult remove_liquidity(const PoolState& pool, Amount lp_amount,
                                 const Address& provider);

/// amount_out = floor(r_out * in * fee_num / (r_in * fee_den + in * fee_num))
SwapQuote quote_swap(const PoolState& pool, Amount amount_in, SwapSide side);

/// Smallest input whose quote delivers at least `amount_out`.
/// Requires amount_out < output reserve.
Amount quote_amount_in(const PoolState& pool, Amount amount_out, SwapSide side);

SwapResult execute_swap(const PoolState& pool, Amount amount_in, SwapSide side,
                        const Address& trader = {}, const Address& recipient = {});

/// Overwrites reserves with externally observed balances (UniswapV2 `sync`).
PoolState sync(const PoolState& pool, Amount balance_x, Amount balance_y);

void to_json(nlohmann::json& j, const PoolState& p);
void from_json(const nlohmann::json& j, PoolState& p);

} // namespace trapdoor::amm
