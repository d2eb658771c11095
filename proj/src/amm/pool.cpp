#include <trapdoor/amm/pool.hpp>

#include <boost/multiprecision/cpp_int.hpp>

#include <limits>

namespace trapdoor::amm {

namespace {

using boost::multiprecision::uint256_t;

Amount narrow(const uint256_t& v, const char* what) {
    if (v > std::numeric_limits<Amount>::max()) {
        throw PoolError(std::string(what) + " exceeds 64-bit amount range");
    }
    return static_cast<Amount>(v);
}

std::pair<Amount, Amount> in_out_reserves(const PoolState& p, SwapSide side) {
    return side == SwapSide::x_in_y_out ? std::pair{p.reserve_x, p.reserve_y}
                                        : std::pair{p.reserve_y, p.reserve_x};
}

EventRecord pool_event(const PoolState& p, EventKind kind) {
    EventRecord e;
    e.kind = kind;
    e.contract = pool_address(p);
    e.token0 = p.token_x_id;
    e.token1 = p.token_y_id;
    return e;
}

EventRecord sync_event(const PoolState& p) {
    auto e = pool_event(p, EventKind::Sync);
    e.reserve0 = p.reserve_x;
    e.reserve1 = p.reserve_y;
    return e;
}

Amount isqrt(const uint256_t& n) {
    return narrow(boost::multiprecision::sqrt(n), "liquidity");
}

} // namespace

PoolState create_pair(const Address& token_a, const Address& token_b) {
    if (token_a == token_b) throw PoolError("create_pair: identical tokens " + token_a.str());
    PoolState p;
    p.token_x_id = std::min(token_a, token_b);
    p.token_y_id = std::max(token_a, token_b);
    return p;
}

Address pool_address(const PoolState& pool) {
    return derive_address("pair:" + pool.token_x_id.str() + ":" + pool.token_y_id.str());
}

Amount reserve_of(const PoolState& pool, const Address& token) {
    if (token == pool.token_x_id) return pool.reserve_x;
    if (token == pool.token_y_id) return pool.reserve_y;
    throw PoolError("token " + token.str() + " not in pair");
}

SwapSide side_for_input(const PoolState& pool, const Address& token_in) {
    if (token_in == pool.token_x_id) return SwapSide::x_in_y_out;
    if (token_in == pool.token_y_id) return SwapSide::y_in_x_out;
    throw PoolError("token " + token_in.str() + " not in pair");
}

LiquidityResult add_liquidity(const PoolState& pool, Amount dx, Amount dy,
                              const Address& provider) {
    if (dx == 0 || dy == 0) throw PoolError("add_liquidity: zero amount");
    LiquidityResult r{pool, 0, dx, dy, {}};
    if (pool.lp_total == 0) {
        r.lp_amount = isqrt(uint256_t(dx) * dy);
    } else {
        if (pool.reserve_x == 0 || pool.reserve_y == 0) {
            throw PoolError("add_liquidity: LP supply without reserves");
        }
        // |dy/dx - ry/rx| within one unit of y
        const uint256_t lhs = uint256_t(dy) * pool.reserve_x;
        const uint256_t rhs = uint256_t(dx) * pool.reserve_y;
        const uint256_t diff = lhs > rhs ? lhs - rhs : rhs - lhs;
        if (diff > pool.reserve_x) throw PoolError("add_liquidity: deposit off reserve ratio");
        r.lp_amount = narrow(uint256_t(pool.lp_total) * dx / pool.reserve_x, "lp mint");
    }
    if (r.lp_amount == 0) throw PoolError("add_liquidity: deposit mints no LP");
    auto& p = r.pool;
    p.reserve_x = narrow(uint256_t(p.reserve_x) + dx, "reserve_x");
    p.reserve_y = narrow(uint256_t(p.reserve_y) + dy, "reserve_y");
    p.lp_total = narrow(uint256_t(p.lp_total) + r.lp_amount, "lp_total");
    p.lp_balances[provider] += r.lp_amount;

    auto mint = pool_event(p, EventKind::Mint);
    mint.from = provider;
    mint.amount = r.lp_amount;
    mint.amount0_in = dx;
    mint.amount1_in = dy;
    r.events = {mint, sync_event(p)};
    return r;
}

LiquidityResult remove_liquidity(const PoolState& pool, Amount lp_amount,
                                 const Address& provider) {
    if (lp_amount == 0) throw PoolError("remove_liquidity: zero amount");
    auto it = pool.lp_balances.find(provider);
    if (it == pool.lp_balances.end() || it->second < lp_amount) {
        throw PoolError("remove_liquidity: insufficient LP balance for " + provider.str());
    }
    LiquidityResult r{pool, lp_amount, 0, 0, {}};
    r.amount_x = static_cast<Amount>(uint256_t(pool.reserve_x) * lp_amount / pool.lp_total);
    r.amount_y = static_cast<Amount>(uint256_t(pool.reserve_y) * lp_amount / pool.lp_total);
    auto& p = r.pool;
    p.reserve_x -= r.amount_x;
    p.reserve_y -= r.amount_y;
    p.lp_total -= lp_amount;
    auto& bal = p.lp_balances[provider];
    bal -= lp_amount;
    if (bal == 0) p.lp_balances.erase(provider);

    auto burn = pool_event(p, EventKind::Burn);
    burn.from = provider;
    burn.to = provider;
    burn.amount = lp_amount;
    burn.amount0_out = r.amount_x;
    burn.amount1_out = r.amount_y;
    r.events = {burn, sync_event(p)};
    return r;
}

SwapQuote quote_swap(const PoolState& pool, Amount amount_in, SwapSide side) {
    if (amount_in == 0) throw PoolError("quote_swap: zero input");
    const auto [r_in, r_out] = in_out_reserves(pool, side);
    if (r_in == 0 || r_out == 0) throw PoolError("quote_swap: empty reserve");
    const uint256_t in_with_fee = uint256_t(amount_in) * pool.fee_numerator;
    const uint256_t num = in_with_fee * r_out;
    const uint256_t den = uint256_t(r_in) * pool.fee_denominator + in_with_fee;
    return SwapQuote{amount_in, static_cast<Amount>(num / den), side};
}

Amount quote_amount_in(const PoolState& pool, Amount amount_out, SwapSide side) {
    const auto [r_in, r_out] = in_out_reserves(pool, side);
    if (r_in == 0 || r_out == 0) throw PoolError("quote_amount_in: empty reserve");
    if (amount_out >= r_out) throw PoolError("quote_amount_in: output exceeds reserve");
    if (amount_out == 0) return 1;
    // getAmountIn: floor(r_in*out*den / ((r_out-out)*num)) + 1
    const uint256_t num = uint256_t(r_in) * amount_out * pool.fee_denominator;
    const uint256_t den = uint256_t(r_out - amount_out) * pool.fee_numerator;
    Amount in = narrow(num / den + 1, "amount_in");
    // The +1 can overshoot by one when the division is exact.
    while (in > 1 && quote_swap(pool, in - 1, side).amount_out >= amount_out) --in;
    return in;
}

SwapResult execute_swap(const PoolState& pool, Amount amount_in, SwapSide side,
                        const Address& trader, const Address& recipient) {
    SwapResult r{pool, quote_swap(pool, amount_in, side), {}};
    auto& p = r.pool;
    const Amount out = r.quote.amount_out;
    auto swap = pool_event(p, EventKind::Swap);
    swap.from = trader;
    swap.to = recipient.empty() ? trader : recipient;
    if (side == SwapSide::x_in_y_out) {
        p.reserve_x = narrow(uint256_t(p.reserve_x) + amount_in, "reserve_x");
        p.reserve_y -= out;
        swap.amount0_in = amount_in;
        swap.amount1_out = out;
    } else {
        p.reserve_y = narrow(uint256_t(p.reserve_y) + amount_in, "reserve_y");
        p.reserve_x -= out;
        swap.amount1_in = amount_in;
        swap.amount0_out = out;
    }
    r.events = {swap, sync_event(p)};
    return r;
}

PoolState sync(const PoolState& pool, Amount balance_x, Amount balance_y) {
    PoolState p = pool;
    p.reserve_x = balance_x;
    p.reserve_y = balance_y;
    return p;
}

void to_json(nlohmann::json& j, const PoolState& p) {
    nlohmann::json lp = nlohmann::json::object();
    for (const auto& [addr, bal] : p.lp_balances) lp[addr.str()] = bal;
    j = nlohmann::json{{"token_x_id", p.token_x_id},
                       {"token_y_id", p.token_y_id},
                       {"reserve_x", p.reserve_x},
                       {"reserve_y", p.reserve_y},
                       {"fee_numerator", p.fee_numerator},
                       {"fee_denominator", p.fee_denominator},
                       {"lp_total", p.lp_total},
                       {"lp_balances", lp}};
}

void from_json(const nlohmann::json& j, PoolState& p) {
    p = PoolState{};
    p.token_x_id = j.at("token_x_id").get<Address>();
    p.token_y_id = j.at("token_y_id").get<Address>();
    p.reserve_x = j.at("reserve_x").get<Amount>();
    p.reserve_y = j.at("reserve_y").get<Amount>();
    p.fee_numerator = j.value("fee_numerator", 997u);
    p.fee_denominator = j.value("fee_denominator", 1000u);
    p.lp_total = j.value("lp_total", Amount{0});
    if (auto it = j.find("lp_balances"); it != j.end()) {
        for (const auto& [addr, bal] : it->items()) p.lp_balances[Address{addr}] = bal.get<Amount>();
    }
}

} // namespace trapdoor::amm
