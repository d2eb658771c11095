#pragma once

#include <trapdoor/amm/pool.hpp>
#include <trapdoor/events.hpp>
#include <trapdoor/tokenvm/token.hpp>

#include <boost/rational.hpp>

#include <optional>
#include <string>
#include <vector>

namespace trapdoor::probe {

using Rational = boost::rational<std::int64_t>;

/// "0.30", "3/10" or "1". Throws Error on anything else.
Rational parse_rational(std::string_view text);
std::string format_rational(const Rational& r);  // "3/10"
double to_double(const Rational& r);

class ProbeError : public Error {
public:
    using Error::Error;
};

struct ProbeConfig {
    Rational acc_fee{3, 10};
    Amount buy_amount_cap = 1000;
    Rational sell_fraction{1, 2};

    /// Throws Error unless 0 <= acc_fee < 1 and 0 < sell_fraction <= 1.
    void validate() const;
};

/// A token, its pool against a high-value token, and an optional event log.
struct Market {
    tokenvm::TokenInstance token;
    amm::PoolState pool;
    Address pool_address;
    Address quote_token;

    bool record_events = false;
    std::uint64_t block = 0;
    std::uint32_t next_log_index = 0;
    std::vector<EventRecord> token_events;
    std::vector<EventRecord> pool_events;

    Amount token_reserve() const { return amm::reserve_of(pool, token.spec.id); }
    Amount quote_reserve() const { return amm::reserve_of(pool, quote_token); }
};

/// Creates the pair and has the token owner deposit both sides.
Market open_market(tokenvm::TokenInstance token, const Address& quote_token, Amount token_liquidity,
                   Amount quote_liquidity, std::uint64_t block = 0);

struct Trade {
    bool ok = false;
    Amount token_amount = 0;  // tokens sent by the pool (buy) or the trader (sell)
    Amount received = 0;      // tokens credited to the trader (buy) or the pool (sell)
    Amount quote_amount = 0;  // high-value tokens paid (buy) or paid out (sell)
    bool quote_leg = false;   // false when the pool could not price the trade
    tokenvm::TransferResult transfer;
};

/// Pool sends `token_amount` tokens to `trader` through the token's transfer
/// path; the input is the smallest high-value amount that pays for them.
/// The high-value leg is skipped when the pool would be drained.
Trade buy(Market& m, const Address& trader, Amount token_amount);
/// Trader sends tokens to the pool, then swaps what the pool received.
Trade sell(Market& m, const Address& trader, Amount token_amount);

struct LegOutcome {
    bool ok = false;
    Amount amount = 0;
    Amount received = 0;
    std::optional<Rational> fee_observed;  // 1 - received/amount
    std::optional<tokenvm::ErrorTrace> trace;
    std::string fee_identifier;
};

/// amount = min(pool token liquidity, cap). Fails when the transfer fails or
/// received < amount * (1 - acc_fee). Throws ProbeError on an empty pool.
LegOutcome buy_test(Market& m, const Address& investor, const Rational& acc_fee, Amount cap = 1000);
/// amount = floor(balance * fraction). Throws ProbeError when the investor
/// holds nothing.
LegOutcome sell_test(Market& m, const Address& investor, const Rational& acc_fee,
                     const Rational& fraction = {1, 2});

struct ProbeOutcome {
    bool buy_ok = false;
    bool sell_ok = false;
    bool sell_attempted = false;
    Amount buy_amount = 0, buy_received = 0;
    Amount sell_amount = 0, sell_received = 0;
    std::optional<Rational> buy_fee_observed;
    std::optional<Rational> sell_fee_observed;
    std::optional<tokenvm::ErrorTrace> buy_trace;
    std::optional<tokenvm::ErrorTrace> sell_trace;
    std::vector<std::string> fee_identifiers;  // fee traps that charged on either leg
};

/// Probe investor: an address no token has seen.
Address probe_investor();

/// Buy, then sell half when the buy left holdings. Runs on a copy of `m`.
ProbeOutcome run_probe(const Market& m, const ProbeConfig& config = {},
                       const Address& investor = probe_investor());

/// Token and pool state only; the event log is not part of a snapshot.
void to_json(nlohmann::json& j, const Market& m);
void from_json(const nlohmann::json& j, Market& m);

void to_json(nlohmann::json& j, const ProbeOutcome& o);
void from_json(const nlohmann::json& j, ProbeOutcome& o);

} // namespace trapdoor::probe
