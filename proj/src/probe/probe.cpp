#include <trapdoor/probe/probe.hpp>

#include <charconv>

namespace trapdoor::probe {

namespace {

std::int64_t parse_int(std::string_view s, std::string_view whole) {
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || p != s.data() + s.size()) {
        throw Error("not a rational number: " + std::string(whole));
    }
    return v;
}

__extension__ typedef unsigned __int128 u128;

// received < amount * (1 - acc)  <=>  received * den < amount * (den - num)
bool below_expected(Amount received, Amount amount, const Rational& acc) {
    const auto den = static_cast<u128>(acc.denominator());
    const auto keep = static_cast<u128>(acc.denominator() - acc.numerator());
    return static_cast<u128>(received) * den < static_cast<u128>(amount) * keep;
}

std::optional<Rational> observed_fee(Amount sent, Amount received) {
    if (sent == 0) return std::nullopt;
    // Amounts are capped by the buy cap, so they fit the rational's int64.
    return Rational(1) - Rational(static_cast<std::int64_t>(received), static_cast<std::int64_t>(sent));
}

void log_event(Market& m, EventRecord e, std::vector<EventRecord>& sink) {
    if (!m.record_events) return;
    e.block = m.block;
    e.log_index = m.next_log_index++;
    sink.push_back(std::move(e));
}

void log_transfer(Market& m, const Address& from, const Address& to, const tokenvm::TransferResult& r) {
    EventRecord e;
    e.kind = EventKind::Transfer;
    e.contract = m.token.spec.id;
    e.from = from;
    e.to = to;
    e.amount = r.delivered;
    log_event(m, e, m.token_events);
    if (r.fee > 0) {
        e.to = tokenvm::kBurnSink;
        e.amount = r.fee;
        log_event(m, e, m.token_events);
    }
}

void log_pool(Market& m, const std::vector<EventRecord>& events) {
    for (const auto& e : events) log_event(m, e, m.pool_events);
}

EventRecord sync_event(const amm::PoolState& p) {
    EventRecord e;
    e.kind = EventKind::Sync;
    e.contract = amm::pool_address(p);
    e.token0 = p.token_x_id;
    e.token1 = p.token_y_id;
    e.reserve0 = p.reserve_x;
    e.reserve1 = p.reserve_y;
    return e;
}

LegOutcome judge(const Trade& t, const Rational& acc) {
    LegOutcome out;
    out.amount = t.token_amount;
    out.received = t.received;
    out.fee_identifier = t.transfer.fee_identifier;
    if (!t.ok) {
        out.trace = t.transfer.trace;
        return out;
    }
    out.fee_observed = observed_fee(t.token_amount, t.received);
    out.ok = !below_expected(t.received, t.token_amount, acc);
    return out;
}

} // namespace

Rational parse_rational(std::string_view text) {
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        const auto den = parse_int(text.substr(slash + 1), text);
        if (den == 0) throw Error("zero denominator: " + std::string(text));
        return {parse_int(text.substr(0, slash), text), den};
    }
    if (auto dot = text.find('.'); dot != std::string_view::npos) {
        const auto frac = text.substr(dot + 1);
        if (frac.size() > 15) throw Error("too many decimals: " + std::string(text));
        std::int64_t den = 1;
        for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
        const auto whole = text.substr(0, dot);
        const std::int64_t w = whole.empty() ? 0 : parse_int(whole, text);
        const std::int64_t f = frac.empty() ? 0 : parse_int(frac, text);
        if (f < 0 || w < 0) throw Error("negative value: " + std::string(text));
        return {w * den + f, den};
    }
    return {parse_int(text, text), 1};
}

std::string format_rational(const Rational& r) {
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

double to_double(const Rational& r) {
    return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

void ProbeConfig::validate() const {
    if (acc_fee < Rational(0) || acc_fee >= Rational(1)) {
        throw Error("acc_fee must lie in [0, 1), got " + format_rational(acc_fee));
    }
    if (sell_fraction <= Rational(0) || sell_fraction > Rational(1)) {
        throw Error("sell_fraction must lie in (0, 1], got " + format_rational(sell_fraction));
    }
    if (buy_amount_cap == 0) throw Error("buy_amount_cap must be positive");
}

Market open_market(tokenvm::TokenInstance token, const Address& quote_token, Amount token_liquidity,
                   Amount quote_liquidity, std::uint64_t block) {
    Market m;
    m.token = std::move(token);
    m.quote_token = quote_token;
    m.block = block;
    m.pool = amm::create_pair(m.token.spec.id, quote_token);
    m.pool_address = amm::pool_address(m.pool);

    const Address provider = m.token.spec.owner;
    const auto r = tokenvm::transfer(m.token, provider, m.pool_address, token_liquidity, m.pool_address);
    if (!r.ok) throw ProbeError("owner could not fund the pool for " + m.token.spec.id.str());
    const Amount deposited = r.delivered;
    const bool token_is_x = m.pool.token_x_id == m.token.spec.id;
    auto added = amm::add_liquidity(m.pool, token_is_x ? deposited : quote_liquidity,
                                    token_is_x ? quote_liquidity : deposited, provider);
    m.pool = std::move(added.pool);
    m.record_events = true;
    log_transfer(m, provider, m.pool_address, r);
    log_pool(m, added.events);
    m.record_events = false;
    return m;
}

Trade buy(Market& m, const Address& trader, Amount token_amount) {
    Trade t;
    t.token_amount = token_amount;
    const Amount reserve = m.token_reserve();
    if (token_amount < reserve && m.quote_reserve() > 0) {
        const auto side = amm::side_for_input(m.pool, m.quote_token);
        t.quote_amount = amm::quote_amount_in(m.pool, token_amount, side);
        t.quote_leg = true;
    }
    t.transfer = tokenvm::transfer(m.token, m.pool_address, trader, token_amount, m.pool_address);
    if (!t.transfer.ok) return t;
    t.ok = true;
    t.received = t.transfer.delivered;

    const Amount token_balance = m.token.balance_of(m.pool_address);
    const Amount quote_balance = m.quote_reserve() + t.quote_amount;
    const bool token_is_x = m.pool.token_x_id == m.token.spec.id;

    EventRecord swap;
    swap.kind = EventKind::Swap;
    swap.contract = m.pool_address;
    swap.token0 = m.pool.token_x_id;
    swap.token1 = m.pool.token_y_id;
    swap.from = trader;
    swap.to = trader;
    (token_is_x ? swap.amount1_in : swap.amount0_in) = t.quote_amount;
    (token_is_x ? swap.amount0_out : swap.amount1_out) = token_amount;

    m.pool = token_is_x ? amm::sync(m.pool, token_balance, quote_balance)
                        : amm::sync(m.pool, quote_balance, token_balance);
    if (m.record_events) {
        log_transfer(m, m.pool_address, trader, t.transfer);
        log_pool(m, {swap, sync_event(m.pool)});
    }
    return t;
}

Trade sell(Market& m, const Address& trader, Amount token_amount) {
    Trade t;
    t.token_amount = token_amount;
    t.transfer = tokenvm::transfer(m.token, trader, m.pool_address, token_amount, m.pool_address);
    if (!t.transfer.ok) return t;
    t.ok = true;
    t.received = t.transfer.delivered;
    if (m.record_events) log_transfer(m, trader, m.pool_address, t.transfer);

    const auto side = amm::side_for_input(m.pool, m.token.spec.id);
    if (t.received > 0 && m.quote_reserve() > 0 && amm::quote_swap(m.pool, t.received, side).amount_out > 0) {
        auto swapped = amm::execute_swap(m.pool, t.received, side, trader, trader);
        m.pool = std::move(swapped.pool);
        t.quote_amount = swapped.quote.amount_out;
        t.quote_leg = true;
        log_pool(m, swapped.events);
    } else {
        // Nothing to pay out; the pool just absorbs the tokens.
        const bool token_is_x = m.pool.token_x_id == m.token.spec.id;
        const Amount bal = m.token.balance_of(m.pool_address);
        m.pool = token_is_x ? amm::sync(m.pool, bal, m.pool.reserve_y) : amm::sync(m.pool, m.pool.reserve_x, bal);
        if (m.record_events) log_pool(m, {sync_event(m.pool)});
    }
    return t;
}

LegOutcome buy_test(Market& m, const Address& investor, const Rational& acc_fee, Amount cap) {
    const Amount liquidity = m.token_reserve();
    if (liquidity == 0) throw ProbeError("pool holds no " + m.token.spec.symbol + " liquidity");
    return judge(buy(m, investor, std::min(liquidity, cap)), acc_fee);
}

LegOutcome sell_test(Market& m, const Address& investor, const Rational& acc_fee, const Rational& fraction) {
    const Amount balance = m.token.balance_of(investor);
    if (balance == 0) throw ProbeError("investor holds no tokens to sell");
    const auto amount = static_cast<u128>(balance) * static_cast<u128>(fraction.numerator()) /
                        static_cast<u128>(fraction.denominator());
    return judge(sell(m, investor, static_cast<Amount>(amount)), acc_fee);
}

Address probe_investor() { return derive_address("probe:investor"); }

ProbeOutcome run_probe(const Market& market, const ProbeConfig& config, const Address& investor) {
    config.validate();
    Market m = market;
    m.record_events = false;

    ProbeOutcome out;
    const auto b = buy_test(m, investor, config.acc_fee, config.buy_amount_cap);
    out.buy_ok = b.ok;
    out.buy_amount = b.amount;
    out.buy_received = b.received;
    out.buy_fee_observed = b.fee_observed;
    out.buy_trace = b.trace;
    if (!b.fee_identifier.empty()) out.fee_identifiers.push_back(b.fee_identifier);

    if (m.token.balance_of(investor) > 0) {
        const auto s = sell_test(m, investor, config.acc_fee, config.sell_fraction);
        out.sell_attempted = true;
        out.sell_ok = s.ok;
        out.sell_amount = s.amount;
        out.sell_received = s.received;
        out.sell_fee_observed = s.fee_observed;
        out.sell_trace = s.trace;
        if (!s.fee_identifier.empty() && s.fee_identifier != b.fee_identifier) {
            out.fee_identifiers.push_back(s.fee_identifier);
        }
    }
    return out;
}

namespace {

nlohmann::json rational_json(const std::optional<Rational>& r) {
    if (!r) return nullptr;
    return format_rational(*r);
}

std::optional<Rational> rational_from(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return parse_rational(j.at(key).get<std::string>());
}

std::optional<tokenvm::ErrorTrace> trace_from(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<tokenvm::ErrorTrace>();
}

} // namespace

void to_json(nlohmann::json& j, const Market& m) {
    j = {{"token", m.token}, {"pool", m.pool}, {"pool_address", m.pool_address}, {"quote_token", m.quote_token},
         {"block", m.block}};
}

void from_json(const nlohmann::json& j, Market& m) {
    m = {};
    m.token = j.at("token").get<tokenvm::TokenInstance>();
    m.pool = j.at("pool").get<amm::PoolState>();
    m.quote_token = j.at("quote_token").get<Address>();
    m.pool_address = j.value("pool_address", amm::pool_address(m.pool));
    m.block = j.value("block", std::uint64_t{0});
    if (m.pool_address != amm::pool_address(m.pool)) throw Error("snapshot pool_address does not match its pair");
    if (amm::reserve_of(m.pool, m.token.spec.id) != m.token.balance_of(m.pool_address)) {
        throw Error("snapshot pool reserve disagrees with the token balance of the pool");
    }
}

void to_json(nlohmann::json& j, const ProbeOutcome& o) {
    j = {{"buy_ok", o.buy_ok},
         {"buy_amount", o.buy_amount},
         {"buy_received", o.buy_received},
         {"buy_fee_observed", rational_json(o.buy_fee_observed)},
         {"buy_trace", o.buy_trace ? nlohmann::json(*o.buy_trace) : nlohmann::json(nullptr)},
         {"sell_attempted", o.sell_attempted},
         {"fee_identifiers", o.fee_identifiers}};
    if (o.sell_attempted) {
        j["sell_ok"] = o.sell_ok;
        j["sell_amount"] = o.sell_amount;
        j["sell_received"] = o.sell_received;
        j["sell_fee_observed"] = rational_json(o.sell_fee_observed);
        j["sell_trace"] = o.sell_trace ? nlohmann::json(*o.sell_trace) : nlohmann::json(nullptr);
    }
}

void from_json(const nlohmann::json& j, ProbeOutcome& o) {
    o = {};
    o.buy_ok = j.at("buy_ok").get<bool>();
    o.buy_amount = j.value("buy_amount", Amount{0});
    o.buy_received = j.value("buy_received", Amount{0});
    o.buy_fee_observed = rational_from(j, "buy_fee_observed");
    o.buy_trace = trace_from(j, "buy_trace");
    o.sell_attempted = j.value("sell_attempted", j.contains("sell_ok"));
    o.sell_ok = j.value("sell_ok", false);
    o.sell_amount = j.value("sell_amount", Amount{0});
    o.sell_received = j.value("sell_received", Amount{0});
    o.sell_fee_observed = rational_from(j, "sell_fee_observed");
    o.sell_trace = trace_from(j, "sell_trace");
    o.fee_identifiers = j.value("fee_identifiers", std::vector<std::string>{});
}

} // namespace trapdoor::probe
