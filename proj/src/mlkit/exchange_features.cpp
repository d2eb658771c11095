#include <trapdoor/mlkit/exchange_features.hpp>

#include <set>

namespace trapdoor::mlkit {

const std::vector<std::string>& ExchangeFeatures::names() {
    static const std::vector<std::string> n{
        "n_transfers", "n_token_transfers", "r_token_transfers", "n_creator_transfers",
        "r_creator_transfers", "life_time", "n_swap", "n_sync", "n_burn", "n_mint",
        "n_users", "n_providers", "n_buyers", "n_sellers", "sell_amt", "buy_amt",
        "pool_life_time"};
    return n;
}

std::vector<double> ExchangeFeatures::to_vector() const {
    auto d = [](auto v) { return static_cast<double>(v); };
    return {d(n_transfers), d(n_token_transfers), r_token_transfers, d(n_creator_transfers),
            r_creator_transfers, d(life_time), d(n_swap), d(n_sync), d(n_burn), d(n_mint),
            d(n_users), d(n_providers), d(n_buyers), d(n_sellers), d(sell_amt), d(buy_amt),
            d(pool_life_time)};
}

ExchangeFeatures exchange_features(std::span<const EventRecord> token_events,
                                   std::span<const EventRecord> pool_events,
                                   const Address& token_id, const Address& creator,
                                   const Address& pool_id,
                                   std::optional<std::uint64_t> creation_block) {
    if (!is_ordered(token_events)) throw Error("token events are not ordered by (block, log_index)");
    if (!is_ordered(pool_events)) throw Error("pool events are not ordered by (block, log_index)");

    ExchangeFeatures f;
    std::optional<std::uint64_t> last_transfer;
    for (const auto& e : token_events) {
        if (e.kind != EventKind::Transfer) continue;
        ++f.n_transfers;
        if (e.from == token_id || e.to == token_id) ++f.n_token_transfers;
        if (e.from == creator || e.to == creator) ++f.n_creator_transfers;
        last_transfer = e.block;
    }
    if (f.n_transfers > 0) {
        f.r_token_transfers = static_cast<double>(f.n_token_transfers) / f.n_transfers;
        f.r_creator_transfers = static_cast<double>(f.n_creator_transfers) / f.n_transfers;
    }
    if (!creation_block && !token_events.empty()) creation_block = token_events.front().block;
    if (last_transfer && creation_block && *last_transfer > *creation_block) {
        f.life_time = *last_transfer - *creation_block;
    }

    std::set<Address> buyers, sellers, providers;
    for (const auto& e : pool_events) {
        if (!pool_id.empty() && e.contract != pool_id) continue;
        switch (e.kind) {
        case EventKind::Swap: {
            ++f.n_swap;
            const bool token_is_0 = e.token0 == token_id;
            const Amount token_in = token_is_0 ? e.amount0_in : e.amount1_in;
            const Amount token_out = token_is_0 ? e.amount0_out : e.amount1_out;
            if (token_out > 0) {
                buyers.insert(e.to);
                f.buy_amt += token_out;
            }
            if (token_in > 0) {
                sellers.insert(e.from);
                f.sell_amt += token_in;
            }
            break;
        }
        case EventKind::Sync: ++f.n_sync; break;
        case EventKind::Burn: ++f.n_burn; break;
        case EventKind::Mint:
            ++f.n_mint;
            providers.insert(e.from);
            break;
        case EventKind::Transfer: break;
        }
    }
    f.n_buyers = buyers.size();
    f.n_sellers = sellers.size();
    std::set<Address> users = buyers;
    users.insert(sellers.begin(), sellers.end());
    f.n_users = users.size();
    f.n_providers = providers.size();
    if (!pool_events.empty()) f.pool_life_time = pool_events.back().block - pool_events.front().block;
    return f;
}

} // namespace trapdoor::mlkit
