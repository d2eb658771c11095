#pragma once

#include <trapdoor/events.hpp>

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace trapdoor::mlkit {

/// Exchange-history features of one token and its pool.
struct ExchangeFeatures {
    std::uint64_t n_transfers = 0;
    std::uint64_t n_token_transfers = 0;    // from or to the token contract itself
    double r_token_transfers = 0;
    std::uint64_t n_creator_transfers = 0;
    double r_creator_transfers = 0;
    std::uint64_t life_time = 0;            // blocks, creation to last Transfer
    std::uint64_t n_swap = 0;
    std::uint64_t n_sync = 0;
    std::uint64_t n_burn = 0;
    std::uint64_t n_mint = 0;
    std::uint64_t n_users = 0;              // distinct buyers and sellers
    std::uint64_t n_providers = 0;          // distinct Mint senders
    std::uint64_t n_buyers = 0;
    std::uint64_t n_sellers = 0;
    Amount sell_amt = 0;                    // token units into the pool
    Amount buy_amt = 0;                     // token units out of the pool
    std::uint64_t pool_life_time = 0;       // blocks, first to last pool event

    static const std::vector<std::string>& names();
    std::vector<double> to_vector() const;

    bool operator==(const ExchangeFeatures&) const = default;
};

/// Both streams must be ordered by (block, log_index); throws Error otherwise.
/// `creation_block` defaults to the block of the first token event.
ExchangeFeatures exchange_features(std::span<const EventRecord> token_events,
                                   std::span<const EventRecord> pool_events,
                                   const Address& token_id, const Address& creator,
                                   const Address& pool_id,
                                   std::optional<std::uint64_t> creation_block = std::nullopt);

} // namespace trapdoor::mlkit
