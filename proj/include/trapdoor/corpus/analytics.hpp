#pragma once

#include <trapdoor/corpus/records.hpp>

#include <map>
#include <span>
#include <string>
#include <vector>

namespace trapdoor::corpus {

/// Last Transfer block minus the creation block; 0 without transfers.
std::uint64_t lifetime(std::span<const EventRecord> token_events, std::uint64_t creation_block);

struct HistogramBin {
    std::uint64_t lo = 0;
    std::uint64_t hi = 0;  // exclusive; the last bin is open-ended
    std::size_t count = 0;

    bool operator==(const HistogramBin&) const = default;
};

/// Bins [e0,e1), [e1,e2), ..., [e_last, inf). Edges must increase; values
/// below e0 are dropped.
std::vector<HistogramBin> histogram(std::span<const std::uint64_t> values, std::span<const std::uint64_t> edges);

std::string sha256_hex(std::string_view bytes);
/// Lowercase hex without 0x prefix or whitespace.
std::string normalize_bytecode(std::string_view hex);
/// CRLF to LF and trailing whitespace trimmed from every line.
std::string normalize_source(std::string_view text);

struct ArtifactDigest {
    Address token_id;
    Address creator;
    std::string digest;
};

struct CloneGroup {
    std::string digest;
    std::vector<Address> tokens;  // input order
    std::size_t distinct_creators = 0;

    bool operator==(const CloneGroup&) const = default;
};

/// Partition by digest; groups ordered by size descending, then digest.
std::vector<CloneGroup> clone_groups(std::span<const ArtifactDigest> items);

struct FakeMatch {
    Address token_id;
    Address high_value_id;
    bool by_name = false;
    bool by_symbol = false;

    bool operator==(const FakeMatch&) const = default;
};

/// Case-insensitive exact equality of name or symbol; a token never matches
/// its own entry.
std::vector<FakeMatch> fake_token_matches(std::span<const TokenRecord> records,
                                          std::span<const HighValueToken> high_value);

/// (high-value inflow - outflow) over Swap events of pools pairing
/// `high_value_token`, times its price. Prices are USD per base unit at token
/// creation. Throws Error when the price is missing.
double profit_usd(std::span<const EventRecord> pool_events, const Address& high_value_token,
                  const std::map<Address, double>& prices);

void to_json(nlohmann::json& j, const CloneGroup& g);
void to_json(nlohmann::json& j, const FakeMatch& m);
void to_json(nlohmann::json& j, const HistogramBin& b);

} // namespace trapdoor::corpus
