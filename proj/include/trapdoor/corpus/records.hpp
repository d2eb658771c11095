#pragma once

#include <trapdoor/events.hpp>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace trapdoor::corpus {

struct PoolRef {
    Address pool_id;
    Address paired_token;

    bool operator==(const PoolRef&) const = default;
};

/// Artifact locations, relative to the manifest's directory unless absolute.
struct ArtifactPaths {
    std::optional<std::string> ast;
    std::optional<std::string> bytecode;
    std::optional<std::string> events;
    std::optional<std::string> snapshot;  // token + pool state the probe runs on

    bool operator==(const ArtifactPaths&) const = default;
};

struct TokenRecord {
    Address token_id;
    std::string name;
    std::string symbol;
    Address creator;
    std::uint64_t creation_block = 0;
    bool has_source = false;
    ArtifactPaths paths;
    std::vector<PoolRef> pools;

    bool operator==(const TokenRecord&) const = default;
};

void to_json(nlohmann::json& j, const TokenRecord& r);
void from_json(const nlohmann::json& j, TokenRecord& r);

/// One TokenRecord per line. Blank lines are skipped; a bad line throws
/// Error naming its line number.
std::vector<TokenRecord> read_manifest(std::istream& in);
void write_manifest(std::ostream& out, std::span<const TokenRecord> records);

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& path);

std::string read_file(const std::filesystem::path& path);
/// Writes to a sibling temp file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

struct HighValueToken {
    Address token_id;
    std::string name;
    std::string symbol;
    double market_cap_usd = 0;
    std::uint64_t pool_count = 0;

    /// Market cap of at least $1M and at least 50 pools.
    bool qualifies() const { return market_cap_usd >= 1'000'000 && pool_count >= 50; }
    bool operator==(const HighValueToken&) const = default;
};

void to_json(nlohmann::json& j, const HighValueToken& t);
void from_json(const nlohmann::json& j, HighValueToken& t);

/// Reads a JSON array of high-value tokens.
std::vector<HighValueToken> read_high_value(std::istream& in);

struct SuspicionConfig {
    std::uint64_t min_listing_blocks = 199'384;  // one month at 13 s per block
    std::size_t min_buyers = 10;
    std::size_t max_sellers = 1;
};

struct TradeStats {
    bool paired_with_high_value = false;
    std::set<Address> buyers;
    std::set<Address> sellers;
    std::uint64_t listed_blocks = 0;  // first to last event of the token's pools
};

/// Buyers take the token out of a pool, sellers put it in; both are read
/// from Swap events of the record's pools.
TradeStats trade_stats(const TokenRecord& record, std::span<const EventRecord> events,
                       std::span<const HighValueToken> high_value);

/// R1 paired with a high-value token, R2 sold by at most one holder,
/// R3 bought by at least ten investors, R4 listed for at least a month.
bool is_suspicious(const TradeStats& stats, const SuspicionConfig& config = {});

} // namespace trapdoor::corpus
