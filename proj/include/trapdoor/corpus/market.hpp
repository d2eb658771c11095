#pragma once

#include <trapdoor/corpus/records.hpp>
#include <trapdoor/mlkit/dataset.hpp>
#include <trapdoor/probe/probe.hpp>
#include <trapdoor/tokenvm/synth.hpp>

#include <filesystem>
#include <optional>
#include <vector>

namespace trapdoor::corpus {

/// Quote side of every synthetic pool.
const HighValueToken& weth();

struct MarketConfig {
    std::uint64_t first_block = 12'000'000;
    std::uint64_t block_span = 2'000'000;  // creation blocks spread over this range
    std::size_t min_investors = 8;
    std::size_t max_investors = 40;
};

struct MarketHistory {
    probe::Market snapshot;  // state after the last simulated trade
    std::vector<EventRecord> token_events;
    std::vector<EventRecord> pool_events;
    std::uint64_t creation_block = 0;
};

/// Deploy, list against WETH, arm the traps, then a run of investor buys and
/// sells. Trapped tokens end with the creator dumping into the pool.
/// Deterministic in (token, seed).
MarketHistory simulate_market(const tokenvm::SynthToken& token, std::uint64_t seed, const MarketConfig& config = {});

/// Everything the pipeline reads for one token. Loaded artifacts stay raw;
/// parsing happens per token so one bad file cannot sink the batch.
struct TokenInputs {
    TokenRecord record;
    std::optional<nlohmann::json> ast;
    std::optional<std::string> bytecode;
    std::optional<probe::Market> market;
    std::optional<std::vector<EventRecord>> events;
    std::vector<std::string> load_errors;
};

/// Reads the record's artifacts relative to `base`. Never throws; failures
/// land in load_errors.
TokenInputs load_inputs(const TokenRecord& record, const std::filesystem::path& base);

struct SyntheticToken {
    tokenvm::SynthToken truth;
    TokenInputs inputs;
};

/// synthesize_corpus plus fixtures: AST, bytecode stub and simulated market.
std::vector<SyntheticToken> build_synthetic(std::uint64_t seed, const tokenvm::ClassCounts& counts,
                                            unsigned threads, const MarketConfig& config = {});

/// Writes manifest.jsonl, truth.jsonl and ast/, bytecode/, events/,
/// snapshots/ under `dir`.
void write_synthetic(const std::filesystem::path& dir, const std::vector<SyntheticToken>& tokens);

/// Opcode features of the bytecode stubs. Without `category` the label is
/// trapped vs benign over all tokens; with it, the label is "has category"
/// over trapped tokens only.
mlkit::Dataset synthetic_opcode_dataset(std::span<const tokenvm::SynthToken> tokens,
                                        std::optional<semantic::Category> category = std::nullopt);

} // namespace trapdoor::corpus
