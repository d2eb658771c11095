#pragma once

#include <trapdoor/corpus/labelling.hpp>
#include <trapdoor/corpus/market.hpp>
#include <trapdoor/mlkit/dataset.hpp>
#include <trapdoor/parallel.hpp>

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace trapdoor::corpus {

struct PipelineConfig {
    probe::ProbeConfig probe;
    semantic::DetectorConfig detector;
    unsigned threads = default_threads();
};

struct TokenResult {
    Address token_id;
    Label label;
    std::vector<semantic::Indicator> indicators;
    std::optional<probe::ProbeOutcome> probe;
    std::vector<std::string> errors;  // ingestion or analysis failures
    std::optional<std::vector<double>> opcode_row;
    std::optional<std::vector<double>> exchange_row;
};

struct PipelineReport {
    std::size_t tokens = 0;
    std::size_t failed_tokens = 0;  // tokens with at least one error
    std::map<std::string, std::size_t> verdicts;          // every verdict, zeros included
    std::map<std::string, std::size_t> trapdoor_by_category;
    std::map<std::string, std::size_t> indicators_by_category;
};

struct PipelineResult {
    std::vector<TokenResult> tokens;  // input order
    PipelineReport report;
    mlkit::Dataset opcode_dataset;    // Trapdoor = 1, NonTrapdoor = 0, Unknown left out
    mlkit::Dataset exchange_dataset;
};

/// Per token: summarize the AST and detect indicators, probe the market
/// snapshot, label, extract features. A token whose inputs fail to load or
/// parse is labelled Unknown with the error recorded.
PipelineResult run_pipeline(std::span<const TokenInputs> inputs, const PipelineConfig& config = {});

/// Loads the manifest's artifacts in the workers, then runs as above.
/// Throws Error only when the manifest itself cannot be read.
PipelineResult run_pipeline(const std::filesystem::path& manifest, const PipelineConfig& config = {});

/// labels.jsonl, report.json, opcode.csv, exchange.csv.
void write_outputs(const std::filesystem::path& dir, const PipelineResult& result);

void to_json(nlohmann::json& j, const TokenResult& r);
void to_json(nlohmann::json& j, const PipelineReport& r);

} // namespace trapdoor::corpus
