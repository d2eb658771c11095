#include <trapdoor/corpus/pipeline.hpp>

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace trapdoor;
using namespace trapdoor::corpus;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("trapdoor-pipeline-" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::vector<TokenInputs> inputs_of(const std::vector<SyntheticToken>& tokens) {
    std::vector<TokenInputs> out;
    for (const auto& t : tokens) out.push_back(t.inputs);
    return out;
}

EventRecord swap(std::uint64_t block, const char* trader, bool buy) {
    EventRecord e;
    e.kind = EventKind::Swap;
    e.block = block;
    e.contract = Address{"0xpool"};
    e.token0 = Address{"0xtok"};
    e.token1 = weth().token_id;
    e.from = Address{trader};
    e.to = Address{trader};
    (buy ? e.amount0_out : e.amount0_in) = 10;
    (buy ? e.amount1_in : e.amount1_out) = 1;
    return e;
}

TokenRecord listed_token() {
    TokenRecord r;
    r.token_id = Address{"0xtok"};
    r.pools = {{Address{"0xpool"}, weth().token_id}};
    return r;
}

std::vector<EventRecord> history(std::size_t buyers, std::size_t sellers, std::uint64_t span) {
    std::vector<EventRecord> ev;
    std::uint64_t block = 1000;
    for (std::size_t i = 0; i < buyers; ++i) {
        ev.push_back(swap(block++, ("0xb" + std::to_string(i)).c_str(), true));
    }
    for (std::size_t i = 0; i < sellers; ++i) {
        ev.push_back(swap(block++, ("0xs" + std::to_string(i)).c_str(), false));
    }
    ev.back().block = 1000 + span;
    return ev;
}

} // namespace

TEST(Pipeline, BenignAndPermissionCorpus) {
    const auto tokens = build_synthetic(5, {{"benign", 100}, {"EP", 100}}, 1);
    const auto r = run_pipeline(inputs_of(tokens));
    std::size_t blank = 0;
    for (const auto& t : tokens) blank += t.truth.spec.has(tokenvm::Concealment::blank_error) ? 1 : 0;
    ASSERT_LT(blank, 50u);
    EXPECT_EQ(r.report.tokens, 200u);
    EXPECT_EQ(r.report.verdicts.at("NonTrapdoor"), 100u);
    EXPECT_EQ(r.report.verdicts.at("Trapdoor"), 100u - blank);
    EXPECT_EQ(r.report.verdicts.at("Unknown"), blank);
    EXPECT_EQ(r.report.trapdoor_by_category.at("EP"), 100u - blank);
    EXPECT_EQ(r.report.failed_tokens, 0u);
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const auto& truth = tokens[i].truth;
        EXPECT_EQ(r.tokens[i].token_id, truth.spec.id);
        auto expected = truth.benign() ? Verdict::NonTrapdoor : Verdict::Trapdoor;
        if (truth.spec.has(tokenvm::Concealment::blank_error)) expected = Verdict::Unknown;
        EXPECT_EQ(r.tokens[i].label.verdict, expected) << i;
        if (expected == Verdict::Trapdoor) {
            EXPECT_EQ(r.tokens[i].label.matched->identifier, truth.spec.traps.permission->identifier);
        }
    }
    EXPECT_EQ(r.opcode_dataset.samples.size(), 200u - blank);
    EXPECT_EQ(r.opcode_dataset.count(1), 100u - blank);
}

TEST(Pipeline, DeterministicAcrossThreadCounts) {
    const auto tokens = build_synthetic(6, {{"benign", 10}, {"ES", 5}, {"FM", 5}, {"IC", 5}}, 2);
    PipelineConfig one;
    one.threads = 1;
    PipelineConfig four;
    four.threads = 4;
    const auto a = run_pipeline(inputs_of(tokens), one);
    const auto b = run_pipeline(inputs_of(tokens), four);
    EXPECT_EQ(nlohmann::json(a.tokens), nlohmann::json(b.tokens));
    EXPECT_EQ(a.opcode_dataset.samples, b.opcode_dataset.samples);
}

TEST(Pipeline, MalformedAstIsIsolated) {
    const auto dir = scratch("malformed");
    write_synthetic(dir, build_synthetic(7, {{"benign", 4}, {"EP", 4}}, 1));
    std::ifstream in(dir / "manifest.jsonl");
    const auto records = read_manifest(in);
    ASSERT_EQ(records.size(), 8u);
    const auto victim = resolve(dir, *records[2].paths.ast);
    write_file_atomic(victim, "{\"schema_version\": 1, \"nodes\": [");

    const auto r = run_pipeline(dir / "manifest.jsonl");
    ASSERT_EQ(r.tokens.size(), 8u);
    EXPECT_EQ(r.report.failed_tokens, 1u);
    EXPECT_EQ(r.tokens[2].label.verdict, Verdict::Unknown);
    EXPECT_FALSE(r.tokens[2].errors.empty());
    for (std::size_t i = 0; i < r.tokens.size(); ++i) {
        if (i == 2) continue;
        EXPECT_TRUE(r.tokens[i].errors.empty()) << i;
        EXPECT_NE(r.tokens[i].label.verdict, Verdict::Unknown) << i;
    }

    const auto out = dir / "out";
    write_outputs(out, r);
    for (const char* f : {"labels.jsonl", "report.json", "opcode.csv", "exchange.csv"}) {
        EXPECT_TRUE(fs::exists(out / f)) << f;
    }
    fs::remove_all(dir);
}

TEST(Pipeline, MissingArtifactIsIsolated) {
    const auto dir = scratch("missing");
    write_synthetic(dir, build_synthetic(8, {{"benign", 3}}, 1));
    std::ifstream in(dir / "manifest.jsonl");
    const auto records = read_manifest(in);
    fs::remove(resolve(dir, *records[0].paths.snapshot));
    const auto r = run_pipeline(dir / "manifest.jsonl");
    EXPECT_EQ(r.report.failed_tokens, 1u);
    EXPECT_EQ(r.tokens[0].label.verdict, Verdict::Unknown);
    EXPECT_EQ(r.tokens[1].label.verdict, Verdict::NonTrapdoor);
    fs::remove_all(dir);
}

TEST(Pipeline, EmptyManifest) {
    const auto dir = scratch("empty");
    write_file_atomic(dir / "manifest.jsonl", "");
    const auto r = run_pipeline(dir / "manifest.jsonl");
    EXPECT_TRUE(r.tokens.empty());
    EXPECT_TRUE(r.opcode_dataset.samples.empty());
    EXPECT_EQ(r.report.tokens, 0u);
    for (const auto& [_, n] : r.report.verdicts) EXPECT_EQ(n, 0u);
    EXPECT_THROW(run_pipeline(dir / "absent.jsonl"), Error);
    fs::remove_all(dir);
}

TEST(Manifest, RoundTripAndLineNumbers) {
    const auto tokens = build_synthetic(9, {{"benign", 2}, {"AL", 1}}, 1);
    std::vector<TokenRecord> recs;
    for (const auto& t : tokens) recs.push_back(t.inputs.record);
    std::stringstream ss;
    write_manifest(ss, recs);
    EXPECT_EQ(read_manifest(ss), recs);

    const std::string first = nlohmann::json(recs.front()).dump();
    std::stringstream bad(first + "\n\nnot json\n");
    try {
        read_manifest(bad);
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
    }
}

TEST(Suspicion, FourRules) {
    const std::vector<HighValueToken> hv{weth()};
    const auto rec = listed_token();
    const std::uint64_t month = SuspicionConfig{}.min_listing_blocks;
    const std::uint64_t forty_five_days = month * 3 / 2;

    EXPECT_TRUE(is_suspicious(trade_stats(rec, history(12, 1, forty_five_days), hv)));
    EXPECT_FALSE(is_suspicious(trade_stats(rec, history(12, 2, forty_five_days), hv)));
    EXPECT_FALSE(is_suspicious(trade_stats(rec, history(9, 1, forty_five_days), hv)));
    EXPECT_FALSE(is_suspicious(trade_stats(rec, history(12, 1, month - 1), hv)));
    EXPECT_FALSE(is_suspicious(trade_stats(rec, history(12, 1, forty_five_days), {})));

    SuspicionConfig week;
    week.min_listing_blocks = 46'523;
    EXPECT_TRUE(is_suspicious(trade_stats(rec, history(12, 1, 50'000), hv), week));
}
