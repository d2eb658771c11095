#include <trapdoor/corpus/pipeline.hpp>

#include <trapdoor/mlkit/exchange_features.hpp>
#include <trapdoor/mlkit/opcodes.hpp>
#include <trapdoor/semantic/ast.hpp>

#include <fstream>
#include <sstream>

namespace trapdoor::corpus {

namespace {

TokenResult process(const TokenInputs& in, const PipelineConfig& config) {
    TokenResult r;
    r.token_id = in.record.token_id;
    r.errors = in.load_errors;

    bool have_indicators = false;
    if (in.ast) {
        try {
            const auto summary = semantic::summarize(semantic::parse_ast(*in.ast));
            r.indicators = semantic::detect_indicators(summary, config.detector);
            have_indicators = true;
        } catch (const std::exception& e) {
            r.errors.push_back(std::string("ast: ") + e.what());
        }
    } else if (in.record.has_source && !in.record.paths.ast) {
        r.errors.push_back("ast: record has source but no AST path");
    }

    if (in.market) {
        try {
            r.probe = probe::run_probe(*in.market, config.probe);
        } catch (const std::exception& e) {
            r.errors.push_back(std::string("probe: ") + e.what());
        }
    } else if (!in.record.paths.snapshot) {
        r.errors.push_back("probe: no market snapshot");
    }

    if (r.probe && have_indicators && r.errors.empty()) r.label = label_token(*r.probe, r.indicators);

    if (in.bytecode) {
        try {
            r.opcode_row = mlkit::opcode_features(mlkit::disassemble(*in.bytecode)).dense();
        } catch (const std::exception& e) {
            r.errors.push_back(std::string("bytecode: ") + e.what());
        }
    }
    if (in.events && !in.record.pools.empty()) {
        try {
            const auto& pool = in.record.pools.front().pool_id;
            std::vector<EventRecord> token_events, pool_events;
            for (const auto& e : *in.events) {
                if (e.contract == in.record.token_id) token_events.push_back(e);
                else if (e.contract == pool) pool_events.push_back(e);
            }
            r.exchange_row = mlkit::exchange_features(token_events, pool_events, in.record.token_id,
                                                      in.record.creator, pool, in.record.creation_block)
                                 .to_vector();
        } catch (const std::exception& e) {
            r.errors.push_back(std::string("events: ") + e.what());
        }
    }
    return r;
}

PipelineResult assemble(std::vector<TokenResult> tokens) {
    PipelineResult out;
    out.opcode_dataset.feature_names = mlkit::canonical_mnemonics();
    out.exchange_dataset.feature_names = mlkit::ExchangeFeatures::names();
    auto& rep = out.report;
    for (auto v : {Verdict::Trapdoor, Verdict::NonTrapdoor, Verdict::Unknown}) rep.verdicts[std::string(to_string(v))] = 0;
    for (auto c : {semantic::Category::EP, semantic::Category::ES, semantic::Category::AL, semantic::Category::FM,
                   semantic::Category::IC}) {
        rep.trapdoor_by_category[std::string(semantic::to_string(c))] = 0;
        rep.indicators_by_category[std::string(semantic::to_string(c))] = 0;
    }
    for (const auto& t : tokens) {
        ++rep.tokens;
        if (!t.errors.empty()) ++rep.failed_tokens;
        ++rep.verdicts[std::string(to_string(t.label.verdict))];
        if (t.label.matched) ++rep.trapdoor_by_category[std::string(semantic::to_string(t.label.matched->category))];
        std::set<semantic::Category> seen;
        for (const auto& ind : t.indicators) seen.insert(ind.category);
        for (auto c : seen) ++rep.indicators_by_category[std::string(semantic::to_string(c))];

        if (t.label.verdict == Verdict::Unknown) continue;
        const int y = t.label.verdict == Verdict::Trapdoor ? 1 : 0;
        if (t.opcode_row) out.opcode_dataset.samples.push_back({t.token_id.str(), *t.opcode_row, y});
        if (t.exchange_row) out.exchange_dataset.samples.push_back({t.token_id.str(), *t.exchange_row, y});
    }
    out.tokens = std::move(tokens);
    return out;
}

} // namespace

PipelineResult run_pipeline(std::span<const TokenInputs> inputs, const PipelineConfig& config) {
    config.probe.validate();
    std::vector<TokenResult> results(inputs.size());
    parallel_for(inputs.size(), config.threads, [&](std::size_t i) { results[i] = process(inputs[i], config); });
    return assemble(std::move(results));
}

PipelineResult run_pipeline(const std::filesystem::path& manifest, const PipelineConfig& config) {
    config.probe.validate();
    std::ifstream in(manifest);
    if (!in) throw Error("cannot open manifest " + manifest.string());
    const auto records = read_manifest(in);
    const auto base = manifest.parent_path();
    std::vector<TokenResult> results(records.size());
    parallel_for(records.size(), config.threads, [&](std::size_t i) {
        results[i] = process(load_inputs(records[i], base), config);
    });
    return assemble(std::move(results));
}

void write_outputs(const std::filesystem::path& dir, const PipelineResult& result) {
    std::ostringstream labels;
    for (const auto& t : result.tokens) labels << nlohmann::json(t).dump() << '\n';
    write_file_atomic(dir / "labels.jsonl", labels.str());
    write_file_atomic(dir / "report.json", nlohmann::json(result.report).dump(2) + "\n");
    std::ostringstream op, ex;
    mlkit::write_csv(op, result.opcode_dataset);
    mlkit::write_csv(ex, result.exchange_dataset);
    write_file_atomic(dir / "opcode.csv", op.str());
    write_file_atomic(dir / "exchange.csv", ex.str());
}

void to_json(nlohmann::json& j, const TokenResult& r) {
    j = {{"token_id", r.token_id}, {"label", r.label}, {"indicators", r.indicators}, {"errors", r.errors}};
    j["probe"] = r.probe ? nlohmann::json(*r.probe) : nlohmann::json(nullptr);
}

void to_json(nlohmann::json& j, const PipelineReport& r) {
    j = {{"tokens", r.tokens},
         {"failed_tokens", r.failed_tokens},
         {"verdicts", r.verdicts},
         {"trapdoor_by_category", r.trapdoor_by_category},
         {"indicators_by_category", r.indicators_by_category}};
}

} // namespace trapdoor::corpus
