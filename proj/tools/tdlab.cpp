// tdlab: command-line front end for the trapdoor lab.
//
// Exit codes: 0 success, 1 some tokens failed, 2 invalid invocation.

#include <trapdoor/corpus/analytics.hpp>
#include <trapdoor/corpus/pipeline.hpp>
#include <trapdoor/mlkit/opcodes.hpp>
#include <trapdoor/mlkit/train.hpp>
#include <trapdoor/semantic/ast.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace trapdoor;

namespace {

class UsageError : public Error {
public:
    using Error::Error;
};

constexpr const char* kDefaultCounts = "benign=500,EP=100,ES=100,AL=100,FM=100,IC=100";

void emit(const nlohmann::json& j, const std::string& out) {
    if (out.empty() || out == "-") {
        std::cout << j.dump(2) << '\n';
    } else {
        corpus::write_file_atomic(out, j.dump(2) + "\n");
    }
}

nlohmann::json read_json_file(const std::string& path) {
    try {
        return nlohmann::json::parse(corpus::read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw UsageError(path + ": " + e.what());
    }
}

probe::Rational acc_fee_of(const std::string& text) {
    probe::ProbeConfig c;
    try {
        c.acc_fee = probe::parse_rational(text);
        c.validate();
    } catch (const Error& e) {
        throw UsageError(std::string("--acc-fee: ") + e.what());
    }
    return c.acc_fee;
}

mlkit::Dataset read_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open " + path);
    auto d = mlkit::read_csv(in);
    d.validate();
    return d;
}

std::vector<tokenvm::SynthToken> read_truth(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open " + path);
    std::vector<tokenvm::SynthToken> out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) out.push_back(nlohmann::json::parse(line).get<tokenvm::SynthToken>());
    }
    return out;
}

std::vector<std::uint64_t> parse_edges(const std::string& text) {
    std::vector<std::uint64_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stoull(item));
        } catch (const std::exception&) {
            throw UsageError("--edges: bad number " + item);
        }
    }
    return out;
}

struct Common {
    std::uint64_t seed = 1;
    unsigned threads = default_threads();
};

int cmd_synth(const Common& c, const std::string& counts, const std::string& out) {
    const auto parsed = [&] {
        try {
            return tokenvm::parse_class_counts(counts);
        } catch (const Error& e) {
            throw UsageError(std::string("--counts: ") + e.what());
        }
    }();
    const auto tokens = corpus::build_synthetic(c.seed, parsed, c.threads);
    corpus::write_synthetic(out, tokens);
    std::cout << nlohmann::json{{"tokens", tokens.size()}, {"dir", out}, {"seed", c.seed}}.dump() << '\n';
    return 0;
}

int cmd_probe(const std::string& token, const std::string& pool, const std::string& acc, const std::string& out) {
    probe::ProbeConfig config;
    config.acc_fee = acc_fee_of(acc);
    const auto market = [&] {
        try {
            return read_json_file(token).get<probe::Market>();
        } catch (const UsageError&) {
            throw;
        } catch (const std::exception& e) {
            throw UsageError(token + ": " + e.what());
        }
    }();
    if (!pool.empty() && Address(pool) != market.pool_address) {
        throw UsageError("--pool " + pool + " is not the snapshot's pool " + market.pool_address.str());
    }
    emit(probe::run_probe(market, config), out);
    return 0;
}

int cmd_scan(const std::string& ast_path, int switch_distance, const std::string& out) {
    semantic::DetectorConfig config;
    config.switch_distance = switch_distance;
    const auto doc = read_json_file(ast_path);
    semantic::ContractAst ast;
    try {
        ast = semantic::parse_ast(doc);
    } catch (const Error& e) {
        throw UsageError(ast_path + ": " + e.what());
    }
    const auto indicators = semantic::detect_indicators(semantic::summarize(ast), config);
    emit({{"ast", ast_path}, {"indicators", indicators}}, out);
    return 0;
}

int cmd_label(const Common& c, const std::string& manifest, const std::string& acc, const std::string& out) {
    corpus::PipelineConfig config;
    config.probe.acc_fee = acc_fee_of(acc);
    config.threads = c.threads;
    const auto result = corpus::run_pipeline(fs::path(manifest), config);
    if (!out.empty()) corpus::write_outputs(out, result);
    std::cout << nlohmann::json(result.report).dump(2) << '\n';
    return result.report.failed_tokens > 0 ? 1 : 0;
}

int cmd_features(const Common& c, const std::string& mode, const std::string& manifest, const std::string& truth,
                 const std::string& bytecode, const std::string& category, const std::string& out) {
    const int sources = !manifest.empty() + !truth.empty() + !bytecode.empty();
    if (sources != 1) throw UsageError("give exactly one of --manifest, --truth, --bytecode");
    if (!bytecode.empty()) {
        if (mode != "opcode") throw UsageError("--bytecode needs --mode opcode");
        const auto v = mlkit::opcode_features(mlkit::disassemble(corpus::read_file(bytecode)));
        emit({{"total_ops", v.total_ops}, {"counts", v.counts}}, out);
        return 0;
    }
    mlkit::Dataset data;
    int status = 0;
    if (!truth.empty()) {
        if (mode != "opcode") throw UsageError("--truth needs --mode opcode");
        std::optional<semantic::Category> cat;
        if (!category.empty()) {
            cat = semantic::parse_category(category);
            if (!cat) throw UsageError("unknown --category " + category);
        }
        data = corpus::synthetic_opcode_dataset(read_truth(truth), cat);
    } else {
        corpus::PipelineConfig config;
        config.threads = c.threads;
        auto result = corpus::run_pipeline(fs::path(manifest), config);
        data = mode == "opcode" ? std::move(result.opcode_dataset) : std::move(result.exchange_dataset);
        status = result.report.failed_tokens > 0 ? 1 : 0;
    }
    std::ostringstream csv;
    mlkit::write_csv(csv, data);
    if (out.empty() || out == "-") {
        std::cout << csv.str();
    } else {
        corpus::write_file_atomic(out, csv.str());
    }
    return status;
}

int cmd_train(const Common& c, const std::string& data_path, const std::string& model_name, const std::string& grid,
              std::size_t folds, double test_fraction, bool smote, std::size_t reps, const std::string& out) {
    const auto kind = mlkit::parse_model_kind(model_name);
    if (!kind) throw UsageError("unknown --model " + model_name);
    std::vector<mlkit::Params> configs;
    try {
        if (grid.empty()) {
            configs = mlkit::default_grid(*kind);
        } else {
            const auto axes = fs::exists(grid) ? read_json_file(grid) : nlohmann::json::parse(grid);
            configs = mlkit::expand_grid(axes);
        }
        mlkit::validate_grid(*kind, configs);
    } catch (const std::exception& e) {
        throw UsageError(std::string("--grid: ") + e.what());
    }
    const auto data = read_dataset(data_path);
    mlkit::TrainOptions options;
    options.folds = folds;
    options.test_fraction = test_fraction;
    options.smote = smote;
    options.seed = c.seed;
    options.threads = c.threads;

    if (reps <= 1) {
        const auto r = mlkit::train(data.samples, *kind, configs, options);
        auto j = mlkit::to_json(r);
        if (!out.empty()) corpus::write_file_atomic(out, r.model->to_json().dump() + "\n");
        std::cout << j.dump(2) << '\n';
        return 0;
    }
    const auto r = mlkit::repeated_experiment(data.samples, *kind, configs, options, reps);
    nlohmann::json runs = nlohmann::json::array();
    for (const auto& run : r.runs) runs.push_back({{"best", run.best}, {"test", mlkit::to_json(run.test_metrics)}});
    nlohmann::json importance = nlohmann::json::object();
    const auto imp = mlkit::feature_importance(r.split_counts);
    for (std::size_t i = 0; i < imp.size() && i < data.feature_names.size(); ++i) {
        if (imp[i] > 0) importance[data.feature_names[i]] = imp[i];
    }
    if (!out.empty()) corpus::write_file_atomic(out, r.runs.back().model->to_json().dump() + "\n");
    std::cout << nlohmann::json{{"mean", mlkit::to_json(r.mean)}, {"runs", runs}, {"feature_importance", importance}}
                     .dump(2)
              << '\n';
    return 0;
}

int cmd_evaluate(const std::string& model_path, const std::string& data_path) {
    const auto model = [&] {
        try {
            return mlkit::model_from_json(read_json_file(model_path));
        } catch (const UsageError&) {
            throw;
        } catch (const Error& e) {
            throw UsageError(model_path + ": " + e.what());
        }
    }();
    const auto data = read_dataset(data_path);
    std::cout << mlkit::to_json(mlkit::evaluate(*model, data.samples)).dump(2) << '\n';
    return 0;
}

int cmd_report(const std::string& manifest_path, const std::string& high_value_path, const std::string& prices_path,
               const std::string& edges_text, const std::string& out) {
    std::ifstream min(manifest_path);
    if (!min) throw UsageError("cannot open " + manifest_path);
    const auto records = corpus::read_manifest(min);
    const auto base = fs::path(manifest_path).parent_path();

    std::vector<corpus::HighValueToken> high_value{corpus::weth()};
    if (!high_value_path.empty()) {
        std::ifstream hv(high_value_path);
        if (!hv) throw UsageError("cannot open " + high_value_path);
        high_value = corpus::read_high_value(hv);
    }
    std::map<Address, double> prices;
    if (!prices_path.empty()) {
        for (const auto& [k, v] : read_json_file(prices_path).items()) prices[Address(k)] = v.get<double>();
    }
    const auto edges = parse_edges(edges_text);

    std::vector<std::uint64_t> lifetimes;
    std::vector<corpus::ArtifactDigest> digests;
    nlohmann::json tokens = nlohmann::json::array();
    nlohmann::json errors = nlohmann::json::array();
    double total_profit = 0;
    for (const auto& r : records) {
        const auto in = corpus::load_inputs(r, base);
        for (const auto& e : in.load_errors) errors.push_back({{"token_id", r.token_id}, {"error", e}});
        if (!in.load_errors.empty()) continue;
        nlohmann::json t = {{"token_id", r.token_id}, {"symbol", r.symbol}};
        if (in.events) {
            std::vector<EventRecord> token_events, pool_events;
            for (const auto& e : *in.events) {
                if (e.contract == r.token_id) token_events.push_back(e);
                else pool_events.push_back(e);
            }
            const auto life = corpus::lifetime(token_events, r.creation_block);
            lifetimes.push_back(life);
            t["lifetime"] = life;
            for (const auto& p : r.pools) {
                if (!prices.count(p.paired_token)) continue;
                const auto usd = corpus::profit_usd(pool_events, p.paired_token, prices);
                t["profit_usd"] = usd;
                total_profit += usd;
            }
        }
        if (in.bytecode) {
            digests.push_back({r.token_id, r.creator, corpus::sha256_hex(corpus::normalize_bytecode(*in.bytecode))});
        } else if (in.ast) {
            digests.push_back({r.token_id, r.creator, corpus::sha256_hex(corpus::normalize_source(in.ast->dump()))});
        }
        tokens.push_back(std::move(t));
    }
    nlohmann::json clones = nlohmann::json::array();
    for (const auto& g : corpus::clone_groups(digests)) {
        if (g.tokens.size() > 1) clones.push_back(g);
    }
    emit({{"tokens", tokens},
          {"lifetime_histogram", corpus::histogram(lifetimes, edges)},
          {"clone_groups", clones},
          {"fake_token_matches", corpus::fake_token_matches(records, high_value)},
          {"total_profit_usd", total_profit},
          {"errors", errors}},
         out);
    return errors.empty() ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Trapdoor token lab: synthesize, probe, scan, label, featurize, train, report"};
    app.require_subcommand(1);
    Common common;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--seed", common.seed, "Random seed")->capture_default_str();
        sub->add_option("--threads", common.threads, "Worker threads")->check(CLI::Range(1u, 1024u));
    };

    std::string counts = kDefaultCounts, dir, token, pool, acc = "0.30", ast, manifest, out, mode, truth,
                bytecode, category, data, model, grid, high_value, prices,
                edges = "0,100,1000,10000,100000,199384";
    int switch_distance = 2;
    std::size_t folds = 10, reps = 1;
    double test_fraction = 0.2;
    bool smote = false;

    auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus");
    add_common(synth);
    synth->add_option("--counts", counts, "Class counts, e.g. benign=10,EP=2")->capture_default_str();
    synth->add_option("--out", dir, "Output directory")->required();

    auto* prb = app.add_subcommand("probe", "Buy-and-sell check on a token/pool snapshot");
    add_common(prb);
    prb->add_option("--token", token, "Market snapshot JSON")->required()->check(CLI::ExistingFile);
    prb->add_option("--pool", pool, "Expected pool address");
    prb->add_option("--acc-fee", acc, "Accepted fee, e.g. 0.30 or 3/10")->capture_default_str();
    prb->add_option("--out", out, "Write JSON here instead of stdout");

    auto* scan = app.add_subcommand("scan", "Semantic indicator check of an AST");
    scan->add_option("--ast", ast, "AST document")->required()->check(CLI::ExistingFile);
    scan->add_option("--switch-distance", switch_distance, "Max nesting between switch and end node")
        ->check(CLI::Range(0, 64))
        ->capture_default_str();
    scan->add_option("--out", out, "Write JSON here instead of stdout");

    auto* label = app.add_subcommand("label", "Run the pipeline over a manifest");
    add_common(label);
    label->add_option("--manifest", manifest, "manifest.jsonl")->required()->check(CLI::ExistingFile);
    label->add_option("--acc-fee", acc, "Accepted fee")->capture_default_str();
    label->add_option("--out", out, "Directory for labels, report and datasets");

    auto* feats = app.add_subcommand("features", "Extract a feature dataset");
    add_common(feats);
    feats->add_option("--mode", mode, "opcode or exchange")->required()->check(CLI::IsMember({"opcode", "exchange"}));
    feats->add_option("--manifest", manifest, "Label via the pipeline")->check(CLI::ExistingFile);
    feats->add_option("--truth", truth, "Label from synthetic ground truth")->check(CLI::ExistingFile);
    feats->add_option("--bytecode", bytecode, "Opcode counts of one hex file")->check(CLI::ExistingFile);
    feats->add_option("--category", category, "One-vs-rest target with --truth (EP, ES, AL, FM, IC)");
    feats->add_option("--out", out, "CSV path (stdout if omitted)");

    auto* trn = app.add_subcommand("train", "Grid-search, cross-validate and fit a classifier");
    add_common(trn);
    trn->add_option("--data", data, "Dataset CSV")->required()->check(CLI::ExistingFile);
    trn->add_option("--model", model, "knn, svm_poly, random_forest, gbt")->required();
    trn->add_option("--grid", grid, "Grid JSON or file; default is the built-in grid");
    trn->add_option("--folds", folds, "Cross-validation folds")->check(CLI::Range(std::size_t{1}, std::size_t{100}))
        ->capture_default_str();
    trn->add_option("--test-fraction", test_fraction, "Held-out share")->check(CLI::Range(0.01, 0.99))
        ->capture_default_str();
    trn->add_flag("--smote", smote, "Balance training folds with SMOTE");
    trn->add_option("--repetitions", reps, "Repeat with seeds seed, seed+1, ...")
        ->check(CLI::Range(std::size_t{1}, std::size_t{1000}))
        ->capture_default_str();
    trn->add_option("--out", out, "Write the fitted model here");

    auto* eval = app.add_subcommand("evaluate", "Score a saved model on a dataset");
    eval->add_option("--model", model, "Model JSON")->required()->check(CLI::ExistingFile);
    eval->add_option("--data", data, "Dataset CSV")->required()->check(CLI::ExistingFile);

    auto* rep = app.add_subcommand("report", "Lifetimes, clone groups, fake names and profits");
    rep->add_option("--manifest", manifest, "manifest.jsonl")->required()->check(CLI::ExistingFile);
    rep->add_option("--high-value", high_value, "JSON array of high-value tokens")->check(CLI::ExistingFile);
    rep->add_option("--prices", prices, "JSON object token -> USD per base unit")->check(CLI::ExistingFile);
    rep->add_option("--edges", edges, "Lifetime histogram edges in blocks")->capture_default_str();
    rep->add_option("--out", out, "Write JSON here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*synth) return cmd_synth(common, counts, dir);
        if (*prb) return cmd_probe(token, pool, acc, out);
        if (*scan) return cmd_scan(ast, switch_distance, out);
        if (*label) return cmd_label(common, manifest, acc, out);
        if (*feats) return cmd_features(common, mode, manifest, truth, bytecode, category, out);
        if (*trn) return cmd_train(common, data, model, grid, folds, test_fraction, smote, reps, out);
        if (*eval) return cmd_evaluate(model, data);
        if (*rep) return cmd_report(manifest, high_value, prices, edges, out);
    } catch (const UsageError& e) {
        std::cerr << "tdlab: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "tdlab: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
