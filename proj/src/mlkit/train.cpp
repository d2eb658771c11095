#include <trapdoor/mlkit/train.hpp>

#include <trapdoor/mlkit/smote.hpp>
#include <trapdoor/parallel.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

namespace trapdoor::mlkit {

namespace {

std::vector<std::size_t> class_indices(std::span<const int> labels, int c) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == c) out.push_back(i);
    }
    return out;
}

std::vector<int> labels_of(const std::vector<LabeledSample>& s) {
    std::vector<int> l;
    l.reserve(s.size());
    for (const auto& x : s) l.push_back(x.label);
    return l;
}

std::vector<LabeledSample> pick(const std::vector<LabeledSample>& s, std::span<const std::size_t> idx) {
    std::vector<LabeledSample> out;
    out.reserve(idx.size());
    for (auto i : idx) out.push_back(s[i]);
    return out;
}

std::vector<LabeledSample> maybe_smote(std::vector<LabeledSample> s, const TrainOptions& o,
                                       std::uint64_t seed) {
    if (!o.smote) return s;
    std::size_t pos = 0;
    for (const auto& x : s) pos += x.label == 1;
    const std::size_t neg = s.size() - pos;
    if (pos == neg || std::min(pos, neg) < 2) return s;
    const int k = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(o.smote_k), s.size() - 1));
    return smote_balance(s, k, seed).samples;
}

bool has_both(const std::vector<LabeledSample>& s) {
    bool seen[2] = {false, false};
    for (const auto& x : s) seen[x.label] = true;
    return seen[0] && seen[1];
}

double f1_of(std::span<const int> truth, std::span<const int> pred) {
    return compute_metrics(confusion_of(truth, pred)).f1;
}

// Scores every configuration on one fold. Boosted configurations that differ
// only in n_estimators share one fit and are scored on tree-count prefixes.
std::vector<double> score_fold(const std::vector<LabeledSample>& train_s,
                               const std::vector<LabeledSample>& test_s, ModelKind kind,
                               const std::vector<Params>& grid, std::uint64_t seed) {
    std::vector<double> f1(grid.size(), 0.0);
    const auto truth = labels_of(test_s);
    std::vector<int> pred(test_s.size());
    if (kind != ModelKind::gradient_boosted_trees) {
        for (std::size_t c = 0; c < grid.size(); ++c) {
            const auto m = fit_model(kind, grid[c], train_s, seed);
            for (std::size_t i = 0; i < test_s.size(); ++i) pred[i] = m->predict(test_s[i].features);
            f1[c] = f1_of(truth, pred);
        }
        return f1;
    }
    std::map<std::string, std::vector<std::size_t>> groups;
    for (std::size_t c = 0; c < grid.size(); ++c) {
        Params key = grid[c];
        key.erase("n_estimators");
        groups[key.dump()].push_back(c);
    }
    for (const auto& [_, members] : groups) {
        std::size_t most = 0;
        for (auto c : members) most = std::max(most, grid[c].at("n_estimators").get<std::size_t>());
        Params p = grid[members.front()];
        p["n_estimators"] = most;
        const auto m = GradientBoostedTrees::fit(p, train_s, seed);
        for (auto c : members) {
            const auto n = grid[c].at("n_estimators").get<std::size_t>();
            for (std::size_t i = 0; i < test_s.size(); ++i) {
                pred[i] = m->margin(test_s[i].features, n) > 0 ? 1 : 0;
            }
            f1[c] = f1_of(truth, pred);
        }
    }
    return f1;
}

} // namespace

std::vector<Params> default_grid(ModelKind kind) {
    switch (kind) {
    case ModelKind::knn:
        return expand_grid({{"n_neighbors", {5, 10, 15}}, {"leaf_size", {10, 50, 100}}});
    case ModelKind::svm_poly: {
        std::vector<Params> g{{{"kernel", "linear"}}};
        for (int d : {2, 3, 4, 5}) g.push_back({{"kernel", "poly"}, {"degree", d}});
        return g;
    }
    case ModelKind::random_forest:
        return expand_grid({{"n_estimators", {50, 100, 200}}, {"min_samples_leaf", {5, 10, 50}}});
    case ModelKind::gradient_boosted_trees:
        return expand_grid({{"learning_rate", {0.1, 0.2, 0.5}}, {"n_estimators", {50, 100, 500}}});
    }
    return {};
}

std::vector<Params> expand_grid(const nlohmann::json& axes) {
    if (!axes.is_object()) throw Error("grid must be a JSON object");
    std::vector<Params> out{Params::object()};
    for (const auto& [key, values] : axes.items()) {
        const auto choices = values.is_array() ? values : nlohmann::json::array({values});
        if (choices.empty()) throw Error("grid axis " + key + " is empty");
        std::vector<Params> next;
        for (const auto& base : out) {
            for (const auto& v : choices) {
                Params p = base;
                p[key] = v;
                next.push_back(std::move(p));
            }
        }
        out = std::move(next);
    }
    return out;
}

void validate_grid(ModelKind kind, const std::vector<Params>& grid) {
    if (grid.empty()) throw Error("empty hyperparameter grid");
    std::vector<const char*> keys;
    switch (kind) {
    case ModelKind::knn: keys = {"n_neighbors", "leaf_size"}; break;
    case ModelKind::svm_poly: keys = {"kernel"}; break;
    case ModelKind::random_forest: keys = {"n_estimators", "min_samples_leaf"}; break;
    case ModelKind::gradient_boosted_trees: keys = {"learning_rate", "n_estimators"}; break;
    }
    for (const auto& p : grid) {
        if (!p.is_object()) throw Error("grid entry is not an object");
        for (const char* k : keys) {
            if (!p.contains(k)) throw Error(std::string("grid entry lacks ") + k);
        }
        if (kind == ModelKind::svm_poly && p.at("kernel") == "poly" && !p.contains("degree")) {
            throw Error("poly kernel needs degree");
        }
    }
}

Split stratified_split(std::span<const int> labels, double test_fraction, std::uint64_t seed) {
    if (test_fraction < 0 || test_fraction >= 1) throw Error("test_fraction must be in [0, 1)");
    std::mt19937_64 rng(seed);
    Split s;
    for (int c : {0, 1}) {
        auto idx = class_indices(labels, c);
        std::shuffle(idx.begin(), idx.end(), rng);
        auto n_test = static_cast<std::size_t>(std::lround(static_cast<double>(idx.size()) * test_fraction));
        if (test_fraction > 0 && idx.size() >= 2) n_test = std::clamp<std::size_t>(n_test, 1, idx.size() - 1);
        s.test.insert(s.test.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_test));
        s.train.insert(s.train.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_test), idx.end());
    }
    std::sort(s.train.begin(), s.train.end());
    std::sort(s.test.begin(), s.test.end());
    return s;
}

std::vector<std::vector<std::size_t>> stratified_folds(std::span<const int> labels, std::size_t k,
                                                       std::uint64_t seed) {
    if (k < 2) throw Error("need at least 2 folds");
    std::mt19937_64 rng(seed);
    std::vector<std::vector<std::size_t>> folds(k);
    std::size_t slot = 0;
    for (int c : {0, 1}) {
        auto idx = class_indices(labels, c);
        std::shuffle(idx.begin(), idx.end(), rng);
        for (auto i : idx) folds[slot++ % k].push_back(i);
    }
    for (auto& f : folds) std::sort(f.begin(), f.end());
    return folds;
}

TrainResult train(const std::vector<LabeledSample>& samples, ModelKind kind,
                  const std::vector<Params>& grid, const TrainOptions& options) {
    validate_grid(kind, grid);
    if (!has_both(samples)) throw Error("training data must contain both classes");
    const auto labels = labels_of(samples);

    TrainResult r;
    r.split = stratified_split(labels, options.test_fraction, options.seed);
    const auto train_s = pick(samples, r.split.train);
    const auto train_labels = labels_of(train_s);

    std::size_t smallest = train_s.size();
    for (int c : {0, 1}) smallest = std::min(smallest, class_indices(train_labels, c).size());
    r.folds_used = std::min(options.folds, smallest);

    std::vector<double> mean(grid.size(), 0.0);
    if (r.folds_used >= 2 && grid.size() > 1) {
        const auto folds = stratified_folds(train_labels, r.folds_used, options.seed);
        std::vector<std::vector<double>> per_fold(folds.size());
        const unsigned threads = options.threads ? options.threads : default_threads();
        parallel_for(folds.size(), threads, [&](std::size_t f) {
            std::vector<std::size_t> fit_idx;
            for (std::size_t g = 0; g < folds.size(); ++g) {
                if (g != f) fit_idx.insert(fit_idx.end(), folds[g].begin(), folds[g].end());
            }
            std::sort(fit_idx.begin(), fit_idx.end());
            const auto fold_seed = options.seed + 1000003ULL * (f + 1);
            const auto fit_s = maybe_smote(pick(train_s, fit_idx), options, fold_seed);
            per_fold[f] = score_fold(fit_s, pick(train_s, folds[f]), kind, grid, fold_seed);
        });
        for (const auto& f : per_fold) {
            for (std::size_t c = 0; c < grid.size(); ++c) mean[c] += f[c] / static_cast<double>(per_fold.size());
        }
    } else {
        r.folds_used = 0;
    }

    std::size_t best = 0;
    for (std::size_t c = 0; c < grid.size(); ++c) {
        r.scores.push_back({grid[c], mean[c]});
        if (mean[c] > mean[best]) best = c;
    }
    r.best = grid[best];
    r.model = fit_model(kind, r.best, maybe_smote(train_s, options, options.seed), options.seed);
    if (!r.split.test.empty()) r.test_metrics = evaluate(*r.model, pick(samples, r.split.test));
    return r;
}

Metrics evaluate(const Model& model, const std::vector<LabeledSample>& samples) {
    if (samples.empty()) throw Error("evaluate: empty test set");
    std::vector<int> truth, pred;
    for (const auto& s : samples) {
        truth.push_back(s.label);
        pred.push_back(model.predict(s.features));
    }
    return compute_metrics(confusion_of(truth, pred));
}

RepeatedResult repeated_experiment(const std::vector<LabeledSample>& samples, ModelKind kind,
                                   const std::vector<Params>& grid, const TrainOptions& options,
                                   std::size_t repetitions) {
    RepeatedResult out;
    std::vector<Metrics> runs;
    for (std::size_t rep = 0; rep < repetitions; ++rep) {
        TrainOptions o = options;
        o.seed = options.seed + rep;
        auto r = train(samples, kind, grid, o);
        runs.push_back(r.test_metrics);
        const auto counts = r.model->split_counts();
        if (out.split_counts.size() < counts.size()) out.split_counts.resize(counts.size(), 0);
        for (std::size_t j = 0; j < counts.size(); ++j) out.split_counts[j] += counts[j];
        out.runs.push_back(std::move(r));
    }
    if (!runs.empty()) out.mean = mean_metrics(runs);
    return out;
}

std::vector<double> feature_importance(std::span<const std::size_t> split_counts) {
    const double total = static_cast<double>(std::accumulate(split_counts.begin(), split_counts.end(), std::size_t{0}));
    std::vector<double> out(split_counts.size(), 0.0);
    if (total == 0) return out;
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = static_cast<double>(split_counts[j]) / total;
    return out;
}

nlohmann::json to_json(const TrainResult& r) {
    nlohmann::json scores = nlohmann::json::array();
    for (const auto& s : r.scores) scores.push_back({{"params", s.params}, {"mean_f1", s.mean_f1}});
    return {{"best", r.best},
            {"cv_scores", scores},
            {"folds_used", r.folds_used},
            {"train_size", r.split.train.size()},
            {"test_size", r.split.test.size()},
            {"test_metrics", to_json(r.test_metrics)}};
}

} // namespace trapdoor::mlkit
