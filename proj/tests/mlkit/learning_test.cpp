#include <trapdoor/mlkit/metrics.hpp>
#include <trapdoor/mlkit/models.hpp>
#include <trapdoor/mlkit/smote.hpp>
#include <trapdoor/mlkit/train.hpp>

#include <oracles.hpp>

#include <gtest/gtest.h>

#include <random>
#include <set>

using namespace trapdoor;
using namespace trapdoor::mlkit;

namespace {

std::vector<LabeledSample> blobs(std::size_t majority, std::size_t minority, std::uint64_t seed,
                                 double gap = 3.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<LabeledSample> out;
    for (std::size_t i = 0; i < majority + minority; ++i) {
        const int label = i < majority ? 0 : 1;
        const double c = label ? gap : 0.0;
        out.push_back({"0x" + std::to_string(i), {c + noise(rng), c + noise(rng), noise(rng)}, label});
    }
    return out;
}

std::size_t count_label(const std::vector<LabeledSample>& s, int label) {
    return static_cast<std::size_t>(
        std::count_if(s.begin(), s.end(), [&](const LabeledSample& x) { return x.label == label; }));
}

} // namespace

TEST(Smote, BalancesCountsExactly) {
    auto s = blobs(10, 4, 1, 1.0);
    const auto r = smote_balance(s, 3, 9);
    EXPECT_EQ(count_label(r.samples, 0), 10u);
    EXPECT_EQ(count_label(r.samples, 1), 10u);
    EXPECT_EQ(r.origins.size(), 6u);
    for (std::size_t i = 0; i < s.size(); ++i) EXPECT_EQ(r.samples[i], s[i]);
}

TEST(Smote, TwoPointsInterpolateOnTheDiagonal) {
    std::vector<LabeledSample> s{{"a", {0, 0}, 1}, {"b", {1, 1}, 1}};
    for (int i = 0; i < 6; ++i) s.push_back({"m" + std::to_string(i), {5.0 + i, -3.0}, 0});
    const auto r = smote_balance(s, 1, 4);
    ASSERT_EQ(count_label(r.samples, 1), 6u);
    for (std::size_t i = s.size(); i < r.samples.size(); ++i) {
        const auto& p = r.samples[i].features;
        EXPECT_NEAR(p[0], p[1], 1e-12);
        EXPECT_GE(p[0], 0.0);
        EXPECT_LE(p[0], 1.0);
    }
}

TEST(Smote, BalancedInputUnchanged) {
    const auto s = blobs(8, 8, 2);
    const auto r = smote_balance(s, 3, 1);
    EXPECT_EQ(r.samples, s);
    EXPECT_TRUE(r.origins.empty());
}

TEST(Smote, SyntheticPointsAreConvexCombinations) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto s = blobs(60, 9, seed, 1.5);
        std::vector<std::vector<double>> minority;
        for (const auto& x : s) {
            if (x.label == 1) minority.push_back(x.features);
        }
        const auto r = smote_balance(s, 5, seed);
        ASSERT_EQ(count_label(r.samples, 1), 60u);
        for (std::size_t i = s.size(); i < r.samples.size(); ++i) {
            ASSERT_EQ(r.samples[i].label, 1);
            ASSERT_LT(oracle::best_pair_residual(r.samples[i].features, minority), 1e-9);
        }
        for (const auto& o : r.origins) {
            EXPECT_EQ(s[o.base].label, 1);
            EXPECT_EQ(s[o.neighbor].label, 1);
            EXPECT_NE(o.base, o.neighbor);
            EXPECT_GE(o.lambda, 0.0);
            EXPECT_LE(o.lambda, 1.0);
        }
    }
}

TEST(Smote, DeterministicPerSeed) {
    const auto s = blobs(40, 7, 3, 1.0);
    EXPECT_EQ(smote_balance(s, 5, 11).samples, smote_balance(s, 5, 11).samples);
    EXPECT_NE(smote_balance(s, 5, 11).samples, smote_balance(s, 5, 12).samples);
}

TEST(Smote, RejectsDegenerateInput) {
    EXPECT_THROW(smote_balance(blobs(5, 0, 1), 3, 0), Error);
    EXPECT_THROW(smote_balance(blobs(5, 1, 1), 3, 0), Error);
    EXPECT_THROW(smote_balance(blobs(3, 2, 1), 5, 0), Error);
}

TEST(Metrics, HandComputedConfusion) {
    const Confusion c{8, 2, 9, 1};
    const auto m = compute_metrics(c);
    EXPECT_DOUBLE_EQ(m.accuracy, 17.0 / 20.0);
    EXPECT_DOUBLE_EQ(m.precision, 0.8);
    EXPECT_DOUBLE_EQ(m.recall, 8.0 / 9.0);
    EXPECT_NEAR(m.f1, 16.0 / 19.0, 1e-12);
}

TEST(Metrics, PerfectAndAllPositive) {
    const std::vector<int> truth{1, 0, 1, 0, 0};
    const auto perfect = compute_metrics(confusion_of(truth, truth));
    EXPECT_EQ(perfect.accuracy, 1.0);
    EXPECT_EQ(perfect.f1, 1.0);

    const std::vector<int> ones(5, 1);
    const auto all_pos = compute_metrics(confusion_of(truth, ones));
    EXPECT_DOUBLE_EQ(all_pos.precision, 0.4);
    EXPECT_EQ(all_pos.recall, 1.0);

    const std::vector<int> zeros(5, 0);
    const auto none = compute_metrics(confusion_of(truth, zeros));
    EXPECT_TRUE(none.precision_undefined);
    EXPECT_EQ(none.f1, 0.0);
}

TEST(Metrics, MatchHandCountOnRandomLabels) {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 500; ++i) {
        const auto n = std::uniform_int_distribution<std::size_t>(1, 60)(rng);
        std::vector<int> truth(n), pred(n);
        for (std::size_t j = 0; j < n; ++j) {
            truth[j] = static_cast<int>(rng() & 1);
            pred[j] = static_cast<int>(rng() & 1);
        }
        const auto m = compute_metrics(confusion_of(truth, pred));
        const auto h = oracle::metrics_by_hand(truth, pred);
        ASSERT_NEAR(m.accuracy, h.accuracy, 1e-12);
        ASSERT_NEAR(m.precision, h.precision, 1e-12);
        ASSERT_NEAR(m.recall, h.recall, 1e-12);
        ASSERT_NEAR(m.f1, h.f1, 1e-12);
    }
}

TEST(Metrics, MeanSumsConfusion) {
    const std::vector<Metrics> runs{compute_metrics({1, 0, 1, 0}), compute_metrics({0, 1, 0, 1})};
    const auto m = mean_metrics(runs);
    EXPECT_DOUBLE_EQ(m.accuracy, 0.5);
    EXPECT_EQ(m.confusion, (Confusion{1, 1, 1, 1}));
}

TEST(Grids, PresetSizesAndExpansion) {
    EXPECT_EQ(default_grid(ModelKind::random_forest).size(), 9u);
    EXPECT_EQ(default_grid(ModelKind::gradient_boosted_trees).size(), 9u);
    EXPECT_EQ(default_grid(ModelKind::knn).size(), 9u);
    EXPECT_EQ(default_grid(ModelKind::svm_poly).size(), 5u);

    const auto g = expand_grid(nlohmann::json::parse(R"({"a":[1,2],"b":[3,4,5],"c":7})"));
    ASSERT_EQ(g.size(), 6u);
    EXPECT_EQ(g[0], nlohmann::json::parse(R"({"a":1,"b":3,"c":7})"));
    EXPECT_EQ(g[5], nlohmann::json::parse(R"({"a":2,"b":5,"c":7})"));
    EXPECT_THROW(expand_grid(nlohmann::json::parse(R"({"a":[]})")), Error);
    EXPECT_THROW(validate_grid(ModelKind::gradient_boosted_trees, {nlohmann::json{{"learning_rate", 0.1}}}),
                 Error);
    EXPECT_EQ(parse_model_kind("random_forest"), ModelKind::random_forest);
    EXPECT_FALSE(parse_model_kind("xgboost"));
}

TEST(Splits, StratifiedSplitAndFolds) {
    std::vector<int> labels(50, 0);
    for (std::size_t i = 0; i < 10; ++i) labels[i * 5] = 1;
    const auto sp = stratified_split(labels, 0.2, 3);
    EXPECT_EQ(sp.train.size() + sp.test.size(), labels.size());
    std::size_t test_pos = 0;
    for (auto i : sp.test) test_pos += static_cast<std::size_t>(labels[i]);
    EXPECT_EQ(test_pos, 2u);
    EXPECT_EQ(sp.test.size(), 10u);

    const auto folds = stratified_folds(labels, 5, 3);
    ASSERT_EQ(folds.size(), 5u);
    std::set<std::size_t> seen;
    for (const auto& f : folds) {
        std::size_t pos = 0;
        for (auto i : f) {
            EXPECT_TRUE(seen.insert(i).second);
            pos += static_cast<std::size_t>(labels[i]);
        }
        EXPECT_EQ(pos, 2u);
    }
    EXPECT_EQ(seen.size(), labels.size());
}

TEST(Models, BoostedTreesFitSeparableData) {
    const auto s = blobs(40, 40, 8, 8.0);
    const auto m = fit_model(ModelKind::gradient_boosted_trees,
                             {{"learning_rate", 0.1}, {"n_estimators", 50}}, s, 1);
    EXPECT_EQ(evaluate(*m, s).accuracy, 1.0);
    const auto again = fit_model(ModelKind::gradient_boosted_trees,
                                 {{"learning_rate", 0.1}, {"n_estimators", 50}}, s, 1);
    EXPECT_EQ(m->to_json(), again->to_json());

    const auto back = model_from_json(m->to_json());
    for (const auto& x : s) EXPECT_EQ(back->predict_proba(x.features), m->predict_proba(x.features));
    EXPECT_THROW(fit_model(ModelKind::gradient_boosted_trees, {{"learning_rate", 0.1}, {"n_estimators", 5}},
                           blobs(10, 0, 1), 1),
                 Error);
}

TEST(Models, EveryKindLearnsBlobs) {
    const auto s = blobs(60, 60, 9, 5.0);
    for (auto kind : {ModelKind::knn, ModelKind::svm_poly, ModelKind::random_forest,
                      ModelKind::gradient_boosted_trees}) {
        const auto m = fit_model(kind, default_grid(kind).front(), s, 2);
        EXPECT_GE(evaluate(*m, s).accuracy, 0.95) << to_string(kind);
        const auto back = model_from_json(m->to_json());
        EXPECT_EQ(back->kind(), kind);
        EXPECT_EQ(back->predict(s[0].features), m->predict(s[0].features));
    }
}

TEST(Train, RepeatedExperimentIsSeeded) {
    const auto s = blobs(80, 20, 10, 4.0);
    TrainOptions opt;
    opt.folds = 3;
    opt.smote = true;
    opt.seed = 4;
    opt.threads = 1;
    const auto grid = expand_grid(nlohmann::json::parse(R"({"n_estimators":[20,40],"min_samples_leaf":[5]})"));
    const auto a = repeated_experiment(s, ModelKind::random_forest, grid, opt, 3);
    const auto b = repeated_experiment(s, ModelKind::random_forest, grid, opt, 3);
    ASSERT_EQ(a.runs.size(), 3u);
    EXPECT_EQ(a.mean.f1, b.mean.f1);
    EXPECT_GE(a.mean.f1, 0.9);
    EXPECT_EQ(a.runs[0].scores.size(), 2u);
    EXPECT_EQ(a.runs[0].folds_used, 3u);
    const auto imp = feature_importance(a.split_counts);
    double sum = 0;
    for (double v : imp) sum += v;
    EXPECT_NEAR(sum, 1.0, 1e-12);
}
