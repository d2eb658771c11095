#pragma once

#include <trapdoor/mlkit/metrics.hpp>
#include <trapdoor/mlkit/models.hpp>

#include <cstdint>
#include <memory>
#include <vector>

namespace trapdoor::mlkit {

/// Hyperparameter grid for a model kind:
///   knn            n_neighbors {5,10,15} x leaf_size {10,50,100}
///   svm_poly       kernel linear, poly with degree {2,3,4,5}
///   random_forest  n_estimators {50,100,200} x min_samples_leaf {5,10,50}
///   gbt            learning_rate {0.1,0.2,0.5} x n_estimators {50,100,500}
std::vector<Params> default_grid(ModelKind kind);

/// Cartesian product of {"name": [values...]} in key order. A non-array value
/// is a single choice. Throws Error on an empty axis.
std::vector<Params> expand_grid(const nlohmann::json& axes);

/// Throws Error when the grid is empty or a configuration lacks a key the
/// model needs.
void validate_grid(ModelKind kind, const std::vector<Params>& grid);

struct Split {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

/// Per-class shuffled split; each class contributes round(n_c * test_fraction)
/// samples to the test side, at least one when the class has two or more.
Split stratified_split(std::span<const int> labels, double test_fraction, std::uint64_t seed);

/// Test-index sets of k stratified folds. Every index lands in exactly one fold.
std::vector<std::vector<std::size_t>> stratified_folds(std::span<const int> labels, std::size_t k,
                                                       std::uint64_t seed);

struct TrainOptions {
    std::size_t folds = 10;
    double test_fraction = 0.2;
    bool smote = false;
    int smote_k = 5;
    std::uint64_t seed = 0;
    unsigned threads = 0;  // 0 = hardware concurrency
};

struct ConfigScore {
    Params params;
    double mean_f1 = 0;
};

struct TrainResult {
    std::shared_ptr<const Model> model;  // refit on the whole training side
    Params best;
    std::vector<ConfigScore> scores;     // grid order
    std::size_t folds_used = 0;          // may be below TrainOptions::folds
    Split split;
    Metrics test_metrics;
};

/// Split, cross-validate every configuration on the training side by mean F1
/// (first best wins ties), refit and score on the held-out side.
TrainResult train(const std::vector<LabeledSample>& samples, ModelKind kind,
                  const std::vector<Params>& grid, const TrainOptions& options);

Metrics evaluate(const Model& model, const std::vector<LabeledSample>& samples);

struct RepeatedResult {
    std::vector<TrainResult> runs;
    Metrics mean;
    std::vector<std::size_t> split_counts;  // summed over runs
};

/// `repetitions` calls of train() with seeds seed, seed+1, ...
RepeatedResult repeated_experiment(const std::vector<LabeledSample>& samples, ModelKind kind,
                                   const std::vector<Params>& grid, const TrainOptions& options,
                                   std::size_t repetitions = 10);

/// Split counts normalized to sum to 1 (all zeros for models without trees).
std::vector<double> feature_importance(std::span<const std::size_t> split_counts);

nlohmann::json to_json(const TrainResult& r);

} // namespace trapdoor::mlkit
