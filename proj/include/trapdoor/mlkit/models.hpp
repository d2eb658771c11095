#pragma once

#include <trapdoor/mlkit/dataset.hpp>
#include <trapdoor/mlkit/tree.hpp>

#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace trapdoor::mlkit {

enum class ModelKind { knn, svm_poly, random_forest, gradient_boosted_trees };

std::string_view to_string(ModelKind k);
std::optional<ModelKind> parse_model_kind(std::string_view s);

/// Hyperparameters as a flat JSON object, e.g. {"n_estimators": 100}.
using Params = nlohmann::json;

class Model {
public:
    virtual ~Model() = default;

    virtual ModelKind kind() const = 0;
    virtual double predict_proba(std::span<const double> x) const = 0;
    int predict(std::span<const double> x) const { return predict_proba(x) > 0.5 ? 1 : 0; }

    /// Times each feature is used to split, summed over trees. Empty for
    /// models without trees.
    virtual std::vector<std::size_t> split_counts() const { return {}; }

    /// Versioned blob: {"format", "version", "model_kind", "params", "seed", ...}.
    virtual nlohmann::json to_json() const = 0;

    const Params& params() const { return params_; }
    std::uint64_t seed() const { return seed_; }

protected:
    Params params_ = Params::object();
    std::uint64_t seed_ = 0;
};

class GradientBoostedTrees : public Model {
public:
    ModelKind kind() const override { return ModelKind::gradient_boosted_trees; }
    double predict_proba(std::span<const double> x) const override;
    /// Raw margin after the first `n_trees` trees.
    double margin(std::span<const double> x, std::size_t n_trees) const;
    std::size_t size() const { return trees_.size(); }
    std::vector<std::size_t> split_counts() const override;
    nlohmann::json to_json() const override;

    static std::unique_ptr<GradientBoostedTrees> fit(const Params& p, const std::vector<LabeledSample>& s,
                                                     std::uint64_t seed);
    static std::unique_ptr<GradientBoostedTrees> from_json(const nlohmann::json& j);

private:
    double base_ = 0;
    std::size_t dim_ = 0;
    std::vector<Tree> trees_;
};

/// Fits one model. Required keys per kind:
///   knn                     n_neighbors, leaf_size (accepted, no effect)
///   svm_poly                kernel ("linear" | "poly"), degree (poly)
///   random_forest           n_estimators, min_samples_leaf
///   gradient_boosted_trees  learning_rate, n_estimators
/// Throws Error on missing keys or single-class input.
std::unique_ptr<Model> fit_model(ModelKind kind, const Params& params,
                                 const std::vector<LabeledSample>& samples, std::uint64_t seed);

std::unique_ptr<Model> model_from_json(const nlohmann::json& j);

} // namespace trapdoor::mlkit
