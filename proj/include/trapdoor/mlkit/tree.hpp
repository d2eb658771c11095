#pragma once

#include <trapdoor/mlkit/dataset.hpp>

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace trapdoor::mlkit {

struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;  // row-major

    std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }
    static Matrix from_samples(const std::vector<LabeledSample>& samples);
};

/// Per-feature thresholds. Bin b of feature j holds values <= edges[j][b];
/// the last bin is open-ended. Constant features get a single bin.
class Binner {
public:
    Binner() = default;
    Binner(const Matrix& x, int max_bins = 64);

    std::uint8_t bin(std::size_t feature, double v) const;
    std::size_t bins(std::size_t feature) const { return edges_[feature].size() + 1; }
    double threshold(std::size_t feature, std::size_t bin) const { return edges_[feature][bin]; }
    std::size_t features() const { return edges_.size(); }

private:
    std::vector<std::vector<double>> edges_;
};

struct BinnedMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::uint8_t> bins;  // row-major

    static BinnedMatrix from(const Matrix& x, const Binner& binner);
};

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0;
    int left = -1;
    int right = -1;
    double value = 0;
};

struct Tree {
    std::vector<TreeNode> nodes;

    double predict(std::span<const double> x) const;
    void count_splits(std::vector<std::size_t>& counts) const;
    nlohmann::json to_json() const;
    static Tree from_json(const nlohmann::json& j);
};

struct TreeParams {
    int max_depth = 3;
    std::size_t min_samples_leaf = 1;
    double min_child_weight = 1e-3;
    double lambda = 1.0;
    std::size_t max_features = 0;  // 0 = all features at every node
    double leaf_scale = 1.0;       // multiplies leaf values (learning rate)
};

/// Second-order tree: leaf value -G/(H + lambda), split gain
/// G_L^2/(H_L+lambda) + G_R^2/(H_R+lambda) - G^2/(H+lambda).
/// With g = -y, h = 1 and lambda = 0 this is a variance (Gini) CART whose
/// leaves hold class frequencies. `samples` may repeat indices (bootstrap).
Tree build_tree(const BinnedMatrix& x, const Binner& binner, std::span<const std::size_t> samples,
                std::span<const double> g, std::span<const double> h, const TreeParams& params,
                std::mt19937_64& rng);

} // namespace trapdoor::mlkit
