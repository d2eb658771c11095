#pragma once

#include <trapdoor/mlkit/dataset.hpp>

#include <cstdint>
#include <vector>

namespace trapdoor::mlkit {

struct SyntheticOrigin {
    std::size_t base = 0;      // index into the input samples
    std::size_t neighbor = 0;  // index into the input samples
    double lambda = 0;
};

struct SmoteResult {
    std::vector<LabeledSample> samples;  // inputs first, then synthetic points
    std::vector<SyntheticOrigin> origins;  // one per synthetic point
    std::size_t borderline = 0;           // minority samples used as bases
    bool fell_back = false;               // no borderline sample; all minority used
};

/// Borderline oversampling. A minority sample is a base when more than half
/// of its k nearest neighbours (Euclidean, whole set) are majority. Each
/// synthetic point is x + lambda * (x' - x) with x' one of the k nearest
/// minority neighbours of x and lambda uniform in [0, 1].
/// Throws Error when a class is empty, the minority has fewer than 2 samples
/// or k >= sample count.
SmoteResult smote_balance(const std::vector<LabeledSample>& samples, int k, std::uint64_t seed);

} // namespace trapdoor::mlkit
