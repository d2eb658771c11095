#pragma once

#include <trapdoor/common.hpp>

#include <cstdint>
#include <span>
#include <vector>

namespace trapdoor::mlkit {

struct Confusion {
    std::uint64_t tp = 0, fp = 0, tn = 0, fn = 0;

    std::uint64_t total() const { return tp + fp + tn + fn; }
    bool operator==(const Confusion&) const = default;
};

struct Metrics {
    double accuracy = 0, precision = 0, recall = 0, f1 = 0;
    Confusion confusion;
    // Set when a ratio had a zero denominator and was reported as 0.
    bool precision_undefined = false;
    bool recall_undefined = false;
};

Confusion confusion_of(std::span<const int> truth, std::span<const int> predicted);
Metrics compute_metrics(const Confusion& c);
/// Arithmetic mean of each metric; confusion counts are summed.
Metrics mean_metrics(std::span<const Metrics> runs);

nlohmann::json to_json(const Metrics& m);

} // namespace trapdoor::mlkit
