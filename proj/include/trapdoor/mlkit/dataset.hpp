#pragma once

#include <trapdoor/common.hpp>

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace trapdoor::mlkit {

struct LabeledSample {
    std::string token_id;
    std::vector<double> features;
    int label = 0;  // 0 or 1

    bool operator==(const LabeledSample&) const = default;
};

struct Dataset {
    std::vector<std::string> feature_names;
    std::vector<LabeledSample> samples;

    std::size_t dim() const { return feature_names.size(); }
    std::size_t count(int label) const;
    /// Throws Error when a row has the wrong width or a label outside {0,1}.
    void validate() const;
    Dataset subset(std::span<const std::size_t> indices) const;
};

/// `token_id,label,<feature columns...>`
void write_csv(std::ostream& out, const Dataset& data);
Dataset read_csv(std::istream& in);

std::string format_number(double v);

} // namespace trapdoor::mlkit
