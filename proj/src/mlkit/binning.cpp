#include <trapdoor/mlkit/tree.hpp>

#include <algorithm>

namespace trapdoor::mlkit {

Matrix Matrix::from_samples(const std::vector<LabeledSample>& samples) {
    Matrix m;
    m.rows = samples.size();
    m.cols = samples.empty() ? 0 : samples.front().features.size();
    m.data.reserve(m.rows * m.cols);
    for (const auto& s : samples) {
        if (s.features.size() != m.cols) throw Error("ragged feature matrix");
        m.data.insert(m.data.end(), s.features.begin(), s.features.end());
    }
    return m;
}

Binner::Binner(const Matrix& x, int max_bins) {
    max_bins = std::clamp(max_bins, 2, 256);
    edges_.resize(x.cols);
    std::vector<double> col(x.rows);
    for (std::size_t j = 0; j < x.cols; ++j) {
        for (std::size_t i = 0; i < x.rows; ++i) col[i] = x.data[i * x.cols + j];
        std::sort(col.begin(), col.end());
        std::vector<double> uniq = col;
        uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
        auto& e = edges_[j];
        if (uniq.size() <= static_cast<std::size_t>(max_bins)) {
            for (std::size_t u = 0; u + 1 < uniq.size(); ++u) e.push_back((uniq[u] + uniq[u + 1]) / 2);
        } else {
            for (int q = 1; q < max_bins; ++q) {
                const double v = col[static_cast<std::size_t>(q) * col.size() / static_cast<std::size_t>(max_bins)];
                if (v < uniq.back() && (e.empty() || v > e.back())) e.push_back(v);
            }
        }
    }
}

std::uint8_t Binner::bin(std::size_t feature, double v) const {
    const auto& e = edges_[feature];
    return static_cast<std::uint8_t>(std::lower_bound(e.begin(), e.end(), v) - e.begin());
}

BinnedMatrix BinnedMatrix::from(const Matrix& x, const Binner& binner) {
    if (x.cols != binner.features()) throw Error("binner width mismatch");
    BinnedMatrix b;
    b.rows = x.rows;
    b.cols = x.cols;
    b.bins.resize(x.rows * x.cols);
    for (std::size_t i = 0; i < x.rows; ++i) {
        for (std::size_t j = 0; j < x.cols; ++j) b.bins[i * x.cols + j] = binner.bin(j, x.data[i * x.cols + j]);
    }
    return b;
}

} // namespace trapdoor::mlkit
