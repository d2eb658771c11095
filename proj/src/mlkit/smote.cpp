#include <trapdoor/mlkit/smote.hpp>

#include <algorithm>
#include <numeric>
#include <random>

namespace trapdoor::mlkit {

namespace {

double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double t = a[i] - b[i];
        d += t * t;
    }
    return d;
}

/// Indices of the k nearest candidates to `from` (ties broken by index).
std::vector<std::size_t> nearest(const std::vector<LabeledSample>& s, std::size_t from,
                                 const std::vector<std::size_t>& candidates, std::size_t k) {
    std::vector<std::pair<double, std::size_t>> d;
    d.reserve(candidates.size());
    for (auto c : candidates) {
        if (c != from) d.emplace_back(sq_dist(s[from].features, s[c].features), c);
    }
    k = std::min(k, d.size());
    std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k), d.end());
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < k; ++i) out.push_back(d[i].second);
    return out;
}

} // namespace

SmoteResult smote_balance(const std::vector<LabeledSample>& samples, int k, std::uint64_t seed) {
    std::vector<std::size_t> idx[2];
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const int l = samples[i].label;
        if (l != 0 && l != 1) throw Error("smote: labels must be 0 or 1");
        idx[l].push_back(i);
    }
    if (idx[0].empty() || idx[1].empty()) throw Error("smote: both classes must be present");
    if (k < 1 || static_cast<std::size_t>(k) >= samples.size()) {
        throw Error("smote: k must be in [1, sample count)");
    }
    const int minority_label = idx[1].size() < idx[0].size() ? 1 : 0;
    const auto& minority = idx[minority_label];
    const auto& majority = idx[1 - minority_label];

    SmoteResult r;
    r.samples = samples;
    if (minority.size() == majority.size()) return r;
    if (minority.size() < 2) throw Error("smote: minority class needs at least 2 samples");

    std::vector<std::size_t> all(samples.size());
    std::iota(all.begin(), all.end(), 0);
    std::vector<std::size_t> bases;
    for (auto m : minority) {
        const auto nn = nearest(samples, m, all, static_cast<std::size_t>(k));
        const auto n_major = std::count_if(nn.begin(), nn.end(), [&](std::size_t j) {
            return samples[j].label != minority_label;
        });
        if (2 * static_cast<std::size_t>(n_major) > nn.size()) bases.push_back(m);
    }
    if (bases.empty()) {
        bases = minority;
        r.fell_back = true;
    }
    r.borderline = r.fell_back ? 0 : bases.size();

    const std::size_t kk = std::min<std::size_t>(static_cast<std::size_t>(k), minority.size() - 1);
    std::vector<std::vector<std::size_t>> neighbours;
    neighbours.reserve(bases.size());
    for (auto b : bases) neighbours.push_back(nearest(samples, b, minority, kk));

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::size_t needed = majority.size() - minority.size();
    const std::size_t dim = samples.front().features.size();
    for (std::size_t n = 0; n < needed; ++n) {
        const std::size_t bi = n % bases.size();
        const auto& nb = neighbours[bi];
        std::uniform_int_distribution<std::size_t> pick(0, nb.size() - 1);
        const std::size_t other = nb[pick(rng)];
        const double lambda = unit(rng);
        const auto& x = samples[bases[bi]].features;
        const auto& y = samples[other].features;
        LabeledSample s;
        s.token_id = "smote-" + std::to_string(n);
        s.label = minority_label;
        s.features.resize(dim);
        for (std::size_t j = 0; j < dim; ++j) s.features[j] = x[j] + lambda * (y[j] - x[j]);
        r.samples.push_back(std::move(s));
        r.origins.push_back({bases[bi], other, lambda});
    }
    return r;
}

} // namespace trapdoor::mlkit
