#include <trapdoor/mlkit/tree.hpp>

#include <algorithm>
#include <numeric>

namespace trapdoor::mlkit {

namespace {

struct BinStat {
    double g = 0;
    double h = 0;
    std::size_t n = 0;
};

struct Split {
    double gain = 0;
    std::size_t feature = 0;
    std::size_t bin = 0;
    bool found = false;
};

class Builder {
public:
    Builder(const BinnedMatrix& x, const Binner& binner, std::span<const double> g,
            std::span<const double> h, const TreeParams& p, std::mt19937_64& rng)
        : x_(x), binner_(binner), g_(g), h_(h), p_(p), rng_(rng) {
        offset_.resize(x.cols + 1, 0);
        for (std::size_t j = 0; j < x.cols; ++j) {
            offset_[j + 1] = offset_[j] + binner.bins(j);
            if (binner.bins(j) > 1) active_.push_back(j);
        }
    }

    Tree build(std::vector<std::size_t> samples) {
        Tree t;
        t.nodes.emplace_back();
        auto hist = histogram(samples);
        grow(t, 0, std::move(samples), std::move(hist), 0);
        return t;
    }

private:
    std::vector<BinStat> histogram(const std::vector<std::size_t>& samples) const {
        std::vector<BinStat> hist(offset_.back());
        for (auto i : samples) {
            const std::uint8_t* row = &x_.bins[i * x_.cols];
            const double gi = g_[i];
            const double hi = h_[i];
            for (auto j : active_) {
                auto& b = hist[offset_[j] + row[j]];
                b.g += gi;
                b.h += hi;
                ++b.n;
            }
        }
        return hist;
    }

    double score(double g, double h) const { return g * g / (h + p_.lambda); }

    Split best_split(const std::vector<BinStat>& hist, const BinStat& total) {
        std::vector<std::size_t> features = active_;
        if (p_.max_features > 0 && p_.max_features < features.size()) {
            // partial Fisher-Yates
            for (std::size_t k = 0; k < p_.max_features; ++k) {
                std::uniform_int_distribution<std::size_t> d(k, features.size() - 1);
                std::swap(features[k], features[d(rng_)]);
            }
            features.resize(p_.max_features);
            std::sort(features.begin(), features.end());
        }
        Split best;
        const double parent = score(total.g, total.h);
        for (auto j : features) {
            BinStat left;
            const std::size_t nb = binner_.bins(j);
            for (std::size_t b = 0; b + 1 < nb; ++b) {
                const auto& s = hist[offset_[j] + b];
                left.g += s.g;
                left.h += s.h;
                left.n += s.n;
                if (s.n == 0) continue;
                const std::size_t n_right = total.n - left.n;
                if (left.n < p_.min_samples_leaf || n_right < p_.min_samples_leaf) continue;
                const double h_right = total.h - left.h;
                if (left.h < p_.min_child_weight || h_right < p_.min_child_weight) continue;
                const double gain = score(left.g, left.h) + score(total.g - left.g, h_right) - parent;
                if (gain > best.gain + 1e-12) best = {gain, j, b, true};
            }
        }
        return best;
    }

    void grow(Tree& t, int node, std::vector<std::size_t> samples, std::vector<BinStat> hist,
              int depth) {
        BinStat total;
        for (auto i : samples) {
            total.g += g_[i];
            total.h += h_[i];
        }
        total.n = samples.size();
        t.nodes[node].value = -total.g / (total.h + p_.lambda) * p_.leaf_scale;
        if (depth >= p_.max_depth || samples.size() < 2 * std::max<std::size_t>(1, p_.min_samples_leaf)) {
            return;
        }
        const Split s = best_split(hist, total);
        if (!s.found) return;

        std::vector<std::size_t> left, right;
        for (auto i : samples) {
            (x_.bins[i * x_.cols + s.feature] <= s.bin ? left : right).push_back(i);
        }
        samples.clear();
        samples.shrink_to_fit();
        const bool left_small = left.size() <= right.size();
        auto small_hist = histogram(left_small ? left : right);
        for (std::size_t k = 0; k < hist.size(); ++k) {
            hist[k].g -= small_hist[k].g;
            hist[k].h -= small_hist[k].h;
            hist[k].n -= small_hist[k].n;
        }
        auto& large_hist = hist;

        const int l = static_cast<int>(t.nodes.size());
        t.nodes.emplace_back();
        const int r = static_cast<int>(t.nodes.size());
        t.nodes.emplace_back();
        t.nodes[node].feature = static_cast<int>(s.feature);
        t.nodes[node].threshold = binner_.threshold(s.feature, s.bin);
        t.nodes[node].left = l;
        t.nodes[node].right = r;
        if (left_small) {
            grow(t, l, std::move(left), std::move(small_hist), depth + 1);
            grow(t, r, std::move(right), std::move(large_hist), depth + 1);
        } else {
            grow(t, l, std::move(left), std::move(large_hist), depth + 1);
            grow(t, r, std::move(right), std::move(small_hist), depth + 1);
        }
    }

    const BinnedMatrix& x_;
    const Binner& binner_;
    std::span<const double> g_;
    std::span<const double> h_;
    const TreeParams& p_;
    std::mt19937_64& rng_;
    std::vector<std::size_t> offset_;
    std::vector<std::size_t> active_;
};

} // namespace

double Tree::predict(std::span<const double> x) const {
    int n = 0;
    while (nodes[n].feature >= 0) {
        n = x[static_cast<std::size_t>(nodes[n].feature)] <= nodes[n].threshold ? nodes[n].left
                                                                                   : nodes[n].right;
    }
    return nodes[n].value;
}

void Tree::count_splits(std::vector<std::size_t>& counts) const {
    for (const auto& n : nodes) {
        if (n.feature >= 0) ++counts.at(static_cast<std::size_t>(n.feature));
    }
}

nlohmann::json Tree::to_json() const {
    nlohmann::json f = nlohmann::json::array(), th = nlohmann::json::array(),
                   l = nlohmann::json::array(), r = nlohmann::json::array(),
                   v = nlohmann::json::array();
    for (const auto& n : nodes) {
        f.push_back(n.feature);
        th.push_back(n.threshold);
        l.push_back(n.left);
        r.push_back(n.right);
        v.push_back(n.value);
    }
    return {{"feature", f}, {"threshold", th}, {"left", l}, {"right", r}, {"value", v}};
}

Tree Tree::from_json(const nlohmann::json& j) {
    Tree t;
    const auto f = j.at("feature").get<std::vector<int>>();
    const auto th = j.at("threshold").get<std::vector<double>>();
    const auto l = j.at("left").get<std::vector<int>>();
    const auto r = j.at("right").get<std::vector<int>>();
    const auto v = j.at("value").get<std::vector<double>>();
    if (th.size() != f.size() || l.size() != f.size() || r.size() != f.size() || v.size() != f.size()) {
        throw Error("tree arrays differ in length");
    }
    for (std::size_t i = 0; i < f.size(); ++i) t.nodes.push_back({f[i], th[i], l[i], r[i], v[i]});
    for (const auto& n : t.nodes) {
        if (n.feature >= 0 && (n.left <= 0 || n.right <= 0 ||
                               static_cast<std::size_t>(std::max(n.left, n.right)) >= t.nodes.size())) {
            throw Error("tree child index out of range");
        }
    }
    return t;
}

Tree build_tree(const BinnedMatrix& x, const Binner& binner, std::span<const std::size_t> samples,
                std::span<const double> g, std::span<const double> h, const TreeParams& params,
                std::mt19937_64& rng) {
    Builder b(x, binner, g, h, params, rng);
    return b.build(std::vector<std::size_t>(samples.begin(), samples.end()));
}

} // namespace trapdoor::mlkit
