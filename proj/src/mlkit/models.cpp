#include <trapdoor/mlkit/models.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace trapdoor::mlkit {

namespace {

constexpr int kFormatVersion = 1;

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

nlohmann::json header(ModelKind kind, const Params& p, std::uint64_t seed) {
    return {{"format", "trapdoor-model"},
            {"version", kFormatVersion},
            {"model_kind", to_string(kind)},
            {"params", p},
            {"seed", seed}};
}

void check_classes(const std::vector<LabeledSample>& s) {
    bool seen[2] = {false, false};
    for (const auto& x : s) {
        if (x.label != 0 && x.label != 1) throw Error("labels must be 0 or 1");
        seen[x.label] = true;
    }
    if (!seen[0] || !seen[1]) throw Error("training data must contain both classes");
}

template <class T>
T param(const Params& p, const char* key) {
    auto it = p.find(key);
    if (it == p.end()) throw Error(std::string("missing hyperparameter ") + key);
    return it->get<T>();
}

class MinMaxScaler {
public:
    MinMaxScaler() = default;
    explicit MinMaxScaler(const Matrix& x) : lo_(x.cols, 0), span_(x.cols, 0) {
        for (std::size_t j = 0; j < x.cols; ++j) {
            double lo = INFINITY, hi = -INFINITY;
            for (std::size_t i = 0; i < x.rows; ++i) {
                lo = std::min(lo, x.data[i * x.cols + j]);
                hi = std::max(hi, x.data[i * x.cols + j]);
            }
            lo_[j] = x.rows ? lo : 0;
            span_[j] = x.rows ? hi - lo : 0;
        }
    }

    std::vector<double> apply(std::span<const double> x) const {
        std::vector<double> out(x.size());
        for (std::size_t j = 0; j < x.size(); ++j) {
            out[j] = span_[j] > 0 ? (x[j] - lo_[j]) / span_[j] : 0.0;
        }
        return out;
    }

    nlohmann::json to_json() const { return {{"min", lo_}, {"span", span_}}; }
    static MinMaxScaler from_json(const nlohmann::json& j) {
        MinMaxScaler s;
        s.lo_ = j.at("min").get<std::vector<double>>();
        s.span_ = j.at("span").get<std::vector<double>>();
        return s;
    }

private:
    std::vector<double> lo_, span_;
};

class Knn : public Model {
public:
    ModelKind kind() const override { return ModelKind::knn; }

    double predict_proba(std::span<const double> x) const override {
        const auto q = scaler_.apply(x);
        std::vector<std::pair<double, std::size_t>> d(labels_.size());
        for (std::size_t i = 0; i < labels_.size(); ++i) {
            double s = 0;
            for (std::size_t j = 0; j < dim_; ++j) {
                const double t = points_[i * dim_ + j] - q[j];
                s += t * t;
            }
            d[i] = {s, i};
        }
        const std::size_t k = std::min(k_, d.size());
        std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k), d.end());
        double pos = 0;
        for (std::size_t i = 0; i < k; ++i) pos += labels_[d[i].second];
        return pos / static_cast<double>(k);
    }

    nlohmann::json to_json() const override {
        auto j = header(kind(), params_, seed_);
        j["scaler"] = scaler_.to_json();
        j["dim"] = dim_;
        j["points"] = points_;
        j["labels"] = labels_;
        return j;
    }

    static std::unique_ptr<Knn> fit(const Params& p, const std::vector<LabeledSample>& s,
                                    std::uint64_t seed) {
        auto m = std::make_unique<Knn>();
        m->params_ = p;
        m->seed_ = seed;
        m->k_ = param<std::size_t>(p, "n_neighbors");
        (void)param<int>(p, "leaf_size");  // brute-force search; kept for grid parity
        const auto x = Matrix::from_samples(s);
        m->scaler_ = MinMaxScaler(x);
        m->dim_ = x.cols;
        for (std::size_t i = 0; i < x.rows; ++i) {
            const auto r = m->scaler_.apply(x.row(i));
            m->points_.insert(m->points_.end(), r.begin(), r.end());
            m->labels_.push_back(s[i].label);
        }
        return m;
    }

    static std::unique_ptr<Knn> from_json(const nlohmann::json& j) {
        auto m = std::make_unique<Knn>();
        m->params_ = j.at("params");
        m->seed_ = j.at("seed").get<std::uint64_t>();
        m->k_ = param<std::size_t>(m->params_, "n_neighbors");
        m->scaler_ = MinMaxScaler::from_json(j.at("scaler"));
        m->dim_ = j.at("dim").get<std::size_t>();
        m->points_ = j.at("points").get<std::vector<double>>();
        m->labels_ = j.at("labels").get<std::vector<int>>();
        return m;
    }

private:
    std::size_t k_ = 5;
    std::size_t dim_ = 0;
    MinMaxScaler scaler_;
    std::vector<double> points_;
    std::vector<int> labels_;
};

class Svm : public Model {
public:
    ModelKind kind() const override { return ModelKind::svm_poly; }

    double decision(std::span<const double> x) const {
        const auto q = scaler_.apply(x);
        double f = b_;
        for (std::size_t i = 0; i < coef_.size(); ++i) {
            f += coef_[i] * kernel(&sv_[i * dim_], q.data());
        }
        return f;
    }

    double predict_proba(std::span<const double> x) const override { return sigmoid(decision(x)); }

    nlohmann::json to_json() const override {
        auto j = header(kind(), params_, seed_);
        j["scaler"] = scaler_.to_json();
        j["dim"] = dim_;
        j["gamma"] = gamma_;
        j["coef0"] = coef0_;
        j["support_vectors"] = sv_;
        j["coef"] = coef_;
        j["bias"] = b_;
        return j;
    }

    static std::unique_ptr<Svm> fit(const Params& p, const std::vector<LabeledSample>& s,
                                    std::uint64_t seed) {
        auto m = std::make_unique<Svm>();
        m->params_ = p;
        m->seed_ = seed;
        m->configure(p);
        const auto x = Matrix::from_samples(s);
        m->scaler_ = MinMaxScaler(x);
        m->dim_ = x.cols;
        m->gamma_ = x.cols ? 1.0 / static_cast<double>(x.cols) : 1.0;
        std::vector<double> xs;
        for (std::size_t i = 0; i < x.rows; ++i) {
            const auto r = m->scaler_.apply(x.row(i));
            xs.insert(xs.end(), r.begin(), r.end());
        }
        m->solve(xs, s);
        return m;
    }

    static std::unique_ptr<Svm> from_json(const nlohmann::json& j) {
        auto m = std::make_unique<Svm>();
        m->params_ = j.at("params");
        m->seed_ = j.at("seed").get<std::uint64_t>();
        m->configure(m->params_);
        m->scaler_ = MinMaxScaler::from_json(j.at("scaler"));
        m->dim_ = j.at("dim").get<std::size_t>();
        m->gamma_ = j.at("gamma").get<double>();
        m->coef0_ = j.at("coef0").get<double>();
        m->sv_ = j.at("support_vectors").get<std::vector<double>>();
        m->coef_ = j.at("coef").get<std::vector<double>>();
        m->b_ = j.at("bias").get<double>();
        return m;
    }

private:
    void configure(const Params& p) {
        const auto k = param<std::string>(p, "kernel");
        if (k == "linear") {
            poly_ = false;
        } else if (k == "poly") {
            poly_ = true;
            degree_ = param<int>(p, "degree");
        } else {
            throw Error("unknown svm kernel " + k);
        }
    }

    double kernel(const double* a, const double* b) const {
        double dot = 0;
        for (std::size_t j = 0; j < dim_; ++j) dot += a[j] * b[j];
        return poly_ ? std::pow(gamma_ * dot + coef0_, degree_) : dot;
    }

    // Dual coordinate pairs on the maximal violating pair.
    void solve(const std::vector<double>& xs, const std::vector<LabeledSample>& s) {
        const std::size_t n = s.size();
        std::vector<double> y(n), alpha(n, 0.0), grad(n, -1.0);
        for (std::size_t i = 0; i < n; ++i) y[i] = s[i].label == 1 ? 1.0 : -1.0;
        std::vector<double> k(n * n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i; j < n; ++j) {
                k[i * n + j] = k[j * n + i] = kernel(&xs[i * dim_], &xs[j * dim_]);
            }
        }
        const double c = kC;
        const std::size_t max_iter = std::max<std::size_t>(10000, 100 * n);
        double m_up = 0, m_low = 0;
        for (std::size_t iter = 0; iter < max_iter; ++iter) {
            std::ptrdiff_t i = -1, j = -1;
            m_up = -INFINITY;
            m_low = INFINITY;
            for (std::size_t t = 0; t < n; ++t) {
                const double v = -y[t] * grad[t];
                const bool up = (y[t] > 0 && alpha[t] < c) || (y[t] < 0 && alpha[t] > 0);
                const bool low = (y[t] > 0 && alpha[t] > 0) || (y[t] < 0 && alpha[t] < c);
                if (up && v > m_up) {
                    m_up = v;
                    i = static_cast<std::ptrdiff_t>(t);
                }
                if (low && v < m_low) {
                    m_low = v;
                    j = static_cast<std::ptrdiff_t>(t);
                }
            }
            if (i < 0 || j < 0 || m_up - m_low < kTol) break;
            const auto a = static_cast<std::size_t>(i);
            const auto b = static_cast<std::size_t>(j);
            const double eta = std::max(k[a * n + a] + k[b * n + b] - 2 * k[a * n + b], 1e-12);
            double step = (m_up - m_low) / eta;
            step = std::min(step, y[a] > 0 ? c - alpha[a] : alpha[a]);
            step = std::min(step, y[b] > 0 ? alpha[b] : c - alpha[b]);
            alpha[a] += y[a] * step;
            alpha[b] -= y[b] * step;
            for (std::size_t t = 0; t < n; ++t) {
                grad[t] += y[t] * step * (k[t * n + a] - k[t * n + b]);
            }
        }
        double free_sum = 0;
        std::size_t free_n = 0;
        for (std::size_t t = 0; t < n; ++t) {
            if (alpha[t] > 1e-12 && alpha[t] < c - 1e-12) {
                free_sum += -y[t] * grad[t];
                ++free_n;
            }
        }
        b_ = free_n ? free_sum / static_cast<double>(free_n) : (m_up + m_low) / 2;
        if (!std::isfinite(b_)) b_ = 0;
        for (std::size_t t = 0; t < n; ++t) {
            if (alpha[t] <= 1e-12) continue;
            coef_.push_back(alpha[t] * y[t]);
            sv_.insert(sv_.end(), xs.begin() + static_cast<std::ptrdiff_t>(t * dim_),
                       xs.begin() + static_cast<std::ptrdiff_t>((t + 1) * dim_));
        }
    }

    static constexpr double kC = 1.0;
    static constexpr double kTol = 1e-3;

    bool poly_ = true;
    int degree_ = 3;
    double gamma_ = 1.0;
    double coef0_ = 1.0;
    std::size_t dim_ = 0;
    MinMaxScaler scaler_;
    std::vector<double> sv_;
    std::vector<double> coef_;
    double b_ = 0;
};

class RandomForest : public Model {
public:
    ModelKind kind() const override { return ModelKind::random_forest; }

    double predict_proba(std::span<const double> x) const override {
        double s = 0;
        for (const auto& t : trees_) s += t.predict(x);
        return trees_.empty() ? 0.0 : s / static_cast<double>(trees_.size());
    }

    std::vector<std::size_t> split_counts() const override {
        std::vector<std::size_t> c(dim_, 0);
        for (const auto& t : trees_) t.count_splits(c);
        return c;
    }

    nlohmann::json to_json() const override {
        auto j = header(kind(), params_, seed_);
        j["dim"] = dim_;
        j["trees"] = nlohmann::json::array();
        for (const auto& t : trees_) j["trees"].push_back(t.to_json());
        return j;
    }

    static std::unique_ptr<RandomForest> fit(const Params& p, const std::vector<LabeledSample>& s,
                                             std::uint64_t seed) {
        auto m = std::make_unique<RandomForest>();
        m->params_ = p;
        m->seed_ = seed;
        const auto n_trees = param<std::size_t>(p, "n_estimators");
        TreeParams tp;
        tp.max_depth = 64;
        tp.min_samples_leaf = param<std::size_t>(p, "min_samples_leaf");
        tp.min_child_weight = 0;
        tp.lambda = 0;
        const auto x = Matrix::from_samples(s);
        m->dim_ = x.cols;
        const Binner binner(x);
        const auto xb = BinnedMatrix::from(x, binner);
        std::size_t active = 0;
        for (std::size_t j = 0; j < x.cols; ++j) active += binner.bins(j) > 1;
        tp.max_features = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(active)))));
        std::vector<double> g(x.rows), h(x.rows, 1.0);
        for (std::size_t i = 0; i < x.rows; ++i) g[i] = -static_cast<double>(s[i].label);
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<std::size_t> pick(0, x.rows - 1);
        std::vector<std::size_t> boot(x.rows);
        for (std::size_t t = 0; t < n_trees; ++t) {
            for (auto& b : boot) b = pick(rng);
            m->trees_.push_back(build_tree(xb, binner, boot, g, h, tp, rng));
        }
        return m;
    }

    static std::unique_ptr<RandomForest> from_json(const nlohmann::json& j) {
        auto m = std::make_unique<RandomForest>();
        m->params_ = j.at("params");
        m->seed_ = j.at("seed").get<std::uint64_t>();
        m->dim_ = j.at("dim").get<std::size_t>();
        for (const auto& t : j.at("trees")) m->trees_.push_back(Tree::from_json(t));
        return m;
    }

private:
    std::size_t dim_ = 0;
    std::vector<Tree> trees_;
};

} // namespace

std::string_view to_string(ModelKind k) {
    switch (k) {
    case ModelKind::knn: return "knn";
    case ModelKind::svm_poly: return "svm_poly";
    case ModelKind::random_forest: return "random_forest";
    case ModelKind::gradient_boosted_trees: return "gradient_boosted_trees";
    }
    return "?";
}

std::optional<ModelKind> parse_model_kind(std::string_view s) {
    for (auto k : {ModelKind::knn, ModelKind::svm_poly, ModelKind::random_forest,
                   ModelKind::gradient_boosted_trees}) {
        if (to_string(k) == s) return k;
    }
    if (s == "gbt" || s == "xgb" || s == "lgbm") return ModelKind::gradient_boosted_trees;
    if (s == "rf") return ModelKind::random_forest;
    if (s == "svm") return ModelKind::svm_poly;
    return std::nullopt;
}

double GradientBoostedTrees::margin(std::span<const double> x, std::size_t n_trees) const {
    double f = base_;
    n_trees = std::min(n_trees, trees_.size());
    for (std::size_t t = 0; t < n_trees; ++t) f += trees_[t].predict(x);
    return f;
}

double GradientBoostedTrees::predict_proba(std::span<const double> x) const {
    return sigmoid(margin(x, trees_.size()));
}

std::vector<std::size_t> GradientBoostedTrees::split_counts() const {
    std::vector<std::size_t> c(dim_, 0);
    for (const auto& t : trees_) t.count_splits(c);
    return c;
}

nlohmann::json GradientBoostedTrees::to_json() const {
    auto j = header(kind(), params_, seed_);
    j["dim"] = dim_;
    j["base_margin"] = base_;
    j["trees"] = nlohmann::json::array();
    for (const auto& t : trees_) j["trees"].push_back(t.to_json());
    return j;
}

std::unique_ptr<GradientBoostedTrees> GradientBoostedTrees::fit(const Params& p,
                                                                const std::vector<LabeledSample>& s,
                                                                std::uint64_t seed) {
    auto m = std::make_unique<GradientBoostedTrees>();
    m->params_ = p;
    m->seed_ = seed;
    const auto n_trees = param<std::size_t>(p, "n_estimators");
    TreeParams tp;
    tp.max_depth = p.value("max_depth", 3);
    tp.leaf_scale = param<double>(p, "learning_rate");
    tp.lambda = 1.0;
    const auto x = Matrix::from_samples(s);
    m->dim_ = x.cols;
    const Binner binner(x);
    const auto xb = BinnedMatrix::from(x, binner);

    double pos = 0;
    for (const auto& v : s) pos += v.label;
    const double rate = std::clamp(pos / static_cast<double>(s.size()), 1e-6, 1 - 1e-6);
    m->base_ = std::log(rate / (1 - rate));

    std::vector<std::size_t> all(x.rows);
    std::iota(all.begin(), all.end(), 0);
    std::vector<double> f(x.rows, m->base_), g(x.rows), h(x.rows);
    std::mt19937_64 rng(seed);
    for (std::size_t t = 0; t < n_trees; ++t) {
        for (std::size_t i = 0; i < x.rows; ++i) {
            const double pr = sigmoid(f[i]);
            g[i] = pr - s[i].label;
            h[i] = std::max(pr * (1 - pr), 1e-16);
        }
        m->trees_.push_back(build_tree(xb, binner, all, g, h, tp, rng));
        const auto& tree = m->trees_.back();
        for (std::size_t i = 0; i < x.rows; ++i) f[i] += tree.predict(x.row(i));
    }
    return m;
}

std::unique_ptr<GradientBoostedTrees> GradientBoostedTrees::from_json(const nlohmann::json& j) {
    auto m = std::make_unique<GradientBoostedTrees>();
    m->params_ = j.at("params");
    m->seed_ = j.at("seed").get<std::uint64_t>();
    m->dim_ = j.at("dim").get<std::size_t>();
    m->base_ = j.at("base_margin").get<double>();
    for (const auto& t : j.at("trees")) m->trees_.push_back(Tree::from_json(t));
    return m;
}

std::unique_ptr<Model> fit_model(ModelKind kind, const Params& params,
                                 const std::vector<LabeledSample>& samples, std::uint64_t seed) {
    check_classes(samples);
    switch (kind) {
    case ModelKind::knn: return Knn::fit(params, samples, seed);
    case ModelKind::svm_poly: return Svm::fit(params, samples, seed);
    case ModelKind::random_forest: return RandomForest::fit(params, samples, seed);
    case ModelKind::gradient_boosted_trees: return GradientBoostedTrees::fit(params, samples, seed);
    }
    throw Error("unknown model kind");
}

std::unique_ptr<Model> model_from_json(const nlohmann::json& j) {
    try {
        if (j.value("format", std::string{}) != "trapdoor-model") throw Error("not a model file");
        if (j.at("version").get<int>() != kFormatVersion) throw Error("unsupported model version");
        const auto kind = parse_model_kind(j.at("model_kind").get<std::string>());
        if (!kind) throw Error("unknown model_kind");
        switch (*kind) {
        case ModelKind::knn: return Knn::from_json(j);
        case ModelKind::svm_poly: return Svm::from_json(j);
        case ModelKind::random_forest: return RandomForest::from_json(j);
        case ModelKind::gradient_boosted_trees: return GradientBoostedTrees::from_json(j);
        }
    } catch (const nlohmann::json::exception& ex) {
        throw Error(std::string("malformed model: ") + ex.what());
    }
    throw Error("unknown model kind");
}

} // namespace trapdoor::mlkit
