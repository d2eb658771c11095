#include <trapdoor/mlkit/metrics.hpp>

namespace trapdoor::mlkit {

Confusion confusion_of(std::span<const int> truth, std::span<const int> predicted) {
    if (truth.size() != predicted.size()) throw Error("confusion: length mismatch");
    Confusion c;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (predicted[i] == 1) {
            (truth[i] == 1 ? c.tp : c.fp)++;
        } else {
            (truth[i] == 1 ? c.fn : c.tn)++;
        }
    }
    return c;
}

Metrics compute_metrics(const Confusion& c) {
    Metrics m;
    m.confusion = c;
    const auto tp = static_cast<double>(c.tp);
    if (c.total() > 0) m.accuracy = static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
    if (c.tp + c.fp > 0) {
        m.precision = tp / static_cast<double>(c.tp + c.fp);
    } else {
        m.precision_undefined = true;
    }
    if (c.tp + c.fn > 0) {
        m.recall = tp / static_cast<double>(c.tp + c.fn);
    } else {
        m.recall_undefined = true;
    }
    if (m.precision + m.recall > 0) m.f1 = 2 * m.precision * m.recall / (m.precision + m.recall);
    return m;
}

Metrics mean_metrics(std::span<const Metrics> runs) {
    Metrics m;
    if (runs.empty()) return m;
    for (const auto& r : runs) {
        m.accuracy += r.accuracy;
        m.precision += r.precision;
        m.recall += r.recall;
        m.f1 += r.f1;
        m.confusion.tp += r.confusion.tp;
        m.confusion.fp += r.confusion.fp;
        m.confusion.tn += r.confusion.tn;
        m.confusion.fn += r.confusion.fn;
        m.precision_undefined = m.precision_undefined || r.precision_undefined;
        m.recall_undefined = m.recall_undefined || r.recall_undefined;
    }
    const auto n = static_cast<double>(runs.size());
    m.accuracy /= n;
    m.precision /= n;
    m.recall /= n;
    m.f1 /= n;
    return m;
}

nlohmann::json to_json(const Metrics& m) {
    return {{"accuracy", m.accuracy},
            {"precision", m.precision},
            {"recall", m.recall},
            {"f1", m.f1},
            {"confusion",
             {{"tp", m.confusion.tp}, {"fp", m.confusion.fp}, {"tn", m.confusion.tn},
              {"fn", m.confusion.fn}}},
            {"precision_undefined", m.precision_undefined},
            {"recall_undefined", m.recall_undefined}};
}

} // namespace trapdoor::mlkit
