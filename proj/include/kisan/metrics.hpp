#ifndef KISAN_METRICS_HPP
#define KISAN_METRICS_HPP

// Confusion matrix, macro-averaged classification metrics and log loss.

#include <kisan/core.hpp>

namespace kisan {

// Rows are the true class, columns the predicted class.
struct ConfusionMatrix {
    std::vector<std::string> class_catalog;
    std::vector<std::vector<std::size_t>> counts;

    std::size_t size() const noexcept { return class_catalog.size(); }

    std::size_t total() const {
        std::size_t t = 0;
        for (const auto& row : counts)
            for (auto c : row) t += c;
        return t;
    }

    std::size_t trace() const {
        std::size_t t = 0;
        for (std::size_t i = 0; i < counts.size(); ++i) t += counts[i][i];
        return t;
    }

    std::string to_csv() const {
        std::string out = "true\\predicted";
        for (const auto& c : class_catalog) out += "," + c;
        out += "\n";
        for (std::size_t i = 0; i < size(); ++i) {
            out += class_catalog[i];
            for (auto c : counts[i]) out += "," + std::to_string(c);
            out += "\n";
        }
        return out;
    }

    bool operator==(const ConfusionMatrix&) const = default;
};

inline ConfusionMatrix make_confusion_matrix(std::vector<std::string> catalog) {
    const auto k = catalog.size();
    return {std::move(catalog), std::vector<std::vector<std::size_t>>(k, std::vector<std::size_t>(k, 0))};
}

// Index-based form used by the benchmark.
inline ConfusionMatrix confusion_matrix(std::span<const std::size_t> truth, std::span<const std::size_t> predicted,
                                        const std::vector<std::string>& catalog) {
    if (truth.size() != predicted.size())
        throw Error("confusion matrix: " + std::to_string(truth.size()) + " truths vs " +
                    std::to_string(predicted.size()) + " predictions");
    auto cm = make_confusion_matrix(catalog);
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] >= catalog.size() || predicted[i] >= catalog.size())
            throw Error("confusion matrix: class index out of range");
        ++cm.counts[truth[i]][predicted[i]];
    }
    return cm;
}

inline ConfusionMatrix confusion_matrix(const std::vector<std::string>& truth,
                                        const std::vector<std::string>& predicted,
                                        const std::vector<std::string>& catalog) {
    if (truth.size() != predicted.size())
        throw Error("confusion matrix: " + std::to_string(truth.size()) + " truths vs " +
                    std::to_string(predicted.size()) + " predictions");
    auto index_of = [&](const std::string& label) {
        auto it = std::find(catalog.begin(), catalog.end(), label);
        if (it == catalog.end()) throw Error("confusion matrix: unknown label '" + label + "'");
        return static_cast<std::size_t>(it - catalog.begin());
    };
    auto cm = make_confusion_matrix(catalog);
    for (std::size_t i = 0; i < truth.size(); ++i) ++cm.counts[index_of(truth[i])][index_of(predicted[i])];
    return cm;
}

struct ClassMetrics {
    double precision = 0;
    double recall = 0;
    double f1 = 0;
    std::size_t support = 0;
};

struct MetricsReport {
    double accuracy = 0;
    double precision_macro = 0;
    double recall_macro = 0;
    double f1_macro = 0;
    std::optional<double> log_loss;
    std::vector<ClassMetrics> per_class;
};

// 0/0 ratios count as 0. Macro averages are unweighted over all classes.
inline MetricsReport classification_metrics(const ConfusionMatrix& cm) {
    const std::size_t total = cm.total();
    if (total == 0) throw Error("classification metrics need at least one evaluated sample");
    const std::size_t k = cm.size();
    MetricsReport report;
    report.accuracy = static_cast<double>(cm.trace()) / static_cast<double>(total);
    report.per_class.resize(k);
    auto ratio = [](std::size_t a, std::size_t b) { return b == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(b); };
    for (std::size_t c = 0; c < k; ++c) {
        std::size_t row = 0, col = 0;
        for (std::size_t j = 0; j < k; ++j) {
            row += cm.counts[c][j];
            col += cm.counts[j][c];
        }
        auto& m = report.per_class[c];
        m.support = row;
        m.precision = ratio(cm.counts[c][c], col);
        m.recall = ratio(cm.counts[c][c], row);
        m.f1 = m.precision + m.recall > 0 ? 2 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
        report.precision_macro += m.precision;
        report.recall_macro += m.recall;
        report.f1_macro += m.f1;
    }
    report.precision_macro /= static_cast<double>(k);
    report.recall_macro /= static_cast<double>(k);
    report.f1_macro /= static_cast<double>(k);
    return report;
}

inline constexpr double log_loss_clip = 1e-15;

inline double log_loss(std::span<const std::size_t> truth, const std::vector<std::vector<double>>& posteriors) {
    if (truth.size() != posteriors.size())
        throw Error("log loss: " + std::to_string(truth.size()) + " truths vs " +
                    std::to_string(posteriors.size()) + " posteriors");
    if (truth.empty()) throw Error("log loss of zero samples is undefined");
    double sum = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const auto& p = posteriors[i];
        double mass = 0;
        for (auto v : p) mass += v;
        if (std::abs(mass - 1.0) > 1e-6) throw Error("log loss: posterior " + std::to_string(i) + " does not sum to 1");
        if (truth[i] >= p.size()) throw Error("log loss: class index out of range");
        sum -= std::log(std::clamp(p[truth[i]], log_loss_clip, 1.0));
    }
    return sum / static_cast<double>(truth.size());
}

inline double log_loss(const std::vector<std::string>& truth, const std::vector<std::vector<double>>& posteriors,
                       const std::vector<std::string>& catalog) {
    std::vector<std::size_t> idx;
    idx.reserve(truth.size());
    for (const auto& t : truth) {
        auto it = std::find(catalog.begin(), catalog.end(), t);
        if (it == catalog.end()) throw Error("log loss: unknown label '" + t + "'");
        idx.push_back(static_cast<std::size_t>(it - catalog.begin()));
    }
    return log_loss(idx, posteriors);
}

}  // namespace kisan

#endif  // KISAN_METRICS_HPP
