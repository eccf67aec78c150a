#ifndef KISAN_BENCHMARK_HPP
#define KISAN_BENCHMARK_HPP

// Benchmark runner: one stratified split shared by every model, standardizer
// fitted on the training half only, every model scored on the held-out half
// (the OOB row is scored on the training half through its out-of-bag votes).
//
// The report body is a pure function of (dataset, roster, split); wall-clock
// timings live in a separate "run" section so two identical runs produce
// byte-identical bodies.

#include <kisan/baselines.hpp>
#include <kisan/bundle.hpp>
#include <kisan/metrics.hpp>

#include <chrono>
#include <cstdio>
#include <memory>

namespace kisan {

struct ModelSpec {
    enum class Kind { random_forest, random_forest_oob, baseline };

    std::string name;
    Kind kind = Kind::baseline;
    ForestConfig forest;
    BaselineKind baseline = BaselineKind::gaussian_nb;
    BaselineParams params;
    std::string note;
};

inline std::string kind_name(const ModelSpec& spec) {
    switch (spec.kind) {
        case ModelSpec::Kind::random_forest: return "random_forest";
        case ModelSpec::Kind::random_forest_oob: return "random_forest_oob";
        case ModelSpec::Kind::baseline: return to_string(spec.baseline);
    }
    return "?";
}

// Nine classical models. "gbt (in-house)" is this library's own boosted trees
// standing in for an external XGBoost; "Gradient Boosting" is the same
// learner restricted to stumps.
inline std::vector<ModelSpec> default_roster(const ForestConfig& forest = {}, std::uint64_t seed = 42) {
    BaselineParams params;
    params.seed = seed;
    auto baseline = [&](std::string name, BaselineKind kind, BaselineParams p, std::string note = {}) {
        ModelSpec s;
        s.name = std::move(name);
        s.kind = ModelSpec::Kind::baseline;
        s.baseline = kind;
        s.params = p;
        s.note = std::move(note);
        return s;
    };
    ModelSpec rf{"Random Forest", ModelSpec::Kind::random_forest, forest, {}, params, {}};
    ModelSpec oob{"Random Forest (OOB)", ModelSpec::Kind::random_forest_oob, forest, {}, params,
                  "scored on out-of-bag votes over the training half"};
    BaselineParams stumps = params;
    stumps.gbt_depth = 1;
    return {rf,
            baseline("gbt (in-house)", BaselineKind::gradient_boosted_trees, params,
                     "in-house gradient-boosted trees, not XGBoost"),
            baseline("Gaussian NB", BaselineKind::gaussian_nb, params),
            baseline("Decision Tree", BaselineKind::single_tree, params),
            baseline("KNN", BaselineKind::knn, params),
            baseline("Logistic Regression", BaselineKind::logistic_softmax, params),
            baseline("SVM", BaselineKind::linear_svm, params,
                     "posterior is a normalized clipped margin, not a calibrated probability"),
            oob,
            baseline("Gradient Boosting", BaselineKind::gradient_boosted_trees, stumps, "boosted stumps (depth 1)")};
}

struct BenchmarkRow {
    std::string name;
    std::string kind;
    std::string note;
    bool ok = false;
    std::string error;
    std::size_t evaluated = 0;
    MetricsReport metrics;
    double wall_ms = 0;
};

struct BenchmarkReport {
    SplitSpec split;
    DatasetFingerprint dataset;
    std::size_t train_rows = 0;
    std::size_t test_rows = 0;
    std::vector<BenchmarkRow> rows;  // sorted: accuracy desc, log loss asc; failures last
    std::optional<ConfusionMatrix> champion_confusion;
    std::vector<std::pair<std::string, double>> champion_importances;

    const BenchmarkRow* champion() const {
        return !rows.empty() && rows.front().ok ? &rows.front() : nullptr;
    }

    const BenchmarkRow* find(const std::string& name) const {
        for (const auto& r : rows)
            if (r.name == name) return &r;
        return nullptr;
    }
};

inline BenchmarkReport run_benchmark(const LabeledDataset& dataset, const std::vector<ModelSpec>& roster,
                                     const SplitSpec& split = {}) {
    if (roster.empty()) throw Error("benchmark roster is empty");
    auto parts = stratified_split(dataset, split);
    const auto scaler = fit_standardizer(parts.train);
    const auto train = apply_standardizer(scaler, parts.train);
    const auto test = apply_standardizer(scaler, parts.test);

    BenchmarkReport report;
    report.split = split;
    report.dataset = fingerprint(dataset, "benchmark");
    report.train_rows = train.size();
    report.test_rows = test.size();

    struct Scored {
        BenchmarkRow row;
        std::optional<ConfusionMatrix> cm;
        std::vector<double> importances;
        std::size_t order;
    };
    std::vector<Scored> scored;
    std::vector<std::pair<ForestConfig, std::shared_ptr<RandomForestModel>>> forests;
    auto forest_for = [&](const ForestConfig& cfg) {
        for (auto& [c, f] : forests)
            if (c.n_trees == cfg.n_trees && c.features_per_split == cfg.features_per_split &&
                c.max_depth == cfg.max_depth && c.min_samples_leaf == cfg.min_samples_leaf &&
                c.bootstrap == cfg.bootstrap && c.seed == cfg.seed)
                return f;
        auto f = std::make_shared<RandomForestModel>(fit_random_forest(train, cfg));
        forests.emplace_back(cfg, f);
        return f;
    };

    for (std::size_t m = 0; m < roster.size(); ++m) {
        const auto& spec = roster[m];
        Scored s;
        s.order = m;
        s.row.name = spec.name;
        s.row.kind = kind_name(spec);
        s.row.note = spec.note;
        const auto start = std::chrono::steady_clock::now();
        try {
            std::vector<std::size_t> truth, predicted;
            std::vector<std::vector<double>> posteriors;
            auto score_test = [&](auto&& proba) {
                for (std::size_t i = 0; i < test.size(); ++i) {
                    auto p = proba(test.row(i));
                    predicted.push_back(detail::argmax_first(p));
                    truth.push_back(test.labels()[i]);
                    posteriors.push_back(std::move(p));
                }
            };
            switch (spec.kind) {
                case ModelSpec::Kind::random_forest: {
                    auto forest = forest_for(spec.forest);
                    score_test([&](std::span<const double> x) { return forest->predict_proba(x); });
                    const auto imp = feature_importances(*forest);
                    s.importances = imp;
                    break;
                }
                case ModelSpec::Kind::random_forest_oob: {
                    auto forest = forest_for(spec.forest);
                    const auto oob = oob_predictions(*forest, train);
                    for (std::size_t i = 0; i < oob.size(); ++i) {
                        if (oob[i].trees == 0) continue;
                        truth.push_back(train.labels()[i]);
                        predicted.push_back(oob[i].vote);
                        posteriors.push_back(oob[i].posterior);
                    }
                    s.importances = feature_importances(*forest);
                    break;
                }
                case ModelSpec::Kind::baseline: {
                    const auto model = fit_baseline(spec.baseline, train, spec.params);
                    score_test([&](std::span<const double> x) { return model.predict_proba(x); });
                    break;
                }
            }
            auto cm = confusion_matrix(truth, predicted, dataset.class_catalog());
            s.row.metrics = classification_metrics(cm);
            s.row.metrics.log_loss = log_loss(truth, posteriors);
            s.row.evaluated = truth.size();
            s.row.ok = true;
            s.cm = std::move(cm);
        } catch (const std::exception& e) {
            s.row.ok = false;
            s.row.error = e.what();
        }
        s.row.wall_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        scored.push_back(std::move(s));
    }

    std::stable_sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
        if (a.row.ok != b.row.ok) return a.row.ok;
        if (!a.row.ok) return a.order < b.order;
        if (a.row.metrics.accuracy != b.row.metrics.accuracy) return a.row.metrics.accuracy > b.row.metrics.accuracy;
        if (*a.row.metrics.log_loss != *b.row.metrics.log_loss) return *a.row.metrics.log_loss < *b.row.metrics.log_loss;
        return a.order < b.order;
    });
    if (!scored.empty() && scored.front().row.ok) {
        report.champion_confusion = scored.front().cm;
        for (std::size_t j = 0; j < scored.front().importances.size(); ++j)
            report.champion_importances.emplace_back(dataset.schema().feature_names[j], scored.front().importances[j]);
    }
    for (auto& s : scored) report.rows.push_back(std::move(s.row));
    return report;
}

// ------------------------------------------------------------- exporters

inline constexpr int benchmark_report_version = 1;

inline json report_body_json(const BenchmarkReport& r) {
    json rows = json::array();
    for (const auto& row : r.rows) {
        json j{{"model", row.name}, {"kind", row.kind}, {"status", row.ok ? "ok" : "failed"}};
        if (!row.note.empty()) j["note"] = row.note;
        if (row.ok) {
            j["evaluated"] = row.evaluated;
            j["accuracy"] = row.metrics.accuracy;
            j["precision_macro"] = row.metrics.precision_macro;
            j["recall_macro"] = row.metrics.recall_macro;
            j["f1_macro"] = row.metrics.f1_macro;
            j["log_loss"] = *row.metrics.log_loss;
        } else {
            j["error"] = row.error;
        }
        rows.push_back(std::move(j));
    }
    json body{{"averaging", "macro"},
              {"ordering", "accuracy descending, then log loss ascending"},
              {"split", {{"strategy", "stratified"}, {"test_fraction", r.split.test_fraction}, {"seed", r.split.seed}}},
              {"dataset",
               {{"rows", r.dataset.rows}, {"classes", r.dataset.classes}, {"content_hash", r.dataset.content_hash}}},
              {"train_rows", r.train_rows},
              {"test_rows", r.test_rows},
              {"roster_note", "classical models only; no deep-learning baselines are included"},
              {"models", rows}};
    if (const auto* c = r.champion()) {
        body["champion"] = c->name;
        json per_class = json::array();
        for (std::size_t k = 0; k < c->metrics.per_class.size(); ++k) {
            const auto& m = c->metrics.per_class[k];
            per_class.push_back({{"class", r.champion_confusion->class_catalog[k]},
                                 {"precision", m.precision},
                                 {"recall", m.recall},
                                 {"f1", m.f1},
                                 {"support", m.support}});
        }
        body["champion_per_class"] = per_class;
        body["champion_confusion"] = {{"class_catalog", r.champion_confusion->class_catalog},
                                      {"counts", r.champion_confusion->counts}};
        json imp = json::array();
        for (const auto& [f, v] : r.champion_importances) imp.push_back({{"feature", f}, {"importance", v}});
        body["champion_feature_importances"] = imp;
    } else {
        body["champion"] = nullptr;
    }
    return body;
}

inline json report_to_json(const BenchmarkReport& r) {
    json timings = json::object();
    for (const auto& row : r.rows) timings[row.name] = row.wall_ms;
    return json{{"report_version", benchmark_report_version},
                {"body", report_body_json(r)},
                {"run", {{"generated_at", utc_timestamp()}, {"wall_ms", timings}}}};
}

// Plain-text table: Model | Accuracy | Precision | Recall | F1-Score, with
// log loss appended.
inline std::string report_to_text(const BenchmarkReport& r) {
    std::string out;
    char buf[256];
    std::snprintf(buf, sizeof buf, "Benchmark: %zu rows, %zu classes, stratified split test_fraction=%.2f seed=%llu\n",
                  r.dataset.rows, r.dataset.classes, r.split.test_fraction,
                  static_cast<unsigned long long>(r.split.seed));
    out += buf;
    out += "Precision/Recall/F1 are macro-averaged over classes. SVM log loss uses uncalibrated margins.\n\n";
    std::snprintf(buf, sizeof buf, "%-22s %9s %10s %8s %9s %9s\n", "Model", "Accuracy", "Precision", "Recall",
                  "F1-Score", "Log Loss");
    out += buf;
    out += std::string(72, '-') + "\n";
    for (const auto& row : r.rows) {
        if (row.ok)
            std::snprintf(buf, sizeof buf, "%-22s %9.4f %10.4f %8.4f %9.4f %9.4f\n", row.name.c_str(),
                          row.metrics.accuracy, row.metrics.precision_macro, row.metrics.recall_macro,
                          row.metrics.f1_macro, *row.metrics.log_loss);
        else
            std::snprintf(buf, sizeof buf, "%-22s FAILED: %s\n", row.name.c_str(), row.error.c_str());
        out += buf;
    }
    if (const auto* c = r.champion()) {
        out += "\nChampion: " + c->name + "\n";
        if (!r.champion_importances.empty()) {
            out += "Feature importances:\n";
            for (const auto& [f, v] : r.champion_importances) {
                std::snprintf(buf, sizeof buf, "  %-14s %.4f\n", f.c_str(), v);
                out += buf;
            }
        }
    }
    return out;
}

}  // namespace kisan

#endif  // KISAN_BENCHMARK_HPP
