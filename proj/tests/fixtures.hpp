#pragma once

// Shared fixtures: the two-candidate comparison bundle and a small trained
// bundle over the synthetic corpora.

#include <kisan/bundle.hpp>
#include <kisan/synth.hpp>

#include <filesystem>
#include <random>
#include <string>

namespace fixture {

inline kisan::PriceSeries constant_series(const std::string& crop, double price, std::size_t months = 36) {
    kisan::SynthSeriesConfig cfg;
    cfg.crop_id = crop;
    cfg.base = price;
    cfg.n_months = months;
    return kisan::synth_market_series(1, cfg).series;
}

// Four crops. Every soil sample gets the posterior
//   Crop A 0.10, Crop B 0.85, Crop C 0.05, Crop D 0.00
// and constant prices A=115, B=180, C=100, D=200 normalize to
//   g = 0.15, 0.80, 0.00, 1.00,
// so with the default weights Crop B scores 0.6*0.85 + 0.4*0.80 = 0.830 and
// ranks first.
inline kisan::ModelBundle comparison_bundle() {
    using namespace kisan;
    const std::vector<std::string> catalog{"Crop A", "Crop B", "Crop C", "Crop D"};
    Matrix x(0, 7);
    std::vector<std::string> labels;
    const std::vector<double> row{90, 42, 43, 20.8, 82.0, 6.5, 202.9};
    auto add = [&](const std::string& label, int copies) {
        for (int i = 0; i < copies; ++i) {
            x.push_row(row);
            labels.push_back(label);
        }
    };
    add("Crop A", 2);
    add("Crop B", 17);
    add("Crop C", 1);
    LabeledDataset data(agronomic_schema(), std::move(x), labels, catalog);

    ModelBundle b;
    b.created_at = "2024-01-01T00:00:00Z";
    b.standardizer = fit_standardizer(data);
    ForestConfig cfg;
    cfg.n_trees = 1;
    cfg.bootstrap = false;
    cfg.features_per_split = FeatureRule::every();
    b.crop_model = fit_random_forest(apply_standardizer(b.standardizer, data), cfg);
    for (const auto& [crop, price] : std::vector<std::pair<std::string, double>>{
             {"Crop A", 115}, {"Crop B", 180}, {"Crop C", 100}, {"Crop D", 200}}) {
        b.price_history[crop] = constant_series(crop, price);
        b.price_models[crop] = fit_price_model(b.price_history[crop], b.forecast_config);
    }
    b.fingerprints.push_back(fingerprint(data, "comparison"));
    return b;
}

// 22 synthetic crops, fertilizer model and eleven price series; small forests
// so that tests stay fast.
inline kisan::ModelBundle small_bundle(std::size_t trees = 15) {
    using namespace kisan;
    const auto crop = synth_crop_corpus(42, 25, false);
    ForestConfig cfg;
    cfg.n_trees = trees;
    cfg.threads = 1;
    ModelBundle b;
    b.created_at = "2024-01-01T00:00:00Z";
    b.standardizer = fit_standardizer(crop);
    b.crop_model = fit_random_forest(apply_standardizer(b.standardizer, crop), cfg);
    const auto fert = synth_fertilizer_corpus(42, 140);
    b.fertilizer = fit_fertilizer_model(fert.data, fert.soil_types, cfg);
    b.price_history = synth_market_history(42);
    for (const auto& [name, series] : b.price_history) b.price_models[name] = fit_price_model(series, b.forecast_config);
    b.fingerprints.push_back(fingerprint(crop, "synthetic-crop"));
    b.fingerprints.push_back(fingerprint(fert.data, "synthetic-fertilizer"));
    return b;
}

inline kisan::SoilSample any_soil() { return {90, 42, 43, 20.8, 82.0, 6.5, 202.9}; }

// A fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir() {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() / ("kisan-test-" + std::to_string(rd()) + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

}  // namespace fixture
