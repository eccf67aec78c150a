#ifndef KISAN_SYNTH_HPP
#define KISAN_SYNTH_HPP

// Seeded synthetic data: a known-formula market series used as a forecasting
// oracle, and stand-in corpora with the shape of the public crop,
// fertilizer and market-price datasets (22 crops x 100 rows, 500 fertilizer
// rows over 7 types, 3,100 monthly prices over 11 crops). The stand-ins let
// every pipeline run end to end when the real files are not present.

#include <kisan/io.hpp>

#include <array>

namespace kisan {

struct SynthSeriesConfig {
    std::string crop_id = "synthetic";
    double base = 100;
    double slope = 0;  // per month
    double amplitude = 0;
    double noise_sigma = 0;
    std::size_t n_months = 36;
    int start_year = 2020;
    int start_month = 1;
};

struct SynthSeries {
    PriceSeries series;
    std::vector<std::size_t> clamped;  // indices whose price was raised to 0.01
};

// price(t) = base + slope*t + amplitude*sin(2 pi month / 12) + N(0, sigma),
// t = 0, 1, ... months from the start.
inline SynthSeries synth_market_series(std::uint64_t seed, const SynthSeriesConfig& config) {
    if (config.n_months < 1) throw Error("synthetic series needs at least one month");
    constexpr double two_pi = 6.283185307179586476925286766559;
    detail::Rng rng(seed);
    SynthSeries out{{config.crop_id, {}}, {}};
    const long start = month_index(config.start_year, config.start_month);
    for (std::size_t t = 0; t < config.n_months; ++t) {
        const auto [year, month] = from_month_index(start + static_cast<long>(t));
        double price = config.base + config.slope * static_cast<double>(t) +
                       config.amplitude * std::sin(two_pi * month / 12.0);
        if (config.noise_sigma > 0) price += detail::normal(rng, 0.0, config.noise_sigma);
        if (price <= 0) {
            price = 0.01;
            out.clamped.push_back(t);
        }
        out.series.points.push_back({year, month, price});
    }
    return out;
}

namespace detail {

struct CropProfile {
    const char* name;
    std::array<double, 7> mean;  // N, P, K, temperature, humidity, ph, rainfall
    double price;                // typical price per quintal
};

// Per-crop centres approximating the public crop recommendation corpus.
inline const std::array<CropProfile, 22>& crop_profiles() {
    static const std::array<CropProfile, 22> profiles{{
        {"apple", {20.8, 134.2, 199.9, 22.6, 92.3, 5.93, 112.7}, 9000},
        {"banana", {100.2, 82.0, 50.1, 27.4, 80.4, 5.98, 104.6}, 1800},
        {"blackgram", {40.0, 67.5, 19.2, 30.0, 65.1, 7.13, 67.9}, 6500},
        {"chickpea", {40.1, 67.8, 79.9, 18.9, 16.9, 7.34, 80.1}, 5200},
        {"coconut", {22.0, 16.9, 30.6, 27.4, 94.8, 5.98, 175.7}, 3000},
        {"coffee", {101.2, 28.7, 29.9, 25.5, 58.9, 6.79, 158.1}, 15000},
        {"cotton", {117.8, 46.2, 19.6, 24.0, 79.8, 6.91, 80.4}, 6600},
        {"grapes", {23.2, 132.5, 200.1, 23.8, 81.9, 6.03, 69.6}, 5500},
        {"jute", {78.4, 46.9, 40.0, 25.0, 79.6, 6.73, 174.8}, 4800},
        {"kidneybeans", {20.8, 67.5, 20.0, 20.1, 21.6, 5.75, 105.9}, 8000},
        {"lentil", {18.8, 68.4, 19.4, 24.5, 64.8, 6.93, 45.7}, 6000},
        {"maize", {77.8, 48.4, 19.8, 22.4, 65.1, 6.25, 84.8}, 2000},
        {"mango", {20.1, 27.2, 29.9, 31.2, 50.2, 5.77, 94.7}, 4000},
        {"mothbeans", {21.4, 48.0, 20.2, 28.2, 53.2, 6.83, 51.2}, 5800},
        {"mungbean", {21.0, 47.3, 19.9, 28.5, 85.5, 6.72, 48.4}, 7200},
        {"muskmelon", {100.3, 17.7, 50.1, 28.7, 92.3, 6.36, 24.7}, 1500},
        {"orange", {19.6, 16.6, 10.0, 22.8, 92.2, 7.02, 110.5}, 3500},
        {"papaya", {49.9, 59.1, 50.0, 33.7, 92.4, 6.74, 142.6}, 1600},
        {"pigeonpeas", {20.7, 67.7, 20.3, 27.7, 48.1, 5.79, 149.5}, 6800},
        {"pomegranate", {18.9, 18.8, 40.2, 21.8, 90.1, 6.43, 107.5}, 7000},
        {"rice", {79.9, 47.6, 39.9, 23.7, 82.3, 6.43, 236.2}, 2100},
        {"watermelon", {99.4, 17.0, 50.2, 25.6, 85.2, 6.50, 50.8}, 1200},
    }};
    return profiles;
}

// Standard deviations of the Gaussian spread around each crop centre.
inline constexpr std::array<double, 7> crop_spread{12.0, 8.0, 3.5, 2.5, 3.5, 0.5, 22.0};

}  // namespace detail

inline std::vector<std::string> synthetic_crop_names() {
    std::vector<std::string> names;
    for (const auto& p : detail::crop_profiles()) names.emplace_back(p.name);
    return names;
}

// 22 crops x rows_per_class rows. With with_price the market_price column is
// the crop's typical price with +-10% uniform noise.
inline LabeledDataset synth_crop_corpus(std::uint64_t seed, std::size_t rows_per_class = 100, bool with_price = true) {
    detail::Rng rng(seed);
    const auto schema = with_price ? benchmark_schema() : agronomic_schema();
    Matrix x(0, schema.arity());
    std::vector<std::string> labels;
    std::vector<double> row(schema.arity());
    for (const auto& crop : detail::crop_profiles()) {
        for (std::size_t r = 0; r < rows_per_class; ++r) {
            for (std::size_t j = 0; j < 7; ++j) {
                row[j] = detail::normal(rng, crop.mean[j], detail::crop_spread[j]);
            }
            for (std::size_t j : {0, 1, 2, 6}) row[j] = std::max(0.0, std::round(row[j] * 100) / 100);
            row[4] = std::clamp(row[4], 0.0, 100.0);
            row[5] = std::clamp(row[5], 0.0, 14.0);
            if (with_price) row[7] = std::round(crop.price * (0.9 + 0.2 * detail::uniform01(rng)));
            x.push_row(row);
            labels.emplace_back(crop.name);
        }
    }
    return LabeledDataset(schema, std::move(x), labels);
}

// Seven fertilizer grades keyed to nutrient deficits, over five soil types.
inline FertilizerDataset synth_fertilizer_corpus(std::uint64_t seed, std::size_t rows = 500) {
    struct Grade {
        const char* name;
        std::array<double, 3> npk;
    };
    static const std::array<Grade, 7> grades{{{"10-26-26", {10, 26, 26}},
                                              {"14-35-14", {14, 35, 14}},
                                              {"17-17-17", {17, 17, 17}},
                                              {"20-20", {20, 20, 5}},
                                              {"28-28", {28, 28, 2}},
                                              {"DAP", {18, 46, 0}},
                                              {"Urea", {46, 2, 0}}}};
    const std::vector<std::string> soils{"Black", "Clayey", "Loamy", "Red", "Sandy"};
    detail::Rng rng(seed);
    FertilizerDataset out;
    out.soil_types = soils;
    const auto schema = fertilizer_schema(soils);
    Matrix x(0, schema.arity());
    std::vector<std::string> labels;
    for (std::size_t r = 0; r < rows; ++r) {
        const auto& g = grades[r % grades.size()];
        FertilizerInput in;
        in.n = std::round(std::max(0.0, g.npk[0] + detail::normal(rng, 0, 2.5)));
        in.p = std::round(std::max(0.0, g.npk[1] + detail::normal(rng, 0, 2.5)));
        in.k = std::round(std::max(0.0, g.npk[2] + detail::normal(rng, 0, 2.5)));
        in.soil_type = soils[detail::uniform_index(rng, soils.size())];
        in.moisture = std::round(25 + 40 * detail::uniform01(rng));
        in.temperature = std::round(25 + 14 * detail::uniform01(rng));
        x.push_row(encode_fertilizer_input(soils, in));
        labels.emplace_back(g.name);
    }
    out.data = LabeledDataset(schema, std::move(x), labels);
    return out;
}

// 11 crops, 3,100 monthly prices in total, each with its own trend and a
// yearly cycle.
inline std::map<std::string, PriceSeries> synth_market_history(std::uint64_t seed) {
    static const std::array<const char*, 11> crops{"apple",  "banana", "chickpea", "coffee", "cotton", "grapes",
                                                   "jute",   "lentil", "maize",    "mango",  "rice"};
    std::map<std::string, double> typical;
    for (const auto& p : detail::crop_profiles()) typical[p.name] = p.price;
    std::map<std::string, PriceSeries> out;
    for (std::size_t c = 0; c < crops.size(); ++c) {
        SynthSeriesConfig cfg;
        cfg.crop_id = crops[c];
        cfg.base = typical[crops[c]];
        cfg.slope = cfg.base * (0.0005 + 0.0003 * static_cast<double>(c % 4));
        cfg.amplitude = cfg.base * 0.08;
        cfg.noise_sigma = cfg.base * 0.02;
        cfg.n_months = c < 9 ? 282 : 281;
        cfg.start_year = 2000;
        out[crops[c]] = synth_market_series(seed + c, cfg).series;
    }
    return out;
}

}  // namespace kisan

#endif  // KISAN_SYNTH_HPP
