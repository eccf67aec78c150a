#include <kisan/bundle.hpp>

#include <gtest/gtest.h>

#include <fstream>

#include "fixtures.hpp"

using namespace kisan;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spit(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
}

std::vector<std::vector<double>> random_inputs(std::size_t n, std::uint64_t seed) {
    detail::Rng rng(seed);
    std::vector<std::vector<double>> out;
    for (std::size_t i = 0; i < n; ++i)
        out.push_back({detail::uniform01(rng) * 140, detail::uniform01(rng) * 145, 5 + detail::uniform01(rng) * 200,
                       8 + detail::uniform01(rng) * 36, 14 + detail::uniform01(rng) * 86, 3.5 + detail::uniform01(rng) * 6,
                       20 + detail::uniform01(rng) * 280});
    return out;
}

}  // namespace

TEST(Bundle, RoundTripIsBitExactOnHundredInputs) {
    const auto bundle = fixture::small_bundle();
    fixture::TempDir dir;
    save_bundle(bundle, dir.file("m.json"));
    const auto loaded = load_bundle(dir.file("m.json"));
    EXPECT_EQ(loaded.crop_catalog(), bundle.crop_catalog());
    for (const auto& row : random_inputs(100, 42)) {
        const SoilSample soil{row[0], row[1], row[2], row[3], row[4], row[5], row[6]};
        const auto a = crop_suitability(bundle, soil);
        const auto b = crop_suitability(loaded, soil);
        ASSERT_EQ(a.size(), b.size());
        for (std::size_t c = 0; c < a.size(); ++c) EXPECT_EQ(a[c], b[c]);
        const auto ra = recommend(bundle, soil, {});
        const auto rb = recommend(loaded, soil, {});
        for (std::size_t c = 0; c < ra.recommendations.size(); ++c) {
            EXPECT_EQ(ra.recommendations[c].crop_id, rb.recommendations[c].crop_id);
            EXPECT_EQ(ra.recommendations[c].score, rb.recommendations[c].score);
        }
    }
}

TEST(Bundle, ReserializationIsStable) {
    const auto bundle = fixture::small_bundle(5);
    const auto text = bundle_to_json(bundle).dump();
    EXPECT_EQ(bundle_to_json(bundle_from_json(json::parse(text))).dump(), text);
}

TEST(Bundle, PriceModelsAndFertilizerSurvive) {
    const auto bundle = fixture::small_bundle(5);
    const auto loaded = bundle_from_json(bundle_to_json(bundle));
    ASSERT_EQ(loaded.price_models.size(), bundle.price_models.size());
    for (const auto& [crop, m] : bundle.price_models) {
        const auto fa = forecast_horizon(m, 6);
        const auto fb = forecast_horizon(loaded.price_models.at(crop), 6);
        for (std::size_t i = 0; i < fa.points.size(); ++i) EXPECT_EQ(fa.points[i].yhat, fb.points[i].yhat);
    }
    ASSERT_TRUE(loaded.fertilizer.has_value());
    EXPECT_EQ(loaded.fertilizer->soil_types, bundle.fertilizer->soil_types);
    const FertilizerInput in{37, 0, 0, "Loamy", 40, 26};
    EXPECT_EQ(recommend_fertilizer(*loaded.fertilizer, in).posterior,
              recommend_fertilizer(*bundle.fertilizer, in).posterior);
    EXPECT_EQ(loaded.fingerprints, bundle.fingerprints);
    EXPECT_EQ(loaded.created_at, bundle.created_at);
}

TEST(Bundle, UnsupportedVersion) {
    auto doc = bundle_to_json(fixture::comparison_bundle());
    doc["format_version"] = 999;
    try {
        bundle_from_json(doc);
        FAIL() << "expected DataError";
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("unsupported version 999"), std::string::npos);
    }
}

TEST(Bundle, TruncatedFileIsAParseError) {
    fixture::TempDir dir;
    save_bundle(fixture::comparison_bundle(), dir.file("m.json"));
    const auto text = slurp(dir.file("m.json"));
    spit(dir.file("cut.json"), text.substr(0, text.size() / 2));
    try {
        load_bundle(dir.file("cut.json"));
        FAIL() << "expected DataError";
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("parse error"), std::string::npos);
    }
}

TEST(Bundle, ChecksumMismatch) {
    auto doc = bundle_to_json(fixture::comparison_bundle());
    doc["payload"]["forecast_horizon"] = 7;
    try {
        bundle_from_json(doc);
        FAIL() << "expected DataError";
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("checksum mismatch"), std::string::npos);
    }
}

TEST(Bundle, WrongFormatAndMissingFields) {
    EXPECT_THROW(bundle_from_json(json{{"format", "other"}}), DataError);
    auto doc = bundle_to_json(fixture::comparison_bundle());
    doc["payload"].erase("price_models");
    doc["checksum"] = bundle_checksum(doc["payload"]);
    EXPECT_THROW(bundle_from_json(doc), DataError);
    EXPECT_THROW(load_bundle("/nonexistent/bundle.json"), DataError);
}

TEST(Bundle, ComparisonBundleRecommendsCropBAfterReload) {
    fixture::TempDir dir;
    save_bundle(fixture::comparison_bundle(), dir.file("m.json"));
    const auto r = recommend(load_bundle(dir.file("m.json")), fixture::any_soil(), {});
    EXPECT_EQ(r.optimal().crop_id, "Crop B");
    EXPECT_NEAR(r.optimal().score, 0.830, 1e-6);
}

TEST(Bundle, ForecastPricesFloorAtACent) {
    auto bundle = fixture::comparison_bundle();
    SynthSeriesConfig cfg;
    cfg.crop_id = "Crop D";
    cfg.base = 100;
    cfg.slope = -10;
    cfg.n_months = 12;
    bundle.price_models["Crop D"] = fit_price_model(synth_market_series(0, cfg).series, ForecastConfig{0, 0, 0});
    EXPECT_EQ(forecast_prices(bundle, 6).at("Crop D"), 0.01);
}
