#include <kisan/bundle.hpp>
#include <kisan/synth.hpp>

#include <gtest/gtest.h>

#include <numeric>

#include "fixtures.hpp"

using namespace kisan;

TEST(CompositeScore, DefaultWeights) {
    EXPECT_NEAR(composite_score(0.98, 0.15), 0.648, 1e-9);
    EXPECT_NEAR(composite_score(0.85, 0.80), 0.830, 1e-9);
}

TEST(CompositeScore, PerfectInputsScoreOne) {
    EXPECT_DOUBLE_EQ(composite_score(1, 1), 1.0);
    EXPECT_DOUBLE_EQ(composite_score(0, 0), 0.0);
    EXPECT_DOUBLE_EQ(composite_score(0.3, 0.9, {1, 0}), 0.3);
}

TEST(CompositeScore, RejectsOutOfRangeInputs) {
    EXPECT_THROW(composite_score(1.1, 0.5), ValidationError);
    EXPECT_THROW(composite_score(0.5, -0.1), ValidationError);
}

TEST(ScoreWeights, Validation) {
    EXPECT_NO_THROW((ScoreWeights{0.6, 0.4}.validate()));
    EXPECT_NO_THROW((ScoreWeights{1, 0}.validate()));
    try {
        ScoreWeights{0.7, 0.4}.validate();
        FAIL() << "expected ValidationError";
    } catch (const ValidationError& e) {
        EXPECT_EQ(e.errors()[0].field, "weights");
    }
    EXPECT_THROW((ScoreWeights{-0.5, 1.5}.validate()), ValidationError);
    EXPECT_THROW((ScoreWeights{std::nan(""), 1}.validate()), ValidationError);
}

TEST(RankCrops, HigherCompositeWinsOverHigherSuitability) {
    const std::vector<std::string> catalog{"Crop A", "Crop B"};
    const std::vector<double> p{0.98, 0.85};
    const auto r = rank_crops(catalog, p, {{"Crop A", 0.15}, {"Crop B", 0.80}});
    ASSERT_EQ(r.recommendations.size(), 2u);
    EXPECT_EQ(r.optimal().crop_id, "Crop B");
    EXPECT_NEAR(r.recommendations[0].score, 0.830, 1e-9);
    EXPECT_NEAR(r.recommendations[1].score, 0.648, 1e-9);
}

TEST(RankCrops, AgronomicOnlyWeightsFollowThePosterior) {
    detail::Rng rng(3);
    std::vector<std::string> catalog;
    std::vector<double> p;
    std::map<std::string, double> g;
    for (int c = 0; c < 22; ++c) {
        catalog.push_back("crop" + std::to_string(10 + c));
        p.push_back(detail::uniform01(rng));
        g[catalog.back()] = detail::uniform01(rng);
    }
    const auto r = rank_crops(catalog, p, g, {1, 0});
    std::vector<std::size_t> order(p.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return p[a] > p[b]; });
    for (std::size_t i = 0; i < order.size(); ++i) EXPECT_EQ(r.recommendations[i].crop_id, catalog[order[i]]);
}

TEST(RankCrops, FullTiesFallBackToCropName) {
    const std::vector<std::string> catalog{"wheat", "barley", "maize"};
    const std::vector<double> p(3, 1.0 / 3.0);
    const auto r = rank_crops(catalog, p, {{"wheat", 0.5}, {"barley", 0.5}, {"maize", 0.5}});
    EXPECT_EQ(r.recommendations[0].crop_id, "barley");
    EXPECT_EQ(r.recommendations[1].crop_id, "maize");
    EXPECT_EQ(r.recommendations[2].crop_id, "wheat");
}

TEST(RankCrops, ScoreTieGoesToHigherSuitability) {
    const std::vector<std::string> catalog{"a", "b"};
    const std::vector<double> p{0.5, 0.75};
    const auto r = rank_crops(catalog, p, {{"a", 0.75}, {"b", 0.5}}, {0.5, 0.5});
    ASSERT_EQ(r.recommendations[0].score, r.recommendations[1].score);
    EXPECT_EQ(r.optimal().crop_id, "b");
}

TEST(RankCrops, MissingPriceGetsNeutralScore) {
    const std::vector<std::string> catalog{"a", "b"};
    const std::vector<double> p{0.5, 0.5};
    const auto r = rank_crops(catalog, p, {{"a", 1.0}});
    const auto& b = r.recommendations[1];
    EXPECT_EQ(b.crop_id, "b");
    EXPECT_FALSE(b.market_data);
    EXPECT_EQ(b.g_price, neutral_price_score);
    EXPECT_TRUE(r.recommendations[0].market_data);
}

TEST(RankCrops, RejectsMismatchAndEmpty) {
    const std::vector<double> p{1.0};
    EXPECT_THROW(rank_crops({"a", "b"}, p, {}), Error);
    EXPECT_THROW(rank_crops({}, std::vector<double>{}, {}), Error);
    EXPECT_THROW(rank_crops({"a"}, p, {}, {0.5, 0.6}), ValidationError);
}

TEST(Recommend, ComparisonBundleRanksCropBFirst) {
    const auto bundle = fixture::comparison_bundle();
    const auto r = recommend(bundle, fixture::any_soil(), {});
    EXPECT_EQ(r.optimal().crop_id, "Crop B");
    EXPECT_NEAR(r.optimal().p_yield, 0.85, 1e-9);
    EXPECT_NEAR(r.optimal().g_price, 0.80, 1e-6);
    EXPECT_NEAR(r.optimal().score, 0.830, 1e-6);
    EXPECT_EQ(r.horizon_months, 6);
    ASSERT_TRUE(r.soil.has_value());
}

TEST(Recommend, AgronomicWeightsOnSmallBundle) {
    const auto bundle = fixture::small_bundle();
    const auto soil = fixture::any_soil();
    const auto p = crop_suitability(bundle, soil);
    const auto r = recommend(bundle, soil, {1, 0});
    const auto& catalog = bundle.crop_catalog();
    EXPECT_EQ(r.optimal().crop_id, catalog[detail::argmax_first(p)]);
    for (std::size_t i = 1; i < r.recommendations.size(); ++i)
        EXPECT_GE(r.recommendations[i - 1].p_yield, r.recommendations[i].p_yield);
}

TEST(Recommend, InvalidSoilAndHorizon) {
    const auto bundle = fixture::comparison_bundle();
    auto soil = fixture::any_soil();
    soil.ph = 20;
    EXPECT_THROW(recommend(bundle, soil, {}), ValidationError);
    EXPECT_THROW(recommend(bundle, fixture::any_soil(), {}, 0), ValidationError);
}

TEST(Fertilizer, OneHotEncoding) {
    const std::vector<std::string> soils{"Black", "Clayey", "Loamy", "Red", "Sandy"};
    const auto v = encode_fertilizer_input(soils, {37, 0, 0, "Loamy", 40, 26});
    EXPECT_EQ(v, (std::vector<double>{37, 0, 0, 40, 26, 0, 0, 1, 0, 0}));
}

TEST(Fertilizer, UnknownSoilTypeIsAFieldError) {
    const std::vector<std::string> soils{"Black", "Red"};
    try {
        encode_fertilizer_input(soils, {1, 1, 1, "Peaty", 10, 20});
        FAIL() << "expected ValidationError";
    } catch (const ValidationError& e) {
        EXPECT_EQ(e.errors()[0].field, "soil_type");
        EXPECT_NE(e.errors()[0].message.find("Peaty"), std::string::npos);
    }
}

TEST(Fertilizer, RecommendReturnsAPosterior) {
    const auto bundle = fixture::small_bundle();
    ASSERT_TRUE(bundle.fertilizer.has_value());
    const auto& model = *bundle.fertilizer;
    const auto advice = recommend_fertilizer(model, FertilizerInput{37, 0, 0, model.soil_types.front(), 40, 26});
    double total = 0;
    for (const auto& [name, prob] : advice.posterior) total += prob;
    EXPECT_NEAR(total, 1.0, 1e-9);
    EXPECT_EQ(advice.posterior.size(), model.class_catalog().size());
    EXPECT_THROW(recommend_fertilizer(model, FertilizerInput{-1, 0, 0, model.soil_types.front(), 140, 26}),
                 ValidationError);
}
