#include <kisan/synth.hpp>

#include <gtest/gtest.h>

#include <cmath>

#include "oracle_values.hpp"

using namespace kisan;

namespace {

constexpr double two_pi = 6.283185307179586476925286766559;

PriceSeries line_series(std::size_t months) {
    SynthSeriesConfig cfg;
    cfg.crop_id = "line";
    cfg.base = 10;
    cfg.slope = 2;
    cfg.n_months = months;
    return synth_market_series(0, cfg).series;
}

PriceSeries sine_series(std::size_t months = 36, double noise = 0, double slope = 0) {
    SynthSeriesConfig cfg;
    cfg.crop_id = "sine";
    cfg.base = 100;
    cfg.slope = slope;
    cfg.amplitude = 10;
    cfg.noise_sigma = noise;
    cfg.n_months = months;
    return synth_market_series(7, cfg).series;
}

double correlation(const std::vector<double>& a, const std::vector<double>& b) {
    double ma = 0, mb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= static_cast<double>(a.size());
    mb /= static_cast<double>(b.size());
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

}  // namespace

TEST(Calendar, MonthIndexRoundTrips) {
    for (int y : {1999, 2000, 2024})
        for (int m = 1; m <= 12; ++m) {
            const auto [yy, mm] = from_month_index(month_index(y, m));
            EXPECT_EQ(yy, y);
            EXPECT_EQ(mm, m);
        }
    EXPECT_EQ(month_index(2024, 1) - month_index(2023, 12), 1);
}

TEST(Synth, NoNoiseNoAmplitudeIsAnExactLine) {
    const auto s = line_series(12);
    for (std::size_t t = 0; t < s.points.size(); ++t) EXPECT_DOUBLE_EQ(s.points[t].price, 10.0 + 2.0 * t);
    EXPECT_EQ(s.points.front().year, 2020);
    EXPECT_EQ(s.points.front().month, 1);
    EXPECT_EQ(s.points.back().month, 12);
}

TEST(Synth, SameSeedSameSeries) {
    EXPECT_EQ(sine_series(48, 3).points.size(), 48u);
    const auto a = sine_series(48, 3), b = sine_series(48, 3);
    for (std::size_t i = 0; i < a.points.size(); ++i) EXPECT_EQ(a.points[i].price, b.points[i].price);
}

TEST(Synth, MonthThreeMinusMonthNineGapIsTwiceTheAmplitude) {
    const auto s = sine_series(12 * 40, 1.0);
    double m3 = 0, m9 = 0;
    int n3 = 0, n9 = 0;
    for (const auto& p : s.points) {
        if (p.month == 3) m3 += p.price, ++n3;
        if (p.month == 9) m9 += p.price, ++n9;
    }
    EXPECT_NEAR(m3 / n3 - m9 / n9, 20.0, 1.0);
}

TEST(Synth, NonPositivePricesAreClampedAndRecorded) {
    SynthSeriesConfig cfg;
    cfg.base = 1;
    cfg.slope = -1;
    cfg.n_months = 5;
    const auto s = synth_market_series(0, cfg);
    EXPECT_EQ(s.clamped, (std::vector<std::size_t>{1, 2, 3, 4}));
    EXPECT_DOUBLE_EQ(s.series.points[4].price, 0.01);
}

TEST(Fit, LineWithoutSeasonalityRecoversSlope) {
    ForecastConfig cfg{0, 0, 0.0};
    const auto m = fit_price_model(line_series(25), cfg);
    EXPECT_TRUE(m.seasonal_cos.empty());
    EXPECT_TRUE(m.changepoints.empty());
    EXPECT_NEAR(m.final_slope_per_month(), oracle::line_slope, 1e-6);
}

TEST(Fit, LineForecastSixMonthsAhead) {
    const auto m = fit_price_model(line_series(25), ForecastConfig{0, 0, 0.0});
    const auto f = forecast_horizon(m, 6);
    EXPECT_NEAR(f.points.back().yhat, 70.0, 0.7);
    EXPECT_NEAR(f.points.back().yhat, oracle::line_at_plus6, 1e-6);
}

TEST(Fit, DefaultConfigStillFollowsALine) {
    const auto m = fit_price_model(line_series(36));
    EXPECT_NEAR(forecast_horizon(m, 6).points.back().yhat, 10 + 2 * 41, 0.8);
}

TEST(Fit, ConstantSeries) {
    SynthSeriesConfig cfg;
    cfg.base = 100;
    const auto m = fit_price_model(synth_market_series(0, cfg).series);
    ASSERT_EQ(m.fourier_order, 3u);
    for (std::size_t k = 0; k < m.fourier_order; ++k) {
        EXPECT_LE(std::abs(m.seasonal_cos[k]), 1e-6);
        EXPECT_LE(std::abs(m.seasonal_sin[k]), 1e-6);
    }
    const auto f = forecast_horizon(m, 6);
    for (const auto& p : f.points) {
        EXPECT_NEAR(p.yhat, 100.0, 1e-6);
        EXPECT_NEAR(p.trend, 100.0, 1e-6);
        EXPECT_NEAR(p.seasonal, 0.0, 1e-6);
    }
}

TEST(Fit, SineSeasonalityIsRecovered) {
    const auto m = fit_price_model(sine_series());
    std::vector<double> fitted, truth;
    for (int month = 1; month <= 12; ++month) {
        fitted.push_back(m.seasonal(month));
        truth.push_back(10 * std::sin(two_pi * month / 12.0));
    }
    EXPECT_GE(correlation(fitted, truth), 0.99);
    EXPECT_NEAR(m.seasonal(3), 10.0, 0.5);
    EXPECT_NEAR(m.seasonal(9), -10.0, 0.5);
}

TEST(Fit, ShortHistoryDisablesSeasonalityAndTooShortIsAnError) {
    EXPECT_EQ(fit_price_model(sine_series(23)).fourier_order, 0u);
    EXPECT_EQ(fit_price_model(sine_series(24)).fourier_order, 3u);
    EXPECT_THROW(fit_price_model(sine_series(7)), Error);
    EXPECT_NO_THROW(fit_price_model(sine_series(8)));
}

TEST(Fit, RejectsUnsortedOrInvalidSeries) {
    auto s = sine_series(24);
    std::swap(s.points[3], s.points[4]);
    EXPECT_THROW(fit_price_model(s), DataError);
    s = sine_series(24);
    s.points[2].price = -1;
    EXPECT_THROW(fit_price_model(s), DataError);
}

TEST(Forecast, SixConsecutiveMonthsWithDecemberWrap) {
    auto s = sine_series(30);
    const auto m = fit_price_model(s);
    EXPECT_EQ(m.last_year, 2022);
    EXPECT_EQ(m.last_month, 6);
    const auto f = forecast_horizon(m, 6);
    ASSERT_EQ(f.points.size(), 6u);
    const int expect[6][2] = {{2022, 7}, {2022, 8}, {2022, 9}, {2022, 10}, {2022, 11}, {2022, 12}};
    for (int i = 0; i < 6; ++i) {
        EXPECT_EQ(f.points[i].year, expect[i][0]);
        EXPECT_EQ(f.points[i].month, expect[i][1]);
    }
    const auto g = forecast_horizon(m, 8);
    EXPECT_EQ(g.points[6].year, 2023);
    EXPECT_EQ(g.points[6].month, 1);
    EXPECT_THROW(forecast_horizon(m, 0), Error);
}

TEST(Forecast, IntervalIsSymmetricAroundYhat) {
    const auto m = fit_price_model(sine_series(48, 2.0, 0.5));
    EXPECT_GT(m.residual_sigma, 0.0);
    for (const auto& p : forecast_horizon(m, 6).points) {
        EXPECT_NEAR(p.yhat - p.interval_low, 1.96 * m.residual_sigma, 1e-9);
        EXPECT_NEAR(p.interval_high - p.yhat, 1.96 * m.residual_sigma, 1e-9);
    }
}

TEST(Decompose, TrendPlusSeasonalIsYhat) {
    const auto m = fit_price_model(sine_series(60, 1.5, 0.7));
    for (int y = 2019; y <= 2026; ++y)
        for (int month = 1; month <= 12; ++month) {
            const auto d = decompose(m, y, month);
            EXPECT_NEAR(d.trend + d.seasonal, predict_price(m, y, month), 1e-12);
        }
    for (const auto& p : forecast_horizon(m, 12).points) EXPECT_EQ(p.trend + p.seasonal, p.yhat);
}

TEST(Backtest, PerfectForecastHasZeroError) {
    const auto r = backtest(line_series(30), 6, ForecastConfig{0, 0, 0.0});
    EXPECT_NEAR(r.mape, 0.0, 1e-9);
    EXPECT_NEAR(r.mae, 0.0, 1e-9);
}

TEST(Backtest, NoisyTrendPlusSineStaysWithinFivePercent) {
    SynthSeriesConfig cfg;
    cfg.base = 100;
    cfg.slope = 2;
    cfg.amplitude = 10;
    cfg.noise_sigma = 1;
    cfg.n_months = 36;
    const auto r = backtest(synth_market_series(42, cfg).series, 6);
    EXPECT_LE(r.mape, 0.05);
}

TEST(Backtest, HoldoutLongerThanSeriesIsAnError) {
    EXPECT_THROW(backtest(line_series(10), 12), Error);
    EXPECT_THROW(backtest(line_series(10), 0), Error);
}

TEST(PriceScores, LinearMap) {
    const auto g = price_scores({{"rice", 100}, {"maize", 200}, {"cotton", 150}});
    EXPECT_EQ(g.at("rice"), 0.0);
    EXPECT_EQ(g.at("maize"), 1.0);
    EXPECT_EQ(g.at("cotton"), 0.5);
}

TEST(PriceScores, EqualPricesAndSingleCropAreNeutral) {
    for (const auto& [crop, v] : price_scores({{"a", 7}, {"b", 7}, {"c", 7}})) EXPECT_EQ(v, 0.5) << crop;
    EXPECT_EQ(price_scores({{"only", 42}}).at("only"), 0.5);
}

TEST(PriceScores, RejectsEmptyAndNonPositive) {
    EXPECT_THROW(price_scores({}), Error);
    EXPECT_THROW(price_scores({{"a", 0}}), Error);
}

TEST(PriceScores, StayInUnitIntervalOnRandomInput) {
    detail::Rng rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        std::map<std::string, double> prices;
        const auto n = 1 + detail::uniform_index(rng, 10);
        for (std::size_t i = 0; i < n; ++i) prices["c" + std::to_string(i)] = 1 + 1000 * detail::uniform01(rng);
        for (const auto& [c, v] : price_scores(prices)) {
            EXPECT_GE(v, 0.0);
            EXPECT_LE(v, 1.0);
        }
    }
}
