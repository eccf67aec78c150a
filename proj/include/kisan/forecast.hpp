#ifndef KISAN_FORECAST_HPP
#define KISAN_FORECAST_HPP

// Additive monthly price model: y(t) = g(t) + s(t) + e(t).
//
//   g(t)  piecewise-linear trend: intercept + slope*t + sum_j delta_j*max(0, t - c_j)
//   s(t)  yearly Fourier series in the calendar month:
//         sum_k a_k cos(2 pi k m / 12) + b_k sin(2 pi k m / 12)
//   e(t)  residual, summarized by its in-sample standard deviation
//
// Time t is the month index mapped affinely so the first observation is 0 and
// the last is 1. All coefficients are fitted jointly by least squares; only
// the seasonal coefficients carry the ridge penalty.

#include <kisan/core.hpp>

#include <cstdio>
#include <map>

namespace kisan {

struct PricePoint {
    int year = 0;
    int month = 1;  // 1-12
    double price = 0;

    bool operator==(const PricePoint&) const = default;
};

struct PriceSeries {
    std::string crop_id;
    std::vector<PricePoint> points;

    bool operator==(const PriceSeries&) const = default;
};

inline long month_index(int year, int month) { return static_cast<long>(year) * 12 + (month - 1); }

inline std::pair<int, int> from_month_index(long index) {
    const long year = index >= 0 ? index / 12 : (index - 11) / 12;
    return {static_cast<int>(year), static_cast<int>(index - year * 12) + 1};
}

inline void validate_price_series(const PriceSeries& series) {
    for (std::size_t i = 0; i < series.points.size(); ++i) {
        const auto& p = series.points[i];
        if (p.month < 1 || p.month > 12)
            throw DataError(series.crop_id + ": month " + std::to_string(p.month) + " outside 1-12");
        if (!(p.price > 0) || !std::isfinite(p.price))
            throw DataError(series.crop_id + ": price must be positive and finite");
        if (i > 0 && month_index(p.year, p.month) <= month_index(series.points[i - 1].year, series.points[i - 1].month))
            throw DataError(series.crop_id + ": points must be strictly increasing in (year, month)");
    }
}

inline constexpr std::size_t min_history_months = 8;
inline constexpr std::size_t min_seasonal_months = 24;

struct ForecastConfig {
    std::size_t n_changepoints = 4;
    std::size_t fourier_order = 3;
    double ridge_lambda = 0.1;

    bool operator==(const ForecastConfig&) const = default;
};

struct PriceModel {
    std::string crop_id;
    long t0 = 0;  // month index mapped to t = 0
    long t1 = 1;  // month index mapped to t = 1
    double intercept = 0;
    double slope = 0;  // per unit of scaled time
    std::vector<double> changepoints;  // scaled time, strictly inside (0, 1)
    std::vector<double> slope_deltas;
    std::size_t fourier_order = 0;
    std::vector<double> seasonal_cos;  // a_k, k = 1..order
    std::vector<double> seasonal_sin;  // b_k
    double ridge_lambda = 0;
    double residual_sigma = 0;
    int last_year = 0;
    int last_month = 1;

    double scaled_time(long index) const {
        return static_cast<double>(index - t0) / static_cast<double>(t1 - t0);
    }

    double trend(long index) const {
        const double t = scaled_time(index);
        double g = intercept + slope * t;
        for (std::size_t j = 0; j < changepoints.size(); ++j)
            g += slope_deltas[j] * std::max(0.0, t - changepoints[j]);
        return g;
    }

    double seasonal(int month) const {
        constexpr double two_pi = 6.283185307179586476925286766559;
        double s = 0;
        for (std::size_t k = 1; k <= fourier_order; ++k) {
            const double angle = two_pi * static_cast<double>(k) * month / 12.0;
            s += seasonal_cos[k - 1] * std::cos(angle) + seasonal_sin[k - 1] * std::sin(angle);
        }
        return s;
    }

    // Slope of the trend per month after the last changepoint.
    double final_slope_per_month() const {
        double s = slope;
        for (auto d : slope_deltas) s += d;
        return s / static_cast<double>(t1 - t0);
    }

    bool operator==(const PriceModel&) const = default;
};

namespace detail {

// Solves A x = b for symmetric positive definite A (row-major n x n).
inline std::vector<double> cholesky_solve(std::vector<double> a, std::vector<double> b, std::size_t n) {
    for (std::size_t j = 0; j < n; ++j) {
        double diag = a[j * n + j];
        for (std::size_t k = 0; k < j; ++k) diag -= a[j * n + k] * a[j * n + k];
        if (!(diag > 1e-12 * std::max(1.0, std::abs(a[j * n + j]))))
            throw Error("price model design matrix is singular");
        const double l = std::sqrt(diag);
        a[j * n + j] = l;
        for (std::size_t i = j + 1; i < n; ++i) {
            double v = a[i * n + j];
            for (std::size_t k = 0; k < j; ++k) v -= a[i * n + k] * a[j * n + k];
            a[i * n + j] = v / l;
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        double v = b[i];
        for (std::size_t k = 0; k < i; ++k) v -= a[i * n + k] * b[k];
        b[i] = v / a[i * n + i];
    }
    for (std::size_t i = n; i-- > 0;) {
        double v = b[i];
        for (std::size_t k = i + 1; k < n; ++k) v -= a[k * n + i] * b[k];
        b[i] = v / a[i * n + i];
    }
    return b;
}

}  // namespace detail

inline PriceModel fit_price_model(const PriceSeries& series, const ForecastConfig& config = {}) {
    validate_price_series(series);
    const std::size_t n = series.points.size();
    if (n < min_history_months)
        throw Error("insufficient history: " + series.crop_id + " has " + std::to_string(n) +
                    " points, need at least " + std::to_string(min_history_months));
    if (config.ridge_lambda < 0) throw Error("ridge_lambda must be >= 0");

    PriceModel model;
    model.crop_id = series.crop_id;
    model.t0 = month_index(series.points.front().year, series.points.front().month);
    model.t1 = month_index(series.points.back().year, series.points.back().month);
    model.last_year = series.points.back().year;
    model.last_month = series.points.back().month;
    model.ridge_lambda = config.ridge_lambda;
    model.fourier_order = n >= min_seasonal_months ? config.fourier_order : 0;

    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i)
        t[i] = model.scaled_time(month_index(series.points[i].year, series.points[i].month));

    // Changepoints at equally spaced quantiles of the observed times.
    for (std::size_t j = 1; j <= config.n_changepoints; ++j) {
        const double q = static_cast<double>(j) / static_cast<double>(config.n_changepoints + 1);
        const double pos = q * static_cast<double>(n - 1);
        const auto lo = static_cast<std::size_t>(pos);
        const double frac = pos - static_cast<double>(lo);
        const double c = lo + 1 < n ? t[lo] + frac * (t[lo + 1] - t[lo]) : t[lo];
        if (c > 0 && c < 1 && (model.changepoints.empty() || c > model.changepoints.back()))
            model.changepoints.push_back(c);
    }

    const std::size_t n_trend = 2 + model.changepoints.size();
    const std::size_t p = n_trend + 2 * model.fourier_order;
    constexpr double two_pi = 6.283185307179586476925286766559;
    auto design_row = [&](std::size_t i, std::vector<double>& row) {
        row[0] = 1.0;
        row[1] = t[i];
        for (std::size_t j = 0; j < model.changepoints.size(); ++j)
            row[2 + j] = std::max(0.0, t[i] - model.changepoints[j]);
        for (std::size_t k = 1; k <= model.fourier_order; ++k) {
            const double angle = two_pi * static_cast<double>(k) * series.points[i].month / 12.0;
            row[n_trend + 2 * (k - 1)] = std::cos(angle);
            row[n_trend + 2 * (k - 1) + 1] = std::sin(angle);
        }
    };

    std::vector<double> ata(p * p, 0.0), atb(p, 0.0), row(p);
    for (std::size_t i = 0; i < n; ++i) {
        design_row(i, row);
        for (std::size_t a = 0; a < p; ++a) {
            atb[a] += row[a] * series.points[i].price;
            for (std::size_t b = 0; b < p; ++b) ata[a * p + b] += row[a] * row[b];
        }
    }
    for (std::size_t a = n_trend; a < p; ++a) ata[a * p + a] += config.ridge_lambda;
    const auto beta = detail::cholesky_solve(std::move(ata), std::move(atb), p);

    model.intercept = beta[0];
    model.slope = beta[1];
    model.slope_deltas.assign(beta.begin() + 2, beta.begin() + static_cast<std::ptrdiff_t>(n_trend));
    for (std::size_t k = 0; k < model.fourier_order; ++k) {
        model.seasonal_cos.push_back(beta[n_trend + 2 * k]);
        model.seasonal_sin.push_back(beta[n_trend + 2 * k + 1]);
    }

    double ss = 0;
    for (const auto& pt : series.points) {
        const double r = pt.price - (model.trend(month_index(pt.year, pt.month)) + model.seasonal(pt.month));
        ss += r * r;
    }
    model.residual_sigma = std::sqrt(ss / static_cast<double>(n));
    return model;
}

struct Decomposition {
    double trend = 0;
    double seasonal = 0;
};

inline Decomposition decompose(const PriceModel& model, int year, int month) {
    return {model.trend(month_index(year, month)), model.seasonal(month)};
}

inline double predict_price(const PriceModel& model, int year, int month) {
    const auto d = decompose(model, year, month);
    return d.trend + d.seasonal;
}

inline constexpr double interval_z = 1.96;

struct ForecastPoint {
    int year = 0;
    int month = 1;
    double yhat = 0;
    double trend = 0;
    double seasonal = 0;
    double interval_low = 0;
    double interval_high = 0;
};

struct ForecastResult {
    std::string crop_id;
    std::vector<ForecastPoint> points;

    std::string to_csv() const {
        std::string out = "crop,year,month,yhat,trend,seasonal,interval_low,interval_high\n";
        char buf[512];
        for (const auto& p : points) {
            std::snprintf(buf, sizeof buf, "%s,%d,%d,%.6f,%.6f,%.6f,%.6f,%.6f\n", crop_id.c_str(), p.year, p.month,
                          p.yhat, p.trend, p.seasonal, p.interval_low, p.interval_high);
            out += buf;
        }
        return out;
    }
};

// Forecast for the `months` calendar months after the last observation.
inline ForecastResult forecast_horizon(const PriceModel& model, int months = 6) {
    if (months < 1) throw Error("forecast horizon must be >= 1 month");
    ForecastResult result{model.crop_id, {}};
    const long last = month_index(model.last_year, model.last_month);
    const double half_width = interval_z * model.residual_sigma;
    for (int h = 1; h <= months; ++h) {
        const auto [year, month] = from_month_index(last + h);
        const auto d = decompose(model, year, month);
        const double yhat = d.trend + d.seasonal;
        result.points.push_back({year, month, yhat, d.trend, d.seasonal, yhat - half_width, yhat + half_width});
    }
    return result;
}

struct BacktestResult {
    double mape = 0;
    double mae = 0;
};

// Fit on all but the last `holdout_months` points and score the forecast of
// the held-out tail.
inline BacktestResult backtest(const PriceSeries& series, std::size_t holdout_months, const ForecastConfig& config = {}) {
    if (holdout_months < 1) throw Error("backtest holdout must be >= 1 month");
    if (holdout_months >= series.points.size() || series.points.size() - holdout_months < min_history_months)
        throw Error("insufficient history for a " + std::to_string(holdout_months) + "-month backtest of " +
                    series.crop_id);
    PriceSeries prefix{series.crop_id,
                       {series.points.begin(), series.points.end() - static_cast<std::ptrdiff_t>(holdout_months)}};
    const auto model = fit_price_model(prefix, config);
    BacktestResult result;
    for (std::size_t i = series.points.size() - holdout_months; i < series.points.size(); ++i) {
        const auto& pt = series.points[i];
        const double err = std::abs(predict_price(model, pt.year, pt.month) - pt.price);
        result.mae += err;
        result.mape += err / pt.price;
    }
    result.mae /= static_cast<double>(holdout_months);
    result.mape /= static_cast<double>(holdout_months);
    return result;
}

// Min-max normalization across the candidate crops. When every price is the
// same each crop gets the neutral 0.5.
inline std::map<std::string, double> price_scores(const std::map<std::string, double>& forecasts) {
    if (forecasts.empty()) throw Error("price scores need at least one crop");
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& [crop, price] : forecasts) {
        if (!(price > 0) || !std::isfinite(price))
            throw Error("forecast price for '" + crop + "' must be positive");
        lo = std::min(lo, price);
        hi = std::max(hi, price);
    }
    std::map<std::string, double> out;
    for (const auto& [crop, price] : forecasts) out[crop] = hi > lo ? (price - lo) / (hi - lo) : 0.5;
    return out;
}

}  // namespace kisan

#endif  // KISAN_FORECAST_HPP
