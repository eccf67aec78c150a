#ifndef KISAN_CLI_HPP
#define KISAN_CLI_HPP

// Operator command line: train, benchmark, forecast, recommend, serve, synth.
//
// Exit codes: 0 success, 1 usage error (unknown flag, bad flag value),
// 2 data error (missing or malformed file, unloadable bundle).

#include <kisan/benchmark.hpp>
#include <kisan/service.hpp>
#include <kisan/synth.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <ostream>

namespace kisan {

inline constexpr int exit_ok = 0;
inline constexpr int exit_usage = 1;
inline constexpr int exit_data = 2;

namespace detail {

struct ForestFlags {
    std::size_t trees = 500;
    std::string features = "sqrt";
    std::size_t max_depth = 0;  // 0 means unlimited
    std::size_t min_leaf = 1;
    std::uint64_t seed = 42;
    unsigned threads = 0;

    void add(CLI::App* app) {
        app->add_option("--trees", trees, "Trees in each forest")->capture_default_str()->check(CLI::PositiveNumber);
        app->add_option("--features", features, "Features tried per split: sqrt, all or an integer")
            ->capture_default_str();
        app->add_option("--max-depth", max_depth, "Maximum tree depth (0 = unlimited)")->capture_default_str();
        app->add_option("--min-leaf", min_leaf, "Minimum samples per leaf")
            ->capture_default_str()
            ->check(CLI::PositiveNumber);
        app->add_option("--seed", seed, "Random seed")->capture_default_str();
        app->add_option("--threads", threads, "Worker threads (0 = all cores)")->capture_default_str();
    }

    ForestConfig config() const {
        ForestConfig c;
        c.n_trees = trees;
        try {
            c.features_per_split = FeatureRule::parse(features);
        } catch (const Error& e) {
            throw ValidationError("features", e.what());
        }
        if (max_depth > 0) c.max_depth = max_depth;
        c.min_samples_leaf = min_leaf;
        c.seed = seed;
        c.threads = threads;
        return c;
    }
};

struct ForecastFlags {
    std::size_t changepoints = ForecastConfig{}.n_changepoints;
    std::size_t fourier = ForecastConfig{}.fourier_order;
    double ridge = ForecastConfig{}.ridge_lambda;

    void add(CLI::App* app) {
        app->add_option("--changepoints", changepoints, "Trend changepoints")->capture_default_str();
        app->add_option("--fourier-order", fourier, "Yearly Fourier order")->capture_default_str();
        app->add_option("--ridge", ridge, "Ridge penalty on seasonal terms")
            ->capture_default_str()
            ->check(CLI::NonNegativeNumber);
    }

    ForecastConfig config() const { return {changepoints, fourier, ridge}; }
};

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << text;
    if (!out) throw DataError("failed writing '" + path + "'");
}

inline std::string fixed3(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

inline std::map<std::string, PriceModel> fit_price_models(const std::map<std::string, PriceSeries>& history,
                                                          const ForecastConfig& config, std::ostream& err) {
    std::map<std::string, PriceModel> models;
    for (const auto& [crop, series] : history) {
        try {
            models[crop] = fit_price_model(series, config);
        } catch (const Error& e) {
            err << "warning: no price model for " << crop << ": " << e.what() << '\n';
        }
    }
    return models;
}

}  // namespace detail

// args excludes the program name.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Profit-aware crop advisory: train, benchmark, forecast, recommend, serve", "kisan"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for every subcommand");

    // train
    auto* train = app.add_subcommand("train", "Fit the crop forest, fertilizer forest and price models into a bundle");
    std::string train_data, train_fert, train_market, train_out;
    bool train_synthetic = false;
    int train_horizon = 6;
    detail::ForestFlags train_forest;
    detail::ForecastFlags train_fc;
    train->add_option("--data", train_data, "Crop CSV: N,P,K,temperature,humidity,ph,rainfall,label");
    train->add_option("--fertilizer", train_fert, "Fertilizer CSV: N,P,K,soil_type,moisture,temperature,label");
    train->add_option("--market", train_market, "Market CSV: crop,month,year,price");
    train->add_flag("--synthetic", train_synthetic, "Use the seeded synthetic corpora for any file not given");
    train->add_option("--out", train_out, "Bundle to write (*.kisan.json)")->required();
    train->add_option("--horizon", train_horizon, "Default forecast horizon in months")
        ->capture_default_str()
        ->check(CLI::Range(1, max_forecast_months));
    train_forest.add(train);
    train_fc.add(train);

    // benchmark
    auto* bench = app.add_subcommand("benchmark", "Compare the forest against the classical baselines");
    std::string bench_data, bench_json = "benchmark_report.json", bench_text = "benchmark_report.txt", bench_cm;
    bool bench_synthetic = false;
    std::size_t bench_rows = 100;
    double bench_fraction = 0.2;
    detail::ForestFlags bench_forest;
    bench->add_option("--data", bench_data, "Crop CSV with market_price: N,P,K,temperature,humidity,ph,rainfall,market_price,label");
    bench->add_flag("--synthetic", bench_synthetic, "Use the seeded synthetic crop corpus");
    bench->add_option("--rows-per-class", bench_rows, "Rows per crop for --synthetic")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    bench->add_option("--test-fraction", bench_fraction, "Held-out fraction")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
    bench->add_option("--out-json", bench_json, "JSON report")->capture_default_str();
    bench->add_option("--out-text", bench_text, "Text table")->capture_default_str();
    bench->add_option("--confusion-csv", bench_cm, "Champion confusion matrix CSV");
    bench_forest.add(bench);

    // forecast
    auto* fc = app.add_subcommand("forecast", "Forecast one crop's monthly price");
    std::string fc_crop, fc_bundle, fc_market, fc_out;
    int fc_months = 6;
    bool fc_csv = false;
    detail::ForecastFlags fc_flags;
    fc->add_option("crop", fc_crop, "Crop id")->required();
    fc->add_option("--months", fc_months, "Months ahead")
        ->capture_default_str()
        ->check(CLI::Range(1, max_forecast_months));
    fc->add_option("--bundle", fc_bundle, "Use the price model stored in this bundle");
    fc->add_option("--market", fc_market, "Fit on this market CSV instead of a bundle");
    fc->add_flag("--csv", fc_csv, "Print CSV instead of a table");
    fc->add_option("--out", fc_out, "Also write the forecast CSV here");
    fc_flags.add(fc);

    // recommend
    auto* rec = app.add_subcommand("recommend", "Rank crops for one soil sample using a bundle");
    std::string rec_bundle;
    SoilSample soil;
    std::optional<double> w1, w2;
    std::optional<int> rec_horizon;
    bool rec_json = false;
    rec->add_option("--bundle", rec_bundle, "Model bundle")->required();
    rec->add_option("--n", soil.n, "Nitrogen (kg/ha)")->required();
    rec->add_option("--p", soil.p, "Phosphorus (kg/ha)")->required();
    rec->add_option("--k", soil.k, "Potassium (kg/ha)")->required();
    rec->add_option("--temperature", soil.temperature, "Temperature (C)")->required();
    rec->add_option("--humidity", soil.humidity, "Relative humidity (%)")->required();
    rec->add_option("--ph", soil.ph, "Soil pH")->required();
    rec->add_option("--rainfall", soil.rainfall, "Rainfall (mm)")->required();
    rec->add_option("--w1", w1, "Weight on agronomic suitability (default 0.6)");
    rec->add_option("--w2", w2, "Weight on normalized price (default 0.4)");
    rec->add_option("--horizon", rec_horizon, "Forecast horizon in months")->check(CLI::Range(1, max_forecast_months));
    rec->add_flag("--json", rec_json, "Print the advisory as JSON");

    // serve
    auto* srv = app.add_subcommand("serve", "Serve a bundle over HTTP");
    ServiceFlags srv_flags;
    std::string srv_bundle, srv_bind, srv_bench;
    srv->add_option("--bundle", srv_bundle, "Model bundle (env KISAN_BUNDLE)");
    srv->add_option("--bind", srv_bind, "HOST:PORT (env KISAN_BIND, default 127.0.0.1:8080)");
    srv->add_option("--cors", srv_flags.cors, "Allowed CORS origin, repeatable (env KISAN_CORS, comma separated)");
    srv->add_option("--benchmark", srv_bench, "Benchmark JSON served at /api/v1/benchmark/latest (env KISAN_BENCHMARK)");

    // synth
    auto* syn = app.add_subcommand("synth", "Write a seeded synthetic corpus as CSV");
    std::string syn_kind = "crop", syn_out;
    std::uint64_t syn_seed = 42;
    std::size_t syn_rows = 100;
    bool syn_no_price = false;
    syn->add_option("--kind", syn_kind, "crop, fertilizer or market")
        ->capture_default_str()
        ->check(CLI::IsMember({"crop", "fertilizer", "market"}));
    syn->add_option("--seed", syn_seed, "Random seed")->capture_default_str();
    syn->add_option("--rows", syn_rows, "Rows per crop (crop) or total rows (fertilizer)")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    syn->add_flag("--no-price", syn_no_price, "Crop corpus without the market_price column");
    syn->add_option("--out", syn_out, "Output CSV (default: stdout)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        if (*train) {
            if (train_data.empty() && !train_synthetic) throw ValidationError("data", "--data or --synthetic is required");
            const auto forest_cfg = train_forest.config();
            const auto crop = train_data.empty() ? synth_crop_corpus(forest_cfg.seed, 100, false)
                                                 : load_crop_dataset(train_data, false);
            ModelBundle bundle;
            bundle.created_at = utc_timestamp();
            bundle.standardizer = fit_standardizer(crop);
            bundle.crop_model = fit_random_forest(apply_standardizer(bundle.standardizer, crop), forest_cfg);
            bundle.fingerprints.push_back(fingerprint(crop, train_data.empty() ? "synthetic-crop" : train_data));
            if (!train_fert.empty() || train_synthetic) {
                auto fert = train_fert.empty() ? synth_fertilizer_corpus(forest_cfg.seed)
                                               : load_fertilizer_dataset(train_fert);
                bundle.fingerprints.push_back(
                    fingerprint(fert.data, train_fert.empty() ? "synthetic-fertilizer" : train_fert));
                bundle.fertilizer = fit_fertilizer_model(fert.data, fert.soil_types, forest_cfg);
            }
            if (!train_market.empty() || train_synthetic) {
                bundle.price_history =
                    train_market.empty() ? synth_market_history(forest_cfg.seed) : load_market_history(train_market);
                bundle.forecast_config = train_fc.config();
                bundle.price_models = detail::fit_price_models(bundle.price_history, bundle.forecast_config, err);
            }
            bundle.forecast_horizon = train_horizon;
            save_bundle(bundle, train_out);
            out << "wrote " << train_out << ": " << bundle.crop_catalog().size() << " crops, "
                << bundle.crop_model.trees().size() << " trees, "
                << (bundle.fertilizer ? bundle.fertilizer->class_catalog().size() : 0) << " fertilizers, "
                << bundle.price_models.size() << " price models\n";
            return exit_ok;
        }

        if (*bench) {
            if (bench_data.empty() && !bench_synthetic)
                throw ValidationError("data", "--data or --synthetic is required");
            if (!(bench_fraction > 0 && bench_fraction < 1))
                throw ValidationError("test-fraction", "--test-fraction must be in (0,1)");
            const auto forest_cfg = bench_forest.config();
            const auto data = bench_data.empty() ? synth_crop_corpus(forest_cfg.seed, bench_rows, true)
                                                 : load_crop_dataset(bench_data, true);
            const auto report =
                run_benchmark(data, default_roster(forest_cfg, forest_cfg.seed), SplitSpec{bench_fraction, forest_cfg.seed});
            const auto text = report_to_text(report);
            detail::write_text_file(bench_json, report_to_json(report).dump(2) + "\n");
            detail::write_text_file(bench_text, text);
            if (!bench_cm.empty() && report.champion_confusion)
                detail::write_text_file(bench_cm, report.champion_confusion->to_csv());
            out << text;
            return exit_ok;
        }

        if (*fc) {
            if (fc_bundle.empty() == fc_market.empty())
                throw ValidationError("source", "exactly one of --bundle or --market is required");
            PriceModel model;
            if (!fc_bundle.empty()) {
                const auto bundle = load_bundle(fc_bundle);
                const auto it = bundle.price_models.find(fc_crop);
                if (it == bundle.price_models.end()) throw DataError("bundle has no price model for '" + fc_crop + "'");
                model = it->second;
            } else {
                const auto history = load_market_history(fc_market);
                const auto it = history.find(fc_crop);
                if (it == history.end()) throw DataError("no price history for '" + fc_crop + "' in " + fc_market);
                model = fit_price_model(it->second, fc_flags.config());
            }
            const auto result = forecast_horizon(model, fc_months);
            if (!fc_out.empty()) detail::write_text_file(fc_out, result.to_csv());
            if (fc_csv) {
                out << result.to_csv();
            } else {
                char buf[160];
                std::snprintf(buf, sizeof buf, "%-8s %10s %10s %10s %10s %10s\n", "month", "yhat", "trend",
                              "seasonal", "low", "high");
                out << "Forecast for " << fc_crop << ", " << fc_months << " months\n" << buf;
                for (const auto& p : result.points) {
                    std::snprintf(buf, sizeof buf, "%04d-%02d  %10.2f %10.2f %10.2f %10.2f %10.2f\n", p.year, p.month,
                                  p.yhat, p.trend, p.seasonal, p.interval_low, p.interval_high);
                    out << buf;
                }
            }
            return exit_ok;
        }

        if (*rec) {
            ScoreWeights weights;
            if (w1 && w2) {
                weights = {*w1, *w2};
            } else if (w1) {
                weights = {*w1, 1.0 - *w1};
            } else if (w2) {
                weights = {1.0 - *w2, *w2};
            }
            weights.validate();
            validate_soil_sample(soil);
            const auto bundle = load_bundle(rec_bundle);
            const auto advisory = recommend(bundle, soil, weights, rec_horizon);
            if (rec_json) {
                out << detail::advisory_json(advisory).dump(2) << '\n';
                return exit_ok;
            }
            out << advisory.optimal().crop_id << ' ' << detail::fixed3(advisory.optimal().score) << '\n';
            char buf[160];
            std::snprintf(buf, sizeof buf, "%-4s %-16s %7s %7s %7s  %s\n", "rank", "crop", "score", "p_yield",
                          "g_price", "status");
            out << buf;
            for (std::size_t i = 0; i < advisory.recommendations.size(); ++i) {
                const auto& r = advisory.recommendations[i];
                std::snprintf(buf, sizeof buf, "%-4zu %-16s %7.3f %7.3f %7.3f  %s%s\n", i + 1, r.crop_id.c_str(),
                              r.score, r.p_yield, r.g_price, i == 0 ? "optimal" : "rejected",
                              r.market_data ? "" : " (no market data)");
                out << buf;
            }
            return exit_ok;
        }

        if (*srv) {
            if (!srv_bundle.empty()) srv_flags.bundle = srv_bundle;
            if (!srv_bind.empty()) srv_flags.bind = srv_bind;
            if (!srv_bench.empty()) srv_flags.benchmark = srv_bench;
            return serve(resolve_service_config(srv_flags), err);
        }

        if (*syn) {
            std::ostringstream csv;
            if (syn_kind == "crop") {
                write_crop_dataset(csv, synth_crop_corpus(syn_seed, syn_rows, !syn_no_price));
            } else if (syn_kind == "fertilizer") {
                write_fertilizer_dataset(csv, synth_fertilizer_corpus(syn_seed, syn_rows));
            } else {
                write_market_history(csv, synth_market_history(syn_seed));
            }
            if (syn_out.empty()) {
                out << csv.str();
            } else {
                detail::write_text_file(syn_out, csv.str());
            }
            return exit_ok;
        }
    } catch (const ValidationError& e) {
        err << "usage error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_data;
    }
    return exit_usage;
}

inline int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run_cli(args, out, err);
}

}  // namespace kisan

#endif  // KISAN_CLI_HPP
