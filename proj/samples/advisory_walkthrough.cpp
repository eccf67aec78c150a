// Walks through the advisory pipeline on the synthetic corpora: train a crop
// forest, fit price models, rank crops for one soil sample, then forecast the
// winner's price.
//
//   sample_advisory [trees]

#include <kisan.hpp>

#include <cstdio>
#include <cstdlib>
#include <iostream>

int main(int argc, char** argv) {
    using namespace kisan;
    const std::size_t trees = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 100;

    const auto corpus = synth_crop_corpus(42, 100, false);
    ModelBundle bundle;
    bundle.created_at = utc_timestamp();
    bundle.standardizer = fit_standardizer(corpus);
    ForestConfig forest;
    forest.n_trees = trees;
    bundle.crop_model = fit_random_forest(apply_standardizer(bundle.standardizer, corpus), forest);
    bundle.price_history = synth_market_history(42);
    for (const auto& [crop, series] : bundle.price_history)
        bundle.price_models[crop] = fit_price_model(series, bundle.forecast_config);
    std::printf("trained %zu trees over %zu crops; %zu price models\n", bundle.crop_model.trees().size(),
                bundle.crop_catalog().size(), bundle.price_models.size());

    const SoilSample soil{90, 42, 43, 20.8, 82.0, 6.5, 202.9};
    for (const ScoreWeights& w : {ScoreWeights{1.0, 0.0}, ScoreWeights{}}) {
        const auto advisory = recommend(bundle, soil, w);
        std::printf("\nweights w1=%.1f w2=%.1f\n", w.w1, w.w2);
        for (std::size_t i = 0; i < 5; ++i) {
            const auto& r = advisory.recommendations[i];
            std::printf("  %zu. %-12s score %.3f  p_yield %.3f  g_price %.3f%s\n", i + 1, r.crop_id.c_str(), r.score,
                        r.p_yield, r.g_price, r.market_data ? "" : "  (no market data)");
        }
    }

    const auto best = recommend(bundle, soil, {}).optimal().crop_id;
    if (const auto it = bundle.price_models.find(best); it != bundle.price_models.end()) {
        std::printf("\n6-month price forecast for %s\n", best.c_str());
        std::cout << forecast_horizon(it->second, 6).to_csv();
    }
    return 0;
}
