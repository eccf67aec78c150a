#ifndef KISAN_FOREST_HPP
#define KISAN_FOREST_HPP

// Random Forest over Gini trees.
//
// Tree t draws its bootstrap sample and its per-node feature subsets from a
// generator seeded with (seed + t), so trees can be grown in any order or in
// parallel and the forest is still identical.

#include <kisan/tree.hpp>

#include <atomic>
#include <mutex>
#include <thread>

namespace kisan {

struct ForestConfig {
    std::size_t n_trees = 500;
    FeatureRule features_per_split = FeatureRule::square_root();
    std::optional<std::size_t> max_depth;
    std::size_t min_samples_leaf = 1;
    bool bootstrap = true;
    std::uint64_t seed = 42;
    // 0 picks hardware concurrency. Not part of the fitted model's identity.
    unsigned threads = 0;

    void validate(std::size_t arity) const {
        if (n_trees < 1) throw Error("n_trees must be >= 1");
        if (min_samples_leaf < 1) throw Error("min_samples_leaf must be >= 1");
        features_per_split.resolve(arity);
    }
};

class RandomForestModel {
public:
    RandomForestModel() = default;
    RandomForestModel(std::vector<DecisionTree> trees, std::vector<std::string> catalog,
                      FeatureSchema schema, ForestConfig config,
                      std::vector<std::vector<bool>> oob_masks)
        : trees_(std::move(trees)), catalog_(std::move(catalog)), schema_(std::move(schema)),
          config_(config), oob_masks_(std::move(oob_masks)) {}

    const std::vector<DecisionTree>& trees() const noexcept { return trees_; }
    const std::vector<std::string>& class_catalog() const noexcept { return catalog_; }
    const FeatureSchema& schema() const noexcept { return schema_; }
    std::size_t arity() const noexcept { return schema_.arity(); }
    const ForestConfig& config() const noexcept { return config_; }
    // oob_masks()[t][i] is true when training row i was out-of-bag for tree t.
    // Empty when the forest was grown without bootstrap.
    const std::vector<std::vector<bool>>& oob_masks() const noexcept { return oob_masks_; }

    std::vector<double> predict_proba(std::span<const double> x) const {
        detail::check_arity(arity(), x.size());
        std::vector<double> p(catalog_.size(), 0.0);
        for (const auto& tree : trees_) tree.accumulate_proba(x, p);
        const double n = static_cast<double>(trees_.size());
        for (auto& v : p) v /= n;
        return p;
    }

private:
    std::vector<DecisionTree> trees_;
    std::vector<std::string> catalog_;
    FeatureSchema schema_;
    ForestConfig config_;
    std::vector<std::vector<bool>> oob_masks_;
};

inline RandomForestModel fit_random_forest(const LabeledDataset& train, const ForestConfig& config = {}) {
    if (train.empty()) throw Error("cannot fit a random forest on an empty training set");
    config.validate(train.arity());

    const std::size_t n = train.size();
    std::vector<DecisionTree> trees(config.n_trees);
    std::vector<std::vector<bool>> masks(config.bootstrap ? config.n_trees : 0);
    const TreeConfig tree_config{config.max_depth, config.min_samples_leaf, config.features_per_split};

    auto grow = [&](std::size_t t) {
        detail::Rng rng(config.seed + t);
        std::vector<std::size_t> index(n);
        if (config.bootstrap) {
            std::vector<bool> in_bag(n, false);
            for (auto& i : index) {
                i = static_cast<std::size_t>(detail::uniform_index(rng, n));
                in_bag[i] = true;
            }
            masks[t].resize(n);
            for (std::size_t i = 0; i < n; ++i) masks[t][i] = !in_bag[i];
        } else {
            std::iota(index.begin(), index.end(), std::size_t{0});
        }
        detail::TreeBuilder builder(train.features(), train.labels(), train.num_classes(), tree_config, &rng);
        trees[t] = builder.build(std::move(index));
    };

    unsigned threads = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, config.n_trees));
    if (threads <= 1) {
        for (std::size_t t = 0; t < config.n_trees; ++t) grow(t);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        std::exception_ptr failure;
        std::mutex failure_mutex;
        for (unsigned w = 0; w < threads; ++w) {
            pool.emplace_back([&] {
                try {
                    for (std::size_t t; (t = next.fetch_add(1)) < config.n_trees;) grow(t);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    failure = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        if (failure) std::rethrow_exception(failure);
    }

    return RandomForestModel(std::move(trees), train.class_catalog(), train.schema(), config,
                             std::move(masks));
}

inline std::vector<double> predict_proba(const RandomForestModel& model, std::span<const double> x) {
    return model.predict_proba(x);
}

// Per training row: the OOB posterior (mean leaf frequency over the trees
// that did not see the row) and the OOB majority vote. Rows that were in-bag
// for every tree have no trees and no prediction.
struct OobPrediction {
    std::size_t trees = 0;
    std::size_t vote = 0;
    std::vector<double> posterior;
};

inline std::vector<OobPrediction> oob_predictions(const RandomForestModel& model,
                                                  const LabeledDataset& train) {
    if (model.oob_masks().empty())
        throw Error("OOB undefined: forest was grown without bootstrap");
    const auto& masks = model.oob_masks();
    if (masks.front().size() != train.size())
        throw Error("OOB masks cover " + std::to_string(masks.front().size()) +
                    " rows, training set has " + std::to_string(train.size()));
    const std::size_t k = model.class_catalog().size();
    std::vector<OobPrediction> out(train.size());
    std::vector<std::size_t> votes(k);
    for (std::size_t i = 0; i < train.size(); ++i) {
        auto& pred = out[i];
        pred.posterior.assign(k, 0.0);
        std::fill(votes.begin(), votes.end(), 0);
        const auto x = train.row(i);
        for (std::size_t t = 0; t < model.trees().size(); ++t) {
            if (!masks[t][i]) continue;
            std::vector<double> p(k, 0.0);
            model.trees()[t].accumulate_proba(x, p);
            for (std::size_t c = 0; c < k; ++c) pred.posterior[c] += p[c];
            ++votes[detail::argmax_first(p)];
            ++pred.trees;
        }
        if (pred.trees == 0) continue;
        for (auto& v : pred.posterior) v /= static_cast<double>(pred.trees);
        pred.vote = static_cast<std::size_t>(std::max_element(votes.begin(), votes.end()) - votes.begin());
    }
    return out;
}

struct OobReport {
    double accuracy = 0;
    std::size_t scored = 0;
    std::size_t excluded = 0;  // rows that were in-bag for every tree
};

inline OobReport oob_accuracy(const RandomForestModel& model, const LabeledDataset& train) {
    const auto preds = oob_predictions(model, train);
    OobReport report;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        if (preds[i].trees == 0) {
            ++report.excluded;
            continue;
        }
        ++report.scored;
        if (preds[i].vote == train.labels()[i]) ++correct;
    }
    if (report.scored > 0) report.accuracy = static_cast<double>(correct) / static_cast<double>(report.scored);
    return report;
}

// Mean decrease in impurity, summed over every split of every tree and
// normalized to 1. A forest without any split gets the uniform vector.
inline std::vector<double> feature_importances(const RandomForestModel& model) {
    const std::size_t d = model.arity();
    std::vector<double> imp(d, 0.0);
    for (const auto& tree : model.trees())
        for (const auto& node : tree.nodes())
            if (!node.is_leaf()) imp[static_cast<std::size_t>(node.feature)] += node.weighted_decrease;
    double total = 0;
    for (auto v : imp) total += v;
    if (total <= 0) return std::vector<double>(d, 1.0 / static_cast<double>(d));
    for (auto& v : imp) v /= total;
    return imp;
}

}  // namespace kisan

#endif  // KISAN_FOREST_HPP
