#ifndef KISAN_BASELINES_HPP
#define KISAN_BASELINES_HPP

// Classical baselines the forest is benchmarked against. Each one is a small
// deterministic learner; knn, logistic_softmax and linear_svm expect
// standardized inputs.

#include <kisan/tree.hpp>

#include <variant>

namespace kisan {

enum class BaselineKind { gaussian_nb, knn, logistic_softmax, gradient_boosted_trees, linear_svm, single_tree };

inline std::string to_string(BaselineKind kind) {
    switch (kind) {
        case BaselineKind::gaussian_nb: return "gaussian_nb";
        case BaselineKind::knn: return "knn";
        case BaselineKind::logistic_softmax: return "logistic_softmax";
        case BaselineKind::gradient_boosted_trees: return "gradient_boosted_trees";
        case BaselineKind::linear_svm: return "linear_svm";
        case BaselineKind::single_tree: return "single_tree";
    }
    return "?";
}

inline BaselineKind parse_baseline_kind(const std::string& s) {
    for (auto k : {BaselineKind::gaussian_nb, BaselineKind::knn, BaselineKind::logistic_softmax,
                   BaselineKind::gradient_boosted_trees, BaselineKind::linear_svm, BaselineKind::single_tree})
        if (to_string(k) == s) return k;
    throw Error("unknown baseline kind '" + s + "'");
}

struct BaselineParams {
    double nb_variance_floor = 1e-9;
    std::size_t knn_k = 5;
    std::size_t logistic_epochs = 1000;
    double logistic_learning_rate = 0.5;
    std::size_t gbt_stages = 100;
    std::size_t gbt_depth = 3;
    double gbt_learning_rate = 0.1;
    std::size_t svm_epochs = 300;
    double svm_learning_rate = 0.1;
    double svm_lambda = 1e-4;
    std::uint64_t seed = 42;
};

// ---------------------------------------------------------- gaussian NB

struct GaussianNB {
    Matrix means;      // classes x features
    Matrix variances;  // classes x features
    std::vector<double> log_priors;

    std::vector<double> predict_proba(std::span<const double> x) const {
        const std::size_t k = means.rows();
        std::vector<double> s(k);
        constexpr double log_two_pi = 1.8378770664093454835606594728112;
        for (std::size_t c = 0; c < k; ++c) {
            double ll = log_priors[c];
            for (std::size_t j = 0; j < x.size(); ++j) {
                const double var = variances(c, j), diff = x[j] - means(c, j);
                ll -= 0.5 * (log_two_pi + std::log(var) + diff * diff / var);
            }
            s[c] = ll;
        }
        for (std::size_t c = 0; c < k; ++c)
            if (!std::isfinite(log_priors[c])) s[c] = -std::numeric_limits<double>::infinity();
        detail::softmax_inplace(s);
        return s;
    }
};

inline GaussianNB fit_gaussian_nb(const LabeledDataset& train, double variance_floor) {
    const std::size_t k = train.num_classes(), d = train.arity();
    GaussianNB nb{Matrix(k, d), Matrix(k, d), std::vector<double>(k)};
    const auto counts = train.class_counts();
    for (std::size_t i = 0; i < train.size(); ++i)
        for (std::size_t j = 0; j < d; ++j) nb.means(train.labels()[i], j) += train.row(i)[j];
    for (std::size_t c = 0; c < k; ++c)
        for (std::size_t j = 0; j < d; ++j)
            if (counts[c]) nb.means(c, j) /= static_cast<double>(counts[c]);
    for (std::size_t i = 0; i < train.size(); ++i) {
        const auto c = train.labels()[i];
        for (std::size_t j = 0; j < d; ++j) {
            const double diff = train.row(i)[j] - nb.means(c, j);
            nb.variances(c, j) += diff * diff;
        }
    }
    for (std::size_t c = 0; c < k; ++c) {
        nb.log_priors[c] = counts[c] ? std::log(static_cast<double>(counts[c]) / static_cast<double>(train.size()))
                                     : -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < d; ++j) {
            if (counts[c]) nb.variances(c, j) /= static_cast<double>(counts[c]);
            nb.variances(c, j) = std::max(nb.variances(c, j), variance_floor);
        }
    }
    return nb;
}

// ------------------------------------------------------------------ kNN

struct Knn {
    Matrix points;
    std::vector<std::size_t> labels;
    std::size_t num_classes = 0;
    std::size_t k = 5;

    // Vote fractions of the k nearest rows; distance ties go to the lower row.
    std::vector<double> predict_proba(std::span<const double> x) const {
        std::vector<std::pair<double, std::size_t>> dist(points.rows());
        for (std::size_t i = 0; i < points.rows(); ++i) {
            double s = 0;
            const auto r = points.row(i);
            for (std::size_t j = 0; j < x.size(); ++j) s += (r[j] - x[j]) * (r[j] - x[j]);
            dist[i] = {s, i};
        }
        const std::size_t kk = std::min(k, dist.size());
        std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(kk), dist.end());
        std::vector<double> p(num_classes, 0.0);
        for (std::size_t i = 0; i < kk; ++i) p[labels[dist[i].second]] += 1.0 / static_cast<double>(kk);
        return p;
    }
};

// ------------------------------------------------------------- logistic

struct LogisticSoftmax {
    Matrix weights;  // classes x features
    std::vector<double> bias;

    std::vector<double> scores(std::span<const double> x) const {
        std::vector<double> s(bias);
        for (std::size_t c = 0; c < s.size(); ++c)
            for (std::size_t j = 0; j < x.size(); ++j) s[c] += weights(c, j) * x[j];
        return s;
    }

    std::vector<double> predict_proba(std::span<const double> x) const {
        auto s = scores(x);
        detail::softmax_inplace(s);
        return s;
    }
};

// Full-batch gradient descent on mean cross-entropy.
inline LogisticSoftmax fit_logistic(const LabeledDataset& train, const BaselineParams& hp) {
    const std::size_t k = train.num_classes(), d = train.arity(), n = train.size();
    LogisticSoftmax model{Matrix(k, d), std::vector<double>(k, 0.0)};
    detail::Rng rng(hp.seed);
    for (std::size_t c = 0; c < k; ++c)
        for (std::size_t j = 0; j < d; ++j) model.weights(c, j) = detail::normal(rng, 0.0, 0.01);

    Matrix grad_w(k, d);
    std::vector<double> grad_b(k);
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t epoch = 0; epoch < hp.logistic_epochs; ++epoch) {
        grad_w = Matrix(k, d);
        std::fill(grad_b.begin(), grad_b.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto x = train.row(i);
            auto p = model.predict_proba(x);
            p[train.labels()[i]] -= 1.0;
            for (std::size_t c = 0; c < k; ++c) {
                grad_b[c] += p[c];
                for (std::size_t j = 0; j < d; ++j) grad_w(c, j) += p[c] * x[j];
            }
        }
        for (std::size_t c = 0; c < k; ++c) {
            model.bias[c] -= hp.logistic_learning_rate * grad_b[c] * inv_n;
            for (std::size_t j = 0; j < d; ++j)
                model.weights(c, j) -= hp.logistic_learning_rate * grad_w(c, j) * inv_n;
        }
    }
    return model;
}

// ---------------------------------------------------- gradient boosting

struct RegressionNode {
    int feature = -1;
    double threshold = 0;
    std::uint32_t left = 0;
    std::uint32_t right = 0;
    double value = 0;

    bool operator==(const RegressionNode&) const = default;
};

struct RegressionTree {
    std::vector<RegressionNode> nodes;

    double predict(std::span<const double> x) const {
        std::uint32_t i = 0;
        while (nodes[i].feature >= 0)
            i = x[static_cast<std::size_t>(nodes[i].feature)] <= nodes[i].threshold ? nodes[i].left : nodes[i].right;
        return nodes[i].value;
    }

    bool operator==(const RegressionTree&) const = default;
};

namespace detail {

// Level-wise least-squares tree on gradients `r` with Newton leaf values
// scale * sum(r) / sum(h). `order[f]` lists rows sorted by feature f.
// On return `node_of[i]` is the leaf index row i landed in.
inline RegressionTree fit_regression_tree(const Matrix& x, const std::vector<std::vector<std::size_t>>& order,
                                          std::span<const double> r, std::span<const double> h,
                                          std::size_t max_depth, double scale,
                                          std::vector<std::uint32_t>& node_of) {
    const std::size_t n = x.rows(), d = x.cols();
    RegressionTree tree;
    tree.nodes.emplace_back();
    std::fill(node_of.begin(), node_of.end(), 0);
    std::vector<std::uint32_t> frontier{0};

    struct Stats {
        double sum = 0, hess = 0;
        std::size_t count = 0;
    };
    struct Candidate {
        bool found = false;
        std::size_t feature = 0;
        double threshold = 0, gain = 0;
    };

    for (std::size_t depth = 0; depth < max_depth && !frontier.empty(); ++depth) {
        const std::size_t m = tree.nodes.size();
        std::vector<int> slot(m, -1);
        for (std::size_t s = 0; s < frontier.size(); ++s) slot[frontier[s]] = static_cast<int>(s);

        std::vector<Stats> total(frontier.size());
        for (std::size_t i = 0; i < n; ++i) {
            const int s = slot[node_of[i]];
            if (s < 0) continue;
            total[s].sum += r[i];
            total[s].hess += h[i];
            ++total[s].count;
        }

        std::vector<Candidate> best(frontier.size());
        std::vector<Stats> left(frontier.size());
        std::vector<double> last(frontier.size());
        for (std::size_t f = 0; f < d; ++f) {
            std::fill(left.begin(), left.end(), Stats{});
            for (std::size_t i : order[f]) {
                const int s = slot[node_of[i]];
                if (s < 0) continue;
                const double v = x(i, f);
                auto& L = left[s];
                if (L.count > 0 && v != last[s]) {
                    const auto& T = total[s];
                    const double nl = static_cast<double>(L.count), nr = static_cast<double>(T.count - L.count);
                    const double sr = T.sum - L.sum;
                    const double gain = L.sum * L.sum / nl + sr * sr / nr - T.sum * T.sum / static_cast<double>(T.count);
                    if (gain > 1e-12 && (!best[s].found || gain > best[s].gain)) {
                        double thr = last[s] + (v - last[s]) / 2;
                        if (!(thr < v)) thr = last[s];
                        best[s] = {true, f, thr, gain};
                    }
                }
                L.sum += r[i];
                L.hess += h[i];
                ++L.count;
                last[s] = v;
            }
        }

        std::vector<std::uint32_t> next;
        for (std::size_t s = 0; s < frontier.size(); ++s) {
            if (!best[s].found) continue;
            const auto id = frontier[s];
            const auto l = static_cast<std::uint32_t>(tree.nodes.size());
            tree.nodes.emplace_back();
            tree.nodes.emplace_back();
            tree.nodes[id].feature = static_cast<int>(best[s].feature);
            tree.nodes[id].threshold = best[s].threshold;
            tree.nodes[id].left = l;
            tree.nodes[id].right = l + 1;
            next.push_back(l);
            next.push_back(l + 1);
        }
        for (std::size_t i = 0; i < n; ++i) {
            auto& node = tree.nodes[node_of[i]];
            if (slot[node_of[i]] >= 0 && node.feature >= 0)
                node_of[i] = x(i, static_cast<std::size_t>(node.feature)) <= node.threshold ? node.left : node.right;
        }
        frontier = std::move(next);
    }

    std::vector<double> sum(tree.nodes.size(), 0.0), hess(tree.nodes.size(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        sum[node_of[i]] += r[i];
        hess[node_of[i]] += h[i];
    }
    for (std::size_t id = 0; id < tree.nodes.size(); ++id)
        if (tree.nodes[id].feature < 0)
            tree.nodes[id].value = hess[id] > 1e-12 ? scale * sum[id] / hess[id] : 0.0;
    return tree;
}

}  // namespace detail

// Multinomial boosting: every stage fits one regression tree per class on the
// softmax residuals (one-vs-rest targets).
struct GradientBoostedTrees {
    std::vector<double> initial_scores;
    std::vector<std::vector<RegressionTree>> stages;  // stage -> class -> tree
    double learning_rate = 0.1;

    std::vector<double> predict_proba(std::span<const double> x) const {
        std::vector<double> s(initial_scores);
        for (const auto& stage : stages)
            for (std::size_t c = 0; c < stage.size(); ++c) s[c] += learning_rate * stage[c].predict(x);
        detail::softmax_inplace(s);
        return s;
    }
};

inline GradientBoostedTrees fit_gbt(const LabeledDataset& train, const BaselineParams& hp) {
    const std::size_t k = train.num_classes(), n = train.size(), d = train.arity();
    const auto& x = train.features();
    GradientBoostedTrees model;
    model.learning_rate = hp.gbt_learning_rate;
    const auto counts = train.class_counts();
    model.initial_scores.resize(k);
    for (std::size_t c = 0; c < k; ++c)
        model.initial_scores[c] = counts[c] ? std::log(static_cast<double>(counts[c]) / static_cast<double>(n)) : -30.0;

    std::vector<std::vector<std::size_t>> order(d, std::vector<std::size_t>(n));
    for (std::size_t f = 0; f < d; ++f) {
        std::iota(order[f].begin(), order[f].end(), std::size_t{0});
        std::stable_sort(order[f].begin(), order[f].end(), [&](auto a, auto b) { return x(a, f) < x(b, f); });
    }

    Matrix scores(n, k);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < k; ++c) scores(i, c) = model.initial_scores[c];

    const double scale = k > 1 ? static_cast<double>(k - 1) / static_cast<double>(k) : 1.0;
    std::vector<double> r(n), h(n);
    std::vector<std::uint32_t> node_of(n);
    Matrix prob(n, k);
    for (std::size_t stage = 0; stage < hp.gbt_stages; ++stage) {
        for (std::size_t i = 0; i < n; ++i) {
            auto row = prob.row(i);
            std::copy(scores.row(i).begin(), scores.row(i).end(), row.begin());
            detail::softmax_inplace(row);
        }
        auto& trees = model.stages.emplace_back();
        for (std::size_t c = 0; c < k; ++c) {
            for (std::size_t i = 0; i < n; ++i) {
                const double p = prob(i, c);
                r[i] = (train.labels()[i] == c ? 1.0 : 0.0) - p;
                h[i] = p * (1.0 - p);
            }
            trees.push_back(detail::fit_regression_tree(x, order, r, h, hp.gbt_depth, scale, node_of));
            for (std::size_t i = 0; i < n; ++i)
                scores(i, c) += model.learning_rate * trees.back().nodes[node_of[i]].value;
        }
    }
    return model;
}

// ----------------------------------------------------------- linear SVM

// One-vs-rest linear SVMs. The posterior is the vector of margins clipped to
// [-1, 1], shifted to [0, 2] and normalized: a ranking score, not a
// calibrated probability.
struct LinearSvm {
    Matrix weights;  // classes x features
    std::vector<double> bias;

    std::vector<double> margins(std::span<const double> x) const {
        std::vector<double> m(bias);
        for (std::size_t c = 0; c < m.size(); ++c)
            for (std::size_t j = 0; j < x.size(); ++j) m[c] += weights(c, j) * x[j];
        return m;
    }

    std::vector<double> predict_proba(std::span<const double> x) const {
        auto m = margins(x);
        double total = 0;
        for (auto& v : m) {
            v = std::clamp(v, -1.0, 1.0) + 1.0;
            total += v;
        }
        if (total <= 0) return std::vector<double>(m.size(), 1.0 / static_cast<double>(m.size()));
        for (auto& v : m) v /= total;
        return m;
    }
};

// Full-batch subgradient descent on lambda/2 |w|^2 + mean hinge loss, with a
// 1/sqrt(t) step decay.
inline LinearSvm fit_linear_svm(const LabeledDataset& train, const BaselineParams& hp) {
    const std::size_t k = train.num_classes(), d = train.arity(), n = train.size();
    LinearSvm model{Matrix(k, d), std::vector<double>(k, 0.0)};
    const double inv_n = 1.0 / static_cast<double>(n);
    std::vector<double> gw(d);
    for (std::size_t c = 0; c < k; ++c) {
        for (std::size_t epoch = 0; epoch < hp.svm_epochs; ++epoch) {
            const double eta = hp.svm_learning_rate / std::sqrt(static_cast<double>(epoch + 1));
            for (std::size_t j = 0; j < d; ++j) gw[j] = hp.svm_lambda * model.weights(c, j);
            double gb = 0;
            for (std::size_t i = 0; i < n; ++i) {
                const auto x = train.row(i);
                const double y = train.labels()[i] == c ? 1.0 : -1.0;
                double m = model.bias[c];
                for (std::size_t j = 0; j < d; ++j) m += model.weights(c, j) * x[j];
                if (y * m < 1.0) {
                    for (std::size_t j = 0; j < d; ++j) gw[j] -= y * x[j] * inv_n;
                    gb -= y * inv_n;
                }
            }
            for (std::size_t j = 0; j < d; ++j) model.weights(c, j) -= eta * gw[j];
            model.bias[c] -= eta * gb;
        }
    }
    return model;
}

// ------------------------------------------------------------- wrapper

struct BaselineModel {
    BaselineKind kind = BaselineKind::gaussian_nb;
    std::vector<std::string> class_catalog;
    FeatureSchema schema;
    std::variant<GaussianNB, Knn, LogisticSoftmax, GradientBoostedTrees, LinearSvm, DecisionTree> impl;

    std::size_t arity() const noexcept { return schema.arity(); }

    std::vector<double> predict_proba(std::span<const double> x) const {
        detail::check_arity(arity(), x.size());
        return std::visit([&](const auto& m) { return m.predict_proba(x); }, impl);
    }
};

inline BaselineModel fit_baseline(BaselineKind kind, const LabeledDataset& train, const BaselineParams& hp = {}) {
    if (train.empty()) throw Error("cannot fit " + to_string(kind) + " on an empty training set");
    BaselineModel model{kind, train.class_catalog(), train.schema(), GaussianNB{}};
    switch (kind) {
        case BaselineKind::gaussian_nb:
            model.impl = fit_gaussian_nb(train, hp.nb_variance_floor);
            break;
        case BaselineKind::knn:
            if (hp.knn_k < 1) throw Error("knn requires k >= 1");
            model.impl = Knn{train.features(), train.labels(), train.num_classes(), hp.knn_k};
            break;
        case BaselineKind::logistic_softmax:
            model.impl = fit_logistic(train, hp);
            break;
        case BaselineKind::gradient_boosted_trees:
            model.impl = fit_gbt(train, hp);
            break;
        case BaselineKind::linear_svm:
            model.impl = fit_linear_svm(train, hp);
            break;
        case BaselineKind::single_tree:
            model.impl = fit_decision_tree(train);
            break;
    }
    return model;
}

inline BaselineModel fit_baseline(const std::string& kind, const LabeledDataset& train, const BaselineParams& hp = {}) {
    return fit_baseline(parse_baseline_kind(kind), train, hp);
}

inline std::vector<double> predict_proba(const BaselineModel& model, std::span<const double> x) {
    return model.predict_proba(x);
}

inline std::vector<double> predict_proba(const DecisionTree& tree, std::span<const double> x) {
    return tree.predict_proba(x);
}

// Argmax of the posterior; ties resolve to the lower class index, which is
// the lexicographically smaller class name.
template <typename Model>
std::size_t predict_class_index(const Model& model, std::span<const double> x) {
    return detail::argmax_first(predict_proba(model, x));
}

template <typename Model>
const std::string& predict_class(const Model& model, std::span<const double> x) {
    return model.class_catalog()[predict_class_index(model, x)];
}

inline const std::string& predict_class(const BaselineModel& model, std::span<const double> x) {
    return model.class_catalog[predict_class_index(model, x)];
}

}  // namespace kisan

#endif  // KISAN_BASELINES_HPP
