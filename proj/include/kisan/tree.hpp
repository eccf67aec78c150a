#ifndef KISAN_TREE_HPP
#define KISAN_TREE_HPP

// Gini classification tree.
//
// Split search is exhaustive over the candidate features: rows are sorted by
// the feature value and every midpoint between consecutive distinct values is
// scored. The best split maximizes the weighted Gini decrease; ties go to the
// lower feature index, then the lower threshold. Rows with x <= threshold go
// left.

#include <kisan/core.hpp>

#include <numeric>
#include <optional>

namespace kisan {

inline double gini_impurity(std::span<const std::size_t> class_counts) {
    std::size_t n = 0;
    for (auto c : class_counts) n += c;
    if (n == 0) throw Error("gini impurity of an empty node is undefined");
    const double total = static_cast<double>(n);
    double sq = 0;
    for (auto c : class_counts) sq += (static_cast<double>(c) / total) * (static_cast<double>(c) / total);
    return 1.0 - sq;
}

inline double gini_impurity(std::initializer_list<std::size_t> class_counts) {
    return gini_impurity(std::span<const std::size_t>(class_counts.begin(), class_counts.size()));
}

struct Split {
    std::size_t feature = 0;
    double threshold = 0;
    double impurity_decrease = 0;
};

// How many features a node draws before searching for a split.
struct FeatureRule {
    enum class Kind { sqrt, all, fixed };
    Kind kind = Kind::sqrt;
    std::size_t k = 0;

    static FeatureRule square_root() { return {Kind::sqrt, 0}; }
    static FeatureRule every() { return {Kind::all, 0}; }
    static FeatureRule fixed(std::size_t k) { return {Kind::fixed, k}; }

    std::size_t resolve(std::size_t arity) const {
        switch (kind) {
            case Kind::sqrt:
                return std::max<std::size_t>(
                    1, static_cast<std::size_t>(std::sqrt(static_cast<double>(arity))));
            case Kind::all:
                return arity;
            case Kind::fixed:
                if (k == 0 || k > arity)
                    throw Error("fixed(" + std::to_string(k) + ") features per split exceeds arity " +
                                std::to_string(arity));
                return k;
        }
        return arity;
    }

    std::string to_string() const {
        switch (kind) {
            case Kind::sqrt: return "sqrt";
            case Kind::all: return "all";
            case Kind::fixed: return "fixed(" + std::to_string(k) + ")";
        }
        return "?";
    }

    static FeatureRule parse(const std::string& s) {
        if (s == "sqrt") return square_root();
        if (s == "all") return every();
        if (s.rfind("fixed(", 0) == 0 && s.back() == ')')
            return fixed(std::stoul(s.substr(6, s.size() - 7)));
        if (!s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; }))
            return fixed(std::stoul(s));
        throw Error("unknown features-per-split rule '" + s + "'");
    }

    bool operator==(const FeatureRule&) const = default;
};

struct TreeConfig {
    std::optional<std::size_t> max_depth;  // unlimited when empty
    std::size_t min_samples_leaf = 1;
    FeatureRule features_per_split = FeatureRule::every();
};

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0;
    std::uint32_t left = 0;
    std::uint32_t right = 0;
    // Internal nodes: (node rows / root rows) * Gini decrease of the split.
    double weighted_decrease = 0;
    // Leaves: raw class counts of the training rows that reached them.
    std::vector<std::uint32_t> class_counts;

    bool is_leaf() const noexcept { return feature < 0; }
    bool operator==(const TreeNode&) const = default;
};

class DecisionTree {
public:
    DecisionTree() = default;
    DecisionTree(std::vector<TreeNode> nodes, std::size_t num_classes, std::size_t arity)
        : nodes_(std::move(nodes)), num_classes_(num_classes), arity_(arity) {}

    const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
    std::size_t num_classes() const noexcept { return num_classes_; }
    std::size_t arity() const noexcept { return arity_; }

    const TreeNode& leaf_for(std::span<const double> x) const {
        std::uint32_t i = 0;
        while (!nodes_[i].is_leaf()) {
            const auto& node = nodes_[i];
            i = x[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left : node.right;
        }
        return nodes_[i];
    }

    // Adds the leaf frequency vector for x into out.
    void accumulate_proba(std::span<const double> x, std::span<double> out) const {
        const auto& leaf = leaf_for(x);
        double total = 0;
        for (auto c : leaf.class_counts) total += c;
        for (std::size_t c = 0; c < num_classes_; ++c) out[c] += leaf.class_counts[c] / total;
    }

    std::vector<double> predict_proba(std::span<const double> x) const {
        detail::check_arity(arity_, x.size());
        std::vector<double> p(num_classes_, 0.0);
        accumulate_proba(x, p);
        return p;
    }

    std::size_t depth() const {
        std::size_t best = 0;
        std::vector<std::pair<std::uint32_t, std::size_t>> stack{{0, 0}};
        while (!stack.empty()) {
            auto [i, d] = stack.back();
            stack.pop_back();
            best = std::max(best, d);
            if (!nodes_[i].is_leaf()) {
                stack.push_back({nodes_[i].left, d + 1});
                stack.push_back({nodes_[i].right, d + 1});
            }
        }
        return best;
    }

    std::size_t leaf_count() const {
        return static_cast<std::size_t>(
            std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.is_leaf(); }));
    }

    bool operator==(const DecisionTree&) const = default;

private:
    std::vector<TreeNode> nodes_;
    std::size_t num_classes_ = 0;
    std::size_t arity_ = 0;
};

namespace detail {

// Scans one feature over the rows in `index`. Updates `best` when a split
// beats it under the (decrease, feature, threshold) ordering.
class SplitScanner {
public:
    explicit SplitScanner(std::size_t num_classes) : left_(num_classes), right_(num_classes) {}

    void scan(const Matrix& x, std::span<const std::size_t> labels, std::span<const std::size_t> index,
              std::size_t feature, std::span<const std::size_t> parent_counts, double parent_gini,
              std::size_t min_leaf, std::optional<Split>& best) {
        const std::size_t n = index.size();
        pairs_.resize(n);
        for (std::size_t i = 0; i < n; ++i) pairs_[i] = {x(index[i], feature), labels[index[i]]};
        std::sort(pairs_.begin(), pairs_.end());
        if (pairs_.front().first == pairs_.back().first) return;

        std::fill(left_.begin(), left_.end(), 0);
        std::copy(parent_counts.begin(), parent_counts.end(), right_.begin());
        double sq_left = 0, sq_right = 0;
        for (auto c : right_) sq_right += static_cast<double>(c) * static_cast<double>(c);

        const double total = static_cast<double>(n);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const std::size_t c = pairs_[i].second;
            sq_left += 2.0 * static_cast<double>(left_[c]) + 1.0;
            sq_right -= 2.0 * static_cast<double>(right_[c]) - 1.0;
            ++left_[c];
            --right_[c];
            const double a = pairs_[i].first, b = pairs_[i + 1].first;
            if (a == b) continue;
            const std::size_t n_left = i + 1, n_right = n - n_left;
            if (n_left < min_leaf || n_right < min_leaf) continue;
            const double nl = static_cast<double>(n_left), nr = static_cast<double>(n_right);
            // parent - (nl/n)(1 - sqL/nl^2) - (nr/n)(1 - sqR/nr^2)
            double decrease = parent_gini - 1.0 + (sq_left / nl + sq_right / nr) / total;
            if (decrease < 1e-12) decrease = 0;
            double threshold = a + (b - a) / 2;
            if (!(threshold < b)) threshold = a;
            if (!best || decrease > best->impurity_decrease ||
                (decrease == best->impurity_decrease &&
                 (feature < best->feature || (feature == best->feature && threshold < best->threshold)))) {
                best = Split{feature, threshold, decrease};
            }
        }
    }

private:
    std::vector<std::pair<double, std::size_t>> pairs_;
    std::vector<std::size_t> left_;
    std::vector<std::size_t> right_;
};

class TreeBuilder {
public:
    TreeBuilder(const Matrix& x, std::span<const std::size_t> labels, std::size_t num_classes,
                const TreeConfig& config, Rng* rng)
        : x_(x), labels_(labels), num_classes_(num_classes), config_(config), rng_(rng),
          scanner_(num_classes), k_(config.features_per_split.resolve(x.cols())) {
        features_.resize(x.cols());
    }

    DecisionTree build(std::vector<std::size_t> index) {
        if (index.empty()) throw Error("cannot fit a decision tree on an empty training set");
        root_size_ = static_cast<double>(index.size());
        nodes_.clear();
        grow(index, 0, index.size(), 0);
        return DecisionTree(std::move(nodes_), num_classes_, x_.cols());
    }

private:
    std::uint32_t grow(std::vector<std::size_t>& index, std::size_t begin, std::size_t end,
                       std::size_t depth) {
        const auto self = static_cast<std::uint32_t>(nodes_.size());
        nodes_.emplace_back();

        std::vector<std::size_t> counts(num_classes_, 0);
        for (std::size_t i = begin; i < end; ++i) ++counts[labels_[index[i]]];
        const std::span<const std::size_t> node_rows(index.data() + begin, end - begin);

        std::optional<Split> split;
        const bool pure = std::count_if(counts.begin(), counts.end(), [](auto c) { return c > 0; }) <= 1;
        const bool depth_ok = !config_.max_depth || depth < *config_.max_depth;
        if (!pure && depth_ok && node_rows.size() >= 2 * config_.min_samples_leaf)
            split = find_split(node_rows, counts);

        if (!split) {
            auto& leaf = nodes_[self];
            leaf.class_counts.assign(counts.begin(), counts.end());
            return self;
        }

        auto mid = std::partition(index.begin() + static_cast<std::ptrdiff_t>(begin),
                                  index.begin() + static_cast<std::ptrdiff_t>(end),
                                  [&](std::size_t r) { return x_(r, split->feature) <= split->threshold; });
        const auto split_at = static_cast<std::size_t>(mid - index.begin());

        nodes_[self].feature = static_cast<int>(split->feature);
        nodes_[self].threshold = split->threshold;
        nodes_[self].weighted_decrease =
            static_cast<double>(end - begin) / root_size_ * split->impurity_decrease;
        const auto left = grow(index, begin, split_at, depth + 1);
        const auto right = grow(index, split_at, end, depth + 1);
        nodes_[self].left = left;
        nodes_[self].right = right;
        return self;
    }

    std::optional<Split> find_split(std::span<const std::size_t> rows,
                                    const std::vector<std::size_t>& counts) {
        const double parent = gini_impurity(counts);
        std::optional<Split> best;
        std::iota(features_.begin(), features_.end(), std::size_t{0});
        if (k_ >= features_.size() || rng_ == nullptr) {
            for (auto f : features_)
                scanner_.scan(x_, labels_, rows, f, counts, parent, config_.min_samples_leaf, best);
            return best;
        }
        // Draw features one at a time without replacement. After k draws stop
        // as soon as a split exists; keep drawing while none has been found.
        for (std::size_t drawn = 0; drawn < features_.size(); ++drawn) {
            const auto j = drawn + static_cast<std::size_t>(uniform_index(*rng_, features_.size() - drawn));
            std::swap(features_[drawn], features_[j]);
            scanner_.scan(x_, labels_, rows, features_[drawn], counts, parent, config_.min_samples_leaf,
                          best);
            if (drawn + 1 >= k_ && best) break;
        }
        return best;
    }

    const Matrix& x_;
    std::span<const std::size_t> labels_;
    std::size_t num_classes_;
    TreeConfig config_;
    Rng* rng_;
    SplitScanner scanner_;
    std::size_t k_;
    std::vector<std::size_t> features_;
    std::vector<TreeNode> nodes_;
    double root_size_ = 1;
};

}  // namespace detail

// Best split of all rows over the candidate features, or nothing when the
// rows are pure or no threshold separates them. A zero-gain split is still a
// split, so impure nodes keep growing (an XOR pattern needs one).
inline std::optional<Split> best_split(const Matrix& x, std::span<const std::size_t> labels,
                                       std::size_t num_classes,
                                       std::span<const std::size_t> candidate_features,
                                       std::size_t min_samples_leaf = 1) {
    if (x.rows() != labels.size()) throw Error("rows and labels differ in length");
    if (x.rows() < 2) return std::nullopt;
    std::vector<std::size_t> index(x.rows());
    std::iota(index.begin(), index.end(), std::size_t{0});
    std::vector<std::size_t> counts(num_classes, 0);
    for (auto l : labels) ++counts[l];
    const double parent = gini_impurity(counts);
    if (parent == 0) return std::nullopt;
    detail::SplitScanner scanner(num_classes);
    std::optional<Split> best;
    for (auto f : candidate_features) {
        if (f >= x.cols()) throw Error("candidate feature index out of range");
        scanner.scan(x, labels, index, f, counts, parent, min_samples_leaf, best);
    }
    return best;
}

inline DecisionTree fit_decision_tree(const LabeledDataset& train, const TreeConfig& config = {}) {
    if (train.empty()) throw Error("cannot fit a decision tree on an empty training set");
    std::vector<std::size_t> index(train.size());
    std::iota(index.begin(), index.end(), std::size_t{0});
    TreeConfig all_features = config;
    all_features.features_per_split = FeatureRule::every();
    detail::TreeBuilder builder(train.features(), train.labels(), train.num_classes(), all_features,
                                nullptr);
    return builder.build(std::move(index));
}

}  // namespace kisan

#endif  // KISAN_TREE_HPP
