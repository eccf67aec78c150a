#ifndef KISAN_CORE_HPP
#define KISAN_CORE_HPP

// Domain types shared by every other header: errors, soil samples, feature
// schemas, labeled datasets, the standardizer and the stratified splitter.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace kisan {

// ---------------------------------------------------------------- errors

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed or missing input files, bad cells, unreadable bundles.
class DataError : public Error {
public:
    using Error::Error;
};

struct FieldError {
    std::string field;
    std::string message;
};

// Carries every violated field, not just the first one.
class ValidationError : public Error {
public:
    explicit ValidationError(std::vector<FieldError> errors)
        : Error(join(errors)), errors_(std::move(errors)) {}

    ValidationError(std::string field, std::string message)
        : ValidationError(std::vector<FieldError>{{std::move(field), std::move(message)}}) {}

    const std::vector<FieldError>& errors() const noexcept { return errors_; }

private:
    static std::string join(const std::vector<FieldError>& errors) {
        std::string out;
        for (const auto& e : errors) {
            if (!out.empty()) out += "; ";
            out += e.message;
        }
        return out;
    }

    std::vector<FieldError> errors_;
};

// ------------------------------------------------------------ randomness

namespace detail {

// std distributions are implementation-defined; these are not, so seeded
// results match across standard libraries.
using Rng = std::mt19937_64;

inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % n;
}

inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double normal(Rng& rng, double mean = 0.0, double sigma = 1.0) {
    double u1 = uniform01(rng);
    while (u1 <= 0.0) u1 = uniform01(rng);
    const double u2 = uniform01(rng);
    constexpr double two_pi = 6.283185307179586476925286766559;
    return mean + sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(uniform_index(rng, i));
        std::swap(v[i - 1], v[j]);
    }
}

inline std::string format_real(double v, int precision = 6) {
    std::ostringstream os;
    os.precision(precision);
    os << v;
    return os.str();
}

}  // namespace detail

// ------------------------------------------------------------ soil sample

struct SoilSample {
    double n = 0;            // kg/ha
    double p = 0;            // kg/ha
    double k = 0;            // kg/ha
    double temperature = 0;  // degrees C
    double humidity = 0;     // percent
    double ph = 0;
    double rainfall = 0;     // mm

    std::vector<double> to_features() const {
        return {n, p, k, temperature, humidity, ph, rainfall};
    }
};

inline SoilSample validate_soil_sample(const SoilSample& s) {
    std::vector<FieldError> errors;
    auto finite = [&](const char* name, double v) {
        if (!std::isfinite(v)) {
            errors.push_back({name, std::string(name) + " must be finite"});
            return false;
        }
        return true;
    };
    auto non_negative = [&](const char* name, double v) {
        if (finite(name, v) && v < 0)
            errors.push_back({name, std::string(name) + " must be >= 0"});
    };
    auto within = [&](const char* name, double v, double lo, double hi) {
        if (finite(name, v) && (v < lo || v > hi)) {
            errors.push_back({name, std::string(name) + " out of [" + detail::format_real(lo) +
                                        "," + detail::format_real(hi) + "]"});
        }
    };

    non_negative("n", s.n);
    non_negative("p", s.p);
    non_negative("k", s.k);
    finite("temperature", s.temperature);
    within("humidity", s.humidity, 0, 100);
    within("ph", s.ph, 0, 14);
    non_negative("rainfall", s.rainfall);

    if (!errors.empty()) throw ValidationError(std::move(errors));
    return s;
}

// --------------------------------------------------------------- schemas

struct FeatureSchema {
    std::string id;
    std::vector<std::string> feature_names;

    std::size_t arity() const noexcept { return feature_names.size(); }
    bool operator==(const FeatureSchema&) const = default;
};

inline FeatureSchema agronomic_schema() {
    return {"agronomic", {"N", "P", "K", "temperature", "humidity", "ph", "rainfall"}};
}

// The benchmarking corpus: the seven agronomic inputs plus the market price.
inline FeatureSchema benchmark_schema() {
    return {"benchmark",
            {"N", "P", "K", "temperature", "humidity", "ph", "rainfall", "market_price"}};
}

// Numeric fertilizer inputs followed by one indicator column per soil type.
inline FeatureSchema fertilizer_schema(const std::vector<std::string>& soil_types) {
    FeatureSchema schema{"fertilizer", {"N", "P", "K", "moisture", "temperature"}};
    for (const auto& t : soil_types) schema.feature_names.push_back("soil_type=" + t);
    return schema;
}

struct FeatureVector {
    std::string schema_id;
    std::vector<double> values;
};

// ----------------------------------------------------------------- matrix

// Row-major dense matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return rows_ == 0; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    void push_row(std::span<const double> values) {
        if (rows_ == 0 && cols_ == 0) cols_ = values.size();
        if (values.size() != cols_) throw Error("matrix row arity mismatch");
        data_.insert(data_.end(), values.begin(), values.end());
        ++rows_;
    }

    const std::vector<double>& data() const noexcept { return data_; }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// --------------------------------------------------------------- dataset

// Labels are stored as indices into class_catalog, which is kept sorted so
// that class index order is the lexicographic order of class names.
class LabeledDataset {
public:
    LabeledDataset() = default;

    // Catalog is derived from the distinct labels.
    LabeledDataset(FeatureSchema schema, Matrix features, const std::vector<std::string>& labels)
        : LabeledDataset(std::move(schema), std::move(features), labels, distinct_sorted(labels)) {}

    // Catalog may list classes that have no rows.
    LabeledDataset(FeatureSchema schema, Matrix features, const std::vector<std::string>& labels,
                   std::vector<std::string> catalog)
        : schema_(std::move(schema)), features_(std::move(features)), catalog_(std::move(catalog)) {
        if (features_.rows() != labels.size())
            throw Error("dataset has " + std::to_string(features_.rows()) + " rows but " +
                        std::to_string(labels.size()) + " labels");
        if (!features_.empty() && features_.cols() != schema_.arity())
            throw Error("dataset arity " + std::to_string(features_.cols()) +
                        " does not match schema '" + schema_.id + "' arity " +
                        std::to_string(schema_.arity()));
        if (!std::is_sorted(catalog_.begin(), catalog_.end()) ||
            std::adjacent_find(catalog_.begin(), catalog_.end()) != catalog_.end())
            throw Error("class catalog must be sorted and distinct");
        for (double v : features_.data())
            if (!std::isfinite(v)) throw Error("dataset contains a non-finite value");
        labels_.reserve(labels.size());
        for (const auto& l : labels) {
            auto it = std::lower_bound(catalog_.begin(), catalog_.end(), l);
            if (it == catalog_.end() || *it != l)
                throw Error("label '" + l + "' is not in the class catalog");
            labels_.push_back(static_cast<std::size_t>(it - catalog_.begin()));
        }
    }

    const FeatureSchema& schema() const noexcept { return schema_; }
    const Matrix& features() const noexcept { return features_; }
    const std::vector<std::size_t>& labels() const noexcept { return labels_; }
    const std::vector<std::string>& class_catalog() const noexcept { return catalog_; }

    std::size_t size() const noexcept { return labels_.size(); }
    bool empty() const noexcept { return labels_.empty(); }
    std::size_t arity() const noexcept { return schema_.arity(); }
    std::size_t num_classes() const noexcept { return catalog_.size(); }

    std::span<const double> row(std::size_t i) const { return features_.row(i); }
    const std::string& label_name(std::size_t i) const { return catalog_[labels_[i]]; }

    std::vector<std::size_t> class_counts() const {
        std::vector<std::size_t> counts(catalog_.size(), 0);
        for (auto l : labels_) ++counts[l];
        return counts;
    }

    // Rows in the given order; the catalog is preserved.
    LabeledDataset subset(std::span<const std::size_t> indices) const {
        LabeledDataset out;
        out.schema_ = schema_;
        out.catalog_ = catalog_;
        out.features_ = Matrix(0, features_.cols());
        for (auto i : indices) {
            out.features_.push_row(features_.row(i));
            out.labels_.push_back(labels_[i]);
        }
        return out;
    }

    // Same labels, replaced feature matrix (used after standardization).
    LabeledDataset with_features(Matrix features) const {
        if (features.rows() != size() || features.cols() != features_.cols())
            throw Error("replacement feature matrix has the wrong shape");
        LabeledDataset out = *this;
        out.features_ = std::move(features);
        return out;
    }

private:
    static std::vector<std::string> distinct_sorted(std::vector<std::string> v) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
        return v;
    }

    FeatureSchema schema_;
    Matrix features_;
    std::vector<std::size_t> labels_;
    std::vector<std::string> catalog_;
};

// ----------------------------------------------------------- standardizer

// Population standard deviation; a zero-variance column maps to 0.
struct StandardizerParams {
    std::vector<double> means;
    std::vector<double> stdevs;

    std::size_t arity() const noexcept { return means.size(); }
    bool operator==(const StandardizerParams&) const = default;
};

inline StandardizerParams fit_standardizer(const Matrix& x) {
    if (x.empty()) throw Error("cannot fit a standardizer on an empty dataset");
    const std::size_t n = x.rows(), d = x.cols();
    StandardizerParams params{std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)};
    for (std::size_t j = 0; j < d; ++j) {
        double sum = 0;
        for (std::size_t i = 0; i < n; ++i) sum += x(i, j);
        const double mean = sum / static_cast<double>(n);
        double ss = 0;
        for (std::size_t i = 0; i < n; ++i) ss += (x(i, j) - mean) * (x(i, j) - mean);
        params.means[j] = mean;
        params.stdevs[j] = std::sqrt(ss / static_cast<double>(n));
    }
    return params;
}

inline StandardizerParams fit_standardizer(const LabeledDataset& dataset) {
    return fit_standardizer(dataset.features());
}

inline std::vector<double> apply_standardizer(const StandardizerParams& params,
                                              std::span<const double> v) {
    if (v.size() != params.arity())
        throw Error("standardizer expects " + std::to_string(params.arity()) +
                    " features, got " + std::to_string(v.size()));
    std::vector<double> out(v.size());
    for (std::size_t j = 0; j < v.size(); ++j)
        out[j] = params.stdevs[j] > 0 ? (v[j] - params.means[j]) / params.stdevs[j] : 0.0;
    return out;
}

inline FeatureVector apply_standardizer(const StandardizerParams& params, const FeatureVector& v) {
    return {v.schema_id, apply_standardizer(params, std::span<const double>(v.values))};
}

inline Matrix apply_standardizer(const StandardizerParams& params, const Matrix& x) {
    Matrix out(x.rows(), x.cols());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        auto z = apply_standardizer(params, x.row(i));
        std::copy(z.begin(), z.end(), out.row(i).begin());
    }
    return out;
}

inline LabeledDataset apply_standardizer(const StandardizerParams& params,
                                         const LabeledDataset& dataset) {
    return dataset.with_features(apply_standardizer(params, dataset.features()));
}

// ---------------------------------------------------------------- split

struct SplitSpec {
    double test_fraction = 0.2;
    std::uint64_t seed = 42;
};

struct SplitResult {
    LabeledDataset train;
    LabeledDataset test;
    std::vector<std::size_t> train_indices;  // ascending
    std::vector<std::size_t> test_indices;   // ascending
};

// Per class: shuffle that class's rows with a seeded generator and send
// round(count * fraction) of them to test, clamped so that both halves keep
// at least one row of every class.
inline SplitResult stratified_split(const LabeledDataset& dataset, SplitSpec spec = {}) {
    if (!(spec.test_fraction > 0.0 && spec.test_fraction < 1.0))
        throw Error("test fraction must lie in (0,1)");
    std::vector<std::vector<std::size_t>> by_class(dataset.num_classes());
    for (std::size_t i = 0; i < dataset.size(); ++i) by_class[dataset.labels()[i]].push_back(i);

    detail::Rng rng(spec.seed);
    SplitResult result;
    for (std::size_t c = 0; c < by_class.size(); ++c) {
        auto& rows = by_class[c];
        if (rows.empty()) continue;
        if (rows.size() < 2)
            throw Error("class '" + dataset.class_catalog()[c] +
                        "' has a single row; stratified split needs at least 2");
        detail::shuffle(rows, rng);
        auto n_test = static_cast<std::size_t>(
            std::llround(static_cast<double>(rows.size()) * spec.test_fraction));
        n_test = std::clamp<std::size_t>(n_test, 1, rows.size() - 1);
        result.test_indices.insert(result.test_indices.end(), rows.begin(), rows.begin() + n_test);
        result.train_indices.insert(result.train_indices.end(), rows.begin() + n_test, rows.end());
    }
    std::sort(result.train_indices.begin(), result.train_indices.end());
    std::sort(result.test_indices.begin(), result.test_indices.end());
    result.train = dataset.subset(result.train_indices);
    result.test = dataset.subset(result.test_indices);
    return result;
}

// Probability vector helpers shared by the classifiers.
namespace detail {

inline std::size_t argmax_first(std::span<const double> p) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < p.size(); ++i)
        if (p[i] > p[best]) best = i;
    return best;
}

inline void softmax_inplace(std::span<double> scores) {
    const double mx = *std::max_element(scores.begin(), scores.end());
    double sum = 0;
    for (auto& s : scores) {
        s = std::exp(s - mx);
        sum += s;
    }
    for (auto& s : scores) s /= sum;
}

inline void check_arity(std::size_t expected, std::size_t got) {
    if (expected != got)
        throw Error("model expects " + std::to_string(expected) + " features, got " +
                    std::to_string(got));
}

}  // namespace detail

}  // namespace kisan

#endif  // KISAN_CORE_HPP
