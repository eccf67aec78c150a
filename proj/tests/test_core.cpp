#include <kisan/core.hpp>

#include <gtest/gtest.h>

#include <numeric>
#include <set>

#include "oracle_values.hpp"

using namespace kisan;

namespace {

LabeledDataset balanced(std::size_t classes, std::size_t rows_per_class) {
    Matrix x(0, 2);
    std::vector<std::string> labels;
    for (std::size_t c = 0; c < classes; ++c)
        for (std::size_t r = 0; r < rows_per_class; ++r) {
            x.push_row(std::vector<double>{static_cast<double>(c), static_cast<double>(r)});
            labels.push_back("c" + std::to_string(100 + c));
        }
    return LabeledDataset(FeatureSchema{"toy", {"a", "b"}}, std::move(x), labels);
}

std::vector<std::string> messages(const ValidationError& e) {
    std::vector<std::string> out;
    for (const auto& f : e.errors()) out.push_back(f.message);
    return out;
}

}  // namespace

TEST(SoilSample, FirstCorpusRowIsValid) {
    EXPECT_NO_THROW(validate_soil_sample({90, 42, 43, 20.8, 82.0, 6.5, 202.9}));
}

TEST(SoilSample, NegativePhIsRejectedWithFieldMessage) {
    try {
        validate_soil_sample({90, 42, 43, 20.8, 82.0, -1, 202.9});
        FAIL() << "expected ValidationError";
    } catch (const ValidationError& e) {
        ASSERT_EQ(e.errors().size(), 1u);
        EXPECT_EQ(e.errors()[0].field, "ph");
        EXPECT_EQ(e.errors()[0].message, "ph out of [0,14]");
    }
}

TEST(SoilSample, HumidityBoundsAreClosed) {
    EXPECT_NO_THROW(validate_soil_sample({0, 0, 0, 20, 100, 14, 0}));
    EXPECT_NO_THROW(validate_soil_sample({0, 0, 0, 20, 0, 0, 0}));
}

TEST(SoilSample, ReportsEveryViolatedField) {
    try {
        validate_soil_sample({-1, 0, 0, std::nan(""), 101, 20, -5});
        FAIL() << "expected ValidationError";
    } catch (const ValidationError& e) {
        const auto m = messages(e);
        EXPECT_EQ(m, (std::vector<std::string>{"n must be >= 0", "temperature must be finite",
                                               "humidity out of [0,100]", "ph out of [0,14]",
                                               "rainfall must be >= 0"}));
    }
}

TEST(Schema, AgronomicAndBenchmarkArity) {
    EXPECT_EQ(agronomic_schema().arity(), 7u);
    EXPECT_EQ(benchmark_schema().arity(), 8u);
    EXPECT_EQ(benchmark_schema().feature_names.back(), "market_price");
}

TEST(Schema, FertilizerOneHotArity) {
    const auto s = fertilizer_schema({"Black", "Clayey", "Loamy", "Red", "Sandy"});
    EXPECT_EQ(s.arity(), 10u);
    EXPECT_EQ(s.feature_names[5], "soil_type=Black");
}

TEST(Dataset, CatalogIsSortedAndLabelsAreIndices) {
    Matrix x(0, 1);
    for (double v : {1.0, 2.0, 3.0}) x.push_row(std::vector<double>{v});
    LabeledDataset d(FeatureSchema{"t", {"v"}}, std::move(x), {"rice", "maize", "rice"});
    EXPECT_EQ(d.class_catalog(), (std::vector<std::string>{"maize", "rice"}));
    EXPECT_EQ(d.labels(), (std::vector<std::size_t>{1, 0, 1}));
    EXPECT_EQ(d.class_counts(), (std::vector<std::size_t>{1, 2}));
}

TEST(Dataset, RejectsArityMismatchAndNonFinite) {
    Matrix x(0, 2);
    x.push_row(std::vector<double>{1, 2});
    EXPECT_THROW(LabeledDataset(FeatureSchema{"t", {"v"}}, x, {"a"}), Error);
    Matrix bad(0, 1);
    bad.push_row(std::vector<double>{std::numeric_limits<double>::infinity()});
    EXPECT_THROW(LabeledDataset(FeatureSchema{"t", {"v"}}, bad, {"a"}), Error);
}

TEST(Standardizer, ColumnTwoFourSix) {
    Matrix x(0, 1);
    for (double v : {2.0, 4.0, 6.0}) x.push_row(std::vector<double>{v});
    const auto p = fit_standardizer(x);
    EXPECT_DOUBLE_EQ(p.means[0], 4.0);
    EXPECT_NEAR(p.stdevs[0], oracle::std_246, 1e-12);
    EXPECT_NEAR(apply_standardizer(p, std::vector<double>{2.0})[0], oracle::z_of_2, 1e-12);
}

TEST(Standardizer, ConstantColumnAndSingleRow) {
    Matrix x(0, 2);
    for (double v : {5.0, 5.0, 5.0}) x.push_row(std::vector<double>{v, v * 2});
    const auto p = fit_standardizer(x);
    EXPECT_DOUBLE_EQ(p.means[0], 5.0);
    EXPECT_DOUBLE_EQ(p.stdevs[0], 0.0);
    EXPECT_DOUBLE_EQ(apply_standardizer(p, std::vector<double>{123.0, 7.0})[0], 0.0);

    Matrix one(0, 3);
    one.push_row(std::vector<double>{1, 2, 3});
    for (double s : fit_standardizer(one).stdevs) EXPECT_DOUBLE_EQ(s, 0.0);
}

TEST(Standardizer, MeansMapToZero) {
    const auto d = balanced(3, 5);
    const auto p = fit_standardizer(d);
    for (double v : apply_standardizer(p, p.means)) EXPECT_NEAR(v, 0.0, 1e-15);
}

TEST(Standardizer, ArityMismatchThrows) {
    const auto p = fit_standardizer(balanced(2, 3));
    EXPECT_THROW(apply_standardizer(p, std::vector<double>{1.0}), Error);
}

TEST(StratifiedSplit, TwentyPerClassOnTheFullCorpusShape) {
    const auto d = balanced(22, 100);
    const auto s = stratified_split(d, {0.2, 42});
    EXPECT_EQ(s.test.size(), 440u);
    EXPECT_EQ(s.train.size(), 1760u);
    for (auto c : s.test.class_counts()) EXPECT_EQ(c, 20u);
}

TEST(StratifiedSplit, HalfOfTwoRowsPerClass) {
    const auto s = stratified_split(balanced(4, 2), {0.5, 7});
    for (auto c : s.train.class_counts()) EXPECT_EQ(c, 1u);
    for (auto c : s.test.class_counts()) EXPECT_EQ(c, 1u);
}

TEST(StratifiedSplit, DeterministicAndDisjoint) {
    const auto d = balanced(5, 13);
    const auto a = stratified_split(d, {0.3, 99});
    const auto b = stratified_split(d, {0.3, 99});
    EXPECT_EQ(a.train_indices, b.train_indices);
    EXPECT_EQ(a.test_indices, b.test_indices);
    std::set<std::size_t> all(a.train_indices.begin(), a.train_indices.end());
    for (auto i : a.test_indices) EXPECT_TRUE(all.insert(i).second);
    EXPECT_EQ(all.size(), d.size());
    const auto c = stratified_split(d, {0.3, 100});
    EXPECT_NE(a.test_indices, c.test_indices);
}

TEST(StratifiedSplit, SingleRowClassIsAnError) {
    EXPECT_THROW(stratified_split(balanced(3, 1), {0.2, 1}), Error);
}

TEST(Rng, UniformIndexStaysInRangeAndIsSeeded) {
    detail::Rng a(5), b(5);
    for (int i = 0; i < 1000; ++i) {
        const auto x = detail::uniform_index(a, 7);
        EXPECT_LT(x, 7u);
        EXPECT_EQ(x, detail::uniform_index(b, 7));
    }
}

TEST(Rng, ShuffleIsAPermutation) {
    std::vector<int> v(50);
    std::iota(v.begin(), v.end(), 0);
    detail::Rng rng(3);
    auto w = v;
    detail::shuffle(w, rng);
    EXPECT_NE(v, w);
    std::sort(w.begin(), w.end());
    EXPECT_EQ(v, w);
}

TEST(Rng, NormalHasRoughlyUnitMoments) {
    detail::Rng rng(11);
    double sum = 0, sq = 0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const double z = detail::normal(rng);
        sum += z;
        sq += z * z;
    }
    EXPECT_NEAR(sum / n, 0.0, 0.03);
    EXPECT_NEAR(sq / n, 1.0, 0.05);
}

TEST(Argmax, TiesGoToTheFirstIndex) {
    EXPECT_EQ(detail::argmax_first(std::vector<double>{0.5, 0.5}), 0u);
    EXPECT_EQ(detail::argmax_first(std::vector<double>{0.1, 0.6, 0.3}), 1u);
}
