#ifndef KISAN_ADVISORY_HPP
#define KISAN_ADVISORY_HPP

// Profit-aware crop ranking and fertilizer advice.
//
// A candidate crop C scores
//
//     S(C) = w1 * P(C | soil) + w2 * G(C)
//
// where P(C | soil) is the agronomic suitability (forest posterior) and G(C)
// the forecasted market price of C min-max normalized across the candidates.
// The same form covers both the "total weighted probability" view, with
// P(yield|S) = P(C|soil) and P(profit|M) = G(C), and the composite profit
// score view.

#include <kisan/forest.hpp>

#include <map>

namespace kisan {

struct ScoreWeights {
    double w1 = 0.6;  // agronomic suitability
    double w2 = 0.4;  // normalized market price

    void validate() const {
        std::vector<FieldError> errors;
        if (!(w1 >= 0) || !std::isfinite(w1)) errors.push_back({"w1", "w1 must be >= 0"});
        if (!(w2 >= 0) || !std::isfinite(w2)) errors.push_back({"w2", "w2 must be >= 0"});
        if (errors.empty() && std::abs(w1 + w2 - 1.0) > 1e-9)
            errors.push_back({"weights", "weights must sum to 1 (got " + detail::format_real(w1 + w2, 12) + ")"});
        if (!errors.empty()) throw ValidationError(std::move(errors));
    }

    bool operator==(const ScoreWeights&) const = default;
};

inline double composite_score(double p_yield, double g_price, const ScoreWeights& weights = {}) {
    weights.validate();
    std::vector<FieldError> errors;
    if (!(p_yield >= 0 && p_yield <= 1)) errors.push_back({"p_yield", "p_yield out of [0,1]"});
    if (!(g_price >= 0 && g_price <= 1)) errors.push_back({"g_price", "g_price out of [0,1]"});
    if (!errors.empty()) throw ValidationError(std::move(errors));
    return weights.w1 * p_yield + weights.w2 * g_price;
}

inline constexpr double neutral_price_score = 0.5;

struct CropRecommendation {
    std::string crop_id;
    double p_yield = 0;
    double g_price = 0;
    double score = 0;
    bool market_data = true;  // false when g_price is the neutral fallback
};

struct RankedAdvisory {
    std::optional<SoilSample> soil;
    std::optional<int> horizon_months;
    ScoreWeights weights;
    std::vector<CropRecommendation> recommendations;

    const CropRecommendation& optimal() const {
        if (recommendations.empty()) throw Error("empty advisory");
        return recommendations.front();
    }
};

// One recommendation per catalog crop, best first. Ties on score go to the
// higher suitability, then to the lexicographically smaller crop name.
// Suitabilities are taken per crop, each in [0, 1]; a classifier posterior
// is the usual source. Crops without a price score get the neutral 0.5 and
// market_data = false.
inline RankedAdvisory rank_crops(const std::vector<std::string>& catalog, std::span<const double> suitability,
                                 const std::map<std::string, double>& g_scores, const ScoreWeights& weights = {}) {
    if (catalog.empty()) throw Error("cannot rank an empty crop catalog");
    if (catalog.size() != suitability.size())
        throw Error("catalog has " + std::to_string(catalog.size()) + " crops but " +
                    std::to_string(suitability.size()) + " suitabilities were given");
    weights.validate();

    RankedAdvisory advisory;
    advisory.weights = weights;
    for (std::size_t c = 0; c < catalog.size(); ++c) {
        CropRecommendation rec{catalog[c], suitability[c], neutral_price_score, 0.0, false};
        if (auto it = g_scores.find(catalog[c]); it != g_scores.end()) {
            rec.g_price = it->second;
            rec.market_data = true;
        }
        rec.score = composite_score(rec.p_yield, rec.g_price, weights);
        advisory.recommendations.push_back(std::move(rec));
    }
    std::sort(advisory.recommendations.begin(), advisory.recommendations.end(),
              [](const CropRecommendation& a, const CropRecommendation& b) {
                  if (a.score != b.score) return a.score > b.score;
                  if (a.p_yield != b.p_yield) return a.p_yield > b.p_yield;
                  return a.crop_id < b.crop_id;
              });
    return advisory;
}

// ------------------------------------------------------------ fertilizer

struct FertilizerInput {
    double n = 0;
    double p = 0;
    double k = 0;
    std::string soil_type;
    double moisture = 0;
    double temperature = 0;
};

// soil_types is sorted; its order fixes the one-hot columns.
inline std::vector<double> encode_fertilizer_input(const std::vector<std::string>& soil_types,
                                                   const FertilizerInput& input) {
    auto it = std::lower_bound(soil_types.begin(), soil_types.end(), input.soil_type);
    if (it == soil_types.end() || *it != input.soil_type) {
        std::string known;
        for (const auto& s : soil_types) known += (known.empty() ? "" : ", ") + s;
        throw ValidationError("soil_type", "unknown soil_type '" + input.soil_type + "' (known: " + known + ")");
    }
    std::vector<double> v{input.n, input.p, input.k, input.moisture, input.temperature};
    for (const auto& s : soil_types) v.push_back(s == input.soil_type ? 1.0 : 0.0);
    return v;
}

struct FertilizerModel {
    std::vector<std::string> soil_types;
    RandomForestModel classifier;

    const std::vector<std::string>& class_catalog() const noexcept { return classifier.class_catalog(); }
};

inline FertilizerModel fit_fertilizer_model(const LabeledDataset& train, std::vector<std::string> soil_types,
                                            const ForestConfig& config) {
    if (train.arity() != fertilizer_schema(soil_types).arity())
        throw Error("fertilizer dataset arity does not match its soil types");
    return {std::move(soil_types), fit_random_forest(train, config)};
}

struct FertilizerAdvice {
    std::string fertilizer;
    std::vector<std::pair<std::string, double>> posterior;  // catalog order
};

inline FertilizerAdvice recommend_fertilizer(const FertilizerModel& model, std::span<const double> features) {
    const auto p = model.classifier.predict_proba(features);
    FertilizerAdvice advice;
    advice.fertilizer = model.class_catalog()[detail::argmax_first(p)];
    for (std::size_t c = 0; c < p.size(); ++c) advice.posterior.emplace_back(model.class_catalog()[c], p[c]);
    return advice;
}

inline FertilizerAdvice recommend_fertilizer(const FertilizerModel& model, const FertilizerInput& input) {
    std::vector<FieldError> errors;
    for (auto [name, v] : {std::pair{"n", input.n}, {"p", input.p}, {"k", input.k}})
        if (!(v >= 0) || !std::isfinite(v)) errors.push_back({name, std::string(name) + " must be >= 0"});
    if (!(input.moisture >= 0 && input.moisture <= 100))
        errors.push_back({"moisture", "moisture out of [0,100]"});
    if (!std::isfinite(input.temperature)) errors.push_back({"temperature", "temperature must be finite"});
    if (!errors.empty()) throw ValidationError(std::move(errors));
    return recommend_fertilizer(model, encode_fertilizer_input(model.soil_types, input));
}

}  // namespace kisan

#endif  // KISAN_ADVISORY_HPP
