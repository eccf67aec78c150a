#ifndef KISAN_BUNDLE_HPP
#define KISAN_BUNDLE_HPP

// Versioned model bundle (*.kisan.json) and the end-to-end advisory path
// that runs on it.
//
// Layout:
//   {
//     "format": "kisan-bundle",
//     "format_version": 1,
//     "checksum": "fnv1a64:<hex of payload.dump()>",
//     "payload": { ... }
//   }
//
// Every real number is a decimal string that parses back to the identical
// double, so a reloaded bundle predicts bit-for-bit the same as the original.
// Trees are nested node objects.

#include <kisan/advisory.hpp>
#include <kisan/forecast.hpp>
#include <kisan/io.hpp>

#include <json.hpp>

#include <chrono>

namespace kisan {

using json = nlohmann::json;

inline constexpr int bundle_format_version = 1;
inline constexpr const char* bundle_format_name = "kisan-bundle";

struct ModelBundle {
    int format_version = bundle_format_version;
    std::string created_at;
    StandardizerParams standardizer;  // applied before the crop forest
    RandomForestModel crop_model;
    std::optional<FertilizerModel> fertilizer;
    std::map<std::string, PriceModel> price_models;
    std::map<std::string, PriceSeries> price_history;
    ForecastConfig forecast_config;
    int forecast_horizon = 6;
    std::vector<DatasetFingerprint> fingerprints;

    const std::vector<std::string>& crop_catalog() const noexcept { return crop_model.class_catalog(); }
};

inline std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// -------------------------------------------------------- JSON encoding

namespace detail {

inline json real(double v) { return format_exact(v); }

inline double real(const json& j) {
    if (!j.is_string()) throw DataError("bundle: expected a decimal string");
    return parse_exact(j.get<std::string>());
}

inline json reals(std::span<const double> v) {
    json a = json::array();
    for (double x : v) a.push_back(real(x));
    return a;
}

inline std::vector<double> parse_reals(const json& j) {
    std::vector<double> v;
    for (const auto& x : j) v.push_back(real(x));
    return v;
}

inline std::string encode_mask(const std::vector<bool>& mask) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out((mask.size() + 3) / 4, '0');
    for (std::size_t q = 0; q < out.size(); ++q) {
        unsigned nibble = 0;
        for (std::size_t b = 0; b < 4 && q * 4 + b < mask.size(); ++b)
            if (mask[q * 4 + b]) nibble |= 1u << b;
        out[q] = digits[nibble];
    }
    return out;
}

inline std::vector<bool> decode_mask(const std::string& s, std::size_t n) {
    if (s.size() != (n + 3) / 4) throw DataError("bundle: OOB mask has the wrong length");
    std::vector<bool> mask(n);
    for (std::size_t i = 0; i < n; ++i) {
        const char c = s[i / 4];
        const unsigned nibble = c >= 'a' ? static_cast<unsigned>(c - 'a' + 10) : static_cast<unsigned>(c - '0');
        mask[i] = (nibble >> (i % 4)) & 1u;
    }
    return mask;
}

inline json tree_node_json(const DecisionTree& tree, std::uint32_t i) {
    const auto& node = tree.nodes()[i];
    if (node.is_leaf()) return json{{"counts", node.class_counts}};
    return json{{"feature", node.feature},
                {"threshold", real(node.threshold)},
                {"decrease", real(node.weighted_decrease)},
                {"left", tree_node_json(tree, node.left)},
                {"right", tree_node_json(tree, node.right)}};
}

inline std::uint32_t tree_node_from_json(const json& j, std::vector<TreeNode>& nodes) {
    const auto self = static_cast<std::uint32_t>(nodes.size());
    nodes.emplace_back();
    if (j.contains("counts")) {
        nodes[self].class_counts = j.at("counts").get<std::vector<std::uint32_t>>();
        return self;
    }
    nodes[self].feature = j.at("feature").get<int>();
    nodes[self].threshold = real(j.at("threshold"));
    nodes[self].weighted_decrease = real(j.at("decrease"));
    const auto left = tree_node_from_json(j.at("left"), nodes);
    const auto right = tree_node_from_json(j.at("right"), nodes);
    nodes[self].left = left;
    nodes[self].right = right;
    return self;
}

inline json schema_json(const FeatureSchema& s) { return json{{"id", s.id}, {"features", s.feature_names}}; }

inline FeatureSchema schema_from_json(const json& j) {
    return {j.at("id").get<std::string>(), j.at("features").get<std::vector<std::string>>()};
}

inline json forest_config_json(const ForestConfig& c) {
    json j{{"n_trees", c.n_trees},
           {"features_per_split", c.features_per_split.to_string()},
           {"min_samples_leaf", c.min_samples_leaf},
           {"bootstrap", c.bootstrap},
           {"seed", c.seed}};
    j["max_depth"] = c.max_depth ? json(*c.max_depth) : json(nullptr);
    return j;
}

inline ForestConfig forest_config_from_json(const json& j) {
    ForestConfig c;
    c.n_trees = j.at("n_trees").get<std::size_t>();
    c.features_per_split = FeatureRule::parse(j.at("features_per_split").get<std::string>());
    c.min_samples_leaf = j.at("min_samples_leaf").get<std::size_t>();
    c.bootstrap = j.at("bootstrap").get<bool>();
    c.seed = j.at("seed").get<std::uint64_t>();
    if (!j.at("max_depth").is_null()) c.max_depth = j.at("max_depth").get<std::size_t>();
    return c;
}

}  // namespace detail

inline json to_json(const RandomForestModel& m) {
    json trees = json::array();
    for (const auto& t : m.trees()) trees.push_back(detail::tree_node_json(t, 0));
    json masks = json::array();
    for (const auto& mask : m.oob_masks()) masks.push_back(detail::encode_mask(mask));
    return json{{"class_catalog", m.class_catalog()},
                {"schema", detail::schema_json(m.schema())},
                {"config", detail::forest_config_json(m.config())},
                {"training_rows", m.oob_masks().empty() ? 0 : m.oob_masks().front().size()},
                {"oob_masks", masks},
                {"trees", trees}};
}

inline RandomForestModel forest_from_json(const json& j) {
    auto catalog = j.at("class_catalog").get<std::vector<std::string>>();
    auto schema = detail::schema_from_json(j.at("schema"));
    std::vector<DecisionTree> trees;
    for (const auto& t : j.at("trees")) {
        std::vector<TreeNode> nodes;
        detail::tree_node_from_json(t, nodes);
        for (const auto& node : nodes)
            if ((node.is_leaf() && node.class_counts.size() != catalog.size()) ||
                (!node.is_leaf() && static_cast<std::size_t>(node.feature) >= schema.arity()))
                throw DataError("bundle: tree node inconsistent with catalog or schema");
        trees.emplace_back(std::move(nodes), catalog.size(), schema.arity());
    }
    const auto rows = j.at("training_rows").get<std::size_t>();
    std::vector<std::vector<bool>> masks;
    for (const auto& m : j.at("oob_masks")) masks.push_back(detail::decode_mask(m.get<std::string>(), rows));
    return RandomForestModel(std::move(trees), std::move(catalog), std::move(schema),
                             detail::forest_config_from_json(j.at("config")), std::move(masks));
}

inline json to_json(const StandardizerParams& p) {
    return json{{"means", detail::reals(p.means)}, {"stdevs", detail::reals(p.stdevs)}};
}

inline StandardizerParams standardizer_from_json(const json& j) {
    return {detail::parse_reals(j.at("means")), detail::parse_reals(j.at("stdevs"))};
}

inline json to_json(const PriceModel& m) {
    return json{{"crop", m.crop_id},
                {"t0", m.t0},
                {"t1", m.t1},
                {"intercept", detail::real(m.intercept)},
                {"slope", detail::real(m.slope)},
                {"changepoints", detail::reals(m.changepoints)},
                {"slope_deltas", detail::reals(m.slope_deltas)},
                {"fourier_order", m.fourier_order},
                {"seasonal_cos", detail::reals(m.seasonal_cos)},
                {"seasonal_sin", detail::reals(m.seasonal_sin)},
                {"ridge_lambda", detail::real(m.ridge_lambda)},
                {"residual_sigma", detail::real(m.residual_sigma)},
                {"last_year", m.last_year},
                {"last_month", m.last_month}};
}

inline PriceModel price_model_from_json(const json& j) {
    PriceModel m;
    m.crop_id = j.at("crop").get<std::string>();
    m.t0 = j.at("t0").get<long>();
    m.t1 = j.at("t1").get<long>();
    m.intercept = detail::real(j.at("intercept"));
    m.slope = detail::real(j.at("slope"));
    m.changepoints = detail::parse_reals(j.at("changepoints"));
    m.slope_deltas = detail::parse_reals(j.at("slope_deltas"));
    m.fourier_order = j.at("fourier_order").get<std::size_t>();
    m.seasonal_cos = detail::parse_reals(j.at("seasonal_cos"));
    m.seasonal_sin = detail::parse_reals(j.at("seasonal_sin"));
    m.ridge_lambda = detail::real(j.at("ridge_lambda"));
    m.residual_sigma = detail::real(j.at("residual_sigma"));
    m.last_year = j.at("last_year").get<int>();
    m.last_month = j.at("last_month").get<int>();
    if (m.changepoints.size() != m.slope_deltas.size() || m.seasonal_cos.size() != m.fourier_order ||
        m.seasonal_sin.size() != m.fourier_order || m.t1 <= m.t0)
        throw DataError("bundle: inconsistent price model for '" + m.crop_id + "'");
    return m;
}

inline json to_json(const PriceSeries& s) {
    json points = json::array();
    for (const auto& p : s.points) points.push_back(json::array({p.year, p.month, detail::real(p.price)}));
    return json{{"crop", s.crop_id}, {"points", points}};
}

inline PriceSeries price_series_from_json(const json& j) {
    PriceSeries s{j.at("crop").get<std::string>(), {}};
    for (const auto& p : j.at("points")) s.points.push_back({p.at(0).get<int>(), p.at(1).get<int>(), detail::real(p.at(2))});
    validate_price_series(s);
    return s;
}

inline json to_json(const ForecastConfig& c) {
    return json{{"n_changepoints", c.n_changepoints},
                {"fourier_order", c.fourier_order},
                {"ridge_lambda", detail::real(c.ridge_lambda)}};
}

inline ForecastConfig forecast_config_from_json(const json& j) {
    return {j.at("n_changepoints").get<std::size_t>(), j.at("fourier_order").get<std::size_t>(),
            detail::real(j.at("ridge_lambda"))};
}

inline json bundle_payload(const ModelBundle& b) {
    json payload;
    payload["created_at"] = b.created_at;
    payload["crop"] = json{{"standardizer", to_json(b.standardizer)}, {"forest", to_json(b.crop_model)}};
    if (b.fertilizer)
        payload["fertilizer"] = json{{"soil_types", b.fertilizer->soil_types}, {"forest", to_json(b.fertilizer->classifier)}};
    else
        payload["fertilizer"] = nullptr;
    json models = json::object(), history = json::object();
    for (const auto& [crop, m] : b.price_models) models[crop] = to_json(m);
    for (const auto& [crop, s] : b.price_history) history[crop] = to_json(s);
    payload["price_models"] = models;
    payload["price_history"] = history;
    payload["forecast_config"] = to_json(b.forecast_config);
    payload["forecast_horizon"] = b.forecast_horizon;
    json fps = json::array();
    for (const auto& f : b.fingerprints)
        fps.push_back(json{{"name", f.name}, {"rows", f.rows}, {"classes", f.classes}, {"content_hash", f.content_hash}});
    payload["fingerprints"] = fps;
    return payload;
}

inline std::string bundle_checksum(const json& payload) {
    Fnv1a h;
    h.update(payload.dump());
    return "fnv1a64:" + h.hex();
}

inline json bundle_to_json(const ModelBundle& b) {
    auto payload = bundle_payload(b);
    return json{{"format", bundle_format_name},
                {"format_version", b.format_version},
                {"checksum", bundle_checksum(payload)},
                {"payload", std::move(payload)}};
}

inline ModelBundle bundle_from_json(const json& doc) {
    try {
        if (!doc.is_object() || doc.value("format", "") != bundle_format_name)
            throw DataError("not a kisan model bundle");
        const int version = doc.at("format_version").get<int>();
        if (version != bundle_format_version)
            throw DataError("unsupported version " + std::to_string(version) + " (this build reads version " +
                            std::to_string(bundle_format_version) + ")");
        const auto& payload = doc.at("payload");
        if (bundle_checksum(payload) != doc.at("checksum").get<std::string>())
            throw DataError("bundle checksum mismatch");

        ModelBundle b;
        b.format_version = version;
        b.created_at = payload.at("created_at").get<std::string>();
        b.standardizer = standardizer_from_json(payload.at("crop").at("standardizer"));
        b.crop_model = forest_from_json(payload.at("crop").at("forest"));
        if (b.standardizer.arity() != b.crop_model.arity())
            throw DataError("bundle: standardizer arity does not match the crop model");
        if (!payload.at("fertilizer").is_null()) {
            const auto& f = payload.at("fertilizer");
            auto soils = f.at("soil_types").get<std::vector<std::string>>();
            auto forest = forest_from_json(f.at("forest"));
            if (forest.arity() != fertilizer_schema(soils).arity())
                throw DataError("bundle: fertilizer soil types do not match its model");
            b.fertilizer = FertilizerModel{std::move(soils), std::move(forest)};
        }
        for (const auto& [crop, m] : payload.at("price_models").items()) b.price_models[crop] = price_model_from_json(m);
        for (const auto& [crop, s] : payload.at("price_history").items()) b.price_history[crop] = price_series_from_json(s);
        b.forecast_config = forecast_config_from_json(payload.at("forecast_config"));
        b.forecast_horizon = payload.at("forecast_horizon").get<int>();
        for (const auto& f : payload.at("fingerprints"))
            b.fingerprints.push_back({f.at("name").get<std::string>(), f.at("rows").get<std::size_t>(),
                                      f.at("classes").get<std::size_t>(), f.at("content_hash").get<std::string>()});
        return b;
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed bundle: ") + e.what());
    }
}

inline void save_bundle(const ModelBundle& bundle, const std::filesystem::path& path) {
    const auto text = bundle_to_json(bundle).dump();
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot write '" + tmp + "'");
        out << text << '\n';
        if (!out) throw DataError("failed writing '" + tmp + "'");
    }
    std::filesystem::rename(tmp, path);
}

inline ModelBundle load_bundle(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open bundle '" + path.string() + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw DataError("bundle parse error in '" + path.string() + "': " + e.what());
    }
    return bundle_from_json(doc);
}

// ------------------------------------------------------- advisory pipeline

inline std::vector<double> crop_suitability(const ModelBundle& bundle, const SoilSample& soil) {
    const auto features = validate_soil_sample(soil).to_features();
    return bundle.crop_model.predict_proba(apply_standardizer(bundle.standardizer, features));
}

// Forecasted price of every crop with a price model at `horizon` months
// past its last observation. Negative extrapolations are floored at 0.01.
inline std::map<std::string, double> forecast_prices(const ModelBundle& bundle, int horizon) {
    std::map<std::string, double> out;
    for (const auto& [crop, model] : bundle.price_models)
        out[crop] = std::max(0.01, forecast_horizon(model, horizon).points.back().yhat);
    return out;
}

inline RankedAdvisory recommend(const ModelBundle& bundle, const SoilSample& soil, const ScoreWeights& weights,
                                std::optional<int> horizon = std::nullopt) {
    weights.validate();
    const int months = horizon.value_or(bundle.forecast_horizon);
    if (months < 1) throw ValidationError("horizon_months", "horizon_months must be >= 1");
    const auto suitability = crop_suitability(bundle, soil);
    std::map<std::string, double> prices;
    for (const auto& [crop, price] : forecast_prices(bundle, months))
        if (std::binary_search(bundle.crop_catalog().begin(), bundle.crop_catalog().end(), crop)) prices[crop] = price;
    const auto g = prices.empty() ? std::map<std::string, double>{} : price_scores(prices);
    auto advisory = rank_crops(bundle.crop_catalog(), suitability, g, weights);
    advisory.soil = soil;
    advisory.horizon_months = months;
    return advisory;
}

}  // namespace kisan

#endif  // KISAN_BUNDLE_HPP
