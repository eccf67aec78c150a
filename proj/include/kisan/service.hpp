#ifndef KISAN_SERVICE_HPP
#define KISAN_SERVICE_HPP

// JSON-over-HTTP front end for a model bundle.
//
// Service::handle is a pure function of (snapshot, request), so every
// endpoint can be exercised without a socket. HttpFrontend adapts it to
// cpp-httplib, and serve() runs the whole thing with signal handling:
// SIGINT/SIGTERM stop after in-flight requests finish, SIGHUP reloads the
// bundle from disk and swaps the snapshot atomically.
//
//   GET  /healthz
//   GET  /api/v1/model/info
//   GET  /api/v1/crops
//   POST /api/v1/recommend
//   POST /api/v1/recommend/agronomic
//   POST /api/v1/score
//   POST /api/v1/fertilizer
//   GET  /api/v1/forecast/{crop}?months=N
//   GET  /api/v1/prices/{crop}/history
//   GET  /api/v1/model/feature-importance
//   GET  /api/v1/benchmark/latest
//
// Errors share one body shape:
//   {"error": {"code": "...", "message": "...", "fields": [{"field", "message"}]}}

#include <kisan/bundle.hpp>

#include <httplib.h>

#include <atomic>
#include <charconv>
#include <csignal>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <memory>
#include <mutex>
#include <pthread.h>
#include <thread>

namespace kisan {

inline constexpr const char* api_prefix = "/api/v1";
inline constexpr int max_forecast_months = 120;

struct HttpResponse {
    int status = 200;
    std::string body;
    std::string content_type = "application/json";
};

namespace detail {

inline HttpResponse json_response(int status, const json& body) { return {status, body.dump(), "application/json"}; }

inline HttpResponse error_response(int status, std::string code, std::string message,
                                   const std::vector<FieldError>& fields = {}) {
    json f = json::array();
    for (const auto& e : fields) f.push_back(json{{"field", e.field}, {"message", e.message}});
    return json_response(status,
                         json{{"error", json{{"code", std::move(code)}, {"message", std::move(message)}, {"fields", f}}}});
}

// Collects field errors while reading a request body.
class BodyReader {
public:
    explicit BodyReader(const json& body) : body_(body) {}

    double number(const std::string& field) {
        if (!body_.contains(field)) {
            errors_.push_back({field, field + " is required"});
            return 0;
        }
        return number_at(body_.at(field), field);
    }

    std::optional<double> optional_number(const json& obj, const std::string& field, const std::string& path) {
        if (!obj.contains(field) || obj.at(field).is_null()) return std::nullopt;
        return number_at(obj.at(field), path);
    }

    std::string string(const std::string& field) {
        if (!body_.contains(field) || !body_.at(field).is_string()) {
            errors_.push_back({field, field + " must be a string"});
            return {};
        }
        return body_.at(field).get<std::string>();
    }

    void fail(std::string field, std::string message) { errors_.push_back({std::move(field), std::move(message)}); }

    void check() {
        if (!errors_.empty()) throw ValidationError(std::move(errors_));
    }

private:
    double number_at(const json& v, const std::string& field) {
        if (!v.is_number()) {
            errors_.push_back({field, field + " must be a number"});
            return 0;
        }
        return v.get<double>();
    }

    const json& body_;
    std::vector<FieldError> errors_;
};

inline SoilSample read_soil(BodyReader& r) {
    SoilSample s;
    s.n = r.number("n");
    s.p = r.number("p");
    s.k = r.number("k");
    s.temperature = r.number("temperature");
    s.humidity = r.number("humidity");
    s.ph = r.number("ph");
    s.rainfall = r.number("rainfall");
    return s;
}

inline ScoreWeights read_weights(const json& body, BodyReader& r) {
    ScoreWeights w;
    if (!body.contains("weights") || body.at("weights").is_null()) return w;
    const auto& obj = body.at("weights");
    if (!obj.is_object()) {
        r.fail("weights", "weights must be an object with w1 and w2");
        return w;
    }
    const auto w1 = r.optional_number(obj, "w1", "weights.w1");
    const auto w2 = r.optional_number(obj, "w2", "weights.w2");
    if (w1 && w2) {
        w = {*w1, *w2};
    } else if (w1) {
        w = {*w1, 1.0 - *w1};
    } else if (w2) {
        w = {1.0 - *w2, *w2};
    }
    return w;
}

inline json soil_json(const SoilSample& s) {
    return json{{"n", s.n},
                {"p", s.p},
                {"k", s.k},
                {"temperature", s.temperature},
                {"humidity", s.humidity},
                {"ph", s.ph},
                {"rainfall", s.rainfall}};
}

inline json weights_json(const ScoreWeights& w) { return json{{"w1", w.w1}, {"w2", w.w2}}; }

inline json advisory_json(const RankedAdvisory& a) {
    json recs = json::array();
    for (std::size_t i = 0; i < a.recommendations.size(); ++i) {
        const auto& r = a.recommendations[i];
        recs.push_back(json{{"rank", i + 1},
                            {"crop", r.crop_id},
                            {"p_yield", r.p_yield},
                            {"g_price", r.g_price},
                            {"score", r.score},
                            {"market_data", r.market_data}});
    }
    json out{{"weights", weights_json(a.weights)}, {"optimal", a.optimal().crop_id}, {"recommendations", recs}};
    out["soil"] = a.soil ? soil_json(*a.soil) : json(nullptr);
    out["horizon_months"] = a.horizon_months ? json(*a.horizon_months) : json(nullptr);
    return out;
}

inline json forecast_json(const ForecastResult& f) {
    json points = json::array();
    for (const auto& p : f.points)
        points.push_back(json{{"year", p.year},
                              {"month", p.month},
                              {"yhat", p.yhat},
                              {"trend", p.trend},
                              {"seasonal", p.seasonal},
                              {"interval_low", p.interval_low},
                              {"interval_high", p.interval_high}});
    return json{{"crop", f.crop_id}, {"months", f.points.size()}, {"points", points}};
}

inline bool starts_with(std::string_view s, std::string_view prefix) {
    return s.substr(0, prefix.size()) == prefix;
}

}  // namespace detail

class Service {
public:
    using Query = std::map<std::string, std::string>;

    explicit Service(std::shared_ptr<const ModelBundle> bundle, std::optional<json> benchmark = std::nullopt)
        : bundle_(std::move(bundle)), benchmark_(std::move(benchmark)) {
        if (!bundle_) throw Error("service needs a model bundle");
    }

    std::shared_ptr<const ModelBundle> snapshot() const {
        std::lock_guard lock(mutex_);
        return bundle_;
    }

    void swap_bundle(std::shared_ptr<const ModelBundle> next) {
        if (!next) throw Error("cannot swap in an empty bundle");
        std::lock_guard lock(mutex_);
        bundle_ = std::move(next);
    }

    void set_benchmark(std::optional<json> report) {
        std::lock_guard lock(mutex_);
        benchmark_ = std::move(report);
    }

    std::uint64_t requests() const noexcept { return requests_.load(); }
    std::uint64_t client_errors() const noexcept { return client_errors_.load(); }
    std::uint64_t server_errors() const noexcept { return server_errors_.load(); }

    HttpResponse handle(const std::string& method, const std::string& path, const Query& query = {},
                        const std::string& body = {}) {
        ++requests_;
        HttpResponse r = dispatch(method, path, query, body);
        if (r.status >= 500) {
            ++server_errors_;
        } else if (r.status >= 400) {
            ++client_errors_;
        }
        return r;
    }

private:
    HttpResponse dispatch(const std::string& method, const std::string& path, const Query& query,
                          const std::string& body) {
        const auto bundle = snapshot();
        try {
            return route(*bundle, method, path, query, body);
        } catch (const ValidationError& e) {
            return detail::error_response(422, "validation_error", e.what(), e.errors());
        } catch (const json::exception& e) {
            return detail::error_response(400, "bad_request", std::string("malformed JSON body: ") + e.what());
        } catch (const std::exception& e) {
            return detail::error_response(500, "internal", e.what());
        }
    }

    static json parse_body(const std::string& body) {
        if (body.empty()) throw ValidationError("body", "request body must be a JSON object");
        auto doc = json::parse(body);
        if (!doc.is_object()) throw ValidationError("body", "request body must be a JSON object");
        return doc;
    }

    HttpResponse route(const ModelBundle& bundle, const std::string& method, const std::string& path,
                       const Query& query, const std::string& body) {
        const std::string api = api_prefix;
        auto expect = [&](const char* m) { return method == m; };
        auto not_allowed = [&] {
            return detail::error_response(405, "method_not_allowed", method + " is not allowed on " + path);
        };

        if (path == "/healthz") return expect("GET") ? healthz(bundle) : not_allowed();
        if (!detail::starts_with(path, api + "/")) return not_found(path);
        const std::string rest = path.substr(api.size());

        if (rest == "/model/info") return expect("GET") ? model_info(bundle) : not_allowed();
        if (rest == "/crops") return expect("GET") ? crops(bundle) : not_allowed();
        if (rest == "/recommend") return expect("POST") ? recommend_endpoint(bundle, body, false) : not_allowed();
        if (rest == "/recommend/agronomic")
            return expect("POST") ? recommend_endpoint(bundle, body, true) : not_allowed();
        if (rest == "/score") return expect("POST") ? score(body) : not_allowed();
        if (rest == "/fertilizer") return expect("POST") ? fertilizer(bundle, body) : not_allowed();
        if (rest == "/model/feature-importance") return expect("GET") ? importance(bundle) : not_allowed();
        if (rest == "/benchmark/latest") return expect("GET") ? benchmark_latest() : not_allowed();

        if (detail::starts_with(rest, "/forecast/")) {
            const auto crop = rest.substr(std::string_view("/forecast/").size());
            if (crop.empty() || crop.find('/') != std::string::npos) return not_found(path);
            return expect("GET") ? forecast(bundle, crop, query) : not_allowed();
        }
        if (detail::starts_with(rest, "/prices/")) {
            const auto tail = rest.substr(std::string_view("/prices/").size());
            const auto slash = tail.find('/');
            if (slash == std::string::npos || slash == 0 || tail.substr(slash) != "/history") return not_found(path);
            return expect("GET") ? history(bundle, tail.substr(0, slash)) : not_allowed();
        }
        return not_found(path);
    }

    static HttpResponse not_found(const std::string& path) {
        return detail::error_response(404, "not_found", "no route for " + path);
    }

    static HttpResponse healthz(const ModelBundle& b) {
        return detail::json_response(200, json{{"status", "ok"}, {"bundle_version", b.format_version}});
    }

    static HttpResponse model_info(const ModelBundle& b) {
        json fps = json::array();
        for (const auto& f : b.fingerprints)
            fps.push_back(json{{"name", f.name}, {"rows", f.rows}, {"classes", f.classes}, {"content_hash", f.content_hash}});
        json price_crops = json::array();
        for (const auto& [crop, m] : b.price_models) price_crops.push_back(crop);
        json fert = nullptr;
        if (b.fertilizer)
            fert = json{{"fertilizers", b.fertilizer->class_catalog()},
                        {"soil_types", b.fertilizer->soil_types},
                        {"features", b.fertilizer->classifier.schema().feature_names},
                        {"forest", detail::forest_config_json(b.fertilizer->classifier.config())}};
        return detail::json_response(
            200, json{{"bundle_version", b.format_version},
                      {"created_at", b.created_at},
                      {"crop_model",
                       json{{"crops", b.crop_catalog()},
                            {"schema", b.crop_model.schema().id},
                            {"features", b.crop_model.schema().feature_names},
                            {"forest", detail::forest_config_json(b.crop_model.config())}}},
                      {"fertilizer_model", fert},
                      {"price_crops", price_crops},
                      {"forecast",
                       json{{"n_changepoints", b.forecast_config.n_changepoints},
                            {"fourier_order", b.forecast_config.fourier_order},
                            {"ridge_lambda", b.forecast_config.ridge_lambda},
                            {"horizon_months", b.forecast_horizon}}},
                      {"default_weights", detail::weights_json(ScoreWeights{})},
                      {"fingerprints", fps}});
    }

    static HttpResponse crops(const ModelBundle& b) {
        json list = json::array();
        for (const auto& crop : b.crop_catalog())
            list.push_back(json{{"crop", crop},
                                {"price_model", b.price_models.count(crop) > 0},
                                {"price_history", b.price_history.count(crop) > 0}});
        return detail::json_response(200, json{{"count", b.crop_catalog().size()}, {"crops", list}});
    }

    static HttpResponse recommend_endpoint(const ModelBundle& b, const std::string& text, bool agronomic) {
        const auto body = parse_body(text);
        detail::BodyReader r(body);
        const auto soil = detail::read_soil(r);
        ScoreWeights weights = agronomic ? ScoreWeights{1.0, 0.0} : detail::read_weights(body, r);
        std::optional<int> horizon;
        if (body.contains("horizon_months") && !body.at("horizon_months").is_null()) {
            const auto& h = body.at("horizon_months");
            if (!h.is_number_integer() || h.get<long long>() < 1 || h.get<long long>() > max_forecast_months)
                r.fail("horizon_months", "horizon_months must be an integer in [1," +
                                             std::to_string(max_forecast_months) + "]");
            else
                horizon = h.get<int>();
        }
        r.check();
        return detail::json_response(200, detail::advisory_json(recommend(b, soil, weights, horizon)));
    }

    static HttpResponse score(const std::string& text) {
        const auto body = parse_body(text);
        detail::BodyReader r(body);
        const double p = r.number("p_yield");
        const double g = r.number("g_price");
        const auto weights = detail::read_weights(body, r);
        r.check();
        const double s = composite_score(p, g, weights);
        return detail::json_response(
            200, json{{"p_yield", p}, {"g_price", g}, {"weights", detail::weights_json(weights)}, {"score", s}});
    }

    static HttpResponse fertilizer(const ModelBundle& b, const std::string& text) {
        if (!b.fertilizer) return detail::error_response(404, "not_found", "this bundle has no fertilizer model");
        const auto body = parse_body(text);
        detail::BodyReader r(body);
        FertilizerInput in;
        in.n = r.number("n");
        in.p = r.number("p");
        in.k = r.number("k");
        in.moisture = r.number("moisture");
        in.temperature = r.number("temperature");
        in.soil_type = r.string("soil_type");
        r.check();
        const auto advice = recommend_fertilizer(*b.fertilizer, in);
        json post = json::array();
        for (const auto& [name, p] : advice.posterior) post.push_back(json{{"fertilizer", name}, {"probability", p}});
        return detail::json_response(200, json{{"fertilizer", advice.fertilizer}, {"posterior", post}});
    }

    static HttpResponse forecast(const ModelBundle& b, const std::string& crop, const Query& query) {
        const auto it = b.price_models.find(crop);
        if (it == b.price_models.end())
            return detail::error_response(404, "not_found", "no price model for crop '" + crop + "'");
        int months = b.forecast_horizon;
        if (const auto q = query.find("months"); q != query.end()) {
            int v = 0;
            const auto* first = q->second.data();
            const auto* last = first + q->second.size();
            const auto [ptr, ec] = std::from_chars(first, last, v);
            if (ec != std::errc{} || ptr != last || v < 1 || v > max_forecast_months)
                throw ValidationError("months", "months must be an integer in [1," +
                                                    std::to_string(max_forecast_months) + "]");
            months = v;
        }
        return detail::json_response(200, detail::forecast_json(forecast_horizon(it->second, months)));
    }

    static HttpResponse history(const ModelBundle& b, const std::string& crop) {
        const auto it = b.price_history.find(crop);
        if (it == b.price_history.end())
            return detail::error_response(404, "not_found", "no price history for crop '" + crop + "'");
        json points = json::array();
        for (const auto& p : it->second.points)
            points.push_back(json{{"year", p.year}, {"month", p.month}, {"price", p.price}});
        return detail::json_response(200, json{{"crop", crop}, {"count", points.size()}, {"points", points}});
    }

    static HttpResponse importance(const ModelBundle& b) {
        const auto imp = feature_importances(b.crop_model);
        const auto& names = b.crop_model.schema().feature_names;
        json list = json::array();
        for (std::size_t j = 0; j < imp.size(); ++j) list.push_back(json{{"feature", names[j]}, {"importance", imp[j]}});
        return detail::json_response(200, json{{"model", "random_forest"}, {"importances", list}});
    }

    HttpResponse benchmark_latest() const {
        std::lock_guard lock(mutex_);
        if (!benchmark_) return detail::error_response(404, "not_found", "no benchmark report has been published");
        return detail::json_response(200, *benchmark_);
    }

    mutable std::mutex mutex_;
    std::shared_ptr<const ModelBundle> bundle_;
    std::optional<json> benchmark_;
    std::atomic<std::uint64_t> requests_{0};
    std::atomic<std::uint64_t> client_errors_{0};
    std::atomic<std::uint64_t> server_errors_{0};
};

// ------------------------------------------------------------- HTTP layer

// Binds a Service to a cpp-httplib server. Origins listed in `cors` (or "*")
// get Access-Control-Allow-Origin on every response and preflight support.
class HttpFrontend {
public:
    HttpFrontend(Service& service, std::vector<std::string> cors = {}) : service_(service), cors_(std::move(cors)) {
        auto handler = [this](const char* method) {
            return [this, method](const httplib::Request& req, httplib::Response& res) { respond(method, req, res); };
        };
        server_.Get(".*", handler("GET"));
        server_.Post(".*", handler("POST"));
        server_.Put(".*", handler("PUT"));
        server_.Delete(".*", handler("DELETE"));
        server_.Patch(".*", handler("PATCH"));
        server_.Options(".*", [this](const httplib::Request& req, httplib::Response& res) {
            apply_cors(req, res);
            res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
            res.set_header("Access-Control-Allow-Headers", "Content-Type");
            res.status = 204;
        });
    }

    // Port 0 picks a free port. Returns the bound port, or -1.
    int bind(const std::string& host, int port) {
        if (port == 0) return server_.bind_to_any_port(host);
        return server_.bind_to_port(host, port) ? port : -1;
    }

    bool listen() { return server_.listen_after_bind(); }
    void stop() { server_.stop(); }
    void wait_until_ready() const { server_.wait_until_ready(); }
    bool is_running() const { return server_.is_running(); }

private:
    void apply_cors(const httplib::Request& req, httplib::Response& res) const {
        if (cors_.empty() || !req.has_header("Origin")) return;
        const auto origin = req.get_header_value("Origin");
        for (const auto& allowed : cors_) {
            if (allowed == "*" || allowed == origin) {
                res.set_header("Access-Control-Allow-Origin", allowed == "*" ? "*" : origin);
                res.set_header("Vary", "Origin");
                return;
            }
        }
    }

    void respond(const char* method, const httplib::Request& req, httplib::Response& res) {
        Service::Query query;
        for (const auto& [k, v] : req.params) query.emplace(k, v);
        const auto out = service_.handle(method, req.path, query, req.body);
        res.status = out.status;
        res.set_content(out.body, out.content_type);
        apply_cors(req, res);
    }

    Service& service_;
    std::vector<std::string> cors_;
    httplib::Server server_;
};

// ----------------------------------------------------------- configuration

struct ServiceConfig {
    std::string bundle_path = "model.kisan.json";
    std::string host = "127.0.0.1";
    int port = 8080;
    std::vector<std::string> cors_origins;
    std::optional<std::string> benchmark_path;
};

// Values given on the command line; unset fields fall through to the
// environment and then to the defaults.
struct ServiceFlags {
    std::optional<std::string> bundle;
    std::optional<std::string> bind;
    std::vector<std::string> cors;
    std::optional<std::string> benchmark;
};

inline std::pair<std::string, int> parse_bind(const std::string& text) {
    const auto colon = text.rfind(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == text.size())
        throw ValidationError("bind", "bind must be HOST:PORT (got '" + text + "')");
    const auto port_text = text.substr(colon + 1);
    int port = -1;
    const auto [ptr, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
    if (ec != std::errc{} || ptr != port_text.data() + port_text.size() || port < 0 || port > 65535)
        throw ValidationError("bind", "bind port must be in [0,65535] (got '" + port_text + "')");
    return {text.substr(0, colon), port};
}

inline std::vector<std::string> split_origins(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (auto t = detail::trim(item); !t.empty()) out.push_back(std::move(t));
    return out;
}

// Precedence: flags, then KISAN_BUNDLE / KISAN_BIND / KISAN_CORS /
// KISAN_BENCHMARK, then defaults.
inline ServiceConfig resolve_service_config(
    const ServiceFlags& flags,
    const std::function<std::optional<std::string>(const std::string&)>& env = [](const std::string& name) {
        const char* v = std::getenv(name.c_str());
        return v ? std::optional<std::string>(v) : std::nullopt;
    }) {
    ServiceConfig c;
    if (flags.bundle) {
        c.bundle_path = *flags.bundle;
    } else if (auto v = env("KISAN_BUNDLE")) {
        c.bundle_path = *v;
    }
    std::optional<std::string> bind = flags.bind ? flags.bind : env("KISAN_BIND");
    if (bind) std::tie(c.host, c.port) = parse_bind(*bind);
    if (!flags.cors.empty()) {
        c.cors_origins = flags.cors;
    } else if (auto v = env("KISAN_CORS")) {
        c.cors_origins = split_origins(*v);
    }
    if (flags.benchmark) {
        c.benchmark_path = flags.benchmark;
    } else if (auto v = env("KISAN_BENCHMARK")) {
        c.benchmark_path = *v;
    }
    return c;
}

inline json load_benchmark_report(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open benchmark report '" + path.string() + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw DataError("benchmark report parse error in '" + path.string() + "': " + e.what());
    }
}

// Runs until SIGINT or SIGTERM. Returns 0 on a clean stop, 2 when the bundle
// cannot be loaded or the address cannot be bound.
inline int serve(const ServiceConfig& config, std::ostream& log = std::cerr) {
    std::shared_ptr<const ModelBundle> bundle;
    std::optional<json> report;
    try {
        bundle = std::make_shared<const ModelBundle>(load_bundle(config.bundle_path));
        if (config.benchmark_path) report = load_benchmark_report(*config.benchmark_path);
    } catch (const std::exception& e) {
        log << "kisan serve: " << e.what() << '\n';
        return 2;
    }

    // Block the signals before any server thread exists so that only the
    // watcher below receives them.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    sigaddset(&signals, SIGHUP);
    sigset_t previous;
    pthread_sigmask(SIG_BLOCK, &signals, &previous);

    Service service(bundle, std::move(report));
    HttpFrontend frontend(service, config.cors_origins);
    const int port = frontend.bind(config.host, config.port);
    if (port < 0) {
        pthread_sigmask(SIG_SETMASK, &previous, nullptr);
        log << "kisan serve: cannot bind " << config.host << ':' << config.port << " (address in use?)\n";
        return 2;
    }

    std::atomic<bool> done{false};
    std::thread watcher([&] {
        for (;;) {
            int sig = 0;
            if (sigwait(&signals, &sig) != 0) continue;
            if (done.load()) return;
            if (sig == SIGHUP) {
                try {
                    service.swap_bundle(std::make_shared<const ModelBundle>(load_bundle(config.bundle_path)));
                    log << "kisan serve: reloaded " << config.bundle_path << '\n';
                } catch (const std::exception& e) {
                    log << "kisan serve: reload failed, keeping the current bundle: " << e.what() << '\n';
                }
                continue;
            }
            done.store(true);
            log << "kisan serve: shutting down\n";
            frontend.stop();
            return;
        }
    });

    log << "kisan serve: listening on " << config.host << ':' << port << " (" << bundle->crop_catalog().size()
        << " crops)\n";
    frontend.listen();
    if (!done.exchange(true)) pthread_kill(watcher.native_handle(), SIGTERM);
    watcher.join();
    pthread_sigmask(SIG_SETMASK, &previous, nullptr);
    log << "kisan serve: stopped after " << service.requests() << " requests\n";
    return 0;
}

}  // namespace kisan

#endif  // KISAN_SERVICE_HPP
