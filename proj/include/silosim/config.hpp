#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include <json.hpp>

#include "silosim/errors.hpp"

namespace silosim {

using json = nlohmann::ordered_json;

/// Shortest decimal text that round-trips the value. Used wherever a
/// probability must be carried exactly as configured (seed derivation, file
/// names, CSV columns).
inline std::string canonical_decimal(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{})
        throw Error("cannot format decimal value");
    return std::string(buf, ptr);
}

/// How a synthetic agent turns its database into an answer.
enum class ResponsePolicy {
    MajorityCentroid, ///< most frequent label, centroid of its items
    NearestToQuery,   ///< the single item closest to the shared query vector
};

inline const char* to_string(ResponsePolicy p) {
    return p == ResponsePolicy::MajorityCentroid ? "majority-centroid" : "nearest-to-query";
}

struct SyntheticParams {
    ResponsePolicy policy = ResponsePolicy::MajorityCentroid;
    std::size_t capacity = 10;         ///< database size C; FIFO eviction beyond it
    double rho = 1.0;                  ///< archetype sphere radius
    double sigma_init = 0.25;          ///< init noise; defaults to 0.25 * rho
    double sigma_gen = 0.05;           ///< generation noise; defaults to 0.05 * rho
    std::vector<double> label_weights; ///< empty = uniform over L
};

struct GmmParams {
    double eta = 0.1;         ///< mean learning rate, in (0, 1]
    double alpha0 = 1.0;      ///< initial pseudo-count per component
    double rho = 1.0;         ///< archetype sphere radius
    double sigma = 0.05;      ///< component std dev; defaults to 0.05 * rho
    double sigma_init = 0.25; ///< init noise on component means; 0.25 * rho
    double decay = 0.0;       ///< per-update multiplicative pseudo-count decay, off by default
};

struct LlmParams {
    std::string chat_url;       ///< e.g. http://host:port/v1/chat/completions
    std::string chat_model;
    std::string embed_url;      ///< e.g. http://host:port/v1/embeddings
    std::string embed_model;
    std::string question = "Describe the prettiest flower in a single sentence.";
    std::string name_list_file; ///< one lowercase name per line, order significant
    std::string corpus_file;    ///< one seed sentence per line
    std::size_t capacity = 10;
    int retries = 2;            ///< immediate retries per HTTP call before giving up
    int timeout_ms = 30000;
};

using BackendConfig = std::variant<SyntheticParams, GmmParams, LlmParams>;

inline const char* backend_kind_name(const BackendConfig& b) {
    if (std::holds_alternative<SyntheticParams>(b)) return "synthetic";
    if (std::holds_alternative<GmmParams>(b)) return "gmm";
    return "llm";
}

/// Thresholds of the silo-pattern classifier. m and W left unset resolve
/// from the run length: m = max(1, T/10), W = 2m.
struct ClassifierParams {
    std::optional<std::uint32_t> m;
    std::optional<std::uint32_t> W;
    double eps_entropy_const = 1e-9;
    double delta_entropy_approx = 0.1;
    double eps_min = 1e-12;

    std::uint32_t lateness(std::uint32_t T) const {
        if (m) return *m;
        return std::max<std::uint32_t>(1, T / 10);
    }
    std::uint32_t window(std::uint32_t T) const {
        if (W) return *W;
        return 2 * lateness(T);
    }
};

/// Full description of one system run. A Trajectory is a pure function of
/// this value.
struct SystemConfig {
    std::uint32_t n = 30;
    std::uint32_t T = 80;
    double p = 0.2;
    std::string p_text = "0.2"; ///< canonical decimal text of p
    std::uint32_t k = 15;
    std::uint32_t d = 8;
    std::uint32_t L = 8;
    std::uint64_t seed = 0;
    BackendConfig backend = SyntheticParams{};
    ClassifierParams classifier;

    void set_p(double value) {
        p = value;
        p_text = canonical_decimal(value);
    }
};

namespace detail {

inline void reject_unknown_keys(const json& obj, const std::string& path,
                                std::initializer_list<const char*> allowed) {
    for (const auto& [key, v] : obj.items()) {
        bool known = false;
        for (const char* a : allowed)
            if (key == a) { known = true; break; }
        if (!known)
            throw ConfigError("config error at " + path + ": unknown key '" + key + "'");
    }
}

template <typename T>
T convert_field(const json& v, const std::string& where) {
    if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean())
            throw ConfigError("config error at " + where + ": expected a boolean");
    } else if constexpr (std::is_unsigned_v<T>) {
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
            throw ConfigError("config error at " + where + ": expected a non-negative integer");
    } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer())
            throw ConfigError("config error at " + where + ": expected an integer");
    } else if constexpr (std::is_floating_point_v<T>) {
        if (!v.is_number())
            throw ConfigError("config error at " + where + ": expected a number");
    } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string())
            throw ConfigError("config error at " + where + ": expected a string");
    } else if constexpr (std::is_same_v<T, std::vector<double>>) {
        if (!v.is_array())
            throw ConfigError("config error at " + where + ": expected an array of numbers");
        for (const auto& e : v)
            if (!e.is_number())
                throw ConfigError("config error at " + where + ": expected an array of numbers");
    }
    try {
        return v.get<T>();
    } catch (const json::exception& e) {
        throw ConfigError("config error at " + where + ": " + e.what());
    }
}

template <typename T>
T get_field(const json& obj, const std::string& path, const char* key, T fallback) {
    if (!obj.contains(key)) return fallback;
    return convert_field<T>(obj.at(key), path + "." + key);
}

template <typename T>
T require_field(const json& obj, const std::string& path, const char* key) {
    if (!obj.contains(key))
        throw ConfigError("config error at " + path + ": missing key '" + key + "'");
    return convert_field<T>(obj.at(key), path + "." + key);
}

inline ResponsePolicy parse_policy(const std::string& s, const std::string& path) {
    if (s == "majority-centroid") return ResponsePolicy::MajorityCentroid;
    if (s == "nearest-to-query") return ResponsePolicy::NearestToQuery;
    throw ConfigError("config error at " + path +
                      ": policy must be 'majority-centroid' or 'nearest-to-query', got '" + s + "'");
}

inline BackendConfig parse_backend(const json& obj, const std::string& path) {
    if (!obj.is_object())
        throw ConfigError("config error at " + path + ": expected an object");
    const auto kind = require_field<std::string>(obj, path, "kind");
    if (kind == "synthetic") {
        reject_unknown_keys(obj, path, {"kind", "policy", "capacity", "rho",
                                        "sigmaInit", "sigmaGen", "labelWeights"});
        SyntheticParams sp;
        sp.policy = parse_policy(get_field<std::string>(obj, path, "policy",
                                                        "majority-centroid"), path);
        sp.capacity = get_field<std::size_t>(obj, path, "capacity", 10);
        sp.rho = get_field<double>(obj, path, "rho", 1.0);
        sp.sigma_init = get_field<double>(obj, path, "sigmaInit", 0.25 * sp.rho);
        sp.sigma_gen = get_field<double>(obj, path, "sigmaGen", 0.05 * sp.rho);
        sp.label_weights = get_field<std::vector<double>>(obj, path, "labelWeights", {});
        return sp;
    }
    if (kind == "gmm") {
        reject_unknown_keys(obj, path, {"kind", "eta", "alpha0", "rho", "sigma",
                                        "sigmaInit", "decay"});
        GmmParams gp;
        gp.eta = get_field<double>(obj, path, "eta", 0.1);
        gp.alpha0 = get_field<double>(obj, path, "alpha0", 1.0);
        gp.rho = get_field<double>(obj, path, "rho", 1.0);
        gp.sigma = get_field<double>(obj, path, "sigma", 0.05 * gp.rho);
        gp.sigma_init = get_field<double>(obj, path, "sigmaInit", 0.25 * gp.rho);
        gp.decay = get_field<double>(obj, path, "decay", 0.0);
        return gp;
    }
    if (kind == "llm") {
        reject_unknown_keys(obj, path, {"kind", "chatUrl", "chatModel", "embedUrl",
                                        "embedModel", "question", "nameListFile",
                                        "corpusFile", "capacity", "retries", "timeoutMs"});
        LlmParams lp;
        lp.chat_url = require_field<std::string>(obj, path, "chatUrl");
        lp.chat_model = require_field<std::string>(obj, path, "chatModel");
        lp.embed_url = require_field<std::string>(obj, path, "embedUrl");
        lp.embed_model = require_field<std::string>(obj, path, "embedModel");
        lp.question = get_field<std::string>(obj, path, "question", lp.question);
        lp.name_list_file = require_field<std::string>(obj, path, "nameListFile");
        lp.corpus_file = require_field<std::string>(obj, path, "corpusFile");
        lp.capacity = get_field<std::size_t>(obj, path, "capacity", 10);
        lp.retries = get_field<int>(obj, path, "retries", 2);
        lp.timeout_ms = get_field<int>(obj, path, "timeoutMs", 30000);
        return lp;
    }
    throw ConfigError("config error at " + path + ".kind: unknown backend kind '" + kind + "'");
}

inline ClassifierParams parse_classifier(const json& obj, const std::string& path) {
    if (!obj.is_object())
        throw ConfigError("config error at " + path + ": expected an object");
    reject_unknown_keys(obj, path, {"m", "W", "epsEntropyConst", "deltaEntropyApprox", "epsMin"});
    ClassifierParams cp;
    if (obj.contains("m")) cp.m = get_field<std::uint32_t>(obj, path, "m", 0);
    if (obj.contains("W")) cp.W = get_field<std::uint32_t>(obj, path, "W", 0);
    cp.eps_entropy_const = get_field<double>(obj, path, "epsEntropyConst", cp.eps_entropy_const);
    cp.delta_entropy_approx =
        get_field<double>(obj, path, "deltaEntropyApprox", cp.delta_entropy_approx);
    cp.eps_min = get_field<double>(obj, path, "epsMin", cp.eps_min);
    return cp;
}

} // namespace detail

/// Validates every SystemConfig invariant. min_T is 1 for configuration
/// files; the engine itself accepts the T = 0 measurement-only boundary run.
inline void validate_config(const SystemConfig& cfg, std::uint32_t min_T = 1) {
    if (cfg.n < 2) throw ConfigError("config error at n: need at least 2 agents");
    if (cfg.T < min_T)
        throw ConfigError("config error at T: must be >= " + std::to_string(min_T));
    if (!(cfg.p >= 0.0 && cfg.p <= 1.0))
        throw ConfigError("config error at p: must lie in [0, 1]");
    if (cfg.k < 1 || cfg.k > cfg.n - 1)
        throw ConfigError("config error at k: must lie in [1, n-1]");
    if (cfg.d < 1) throw ConfigError("config error at d: must be positive");
    if (cfg.L < 1) throw ConfigError("config error at L: must be positive");
    const auto& cl = cfg.classifier;
    if (cl.m && *cl.m < 1) throw ConfigError("config error at classifier.m: must be >= 1");
    if (cl.W && *cl.W < 2) throw ConfigError("config error at classifier.W: must be >= 2");
    if (!(cl.eps_entropy_const > 0))
        throw ConfigError("config error at classifier.epsEntropyConst: must be > 0");
    if (!(cl.delta_entropy_approx > 0))
        throw ConfigError("config error at classifier.deltaEntropyApprox: must be > 0");
    if (!(cl.eps_min > 0))
        throw ConfigError("config error at classifier.epsMin: must be > 0");

    if (const auto* sp = std::get_if<SyntheticParams>(&cfg.backend)) {
        if (sp->capacity < 1)
            throw ConfigError("config error at backend.capacity: must be >= 1");
        if (!(sp->rho > 0)) throw ConfigError("config error at backend.rho: must be > 0");
        if (sp->sigma_init < 0)
            throw ConfigError("config error at backend.sigmaInit: must be >= 0");
        if (sp->sigma_gen < 0)
            throw ConfigError("config error at backend.sigmaGen: must be >= 0");
        if (!sp->label_weights.empty()) {
            if (sp->label_weights.size() != cfg.L)
                throw ConfigError("config error at backend.labelWeights: need exactly L entries");
            double sum = 0.0;
            for (double w : sp->label_weights) {
                if (w < 0)
                    throw ConfigError("config error at backend.labelWeights: negative weight");
                sum += w;
            }
            if (!(sum > 0))
                throw ConfigError("config error at backend.labelWeights: weights sum to zero");
        }
    } else if (const auto* gp = std::get_if<GmmParams>(&cfg.backend)) {
        if (!(gp->eta > 0 && gp->eta <= 1))
            throw ConfigError("config error at backend.eta: must lie in (0, 1]");
        if (gp->alpha0 < 0)
            throw ConfigError("config error at backend.alpha0: must be >= 0");
        if (!(gp->alpha0 > 0))
            throw ConfigError("config error at backend.alpha0: component pseudo-counts must sum > 0");
        if (!(gp->rho > 0)) throw ConfigError("config error at backend.rho: must be > 0");
        if (gp->sigma < 0) throw ConfigError("config error at backend.sigma: must be >= 0");
        if (gp->sigma_init < 0)
            throw ConfigError("config error at backend.sigmaInit: must be >= 0");
        if (gp->decay < 0 || gp->decay >= 1)
            throw ConfigError("config error at backend.decay: must lie in [0, 1)");
    } else if (const auto* lp = std::get_if<LlmParams>(&cfg.backend)) {
        if (lp->capacity < 1)
            throw ConfigError("config error at backend.capacity: must be >= 1");
        if (lp->retries < 0)
            throw ConfigError("config error at backend.retries: must be >= 0");
        if (lp->timeout_ms <= 0)
            throw ConfigError("config error at backend.timeoutMs: must be > 0");
        if (lp->chat_url.empty() || lp->embed_url.empty())
            throw ConfigError("config error at backend: endpoint URLs must be non-empty");
    }
}

inline SystemConfig parse_system_config_json(const json& root, const std::string& path = "config") {
    if (!root.is_object())
        throw ConfigError("config error at " + path + ": expected a JSON object");
    detail::reject_unknown_keys(root, path,
                                {"n", "T", "p", "k", "d", "L", "backend", "seed", "classifier"});
    SystemConfig cfg;
    cfg.n = detail::require_field<std::uint32_t>(root, path, "n");
    cfg.T = detail::require_field<std::uint32_t>(root, path, "T");
    cfg.set_p(detail::require_field<double>(root, path, "p"));
    cfg.k = detail::require_field<std::uint32_t>(root, path, "k");
    if (root.contains("backend"))
        cfg.backend = detail::parse_backend(root.at("backend"), path + ".backend");
    const std::uint32_t default_d = std::holds_alternative<LlmParams>(cfg.backend) ? 768 : 8;
    cfg.d = detail::get_field<std::uint32_t>(root, path, "d", default_d);
    cfg.L = detail::get_field<std::uint32_t>(root, path, "L", 8);
    cfg.seed = detail::get_field<std::uint64_t>(root, path, "seed", 0);
    if (root.contains("classifier"))
        cfg.classifier = detail::parse_classifier(root.at("classifier"), path + ".classifier");
    validate_config(cfg);
    return cfg;
}

inline SystemConfig parse_system_config(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return parse_system_config_json(root);
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline SystemConfig load_system_config(const std::string& path) {
    try {
        return parse_system_config(read_text_file(path));
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

inline json backend_to_json(const BackendConfig& backend) {
    json b;
    if (const auto* sp = std::get_if<SyntheticParams>(&backend)) {
        b["kind"] = "synthetic";
        b["policy"] = to_string(sp->policy);
        b["capacity"] = sp->capacity;
        b["rho"] = sp->rho;
        b["sigmaInit"] = sp->sigma_init;
        b["sigmaGen"] = sp->sigma_gen;
        if (!sp->label_weights.empty()) b["labelWeights"] = sp->label_weights;
    } else if (const auto* gp = std::get_if<GmmParams>(&backend)) {
        b["kind"] = "gmm";
        b["eta"] = gp->eta;
        b["alpha0"] = gp->alpha0;
        b["rho"] = gp->rho;
        b["sigma"] = gp->sigma;
        b["sigmaInit"] = gp->sigma_init;
        b["decay"] = gp->decay;
    } else {
        const auto& lp = std::get<LlmParams>(backend);
        b["kind"] = "llm";
        b["chatUrl"] = lp.chat_url;
        b["chatModel"] = lp.chat_model;
        b["embedUrl"] = lp.embed_url;
        b["embedModel"] = lp.embed_model;
        b["question"] = lp.question;
        b["nameListFile"] = lp.name_list_file;
        b["corpusFile"] = lp.corpus_file;
        b["capacity"] = lp.capacity;
        b["retries"] = lp.retries;
        b["timeoutMs"] = lp.timeout_ms;
    }
    return b;
}

/// Canonical serialization: fixed key order, shortest round-trip numbers.
/// serialize(parse(serialize(c))) is byte-identical to serialize(c).
inline std::string serialize_system_config(const SystemConfig& cfg) {
    json root;
    root["n"] = cfg.n;
    root["T"] = cfg.T;
    root["p"] = cfg.p;
    root["k"] = cfg.k;
    root["d"] = cfg.d;
    root["L"] = cfg.L;
    root["backend"] = backend_to_json(cfg.backend);
    root["seed"] = cfg.seed;
    json cl;
    if (cfg.classifier.m) cl["m"] = *cfg.classifier.m;
    if (cfg.classifier.W) cl["W"] = *cfg.classifier.W;
    cl["epsEntropyConst"] = cfg.classifier.eps_entropy_const;
    cl["deltaEntropyApprox"] = cfg.classifier.delta_entropy_approx;
    cl["epsMin"] = cfg.classifier.eps_min;
    root["classifier"] = cl;
    return root.dump(2) + "\n";
}

} // namespace silosim
