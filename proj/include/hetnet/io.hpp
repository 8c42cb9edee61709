#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hetnet/ccdf.hpp"
#include "hetnet/config.hpp"
#include "hetnet/optimize.hpp"

namespace hetnet {

inline constexpr const char* kToolName = "hetnet";
inline constexpr const char* kToolVersion = "0.1.0";

struct ThresholdSpec {
    std::string kind = "rate";  ///< "rate" (bits/s) or "sinr" (dB grid)
    double start = 0.0;
    double stop = 0.0;
    int points = 0;
    std::string scale = "log";

    std::vector<double> grid() const { return make_threshold_grid(start, stop, points, scale); }
};

struct McSpec {
    double window_km = 20.0;
    int drops = 2000;
    std::uint64_t seed = 1;
};

/// One experiment description: the network plus optional mode-specific blocks.
struct RunConfig {
    NetworkConfig network;
    std::optional<ThresholdSpec> thresholds;
    McSpec mc;
    std::optional<SweepSpec> sweep;
    nlohmann::json echo;  ///< normalized source document, re-parseable
};

namespace detail {

template <typename T>
T require(const nlohmann::json& j, const std::string& key, const std::string& scope) {
    const std::string path = scope.empty() ? key : scope + "." + key;
    if (!j.contains(key)) throw ConfigError(path, "missing required key `" + path + "`");
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError(path, "key `" + path + "` has the wrong type");
    }
}

template <typename T>
T optional_or(const nlohmann::json& j, const std::string& key, T fallback) {
    if (!j.contains(key)) return fallback;
    return j.at(key).get<T>();
}

}  // namespace detail

inline RunConfig parse_run_config(const nlohmann::json& doc) {
    RunConfig rc;
    rc.echo = doc;
    if (!doc.contains("tiers") || !doc.at("tiers").is_array() || doc.at("tiers").empty())
        throw ConfigError("tiers", "missing or empty `tiers` array");
    std::size_t k = 0;
    for (const auto& jt : doc.at("tiers")) {
        const std::string scope = "tiers[" + std::to_string(k) + "]";
        TierConfig t = make_tier(detail::require<double>(jt, "density_per_km2", scope),
                                 detail::require<double>(jt, "tx_power_dbm", scope),
                                 detail::require<double>(jt, "bias_db", scope),
                                 detail::require<double>(jt, "ple", scope));
        if (jt.contains("backhaul_mbps"))
            t.backhaul_bps = jt.at("backhaul_mbps").get<double>() * 1e6;
        t.activity = detail::optional_or(jt, "activity", 1.0);
        rc.network.tiers.push_back(t);
        ++k;
    }
    rc.network.user_density = detail::require<double>(doc, "user_density_per_km2", "");
    rc.network.bandwidth_hz = detail::require<double>(doc, "bandwidth_hz", "");
    rc.network.noise_mw = dbm_to_mw(detail::require<double>(doc, "noise_dbm", ""));
    rc.network.eta = detail::require<double>(doc, "eta", "");
    rc.network.validate();

    if (doc.contains("thresholds")) {
        const auto& jt = doc.at("thresholds");
        ThresholdSpec ts;
        ts.kind = detail::require<std::string>(jt, "kind", "thresholds");
        ts.start = detail::require<double>(jt, "start", "thresholds");
        ts.stop = detail::require<double>(jt, "stop", "thresholds");
        ts.points = detail::require<int>(jt, "points", "thresholds");
        ts.scale = detail::require<std::string>(jt, "scale", "thresholds");
        if (ts.kind != "rate" && ts.kind != "sinr")
            throw ConfigError("thresholds.kind", "kind must be `rate` or `sinr`");
        if (ts.points < 1) throw ConfigError("thresholds.points", "need at least one point");
        rc.thresholds = ts;
    }
    if (doc.contains("mc")) {
        const auto& jm = doc.at("mc");
        rc.mc.window_km = detail::require<double>(jm, "window_km", "mc");
        rc.mc.drops = detail::require<int>(jm, "drops", "mc");
        rc.mc.seed = detail::require<std::uint64_t>(jm, "seed", "mc");
        if (rc.mc.drops < 1) throw ConfigError("mc.drops", "drop count must be >= 1");
    }
    if (doc.contains("sweep")) {
        const auto& js = doc.at("sweep");
        SweepSpec sw;
        sw.bias_db = detail::require<std::vector<double>>(js, "bias_db", "sweep");
        sw.eta = detail::require<std::vector<double>>(js, "eta", "sweep");
        const auto obj = detail::require<std::string>(js, "objective", "sweep");
        if (obj == "rate_coverage") {
            sw.objective = ObjectiveKind::RateCoverage;
            sw.rho_bps = detail::require<double>(js, "rho_bps", "sweep");
        } else if (obj == "percentile") {
            sw.objective = ObjectiveKind::Percentile;
            sw.quantile = detail::require<double>(js, "quantile", "sweep");
        } else if (obj == "median") {
            sw.objective = ObjectiveKind::Median;
        } else {
            throw ConfigError("sweep.objective",
                              "objective must be rate_coverage, percentile, or median");
        }
        sw.path = detail::optional_or<std::string>(js, "path", "full") == "mean_load"
                      ? RatePath::MeanLoad
                      : RatePath::Full;
        rc.sweep = sw;
    }
    return rc;
}

inline RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot open config file: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config", std::string("config is not valid JSON: ") + e.what());
    }
    return parse_run_config(doc);
}

// ---------------------------------------------------------------------------
// Output files
// ---------------------------------------------------------------------------

inline std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    return h;
}

inline std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

/// CSV accumulator: content is built in memory so the manifest can checksum
/// exactly what lands on disk.
class CsvFile {
public:
    explicit CsvFile(std::vector<std::string> columns) {
        for (std::size_t i = 0; i < columns.size(); ++i)
            body_ += (i ? "," : "") + columns[i];
        body_ += "\n";
    }
    void row(const std::vector<double>& values) {
        for (std::size_t i = 0; i < values.size(); ++i)
            body_ += (i ? "," : "") + format_number(values[i]);
        body_ += "\n";
    }
    void raw_row(const std::vector<std::string>& values) {
        for (std::size_t i = 0; i < values.size(); ++i) body_ += (i ? "," : "") + values[i];
        body_ += "\n";
    }
    const std::string& content() const { return body_; }

private:
    std::string body_;
};

struct OutputRecord {
    std::string path;
    std::string fnv1a64_hex;
};

struct RunManifest {
    std::string mode;
    std::uint64_t seed = 0;
    double wall_clock_ms = 0.0;
    nlohmann::json config_echo;
    std::vector<OutputRecord> outputs;
};

inline std::string write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write output file: " + path);
    out << content;
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(content)));
    return buf;
}

inline void write_manifest(const std::string& path, const RunManifest& m) {
    nlohmann::json j;
    j["tool"] = kToolName;
    j["version"] = kToolVersion;
    j["mode"] = m.mode;
    j["seed"] = m.seed;
    j["wall_clock_ms"] = m.wall_clock_ms;
    j["config"] = m.config_echo;
    j["outputs"] = nlohmann::json::array();
    for (const auto& o : m.outputs) j["outputs"].push_back({{"path", o.path}, {"fnv1a64", o.fnv1a64_hex}});
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write manifest: " + path);
    out << j.dump(2) << "\n";
}

}  // namespace hetnet
