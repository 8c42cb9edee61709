#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "hetnet/common.hpp"

namespace hetnet {

/// User population split induced by biased association:
/// macro users, small-cell users that would pick the small cell unbiased,
/// and users pushed onto the small cell by the bias (range expanded).
enum class UserClass { Macro, SmallUnbiased, Offloaded };

inline const char* to_string(UserClass l) {
    switch (l) {
        case UserClass::Macro: return "macro";
        case UserClass::SmallUnbiased: return "small_unbiased";
        default: return "offloaded";
    }
}

/// Serving tier of a class, 1-based (macro = 1).
inline int serving_tier_of(UserClass l) { return l == UserClass::Macro ? 1 : 2; }

/// G_l: inverse of the effective resource fraction available to class l when
/// the macro tier is muted on a fraction eta of resources.
inline double resource_divisor(UserClass l, double eta) {
    if (l == UserClass::Offloaded) {
        if (!(eta > 0.0))
            throw DegenerateClassError("resource divisor for offloaded users undefined at eta=0");
        return 1.0 / eta;
    }
    return 1.0 / (1.0 - eta);
}

/// One base-station tier. All fields are linear-domain; use the dB helpers
/// (or the JSON loader) at the boundary.
struct TierConfig {
    double density = 0.0;       ///< AP intensity [1/km^2]
    double tx_power_mw = 0.0;   ///< transmit power [mW]
    double bias_lin = 1.0;      ///< association bias (1 = 0 dB)
    double ple = 4.0;           ///< path-loss exponent, must exceed 2
    std::optional<double> backhaul_bps;  ///< absent = infinite backhaul
    double activity = 1.0;      ///< probability an AP transmits when its tier is active
};

inline TierConfig make_tier(double density_per_km2, double tx_power_dbm, double bias_db,
                            double ple, std::optional<double> backhaul_bps = std::nullopt,
                            double activity = 1.0) {
    return TierConfig{density_per_km2, dbm_to_mw(tx_power_dbm), db_to_linear(bias_db), ple,
                      backhaul_bps, activity};
}

/// Full network scenario. Tier 0 is the macro tier; its bias is pinned to 1.
/// eta in [0,1): eta == 0 selects the no-partitioning model, where all users
/// of an AP share the whole band and no class is shielded from the macro tier.
struct NetworkConfig {
    std::vector<TierConfig> tiers;
    double user_density = 0.0;  ///< [1/km^2]
    double bandwidth_hz = 0.0;
    double noise_mw = 0.0;      ///< thermal noise power sigma^2 [mW]
    double eta = 0.0;

    std::size_t num_tiers() const { return tiers.size(); }
    bool partitioned() const { return eta > 0.0; }

    bool equal_ple() const {
        for (const auto& t : tiers)
            if (t.ple != tiers.front().ple) return false;
        return true;
    }
    bool all_active() const {
        for (const auto& t : tiers)
            if (t.activity != 1.0) return false;
        return true;
    }

    void validate(bool require_two_tiers = true) const {
        if (tiers.empty() || (require_two_tiers && tiers.size() < 2))
            throw ConfigError("tiers", "at least two tiers are required");
        for (std::size_t k = 0; k < tiers.size(); ++k) {
            const auto& t = tiers[k];
            const std::string at = "tiers[" + std::to_string(k) + "]";
            if (!(t.density > 0.0)) throw ConfigError(at + ".density_per_km2", "density must be > 0");
            if (!(t.tx_power_mw > 0.0)) throw ConfigError(at + ".tx_power_dbm", "power must be finite");
            if (!(t.ple > 2.0)) throw ConfigError(at + ".ple", "path-loss exponent must exceed 2");
            if (!(t.bias_lin > 0.0)) throw ConfigError(at + ".bias_db", "bias must be finite");
            if (!(t.activity > 0.0 && t.activity <= 1.0))
                throw ConfigError(at + ".activity", "activity must be in (0,1]");
            if (t.backhaul_bps && !(*t.backhaul_bps > 0.0))
                throw ConfigError(at + ".backhaul_mbps", "backhaul must be > 0 when given");
        }
        if (std::abs(tiers[0].bias_lin - 1.0) > 1e-12)
            throw ConfigError("tiers[0].bias_db", "macro-tier bias is fixed at 0 dB");
        if (!(user_density > 0.0)) throw ConfigError("user_density_per_km2", "must be > 0");
        if (!(bandwidth_hz > 0.0)) throw ConfigError("bandwidth_hz", "must be > 0");
        if (noise_mw < 0.0) throw ConfigError("noise_dbm", "noise power must be >= 0");
        if (!(eta >= 0.0 && eta < 1.0)) throw ConfigError("eta", "must lie in [0,1)");
    }
};

/// Parameters of tier k normalized by serving tier j (both 0-based):
/// power, bias and path-loss-exponent ratios.
struct NormalizedParams {
    double p_hat = 1.0;
    double b_hat = 1.0;
    double a_hat = 1.0;
};

inline NormalizedParams normalized_params(const NetworkConfig& cfg, std::size_t k,
                                          std::size_t j) {
    const auto& tk = cfg.tiers[k];
    const auto& tj = cfg.tiers[j];
    return NormalizedParams{tk.tx_power_mw / tj.tx_power_mw, tk.bias_lin / tj.bias_lin,
                            tk.ple / tj.ple};
}

}  // namespace hetnet
