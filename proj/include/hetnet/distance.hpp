#pragma once

#include <cmath>

#include "hetnet/association.hpp"
#include "hetnet/config.hpp"

namespace hetnet {

/// Density of the distance to the serving AP conditioned on class l.
/// `assoc` must hold the matching association probabilities.
inline double serving_distance_pdf(const NetworkConfig& cfg, const AssocProbabilities& assoc,
                                   UserClass l, double y) {
    if (y < 0.0) return 0.0;
    const double al0 = cfg.tiers[0].ple;
    const double al1 = cfg.tiers[1].ple;
    const double l0 = cfg.tiers[0].density;
    const double l1 = cfg.tiers[1].density;
    switch (l) {
        case UserClass::Macro: {
            if (!(assoc.a1 > 0.0)) throw DegenerateClassError("macro class has zero probability");
            const auto np = normalized_params(cfg, 1, 0);
            const double e = l0 * y * y +
                             l1 * std::pow(np.p_hat * np.b_hat, 2.0 / al1) *
                                 std::pow(y, 2.0 * al0 / al1);
            return 2.0 * kPi * l0 / assoc.a1 * y * std::exp(-kPi * e);
        }
        case UserClass::SmallUnbiased: {
            if (!(assoc.a_bbar > 0.0))
                throw DegenerateClassError("small-cell class has zero probability");
            const auto np = normalized_params(cfg, 0, 1);
            const double e = l1 * y * y +
                             l0 * std::pow(np.p_hat, 2.0 / al0) * std::pow(y, 2.0 * al1 / al0);
            return 2.0 * kPi * l1 / assoc.a_bbar * y * std::exp(-kPi * e);
        }
        default: {
            if (!(assoc.a_b > 0.0))
                throw DegenerateClassError(
                    "offloaded class has zero probability (bias is 0 dB?)");
            const auto np = normalized_params(cfg, 0, 1);
            const double own = l1 * y * y;
            const double cross = l0 * std::pow(np.p_hat, 2.0 / al0) * std::pow(y, 2.0 * al1 / al0);
            const double biased = cross * std::pow(np.b_hat, 2.0 / al0);  // b_hat = 1/B <= 1
            return 2.0 * kPi * l1 / assoc.a_b * y *
                   (std::exp(-kPi * (own + biased)) - std::exp(-kPi * (own + cross)));
        }
    }
}

inline double serving_distance_pdf(const NetworkConfig& cfg, UserClass l, double y) {
    return serving_distance_pdf(cfg, association_probabilities(cfg), l, y);
}

}  // namespace hetnet
