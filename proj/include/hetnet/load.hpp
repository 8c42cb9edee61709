#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "hetnet/association.hpp"
#include "hetnet/config.hpp"

namespace hetnet {

/// Truncated PMF of the number of same-class users sharing the tagged AP
/// (the typical user included, so support starts at 1).
struct LoadPmf {
    UserClass cls = UserClass::Macro;
    std::vector<double> masses;  ///< masses[i] = P(load == i+1)
    double tail_mass = 0.0;      ///< 1 - sum(masses)
    double mean_ratio = 0.0;     ///< lambda_u * A_l / lambda_serving

    int n_max() const { return static_cast<int>(masses.size()); }
    double p(int n) const {
        return (n >= 1 && n <= n_max()) ? masses[static_cast<std::size_t>(n - 1)] : 0.0;
    }
    double mean() const {
        double m = 0.0;
        for (std::size_t i = 0; i < masses.size(); ++i) m += static_cast<double>(i + 1) * masses[i];
        return m;
    }
};

/// Load PMF for mean-ratio mu = lambda_u * A / lambda: a shifted negative
/// binomial with the 3.5 Poisson-Voronoi area shape. Truncation stops once
/// the tail drops below 1e-6, hard-capped at max(50, 4 * analytic mean).
inline LoadPmf load_pmf_from_mean_ratio(double mu, UserClass cls) {
    LoadPmf out;
    out.cls = cls;
    out.mean_ratio = mu;
    const double analytic_mean = 1.0 + mu * 4.5 / 3.5;
    const int cap = std::max(50, static_cast<int>(std::ceil(4.0 * analytic_mean)));
    const double r = mu / (3.5 + mu);
    double p = std::pow(3.5, 4.5) * std::pow(3.5 + mu, -4.5);  // p(1)
    double cum = 0.0;
    for (int n = 1; n <= cap; ++n) {
        out.masses.push_back(p);
        cum += p;
        if (1.0 - cum <= 1e-6 && n >= 2) break;
        p *= (static_cast<double>(n) + 3.5) / static_cast<double>(n) * r;
    }
    out.tail_mass = std::max(0.0, 1.0 - cum);
    return out;
}

inline double load_mean_ratio(const NetworkConfig& cfg, const AssocProbabilities& assoc,
                              UserClass l) {
    const double a = l == UserClass::Macro ? assoc.a1
                     : l == UserClass::SmallUnbiased ? assoc.a_bbar
                                                     : assoc.a_b;
    const double lam = cfg.tiers[static_cast<std::size_t>(serving_tier_of(l) - 1)].density;
    return cfg.user_density * a / lam;
}

inline LoadPmf load_pmf(const NetworkConfig& cfg, const AssocProbabilities& assoc, UserClass l) {
    const double a = l == UserClass::Macro ? assoc.a1
                     : l == UserClass::SmallUnbiased ? assoc.a_bbar
                                                     : assoc.a_b;
    if (!(a > 0.0))
        throw DegenerateClassError(std::string("load PMF undefined: class ") + to_string(l) +
                                   " has zero association probability");
    return load_pmf_from_mean_ratio(load_mean_ratio(cfg, assoc, l), l);
}

inline LoadPmf load_pmf(const NetworkConfig& cfg, UserClass l) {
    return load_pmf(cfg, association_probabilities(cfg), l);
}

/// Mean load at the tagged AP, 1 + 1.28 * lambda_u A_l / lambda. The 1.28 is
/// the second moment of the unit Poisson-Voronoi cell area; note the load PMF
/// above implies 4.5/3.5 ~ 1.2857 instead, so the two means differ slightly
/// by construction.
inline double mean_load(const NetworkConfig& cfg, const AssocProbabilities& assoc, UserClass l) {
    return 1.0 + 1.28 * load_mean_ratio(cfg, assoc, l);
}

inline double mean_load(const NetworkConfig& cfg, UserClass l) {
    return mean_load(cfg, association_probabilities(cfg), l);
}

}  // namespace hetnet
