#pragma once

#include <cmath>
#include <vector>

#include "hetnet/config.hpp"
#include "hetnet/quadrature.hpp"

namespace hetnet {

/// Probabilities that a typical user lands in each association class.
struct AssocProbabilities {
    double a1 = 0.0;      ///< macro users
    double a_bbar = 0.0;  ///< small-cell users, bias-independent
    double a_b = 0.0;     ///< range-expanded (offloaded) users
    double a2() const { return a_bbar + a_b; }
};

/// Class weights for a K-tier network conditioned on serving tier j.
struct KTierAssoc {
    double a_bbar = 0.0;
    double a_b = 0.0;
};

namespace detail {

// 2*pi*lambda_j * int_0^inf z * exp(-pi * sum_k coeffs[k] * z^{exps[k]}) dz
inline double void_product_integral(double lambda_j, const std::vector<double>& coeffs,
                                    const std::vector<double>& exps, double tol = 1e-10) {
    std::vector<double> c(coeffs);
    for (double& x : c) x *= kPi;
    const double scale = decay_scale(c, exps);
    auto f = [&c, &exps](double z) {
        double e = 0.0;
        for (std::size_t k = 0; k < c.size(); ++k) e += c[k] * std::pow(z, exps[k]);
        return z * std::exp(-e);
    };
    auto res = integrate_half_line(f, 0.0, tol, scale);
    if (!res.converged)
        throw NonConvergenceError("association integral did not converge", res.residual);
    return 2.0 * kPi * lambda_j * res.value;
}

// coeffs/exps of the association void product seen from serving tier j;
// tier-k bias enters through `bias_of(k)`.
template <typename BiasFn>
inline void void_terms(const NetworkConfig& cfg, std::size_t j, BiasFn&& bias_of,
                       std::vector<double>& coeffs, std::vector<double>& exps) {
    coeffs.clear();
    exps.clear();
    for (std::size_t k = 0; k < cfg.num_tiers(); ++k) {
        const auto np = normalized_params(cfg, k, j);
        coeffs.push_back(cfg.tiers[k].density *
                         std::pow(np.p_hat * bias_of(k), 2.0 / cfg.tiers[k].ple));
        exps.push_back(2.0 / np.a_hat);
    }
}

}  // namespace detail

/// Association probabilities through the general single-integral route;
/// valid for any per-tier path-loss exponents.
inline AssocProbabilities association_probabilities_integral(const NetworkConfig& cfg) {
    cfg.validate();
    std::vector<double> c, e;
    AssocProbabilities out;

    auto biased = [&cfg](std::size_t j) {
        return [&cfg, j](std::size_t k) { return cfg.tiers[k].bias_lin / cfg.tiers[j].bias_lin; };
    };
    auto unbiased = [](std::size_t) { return 1.0; };

    detail::void_terms(cfg, 0, biased(0), c, e);
    out.a1 = detail::void_product_integral(cfg.tiers[0].density, c, e);

    detail::void_terms(cfg, 1, unbiased, c, e);
    out.a_bbar = detail::void_product_integral(cfg.tiers[1].density, c, e);

    detail::void_terms(cfg, 1, biased(1), c, e);
    const double a2 = detail::void_product_integral(cfg.tiers[1].density, c, e);
    out.a_b = std::max(0.0, a2 - out.a_bbar);
    return out;
}

/// Closed rational forms, valid when every tier shares one path-loss exponent.
inline AssocProbabilities association_probabilities_equal_ple(const NetworkConfig& cfg) {
    cfg.validate();
    if (!cfg.equal_ple())
        throw std::domain_error("equal-exponent association form needs matching exponents");
    const double ple = cfg.tiers[0].ple;
    auto denom = [&cfg, ple](std::size_t j, bool with_bias) {
        double d = 0.0;
        for (std::size_t k = 0; k < cfg.num_tiers(); ++k) {
            const auto np = normalized_params(cfg, k, j);
            d += cfg.tiers[k].density * std::pow(np.p_hat * (with_bias ? np.b_hat : 1.0), 2.0 / ple);
        }
        return d;
    };
    AssocProbabilities out;
    out.a1 = cfg.tiers[0].density / denom(0, true);
    out.a_bbar = cfg.tiers[1].density / denom(1, false);
    out.a_b = std::max(0.0, cfg.tiers[1].density / denom(1, true) - out.a_bbar);
    return out;
}

/// Association probabilities; picks the closed form when exponents match.
inline AssocProbabilities association_probabilities(const NetworkConfig& cfg) {
    return cfg.equal_ple() ? association_probabilities_equal_ple(cfg)
                           : association_probabilities_integral(cfg);
}

/// K-tier class weights for serving tier j (1-based). The unbiased-dominance
/// condition compares the raw tier-j power against biased competitors, so the
/// competitor bias enters unnormalized.
inline KTierAssoc ktier_association_probabilities(const NetworkConfig& cfg, int j_one_based) {
    cfg.validate();
    const std::size_t j = static_cast<std::size_t>(j_one_based - 1);
    if (j >= cfg.num_tiers()) throw std::out_of_range("serving tier index out of range");
    std::vector<double> c, e;
    auto biased = [&cfg, j](std::size_t k) { return cfg.tiers[k].bias_lin / cfg.tiers[j].bias_lin; };
    auto raw = [&cfg](std::size_t k) { return cfg.tiers[k].bias_lin; };

    detail::void_terms(cfg, j, raw, c, e);
    c[j] = cfg.tiers[j].density;  // own-tier term carries no bias either way
    KTierAssoc out;
    out.a_bbar = detail::void_product_integral(cfg.tiers[j].density, c, e);

    detail::void_terms(cfg, j, biased, c, e);
    const double assoc_j = detail::void_product_integral(cfg.tiers[j].density, c, e);
    out.a_b = std::max(0.0, assoc_j - out.a_bbar);
    return out;
}

}  // namespace hetnet
