#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "hetnet/association.hpp"
#include "hetnet/config.hpp"
#include "hetnet/kernels.hpp"
#include "hetnet/quadrature.hpp"

namespace hetnet {

/// Coverage split by association class. `offloaded` is meaningful only when
/// `offloaded_defined`; with no partitioning (eta == 0) the two tier-2 slots
/// both carry the aggregate small-cell value, since that model does not
/// distinguish them.
struct SinrBreakdown {
    double total = 0.0;
    double macro = 0.0;
    double small_unbiased = 0.0;
    double offloaded = 0.0;
    bool offloaded_defined = false;
};

/// Density/power/bias ratios of the exponent-4 closed forms:
/// a = lambda2/lambda1, p = P2/P1, b = B2/B1.
struct ClosedFormParams {
    double a = 1.0;
    double p = 1.0;
    double b = 1.0;
};

namespace detail {

// One tier's contribution to the coverage exponent: coeff * y^exp, with the
// void (association) part separated from the activity-thinned interference
// part so that per-AP activity < 1 thins interference without touching
// association.
struct ExponentTerm {
    double coeff = 0.0;
    double exp = 2.0;
};

inline ExponentTerm tier_term(const NetworkConfig& cfg, std::size_t k, std::size_t j,
                              double void_bias, double excl_bias, double t) {
    const auto& tk = cfg.tiers[k];
    const auto np = normalized_params(cfg, k, j);
    const double p2a = std::pow(np.p_hat, 2.0 / tk.ple);
    const double z = q_kernel(t, tk.ple, excl_bias).z;
    return ExponentTerm{kPi * tk.density * p2a *
                            (std::pow(void_bias, 2.0 / tk.ple) + tk.activity * z),
                        2.0 / np.a_hat};
}

inline ExponentTerm void_only_term(const NetworkConfig& cfg, std::size_t k, std::size_t j,
                                   double void_bias) {
    const auto& tk = cfg.tiers[k];
    const auto np = normalized_params(cfg, k, j);
    return ExponentTerm{kPi * tk.density * std::pow(np.p_hat * void_bias, 2.0 / tk.ple),
                        2.0 / np.a_hat};
}

inline double noise_coeff(const NetworkConfig& cfg, std::size_t j, double t) {
    return t * cfg.noise_mw / cfg.tiers[j].tx_power_mw;
}

// 2*pi*lambda_s * int y exp(-noise*y^{alpha_s} - sum coeff*y^exp) dy / norm
inline double coverage_integral(const NetworkConfig& cfg, std::size_t j, double norm,
                                const std::vector<ExponentTerm>& terms, double nz,
                                double tol = 1e-10) {
    std::vector<double> cs, es;
    for (const auto& tm : terms) {
        cs.push_back(tm.coeff);
        es.push_back(tm.exp);
    }
    const double alpha_s = cfg.tiers[j].ple;
    if (nz > 0.0) {
        cs.push_back(nz);
        es.push_back(alpha_s);
    }
    const double scale = decay_scale(cs, es);
    auto f = [&](double y) {
        double e = 0.0;
        for (std::size_t i = 0; i < cs.size(); ++i) e += cs[i] * std::pow(y, es[i]);
        return y * std::exp(-e);
    };
    auto res = integrate_half_line(f, 0.0, tol, scale);
    if (!res.converged)
        throw NonConvergenceError("coverage integral did not converge", res.residual);
    return 2.0 * kPi * cfg.tiers[j].density * res.value / norm;
}

// Difference-form integral for classes defined by an annulus condition on the
// macro tier: exp(-common) * (exp(-inner) - exp(-outer)), inner <= outer.
inline double coverage_integral_diff(const NetworkConfig& cfg, std::size_t j, double norm,
                                     const std::vector<ExponentTerm>& common,
                                     const std::vector<ExponentTerm>& inner,
                                     const std::vector<ExponentTerm>& outer, double nz,
                                     double tol = 1e-10) {
    std::vector<double> cs, es;
    for (const auto& tm : common) {
        cs.push_back(tm.coeff);
        es.push_back(tm.exp);
    }
    for (const auto& tm : inner) {  // dominant surviving branch sets the scale
        cs.push_back(tm.coeff);
        es.push_back(tm.exp);
    }
    const double alpha_s = cfg.tiers[j].ple;
    if (nz > 0.0) {
        cs.push_back(nz);
        es.push_back(alpha_s);
    }
    const double scale = decay_scale(cs, es);
    auto eval = [](const std::vector<ExponentTerm>& ts, double y) {
        double e = 0.0;
        for (const auto& tm : ts) e += tm.coeff * std::pow(y, tm.exp);
        return e;
    };
    auto f = [&](double y) {
        const double base = eval(common, y) + (nz > 0.0 ? nz * std::pow(y, alpha_s) : 0.0);
        return y * std::exp(-base) * (std::exp(-eval(inner, y)) - std::exp(-eval(outer, y)));
    };
    auto res = integrate_half_line(f, 0.0, tol, scale);
    if (!res.converged)
        throw NonConvergenceError("coverage integral did not converge", res.residual);
    return 2.0 * kPi * cfg.tiers[j].density * res.value / norm;
}

}  // namespace detail

/// Conditional coverage S_l(t) of the partitioned model: offloaded users are
/// shielded from the macro tier, the other classes see both tiers.
inline double conditional_sinr_coverage(const NetworkConfig& cfg, const AssocProbabilities& assoc,
                                        UserClass l, double t) {
    if (t <= 0.0) return 1.0;
    if (std::isinf(t)) return 0.0;
    using detail::ExponentTerm;
    switch (l) {
        case UserClass::Macro: {
            if (!(assoc.a1 > 0.0)) throw DegenerateClassError("macro class has zero probability");
            const double bias = cfg.tiers[1].bias_lin;  // relative to macro's unit bias
            std::vector<ExponentTerm> terms{detail::tier_term(cfg, 0, 0, 1.0, 1.0, t),
                                            detail::tier_term(cfg, 1, 0, bias, bias, t)};
            return detail::coverage_integral(cfg, 0, assoc.a1, terms,
                                             detail::noise_coeff(cfg, 0, t));
        }
        case UserClass::SmallUnbiased: {
            if (!(assoc.a_bbar > 0.0))
                throw DegenerateClassError("small-cell class has zero probability");
            std::vector<ExponentTerm> terms{detail::tier_term(cfg, 1, 1, 1.0, 1.0, t),
                                            detail::tier_term(cfg, 0, 1, 1.0, 1.0, t)};
            return detail::coverage_integral(cfg, 1, assoc.a_bbar, terms,
                                             detail::noise_coeff(cfg, 1, t));
        }
        default: {
            if (!(assoc.a_b > 0.0))
                throw DegenerateClassError(
                    "offloaded class has zero probability (bias is 0 dB?)");
            const double inv_bias = 1.0 / cfg.tiers[1].bias_lin;
            std::vector<ExponentTerm> common{detail::tier_term(cfg, 1, 1, 1.0, 1.0, t)};
            std::vector<ExponentTerm> inner{detail::void_only_term(cfg, 0, 1, inv_bias)};
            std::vector<ExponentTerm> outer{detail::void_only_term(cfg, 0, 1, 1.0)};
            return detail::coverage_integral_diff(cfg, 1, assoc.a_b, common, inner, outer,
                                                  detail::noise_coeff(cfg, 1, t));
        }
    }
}

/// Conditional coverage of all tier-2 users in the no-partitioning model:
/// biased association, full cross-tier interference.
inline double conditional_sinr_coverage_tier2_aggregate(const NetworkConfig& cfg,
                                                        const AssocProbabilities& assoc,
                                                        double t) {
    if (t <= 0.0) return 1.0;
    if (std::isinf(t)) return 0.0;
    const double a2 = assoc.a2();
    if (!(a2 > 0.0)) throw DegenerateClassError("tier-2 association probability is zero");
    const double inv_bias = 1.0 / cfg.tiers[1].bias_lin;
    std::vector<detail::ExponentTerm> terms{detail::tier_term(cfg, 1, 1, 1.0, 1.0, t),
                                            detail::tier_term(cfg, 0, 1, inv_bias, inv_bias, t)};
    return detail::coverage_integral(cfg, 1, a2, terms, detail::noise_coeff(cfg, 1, t));
}

/// SINR coverage via the general quadrature route. eta selects the model
/// family only; within the partitioned family the value is independent of
/// the actual eta.
inline SinrBreakdown sinr_coverage_general(const NetworkConfig& cfg, double t) {
    cfg.validate();
    const auto assoc = association_probabilities(cfg);
    SinrBreakdown out;
    if (!cfg.partitioned()) {
        out.macro = conditional_sinr_coverage(cfg, assoc, UserClass::Macro, t);
        const double s2 = conditional_sinr_coverage_tier2_aggregate(cfg, assoc, t);
        out.small_unbiased = s2;
        out.offloaded = s2;
        out.offloaded_defined = false;
        out.total = assoc.a1 * out.macro + assoc.a2() * s2;
        return out;
    }
    out.macro = conditional_sinr_coverage(cfg, assoc, UserClass::Macro, t);
    out.small_unbiased = conditional_sinr_coverage(cfg, assoc, UserClass::SmallUnbiased, t);
    out.total = assoc.a1 * out.macro + assoc.a_bbar * out.small_unbiased;
    if (assoc.a_b > 0.0) {
        out.offloaded = conditional_sinr_coverage(cfg, assoc, UserClass::Offloaded, t);
        out.offloaded_defined = true;
        out.total += assoc.a_b * out.offloaded;
    }
    return out;
}

/// Closed interference-limited route: equal path-loss exponents, noise
/// ignored. Every class integral collapses to a ratio of kernel sums.
inline SinrBreakdown sinr_coverage_interference_limited(const NetworkConfig& cfg, double t) {
    cfg.validate();
    if (!cfg.equal_ple())
        throw std::domain_error("interference-limited closed form needs equal exponents");
    const auto assoc = association_probabilities_equal_ple(cfg);
    const double ple = cfg.tiers[0].ple;
    const double l0 = cfg.tiers[0].density, l1 = cfg.tiers[1].density;
    const double act0 = cfg.tiers[0].activity, act1 = cfg.tiers[1].activity;
    const double bias = cfg.tiers[1].bias_lin;
    const double p10 = std::pow(normalized_params(cfg, 1, 0).p_hat, 2.0 / ple);
    const double p01 = std::pow(normalized_params(cfg, 0, 1).p_hat, 2.0 / ple);

    auto qa = [&](double tt, double c, double act) {
        const QZ qz = q_kernel(tt, ple, c);
        return std::pow(c, 2.0 / ple) + act * qz.z;
    };
    SinrBreakdown out;
    if (t <= 0.0) {
        out = SinrBreakdown{1.0, 1.0, 1.0, 1.0, cfg.partitioned() && assoc.a_b > 0.0};
        return out;
    }
    const double own1 = l1 * qa(t, 1.0, act1);
    out.macro = l0 / (l0 * qa(t, 1.0, act0) + l1 * p10 * qa(t, bias, act1)) / assoc.a1;
    if (!cfg.partitioned()) {
        const double s2 = l1 / (own1 + l0 * p01 * qa(t, 1.0 / bias, act0)) / assoc.a2();
        out.small_unbiased = s2;
        out.offloaded = s2;
        out.total = assoc.a1 * out.macro + assoc.a2() * s2;
        return out;
    }
    out.small_unbiased = l1 / (own1 + l0 * p01 * qa(t, 1.0, act0)) / assoc.a_bbar;
    out.total = assoc.a1 * out.macro + assoc.a_bbar * out.small_unbiased;
    if (assoc.a_b > 0.0) {
        const double biased_void = l0 * p01 * std::pow(1.0 / bias, 2.0 / ple);
        out.offloaded = (l1 / (own1 + biased_void) - l1 / (own1 + l0 * p01)) / assoc.a_b;
        out.offloaded_defined = true;
        out.total += assoc.a_b * out.offloaded;
    }
    return out;
}

/// SINR coverage; takes the closed interference-limited route when it is
/// exact for the configuration, else the general quadrature.
inline SinrBreakdown sinr_coverage(const NetworkConfig& cfg, double t) {
    if (cfg.equal_ple() && cfg.noise_mw == 0.0) return sinr_coverage_interference_limited(cfg, t);
    return sinr_coverage_general(cfg, t);
}

/// Exponent-4 closed form of the two-tier coverage, with (partitioned=true)
/// or without resource partitioning. Noise-free, equal exponents.
inline double sinr_coverage_alpha4_closed(const ClosedFormParams& cp, double t,
                                          bool partitioned) {
    if (!(cp.a > 0.0 && cp.p > 0.0 && cp.b > 0.0))
        throw std::domain_error("closed-form parameters must be positive");
    if (t < 0.0) throw std::domain_error("threshold must be >= 0");
    const double v = v_term(t);
    const double ap = cp.a * std::sqrt(cp.p);
    const double macro_term = 1.0 / (v + ap * q_closed_ple4(t, cp.b));
    if (!partitioned) return macro_term + 1.0 / (v + q_closed_ple4(t, 1.0 / cp.b) / ap);
    return macro_term + 1.0 / (v + v / ap) + 1.0 / (v + 1.0 / (ap * std::sqrt(cp.b))) -
           1.0 / (v + 1.0 / ap);
}

/// Partitioned coverage in the limit of offloading everyone (bias -> inf).
inline double sinr_coverage_alpha4_bias_limit(const ClosedFormParams& cp, double t) {
    const double v = v_term(t);
    const double ap = cp.a * std::sqrt(cp.p);
    return 1.0 / (v + v / ap) + 1.0 / v - 1.0 / (v + 1.0 / ap);
}

/// Conditional coverages of the two user groups of serving tier j (1-based)
/// in a K-tier network, plus their weights.
struct KTierCoverage {
    double s_bbar = 0.0;
    double s_b = 0.0;
    double a_bbar = 0.0;
    double a_b = 0.0;
    bool offloaded_defined = false;
};

inline KTierCoverage ktier_sinr_coverage(const NetworkConfig& cfg, int j_one_based, double t) {
    cfg.validate();
    const std::size_t j = static_cast<std::size_t>(j_one_based - 1);
    if (j >= cfg.num_tiers()) throw std::out_of_range("serving tier index out of range");
    KTierCoverage out;
    const auto w = ktier_association_probabilities(cfg, j_one_based);
    out.a_bbar = w.a_bbar;
    out.a_b = w.a_b;
    using detail::ExponentTerm;

    if (t <= 0.0) {
        out.s_bbar = 1.0;
        out.s_b = 1.0;
        out.offloaded_defined = out.a_b > 0.0;
        return out;
    }

    // Dominant-power users of tier j: competitors keep their raw bias in both
    // the void and exclusion radii.
    {
        std::vector<ExponentTerm> terms{detail::tier_term(cfg, j, j, 1.0, 1.0, t)};
        for (std::size_t k = 0; k < cfg.num_tiers(); ++k) {
            if (k == j) continue;
            const double braw = cfg.tiers[k].bias_lin;
            terms.push_back(detail::tier_term(cfg, k, j, braw, braw, t));
        }
        out.s_bbar = detail::coverage_integral(cfg, j, w.a_bbar, terms,
                                               detail::noise_coeff(cfg, j, t));
    }
    if (!(w.a_b > 0.0)) return out;

    // Range-expanded users of tier j: macro tier muted (void only), other
    // tiers interfere beyond their biased association radius; the outer
    // branch moves each void to the unbiased-dominance radius.
    {
        const double bj = cfg.tiers[j].bias_lin;
        std::vector<ExponentTerm> common{detail::tier_term(cfg, j, j, 1.0, 1.0, t)};
        std::vector<ExponentTerm> inner, outer;
        for (std::size_t k = 0; k < cfg.num_tiers(); ++k) {
            if (k == j) continue;
            const double bhat = cfg.tiers[k].bias_lin / bj;
            if (k == 0) {
                inner.push_back(detail::void_only_term(cfg, 0, j, bhat));
                outer.push_back(detail::void_only_term(cfg, 0, j, bhat * bj));
            } else {
                inner.push_back(detail::tier_term(cfg, k, j, bhat, bhat, t));
                outer.push_back(detail::tier_term(cfg, k, j, bhat * bj, bhat * bj, t));
            }
        }
        out.s_b = detail::coverage_integral_diff(cfg, j, w.a_b, common, inner, outer,
                                                 detail::noise_coeff(cfg, j, t));
        out.offloaded_defined = true;
    }
    return out;
}

}  // namespace hetnet
