#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "hetnet/load.hpp"
#include "hetnet/sinr.hpp"

namespace hetnet {

/// Spectral-efficiency threshold map t(x) = 2^x - 1, saturating to infinity
/// once 2^x would overflow (coverage at such thresholds is zero anyway).
inline double threshold_of_spectral(double x) {
    if (x > 1000.0) return std::numeric_limits<double>::infinity();
    return std::exp2(x) - 1.0;
}

struct RateBreakdown {
    double total = 0.0;
    double macro = 0.0;
    double small_unbiased = 0.0;
    double offloaded = 0.0;
    bool offloaded_defined = false;
    double truncation_tail = 0.0;  ///< largest discarded load-PMF tail
};

namespace detail {

struct RateContext {
    NetworkConfig cfg;
    AssocProbabilities assoc;
    std::optional<LoadPmf> pmf_macro, pmf_bbar, pmf_b, pmf_tier2;

    bool partitioned() const { return cfg.partitioned(); }
    bool has_offloaded() const { return assoc.a_b > 0.0; }
};

inline RateContext make_rate_context(const NetworkConfig& cfg) {
    cfg.validate();
    RateContext ctx{cfg, association_probabilities(cfg), {}, {}, {}, {}};
    ctx.pmf_macro = load_pmf(cfg, ctx.assoc, UserClass::Macro);
    if (cfg.partitioned()) {
        ctx.pmf_bbar = load_pmf(cfg, ctx.assoc, UserClass::SmallUnbiased);
        if (ctx.has_offloaded()) ctx.pmf_b = load_pmf(cfg, ctx.assoc, UserClass::Offloaded);
    } else {
        ctx.pmf_tier2 = load_pmf_from_mean_ratio(
            cfg.user_density * ctx.assoc.a2() / cfg.tiers[1].density, UserClass::SmallUnbiased);
    }
    return ctx;
}

// sum_n pmf(n) * S(t(n * spectral)) with S supplied per threshold. Terms are
// cut once the conditional coverage is negligible; the PMF tail bounds the
// discarded mass.
template <typename CovFn>
inline double load_average(const LoadPmf& pmf, double spectral, const CovFn& cov) {
    double acc = 0.0;
    for (int n = 1; n <= pmf.n_max(); ++n) {
        const double t = threshold_of_spectral(static_cast<double>(n) * spectral);
        if (std::isinf(t)) break;
        const double s = cov(t);
        acc += pmf.p(n) * s;
        if (s < 1e-12) break;
    }
    return acc;
}

inline RateBreakdown rate_coverage_ctx(const RateContext& ctx, double rho) {
    const NetworkConfig& cfg = ctx.cfg;
    RateBreakdown out;
    if (rho <= 0.0) {  // zero threshold is always met; bypass truncation loss
        out.total = out.macro = out.small_unbiased = out.offloaded = 1.0;
        out.offloaded_defined = ctx.partitioned() && ctx.has_offloaded();
        return out;
    }
    const double rho_hat = rho / cfg.bandwidth_hz;
    if (!ctx.partitioned()) {
        out.macro = load_average(*ctx.pmf_macro, rho_hat, [&](double t) {
            return conditional_sinr_coverage(cfg, ctx.assoc, UserClass::Macro, t);
        });
        const double r2 = load_average(*ctx.pmf_tier2, rho_hat, [&](double t) {
            return conditional_sinr_coverage_tier2_aggregate(cfg, ctx.assoc, t);
        });
        out.small_unbiased = r2;
        out.offloaded = r2;
        out.total = ctx.assoc.a1 * out.macro + ctx.assoc.a2() * r2;
        out.truncation_tail = std::max(ctx.pmf_macro->tail_mass, ctx.pmf_tier2->tail_mass);
        return out;
    }
    const double g_shared = resource_divisor(UserClass::Macro, cfg.eta);
    out.macro = load_average(*ctx.pmf_macro, rho_hat * g_shared, [&](double t) {
        return conditional_sinr_coverage(cfg, ctx.assoc, UserClass::Macro, t);
    });
    out.small_unbiased = load_average(*ctx.pmf_bbar, rho_hat * g_shared, [&](double t) {
        return conditional_sinr_coverage(cfg, ctx.assoc, UserClass::SmallUnbiased, t);
    });
    out.total = ctx.assoc.a1 * out.macro + ctx.assoc.a_bbar * out.small_unbiased;
    out.truncation_tail = std::max(ctx.pmf_macro->tail_mass, ctx.pmf_bbar->tail_mass);
    if (ctx.has_offloaded()) {
        const double g_off = resource_divisor(UserClass::Offloaded, cfg.eta);
        out.offloaded = load_average(*ctx.pmf_b, rho_hat * g_off, [&](double t) {
            return conditional_sinr_coverage(cfg, ctx.assoc, UserClass::Offloaded, t);
        });
        out.offloaded_defined = true;
        out.total += ctx.assoc.a_b * out.offloaded;
        out.truncation_tail = std::max(out.truncation_tail, ctx.pmf_b->tail_mass);
    }
    return out;
}

}  // namespace detail

/// Rate coverage P(rate > rho) with the full load distribution. eta == 0
/// selects the no-partitioning model (tier-wide load, no shielding).
inline RateBreakdown rate_coverage(const NetworkConfig& cfg, double rho) {
    if (rho < 0.0) throw std::domain_error("rate threshold must be >= 0");
    const auto ctx = detail::make_rate_context(cfg);
    return detail::rate_coverage_ctx(ctx, rho);
}

namespace detail {

// Corollary-style closed breakdown: each summand is A_l * R_l, so per-class
// values fall out by dividing by the weights.
inline RateBreakdown rate_mean_load_closed_breakdown(const NetworkConfig& cfg, double rho) {
    const auto assoc = association_probabilities_equal_ple(cfg);
    const ClosedFormParams cp{cfg.tiers[1].density / cfg.tiers[0].density,
                              cfg.tiers[1].tx_power_mw / cfg.tiers[0].tx_power_mw,
                              cfg.tiers[1].bias_lin};
    const double ap = cp.a * std::sqrt(cp.p);
    const double rho_hat = rho / cfg.bandwidth_hz;
    const double k_macro = mean_load(cfg, assoc, UserClass::Macro);
    RateBreakdown out;
    if (!cfg.partitioned()) {
        const double k2 = 1.0 + 1.28 * cfg.user_density * assoc.a2() / cfg.tiers[1].density;
        const double u1 = threshold_of_spectral(rho_hat * k_macro);
        const double u2 = threshold_of_spectral(rho_hat * k2);
        out.macro = 1.0 / (v_term(u1) + ap * q_closed_ple4(u1, cp.b)) / assoc.a1;
        const double r2 = 1.0 / (v_term(u2) + q_closed_ple4(u2, 1.0 / cp.b) / ap) / assoc.a2();
        out.small_unbiased = r2;
        out.offloaded = r2;
        out.total = assoc.a1 * out.macro + assoc.a2() * r2;
        return out;
    }
    const double g_shared = resource_divisor(UserClass::Macro, cfg.eta);
    const double u1 = threshold_of_spectral(rho_hat * k_macro * g_shared);
    const double ub = threshold_of_spectral(
        rho_hat * mean_load(cfg, assoc, UserClass::SmallUnbiased) * g_shared);
    out.macro = 1.0 / (v_term(u1) + ap * q_closed_ple4(u1, cp.b)) / assoc.a1;
    out.small_unbiased = 1.0 / (v_term(ub) * (1.0 + 1.0 / ap)) / assoc.a_bbar;
    out.total = assoc.a1 * out.macro + assoc.a_bbar * out.small_unbiased;
    if (assoc.a_b > 0.0) {
        const double g_off = resource_divisor(UserClass::Offloaded, cfg.eta);
        const double uo = threshold_of_spectral(
            rho_hat * mean_load(cfg, assoc, UserClass::Offloaded) * g_off);
        out.offloaded = (1.0 / (v_term(uo) + 1.0 / (ap * std::sqrt(cp.b))) -
                         1.0 / (v_term(uo) + 1.0 / ap)) /
                        assoc.a_b;
        out.offloaded_defined = true;
        out.total += assoc.a_b * out.offloaded;
    }
    return out;
}

}  // namespace detail

/// Closed exponent-4, noise-free form of the mean-load rate coverage.
inline double rate_coverage_mean_load_closed(const NetworkConfig& cfg, double rho) {
    cfg.validate();
    if (!cfg.equal_ple() || cfg.tiers[0].ple != 4.0)
        throw std::domain_error("closed mean-load form needs all exponents equal to 4");
    return detail::rate_mean_load_closed_breakdown(cfg, rho).total;
}

/// Mean-load rate coverage through the quadrature route (any exponents).
inline RateBreakdown rate_coverage_mean_load_numeric(const NetworkConfig& cfg, double rho) {
    cfg.validate();
    if (rho < 0.0) throw std::domain_error("rate threshold must be >= 0");
    const auto assoc = association_probabilities(cfg);
    const double rho_hat = rho / cfg.bandwidth_hz;
    RateBreakdown out;
    if (!cfg.partitioned()) {
        const double k2 = 1.0 + 1.28 * cfg.user_density * assoc.a2() / cfg.tiers[1].density;
        out.macro = conditional_sinr_coverage(
            cfg, assoc, UserClass::Macro,
            threshold_of_spectral(rho_hat * mean_load(cfg, assoc, UserClass::Macro)));
        const double r2 = conditional_sinr_coverage_tier2_aggregate(
            cfg, assoc, threshold_of_spectral(rho_hat * k2));
        out.small_unbiased = r2;
        out.offloaded = r2;
        out.total = assoc.a1 * out.macro + assoc.a2() * r2;
        return out;
    }
    const double g_shared = resource_divisor(UserClass::Macro, cfg.eta);
    out.macro = conditional_sinr_coverage(
        cfg, assoc, UserClass::Macro,
        threshold_of_spectral(rho_hat * mean_load(cfg, assoc, UserClass::Macro) * g_shared));
    out.small_unbiased = conditional_sinr_coverage(
        cfg, assoc, UserClass::SmallUnbiased,
        threshold_of_spectral(rho_hat * mean_load(cfg, assoc, UserClass::SmallUnbiased) *
                              g_shared));
    out.total = assoc.a1 * out.macro + assoc.a_bbar * out.small_unbiased;
    if (assoc.a_b > 0.0) {
        const double g_off = resource_divisor(UserClass::Offloaded, cfg.eta);
        out.offloaded = conditional_sinr_coverage(
            cfg, assoc, UserClass::Offloaded,
            threshold_of_spectral(rho_hat * mean_load(cfg, assoc, UserClass::Offloaded) * g_off));
        out.offloaded_defined = true;
        out.total += assoc.a_b * out.offloaded;
    }
    return out;
}

/// Rate coverage with each class load pinned at its mean. Dispatches to the
/// closed form when that form is exact for the configuration.
inline RateBreakdown rate_coverage_mean_load(const NetworkConfig& cfg, double rho) {
    cfg.validate();
    if (rho < 0.0) throw std::domain_error("rate threshold must be >= 0");
    if (cfg.equal_ple() && cfg.tiers[0].ple == 4.0 && cfg.noise_mw == 0.0 && cfg.all_active())
        return detail::rate_mean_load_closed_breakdown(cfg, rho);
    return rate_coverage_mean_load_numeric(cfg, rho);
}

namespace detail {

// Largest admissible load n <= ceil(c/rho - shift); empty sums yield -1.
// The ceiling is applied to the exact quotient, so integer-valued C/rho
// keeps its boundary term.
inline int backhaul_limit(std::optional<double> backhaul_bps, double rho, double shift,
                          int hard_cap) {
    if (!backhaul_bps) return hard_cap;
    const double x = *backhaul_bps / rho - shift;
    if (x <= 0.0) return -1;
    return static_cast<int>(std::min(static_cast<double>(hard_cap), std::ceil(x)));
}

}  // namespace detail

/// Rate coverage when each AP's downlink is additionally capped by a shared
/// backhaul pipe: per-class truncated load sums. Coverage of a class is zero
/// once rho exceeds the whole backhaul of its serving tier.
inline RateBreakdown rate_coverage_backhaul(const NetworkConfig& cfg, double rho) {
    if (!(rho > 0.0)) throw std::domain_error("backhaul rate coverage needs rho > 0");
    const auto ctx = detail::make_rate_context(cfg);
    const double rho_hat = rho / cfg.bandwidth_hz;
    const auto& c1 = cfg.tiers[0].backhaul_bps;
    const auto& c2 = cfg.tiers[1].backhaul_bps;
    RateBreakdown out;

    if (!ctx.partitioned()) {
        const int n1 = detail::backhaul_limit(c1, rho, 1.0, ctx.pmf_macro->n_max());
        for (int n = 1; n <= n1; ++n) {
            const double t = threshold_of_spectral(n * rho_hat);
            if (std::isinf(t)) break;
            out.macro += ctx.pmf_macro->p(n) *
                         conditional_sinr_coverage(cfg, ctx.assoc, UserClass::Macro, t);
        }
        const int n2 = detail::backhaul_limit(c2, rho, 1.0, ctx.pmf_tier2->n_max());
        double r2 = 0.0;
        for (int n = 1; n <= n2; ++n) {
            const double t = threshold_of_spectral(n * rho_hat);
            if (std::isinf(t)) break;
            r2 += ctx.pmf_tier2->p(n) *
                  conditional_sinr_coverage_tier2_aggregate(cfg, ctx.assoc, t);
        }
        out.small_unbiased = r2;
        out.offloaded = r2;
        out.total = ctx.assoc.a1 * out.macro + ctx.assoc.a2() * r2;
        out.truncation_tail = std::max(ctx.pmf_macro->tail_mass, ctx.pmf_tier2->tail_mass);
        return out;
    }

    const double g_shared = resource_divisor(UserClass::Macro, cfg.eta);
    const int n1 = detail::backhaul_limit(c1, rho, 1.0, ctx.pmf_macro->n_max());
    for (int n = 1; n <= n1; ++n) {
        const double t = threshold_of_spectral(n * rho_hat * g_shared);
        if (std::isinf(t)) break;
        out.macro +=
            ctx.pmf_macro->p(n) * conditional_sinr_coverage(cfg, ctx.assoc, UserClass::Macro, t);
    }
    out.total = ctx.assoc.a1 * out.macro;
    out.truncation_tail = ctx.pmf_macro->tail_mass;

    // Tier-2 classes share one backhaul; the companion class load enters via
    // its own tagged PMF (both counts include the typical user, hence the
    // "-1" shift baked into the limits). With no offloaded users the
    // companion PMF degenerates to a unit mass at 1.
    const LoadPmf* pmf_bbar = &*ctx.pmf_bbar;
    LoadPmf degenerate;
    const LoadPmf* pmf_b;
    if (ctx.has_offloaded()) {
        pmf_b = &*ctx.pmf_b;
    } else {
        degenerate.cls = UserClass::Offloaded;
        degenerate.masses = {1.0};
        pmf_b = &degenerate;
    }

    auto tier2_class = [&](const LoadPmf& own, const LoadPmf& other, double g_own,
                           auto&& cov) {
        const int outer_raw = detail::backhaul_limit(c2, rho, 2.0, INT32_MAX);
        if (outer_raw < 0) return 0.0;
        const int outer = std::min(outer_raw, other.n_max());
        std::vector<double> prefix{0.0};
        auto prefix_upto = [&](int inner) {
            // own-class terms p(n) * S(t(g n rho_hat)), accumulated on demand
            while (static_cast<int>(prefix.size()) <= inner) {
                const int n = static_cast<int>(prefix.size());
                const double t = threshold_of_spectral(n * rho_hat * g_own);
                const double s = std::isinf(t) ? 0.0 : cov(t);
                prefix.push_back(prefix.back() + own.p(n) * s);
            }
            return prefix[static_cast<std::size_t>(inner)];
        };
        double r = 0.0;
        for (int m = 0; m <= outer; ++m) {
            const int inner =
                detail::backhaul_limit(c2, rho, static_cast<double>(m) + 1.0, own.n_max());
            if (inner < 1) continue;
            r += other.p(m) * prefix_upto(inner);
        }
        // Companion-PMF truncation tail: fold it in at the cap boundary so an
        // unconstrained pipe reproduces the open-network sum exactly.
        if (outer_raw > other.n_max() && other.tail_mass > 0.0) {
            const int inner = detail::backhaul_limit(c2, rho, other.n_max() + 2.0, own.n_max());
            if (inner >= 1) r += other.tail_mass * prefix_upto(inner);
        }
        return r;
    };

    out.small_unbiased = tier2_class(*pmf_bbar, *pmf_b, g_shared, [&](double t) {
        return conditional_sinr_coverage(cfg, ctx.assoc, UserClass::SmallUnbiased, t);
    });
    out.total += ctx.assoc.a_bbar * out.small_unbiased;
    out.truncation_tail = std::max(out.truncation_tail, pmf_bbar->tail_mass);
    if (ctx.has_offloaded()) {
        const double g_off = resource_divisor(UserClass::Offloaded, cfg.eta);
        out.offloaded = tier2_class(*pmf_b, *pmf_bbar, g_off, [&](double t) {
            return conditional_sinr_coverage(cfg, ctx.assoc, UserClass::Offloaded, t);
        });
        out.offloaded_defined = true;
        out.total += ctx.assoc.a_b * out.offloaded;
        out.truncation_tail = std::max(out.truncation_tail, ctx.pmf_b->tail_mass);
    }
    return out;
}

enum class RatePath { Full, MeanLoad };

struct PercentileResult {
    double rate_bps = 0.0;
    bool bracketed = false;  ///< false: coverage never crossed 1-q in range
};

/// Invert the rate CCDF: the rho with coverage(rho) = 1 - q, found by
/// bisection to 1 kbps. Returns the nearest bracket end (flagged) when the
/// curve does not cross inside [rho_lo, rho_hi].
inline PercentileResult rate_percentile(const NetworkConfig& cfg, double q,
                                        RatePath path = RatePath::Full, double rho_lo = 1e3,
                                        double rho_hi = 1e9) {
    if (!(q > 0.0 && q < 1.0)) throw std::domain_error("quantile must lie in (0,1)");
    const double target = 1.0 - q;
    const auto ctx = detail::make_rate_context(cfg);
    auto cov = [&](double rho) {
        return path == RatePath::Full ? detail::rate_coverage_ctx(ctx, rho).total
                                      : rate_coverage_mean_load(cfg, rho).total;
    };
    double lo = rho_lo, hi = rho_hi;
    if (cov(lo) < target) return {lo, false};
    if (cov(hi) > target) return {hi, false};
    while (hi - lo > 1e3) {
        const double mid = 0.5 * (lo + hi);
        (cov(mid) >= target ? lo : hi) = mid;
    }
    return {0.5 * (lo + hi), true};
}

/// Analytic rate CCDF over a threshold sweep. Threshold slots are filled by
/// index, so the result is identical for any worker count.
inline std::vector<RateBreakdown> rate_ccdf(const NetworkConfig& cfg,
                                            const std::vector<double>& thresholds,
                                            RatePath path = RatePath::Full, int threads = 1) {
    const auto ctx = detail::make_rate_context(cfg);
    std::vector<RateBreakdown> out(thresholds.size());
    parallel_for(thresholds.size(), threads, [&](std::size_t i) {
        out[i] = path == RatePath::Full ? detail::rate_coverage_ctx(ctx, thresholds[i])
                                        : rate_coverage_mean_load(cfg, thresholds[i]);
    });
    return out;
}

/// Analytic SINR CCDF sweep (same determinism contract as rate_ccdf).
inline std::vector<SinrBreakdown> sinr_ccdf(const NetworkConfig& cfg,
                                            const std::vector<double>& thresholds,
                                            int threads = 1) {
    std::vector<SinrBreakdown> out(thresholds.size());
    parallel_for(thresholds.size(), threads, [&](std::size_t i) {
        out[i] = sinr_coverage(cfg, thresholds[i]);
    });
    return out;
}

}  // namespace hetnet
