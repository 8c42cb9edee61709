#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "hetnet/rate.hpp"
#include "hetnet/sinr.hpp"

namespace hetnet {

enum class ObjectiveKind { RateCoverage, Percentile, Median };

/// Joint (bias, partition-fraction) grid-search specification. An eta entry
/// of 0 evaluates the no-partitioning model for that row.
struct SweepSpec {
    std::vector<double> bias_db;
    std::vector<double> eta;
    ObjectiveKind objective = ObjectiveKind::RateCoverage;
    double rho_bps = 0.0;   ///< threshold for the rate-coverage objective
    double quantile = 0.05; ///< q for the percentile objective
    RatePath path = RatePath::Full;
};

struct SweepCell {
    double bias_db = 0.0;
    double eta = 0.0;
    double objective = 0.0;
    bool ok = false;
    std::string error;
};

struct SweepResult {
    double bias_star_db = 0.0;
    double eta_star = 0.0;
    double objective_star = 0.0;
    double offload_fraction = 0.0;  ///< A_2 at the optimum
    std::vector<SweepCell> surface; ///< bias-major, eta-minor order
};

inline NetworkConfig with_operating_point(NetworkConfig cfg, double bias_db, double eta) {
    cfg.tiers[1].bias_lin = db_to_linear(bias_db);
    cfg.eta = eta;
    return cfg;
}

/// Exhaustive evaluation of the objective over the grid. Cells are computed
/// independently (safe to parallelize) and scanned in bias-major order, so
/// ties resolve toward the smaller bias, then the smaller eta.
inline SweepResult optimize_joint(const NetworkConfig& cfg, const SweepSpec& spec,
                                  int threads = 1) {
    cfg.validate();
    if (spec.bias_db.empty() || spec.eta.empty())
        throw ConfigError("sweep", "bias and eta grids must be non-empty");
    if (spec.objective == ObjectiveKind::RateCoverage && !(spec.rho_bps > 0.0))
        throw ConfigError("sweep.rho_bps", "rate-coverage objective needs rho > 0");
    if (spec.objective == ObjectiveKind::Percentile &&
        !(spec.quantile > 0.0 && spec.quantile < 1.0))
        throw ConfigError("sweep.quantile", "quantile must lie in (0,1)");

    SweepResult out;
    out.surface.resize(spec.bias_db.size() * spec.eta.size());
    parallel_for(out.surface.size(), threads, [&](std::size_t i) {
        SweepCell& cell = out.surface[i];
        cell.bias_db = spec.bias_db[i / spec.eta.size()];
        cell.eta = spec.eta[i % spec.eta.size()];
        try {
            const auto point = with_operating_point(cfg, cell.bias_db, cell.eta);
            switch (spec.objective) {
                case ObjectiveKind::RateCoverage:
                    cell.objective = spec.path == RatePath::Full
                                         ? rate_coverage(point, spec.rho_bps).total
                                         : rate_coverage_mean_load(point, spec.rho_bps).total;
                    break;
                case ObjectiveKind::Percentile:
                    cell.objective = rate_percentile(point, spec.quantile, spec.path).rate_bps;
                    break;
                case ObjectiveKind::Median:
                    cell.objective = rate_percentile(point, 0.5, spec.path).rate_bps;
                    break;
            }
            cell.ok = true;
        } catch (const std::exception& e) {
            cell.ok = false;
            cell.error = e.what();
        }
    });

    double best = -std::numeric_limits<double>::infinity();
    for (const auto& cell : out.surface) {
        if (cell.ok && cell.objective > best) {
            best = cell.objective;
            out.bias_star_db = cell.bias_db;
            out.eta_star = cell.eta;
            out.objective_star = cell.objective;
        }
    }
    if (!std::isfinite(best)) throw std::runtime_error("every sweep cell failed");
    out.offload_fraction =
        association_probabilities(with_operating_point(cfg, out.bias_star_db, out.eta_star)).a2();
    return out;
}

// ---------------------------------------------------------------------------
// Machine checks of the closed-form coverage claims (exponent 4, no noise)
// ---------------------------------------------------------------------------

/// Finite-difference scan of d S_nopart / d bias. Points with t >= 1 assert
/// non-positivity (pass iff max derivative <= 1e-9); sub-unity thresholds are
/// only reported, the claim does not cover them.
struct Claim1Report {
    double max_derivative = -std::numeric_limits<double>::infinity();
    bool pass = false;
    std::size_t points_checked = 0;
    std::vector<double> sub_unity_derivatives;
};

inline Claim1Report check_claim1(const std::vector<double>& a_grid,
                                 const std::vector<double>& p_grid,
                                 const std::vector<double>& b_grid,
                                 const std::vector<double>& t_grid) {
    Claim1Report rep;
    for (double a : a_grid)
        for (double p : p_grid)
            for (double t : t_grid)
                for (double b : b_grid) {
                    const double h = 1e-5 * b;
                    const ClosedFormParams cp{a, p, b};
                    const double up =
                        sinr_coverage_alpha4_closed(ClosedFormParams{a, p, b + h}, t, false);
                    const double dn =
                        sinr_coverage_alpha4_closed(ClosedFormParams{a, p, b - h}, t, false);
                    const double d = (up - dn) / (2.0 * h);
                    (void)cp;
                    if (t >= 1.0) {
                        rep.max_derivative = std::max(rep.max_derivative, d);
                        ++rep.points_checked;
                    } else {
                        rep.sub_unity_derivatives.push_back(d);
                    }
                }
    rep.pass = rep.max_derivative <= 1e-9;
    return rep;
}

/// Quartic model of the partitioned-coverage bias response (arctan linearized
/// in the bias terms) together with the radical root bounds. bias_bound caps
/// the coverage-maximizing bias.
struct BoundReport {
    std::array<double, 5> coeffs{};  ///< x^4 .. x^0 of P(x), x = sqrt(bias)
    double u_bound = 0.0;            ///< upper bound on the positive root
    double l_bound = 0.0;            ///< bound on the magnitude of negative roots
    double bias_bound = 0.0;         ///< max(U^2, L^2)
    double v = 0.0;
};

inline BoundReport bias_upper_bound(double a, double p, double t) {
    if (!(a > 0.0 && p > 0.0)) throw std::domain_error("density and power ratios must be > 0");
    if (!(t > 0.0)) throw std::domain_error("bias bound needs t > 0 (v must exceed 1)");
    BoundReport rep;
    const double v = rep.v = v_term(t);
    const double ap = a * std::sqrt(p);
    const double a2p = a * a * p;
    const double lead = a2p * (v * v - 1.0);
    rep.coeffs = {lead, 2.0 * ap * v * (1.0 - t), -(v * v - 1.0 + a2p * t * (v * v + 2.0)),
                  -4.0 * ap * v * t, -(a2p * t * t + t)};
    const double quad = v * v - 1.0 + a2p * t * (v * v + 2.0);
    const double cst = a2p * t * t + t;
    if (t <= 1.0) {
        rep.u_bound = std::max({std::sqrt(3.0 * quad / lead), std::cbrt(3.0 * 4.0 * ap * v / lead),
                                std::pow(3.0 * cst / lead, 0.25)});
        rep.l_bound =
            std::max({3.0 * 2.0 * ap * v * (1.0 - t) / lead, std::sqrt(3.0 * quad / lead),
                      std::pow(3.0 * cst / lead, 0.25)});
    } else {
        rep.u_bound = std::max({4.0 * 2.0 * ap * v * (t - 1.0) / lead,
                                std::sqrt(4.0 * quad / lead), std::cbrt(4.0 * 4.0 * ap * v / lead),
                                std::pow(4.0 * cst / lead, 0.25)});
        rep.l_bound = std::max(std::sqrt(2.0 * quad / lead), std::pow(2.0 * cst / lead, 0.25));
    }
    rep.bias_bound = std::max(rep.u_bound * rep.u_bound, rep.l_bound * rep.l_bound);
    return rep;
}

/// Full offloading (bias -> inf) against no biasing (bias = 1) under
/// partitioning; the margin must come out positive.
struct Claim3Report {
    double s_at_b1 = 0.0;
    double s_at_binf = 0.0;
    double margin = 0.0;
};

inline Claim3Report check_claim3(double a, double p, double t) {
    if (!(a > 0.0 && p > 0.0 && t > 0.0))
        throw std::domain_error("claim-3 check needs positive a, p, t");
    Claim3Report rep;
    const ClosedFormParams cp{a, p, 1.0};
    rep.s_at_b1 = sinr_coverage_alpha4_closed(cp, t, true);
    rep.s_at_binf = sinr_coverage_alpha4_bias_limit(cp, t);
    rep.margin = rep.s_at_b1 - rep.s_at_binf;
    return rep;
}

}  // namespace hetnet
