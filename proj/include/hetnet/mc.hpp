#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "hetnet/ccdf.hpp"
#include "hetnet/config.hpp"

namespace hetnet::mc {

// ---------------------------------------------------------------------------
// RNG. Self-contained xoshiro256++ with splitmix64 seeding so realizations
// are bit-for-bit reproducible across platforms and standard libraries.
// ---------------------------------------------------------------------------

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Per-drop seeds are derived from the master seed by counter, so any subset
/// of drops can be regenerated independently and in any order.
inline std::uint64_t drop_seed(std::uint64_t master, std::uint64_t drop_index) {
    return splitmix64(master ^ splitmix64(drop_index + 1));
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& w : s_) w = x = splitmix64(x);
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Unit-mean exponential (Rayleigh power fading).
    double exponential() { return -std::log1p(-uniform()); }

    /// Poisson sample: inversion-by-products for small means, Hormann's
    /// transformed rejection (PTRS) otherwise. Both use only the uniform
    /// stream, keeping draws platform-independent.
    std::uint64_t poisson(double mean) {
        if (!(mean > 0.0)) return 0;
        if (mean < 10.0) {
            const double limit = std::exp(-mean);
            std::uint64_t k = 0;
            double prod = uniform();
            while (prod > limit) {
                ++k;
                prod *= uniform();
            }
            return k;
        }
        const double slam = std::sqrt(mean);
        const double loglam = std::log(mean);
        const double b = 0.931 + 2.53 * slam;
        const double a = -0.059 + 0.02483 * b;
        const double invalpha = 1.1239 + 1.1328 / (b - 3.4);
        const double vr = 0.9277 - 3.6224 / (b - 2.0);
        while (true) {
            const double u = uniform() - 0.5;
            const double v = uniform();
            const double us = 0.5 - std::abs(u);
            const double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
            if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(kf);
            if (kf < 0.0 || (us < 0.013 && v > us)) continue;
            if (std::log(v) + std::log(invalpha) - std::log(a / (us * us) + b) <=
                -mean + kf * loglam - std::lgamma(kf + 1.0))
                return static_cast<std::uint64_t>(kf);
        }
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t s_[4];
};

// ---------------------------------------------------------------------------
// Sampled network drop
// ---------------------------------------------------------------------------

struct Point {
    double x = 0.0;
    double y = 0.0;
};

inline double dist2(Point a, Point b) {
    const double dx = a.x - b.x, dy = a.y - b.y;
    return dx * dx + dy * dy;
}

/// One network drop: per-tier AP point sets and the user set on a square
/// window, plus a probe user pinned at the window centre whose statistics
/// stand in for the typical user.
struct Realization {
    double window_km = 0.0;
    std::uint64_t seed = 0;
    std::vector<std::vector<Point>> ap_points;
    std::vector<Point> user_points;
    Point probe;
    bool window_warning = false;  ///< window below the documented 10/sqrt(lambda_1) floor
};

/// Sample a drop. Identical (cfg, window, seed) inputs reproduce the drop
/// bit-for-bit. `with_users` skips the user process (AP layout unchanged)
/// for callers that need only geometry and SINR.
inline Realization sample_realization(const NetworkConfig& cfg, double window_km,
                                      std::uint64_t seed, bool with_users = true) {
    cfg.validate();
    if (!(window_km > 0.0)) throw ConfigError("mc.window_km", "window must be > 0");
    Realization r;
    r.window_km = window_km;
    r.seed = seed;
    r.window_warning = window_km < 10.0 / std::sqrt(cfg.tiers[0].density);
    r.probe = Point{0.5 * window_km, 0.5 * window_km};
    Rng rng(seed);
    const double area = window_km * window_km;
    r.ap_points.resize(cfg.num_tiers());
    for (std::size_t k = 0; k < cfg.num_tiers(); ++k) {
        const std::uint64_t n = rng.poisson(cfg.tiers[k].density * area);
        auto& pts = r.ap_points[k];
        pts.resize(n);
        for (auto& p : pts) p = Point{rng.uniform(0.0, window_km), rng.uniform(0.0, window_km)};
    }
    if (with_users) {
        const std::uint64_t n = rng.poisson(cfg.user_density * area);
        r.user_points.resize(n);
        for (auto& p : r.user_points)
            p = Point{rng.uniform(0.0, window_km), rng.uniform(0.0, window_km)};
    }
    return r;
}

namespace detail {

// Uniform-cell index for nearest-neighbour queries over one tier.
class PointGrid {
public:
    PointGrid(const std::vector<Point>& pts, double window, double expected_density)
        : pts_(pts), window_(window) {
        const double target = window * std::sqrt(std::max(expected_density, 1e-12));
        ncell_ = std::clamp(static_cast<int>(target), 4, 512);
        cell_ = window / ncell_;
        const std::size_t cells = static_cast<std::size_t>(ncell_) * ncell_;
        counts_.assign(cells + 1, 0);
        for (const auto& p : pts) ++counts_[cell_of(p) + 1];
        for (std::size_t i = 1; i < counts_.size(); ++i) counts_[i] += counts_[i - 1];
        order_.resize(pts.size());
        std::vector<std::uint32_t> cursor(counts_.begin(), counts_.end() - 1);
        for (std::uint32_t i = 0; i < pts.size(); ++i)
            order_[cursor[cell_of(pts[i])]++] = i;
    }

    /// Index of the nearest point to q, or -1 when the tier is empty.
    int nearest(Point q, double& best_d2) const {
        best_d2 = std::numeric_limits<double>::infinity();
        if (pts_.empty()) return -1;
        int best = -1;
        const int cx = coord(q.x), cy = coord(q.y);
        for (int ring = 0; ring < ncell_; ++ring) {
            const double reach = (ring - 1) * cell_;
            if (best >= 0 && reach > 0.0 && best_d2 <= reach * reach) break;
            const int x0 = cx - ring, x1 = cx + ring, y0 = cy - ring, y1 = cy + ring;
            for (int gy = std::max(0, y0); gy <= std::min(ncell_ - 1, y1); ++gy) {
                const bool edge_row = (gy == y0 || gy == y1);
                for (int gx = std::max(0, x0); gx <= std::min(ncell_ - 1, x1); ++gx) {
                    if (!edge_row && gx != x0 && gx != x1) continue;  // ring boundary only
                    const std::size_t c = static_cast<std::size_t>(gy) * ncell_ + gx;
                    for (std::uint32_t i = counts_[c]; i < counts_[c + 1]; ++i) {
                        const double d2 = dist2(q, pts_[order_[i]]);
                        if (d2 < best_d2) {
                            best_d2 = d2;
                            best = static_cast<int>(order_[i]);
                        }
                    }
                }
            }
        }
        return best;
    }

private:
    int coord(double v) const {
        return std::clamp(static_cast<int>(v / cell_), 0, ncell_ - 1);
    }
    std::size_t cell_of(Point p) const {
        return static_cast<std::size_t>(coord(p.y)) * ncell_ + coord(p.x);
    }
    const std::vector<Point>& pts_;
    double window_ = 0.0;
    double cell_ = 1.0;
    int ncell_ = 1;
    std::vector<std::uint32_t> counts_;
    std::vector<std::uint32_t> order_;
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Probe evaluation
// ---------------------------------------------------------------------------

/// Everything measured at the probe for one drop. Loads include the probe
/// itself; tier-2 loads are additionally split into the two user classes.
struct ProbeResult {
    UserClass cls = UserClass::Macro;
    int serving_tier = 1;  ///< 1-based
    double serving_distance_km = 0.0;
    double sinr = 0.0;
    int load_own_class = 1;
    int load_tier_total = 1;
    int load_bbar = 0;
    int load_b = 0;
    double rate_bps = 0.0;
    double rate_backhaul_bps = 0.0;
};

namespace detail {

struct Assignment {
    int tier = -1;
    int ap = -1;
    bool offloaded = false;
};

// Biased-received-power association of a point against per-tier nearest APs.
template <typename NearestFn>
inline Assignment associate(const NetworkConfig& cfg, const NearestFn& nearest_of_tier) {
    const std::size_t K = cfg.num_tiers();
    Assignment out;
    double best_metric = -1.0;
    std::vector<double> unbiased(K, -1.0);
    std::vector<int> idx(K, -1);
    for (std::size_t k = 0; k < K; ++k) {
        double d2 = 0.0;
        idx[k] = nearest_of_tier(k, d2);
        if (idx[k] < 0) continue;
        const double recv =
            cfg.tiers[k].tx_power_mw * std::pow(d2, -0.5 * cfg.tiers[k].ple);
        unbiased[k] = recv;
        const double metric = recv * cfg.tiers[k].bias_lin;
        if (metric > best_metric) {
            best_metric = metric;
            out.tier = static_cast<int>(k);
        }
    }
    if (out.tier < 0) return out;
    out.ap = idx[static_cast<std::size_t>(out.tier)];
    if (out.tier > 0) {
        // dominant without bias? otherwise range expanded
        double best_other = -1.0;
        for (std::size_t k = 0; k < K; ++k) {
            if (static_cast<int>(k) == out.tier || idx[k] < 0) continue;
            best_other = std::max(best_other, unbiased[k] * cfg.tiers[k].bias_lin);
        }
        out.offloaded = !(unbiased[static_cast<std::size_t>(out.tier)] > best_other);
    }
    return out;
}

}  // namespace detail

/// Evaluate the probe of a drop: association class, SINR with per-link
/// Rayleigh fading, per-class loads, and the resulting rate with and without
/// the backhaul cap. Fading and AP-activity draws come from streams derived
/// from the realization seed, so repeated evaluation is reproducible.
inline ProbeResult evaluate_probe(const Realization& r, const NetworkConfig& cfg) {
    cfg.validate();
    const std::size_t K = cfg.num_tiers();
    if (r.ap_points.size() != K)
        throw std::invalid_argument("realization tier count does not match configuration");

    ProbeResult out;
    // Nearest AP per tier by linear scan (AP sets are small relative to users).
    std::vector<int> nearest_idx(K, -1);
    std::vector<double> nearest_d2(K, std::numeric_limits<double>::infinity());
    for (std::size_t k = 0; k < K; ++k) {
        for (std::size_t i = 0; i < r.ap_points[k].size(); ++i) {
            const double d2 = dist2(r.probe, r.ap_points[k][i]);
            if (d2 < nearest_d2[k]) {
                nearest_d2[k] = d2;
                nearest_idx[k] = static_cast<int>(i);
            }
        }
    }
    const auto probe_assign = detail::associate(
        cfg, [&](std::size_t k, double& d2) {
            d2 = nearest_d2[k];
            return nearest_idx[k];
        });
    if (probe_assign.tier < 0) throw std::runtime_error("empty realization: no AP in window");
    const std::size_t j = static_cast<std::size_t>(probe_assign.tier);
    out.serving_tier = probe_assign.tier + 1;
    out.cls = j == 0 ? UserClass::Macro
                     : (probe_assign.offloaded ? UserClass::Offloaded : UserClass::SmallUnbiased);
    out.serving_distance_km = std::sqrt(nearest_d2[j]);

    // Fading and activity thinning. The macro tier is muted for offloaded
    // probes only in the partitioned model; activity thins interference but
    // never the serving link.
    Rng fading(splitmix64(r.seed ^ 0x5E71A11CEDull));
    const bool macro_muted = cfg.partitioned() && out.cls == UserClass::Offloaded;
    double serving_h = 0.0;
    double interference = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
        const auto& tk = cfg.tiers[k];
        const bool muted_tier = macro_muted && k == 0;
        for (std::size_t i = 0; i < r.ap_points[k].size(); ++i) {
            const bool is_server = (static_cast<int>(k) == probe_assign.tier &&
                                    static_cast<int>(i) == probe_assign.ap);
            const double h = fading.exponential();
            if (is_server) {
                serving_h = h;
                continue;
            }
            if (muted_tier) continue;
            if (tk.activity < 1.0 && fading.uniform() >= tk.activity) continue;
            interference +=
                tk.tx_power_mw * h * std::pow(dist2(r.probe, r.ap_points[k][i]), -0.5 * tk.ple);
        }
    }
    const double signal = cfg.tiers[j].tx_power_mw * serving_h *
                          std::pow(nearest_d2[j], -0.5 * cfg.tiers[j].ple);
    out.sinr = signal / (interference + cfg.noise_mw);

    // Loads at the serving AP: assign every user by the same rule. A user can
    // only pick the probe's server if that server is its nearest AP of tier
    // j, so anyone farther than ~6 voronoi radii is rejected outright
    // (miss probability below 1e-40 at that range).
    if (!r.user_points.empty()) {
        std::vector<detail::PointGrid> grids;
        grids.reserve(K);
        for (std::size_t k = 0; k < K; ++k)
            grids.emplace_back(r.ap_points[k], r.window_km, cfg.tiers[k].density);
        const Point server = r.ap_points[j][static_cast<std::size_t>(probe_assign.ap)];
        const double r_cut = 6.0 / std::sqrt(cfg.tiers[j].density);
        const double r_cut2 = r_cut * r_cut;
        int n_bbar = 0, n_b = 0, n_own = 0, n_total = 0;
        for (const auto& u : r.user_points) {
            if (dist2(u, server) > r_cut2) continue;
            const auto asg = detail::associate(cfg, [&](std::size_t k, double& d2) {
                return grids[k].nearest(u, d2);
            });
            if (asg.tier != probe_assign.tier || asg.ap != probe_assign.ap) continue;
            ++n_total;
            if (asg.tier > 0) (asg.offloaded ? n_b : n_bbar)++;
            const bool same_class = (asg.tier == 0) || (asg.offloaded == probe_assign.offloaded);
            if (same_class) ++n_own;
        }
        out.load_own_class = 1 + n_own;
        out.load_tier_total = 1 + n_total;
        if (j > 0) {
            out.load_bbar = n_bbar + (out.cls == UserClass::SmallUnbiased ? 1 : 0);
            out.load_b = n_b + (out.cls == UserClass::Offloaded ? 1 : 0);
        }
    } else {
        if (j > 0) {
            out.load_bbar = out.cls == UserClass::SmallUnbiased ? 1 : 0;
            out.load_b = out.cls == UserClass::Offloaded ? 1 : 0;
        }
    }

    const double se = std::log2(1.0 + out.sinr);
    if (cfg.partitioned()) {
        const double g = resource_divisor(out.cls, cfg.eta);
        out.rate_bps = cfg.bandwidth_hz / (g * out.load_own_class) * se;
    } else {
        out.rate_bps = cfg.bandwidth_hz / out.load_tier_total * se;
    }
    out.rate_backhaul_bps = out.rate_bps;
    if (cfg.tiers[j].backhaul_bps)
        out.rate_backhaul_bps =
            std::min(out.rate_bps, *cfg.tiers[j].backhaul_bps / out.load_tier_total);
    return out;
}

/// Re-apply a backhaul cap to a stored result (serving tier's pipe in bps;
/// infinity leaves the rate unchanged).
inline double backhaul_capped_rate(const ProbeResult& p, double backhaul_bps) {
    if (!std::isfinite(backhaul_bps)) return p.rate_bps;
    return std::min(p.rate_bps, backhaul_bps / p.load_tier_total);
}

/// Run `drops` independent drops. Results land in a vector indexed by drop,
/// and per-drop seeds come from the master seed by counter, so the output is
/// identical for any worker count.
inline std::vector<ProbeResult> run_drops(const NetworkConfig& cfg, double window_km, int drops,
                                          std::uint64_t master_seed, int threads = 1,
                                          bool with_users = true) {
    std::vector<ProbeResult> out(static_cast<std::size_t>(drops));
    parallel_for(static_cast<std::size_t>(drops), threads, [&](std::size_t i) {
        const auto r = sample_realization(cfg, window_km, drop_seed(master_seed, i), with_users);
        out[i] = evaluate_probe(r, cfg);
    });
    return out;
}

enum class Metric { Sinr, Rate, RateBackhaul };

/// Empirical CCDF with 95% normal-approximation confidence halfwidths.
inline CcdfCurve empirical_ccdf(const std::vector<ProbeResult>& results,
                                const std::vector<double>& thresholds, Metric metric) {
    if (results.size() < 100)
        throw InsufficientSamplesError("empirical CCDF needs at least 100 results");
    CcdfCurve c;
    c.kind = metric == Metric::Sinr ? CcdfCurve::Kind::Sinr : CcdfCurve::Kind::Rate;
    c.thresholds = thresholds;
    const double n = static_cast<double>(results.size());
    for (double th : thresholds) {
        std::size_t above = 0;
        for (const auto& p : results) {
            const double v = metric == Metric::Sinr ? p.sinr
                             : metric == Metric::Rate ? p.rate_bps
                                                      : p.rate_backhaul_bps;
            if (v > th) ++above;
        }
        const double phat = static_cast<double>(above) / n;
        c.values.push_back(phat);
        c.ci_halfwidth.push_back(1.96 * std::sqrt(phat * (1.0 - phat) / n));
    }
    return c;
}

inline CcdfCurve empirical_ccdf_values(const std::vector<double>& values,
                                       const std::vector<double>& thresholds,
                                       CcdfCurve::Kind kind) {
    if (values.size() < 100)
        throw InsufficientSamplesError("empirical CCDF needs at least 100 results");
    CcdfCurve c;
    c.kind = kind;
    c.thresholds = thresholds;
    const double n = static_cast<double>(values.size());
    for (double th : thresholds) {
        std::size_t above = 0;
        for (double v : values)
            if (v > th) ++above;
        const double phat = static_cast<double>(above) / n;
        c.values.push_back(phat);
        c.ci_halfwidth.push_back(1.96 * std::sqrt(phat * (1.0 - phat) / n));
    }
    return c;
}

/// Normalized histogram of the tagged-AP own-class load for one class;
/// masses[i] corresponds to load i+1.
inline std::vector<double> empirical_load_pmf(const std::vector<ProbeResult>& results,
                                              UserClass cls) {
    std::vector<int> loads;
    for (const auto& p : results)
        if (p.cls == cls) loads.push_back(p.load_own_class);
    if (loads.size() < 1000)
        throw InsufficientSamplesError("empirical load PMF needs at least 1000 class samples");
    const int max_load = *std::max_element(loads.begin(), loads.end());
    std::vector<double> pmf(static_cast<std::size_t>(max_load), 0.0);
    const double w = 1.0 / static_cast<double>(loads.size());
    for (int l : loads) pmf[static_cast<std::size_t>(l - 1)] += w;
    return pmf;
}

}  // namespace hetnet::mc
