#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "hetnet/common.hpp"

namespace hetnet {

struct IntegrationResult {
    double value = 0.0;
    double residual = 0.0;  ///< estimated absolute error
    bool converged = false;
    int evaluations = 0;
};

namespace detail {

// Gauss-Kronrod 7-15 nodes/weights on [-1, 1] (QUADPACK dqk15 tables).
inline constexpr double kKronrodNodes[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kKronrodWeights[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kGaussWeights[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <typename Fn>
inline void gk15(const Fn& f, double a, double b, double& integral, double& error) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double fv[15];
    for (int i = 0; i < 7; ++i) {
        fv[i] = f(center - half * kKronrodNodes[i]);
        fv[14 - i] = f(center + half * kKronrodNodes[i]);
    }
    fv[7] = f(center);
    double kron = kKronrodWeights[7] * fv[7];
    double gauss = kGaussWeights[3] * fv[7];
    for (int i = 0; i < 7; ++i) {
        kron += kKronrodWeights[i] * (fv[i] + fv[14 - i]);
        if (i % 2 == 1) gauss += kGaussWeights[i / 2] * (fv[i] + fv[14 - i]);
    }
    integral = kron * half;
    const double diff = std::abs(kron - gauss) * std::abs(half);
    // QUADPACK-style sharpened error estimate.
    error = diff;
    if (diff > 0.0) {
        double resasc = 0.0;
        const double mean = kron * 0.5;
        for (int i = 0; i < 15; ++i) {
            const double w = (i == 7) ? kKronrodWeights[7] : kKronrodWeights[i < 7 ? i : 14 - i];
            resasc += w * std::abs(fv[i] - mean);
        }
        resasc *= std::abs(half);
        if (resasc > 0.0) error = resasc * std::min(1.0, std::pow(200.0 * diff / resasc, 1.5));
    }
}

struct Segment {
    double a, b, value, error;
};

}  // namespace detail

/// Adaptive Gauss-Kronrod integration of f over the finite interval [lo, hi].
/// Splits the worst segment until the summed error estimate drops below
/// max(tol, |I| * 1e-14), giving up after `max_segments` subdivisions.
template <typename Fn>
IntegrationResult integrate(const Fn& f, double lo, double hi, double tol = 1e-8,
                            int max_segments = 2000) {
    IntegrationResult out;
    if (!(hi > lo)) {
        out.converged = true;
        return out;
    }
    std::vector<detail::Segment> segs;
    segs.reserve(64);
    detail::Segment s{lo, hi, 0.0, 0.0};
    detail::gk15(f, lo, hi, s.value, s.error);
    out.evaluations = 15;
    segs.push_back(s);
    while (static_cast<int>(segs.size()) < max_segments) {
        double total = 0.0, err = 0.0;
        std::size_t worst = 0;
        for (std::size_t i = 0; i < segs.size(); ++i) {
            total += segs[i].value;
            err += segs[i].error;
            if (segs[i].error > segs[worst].error) worst = i;
        }
        const double target = std::max(tol, std::abs(total) * 1e-14);
        if (err <= target || segs[worst].error == 0.0) {
            out.value = total;
            out.residual = err;
            out.converged = true;
            return out;
        }
        const detail::Segment w = segs[worst];
        const double mid = 0.5 * (w.a + w.b);
        if (mid <= w.a || mid >= w.b) {  // interval exhausted at double precision
            segs[worst].error = 0.0;
            continue;
        }
        detail::Segment left{w.a, mid, 0.0, 0.0}, right{mid, w.b, 0.0, 0.0};
        detail::gk15(f, left.a, left.b, left.value, left.error);
        detail::gk15(f, right.a, right.b, right.value, right.error);
        out.evaluations += 30;
        segs[worst] = left;
        segs.push_back(right);
    }
    double total = 0.0, err = 0.0;
    for (const auto& g : segs) {
        total += g.value;
        err += g.error;
    }
    out.value = total;
    out.residual = err;
    out.converged = err <= std::max(tol, std::abs(total) * 1e-14);
    return out;
}

/// Integrate f over [lo, inf) through the substitution y = lo + scale*u/(1-u),
/// which maps u in (0,1) onto the half line. `scale` should be of the order of
/// the integrand's decay length so the adaptive refinement starts well placed.
template <typename Fn>
IntegrationResult integrate_half_line(const Fn& f, double lo, double tol = 1e-8,
                                      double scale = 1.0, int max_segments = 2000) {
    if (!(scale > 0.0) || !std::isfinite(scale)) scale = 1.0;
    auto g = [&f, lo, scale](double u) {
        const double om = 1.0 - u;
        if (om <= 0.0) return 0.0;
        const double y = lo + scale * u / om;
        if (!std::isfinite(y)) return 0.0;
        const double v = f(y) * scale / (om * om);
        return std::isfinite(v) ? v : 0.0;
    };
    return integrate(g, 0.0, 1.0, tol, max_segments);
}

/// Solve sum_k c_k * s^{e_k} = 1 for s (all c_k >= 0, e_k > 0); used to pick
/// the transform scale for exp(-sum c_k y^{e_k}) style integrands.
inline double decay_scale(const std::vector<double>& coeffs, const std::vector<double>& exps) {
    double csum = 0.0;
    for (double c : coeffs) csum += c;
    if (!(csum > 0.0)) return 1.0;
    double lo = 1e-12, hi = 1e12;
    auto val = [&](double s) {
        double v = 0.0;
        for (std::size_t k = 0; k < coeffs.size(); ++k) v += coeffs[k] * std::pow(s, exps[k]);
        return v;
    };
    for (int it = 0; it < 200; ++it) {
        const double mid = std::sqrt(lo * hi);
        (val(mid) > 1.0 ? hi : lo) = mid;
        if (hi / lo < 1.0 + 1e-6) break;
    }
    return std::sqrt(lo * hi);
}

}  // namespace hetnet
