#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

#include "hetnet/quadrature.hpp"

namespace hetnet {

/// Interference exclusion kernel pair. Z is the Laplace-transform tail
/// integral, Q = c^{2/b} + Z adds the exclusion-disc (void) contribution.
struct QZ {
    double q = 0.0;
    double z = 0.0;
};

namespace detail {

// tail = int_X^inf du/(1+u^m) expanded as an alternating series in X^{-m};
// valid and fast for X >= 2 (ratio <= 2^{-m} < 1/2 for m > 1).
inline double one_plus_pow_tail(double X, double m) {
    double sum = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 200; ++k) {
        const double term = std::pow(X, 1.0 - m * k) / (m * k - 1.0);
        sum += sign * term;
        if (term < 1e-17 * std::max(1.0, std::abs(sum))) break;
        sign = -sign;
    }
    return sum;
}

}  // namespace detail

inline void check_kernel_domain(double t, double b, double c) {
    if (!(b > 2.0))
        throw std::domain_error("q_kernel: path-loss exponent must exceed 2 (tail diverges)");
    if (!(c > 0.0)) throw std::domain_error("q_kernel: bias ratio must be positive");
    if (t < 0.0 || std::isnan(t)) throw std::domain_error("q_kernel: threshold must be >= 0");
}

/// Z(t,b,c) = t^{2/b} * int_{(c/t)^{2/b}}^inf du/(1+u^{b/2}) by quadrature,
/// with the slowly decaying tail summed as a series.
inline QZ q_kernel_numeric(double t, double b, double c) {
    check_kernel_domain(t, b, c);
    QZ out;
    out.q = std::pow(c, 2.0 / b);
    if (t == 0.0) return out;
    if (std::isinf(t)) {
        out.z = out.q = std::numeric_limits<double>::infinity();
        return out;
    }
    const double m = b / 2.0;
    const double x0 = std::pow(c / t, 2.0 / b);
    const double split = std::max(2.0, 2.0 * x0);
    double integral = 0.0;
    if (split > x0) {
        auto res = integrate([m](double u) { return 1.0 / (1.0 + std::pow(u, m)); }, x0, split,
                             1e-12);
        if (!res.converged)
            throw NonConvergenceError("q_kernel: finite segment did not converge", res.residual);
        integral = res.value;
    }
    integral += detail::one_plus_pow_tail(split, m);
    out.z = std::pow(t, 2.0 / b) * integral;
    out.q += out.z;
    return out;
}

/// Closed form at path-loss exponent 4: Z = sqrt(t)*atan(sqrt(t/c)).
inline double z_closed_ple4(double t, double c) {
    if (t == 0.0) return 0.0;
    if (std::isinf(t)) return std::numeric_limits<double>::infinity();
    return std::sqrt(t) * std::atan(std::sqrt(t / c));
}

inline double q_closed_ple4(double t, double c) { return std::sqrt(c) + z_closed_ple4(t, c); }

/// Q/Z kernel with the exact arctangent form taken when b == 4.
inline QZ q_kernel(double t, double b, double c) {
    if (b == 4.0) {
        check_kernel_domain(t, b, c);
        return QZ{q_closed_ple4(t, c), z_closed_ple4(t, c)};
    }
    return q_kernel_numeric(t, b, c);
}

/// v(t) = sqrt(t)*atan(sqrt(t)) + 1 = Q(t,4,1); the recurring denominator
/// block of every exponent-4 closed form.
inline double v_term(double t) { return q_closed_ple4(t, 1.0); }

}  // namespace hetnet
