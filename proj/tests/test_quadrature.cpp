#include <doctest.h>

#include <cmath>

#include "hetnet/quadrature.hpp"

using namespace hetnet;

TEST_CASE("half-line exponential integrates to one") {
    auto r = integrate_half_line([](double x) { return std::exp(-x); }, 0.0, 1e-10);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(r.residual <= 1e-10);
}

TEST_CASE("nearest-distance density integrates to one") {
    const double lam = 5.0;
    auto f = [lam](double y) { return 2.0 * kPi * lam * y * std::exp(-kPi * lam * y * y); };
    auto r = integrate_half_line(f, 0.0, 1e-10, 1.0 / std::sqrt(kPi * lam));
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("finite interval with a steep feature") {
    // int_0^1 50 e^{-50x} dx = 1 - e^{-50}
    auto r = integrate([](double x) { return 50.0 * std::exp(-50.0 * x); }, 0.0, 1.0, 1e-12);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(1.0 - std::exp(-50.0)).epsilon(1e-11));
}

TEST_CASE("segment budget exhaustion is flagged, not hidden") {
    auto nasty = [](double x) { return std::sin(1.0 / (x + 1e-8)); };
    auto r = integrate(nasty, 0.0, 1.0, 1e-14, 6);
    CHECK_FALSE(r.converged);
    CHECK(r.residual > 1e-14);
}

TEST_CASE("decay scale solves the coefficient balance") {
    // single term: c * s^2 = 1  =>  s = 1/sqrt(c)
    const double s = decay_scale({16.0}, {2.0});
    CHECK(s == doctest::Approx(0.25).epsilon(1e-4));
    // degenerate input falls back to unit scale
    CHECK(decay_scale({}, {}) == 1.0);
}

TEST_CASE("misplaced mass is still found via the scale hint") {
    const double c = 1e6;
    auto f = [c](double y) { return 2.0 * c * y * std::exp(-c * y * y); };
    auto r = integrate_half_line(f, 0.0, 1e-10, 1.0 / std::sqrt(c));
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-9));
}
