#include <doctest.h>

#include <cmath>

#include "hetnet/ccdf.hpp"
#include "hetnet/rate.hpp"
#include "test_configs.hpp"

using namespace hetnet;

namespace {

hetnet::NetworkConfig with_backhaul(double bias_db, double eta, double c1_mbps, double c2_mbps) {
    auto cfg = testcfg::validation(bias_db, eta);
    if (c1_mbps > 0.0) cfg.tiers[0].backhaul_bps = c1_mbps * 1e6;
    if (c2_mbps > 0.0) cfg.tiers[1].backhaul_bps = c2_mbps * 1e6;
    return cfg;
}

}  // namespace

TEST_CASE("infinite backhaul reproduces the unconstrained coverage") {
    for (double eta : {0.0, 0.5}) {
        auto capped = with_backhaul(10.0, eta, 1e6, 1e6);  // 10^6 Mbps
        auto open = testcfg::validation(10.0, eta);
        for (double rho : {5e4, 2.5e5, 2e6}) {
            CHECK(std::abs(rate_coverage_backhaul(capped, rho).total -
                           rate_coverage(open, rho).total) < 1e-9);
        }
    }
}

TEST_CASE("threshold beyond the macro pipe zeroes the macro class") {
    auto cfg = with_backhaul(10.0, 0.5, 1.0, 0.0);  // C1 = 1 Mbps
    const auto r = rate_coverage_backhaul(cfg, 2e6);
    CHECK(r.macro == 0.0);
    CHECK(r.total >= 0.0);
}

TEST_CASE("sum limits follow the printed ceilings") {
    // C/rho integral: 1 Mbps / 250 kbps = 4 -> last admissible load is 3
    CHECK(detail::backhaul_limit(1e6, 2.5e5, 1.0, 100) == 3);
    // just below integrality the ceiling rounds up
    CHECK(detail::backhaul_limit(1e6, 2.6e5, 1.0, 100) == 3);
    CHECK(detail::backhaul_limit(1e6, 2.4e5, 1.0, 100) == 4);
    // inner-sum shift
    CHECK(detail::backhaul_limit(1e6, 2.5e5, 3.0, 100) == 1);
    // exhausted pipe
    CHECK(detail::backhaul_limit(1e6, 1.1e6, 1.0, 100) == -1);
    CHECK(detail::backhaul_limit(1e6, 1e6, 1.0, 100) == -1);
    // absent pipe keeps the full PMF range
    CHECK(detail::backhaul_limit(std::nullopt, 2.5e5, 1.0, 77) == 77);
}

TEST_CASE("coverage is ordered in the backhaul capacity") {
    auto c5 = with_backhaul(10.0, 0.0, 0.0, 5.0);
    auto c20 = with_backhaul(10.0, 0.0, 0.0, 20.0);
    auto open = testcfg::validation(10.0, 0.0);
    for (double rho : make_threshold_grid(1e4, 1e7, 12, "log")) {
        const double r5 = rate_coverage_backhaul(c5, rho).total;
        const double r20 = rate_coverage_backhaul(c20, rho).total;
        const double r = rate_coverage(open, rho).total;
        CHECK(r5 <= r20 + 1e-12);
        CHECK(r20 <= r + 1e-12);
    }
}

TEST_CASE("frozen no-partitioning backhaul values") {
    CHECK(rate_coverage_backhaul(with_backhaul(10.0, 0.0, 0.0, 5.0), 250e3).total ==
          doctest::Approx(0.4617314957020684).epsilon(5e-5));
    CHECK(rate_coverage_backhaul(with_backhaul(10.0, 0.0, 0.0, 20.0), 250e3).total ==
          doctest::Approx(0.5624435060432753).epsilon(5e-5));
}

TEST_CASE("partitioned double sums stay ordered and bounded") {
    auto c5 = with_backhaul(10.0, 0.5, 0.0, 5.0);
    auto open = testcfg::validation(10.0, 0.5);
    for (double rho : {1e5, 2.5e5, 1e6}) {
        const auto rb = rate_coverage_backhaul(c5, rho);
        const auto r = rate_coverage(open, rho);
        CHECK(rb.total <= r.total + 1e-12);
        CHECK(rb.small_unbiased <= r.small_unbiased + 1e-12);
        CHECK(rb.offloaded <= r.offloaded + 1e-12);
    }
}

TEST_CASE("backhaul needs a positive threshold") {
    CHECK_THROWS_AS(rate_coverage_backhaul(with_backhaul(10.0, 0.5, 0.0, 5.0), 0.0),
                    std::domain_error);
}
