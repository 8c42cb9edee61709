#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "hetnet/association.hpp"
#include "hetnet/mc.hpp"
#include "test_configs.hpp"

using namespace hetnet;

TEST_CASE("identical seeds reproduce a drop bit-for-bit") {
    auto cfg = testcfg::validation(10.0, 0.5);
    const auto a = mc::sample_realization(cfg, 12.0, 99);
    const auto b = mc::sample_realization(cfg, 12.0, 99);
    REQUIRE(a.ap_points.size() == b.ap_points.size());
    for (std::size_t k = 0; k < a.ap_points.size(); ++k) {
        REQUIRE(a.ap_points[k].size() == b.ap_points[k].size());
        for (std::size_t i = 0; i < a.ap_points[k].size(); ++i) {
            CHECK(a.ap_points[k][i].x == b.ap_points[k][i].x);
            CHECK(a.ap_points[k][i].y == b.ap_points[k][i].y);
        }
    }
    REQUIRE(a.user_points.size() == b.user_points.size());
    const auto pa = mc::evaluate_probe(a, cfg);
    const auto pb = mc::evaluate_probe(b, cfg);
    CHECK(pa.sinr == pb.sinr);
    CHECK(pa.rate_bps == pb.rate_bps);
    CHECK(pa.load_own_class == pb.load_own_class);
    const auto c = mc::sample_realization(cfg, 12.0, 100);
    CHECK(c.ap_points[0].size() != a.ap_points[0].size());  // overwhelmingly likely
}

TEST_CASE("worker count does not change the result vector") {
    auto cfg = testcfg::validation(10.0, 0.5);
    const auto r1 = mc::run_drops(cfg, 11.0, 40, 7, 1, false);
    const auto r3 = mc::run_drops(cfg, 11.0, 40, 7, 3, false);
    REQUIRE(r1.size() == r3.size());
    for (std::size_t i = 0; i < r1.size(); ++i) {
        CHECK(r1[i].sinr == r3[i].sinr);
        CHECK(r1[i].cls == r3[i].cls);
    }
}

TEST_CASE("tier point counts are Poisson with the right mean") {
    auto cfg = testcfg::validation(0.0, 0.0);
    const int seeds = 3000;
    double total = 0.0;
    for (int s = 0; s < seeds; ++s)
        total += static_cast<double>(
            mc::sample_realization(cfg, 20.0, mc::drop_seed(31337, s), false).ap_points[0].size());
    const double mean = total / seeds;  // expect 400
    CHECK(std::abs(mean - 400.0) < 3.0 * std::sqrt(400.0 / seeds) + 1e-9);
}

TEST_CASE("poisson sampler hits mean and variance across regimes") {
    mc::Rng rng(5);
    for (double lam : {3.0, 25.0, 400.0, 40000.0}) {
        const int n = lam > 1000 ? 2000 : 20000;
        double s = 0.0, s2 = 0.0;
        for (int i = 0; i < n; ++i) {
            const double x = static_cast<double>(rng.poisson(lam));
            s += x;
            s2 += x * x;
        }
        const double mean = s / n;
        const double var = s2 / n - mean * mean;
        CHECK(std::abs(mean - lam) < 4.0 * std::sqrt(lam / n));
        CHECK(var == doctest::Approx(lam).epsilon(0.1));
    }
}

TEST_CASE("nearest-AP distance follows the contact law (KS)") {
    auto cfg = testcfg::validation(0.0, 0.0);
    const int n = 100000;
    std::vector<double> d;
    d.reserve(n);
    for (int i = 0; i < n; ++i) {
        const auto r = mc::sample_realization(cfg, 12.0, mc::drop_seed(2025, i), false);
        double best = 1e30;
        for (const auto& p : r.ap_points[0]) best = std::min(best, mc::dist2(r.probe, p));
        d.push_back(std::sqrt(best));
    }
    std::sort(d.begin(), d.end());
    double ks = 0.0;
    for (int i = 0; i < n; ++i) {
        const double f = 1.0 - std::exp(-kPi * d[i] * d[i]);  // lambda = 1
        ks = std::max({ks, std::abs((i + 1.0) / n - f), std::abs(static_cast<double>(i) / n - f)});
    }
    CHECK(ks < 0.01);
}

TEST_CASE("probe class frequencies match the analytic shares") {
    auto cfg = testcfg::validation(10.0, 0.5);
    const auto assoc = association_probabilities(cfg);
    const int drops = 10000;
    int n1 = 0, nb = 0, nB = 0;
    for (int i = 0; i < drops; ++i) {
        const auto p = mc::evaluate_probe(
            mc::sample_realization(cfg, 12.0, mc::drop_seed(9001, i), false), cfg);
        (p.cls == UserClass::Macro ? n1 : p.cls == UserClass::SmallUnbiased ? nb : nB)++;
    }
    auto within_ci = [drops](int count, double prob) {
        const double hw = 1.96 * std::sqrt(prob * (1.0 - prob) / drops);
        return std::abs(static_cast<double>(count) / drops - prob) <= hw;
    };
    CHECK(within_ci(n1, assoc.a1));
    CHECK(within_ci(nb, assoc.a_bbar));
    CHECK(within_ci(nB, assoc.a_b));
}

TEST_CASE("macro muting strictly helps offloaded probes") {
    auto shielded = testcfg::validation(10.0, 0.5);
    auto exposed = testcfg::validation(10.0, 0.0);  // same drop, macro interference added
    int seen = 0;
    for (int i = 0; i < 400 && seen < 50; ++i) {
        const auto r = mc::sample_realization(shielded, 12.0, mc::drop_seed(10101, i), false);
        const auto ps = mc::evaluate_probe(r, shielded);
        if (ps.cls != UserClass::Offloaded) continue;
        const auto pe = mc::evaluate_probe(r, exposed);
        REQUIRE(pe.cls == UserClass::Offloaded);
        CHECK(pe.sinr < ps.sinr);
        ++seen;
    }
    CHECK(seen >= 50);
}

TEST_CASE("empirical ccdf basics") {
    std::vector<mc::ProbeResult> rs(200);
    for (std::size_t i = 0; i < rs.size(); ++i) rs[i].sinr = 10.0 + static_cast<double>(i);
    const auto c = mc::empirical_ccdf(rs, {1.0, 50.0, 1e9}, mc::Metric::Sinr);
    CHECK(c.values[0] == 1.0);
    CHECK(c.ci_halfwidth[0] == 0.0);
    CHECK(c.values[2] == 0.0);
    for (std::size_t i = 1; i < c.values.size(); ++i) CHECK(c.values[i] <= c.values[i - 1]);
    std::vector<mc::ProbeResult> few(10);
    CHECK_THROWS_AS(mc::empirical_ccdf(few, {1.0}, mc::Metric::Sinr), InsufficientSamplesError);
}

TEST_CASE("load histogram degenerates with the user density") {
    auto cfg = testcfg::validation(10.0, 0.5);
    cfg.user_density = 1e-6;
    std::vector<mc::ProbeResult> rs;
    int counts[3] = {0, 0, 0};
    for (int i = 0; i < 4000; ++i) {
        rs.push_back(mc::evaluate_probe(
            mc::sample_realization(cfg, 10.0, mc::drop_seed(7007, i)), cfg));
        ++counts[static_cast<int>(rs.back().cls)];
    }
    // the most common class is guaranteed >= 4000/3 samples
    const UserClass pick = static_cast<UserClass>(
        std::max_element(counts, counts + 3) - counts);
    const auto pmf = mc::empirical_load_pmf(rs, pick);
    CHECK(pmf[0] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK_THROWS_AS(mc::empirical_load_pmf({}, UserClass::Macro), InsufficientSamplesError);
}

TEST_CASE("window guard flags undersized windows") {
    auto cfg = testcfg::validation(10.0, 0.5);
    CHECK(mc::sample_realization(cfg, 8.0, 1, false).window_warning);
    CHECK_FALSE(mc::sample_realization(cfg, 12.0, 1, false).window_warning);
}

TEST_CASE("doubling the window moves the SINR curve less than the CI") {
    auto cfg = testcfg::validation(10.0, 0.5);
    const std::vector<double> grid = {db_to_linear(-6.0), db_to_linear(-3.0), db_to_linear(0.0),
                                      db_to_linear(5.0)};
    const auto small = mc::run_drops(cfg, 12.0, 10000, 60601, 1, false);
    const auto big = mc::run_drops(cfg, 24.0, 10000, 60601, 1, false);
    const auto cs = mc::empirical_ccdf(small, grid, mc::Metric::Sinr);
    const auto cb = mc::empirical_ccdf(big, grid, mc::Metric::Sinr);
    for (std::size_t i = 0; i < grid.size(); ++i)
        CHECK(std::abs(cs.values[i] - cb.values[i]) <= cs.ci_halfwidth[i] + cb.ci_halfwidth[i]);
}

TEST_CASE("backhaul cap re-application matches the stored rate") {
    auto cfg = testcfg::validation(10.0, 0.0);
    cfg.tiers[1].backhaul_bps = 5e6;
    const auto r = mc::sample_realization(cfg, 12.0, 31);
    const auto p = mc::evaluate_probe(r, cfg);
    if (p.serving_tier == 2)
        CHECK(mc::backhaul_capped_rate(p, 5e6) == doctest::Approx(p.rate_backhaul_bps));
    CHECK(mc::backhaul_capped_rate(p, std::numeric_limits<double>::infinity()) == p.rate_bps);
}
