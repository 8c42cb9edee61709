#include <doctest.h>

#include <cmath>

#include "hetnet/association.hpp"
#include "hetnet/mc.hpp"
#include "test_configs.hpp"

using namespace hetnet;

TEST_CASE("symmetric tiers split evenly") {
    auto cfg = testcfg::ratio_config(1.0, 0.0, 0.0, 0.0);
    const auto a = association_probabilities(cfg);
    CHECK(a.a1 == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(a.a_bbar == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(a.a_b == 0.0);
}

TEST_CASE("frozen equal-exponent point: a=5, p=-20dB, B=10dB") {
    auto cfg = testcfg::ratio_config(5.0, -20.0, 10.0, 0.5);
    const auto a = association_probabilities_equal_ple(cfg);
    CHECK(a.a1 == doctest::Approx(0.3874258867227931).epsilon(1e-12));
    CHECK(a.a_bbar == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(a.a_b == doctest::Approx(0.2792407799438736).epsilon(1e-12));
    const auto ai = association_probabilities_integral(cfg);
    CHECK(std::abs(ai.a1 - a.a1) < 1e-8);
    CHECK(std::abs(ai.a_bbar - a.a_bbar) < 1e-8);
    CHECK(std::abs(ai.a_b - a.a_b) < 1e-8);
}

TEST_CASE("frozen mixed-exponent point: validation config at 10 dB") {
    auto cfg = testcfg::validation(10.0, 0.5);
    const auto a = association_probabilities(cfg);
    CHECK(a.a1 == doctest::Approx(0.3355484227697179).epsilon(1e-8));
    CHECK(a.a_bbar == doctest::Approx(0.3672117077378258).epsilon(1e-8));
    CHECK(a.a_b == doctest::Approx(0.2972398694924563).epsilon(1e-8));
}

TEST_CASE("zero bias empties the range-expanded class") {
    for (auto& cfg : {testcfg::validation(0.0, 0.0), testcfg::ratio_config(3.0, -10.0, 0.0, 0.0)})
        CHECK(association_probabilities(cfg).a_b == 0.0);
}

TEST_CASE("probabilities sum to one over a random config grid") {
    mc::Rng rng(1234);
    for (int i = 0; i < 30; ++i) {
        NetworkConfig cfg;
        cfg.tiers = {make_tier(1.0, 46.0, 0.0, rng.uniform(2.5, 5.0)),
                     make_tier(rng.uniform(0.5, 20.0), 46.0 + rng.uniform(-30.0, 0.0),
                               rng.uniform(0.0, 20.0), rng.uniform(2.5, 5.0))};
        cfg.user_density = 100.0;
        cfg.bandwidth_hz = 1e7;
        cfg.eta = 0.4;
        const auto a = association_probabilities(cfg);
        CHECK(std::abs(a.a1 + a.a_bbar + a.a_b - 1.0) < 1e-6);
        CHECK(a.a1 >= 0.0);
        CHECK(a.a_bbar >= 0.0);
        CHECK(a.a_b >= 0.0);
    }
}

TEST_CASE("unbiased small-cell share does not move with bias") {
    for (double bias : {2.5, 7.0, 13.0, 19.0}) {
        auto cfg = testcfg::validation(bias, 0.3);
        const auto a = association_probabilities(cfg);
        const auto base = association_probabilities(testcfg::validation(0.0, 0.3));
        CHECK(a.a_bbar == doctest::Approx(base.a_bbar).epsilon(1e-12));
    }
}

TEST_CASE("macro share falls and offloaded share rises with bias") {
    double prev_a1 = 2.0, prev_ab = -1.0;
    for (double bias : {0.0, 2.5, 5.0, 10.0, 15.0, 20.0}) {
        const auto a = association_probabilities(testcfg::validation(bias, 0.3));
        CHECK(a.a1 < prev_a1);
        CHECK(a.a_b > prev_ab);
        prev_a1 = a.a1;
        prev_ab = a.a_b;
    }
}

TEST_CASE("K-tier weights reduce to the two-tier split") {
    auto cfg = testcfg::validation(10.0, 0.5);
    const auto two = association_probabilities(cfg);
    const auto j2 = ktier_association_probabilities(cfg, 2);
    CHECK(j2.a_bbar == doctest::Approx(two.a_bbar).epsilon(1e-7));
    CHECK(j2.a_b == doctest::Approx(two.a_b).epsilon(1e-7));
    const auto j1 = ktier_association_probabilities(cfg, 1);
    CHECK(j1.a_bbar == doctest::Approx(two.a1).epsilon(1e-7));
    CHECK(j1.a_b == 0.0);
}

TEST_CASE("unbiased K-tier network has no offloaded users anywhere") {
    NetworkConfig cfg = testcfg::validation(0.0, 0.0);
    cfg.tiers.push_back(make_tier(10.0, 20.0, 0.0, 4.0));
    for (int j = 1; j <= 3; ++j) CHECK(ktier_association_probabilities(cfg, j).a_b == 0.0);
}

TEST_CASE("three-tier weights cover the plane") {
    NetworkConfig cfg = testcfg::validation(10.0, 0.5);
    cfg.tiers.push_back(make_tier(10.0, 20.0, 5.0, 4.0));
    double total = 0.0;
    for (int j = 1; j <= 3; ++j) {
        const auto w = ktier_association_probabilities(cfg, j);
        total += w.a_bbar + w.a_b;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
}
