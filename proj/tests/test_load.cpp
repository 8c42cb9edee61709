#include <doctest.h>

#include <cmath>

#include "hetnet/load.hpp"
#include "test_configs.hpp"

using namespace hetnet;

namespace {

// Direct-summation oracle on the untruncated series, via the same recurrence
// the production code uses but run far past any truncation point.
double series_sum(double mu, int upto, bool weighted) {
    double p = std::pow(3.5, 4.5) * std::pow(3.5 + mu, -4.5);
    const double r = mu / (3.5 + mu);
    double s = 0.0;
    for (int n = 1; n <= upto; ++n) {
        s += weighted ? n * p : p;
        p *= (n + 3.5) / n * r;
    }
    return s;
}

}  // namespace

TEST_CASE("vanishing user density concentrates the load at one") {
    const auto pmf = load_pmf_from_mean_ratio(1e-12, UserClass::Macro);
    CHECK(pmf.p(1) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(pmf.mean() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("untruncated series is normalized and has the stated mean") {
    for (double mu : {0.3, 2.0, 10.0, 40.0}) {
        CHECK(series_sum(mu, 4000, false) == doctest::Approx(1.0).epsilon(1e-8));
        const double mean = series_sum(mu, 4000, true);
        CHECK(mean == doctest::Approx(1.0 + mu * 4.5 / 3.5).epsilon(1e-6));
    }
}

TEST_CASE("frozen masses at mean ratio 10") {
    const auto pmf = load_pmf_from_mean_ratio(10.0, UserClass::SmallUnbiased);
    CHECK(pmf.p(1) == doctest::Approx(0.0023004046740819).epsilon(1e-10));
    CHECK(pmf.p(2) == doctest::Approx(0.0076680155802731).epsilon(1e-10));
    CHECK(pmf.p(3) == doctest::Approx(0.0156200317375933).epsilon(1e-10));
    CHECK(pmf.mean() == doctest::Approx(13.857142857142858).epsilon(1e-3));
}

TEST_CASE("truncation tail stays below the target when the cap is slack") {
    for (double mu : {0.5, 3.0, 5.0}) {
        const auto pmf = load_pmf_from_mean_ratio(mu, UserClass::Macro);
        CHECK(pmf.tail_mass <= 1e-6);
        double sum = 0.0;
        for (int n = 1; n <= pmf.n_max(); ++n) sum += pmf.p(n);
        CHECK(sum + pmf.tail_mass == doctest::Approx(1.0).epsilon(1e-12));
    }
    // beyond mu ~ 6 the documented hard cap binds first; the tail is then
    // reported rather than driven below the target
    const auto capped = load_pmf_from_mean_ratio(8.0, UserClass::Macro);
    CHECK(capped.n_max() == 50);
    CHECK(capped.tail_mass > 1e-6);
    CHECK(capped.tail_mass < 1e-4);
}

TEST_CASE("mean load uses the 1.28 area moment") {
    auto cfg = testcfg::ratio_config(5.0, -20.0, 10.0, 0.5);
    const auto assoc = association_probabilities(cfg);
    // a) direct substitution at mean ratio 10
    CHECK(1.0 + 1.28 * 10.0 == doctest::Approx(13.8));
    // b) macro class of the equal-exponent scenario: 1 + 1.28*100*A_1/1
    CHECK(mean_load(cfg, assoc, UserClass::Macro) ==
          doctest::Approx(1.0 + 1.28 * 100.0 * 0.3874258867227931).epsilon(1e-9));
    CHECK(mean_load(cfg, assoc, UserClass::Macro) == doctest::Approx(50.6).epsilon(2e-3));
}

TEST_CASE("degenerate class is rejected") {
    auto cfg = testcfg::validation(0.0, 0.5);
    CHECK_THROWS_AS(load_pmf(cfg, UserClass::Offloaded), DegenerateClassError);
    // mean_load itself is total: A = 0 gives the bare typical user
    CHECK(mean_load(cfg, association_probabilities(cfg), UserClass::Offloaded) == 1.0);
}
