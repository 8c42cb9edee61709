#pragma once

#include "hetnet/config.hpp"

namespace testcfg {

// Validation scenario used across the suite: lambda1 = 1, lambda2 = 5 /km^2,
// lambda_u = 100 /km^2, alpha1 = 3.5, alpha2 = 4, P1 = 46 dBm, P2 = 26 dBm,
// sigma^2 = -10 dBm, W = 10 MHz.
inline hetnet::NetworkConfig validation(double bias_db, double eta) {
    hetnet::NetworkConfig cfg;
    cfg.tiers = {hetnet::make_tier(1.0, 46.0, 0.0, 3.5),
                 hetnet::make_tier(5.0, 26.0, bias_db, 4.0)};
    cfg.user_density = 100.0;
    cfg.bandwidth_hz = 10e6;
    cfg.noise_mw = hetnet::dbm_to_mw(-10.0);
    cfg.eta = eta;
    return cfg;
}

// Interference-limited equal-exponent scenario parameterized by the ratio
// triple (a, p, b); exponent 4 everywhere, no noise.
inline hetnet::NetworkConfig ratio_config(double a, double p_db, double bias_db, double eta,
                                          double ple = 4.0) {
    hetnet::NetworkConfig cfg;
    cfg.tiers = {hetnet::make_tier(1.0, 46.0, 0.0, ple),
                 hetnet::make_tier(a, 46.0 + p_db, bias_db, ple)};
    cfg.user_density = 100.0;
    cfg.bandwidth_hz = 10e6;
    cfg.noise_mw = 0.0;
    cfg.eta = eta;
    return cfg;
}

}  // namespace testcfg
