#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace hetnet {

inline constexpr double kPi = 3.14159265358979323846;

// dB / dBm conversions. All internal math is linear (mW, unitless ratios);
// conversions happen at configuration boundaries only.
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }
inline double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }
inline double mw_to_dbm(double mw) { return 10.0 * std::log10(mw); }

/// Configuration rejected; `key` names the offending field.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& msg)
        : std::runtime_error(msg), key_(std::move(key)) {}
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

/// Adaptive quadrature failed to reach the requested tolerance.
class NonConvergenceError : public std::runtime_error {
public:
    NonConvergenceError(const std::string& msg, double residual)
        : std::runtime_error(msg + " (estimated residual " + std::to_string(residual) + ")"),
          residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

/// Requested a per-class quantity for a class with zero association probability.
class DegenerateClassError : public std::runtime_error {
public:
    explicit DegenerateClassError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Empirical estimator called with too few samples.
class InsufficientSamplesError : public std::runtime_error {
public:
    explicit InsufficientSamplesError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Resolve a worker count: `requested` <= 0 means hardware concurrency,
/// and the HETNET_THREADS environment variable caps the result.
inline int effective_threads(int requested) {
    int n = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
    if (n < 1) n = 1;
    if (const char* cap = std::getenv("HETNET_THREADS")) {
        const int c = std::atoi(cap);
        if (c >= 1 && c < n) n = c;
    }
    return n;
}

/// Index-sharded parallel loop. Results must be written to slots keyed by `i`
/// so the outcome is independent of scheduling.
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
    threads = threads < 1 ? 1 : threads;
    if (threads == 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int w = 0; w < threads; ++w) {
        pool.emplace_back([&fn, n, w, threads] {
            for (std::size_t i = static_cast<std::size_t>(w); i < n;
                 i += static_cast<std::size_t>(threads))
                fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace hetnet
