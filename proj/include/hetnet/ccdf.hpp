#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace hetnet {

/// A coverage curve: P(metric > threshold) over an ascending threshold grid.
/// Analytic curves leave `ci_halfwidth` empty; empirical ones carry the 95%
/// normal-approximation halfwidth per point.
struct CcdfCurve {
    enum class Kind { Sinr, Rate };
    Kind kind = Kind::Rate;
    std::vector<double> thresholds;
    std::vector<double> values;
    std::vector<double> ci_halfwidth;
};

/// Threshold grids. `scale` is "linear", "log", or "db" (linear steps in dB,
/// returned in linear units).
inline std::vector<double> make_threshold_grid(double start, double stop, int points,
                                               const std::string& scale) {
    if (points < 1) throw std::invalid_argument("threshold grid needs at least one point");
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(points));
    if (points == 1) {
        out.push_back(start);
        return out;
    }
    for (int i = 0; i < points; ++i) {
        const double f = static_cast<double>(i) / (points - 1);
        if (scale == "linear") {
            out.push_back(start + f * (stop - start));
        } else if (scale == "log") {
            if (!(start > 0.0 && stop > 0.0))
                throw std::invalid_argument("log threshold grid needs positive bounds");
            out.push_back(start * std::pow(stop / start, f));
        } else if (scale == "db") {
            out.push_back(std::pow(10.0, (start + f * (stop - start)) / 10.0));
        } else {
            throw std::invalid_argument("unknown threshold scale: " + scale);
        }
    }
    return out;
}

}  // namespace hetnet
