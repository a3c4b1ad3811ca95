#pragma once

#include <cmath>
#include <vector>

#include "entrain/types.hpp"

namespace entrain {

/// Composite-Simpson weights for a uniform grid with an even number of
/// segments (k+1 samples).
inline std::vector<double> simpson_weights(int samples, double spacing) {
    const int k = samples - 1;
    if (k < 2 || k % 2 != 0)
        throw std::invalid_argument("Simpson quadrature needs an even segment count");
    std::vector<double> w(samples, 0.0);
    for (int i = 0; i + 2 <= k; i += 2) {
        w[i] += spacing / 3.0;
        w[i + 1] += 4.0 * spacing / 3.0;
        w[i + 2] += spacing / 3.0;
    }
    return w;
}

template <typename F>
double simpson(const F& values_at, int samples, double spacing) {
    const auto w = simpson_weights(samples, spacing);
    double acc = 0.0;
    for (int i = 0; i < samples; ++i) acc += w[i] * values_at(i);
    return acc;
}

/// Least-squares slope of log|y| vs log(x), skipping non-positive entries.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0) || !(std::abs(y[i]) > 0)) continue;
        const double lx = std::log(x[i]);
        const double ly = std::log(std::abs(y[i]));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++n;
    }
    if (n < 2) return std::numeric_limits<double>::quiet_NaN();
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace entrain
