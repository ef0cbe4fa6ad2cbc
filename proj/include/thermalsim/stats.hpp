// stats.hpp
// Small statistics helpers shared by the Monte Carlo modules and their
// diagnostics: Kolmogorov-Smirnov distance, sample moments, least squares.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "thermalsim/core.hpp"

namespace thermalsim {

// Two-sided KS statistic of `samples` against Uniform(0,1).
inline double ks_statistic_uniform(std::vector<double> samples) {
    if (samples.empty()) throw ValidationError("ks_statistic_uniform: no samples");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = std::clamp(samples[i], 0.0, 1.0);
        d = std::max(d, std::abs((static_cast<double>(i) + 1.0) / n - f));
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    }
    return d;
}

// Asymptotic two-sided KS critical value at significance `alpha`.
inline double ks_critical_value(std::size_t n, double alpha) {
    return std::sqrt(-0.5 * std::log(alpha / 2.0)) / std::sqrt(static_cast<double>(n));
}

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;  // population (1/N) unless stated otherwise
};

inline MeanStd mean_std(const std::vector<double>& xs) {
    if (xs.empty()) throw ValidationError("mean_std: no samples");
    double sum = 0.0;
    for (double x : xs) sum += x;
    const double mean = sum / static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / static_cast<double>(xs.size()))};
}

// Least-squares slope of y against x.
inline double regression_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw ValidationError("regression_slope: need matching vectors of length >= 2");
    const double n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw ValidationError("regression_slope: degenerate abscissae");
    return (n * sxy - sx * sy) / denom;
}

}  // namespace thermalsim
