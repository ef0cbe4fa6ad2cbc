// core.hpp
// Shared numeric plumbing: validation tolerances, error types, and the
// uniform-grid cubic interpolant used by the dynamics modules.

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace thermalsim {

using complexd = std::complex<double>;

// Validation tolerances. Defaults are the project-wide named constants;
// callers that need different margins pass a custom instance (the single
// configuration point for validation).
struct Tolerances {
    double hermiticity = 1e-12;  // max |M - M^dagger| entrywise
    double trace = 1e-10;        // |tr(rho) - 1|
    double psd = 1e-10;          // smallest eigenvalue >= -psd
};

// Invalid or inconsistent input (bad dimensions, violated invariants).
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// Failure while computing (non-convergence, instability, domain exit).
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// Piecewise-cubic Hermite (Catmull-Rom) interpolant on a uniform grid.
// Slopes come from central differences (one-sided at the ends), so linear
// and quadratic data are reproduced exactly. C1 everywhere.
class CubicInterpolator {
public:
    CubicInterpolator(double x0, double dx, std::vector<double> values)
        : x0_(x0), dx_(dx), y_(std::move(values)) {
        if (y_.size() < 2) throw ValidationError("CubicInterpolator: need at least 2 samples");
        if (!(dx_ > 0.0)) throw ValidationError("CubicInterpolator: grid spacing must be positive");
        const std::size_t n = y_.size();
        slope_.resize(n);
        slope_[0] = (n >= 3) ? (-3.0 * y_[0] + 4.0 * y_[1] - y_[2]) / (2.0 * dx_)
                             : (y_[1] - y_[0]) / dx_;
        for (std::size_t j = 1; j + 1 < n; ++j)
            slope_[j] = (y_[j + 1] - y_[j - 1]) / (2.0 * dx_);
        slope_[n - 1] = (n >= 3) ? (3.0 * y_[n - 1] - 4.0 * y_[n - 2] + y_[n - 3]) / (2.0 * dx_)
                                 : (y_[n - 1] - y_[n - 2]) / dx_;
    }

    double x_min() const { return x0_; }
    double x_max() const { return x0_ + dx_ * static_cast<double>(y_.size() - 1); }

    bool contains(double x) const {
        const double slack = 1e-9 * dx_;
        return x >= x_min() - slack && x <= x_max() + slack;
    }

    double operator()(double x) const {
        if (!contains(x))
            throw NumericError("CubicInterpolator: query " + std::to_string(x) +
                               " outside grid [" + std::to_string(x_min()) + ", " +
                               std::to_string(x_max()) + "]");
        const std::size_t n = y_.size();
        double s = (x - x0_) / dx_;
        auto j = static_cast<std::ptrdiff_t>(std::floor(s));
        if (j < 0) j = 0;
        if (j > static_cast<std::ptrdiff_t>(n) - 2) j = static_cast<std::ptrdiff_t>(n) - 2;
        const double t = s - static_cast<double>(j);
        const double y0 = y_[j], y1 = y_[j + 1];
        const double m0 = slope_[j] * dx_, m1 = slope_[j + 1] * dx_;
        const double t2 = t * t, t3 = t2 * t;
        return (2.0 * t3 - 3.0 * t2 + 1.0) * y0 + (t3 - 2.0 * t2 + t) * m0 +
               (-2.0 * t3 + 3.0 * t2) * y1 + (t3 - t2) * m1;
    }

private:
    double x0_, dx_;
    std::vector<double> y_;
    std::vector<double> slope_;
};

}  // namespace thermalsim
