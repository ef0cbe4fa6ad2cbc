// detectors.hpp
// Detector and ensemble statistics: the dual (q-expectation vs nearest
// eigenvalue) error ledgers, the two-level energy truth values, quantized
// bucket counting, the bistable double-well Langevin pointer, and
// Stern-Gerlach ensemble statistics.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "thermalsim/core.hpp"
#include "thermalsim/quantum.hpp"
#include "thermalsim/random.hpp"

namespace thermalsim::detectors {

// Repeated display readings: distinct values with their multiplicities.
struct MeasurementRecord {
    std::vector<double> values;      // strictly ascending
    std::vector<std::int64_t> counts;

    MeasurementRecord(std::vector<double> v, std::vector<std::int64_t> c)
        : values(std::move(v)), counts(std::move(c)) {
        if (values.empty() || values.size() != counts.size())
            throw ValidationError("MeasurementRecord: values/counts must be nonempty and match");
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i > 0 && !(values[i] > values[i - 1]))
                throw ValidationError("MeasurementRecord: values must be strictly ascending");
            if (counts[i] < 1) throw ValidationError("MeasurementRecord: counts must be >= 1");
        }
    }

    std::int64_t total() const {
        std::int64_t n = 0;
        for (auto c : counts) n += c;
        return n;
    }
};

struct Summary {
    double mean;
    double std;        // population (1/N) by default
    double std_error;  // std / sqrt(N)
};

// Count-weighted mean and standard deviation. Population normalization by
// default; `sample` switches to 1/(N-1).
inline Summary summarize(const MeasurementRecord& record, bool sample = false) {
    const double n = static_cast<double>(record.total());
    double mean = 0.0;
    for (std::size_t i = 0; i < record.values.size(); ++i)
        mean += record.values[i] * static_cast<double>(record.counts[i]);
    mean /= n;
    double ss = 0.0;
    for (std::size_t i = 0; i < record.values.size(); ++i) {
        const double d = record.values[i] - mean;
        ss += d * d * static_cast<double>(record.counts[i]);
    }
    if (sample && n < 2.0) throw ValidationError("summarize: sample std needs N >= 2");
    const double var = sample ? ss / (n - 1.0) : ss / n;
    const double std = std::sqrt(var);
    return {mean, std, std / std::sqrt(n)};
}

// The same observations split two ways: against the q-expectation (single
// true value) and against the nearest eigenvalue.
struct ErrorLedger {
    double thermal_true_value;
    std::vector<double> thermal_errors;
    std::vector<double> born_eigenvalues;
    std::vector<double> born_errors;
    double mean_thermal_error = 0.0;
    double mean_born_error = 0.0;

    void validate() const {
        if (thermal_errors.size() != born_errors.size())
            throw ValidationError("ErrorLedger: error vectors disagree");
        const double spread =
            born_eigenvalues.empty()
                ? 0.0
                : born_eigenvalues.back() - born_eigenvalues.front();
        for (std::size_t i = 0; i < thermal_errors.size(); ++i) {
            if (thermal_errors[i] < 0.0 || born_errors[i] < 0.0)
                throw ValidationError("ErrorLedger: negative error");
            if (born_errors[i] > thermal_errors[i] + spread + 1e-12)
                throw ValidationError("ErrorLedger: nearest-eigenvalue error exceeds sanity bound");
        }
    }
};

inline ErrorLedger dual_error_ledger(const std::vector<double>& observations,
                                     const DensityOperator& rho, const HermitianOperator& a) {
    const double true_value = q_expectation(rho, a);
    const Eigendecomposition eig = eigendecompose(a);
    ErrorLedger ledger;
    ledger.thermal_true_value = true_value;
    ledger.born_eigenvalues.assign(eig.eigenvalues.data(),
                                   eig.eigenvalues.data() + eig.eigenvalues.size());
    ledger.thermal_errors.reserve(observations.size());
    for (double obs : observations) {
        ledger.thermal_errors.push_back(std::abs(obs - true_value));
        double nearest = std::abs(obs - ledger.born_eigenvalues[0]);
        for (double lam : ledger.born_eigenvalues) nearest = std::min(nearest, std::abs(obs - lam));
        ledger.born_errors.push_back(nearest);
    }
    if (!observations.empty()) {
        for (double e : ledger.thermal_errors) ledger.mean_thermal_error += e;
        for (double e : ledger.born_errors) ledger.mean_born_error += e;
        ledger.mean_thermal_error /= static_cast<double>(observations.size());
        ledger.mean_born_error /= static_cast<double>(observations.size());
    }
    ledger.validate();
    return ledger;
}

struct EnergyTruth {
    double mean;
    double sigma;
};

// Two-level system in a superposition with weights p, 1-p:
// Ebar = p E1 + (1-p) E2, sigma_E = sqrt(p(1-p)) |E1 - E2|.
inline EnergyTruth two_level_energy_truth(double p, double e1, double e2) {
    if (!(p >= 0.0 && p <= 1.0))
        throw ValidationError("two_level_energy_truth: p outside [0,1]");
    return {p * e1 + (1.0 - p) * e2, std::sqrt(p * (1.0 - p)) * std::abs(e1 - e2)};
}

struct BucketResult {
    std::int64_t count;
    double rate_estimate;  // count * bucket_size / duration
};

// Counting detector: integer buckets of a Poisson flow. The count is the
// only observable; fractional flow is invisible.
inline BucketResult bucket_count(double rate, double duration, double bucket_size,
                                 std::uint64_t seed) {
    if (!(rate > 0.0 && duration > 0.0 && bucket_size > 0.0))
        throw ValidationError("bucket_count: rate, duration and bucket size must be positive");
    const double mean = rate * duration / bucket_size;
    if (mean > 1e9) throw ValidationError("bucket_count: expected count above 1e9");
    std::mt19937_64 rng = make_rng(seed);
    std::poisson_distribution<std::int64_t> poisson(mean);
    const std::int64_t count = poisson(rng);
    return {count, static_cast<double>(count) * bucket_size / duration};
}

// Overdamped diffusion in W(x) = a (x^2 - 1)^2 at temperature theta.
struct DoubleWellParams {
    double barrier;            // a > 0
    double noise_temperature;  // theta > 0
    double time_step;          // dt
    int n_steps;

    DoubleWellParams(double a, double theta, double dt, int steps)
        : barrier(a), noise_temperature(theta), time_step(dt), n_steps(steps) {
        if (!(barrier > 0.0)) throw ValidationError("DoubleWellParams: barrier must be positive");
        // theta = 0 is the deterministic gradient-flow limit
        if (!(noise_temperature >= 0.0))
            throw ValidationError("DoubleWellParams: temperature must be nonnegative");
        if (!(time_step > 0.0)) throw ValidationError("DoubleWellParams: dt must be positive");
        if (n_steps < 1) throw ValidationError("DoubleWellParams: need at least one step");
        // Stability heuristic: dt * max |W''| over |x| <= 1.5.
        const double max_slope = 4.0 * barrier * (3.0 * 1.5 * 1.5 - 1.0);
        if (!(time_step * max_slope < 0.5))
            throw ValidationError("DoubleWellParams: dt=" + std::to_string(time_step) +
                                  " too large for barrier " + std::to_string(barrier) +
                                  " (dt * max|W''| must stay below 0.5)");
    }
};

// Euler-Maruyama path of dx = -W'(x) dt + sqrt(2 theta) dB from x0.
// Returns n_steps + 1 samples including x0.
inline std::vector<double> double_well_pointer(const DoubleWellParams& params, double x0,
                                               std::uint64_t seed) {
    std::mt19937_64 rng = make_rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double dt = params.time_step;
    const double noise = std::sqrt(2.0 * params.noise_temperature * dt);
    std::vector<double> samples;
    samples.reserve(params.n_steps + 1);
    samples.push_back(x0);
    double x = x0;
    for (int s = 0; s < params.n_steps; ++s) {
        const double drift = -4.0 * params.barrier * x * (x * x - 1.0);
        x += drift * dt + noise * gauss(rng);
        if (std::abs(x) > 10.0)
            throw NumericError("double_well_pointer: path diverged at step " + std::to_string(s));
        samples.push_back(x);
    }
    return samples;
}

struct SpinEnsembleResult {
    std::size_t n;
    std::vector<int> outcomes;  // each +-1
    double mean;
    double std_of_mean;  // theoretical sqrt(1 - s^2) / sqrt(N)

    void validate() const {
        if (outcomes.size() != n) throw ValidationError("SpinEnsembleResult: size mismatch");
        double sum = 0.0;
        for (int o : outcomes) {
            if (o != 1 && o != -1) throw ValidationError("SpinEnsembleResult: outcome not +-1");
            sum += o;
        }
        if (mean != sum / static_cast<double>(n))
            throw ValidationError("SpinEnsembleResult: mean is not the exact sample mean");
    }
};

// N binary outcomes with P(+1) = (1 + s)/2, the unique distribution on
// {-1, +1} whose mean is s.
inline SpinEnsembleResult stern_gerlach_ensemble(double s_mean, std::size_t n,
                                                 std::uint64_t seed) {
    if (!(s_mean >= -1.0 && s_mean <= 1.0))
        throw ValidationError("stern_gerlach_ensemble: mean spin outside [-1,1]");
    if (n < 1) throw ValidationError("stern_gerlach_ensemble: need at least one outcome");
    std::mt19937_64 rng = make_rng(seed);
    std::bernoulli_distribution up((1.0 + s_mean) / 2.0);
    SpinEnsembleResult result;
    result.n = n;
    result.outcomes.reserve(n);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const int o = up(rng) ? 1 : -1;
        result.outcomes.push_back(o);
        sum += o;
    }
    result.mean = sum / static_cast<double>(n);
    result.std_of_mean = std::sqrt(1.0 - s_mean * s_mean) / std::sqrt(static_cast<double>(n));
    result.validate();
    return result;
}

// Combined pointer variable: left events count -1, right events +1; the
// mean approximates the q-expectation in [-1, 1].
inline double sg_pointer_tally(const std::vector<int>& outcomes) {
    if (outcomes.empty()) throw ValidationError("sg_pointer_tally: no outcomes");
    double sum = 0.0;
    for (int o : outcomes) {
        if (o != 1 && o != -1) throw ValidationError("sg_pointer_tally: outcome not +-1");
        sum += o;
    }
    return sum / static_cast<double>(outcomes.size());
}

}  // namespace thermalsim::detectors
