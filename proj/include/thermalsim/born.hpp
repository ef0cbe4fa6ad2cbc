// born.hpp
// Emergence of Born statistics for a qubit, two ways: (A) a stochastic
// environment-signal model satisfying the pointer theorem's hypotheses
// (x_hat -> +inf, y_hat -> -inf, z_hat/x_hat -> 0, limiting u uniform),
// with Monte Carlo outcome tallies; (B) an exact small-universe model
// computing the reduced pointer matrix X^S(t) from a genuine
// qubit (x) environment unitary. Both paths feed the same pointer
// expectation code.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <thread>
#include <vector>

#include "thermalsim/core.hpp"
#include "thermalsim/quantum.hpp"
#include "thermalsim/random.hpp"
#include "thermalsim/stats.hpp"

namespace thermalsim::born {

// Qubit state (p, alpha): rho = [[p, conj(alpha)], [alpha, 1-p]].
// |alpha| <= sqrt(p(1-p)) is exactly positive semidefiniteness.
struct QubitState {
    double p;
    complexd alpha;

    QubitState(double p_, complexd alpha_) : p(p_), alpha(alpha_) {
        if (!(p >= 0.0 && p <= 1.0))
            throw ValidationError("QubitState: p=" + std::to_string(p) + " outside [0,1]");
        const double bound = std::sqrt(p * (1.0 - p));
        const double margin = std::abs(alpha) - bound;
        if (!(margin <= 1e-12))
            throw ValidationError("QubitState: |alpha|=" + std::to_string(std::abs(alpha)) +
                                  " exceeds sqrt(p(1-p))=" + std::to_string(bound) +
                                  " by " + std::to_string(margin));
    }

    DensityOperator density() const {
        Matrix m(2, 2);
        m(0, 0) = p;
        m(0, 1) = std::conj(alpha);
        m(1, 0) = alpha;
        m(1, 1) = 1.0 - p;
        return DensityOperator(std::move(m));
    }
};

inline QubitState validate_qubit(double p, complexd alpha) { return QubitState(p, alpha); }

// Time-indexed environmental pointer entries: X^S(t) = [[x, z*], [z, y]].
struct EnvironmentSignal {
    std::vector<double> times;
    std::vector<double> xhat;
    std::vector<double> yhat;
    std::vector<complexd> zhat;
};

// Generator family for the stochastic environment: linear growth times
// (1 + decaying noise), which satisfies the theorem's hypotheses by
// construction with the uniform u drawn explicitly.
struct EnvironmentTrajectoryModel {
    double growth_rate;     // g > 0
    double noise_scale;     // eta in [0, 1)
    double noise_decay;     // gamma > 0
    double coherence_scale; // zeta >= 0
    double horizon;         // T > 0
    int n_steps;            // >= 2

    EnvironmentTrajectoryModel(double g, double eta, double gamma, double zeta, double t,
                               int steps)
        : growth_rate(g), noise_scale(eta), noise_decay(gamma), coherence_scale(zeta),
          horizon(t), n_steps(steps) {
        if (!(growth_rate > 0.0))
            throw ValidationError("EnvironmentTrajectoryModel: growth rate must be positive");
        if (!(noise_scale >= 0.0 && noise_scale < 1.0))
            throw ValidationError("EnvironmentTrajectoryModel: noise scale must lie in [0,1)");
        if (!(noise_decay > 0.0))
            throw ValidationError("EnvironmentTrajectoryModel: noise decay must be positive");
        if (!(coherence_scale >= 0.0))
            throw ValidationError("EnvironmentTrajectoryModel: coherence scale must be >= 0");
        if (!(horizon > 0.0))
            throw ValidationError("EnvironmentTrajectoryModel: horizon must be positive");
        if (n_steps < 2) throw ValidationError("EnvironmentTrajectoryModel: need >= 2 steps");
    }
};

struct SampledEnvironment {
    EnvironmentSignal signal;
    double u = 0.0;                 // the drawn uniform
    std::size_t rejected_steps = 0; // sign-violating redraws
};

// One realization on the uniform grid t_i in (0, T]:
//   x(t) =  u     g t (1 + eta e^{-gamma t} xi1),
//   y(t) = -(1-u) g t (1 + eta e^{-gamma t} xi2),
//   z(t) = zeta e^{-gamma t} (xi3 + i xi4),
// xi standard Gaussians clamped at +-3; any step with x <= 0 or y >= 0 is
// redrawn and counted. More than 1% rejections means the parameters are
// inconsistent and is an error. Deterministic given the seed.
inline SampledEnvironment sample_environment(const EnvironmentTrajectoryModel& model,
                                             std::uint64_t seed) {
    std::mt19937_64 rng = make_rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto xi = [&]() { return std::clamp(gauss(rng), -3.0, 3.0); };

    SampledEnvironment out;
    do {
        out.u = unif(rng);
    } while (out.u == 0.0);

    const int n = model.n_steps;
    out.signal.times.resize(n);
    out.signal.xhat.resize(n);
    out.signal.yhat.resize(n);
    out.signal.zhat.resize(n);
    const auto max_rejections = static_cast<std::size_t>(0.01 * n);
    for (int i = 0; i < n; ++i) {
        const double t = model.horizon * (i + 1) / n;
        const double decay = model.noise_scale * std::exp(-model.noise_decay * t);
        double fx = 1.0 + decay * xi();
        while (!(fx > 0.0)) {
            if (++out.rejected_steps > max_rejections)
                throw NumericError("sample_environment: rejection rate above 1%, "
                                   "model parameters inconsistent");
            fx = 1.0 + decay * xi();
        }
        double fy = 1.0 + decay * xi();
        while (!(fy > 0.0)) {
            if (++out.rejected_steps > max_rejections)
                throw NumericError("sample_environment: rejection rate above 1%, "
                                   "model parameters inconsistent");
            fy = 1.0 + decay * xi();
        }
        const double zdecay = model.coherence_scale * std::exp(-model.noise_decay * t);
        out.signal.times[i] = t;
        out.signal.xhat[i] = out.u * model.growth_rate * t * fx;
        out.signal.yhat[i] = -(1.0 - out.u) * model.growth_rate * t * fy;
        out.signal.zhat[i] = zdecay * complexd(xi(), xi());
    }
    return out;
}

// Pointer q-expectation Xbar = p x + (1-p) y + 2 Re(conj(alpha) z),
// i.e. tr(rho^S X^S) for the entry layout above.
inline double pointer_expectation(const QubitState& qubit, double xhat, double yhat,
                                  complexd zhat) {
    return qubit.p * xhat + (1.0 - qubit.p) * yhat +
           2.0 * (std::conj(qubit.alpha) * zhat).real();
}

// Same value in the theorem's factored form x (1 - (1-p)/u + 2 Re(conj(alpha) v))
// with u = x/(x-y), v = z/x. Requires x != 0.
inline double pointer_expectation_factored(const QubitState& qubit, double xhat, double yhat,
                                           complexd zhat) {
    if (xhat == 0.0) throw ValidationError("pointer_expectation_factored: x must be nonzero");
    const double u = xhat / (xhat - yhat);
    const complexd v = zhat / xhat;
    return xhat *
           (1.0 - (1.0 - qubit.p) / u + 2.0 * (std::conj(qubit.alpha) * v).real());
}

// Pointer record: Xbar_t plus the theorem's diagnostics u_hat, v_hat.
struct PointerTrajectory {
    std::vector<double> times;
    std::vector<double> xbar;
    std::vector<double> u_hat;
    std::vector<complexd> v_hat;
};

inline PointerTrajectory pointer_trajectory(const QubitState& qubit,
                                            const EnvironmentSignal& env) {
    const std::size_t n = env.times.size();
    if (env.xhat.size() != n || env.yhat.size() != n || env.zhat.size() != n)
        throw ValidationError("pointer_trajectory: signal field lengths disagree");
    PointerTrajectory out;
    out.times = env.times;
    out.xbar.resize(n);
    out.u_hat.resize(n);
    out.v_hat.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.xbar[i] = pointer_expectation(qubit, env.xhat[i], env.yhat[i], env.zhat[i]);
        out.u_hat[i] = env.xhat[i] / (env.xhat[i] - env.yhat[i]);
        out.v_hat[i] = env.zhat[i] / env.xhat[i];
    }
    return out;
}

enum class Outcome { Plus, Minus, Undecided };

// Finite-horizon surrogate for the t -> inf limit: sign of the final Xbar
// beyond the threshold.
inline Outcome classify_outcome(const PointerTrajectory& traj, double threshold) {
    if (!(threshold > 0.0)) throw ValidationError("classify_outcome: threshold must be positive");
    if (traj.xbar.empty()) throw ValidationError("classify_outcome: empty trajectory");
    const double final_value = traj.xbar.back();
    if (final_value > threshold) return Outcome::Plus;
    if (final_value < -threshold) return Outcome::Minus;
    return Outcome::Undecided;
}

struct OutcomeTally {
    std::size_t n_plus = 0;
    std::size_t n_minus = 0;
    std::size_t n_undecided = 0;
    std::size_t n_total = 0;
    double u_ks_statistic = 0.0;     // final u_hat sample vs Uniform(0,1)
    bool undecided_warning = false;  // undecided fraction above 5%
    std::vector<double> final_u;     // uniformity diagnostic sample
    // Empirical preparation-averaged pointer entries at the horizon.
    double x_eff = 0.0;
    double y_eff = 0.0;
    complexd z_eff{0.0, 0.0};

    double plus_fraction_decided() const {
        const std::size_t decided = n_plus + n_minus;
        if (decided == 0) throw NumericError("OutcomeTally: no decided runs");
        return static_cast<double>(n_plus) / static_cast<double>(decided);
    }
};

// Monte Carlo over independent runs (counter-based substream per run);
// reproducible for a given master seed and independent of thread count.
inline OutcomeTally born_statistics(const QubitState& qubit,
                                    const EnvironmentTrajectoryModel& model, std::size_t n_runs,
                                    double threshold, std::uint64_t seed,
                                    unsigned n_threads = 1) {
    if (n_runs < 1) throw ValidationError("born_statistics: need at least one run");
    if (!(threshold > 0.0)) throw ValidationError("born_statistics: threshold must be positive");

    std::vector<Outcome> outcomes(n_runs);
    std::vector<double> final_u(n_runs);
    std::vector<double> final_x(n_runs), final_y(n_runs);
    std::vector<complexd> final_z(n_runs);

    auto worker = [&](std::size_t begin, std::size_t end) {
        for (std::size_t r = begin; r < end; ++r) {
            const SampledEnvironment env = sample_environment(model, substream_seed(seed, r));
            const PointerTrajectory traj = pointer_trajectory(qubit, env.signal);
            outcomes[r] = classify_outcome(traj, threshold);
            final_u[r] = traj.u_hat.back();
            final_x[r] = env.signal.xhat.back();
            final_y[r] = env.signal.yhat.back();
            final_z[r] = env.signal.zhat.back();
        }
    };

    const unsigned workers = std::max(1u, n_threads);
    if (workers == 1 || n_runs < 2 * workers) {
        worker(0, n_runs);
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (n_runs + workers - 1) / workers;
        for (unsigned w = 0; w < workers; ++w) {
            const std::size_t b = w * chunk;
            const std::size_t e = std::min(n_runs, b + chunk);
            if (b < e) pool.emplace_back(worker, b, e);
        }
        for (auto& th : pool) th.join();
    }

    OutcomeTally tally;
    tally.n_total = n_runs;
    for (std::size_t r = 0; r < n_runs; ++r) {
        switch (outcomes[r]) {
            case Outcome::Plus: ++tally.n_plus; break;
            case Outcome::Minus: ++tally.n_minus; break;
            case Outcome::Undecided: ++tally.n_undecided; break;
        }
        tally.x_eff += final_x[r];
        tally.y_eff += final_y[r];
        tally.z_eff += final_z[r];
    }
    tally.x_eff /= static_cast<double>(n_runs);
    tally.y_eff /= static_cast<double>(n_runs);
    tally.z_eff /= static_cast<double>(n_runs);
    tally.final_u = std::move(final_u);
    tally.u_ks_statistic = ks_statistic_uniform(tally.final_u);
    tally.undecided_warning =
        tally.n_undecided * 20 > tally.n_total;  // fraction above 5%
    return tally;
}

// Exact model: a qubit coupled to a finite environment with universe
// Hamiltonian H on C^2 (x) C^dim_env, environment state rho^E and probe
// quantity X^E.
struct SmallUniverse {
    HermitianOperator h_universe;
    DensityOperator rho_env;
    HermitianOperator x_env;
    double hbar;

    SmallUniverse(HermitianOperator h, DensityOperator env, HermitianOperator x, double hb)
        : h_universe(std::move(h)), rho_env(std::move(env)), x_env(std::move(x)), hbar(hb) {
        if (!(hbar > 0.0)) throw ValidationError("SmallUniverse: hbar must be positive");
        if (rho_env.dim() < 2) throw ValidationError("SmallUniverse: environment dim must be >= 2");
        if (rho_env.dim() != x_env.dim())
            throw ValidationError("SmallUniverse: environment operator dims disagree");
        if (h_universe.dim() != 2 * rho_env.dim())
            throw ValidationError("SmallUniverse: universe dim must be 2 x environment dim");
    }

    Eigen::Index dim_env() const { return rho_env.dim(); }
};

// X^S(t)_{jk} = sum_l tr_E[ rho^E U_{lj}(t)^* X^E U_{lk}(t) ], where U_{lk}
// are the system-indexed blocks of U(t) = exp(-itH/hbar).
inline HermitianOperator reduced_pointer_matrix(const SmallUniverse& universe, double t) {
    const Eigen::Index de = universe.dim_env();
    const Eigendecomposition eig = eigendecompose(universe.h_universe);
    Vector phases(2 * de);
    for (Eigen::Index k = 0; k < 2 * de; ++k)
        phases(k) = std::exp(complexd(0.0, -eig.eigenvalues(k) * t / universe.hbar));
    const Matrix u = eig.eigenvectors * phases.asDiagonal() * eig.eigenvectors.adjoint();

    Matrix xs = Matrix::Zero(2, 2);
    for (Eigen::Index l = 0; l < 2; ++l)
        for (Eigen::Index j = 0; j < 2; ++j)
            for (Eigen::Index k = 0; k < 2; ++k) {
                const Matrix m = u.block(l * de, j * de, de, de).adjoint() *
                                 universe.x_env.matrix() * u.block(l * de, k * de, de, de);
                xs(j, k) += (universe.rho_env.matrix() * m).trace();
            }
    return HermitianOperator(std::move(xs), Tolerances{.hermiticity = 1e-10});
}

// Entries of X^S(t) on a time grid, as an EnvironmentSignal so the exact
// path reuses the stochastic path's pointer code: x = X^S_11, y = X^S_22,
// z = X^S_21.
inline EnvironmentSignal small_universe_diagnostics(const SmallUniverse& universe,
                                                    const std::vector<double>& t_grid) {
    EnvironmentSignal out;
    out.times = t_grid;
    out.xhat.reserve(t_grid.size());
    for (double t : t_grid) {
        const HermitianOperator xs = reduced_pointer_matrix(universe, t);
        out.xhat.push_back(xs.matrix()(0, 0).real());
        out.yhat.push_back(xs.matrix()(1, 1).real());
        out.zhat.push_back(xs.matrix()(1, 0));
    }
    return out;
}

// Random coupled universe: local terms plus a GUE interaction of the given
// strength. The default environment size 8 already shows the decay of z.
inline SmallUniverse random_small_universe(Eigen::Index dim_env, double coupling,
                                           std::uint64_t seed, double hbar = 1.0) {
    if (dim_env < 2) throw ValidationError("random_small_universe: dim_env must be >= 2");
    std::mt19937_64 rng = make_rng(seed);
    const HermitianOperator hs = random_hermitian(2, rng);
    const HermitianOperator he = random_hermitian(dim_env, rng);
    const HermitianOperator hint = random_hermitian(2 * dim_env, rng);
    const Matrix h = tensor(hs, HermitianOperator::identity(dim_env)).matrix() +
                     tensor(HermitianOperator::identity(2), he).matrix() +
                     coupling * hint.matrix();
    return SmallUniverse(HermitianOperator(h), random_density(dim_env, rng),
                         random_hermitian(dim_env, rng), hbar);
}

}  // namespace thermalsim::born
