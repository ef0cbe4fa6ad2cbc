// ehrenfest.hpp
// Discretized 1-D quantum dynamics on a uniform grid with hard walls:
// q-expectation trajectories, a classical reference integrator, the
// second-moment approximation bound, and the classicality deviation
// |m qbar'' + V'(qbar)| vs its sigma_q^2 bound.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "thermalsim/core.hpp"
#include "thermalsim/quantum.hpp"

namespace thermalsim::ehrenfest {

// One degree of freedom in a box: uniform grid including both endpoints,
// hard (Dirichlet) walls one spacing outside them.
struct GridSystem {
    int n_points;
    double x_min;
    double x_max;
    double mass;
    double hbar;
    std::vector<double> potential;  // V sampled on the grid

    GridSystem(int n, double xmin, double xmax, double m, double hb, std::vector<double> v)
        : n_points(n), x_min(xmin), x_max(xmax), mass(m), hbar(hb), potential(std::move(v)) {
        if (n_points < 16) throw ValidationError("GridSystem: need at least 16 grid points");
        if (!(x_max > x_min)) throw ValidationError("GridSystem: x_max must exceed x_min");
        if (!(mass > 0.0)) throw ValidationError("GridSystem: mass must be positive");
        if (!(hbar > 0.0)) throw ValidationError("GridSystem: hbar must be positive");
        if (potential.size() != static_cast<std::size_t>(n_points))
            throw ValidationError("GridSystem: potential has " + std::to_string(potential.size()) +
                                  " samples, expected " + std::to_string(n_points));
    }

    double spacing() const { return (x_max - x_min) / (n_points - 1); }
    double point(int j) const { return x_min + spacing() * j; }

    CubicInterpolator potential_interpolator() const {
        return CubicInterpolator(x_min, spacing(), potential);
    }

    // Central-difference gradient of the sampled potential, one-sided at
    // the ends, wrapped in the cubic interpolant.
    CubicInterpolator gradient_interpolator() const {
        const double h = spacing();
        const int n = n_points;
        std::vector<double> g(n);
        g[0] = (-3.0 * potential[0] + 4.0 * potential[1] - potential[2]) / (2.0 * h);
        for (int j = 1; j + 1 < n; ++j) g[j] = (potential[j + 1] - potential[j - 1]) / (2.0 * h);
        g[n - 1] =
            (3.0 * potential[n - 1] - 4.0 * potential[n - 2] + potential[n - 3]) / (2.0 * h);
        return CubicInterpolator(x_min, h, std::move(g));
    }
};

struct GridOperators {
    HermitianOperator hamiltonian;
    HermitianOperator position;
    HermitianOperator momentum;
};

// H = -hbar^2/(2m) (second difference) + diag(V), P = central first
// difference, Q = diag(grid). Dirichlet walls: no terms beyond the edges.
inline GridOperators build_operators(const GridSystem& sys) {
    const int n = sys.n_points;
    const double h = sys.spacing();
    const double kin = sys.hbar * sys.hbar / (2.0 * sys.mass * h * h);

    Matrix hmat = Matrix::Zero(n, n);
    Matrix qmat = Matrix::Zero(n, n);
    Matrix pmat = Matrix::Zero(n, n);
    const complexd coef(0.0, -sys.hbar / (2.0 * h));
    for (int j = 0; j < n; ++j) {
        qmat(j, j) = sys.point(j);
        hmat(j, j) = 2.0 * kin + sys.potential[j];
        if (j + 1 < n) {
            hmat(j, j + 1) = -kin;
            hmat(j + 1, j) = -kin;
            pmat(j, j + 1) = coef;
            pmat(j + 1, j) = -coef;
        }
    }
    return {HermitianOperator(std::move(hmat)), HermitianOperator(std::move(qmat)),
            HermitianOperator(std::move(pmat))};
}

// Normalized Gaussian packet exp(-(x-center)^2/(4 sigma^2) + i p0 x / hbar)
// sampled on the grid.
inline PureState gaussian_packet(const GridSystem& sys, double center, double sigma,
                                 double momentum) {
    if (!(sigma > 0.0)) throw ValidationError("gaussian_packet: width must be positive");
    Vector v(sys.n_points);
    for (int j = 0; j < sys.n_points; ++j) {
        const double x = sys.point(j);
        const double arg = -(x - center) * (x - center) / (4.0 * sigma * sigma);
        v(j) = std::exp(complexd(arg, momentum * x / sys.hbar));
    }
    v /= v.norm();
    return PureState(std::move(v));
}

// q-expectation record of one evolved packet. sigma products are checked
// against the discrete Robertson floor |<[Q,P]>|/2 (which -> hbar/2 as the
// grid refines); `heisenberg_floor` carries that per-time bound.
struct ExpectationTrajectory {
    std::vector<double> times;
    std::vector<double> q_mean;
    std::vector<double> p_mean;
    std::vector<double> sigma_q;
    std::vector<double> sigma_p;
    std::vector<double> heisenberg_floor;
    double ehrenfest_residual = 0.0;  // max relative |d<q>/dt - <p>/m|
    bool boundary_contaminated = false;

    void validate() const {
        const std::size_t n = times.size();
        if (q_mean.size() != n || p_mean.size() != n || sigma_q.size() != n ||
            sigma_p.size() != n || heisenberg_floor.size() != n)
            throw ValidationError("ExpectationTrajectory: field lengths disagree");
        for (std::size_t i = 0; i < n; ++i) {
            if (i > 0 && !(times[i] > times[i - 1]))
                throw ValidationError("ExpectationTrajectory: times not ascending");
            if (sigma_q[i] < 0.0 || sigma_p[i] < 0.0)
                throw ValidationError("ExpectationTrajectory: negative uncertainty");
            if (sigma_q[i] * sigma_p[i] < heisenberg_floor[i] - 1e-8)
                throw ValidationError("ExpectationTrajectory: uncertainty product " +
                                      std::to_string(sigma_q[i] * sigma_p[i]) +
                                      " below Robertson floor " +
                                      std::to_string(heisenberg_floor[i]) + " at t=" +
                                      std::to_string(times[i]));
        }
    }
};

struct ClassicalTrajectory {
    std::vector<double> times;
    std::vector<double> q;
    std::vector<double> p;
};

namespace detail {

// Max relative deviation of the finite-difference d<q>/dt from <p>/m.
// Five-point stencil on uniform grids (three-point at the edges); plain
// central differences when the grid is non-uniform.
inline double ehrenfest_identity_residual(const std::vector<double>& t,
                                          const std::vector<double>& q,
                                          const std::vector<double>& p, double mass) {
    const std::size_t n = t.size();
    if (n < 3) return 0.0;
    double scale = 1e-12;
    for (double v : p) scale = std::max(scale, std::abs(v) / mass);
    const double dt = t[1] - t[0];
    bool uniform = true;
    for (std::size_t i = 1; i < n; ++i)
        if (std::abs(t[i] - t[i - 1] - dt) > 1e-9 * dt) uniform = false;
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        double dq;
        if (uniform && i >= 2 && i + 2 < n)
            dq = (q[i - 2] - 8.0 * q[i - 1] + 8.0 * q[i + 1] - q[i + 2]) / (12.0 * dt);
        else
            dq = (q[i + 1] - q[i - 1]) / (t[i + 1] - t[i - 1]);
        worst = std::max(worst, std::abs(dq - p[i] / mass) / scale);
    }
    return worst;
}

}  // namespace detail

// Exact (eigendecomposition-based) evolution of psi0 under the grid
// Hamiltonian, recording <q>, <p>, sigma_q, sigma_p on t_grid. The grid
// Hamiltonian is real symmetric, so the solve and the per-time transforms
// run in real arithmetic.
inline ExpectationTrajectory quantum_expectation_trajectory(const GridSystem& sys,
                                                            const PureState& psi0,
                                                            const std::vector<double>& t_grid) {
    if (psi0.dim() != sys.n_points)
        throw ValidationError("quantum_expectation_trajectory: state dimension " +
                              std::to_string(psi0.dim()) + " does not match grid " +
                              std::to_string(sys.n_points));
    if (t_grid.empty() || t_grid.front() != 0.0)
        throw ValidationError("quantum_expectation_trajectory: time grid must start at 0");

    const int n = sys.n_points;
    const double h = sys.spacing();
    const double kin = sys.hbar * sys.hbar / (2.0 * sys.mass * h * h);
    Eigen::MatrixXd hmat = Eigen::MatrixXd::Zero(n, n);
    for (int j = 0; j < n; ++j) {
        hmat(j, j) = 2.0 * kin + sys.potential[j];
        if (j + 1 < n) {
            hmat(j, j + 1) = -kin;
            hmat(j + 1, j) = -kin;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(hmat);
    if (solver.info() != Eigen::Success)
        throw NumericError("quantum_expectation_trajectory: eigensolver failed");
    const Eigen::MatrixXd& basis = solver.eigenvectors();
    const Eigen::VectorXd& energy = solver.eigenvalues();

    const Eigen::VectorXd c_re = basis.transpose() * psi0.amplitudes().real();
    const Eigen::VectorXd c_im = basis.transpose() * psi0.amplitudes().imag();

    ExpectationTrajectory traj;
    traj.times = t_grid;
    traj.q_mean.reserve(t_grid.size());

    Eigen::VectorXd rot_re(n), rot_im(n), psi_re(n), psi_im(n);
    const double half_hbar_over_h = sys.hbar / (2.0 * h);
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        if (i > 0 && !(t_grid[i] > t_grid[i - 1]))
            throw ValidationError("quantum_expectation_trajectory: time grid not ascending");
        for (int k = 0; k < n; ++k) {
            const double theta = energy(k) * t_grid[i] / sys.hbar;
            const double c = std::cos(theta), s = std::sin(theta);
            rot_re(k) = c * c_re(k) + s * c_im(k);
            rot_im(k) = c * c_im(k) - s * c_re(k);
        }
        psi_re = basis * rot_re;
        psi_im = basis * rot_im;

        double q1 = 0.0, q2 = 0.0, p1 = 0.0, p2 = 0.0, overlap = 0.0, edge = 0.0;
        for (int j = 0; j < n; ++j) {
            const double w = psi_re(j) * psi_re(j) + psi_im(j) * psi_im(j);
            const double x = sys.point(j);
            q1 += w * x;
            q2 += w * x * x;
            if (j < 5 || j >= n - 5) edge += w;

            const double dre = (j + 1 < n ? psi_re(j + 1) : 0.0) - (j > 0 ? psi_re(j - 1) : 0.0);
            const double dim = (j + 1 < n ? psi_im(j + 1) : 0.0) - (j > 0 ? psi_im(j - 1) : 0.0);
            // <p> = (hbar/2h) Im sum psi_j^* (psi_{j+1} - psi_{j-1})
            p1 += psi_re(j) * dim - psi_im(j) * dre;
            p2 += dre * dre + dim * dim;
            if (j + 1 < n) overlap += psi_re(j) * psi_re(j + 1) + psi_im(j) * psi_im(j + 1);
        }
        p1 *= half_hbar_over_h;
        p2 *= half_hbar_over_h * half_hbar_over_h;

        traj.q_mean.push_back(q1);
        traj.p_mean.push_back(p1);
        traj.sigma_q.push_back(std::sqrt(std::max(0.0, q2 - q1 * q1)));
        traj.sigma_p.push_back(std::sqrt(std::max(0.0, p2 - p1 * p1)));
        // <[Q,P]> = i hbar Re sum_j psi_j^* psi_{j+1}; Robertson floor is
        // half its magnitude.
        traj.heisenberg_floor.push_back(0.5 * sys.hbar * std::abs(overlap));
        if (edge > 1e-6) traj.boundary_contaminated = true;
    }

    traj.ehrenfest_residual =
        detail::ehrenfest_identity_residual(traj.times, traj.q_mean, traj.p_mean, sys.mass);
    traj.validate();
    return traj;
}

// Classical reference dynamics m qddot = -V'(q), fixed-step RK4 at step
// <= min(dt)/16, force from the interpolated sampled gradient.
inline ClassicalTrajectory classical_trajectory(const GridSystem& sys, double q0, double p0,
                                                const std::vector<double>& t_grid) {
    if (t_grid.size() < 1) throw ValidationError("classical_trajectory: empty time grid");
    if (!(q0 >= sys.x_min && q0 <= sys.x_max))
        throw ValidationError("classical_trajectory: q0 outside the grid");
    const CubicInterpolator grad = sys.gradient_interpolator();

    double min_dt = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < t_grid.size(); ++i) {
        if (!(t_grid[i] > t_grid[i - 1]))
            throw ValidationError("classical_trajectory: time grid not ascending");
        min_dt = std::min(min_dt, t_grid[i] - t_grid[i - 1]);
    }
    const double h_max = (t_grid.size() > 1) ? min_dt / 16.0 : 1.0;

    ClassicalTrajectory traj;
    traj.times = t_grid;
    traj.q.push_back(q0);
    traj.p.push_back(p0);

    double q = q0, p = p0;
    const double m = sys.mass;
    auto accel = [&](double qq) {
        if (!grad.contains(qq)) throw NumericError("classical_trajectory: left the grid");
        return -grad(qq) / m;
    };
    for (std::size_t i = 1; i < t_grid.size(); ++i) {
        const double span = t_grid[i] - t_grid[i - 1];
        const int n_sub = std::max(1, static_cast<int>(std::ceil(span / h_max)));
        const double dt = span / n_sub;
        for (int s = 0; s < n_sub; ++s) {
            try {
                const double k1q = p / m, k1p = m * accel(q);
                const double k2q = (p + 0.5 * dt * k1p) / m, k2p = m * accel(q + 0.5 * dt * k1q);
                const double k3q = (p + 0.5 * dt * k2p) / m, k3p = m * accel(q + 0.5 * dt * k2q);
                const double k4q = (p + dt * k3p) / m, k4p = m * accel(q + dt * k3q);
                q += dt / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
                p += dt / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
            } catch (const NumericError&) {
                throw NumericError("classical_trajectory: trajectory exits the grid near t=" +
                                   std::to_string(t_grid[i - 1] + s * dt));
            }
            if (q < sys.x_min || q > sys.x_max)
                throw NumericError("classical_trajectory: trajectory exits the grid near t=" +
                                   std::to_string(t_grid[i - 1] + (s + 1) * dt));
        }
        traj.q.push_back(q);
        traj.p.push_back(p);
    }
    return traj;
}

struct BoundCheck {
    double lhs;  // |<f(Q)> - f(<Q>)|
    double rhs;  // 0.5 * ||f''|| * sigma_Q^2
};

// Second-moment bound: f supplied as samples on the (uniform, ascending)
// eigenvalue grid of Q together with a caller-certified bound on |f''|.
inline BoundCheck approximation_bound_check(const DensityOperator& rho,
                                            const HermitianOperator& q,
                                            const std::vector<double>& f_values,
                                            double f_second_derivative_bound) {
    if (rho.dim() != q.dim())
        throw ValidationError("approximation_bound_check: dimension mismatch");
    if (f_values.size() != static_cast<std::size_t>(q.dim()))
        throw ValidationError("approximation_bound_check: need one f sample per eigenvalue");
    if (f_second_derivative_bound < 0.0)
        throw ValidationError("approximation_bound_check: bound must be nonnegative");

    const Eigendecomposition eig = eigendecompose(q);
    const Eigen::Index n = q.dim();
    const double dx = (eig.eigenvalues(n - 1) - eig.eigenvalues(0)) / (n - 1);
    if (!(dx > 0.0))
        throw ValidationError("approximation_bound_check: degenerate eigenvalue grid");
    for (Eigen::Index j = 0; j < n; ++j)
        if (std::abs(eig.eigenvalues(j) - (eig.eigenvalues(0) + dx * j)) > 1e-9 * dx)
            throw ValidationError("approximation_bound_check: eigenvalues not a uniform grid");

    double mean = 0.0, mean_sq = 0.0, f_mean = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
        const Vector col = eig.eigenvectors.col(j);
        const double w = (col.adjoint() * rho.matrix() * col)(0).real();
        const double lam = eig.eigenvalues(j);
        mean += w * lam;
        mean_sq += w * lam * lam;
        f_mean += w * f_values[j];
    }
    const CubicInterpolator f(eig.eigenvalues(0), dx, f_values);
    if (!f.contains(mean))
        throw NumericError("approximation_bound_check: <Q>=" + std::to_string(mean) +
                           " outside the eigenvalue range");
    const double variance = std::max(0.0, mean_sq - mean * mean);
    return {std::abs(f_mean - f(mean)), 0.5 * f_second_derivative_bound * variance};
}

struct ClassicalityDeviation {
    std::vector<double> times;     // interior times
    std::vector<double> residual;  // |m qbar'' + V'(qbar)|
    std::vector<double> bound;     // C * sigma_q^2
};

// Residual of the classical law for the recorded q-expectations, against
// the third-derivative bound C times sigma_q^2, at interior times.
inline ClassicalityDeviation classicality_deviation(const ExpectationTrajectory& traj,
                                                    const GridSystem& sys,
                                                    double third_derivative_bound) {
    const std::size_t n = traj.times.size();
    if (n < 3) throw ValidationError("classicality_deviation: need at least 3 time samples");
    if (third_derivative_bound < 0.0)
        throw ValidationError("classicality_deviation: bound must be nonnegative");
    const double dt = traj.times[1] - traj.times[0];
    for (std::size_t i = 1; i < n; ++i)
        if (std::abs(traj.times[i] - traj.times[i - 1] - dt) > 1e-9 * dt)
            throw ValidationError("classicality_deviation: time grid not uniform");

    const CubicInterpolator grad = sys.gradient_interpolator();
    ClassicalityDeviation out;
    out.times.reserve(n - 2);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double qbar = traj.q_mean[i];
        if (!grad.contains(qbar))
            throw NumericError("classicality_deviation: <q> outside the grid at t=" +
                               std::to_string(traj.times[i]));
        const double qddot =
            (traj.q_mean[i + 1] - 2.0 * traj.q_mean[i] + traj.q_mean[i - 1]) / (dt * dt);
        out.times.push_back(traj.times[i]);
        out.residual.push_back(std::abs(sys.mass * qddot + grad(qbar)));
        out.bound.push_back(third_derivative_bound * traj.sigma_q[i] * traj.sigma_q[i]);
    }
    return out;
}

}  // namespace thermalsim::ehrenfest
