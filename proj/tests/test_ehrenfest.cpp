#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "thermalsim/ehrenfest.hpp"
#include "thermalsim/random.hpp"

using namespace thermalsim;
using namespace thermalsim::ehrenfest;
using Catch::Approx;

namespace {

std::vector<double> sampled_potential(int n, double x_min, double x_max, auto f) {
    std::vector<double> v(n);
    const double h = (x_max - x_min) / (n - 1);
    for (int j = 0; j < n; ++j) v[j] = f(x_min + h * j);
    return v;
}

GridSystem harmonic_system(int n, double box, double omega = 1.0, double mass = 1.0,
                           double hbar = 1.0) {
    return GridSystem(n, -box, box, mass, hbar,
                      sampled_potential(n, -box, box, [&](double x) {
                          return 0.5 * mass * omega * omega * x * x;
                      }));
}

GridSystem quartic_system(int n, double box) {
    return GridSystem(n, -box, box, 1.0, 1.0,
                      sampled_potential(n, -box, box, [](double x) { return x * x * x * x; }));
}

std::vector<double> time_grid(double t_max, int n) {
    std::vector<double> t(n);
    for (int i = 0; i < n; ++i) t[i] = t_max * i / (n - 1);
    return t;
}

}  // namespace

TEST_CASE("build_operators: box spectrum oracle") {
    const int n = 64;
    GridSystem sys(n, 0.0, 1.0, 1.0, 1.0, std::vector<double>(n, 0.0));
    const auto ops = build_operators(sys);
    const auto eig = eigendecompose(ops.hamiltonian);
    // Dirichlet walls sit one spacing outside the sampled endpoints.
    const double box_width = (n + 1) * sys.spacing();
    for (int k = 1; k <= 3; ++k) {
        const double exact = oracles::box_level(k, 1.0, 1.0, box_width);
        CHECK(std::abs(eig.eigenvalues(k - 1) - exact) < 0.02 * exact);
    }
}

TEST_CASE("build_operators: Q is diagonal in the grid basis") {
    GridSystem sys(32, -2.0, 2.0, 1.0, 1.0, std::vector<double>(32, 0.0));
    const auto ops = build_operators(sys);
    Vector delta = Vector::Zero(32);
    delta(7) = 1.0;
    const Vector qd = ops.position.matrix() * delta;
    CHECK(qd(7).real() == Approx(sys.point(7)).margin(1e-14));
    CHECK((qd - sys.point(7) * delta).norm() == Approx(0.0).margin(1e-14));
}

TEST_CASE("build_operators: harmonic level spacing") {
    const auto sys = harmonic_system(256, 8.0);
    const auto eig = eigendecompose(build_operators(sys).hamiltonian);
    for (int k = 0; k < 4; ++k) {
        const double spacing = eig.eigenvalues(k + 1) - eig.eigenvalues(k);
        CHECK(std::abs(spacing - 1.0) < 0.02);
    }
}

TEST_CASE("quantum trajectory: coherent packet follows the classical oscillation") {
    const double omega = 1.0, q0 = 1.0;
    const auto sys = harmonic_system(2560, 6.0, omega);
    const auto psi0 = gaussian_packet(sys, q0, std::sqrt(0.5), 0.0);
    const auto t = time_grid(10.0 * 2.0 * M_PI / omega, 800);
    const auto traj = quantum_expectation_trajectory(sys, psi0, t);

    REQUIRE_FALSE(traj.boundary_contaminated);
    CHECK(traj.ehrenfest_residual < 1e-3);

    const auto classical = classical_trajectory(sys, traj.q_mean[0], traj.p_mean[0], t);
    double worst = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i)
        worst = std::max(worst, std::abs(traj.q_mean[i] - classical.q[i]));
    CHECK(worst < 1e-3 * q0);

    // closed form oracle as well
    double worst_cos = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i)
        worst_cos = std::max(worst_cos, std::abs(traj.q_mean[i] - q0 * std::cos(omega * t[i])));
    CHECK(worst_cos < 1e-3 * q0);

    SECTION("Robertson floor holds at every time") {
        for (std::size_t i = 0; i < t.size(); ++i)
            CHECK(traj.sigma_q[i] * traj.sigma_p[i] >= traj.heisenberg_floor[i] - 1e-8);
    }
}

TEST_CASE("quantum trajectory: moments at t = 0 match the operator route") {
    const auto sys = harmonic_system(192, 6.0);
    const auto ops = build_operators(sys);
    const auto psi0 = gaussian_packet(sys, 0.8, 0.6, 0.5);
    const auto traj = quantum_expectation_trajectory(sys, psi0, {0.0, 0.1});
    const auto rho0 = psi0.to_density();
    CHECK(traj.q_mean[0] == Approx(q_expectation(rho0, ops.position)).margin(1e-10));
    CHECK(traj.p_mean[0] == Approx(q_expectation(rho0, ops.momentum)).margin(1e-10));
    CHECK(traj.sigma_q[0] == Approx(uncertainty(rho0, ops.position)).margin(1e-10));
    CHECK(traj.sigma_p[0] == Approx(uncertainty(rho0, ops.momentum)).margin(1e-10));
}

TEST_CASE("quantum trajectory: eigenstate is stationary") {
    const auto sys = harmonic_system(128, 6.0);
    const auto eig = eigendecompose(build_operators(sys).hamiltonian);
    const PureState psi0(eig.eigenvectors.col(2));
    const auto traj = quantum_expectation_trajectory(sys, psi0, time_grid(5.0, 64));
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        CHECK(std::abs(traj.q_mean[i] - traj.q_mean[0]) < 1e-9);
        CHECK(std::abs(traj.p_mean[i] - traj.p_mean[0]) < 1e-9);
    }
}

TEST_CASE("quantum trajectory: free packet moves ballistically") {
    const int n = 1024;
    const double p0 = 1.0, mass = 1.0;
    GridSystem sys(n, -10.0, 10.0, mass, 1.0, std::vector<double>(n, 0.0));
    const auto psi0 = gaussian_packet(sys, -4.0, 1.0, p0);
    const auto t = time_grid(4.0, 160);
    const auto traj = quantum_expectation_trajectory(sys, psi0, t);

    REQUIRE_FALSE(traj.boundary_contaminated);
    const double q_start = traj.q_mean[0];
    for (std::size_t i = 0; i < t.size(); ++i) {
        CHECK(std::abs(traj.p_mean[i] - p0) < 1e-3);
        CHECK(std::abs(traj.q_mean[i] - (q_start + p0 * t[i] / mass)) < 1e-3);
    }

    SECTION("uncertainty product stays above hbar/2 once dispersion dominates") {
        // early on the product sits at the discrete Robertson floor slightly
        // below hbar/2; the dispersion excess takes over quickly
        for (std::size_t i = 0; i < t.size(); ++i) {
            CHECK(traj.sigma_q[i] * traj.sigma_p[i] >= traj.heisenberg_floor[i] - 1e-8);
            if (t[i] >= 1.0) CHECK(traj.sigma_q[i] * traj.sigma_p[i] >= 0.5 - 1e-8);
        }
    }
}

TEST_CASE("quantum trajectory: wall contact raises the contamination flag") {
    const int n = 256;
    GridSystem sys(n, -5.0, 5.0, 1.0, 1.0, std::vector<double>(n, 0.0));
    const auto psi0 = gaussian_packet(sys, 0.0, 0.8, 2.0);
    const auto traj = quantum_expectation_trajectory(sys, psi0, time_grid(4.0, 96));
    CHECK(traj.boundary_contaminated);
}

TEST_CASE("quantum trajectory: evolved pure-state norm is preserved") {
    const auto sys = harmonic_system(128, 6.0);
    const auto ops = build_operators(sys);
    const auto psi0 = gaussian_packet(sys, 0.7, 0.9, 0.3);
    for (double t : {0.4, 1.7, 3.9}) {
        const auto psi_t = evolve(psi0, ops.hamiltonian, t, sys.hbar);
        CHECK(std::abs(psi_t.amplitudes().norm() - 1.0) < 1e-10);
    }
}

TEST_CASE("classical trajectory closed forms") {
    SECTION("harmonic oscillator over 10 periods") {
        const auto sys = harmonic_system(512, 6.0);
        const double q0 = 1.2, p0 = 0.4;
        const auto t = time_grid(10.0 * 2.0 * M_PI, 640);
        const auto traj = classical_trajectory(sys, q0, p0, t);
        const double amplitude = std::sqrt(q0 * q0 + p0 * p0);
        for (std::size_t i = 0; i < t.size(); ++i) {
            const double exact = q0 * std::cos(t[i]) + p0 * std::sin(t[i]);
            CHECK(std::abs(traj.q[i] - exact) < 1e-6 * amplitude);
        }
    }

    SECTION("free motion is a straight line") {
        GridSystem sys(64, -10.0, 10.0, 2.0, 1.0, std::vector<double>(64, 0.0));
        const auto t = time_grid(6.0, 40);
        const auto traj = classical_trajectory(sys, -3.0, 4.0, t);
        for (std::size_t i = 0; i < t.size(); ++i) {
            CHECK(traj.q[i] == Approx(-3.0 + 4.0 * t[i] / 2.0).margin(1e-10));
            CHECK(traj.p[i] == Approx(4.0).margin(1e-12));
        }
    }

    SECTION("quartic well conserves energy") {
        const auto sys = quartic_system(12288, 2.5);
        const double q0 = 1.0, p0 = 0.0;
        const auto t = time_grid(20.0, 400);
        const auto traj = classical_trajectory(sys, q0, p0, t);
        const double e0 = 0.5 * p0 * p0 + q0 * q0 * q0 * q0;
        const auto v = sys.potential_interpolator();
        for (std::size_t i = 0; i < t.size(); ++i) {
            const double e = 0.5 * traj.p[i] * traj.p[i] + std::pow(traj.q[i], 4);
            CHECK(std::abs(e - e0) < 1e-6 * e0);
            // same budget through the sampled-potential route
            const double e_sampled = 0.5 * traj.p[i] * traj.p[i] + v(traj.q[i]);
            CHECK(std::abs(e_sampled - e0) < 1e-6 * e0);
        }
    }

    SECTION("leaving the grid is an error naming the exit time") {
        GridSystem sys(64, -1.0, 1.0, 1.0, 1.0, std::vector<double>(64, 0.0));
        CHECK_THROWS_AS(classical_trajectory(sys, 0.0, 2.0, time_grid(10.0, 32)), NumericError);
    }
}

TEST_CASE("approximation bound check") {
    auto rng = make_rng(404);
    const int n = 32;
    GridSystem sys(n, -1.0, 1.0, 1.0, 1.0, std::vector<double>(n, 0.0));
    const auto q_op = build_operators(sys).position;

    SECTION("linear f is exact: lhs = rhs = 0") {
        const auto f = sampled_potential(n, -1.0, 1.0, [](double x) { return 3.0 * x - 0.7; });
        for (int trial = 0; trial < 5; ++trial) {
            const auto rho = random_density(n, rng);
            const auto [lhs, rhs] = approximation_bound_check(rho, q_op, f, 0.0);
            CHECK(lhs < 1e-10);
            CHECK(rhs == 0.0);
        }
    }

    SECTION("f = x^2 with bound 2 is the equality case") {
        const auto f = sampled_potential(n, -1.0, 1.0, [](double x) { return x * x; });
        const auto rho = random_density(n, rng);
        const auto [lhs, rhs] = approximation_bound_check(rho, q_op, f, 2.0);
        CHECK(lhs == Approx(rhs).margin(1e-12));
    }

    SECTION("f = cos over 1000 random states") {
        const auto f = sampled_potential(n, -1.0, 1.0, [](double x) { return std::cos(x); });
        for (int trial = 0; trial < 1000; ++trial) {
            const auto rho = random_density(n, rng);
            const auto [lhs, rhs] = approximation_bound_check(rho, q_op, f, 1.0);
            CHECK(lhs <= rhs + 1e-9);
        }
    }

    SECTION("non-uniform eigenvalue grids are rejected") {
        const auto bad = HermitianOperator::diagonal(Eigen::Vector4d(0.0, 0.1, 0.9, 1.0));
        Matrix rho_m = 0.25 * Matrix::Identity(4, 4);
        CHECK_THROWS_AS(
            approximation_bound_check(DensityOperator(rho_m), bad, {1, 1, 1, 1}, 1.0),
            ValidationError);
    }
}

TEST_CASE("classicality deviation") {
    SECTION("harmonic: zero bound, residual at the discretization floor") {
        const auto sys = harmonic_system(1024, 6.0);
        const auto psi0 = gaussian_packet(sys, 1.0, std::sqrt(0.5), 0.0);
        const auto traj =
            quantum_expectation_trajectory(sys, psi0, time_grid(4.0 * M_PI, 512));
        const auto dev = classicality_deviation(traj, sys, 0.0);
        for (std::size_t i = 0; i < dev.times.size(); ++i) {
            CHECK(dev.bound[i] == 0.0);
            CHECK(dev.residual[i] <= 1e-4);
        }
    }

    SECTION("quartic: residual within the third-derivative bound") {
        const double box = 3.0;
        const auto sys = quartic_system(768, box);
        const auto psi0 = gaussian_packet(sys, 1.0, 0.35, 0.0);
        const auto traj = quantum_expectation_trajectory(sys, psi0, time_grid(8.0, 400));
        const double c_bound = 24.0 * box;
        const auto dev = classicality_deviation(traj, sys, c_bound);
        for (std::size_t i = 0; i < dev.times.size(); ++i)
            CHECK(dev.residual[i] <= dev.bound[i] + 1e-3);
    }

    SECTION("narrower packets deviate less") {
        // shrinking family in the macroscopic sense: position and momentum
        // spreads shrink together (hbar matched to the width), so the packet
        // stays narrow over the whole horizon
        const double box = 3.0;
        const int n = 768;
        const auto t = time_grid(8.0, 400);
        std::vector<double> max_residual;
        std::vector<std::vector<double>> residuals;
        for (double width : {0.5, 0.35, 0.25}) {
            GridSystem sys(n, -box, box, 1.0, 2.0 * width * width,
                           sampled_potential(n, -box, box,
                                             [](double x) { return x * x * x * x; }));
            const auto traj =
                quantum_expectation_trajectory(sys, gaussian_packet(sys, 1.0, width, 0.0), t);
            const auto dev = classicality_deviation(traj, sys, 24.0 * box);
            double worst = 0.0;
            for (double r : dev.residual) worst = std::max(worst, r);
            max_residual.push_back(worst);
            residuals.push_back(dev.residual);
        }
        CHECK(max_residual[0] > max_residual[1]);
        CHECK(max_residual[1] > max_residual[2]);

        // pointwise comparison on the early window, before the packet mean
        // first crosses the inflection point
        for (std::size_t i = 0; i < residuals[0].size(); ++i) {
            if (t[i + 1] > 0.6) break;
            if (t[i + 1] < 0.05) continue;
            CHECK(residuals[2][i] < residuals[0][i]);
        }
    }

    SECTION("needs at least 3 samples") {
        const auto sys = harmonic_system(64, 4.0);
        ExpectationTrajectory tiny;
        tiny.times = {0.0, 1.0};
        tiny.q_mean = {0.0, 0.1};
        tiny.p_mean = {0.0, 0.0};
        tiny.sigma_q = {1.0, 1.0};
        tiny.sigma_p = {1.0, 1.0};
        tiny.heisenberg_floor = {0.0, 0.0};
        CHECK_THROWS_AS(classicality_deviation(tiny, sys, 1.0), ValidationError);
    }
}
