#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>
#include <set>
#include <vector>

#include "oracles.hpp"
#include "thermalsim/quantum.hpp"
#include "thermalsim/random.hpp"
#include "thermalsim/spectral.hpp"

using namespace thermalsim;
using namespace thermalsim::spectral;
using Catch::Approx;

namespace {

DiscreteSpectrumSystem plus_state_sigma_x(double omega0) {
    Matrix rho(2, 2);
    rho << 0.5, 0.5, 0.5, 0.5;
    Matrix sx(2, 2);
    sx << 0.0, 1.0, 1.0, 0.0;
    return DiscreteSpectrumSystem({0.0, omega0}, DensityOperator(rho), HermitianOperator(sx),
                                  1.0);
}

std::vector<double> omega_grid(double lo, double hi, double step) {
    std::vector<double> out;
    for (double w = lo; w <= hi + 1e-12; w += step) out.push_back(w);
    return out;
}

DiscreteSpectrumSystem random_system(Eigen::Index dim, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> gap(0.4, 1.7);
    std::vector<double> levels(dim);
    levels[0] = 0.0;
    for (Eigen::Index k = 1; k < dim; ++k) levels[k] = levels[k - 1] + gap(rng);
    return DiscreteSpectrumSystem(levels, random_density(dim, rng), random_hermitian(dim, rng),
                                  1.0);
}

}  // namespace

TEST_CASE("rydberg_ritz_frequencies") {
    const auto omega = rydberg_ritz_frequencies({0.0, 1.0}, 1.0);
    CHECK(omega(0, 0) == 0.0);
    CHECK(omega(0, 1) == Approx(-1.0));
    CHECK(omega(1, 0) == Approx(1.0));

    SECTION("positive frequencies of a 3-level system") {
        const auto w = rydberg_ritz_frequencies({0.0, 1.0, 2.5}, 1.0);
        std::multiset<double> positive;
        for (Eigen::Index k = 0; k < 3; ++k)
            for (Eigen::Index j = 0; j < 3; ++j)
                if (w(k, j) > 0.0) positive.insert(w(k, j));
        CHECK(positive == std::multiset<double>{1.0, 1.5, 2.5});
    }

    SECTION("antisymmetry is exact") {
        const auto w = rydberg_ritz_frequencies({-0.3, 0.9, 1.1, 4.2}, 0.7);
        CHECK((w + w.transpose()).cwiseAbs().maxCoeff() == 0.0);
    }

    SECTION("hbar scaling") {
        const auto w = rydberg_ritz_frequencies({0.0, 2.0}, 2.0);
        CHECK(w(1, 0) == Approx(1.0));
    }
}

TEST_CASE("heisenberg_signal") {
    SECTION("stationary commuting case is constant") {
        const auto rho_m = Eigen::Vector3d(0.5, 0.3, 0.2);
        DiscreteSpectrumSystem sys({0.0, 1.0, 2.5},
                                   DensityOperator(rho_m.cast<complexd>().asDiagonal()),
                                   HermitianOperator::diagonal(Eigen::Vector3d(1.0, 4.0, 9.0)),
                                   1.0);
        const double expected = 0.5 * 1.0 + 0.3 * 4.0 + 0.2 * 9.0;
        for (double t : {0.0, 0.7, 13.9})
            CHECK(heisenberg_signal(sys, t) == Approx(expected).margin(1e-12));
    }

    SECTION("two-level closed form cos(omega0 t)") {
        const auto sys = plus_state_sigma_x(1.7);
        for (double t = 0.0; t < 8.0; t += 0.37)
            CHECK(heisenberg_signal(sys, t) == Approx(std::cos(1.7 * t)).margin(1e-12));
    }

    SECTION("Schroedinger-picture equivalence on random systems") {
        auto rng = make_rng(61);
        std::uniform_real_distribution<double> time(0.0, 20.0);
        for (int trial = 0; trial < 4; ++trial) {
            const auto sys = random_system(2 + static_cast<Eigen::Index>(rng() % 7), rng);
            const auto h = sys.hamiltonian();
            CHECK(heisenberg_signal(sys, 0.0) ==
                  Approx(q_expectation(sys.rho, sys.a)).margin(1e-12));
            for (int i = 0; i < 5; ++i) {
                const double t = time(rng);
                const double heis = heisenberg_signal(sys, t);
                const double schr = q_expectation(evolve(sys.rho, h, t, sys.hbar), sys.a);
                CHECK(heis == Approx(schr).margin(1e-9));
            }
        }
    }
}

TEST_CASE("force_decomposition") {
    SECTION("stationary state gives a single DC mode") {
        const auto rho_m = Eigen::Vector2d(0.7, 0.3);
        DiscreteSpectrumSystem sys({0.0, 1.0},
                                   DensityOperator(rho_m.cast<complexd>().asDiagonal()),
                                   HermitianOperator::diagonal(Eigen::Vector2d(2.0, 5.0)), 1.0);
        const auto force = force_decomposition(sys);
        REQUIRE(force.modes.size() == 1);
        CHECK(force.modes[0].omega == 0.0);
        CHECK(force.modes[0].amplitude.real() == Approx(0.7 * 2.0 + 0.3 * 5.0).margin(1e-14));
    }

    SECTION("plus state with sigma_x: modes at +-omega0 only, |F| = 1/2") {
        const auto force = force_decomposition(plus_state_sigma_x(2.2));
        REQUIRE(force.modes.size() == 2);
        CHECK(force.modes[0].omega == Approx(-2.2));
        CHECK(force.modes[1].omega == Approx(2.2));
        CHECK(std::abs(force.modes[0].amplitude) == Approx(0.5).margin(1e-14));
        CHECK(std::abs(force.modes[1].amplitude) == Approx(0.5).margin(1e-14));
    }

    SECTION("degenerate level differences merge coherently") {
        auto rng = make_rng(17);
        const auto rho = random_density(3, rng);
        const auto a = random_hermitian(3, rng);
        DiscreteSpectrumSystem sys({0.0, 1.0, 2.0}, rho, a, 1.0);
        const auto force = force_decomposition(sys);
        // exhaustive pair enumeration oracle for omega = 1
        const complexd expected =
            rho.matrix()(0, 1) * a.matrix()(1, 0) + rho.matrix()(1, 2) * a.matrix()(2, 1);
        int hits = 0;
        for (const auto& m : force.modes)
            if (std::abs(m.omega - 1.0) < 1e-9) {
                ++hits;
                CHECK(std::abs(m.amplitude - expected) < 1e-12);
            }
        CHECK(hits == 1);
    }

    SECTION("reconstruction and Hermitian closure on random systems") {
        auto rng = make_rng(23);
        std::uniform_real_distribution<double> time(0.0, 100.0);
        const auto sys = random_system(5, rng);
        const auto force = force_decomposition(sys);
        CHECK(force.hermitian_closed(1e-12));
        for (int i = 0; i < 50; ++i) {
            const double t = time(rng);
            const complexd rec = force.evaluate(t);
            CHECK(std::abs(rec.real() - heisenberg_signal(sys, t)) < 1e-9);
            CHECK(std::abs(rec.imag()) < 1e-9);
        }
    }
}

TEST_CASE("steady_state_amplitudes") {
    const OscillatorParams osc(1.0, 0.1);

    SECTION("static mode responds as F / (m omega^2)") {
        const ForceSignal force({{0.0, complexd(2.0, 0.0)}});
        const auto amps = steady_state_amplitudes(force, osc, 3.0);
        REQUIRE(amps.size() == 1);
        CHECK(std::abs(amps[0].q - complexd(2.0 / 9.0, 0.0)) < 1e-14);
    }

    SECTION("peak height at exact resonance is |F| / (c |omega_l|)") {
        const ForceSignal force({{2.0, complexd(1.0, 0.0)}});
        const auto amps = steady_state_amplitudes(force, osc, 2.0);
        CHECK(std::abs(amps[0].q) == Approx(1.0 / (0.1 * 2.0)).margin(1e-12));
    }

    SECTION("far detuned response vanishes like |F| / (m omega^2)") {
        const ForceSignal force({{1.5, complexd(1.0, 0.0)}});
        const double omega = 150.0;
        const auto amps = steady_state_amplitudes(force, osc, omega);
        const double expected = 1.0 / (osc.mass * omega * omega);
        CHECK(std::abs(amps[0].q) == Approx(expected).epsilon(0.01));
    }

    SECTION("zero damping is rejected at construction") {
        CHECK_THROWS_AS(OscillatorParams(1.0, 0.0), ValidationError);
    }
}

TEST_CASE("mean_energy_scan") {
    const OscillatorParams osc(1.0, 0.1);

    SECTION("no modes, no response") {
        const auto scan = mean_energy_scan(ForceSignal({}), osc, omega_grid(0.5, 3.0, 0.1));
        for (double r : scan.response) CHECK(r == 0.0);
    }

    SECTION("single mode formula value at resonance") {
        const ForceSignal force({{2.0, complexd(1.0, 0.0)}});
        const auto scan = mean_energy_scan(force, osc, {2.0});
        CHECK(scan.response[0] == Approx(25.0).margin(1e-12));
    }

    SECTION("DC modes are excluded") {
        const ForceSignal force({{0.0, complexd(5.0, 0.0)}});
        const auto scan = mean_energy_scan(force, osc, omega_grid(0.1, 1.0, 0.1));
        for (double r : scan.response) CHECK(r == 0.0);
    }

    SECTION("local maxima land within one grid step of each resonance") {
        const OscillatorParams sharp(1.0, 0.02);
        auto rng = make_rng(3);
        const auto sys = [&] {
            Matrix rho(3, 3);
            rho.setConstant(complexd(1.0 / 3.0, 0.0));
            Matrix a = Matrix::Constant(3, 3, complexd(1.0, 0.0));
            a.diagonal().setZero();
            return DiscreteSpectrumSystem({0.0, 1.0, 2.5}, DensityOperator(rho),
                                          HermitianOperator(a), 1.0);
        }();
        const auto force = force_decomposition(sys);
        const double step = 0.002;
        const auto omegas = omega_grid(0.5, 3.0, step);
        const auto scan = mean_energy_scan(force, sharp, omegas);
        for (double target : {1.0, 1.5, 2.5}) {
            double best = -1.0, best_val = -1.0;
            for (std::size_t i = 1; i + 1 < scan.omegas.size(); ++i)
                if (std::abs(scan.omegas[i] - target) < 10 * step &&
                    scan.response[i] > best_val) {
                    best_val = scan.response[i];
                    best = scan.omegas[i];
                }
            // the local maximum near the resonance sits within one step
            std::size_t i_best = static_cast<std::size_t>((best - 0.5) / step + 0.5);
            CHECK(scan.response[i_best] >= scan.response[i_best - 1]);
            CHECK(scan.response[i_best] >= scan.response[i_best + 1]);
            CHECK(std::abs(best - target) <= step + 1e-12);
        }
        (void)rng;
    }

    SECTION("scan scales quadratically with the probe amplitude") {
        auto rng = make_rng(41);
        const auto sys = random_system(4, rng);
        const double s = 1.7;
        DiscreteSpectrumSystem scaled(sys.levels, sys.rho,
                                      HermitianOperator(s * sys.a.matrix()), sys.hbar);
        const auto omegas = omega_grid(0.5, 4.0, 0.05);
        const auto base = mean_energy_scan(force_decomposition(sys), osc, omegas);
        const auto boosted = mean_energy_scan(force_decomposition(scaled), osc, omegas);
        for (std::size_t i = 0; i < omegas.size(); ++i)
            CHECK(boosted.response[i] == Approx(s * s * base.response[i]).margin(1e-9));
    }

    SECTION("response is nonnegative and decays at high frequency") {
        auto rng = make_rng(42);
        const auto sys = random_system(4, rng);
        const auto force = force_decomposition(sys);
        const auto scan = mean_energy_scan(force, osc, omega_grid(0.5, 400.0, 0.5));
        for (double r : scan.response) CHECK(r >= 0.0);
        CHECK(scan.response.back() < 1e-4 * *std::max_element(scan.response.begin(),
                                                              scan.response.end()));
    }
}

TEST_CASE("recover_spectrum") {
    const double c = 0.02;
    const OscillatorParams osc(1.0, c);

    SECTION("single synthetic mode is recovered within c/10") {
        const ForceSignal force({{-2.0, complexd(0.5, 0.0)}, {2.0, complexd(0.5, 0.0)}});
        const auto scan = mean_energy_scan(force, osc, omega_grid(1.0, 3.0, 0.002));
        const auto peaks = recover_spectrum(scan, 100.0);
        REQUIRE(peaks.size() == 1);
        CHECK(std::abs(peaks[0] - 2.0) < c / 10.0);
    }

    SECTION("three-level pipeline recovers the level differences") {
        Matrix rho = Matrix::Constant(3, 3, complexd(1.0 / 3.0, 0.0));
        Matrix a = Matrix::Constant(3, 3, complexd(1.0, 0.0));
        a.diagonal().setZero();
        DiscreteSpectrumSystem sys({0.0, 1.0, 2.5}, DensityOperator(rho), HermitianOperator(a),
                                   1.0);
        const auto force = force_decomposition(sys);
        const auto scan = mean_energy_scan(force, osc, omega_grid(0.5, 3.0, 0.002));
        const auto peaks = recover_spectrum(scan, 50.0);
        REQUIRE(peaks.size() == 3);
        const auto omega = rydberg_ritz_frequencies(sys.levels, sys.hbar);
        CHECK(std::abs(peaks[0] - omega(1, 0)) < 0.01);
        CHECK(std::abs(peaks[1] - omega(2, 1)) < 0.01);
        CHECK(std::abs(peaks[2] - omega(2, 0)) < 0.01);
    }

    SECTION("flat scan yields no peaks") {
        const auto omegas = omega_grid(1.0, 2.0, 0.01);
        const ResonanceScan flat(omegas, std::vector<double>(omegas.size(), 3.3));
        CHECK(recover_spectrum(flat, 0.1).empty());
    }

    SECTION("soundness and completeness on random 4-level systems") {
        auto rng = make_rng(77);
        int tested = 0;
        while (tested < 3) {
            const auto sys = random_system(4, rng);
            const auto omega = rydberg_ritz_frequencies(sys.levels, sys.hbar);
            // require well-separated positive differences
            std::vector<double> diffs;
            for (Eigen::Index k = 0; k < 4; ++k)
                for (Eigen::Index j = 0; j < k; ++j) diffs.push_back(omega(k, j));
            std::sort(diffs.begin(), diffs.end());
            bool separated = true;
            for (std::size_t i = 1; i < diffs.size(); ++i)
                if (diffs[i] - diffs[i - 1] < 10 * c) separated = false;
            if (!separated) continue;
            ++tested;

            const auto force = force_decomposition(sys);
            const auto scan =
                mean_energy_scan(force, osc, omega_grid(0.25, diffs.back() + 1.0, 0.002));
            // the prominence floor implies a minimum detectable weight
            const double prominence = 1.0;
            const auto peaks = recover_spectrum(scan, prominence);

            for (double peak : peaks) {
                bool matched = false;
                for (const auto& m : force.modes)
                    if (m.omega > 0.0 && std::abs(peak - m.omega) < c / 2.0 &&
                        std::abs(m.amplitude) > 0.0)
                        matched = true;
                CHECK(matched);  // soundness
            }
            for (const auto& m : force.modes) {
                if (!(m.omega > 0.0)) continue;
                const double height =
                    2.0 * std::norm(m.amplitude) / (c * c * m.omega * m.omega);
                if (height < 4.0 * prominence) continue;  // below the implied floor
                bool found = false;
                for (double peak : peaks)
                    if (std::abs(peak - m.omega) < c / 2.0) found = true;
                CHECK(found);  // completeness
            }
        }
    }
}
