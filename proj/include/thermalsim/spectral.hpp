// spectral.hpp
// Level-difference spectroscopy: Heisenberg-picture q-expectation signals
// from a discrete-spectrum system, their exponential-mode decomposition,
// the driven damped oscillator's steady-state response, the mean-energy
// frequency scan, and peak recovery.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "thermalsim/core.hpp"
#include "thermalsim/quantum.hpp"

namespace thermalsim::spectral {

// A probed system written in its energy eigenbasis: H|k> = E_k|k>.
struct DiscreteSpectrumSystem {
    std::vector<double> levels;  // strictly ascending
    DensityOperator rho;
    HermitianOperator a;
    double hbar;

    DiscreteSpectrumSystem(std::vector<double> lv, DensityOperator r, HermitianOperator op,
                           double hb)
        : levels(std::move(lv)), rho(std::move(r)), a(std::move(op)), hbar(hb) {
        if (!(hbar > 0.0)) throw ValidationError("DiscreteSpectrumSystem: hbar must be positive");
        if (levels.size() != static_cast<std::size_t>(rho.dim()) || rho.dim() != a.dim())
            throw ValidationError("DiscreteSpectrumSystem: dimensions disagree");
        for (std::size_t k = 1; k < levels.size(); ++k)
            if (!(levels[k] > levels[k - 1]))
                throw ValidationError("DiscreteSpectrumSystem: levels must be strictly ascending");
    }

    Eigen::Index dim() const { return rho.dim(); }

    HermitianOperator hamiltonian() const {
        Eigen::VectorXd d(levels.size());
        for (std::size_t k = 0; k < levels.size(); ++k) d(k) = levels[k];
        return HermitianOperator::diagonal(d);
    }
};

// omega[k][j] = (E_k - E_j) / hbar; antisymmetric with zero diagonal.
inline Eigen::MatrixXd rydberg_ritz_frequencies(const std::vector<double>& levels, double hbar) {
    if (!(hbar > 0.0)) throw ValidationError("rydberg_ritz_frequencies: hbar must be positive");
    const auto n = static_cast<Eigen::Index>(levels.size());
    Eigen::MatrixXd omega(n, n);
    for (Eigen::Index k = 0; k < n; ++k)
        for (Eigen::Index j = 0; j < n; ++j) omega(k, j) = (levels[k] - levels[j]) / hbar;
    return omega;
}

// <A(t)> = sum_{j,k} rho_{jk} e^{i omega_{kj} t} A_{kj}; real up to round-off.
inline double heisenberg_signal(const DiscreteSpectrumSystem& sys, double t) {
    const Eigen::Index n = sys.dim();
    complexd acc(0.0, 0.0);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index k = 0; k < n; ++k) {
            const double w = (sys.levels[k] - sys.levels[j]) / sys.hbar;
            acc += sys.rho.matrix()(j, k) * sys.a.matrix()(k, j) * std::exp(complexd(0.0, w * t));
        }
    if (!(std::abs(acc.imag()) < 1e-10))
        throw NumericError("heisenberg_signal: imaginary residual " + std::to_string(acc.imag()));
    return acc.real();
}

struct ForceMode {
    double omega;
    complexd amplitude;
};

// F(t) = sum_l F_l e^{i omega_l t}. Frequencies are distinct; a signal that
// is real-valued has its mode set closed under (w, F) -> (-w, conj F).
struct ForceSignal {
    std::vector<ForceMode> modes;  // ascending in omega

    explicit ForceSignal(std::vector<ForceMode> m) : modes(std::move(m)) {
        std::sort(modes.begin(), modes.end(),
                  [](const ForceMode& a, const ForceMode& b) { return a.omega < b.omega; });
        for (std::size_t l = 1; l < modes.size(); ++l)
            if (!(modes[l].omega > modes[l - 1].omega))
                throw ValidationError("ForceSignal: mode frequencies must be distinct");
    }

    complexd evaluate(double t) const {
        complexd acc(0.0, 0.0);
        for (const auto& m : modes) acc += m.amplitude * std::exp(complexd(0.0, m.omega * t));
        return acc;
    }

    bool hermitian_closed(double tol = 1e-12) const {
        for (const auto& m : modes) {
            bool found = false;
            for (const auto& other : modes)
                if (std::abs(other.omega + m.omega) <= tol &&
                    std::abs(other.amplitude - std::conj(m.amplitude)) <= tol) {
                    found = true;
                    break;
                }
            if (!found) return false;
        }
        return true;
    }
};

// Collects the rho_{jk} A_{kj} terms of the signal by frequency (grouping
// tolerance 1e-9; degenerate level differences merge coherently). Modes
// with zero summed amplitude are dropped.
inline ForceSignal force_decomposition(const DiscreteSpectrumSystem& sys) {
    const Eigen::Index n = sys.dim();
    struct Term {
        double omega;
        complexd amp;
    };
    std::vector<Term> terms;
    terms.reserve(static_cast<std::size_t>(n) * n);
    double scale = 0.0;
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index k = 0; k < n; ++k) {
            const complexd amp = sys.rho.matrix()(j, k) * sys.a.matrix()(k, j);
            scale = std::max(scale, std::abs(amp));
            terms.push_back({(sys.levels[k] - sys.levels[j]) / sys.hbar, amp});
        }
    std::sort(terms.begin(), terms.end(),
              [](const Term& a, const Term& b) { return a.omega < b.omega; });

    const double group_tol = 1e-9;
    const double drop_tol = 1e-14 * std::max(1.0, scale);
    std::vector<ForceMode> modes;
    std::size_t i = 0;
    while (i < terms.size()) {
        double omega = terms[i].omega;
        complexd amp = terms[i].amp;
        std::size_t j = i + 1;
        while (j < terms.size() && terms[j].omega - terms[i].omega <= group_tol) {
            amp += terms[j].amp;
            ++j;
        }
        if (std::abs(amp) > drop_tol) modes.push_back({omega, amp});
        i = j;
    }
    return ForceSignal(std::move(modes));
}

// Damped oscillator m qddot + c qdot + k q = F(t), stiffness k = m omega^2
// swept over the probe frequency omega.
struct OscillatorParams {
    double mass;
    double damping;

    OscillatorParams(double m, double c) : mass(m), damping(c) {
        if (!(mass > 0.0)) throw ValidationError("OscillatorParams: mass must be positive");
        if (!(damping > 0.0))
            throw ValidationError("OscillatorParams: strict damping required (c > 0)");
    }
};

struct SteadyStateAmplitude {
    double omega_mode;
    complexd q;
};

// Persistent particular solution q_l = F_l / (m(omega^2 - omega_l^2) + i c omega_l).
inline std::vector<SteadyStateAmplitude> steady_state_amplitudes(const ForceSignal& force,
                                                                 const OscillatorParams& osc,
                                                                 double omega) {
    if (!(omega > 0.0)) throw ValidationError("steady_state_amplitudes: omega must be positive");
    std::vector<SteadyStateAmplitude> out;
    out.reserve(force.modes.size());
    for (const auto& m : force.modes) {
        const complexd denom(osc.mass * (omega * omega - m.omega * m.omega),
                             osc.damping * m.omega);
        if (std::abs(denom) == 0.0)
            throw NumericError("steady_state_amplitudes: resonance singularity at omega_l=" +
                               std::to_string(m.omega));
        out.push_back({m.omega, m.amplitude / denom});
    }
    return out;
}

// Frequency grid with the short-time-averaged mean-energy response.
struct ResonanceScan {
    std::vector<double> omegas;    // ascending, positive
    std::vector<double> response;  // nonnegative

    ResonanceScan(std::vector<double> w, std::vector<double> r)
        : omegas(std::move(w)), response(std::move(r)) {
        if (omegas.size() != response.size())
            throw ValidationError("ResonanceScan: grid and response lengths disagree");
        for (std::size_t i = 0; i < omegas.size(); ++i) {
            if (!(omegas[i] > 0.0) || (i > 0 && !(omegas[i] > omegas[i - 1])))
                throw ValidationError("ResonanceScan: omegas must be ascending and positive");
            if (response[i] < 0.0) throw ValidationError("ResonanceScan: negative response");
        }
    }
};

// a(omega) = sum_l |F_l|^2 / (m^2 (omega^2 - omega_l^2)^2 + c^2 omega_l^2),
// summed over the oscillatory modes. The DC mode (omega_l = 0) carries no
// level-difference information and is excluded from the scan.
inline ResonanceScan mean_energy_scan(const ForceSignal& force, const OscillatorParams& osc,
                                      const std::vector<double>& omegas) {
    std::vector<double> response(omegas.size(), 0.0);
    for (std::size_t i = 0; i < omegas.size(); ++i) {
        const double w2 = omegas[i] * omegas[i];
        for (const auto& m : force.modes) {
            if (std::abs(m.omega) <= 1e-12) continue;
            const double detune = osc.mass * (w2 - m.omega * m.omega);
            const double damp = osc.damping * m.omega;
            response[i] += std::norm(m.amplitude) / (detune * detune + damp * damp);
        }
    }
    return ResonanceScan(omegas, std::move(response));
}

// Local maxima of the scan refined by 3-point parabolic interpolation and
// filtered by prominence (peak height minus the higher adjacent valley).
inline std::vector<double> recover_spectrum(const ResonanceScan& scan, double prominence) {
    if (!(prominence > 0.0)) throw ValidationError("recover_spectrum: prominence must be positive");
    const auto& w = scan.omegas;
    const auto& a = scan.response;
    const std::size_t n = a.size();
    std::vector<double> peaks;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (!(a[i] > a[i - 1] && a[i] >= a[i + 1])) continue;
        double left_valley = a[i];
        for (std::size_t j = i; j-- > 0;) {
            left_valley = std::min(left_valley, a[j]);
            if (a[j] > a[i]) break;
        }
        double right_valley = a[i];
        for (std::size_t j = i + 1; j < n; ++j) {
            right_valley = std::min(right_valley, a[j]);
            if (a[j] > a[i]) break;
        }
        if (a[i] - std::max(left_valley, right_valley) < prominence) continue;

        const double curvature = a[i - 1] - 2.0 * a[i] + a[i + 1];
        const double step = 0.5 * (w[i + 1] - w[i - 1]);
        double refined = w[i];
        if (curvature < 0.0) refined += 0.5 * step * (a[i - 1] - a[i + 1]) / curvature;
        peaks.push_back(refined);
    }
    std::sort(peaks.begin(), peaks.end());
    return peaks;
}

}  // namespace thermalsim::spectral
