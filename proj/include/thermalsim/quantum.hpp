// quantum.hpp
// Finite-dimensional state/operator algebra: Hermitian quantities, density
// operators, pure states, tensor composition, partial traces, unitary
// evolution, q-expectations and uncertainties.
//
// All types validate their invariants on construction and are immutable
// afterwards; every operation is a pure function of its inputs.

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <string>
#include <utility>

#include "thermalsim/core.hpp"

namespace thermalsim {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

namespace detail {

inline void require_square(const Matrix& m, const char* who) {
    if (m.rows() != m.cols() || m.rows() < 1)
        throw ValidationError(std::string(who) + ": matrix must be square and nonempty, got " +
                              std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
}

inline double hermiticity_defect(const Matrix& m) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

}  // namespace detail

// A physical quantity: complex square matrix equal to its own adjoint.
// Raw input is accepted within tol.hermiticity and stored symmetrized,
// so downstream compositions stay exactly Hermitian.
class HermitianOperator {
public:
    explicit HermitianOperator(Matrix entries, const Tolerances& tol = Tolerances{}) {
        detail::require_square(entries, "HermitianOperator");
        const double defect = detail::hermiticity_defect(entries);
        if (!(defect <= tol.hermiticity))
            throw ValidationError("HermitianOperator: hermiticity defect " +
                                  std::to_string(defect) + " exceeds tolerance " +
                                  std::to_string(tol.hermiticity));
        m_ = 0.5 * (entries + entries.adjoint());
    }

    static HermitianOperator identity(Eigen::Index dim) {
        return HermitianOperator(Matrix::Identity(dim, dim), exact_tag{});
    }

    static HermitianOperator diagonal(const Eigen::VectorXd& d) {
        Matrix m = Matrix::Zero(d.size(), d.size());
        m.diagonal() = d.cast<complexd>();
        return HermitianOperator(std::move(m), exact_tag{});
    }

    Eigen::Index dim() const { return m_.rows(); }
    const Matrix& matrix() const { return m_; }

private:
    struct exact_tag {};
    HermitianOperator(Matrix m, exact_tag) : m_(std::move(m)) {
        detail::require_square(m_, "HermitianOperator");
    }
    friend HermitianOperator tensor(const HermitianOperator&, const HermitianOperator&);
    friend class DensityOperator;

    Matrix m_;
};

struct Eigendecomposition {
    Eigen::VectorXd eigenvalues;  // ascending
    Matrix eigenvectors;          // unitary, columns match eigenvalues
};

// A V = V diag(lambda), eigenvalues ascending.
inline Eigendecomposition eigendecompose(const HermitianOperator& a) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(a.matrix());
    if (solver.info() != Eigen::Success) {
        const double residual =
            (a.matrix() * solver.eigenvectors() -
             solver.eigenvectors() * solver.eigenvalues().asDiagonal().toDenseMatrix().cast<complexd>())
                .norm();
        throw NumericError("eigendecompose: solver failed to converge, residual norm " +
                           std::to_string(residual));
    }
    return {solver.eigenvalues(), solver.eigenvectors()};
}

// State of a system: Hermitian, unit trace, positive semidefinite.
class DensityOperator {
public:
    explicit DensityOperator(Matrix entries, const Tolerances& tol = Tolerances{}) : tol_(tol) {
        detail::require_square(entries, "DensityOperator");
        const double defect = detail::hermiticity_defect(entries);
        if (!(defect <= tol.hermiticity))
            throw ValidationError("DensityOperator: hermiticity defect " + std::to_string(defect) +
                                  " exceeds tolerance " + std::to_string(tol.hermiticity));
        m_ = 0.5 * (entries + entries.adjoint());
        const double trace_defect = std::abs(m_.trace().real() - 1.0) + std::abs(m_.trace().imag());
        if (!(trace_defect <= tol.trace))
            throw ValidationError("DensityOperator: trace deviates from 1 by " +
                                  std::to_string(trace_defect) + " (tolerance " +
                                  std::to_string(tol.trace) + ")");
        // PSD via the smallest eigenvalue: gives a quantitative margin.
        Eigen::SelfAdjointEigenSolver<Matrix> solver(m_, Eigen::EigenvaluesOnly);
        const double lambda_min = solver.eigenvalues().minCoeff();
        if (!(lambda_min >= -tol.psd))
            throw ValidationError("DensityOperator: smallest eigenvalue " +
                                  std::to_string(lambda_min) + " below -" +
                                  std::to_string(tol.psd));
    }

    static DensityOperator pure_projector(const Vector& amplitudes, const Tolerances& tol = Tolerances{}) {
        return DensityOperator(amplitudes * amplitudes.adjoint(), tol);
    }

    Eigen::Index dim() const { return m_.rows(); }
    const Matrix& matrix() const { return m_; }
    const Tolerances& tolerances() const { return tol_; }

private:
    Matrix m_;
    Tolerances tol_;
};

// Unit-norm state vector; rho = psi psi*.
class PureState {
public:
    explicit PureState(Vector amplitudes) : v_(std::move(amplitudes)) {
        if (v_.size() < 1) throw ValidationError("PureState: empty amplitude vector");
        const double norm_defect = std::abs(v_.norm() - 1.0);
        if (!(norm_defect <= 1e-12))
            throw ValidationError("PureState: norm deviates from 1 by " +
                                  std::to_string(norm_defect));
    }

    Eigen::Index dim() const { return v_.size(); }
    const Vector& amplitudes() const { return v_; }

    DensityOperator to_density(const Tolerances& tol = Tolerances{}) const {
        return DensityOperator::pure_projector(v_, tol);
    }

private:
    Vector v_;
};

// System (x) environment factorization of a composite dimension.
// System index is the slow (outer) index throughout.
struct ProductSplit {
    Eigen::Index dim_system;
    Eigen::Index dim_env;

    ProductSplit(Eigen::Index sys, Eigen::Index env) : dim_system(sys), dim_env(env) {
        if (sys < 1 || env < 1)
            throw ValidationError("ProductSplit: dimensions must be positive");
    }

    void check_composite(Eigen::Index dim) const {
        if (dim_system * dim_env != dim)
            throw ValidationError("ProductSplit: " + std::to_string(dim_system) + "x" +
                                  std::to_string(dim_env) + " does not factor dimension " +
                                  std::to_string(dim));
    }
};

namespace detail {

inline void require_same_dim(Eigen::Index a, Eigen::Index b, const char* who) {
    if (a != b)
        throw ValidationError(std::string(who) + ": dimension mismatch " + std::to_string(a) +
                              " vs " + std::to_string(b));
}

// Trace of a product without forming it; guards the imaginary residual.
inline double real_trace_product(const Matrix& a, const Matrix& b, const char* who) {
    const complexd tr = (a.array() * b.transpose().array()).sum();
    if (!(std::abs(tr.imag()) < 1e-10))
        throw NumericError(std::string(who) + ": imaginary trace residual " +
                           std::to_string(tr.imag()));
    return tr.real();
}

}  // namespace detail

// <A> = tr(rho A). Result lies in [lambda_min(A), lambda_max(A)].
inline double q_expectation(const DensityOperator& rho, const HermitianOperator& a) {
    detail::require_same_dim(rho.dim(), a.dim(), "q_expectation");
    return detail::real_trace_product(rho.matrix(), a.matrix(), "q_expectation");
}

// sigma_A = sqrt(<A^2> - <A>^2); negative round-off clamped to zero.
inline double uncertainty(const DensityOperator& rho, const HermitianOperator& a) {
    detail::require_same_dim(rho.dim(), a.dim(), "uncertainty");
    const double mean = detail::real_trace_product(rho.matrix(), a.matrix(), "uncertainty");
    const Matrix a2 = a.matrix() * a.matrix();
    const double mean_sq = detail::real_trace_product(rho.matrix(), a2, "uncertainty");
    return std::sqrt(std::max(0.0, mean_sq - mean * mean));
}

// Kronecker composition, system as the slow index:
// (A (x) B)[(j,l),(k,m)] = A[j][k] B[l][m].
inline HermitianOperator tensor(const HermitianOperator& a, const HermitianOperator& b) {
    const Eigen::Index da = a.dim(), db = b.dim();
    Matrix out(da * db, da * db);
    for (Eigen::Index j = 0; j < da; ++j)
        for (Eigen::Index k = 0; k < da; ++k)
            out.block(j * db, k * db, db, db) = a.matrix()(j, k) * b.matrix();
    return HermitianOperator(std::move(out), HermitianOperator::exact_tag{});
}

// rho^S = Tr_E rho, summing the environment (fast) index.
inline DensityOperator partial_trace_env(const DensityOperator& rho, const ProductSplit& split) {
    split.check_composite(rho.dim());
    const Eigen::Index ds = split.dim_system, de = split.dim_env;
    Matrix out = Matrix::Zero(ds, ds);
    for (Eigen::Index j = 0; j < ds; ++j)
        for (Eigen::Index k = 0; k < ds; ++k)
            for (Eigen::Index e = 0; e < de; ++e)
                out(j, k) += rho.matrix()(j * de + e, k * de + e);
    return DensityOperator(std::move(out), rho.tolerances());
}

// rho(t) = exp(-itH/hbar) rho exp(itH/hbar), via the eigendecomposition of H.
inline DensityOperator evolve(const DensityOperator& rho, const HermitianOperator& h, double t,
                              double hbar) {
    detail::require_same_dim(rho.dim(), h.dim(), "evolve");
    if (!(hbar > 0.0)) throw ValidationError("evolve: hbar must be positive");
    const Eigendecomposition eig = eigendecompose(h);
    Vector phases(h.dim());
    for (Eigen::Index k = 0; k < h.dim(); ++k)
        phases(k) = std::exp(complexd(0.0, -eig.eigenvalues(k) * t / hbar));
    const Matrix u = eig.eigenvectors * phases.asDiagonal() * eig.eigenvectors.adjoint();
    return DensityOperator(u * rho.matrix() * u.adjoint(), rho.tolerances());
}

// Schroedinger evolution of a pure state under H.
inline PureState evolve(const PureState& psi, const HermitianOperator& h, double t, double hbar) {
    detail::require_same_dim(psi.dim(), h.dim(), "evolve");
    if (!(hbar > 0.0)) throw ValidationError("evolve: hbar must be positive");
    const Eigendecomposition eig = eigendecompose(h);
    Vector c = eig.eigenvectors.adjoint() * psi.amplitudes();
    for (Eigen::Index k = 0; k < h.dim(); ++k)
        c(k) *= std::exp(complexd(0.0, -eig.eigenvalues(k) * t / hbar));
    return PureState(eig.eigenvectors * c);
}

}  // namespace thermalsim
