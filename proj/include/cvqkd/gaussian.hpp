// Copyright 2026 The cvqkd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Gaussian states in the covariance-matrix picture.
//
// Quadratures are ordered (q_1, p_1, ..., q_n, p_n). Covariance matrices are
// vacuum-normalized: the vacuum has CM = identity and a state is physical iff
// gamma + iJ >= 0, i.e. every symplectic eigenvalue is >= 1.

#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "cvqkd/errors.hpp"

namespace cvqkd {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Default slack on the symplectic eigenvalue bound (mu >= 1 - tol).
inline constexpr double kPhysicalTol = 1e-9;
/// Maximum |gamma - gamma^T| entry accepted as symmetric.
inline constexpr double kSymmetryTol = 1e-12;

class SymplecticForm {
   public:
    explicit SymplecticForm(int modes) : modes_(modes) {
        if (modes < 1) throw DomainError("symplectic form needs at least one mode");
        matrix_ = Matrix::Zero(2 * modes, 2 * modes);
        for (int k = 0; k < modes; ++k) {
            matrix_(2 * k, 2 * k + 1) = 1.0;
            matrix_(2 * k + 1, 2 * k) = -1.0;
        }
    }

    int modes() const { return modes_; }
    const Matrix& matrix() const { return matrix_; }

   private:
    int modes_;
    Matrix matrix_;
};

inline SymplecticForm symplectic_form(int modes) { return SymplecticForm(modes); }

class CovarianceMatrix {
   public:
    explicit CovarianceMatrix(Matrix entries) : entries_(std::move(entries)) {
        if (entries_.rows() != entries_.cols() || entries_.rows() == 0 || entries_.rows() % 2 != 0)
            throw DomainError("covariance matrix must be 2n x 2n with n >= 1");
        if (!entries_.allFinite()) throw DomainError("covariance matrix has non-finite entries");
        if ((entries_ - entries_.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol)
            throw DomainError("covariance matrix is not symmetric");
    }

    static CovarianceMatrix identity(int modes) {
        return CovarianceMatrix(Matrix::Identity(2 * modes, 2 * modes));
    }

    int modes() const { return static_cast<int>(entries_.rows() / 2); }
    const Matrix& matrix() const { return entries_; }
    double operator()(Eigen::Index i, Eigen::Index j) const { return entries_(i, j); }

   private:
    Matrix entries_;
};

class DisplacementVector {
   public:
    explicit DisplacementVector(Vector entries) : entries_(std::move(entries)) {
        if (entries_.size() == 0 || entries_.size() % 2 != 0)
            throw DomainError("displacement vector must have length 2n with n >= 1");
    }

    static DisplacementVector zero(int modes) {
        return DisplacementVector(Vector::Zero(2 * modes));
    }

    int modes() const { return static_cast<int>(entries_.size() / 2); }
    const Vector& vector() const { return entries_; }

   private:
    Vector entries_;
};

/// Symplectic eigenvalues of a CM, ascending.
///
/// iJ gamma has real eigenvalues in +/- pairs; their moduli are sorted and
/// each adjacent pair is averaged into one symplectic eigenvalue.
inline std::vector<double> symplectic_spectrum(const CovarianceMatrix& cm) {
    const int n = cm.modes();
    const Matrix j = symplectic_form(n).matrix();
    const Eigen::MatrixXcd ij_gamma =
        std::complex<double>(0.0, 1.0) * (j * cm.matrix()).cast<std::complex<double>>();
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(ij_gamma, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) throw DomainError("eigensolver failed on iJ gamma");

    std::vector<double> moduli(2 * n);
    for (int k = 0; k < 2 * n; ++k) moduli[k] = std::abs(solver.eigenvalues()(k));
    std::sort(moduli.begin(), moduli.end());

    std::vector<double> spectrum(n);
    for (int k = 0; k < n; ++k) spectrum[k] = 0.5 * (moduli[2 * k] + moduli[2 * k + 1]);
    return spectrum;
}

inline bool is_physical(const CovarianceMatrix& cm, double tol = kPhysicalTol) {
    return symplectic_spectrum(cm).front() >= 1.0 - tol;
}

/// Mean vector and CM of a physical Gaussian state.
struct GaussianState {
    CovarianceMatrix cm;
    DisplacementVector dv;

    GaussianState(CovarianceMatrix c, DisplacementVector d, double tol = kPhysicalTol)
        : cm(std::move(c)), dv(std::move(d)) {
        if (cm.modes() != dv.modes()) throw DomainError("CM and DV mode counts differ");
        if (!is_physical(cm, tol)) throw DomainError("covariance matrix violates gamma + iJ >= 0");
    }

    explicit GaussianState(CovarianceMatrix c)
        : GaussianState(c, DisplacementVector::zero(c.modes())) {}

    int modes() const { return cm.modes(); }
};

/// A CM together with the modes that form subsystem A.
class PartitionedState {
   public:
    PartitionedState(CovarianceMatrix cm, std::vector<int> subsystem_a)
        : cm_(std::move(cm)), subsystem_a_(std::move(subsystem_a)) {
        const int n = cm_.modes();
        std::sort(subsystem_a_.begin(), subsystem_a_.end());
        if (subsystem_a_.empty()) throw DomainError("subsystem A is empty");
        if (std::adjacent_find(subsystem_a_.begin(), subsystem_a_.end()) != subsystem_a_.end())
            throw DomainError("subsystem A lists a mode twice");
        if (subsystem_a_.front() < 0 || subsystem_a_.back() >= n)
            throw DomainError("subsystem A refers to a mode outside the state");
        if (static_cast<int>(subsystem_a_.size()) == n)
            throw DomainError("subsystem A must be a proper subset of the modes");
    }

    const CovarianceMatrix& cm() const { return cm_; }
    const std::vector<int>& subsystem_a() const { return subsystem_a_; }
    int modes_a() const { return static_cast<int>(subsystem_a_.size()); }
    int modes_b() const { return cm_.modes() - modes_a(); }

   private:
    CovarianceMatrix cm_;
    std::vector<int> subsystem_a_;
};

/// det(gamma)^(-1/2).
inline double purity(const CovarianceMatrix& cm) {
    if (!is_physical(cm)) throw DomainError("purity: covariance matrix is not physical");
    return 1.0 / std::sqrt(cm.matrix().determinant());
}

/// theta_A gamma theta_A^T, with theta_A flipping the momentum of every mode in A.
inline CovarianceMatrix partial_transpose(const PartitionedState& p) {
    Matrix out = p.cm().matrix();
    for (int mode : p.subsystem_a()) {
        out.row(2 * mode + 1) *= -1.0;
        out.col(2 * mode + 1) *= -1.0;
    }
    return CovarianceMatrix(std::move(out));
}

/// PPT is only equivalent to separability for 1 x N splits.
inline bool is_nppt(const PartitionedState& p, double tol = kPhysicalTol) {
    if (p.modes_a() != 1 && p.modes_b() != 1)
        throw DomainError("NPPT test is only decisive for 1 x N partitions");
    return !is_physical(partial_transpose(p), tol);
}

/// -sum log2 min(mu_i, 1) over the symplectic spectrum of the partial transpose.
inline double log_negativity(const PartitionedState& p) {
    double ln = 0.0;
    for (double mu : symplectic_spectrum(partial_transpose(p)))
        if (mu < 1.0) ln -= std::log2(mu);
    return ln;
}

namespace detail {

inline Matrix momentum_reflection(int modes) {
    Matrix theta = Matrix::Identity(2 * modes, 2 * modes);
    for (int k = 0; k < modes; ++k) theta(2 * k + 1, 2 * k + 1) = -1.0;
    return theta;
}

// f(M) for symmetric M through its eigendecomposition.
template <class F>
Matrix symmetric_apply(const Matrix& m, F&& f) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (m + m.transpose()));
    if (eig.info() != Eigen::Success) throw DomainError("symmetric eigensolver failed");
    const Vector mapped = eig.eigenvalues().unaryExpr(f);
    return eig.eigenvectors() * mapped.asDiagonal() * eig.eigenvectors().transpose();
}

}  // namespace detail

/// Pure 2n-mode CM whose first n modes reduce to `cm`:
///
///   [ gamma   C               ]     C = J sqrt(-(J gamma)^2 - I) theta
///   [ C^T     theta gamma theta ]
///
/// -(J gamma)^2 is similar to the symmetric S = -gamma^{1/2} J gamma J gamma^{1/2},
/// so the square root is taken as gamma^{-1/2} sqrt(S - I) gamma^{1/2}.
inline CovarianceMatrix purify(const CovarianceMatrix& cm) {
    if (!is_physical(cm)) throw DomainError("purify: covariance matrix is not physical");
    const int n = cm.modes();
    const Matrix& gamma = cm.matrix();
    const Matrix j = symplectic_form(n).matrix();
    const Matrix theta = detail::momentum_reflection(n);

    const Matrix root = detail::symmetric_apply(gamma, [](double v) { return std::sqrt(v); });
    const Matrix inv_root =
        detail::symmetric_apply(gamma, [](double v) { return 1.0 / std::sqrt(v); });
    const Matrix shifted = -root * j * gamma * j * root - Matrix::Identity(2 * n, 2 * n);

    const Matrix sqrt_shifted = detail::symmetric_apply(shifted, [](double v) {
        if (v < -1e-9) throw DomainError("purify: -(J gamma)^2 - I is not positive semidefinite");
        return v < 1e-12 ? 0.0 : std::sqrt(v);
    });
    const Matrix c = j * (inv_root * sqrt_shifted * root) * theta;

    Matrix out(4 * n, 4 * n);
    out.topLeftCorner(2 * n, 2 * n) = gamma;
    out.topRightCorner(2 * n, 2 * n) = c;
    out.bottomLeftCorner(2 * n, 2 * n) = c.transpose();
    out.bottomRightCorner(2 * n, 2 * n) = theta * gamma * theta.transpose();
    // Rounding in the similarity transform leaves ~1e-16 asymmetry.
    Matrix sym = 0.5 * (out + out.transpose());
    sym.topLeftCorner(2 * n, 2 * n) = gamma;
    return CovarianceMatrix(std::move(sym));
}

/// tr(rho_1 rho_2) for Gaussian states:
///
///   det((g1 + g2)/2)^{-1/2} exp(-dd^T (g1 + g2)^{-1} dd),  dd = d2 - d1.
///
/// This is the (Bures-Uhlmann) fidelity only when one of the states is pure.
inline double hs_fidelity(const GaussianState& s1, const GaussianState& s2) {
    if (s1.modes() != s2.modes()) throw DomainError("hs_fidelity: mode counts differ");
    const Matrix sum = s1.cm.matrix() + s2.cm.matrix();
    Eigen::LLT<Matrix> llt(sum);
    if (llt.info() != Eigen::Success) throw DomainError("hs_fidelity: gamma1 + gamma2 is singular");
    const Vector dd = s2.dv.vector() - s1.dv.vector();
    const double quad = dd.dot(llt.solve(dd));
    return std::exp(-quad) / std::sqrt((0.5 * sum).determinant());
}

/// Gaussian Wigner function (pi^n sqrt(det gamma))^{-1} exp(-(z-d)^T gamma^{-1} (z-d)).
inline double wigner_density(const GaussianState& s, const Vector& point) {
    if (point.size() != s.dv.vector().size())
        throw DomainError("wigner_density: point has wrong length");
    Eigen::LLT<Matrix> llt(s.cm.matrix());
    if (llt.info() != Eigen::Success)
        throw DomainError("wigner_density: singular covariance matrix");
    const Vector z = point - s.dv.vector();
    const double det = s.cm.matrix().determinant();
    return std::exp(-z.dot(llt.solve(z))) /
           (std::pow(std::numbers::pi, s.modes()) * std::sqrt(det));
}

}  // namespace cvqkd
