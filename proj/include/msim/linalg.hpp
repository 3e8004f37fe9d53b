#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <utility>

#include "msim/types.hpp"

namespace msim {

enum class Subsystem { S, A };

/// Raised when an iterative solver fails to converge within its budget.
struct ConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Kronecker product with the bipartite index convention: composite index
/// k = rows_b * i + j, so for 2x2 factors (v ⊗ w)[2i + j] = v[i] w[j].
template <typename DerivedA, typename DerivedB>
Eigen::Matrix<typename DerivedA::Scalar, Eigen::Dynamic, Eigen::Dynamic> kron(
    const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  Eigen::Matrix<typename DerivedA::Scalar, Eigen::Dynamic, Eigen::Dynamic> out(
      a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    for (Eigen::Index c = 0; c < a.cols(); ++c) {
      out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b.derived();
    }
  }
  return out;
}

/// Tensor product of labeled states; labels compose as "left⊗right".
template <typename Scalar>
StateVector<Scalar> kron(const StateVector<Scalar>& a, const StateVector<Scalar>& b) {
  StateVector<Scalar> out;
  out.amplitudes = kron(a.amplitudes, b.amplitudes);
  out.basis_labels.reserve(a.basis_labels.size() * b.basis_labels.size());
  for (const auto& la : a.basis_labels) {
    for (const auto& lb : b.basis_labels) {
      out.basis_labels.push_back(la + "⊗" + lb);
    }
  }
  return out;
}

/// Conjugate transpose: (m†)_{jk} = conj(m_{kj}).
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> dagger(
    const Eigen::MatrixBase<Derived>& m) {
  return m.adjoint();
}

/// Matrix-vector product. The result keeps the input labels and is NOT
/// renormalized; callers apply their own normalization checks.
template <typename Scalar>
StateVector<Scalar> apply_operator(const CMat<Scalar>& m, const StateVector<Scalar>& v) {
  if (m.cols() != v.dim()) {
    throw std::invalid_argument("apply_operator: dimension mismatch");
  }
  return {m * v.amplitudes, v.basis_labels};
}

template <typename Derived>
typename Derived::Scalar trace(const Eigen::MatrixBase<Derived>& m) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("trace: matrix must be square");
  }
  return m.trace();
}

template <typename Derived>
bool is_hermitian(const Eigen::MatrixBase<Derived>& m, double tol = exact_tol) {
  if (m.rows() != m.cols()) return false;
  return (m.derived() - m.derived().adjoint()).cwiseAbs().maxCoeff() <= tol;
}

/// Hermitian eigendecomposition, eigenvalues descending. Backed by Eigen's
/// self-adjoint solver; throws ConvergenceError if the iteration budget is
/// exhausted.
template <typename Scalar>
Spectrum<Scalar> eig_hermitian(const CMat<Scalar>& m) {
  if (!is_hermitian(m)) {
    throw std::invalid_argument("eig_hermitian: matrix is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<CMat<Scalar>> solver(m);
  if (solver.info() != Eigen::Success) {
    throw ConvergenceError("eig_hermitian: eigensolver did not converge");
  }
  Spectrum<Scalar> spectrum;
  spectrum.eigenvalues = solver.eigenvalues().reverse();
  spectrum.eigenvectors = solver.eigenvectors().rowwise().reverse();
  return spectrum;
}

/// Checks the DensityOperator invariants, throwing on the first violation.
template <typename Scalar>
void validate_density(const CMat<Scalar>& m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw std::invalid_argument("density operator must be square");
  }
  if (!all_finite(m)) {
    throw std::invalid_argument("density operator has non-finite entries");
  }
  if (!is_hermitian(m)) {
    throw std::invalid_argument("density operator is not Hermitian");
  }
  if (std::abs(m.trace() - std::complex<Scalar>(1)) > exact_tol) {
    throw std::invalid_argument("density operator trace is not 1");
  }
  Eigen::SelfAdjointEigenSolver<CMat<Scalar>> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw ConvergenceError("validate_density: eigensolver did not converge");
  }
  if (solver.eigenvalues().minCoeff() < -iter_tol) {
    throw std::invalid_argument("density operator is not positive semidefinite");
  }
}

template <typename Scalar = double>
DensityOperator<Scalar> make_density(CMat<Scalar> m) {
  validate_density(m);
  return {std::move(m)};
}

/// Reduced density operator of a 4x4 bipartite state: keep = S traces out
/// the apparatus index, keep = A the system index.
template <typename Scalar>
DensityOperator<Scalar> partial_trace(const DensityOperator<Scalar>& rho, Subsystem keep) {
  validate_density(rho.matrix);
  if (rho.dim() != 4) {
    throw std::invalid_argument("partial_trace: expected a 4x4 bipartite density operator");
  }
  CMat<Scalar> out = CMat<Scalar>::Zero(2, 2);
  for (Eigen::Index i = 0; i < 2; ++i) {
    for (Eigen::Index j = 0; j < 2; ++j) {
      for (Eigen::Index k = 0; k < 2; ++k) {
        if (keep == Subsystem::S) {
          out(i, j) += rho.matrix(2 * i + k, 2 * j + k);
        } else {
          out(i, j) += rho.matrix(2 * k + i, 2 * k + j);
        }
      }
    }
  }
  out = ((out + out.adjoint()) / Scalar(2)).eval();  // scrub Hermiticity dust
  return make_density(std::move(out));
}

/// ⟨obs⟩ = Re Tr(ρ·obs) for a Hermitian observable.
template <typename Scalar>
Scalar expectation(const DensityOperator<Scalar>& rho, const CMat<Scalar>& obs) {
  if (obs.rows() != rho.dim() || obs.cols() != rho.dim()) {
    throw std::invalid_argument("expectation: dimension mismatch");
  }
  if (!is_hermitian(obs)) {
    throw std::invalid_argument("expectation: observable is not Hermitian");
  }
  const std::complex<Scalar> t = (rho.matrix * obs).trace();
  if (std::abs(t.imag()) >= iter_tol) {
    throw std::runtime_error("expectation: trace has a non-negligible imaginary part");
  }
  return t.real();
}

/// Von Neumann entropy −Σ λ ln λ in nats; eigenvalues within eig_clamp_tol
/// of zero contribute nothing.
template <typename Scalar>
Scalar vn_entropy(const DensityOperator<Scalar>& rho) {
  const Spectrum<Scalar> spectrum = eig_hermitian(rho.matrix);
  Scalar s = 0;
  for (Eigen::Index k = 0; k < spectrum.eigenvalues.size(); ++k) {
    const Scalar lambda = spectrum.eigenvalues(k);
    if (lambda < eig_clamp_tol) continue;
    s -= lambda * std::log(lambda);
  }
  return s;
}

}  // namespace msim
