#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

namespace msim {

// Tolerances used throughout: exact_tol for algebraic identities on directly
// constructed values, iter_tol for anything that passed through an iterative
// solver. Eigenvalues within eig_clamp_tol of zero are treated as exact zeros
// by the entropy routines.
inline constexpr double exact_tol = 1e-12;
inline constexpr double iter_tol = 1e-10;
inline constexpr double eig_clamp_tol = 1e-12;

template <typename Scalar>
using CMat = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using CVec = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;
template <typename Scalar>
using RVec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using CMatd = CMat<double>;
using CVecd = CVec<double>;

/// Normalized complex amplitudes over a labeled basis.
template <typename Scalar = double>
struct StateVector {
  CVec<Scalar> amplitudes;
  std::vector<std::string> basis_labels;

  Eigen::Index dim() const { return amplitudes.size(); }
};

/// Hermitian, unit-trace, positive-semidefinite matrix. Construct through
/// make_density() so the invariants are actually checked.
template <typename Scalar = double>
struct DensityOperator {
  CMat<Scalar> matrix;

  Eigen::Index dim() const { return matrix.rows(); }
};

/// Eigendecomposition of a Hermitian matrix: eigenvalues sorted descending,
/// matching orthonormal eigenvectors as columns.
template <typename Scalar = double>
struct Spectrum {
  RVec<Scalar> eigenvalues;
  CMat<Scalar> eigenvectors;
};

using StateVec = StateVector<double>;
using DensityOp = DensityOperator<double>;
using Spectrumd = Spectrum<double>;

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  return m.allFinite();
}

/// Validating constructor for StateVector: unit norm within exact_tol,
/// one distinct label per basis entry, finite amplitudes.
template <typename Scalar = double>
StateVector<Scalar> make_state(CVec<Scalar> amplitudes, std::vector<std::string> basis_labels) {
  if (amplitudes.size() == 0) {
    throw std::invalid_argument("state vector must have positive dimension");
  }
  if (!all_finite(amplitudes)) {
    throw std::invalid_argument("state vector has non-finite amplitudes");
  }
  if (static_cast<Eigen::Index>(basis_labels.size()) != amplitudes.size()) {
    throw std::invalid_argument("basis_labels length must equal the state dimension");
  }
  std::unordered_set<std::string> seen(basis_labels.begin(), basis_labels.end());
  if (seen.size() != basis_labels.size()) {
    throw std::invalid_argument("basis_labels must be distinct");
  }
  if (std::abs(amplitudes.squaredNorm() - Scalar(1)) > exact_tol) {
    throw std::invalid_argument("state vector is not normalized");
  }
  return {std::move(amplitudes), std::move(basis_labels)};
}

namespace detail {

inline std::string format_complex(const std::complex<double>& z) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g%+.6gi", z.real(), z.imag());
  return buf;
}

}  // namespace detail

/// Fixed-width "a+bi" rendering with 6 significant digits, for failure
/// messages and debug dumps.
inline std::string debug_string(const CMatd& m) {
  std::string out;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      std::string cell = detail::format_complex(m(r, c));
      if (cell.size() < 22) cell.insert(0, 22 - cell.size(), ' ');
      out += cell;
    }
    out += '\n';
  }
  return out;
}

inline std::string debug_string(const CVecd& v) {
  return debug_string(CMatd(v));
}

inline std::string debug_string(const StateVec& v) {
  std::string out;
  for (Eigen::Index k = 0; k < v.dim(); ++k) {
    std::string cell = detail::format_complex(v.amplitudes(k));
    if (cell.size() < 22) cell.insert(0, 22 - cell.size(), ' ');
    out += cell + "  |" + v.basis_labels[static_cast<std::size_t>(k)] + ">\n";
  }
  return out;
}

}  // namespace msim
