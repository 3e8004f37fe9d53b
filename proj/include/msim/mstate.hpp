#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "msim/linalg.hpp"
#include "msim/rng.hpp"
#include "msim/types.hpp"

namespace msim {

/// Angles of the general qubit superposition cos α |s1⟩ + e^{iφ} sin α |s2⟩.
struct SuperpositionParams {
  double alpha = std::numbers::pi / 4;
  double phi = 0.0;

  void validate() const {
    if (!(alpha >= 0.0 && alpha <= std::numbers::pi / 2)) {
      throw std::out_of_range("alpha must lie in [0, pi/2]");
    }
    if (!(phi >= 0.0 && phi < 2 * std::numbers::pi)) {
      throw std::out_of_range("phi must lie in [0, 2*pi)");
    }
  }
};

inline const std::vector<std::string> system_basis_labels{"s1", "s2"};
inline const std::vector<std::string> apparatus_basis_labels{"a1", "a2"};
inline const std::vector<std::string> bipartite_basis_labels{
    "s1⊗a1", "s1⊗a2", "s2⊗a1", "s2⊗a2"};

inline StateVec superposition(const SuperpositionParams& p) {
  p.validate();
  CVecd amps(2);
  amps << std::cos(p.alpha), std::polar(std::sin(p.alpha), p.phi);
  return make_state(std::move(amps), system_basis_labels);
}

/// Apparatus "ready" state |a1⟩.
inline StateVec apparatus_ready() {
  CVecd amps(2);
  amps << 1.0, 0.0;
  return make_state(std::move(amps), apparatus_basis_labels);
}

/// Ideal von Neumann interaction on the bipartite basis:
/// |s1 a1⟩→|s1 a1⟩, |s2 a1⟩→|s2 a2⟩, |s1 a2⟩→|s1 a2⟩, |s2 a2⟩→|s2 a1⟩.
inline CMatd measurement_unitary() {
  CMatd u = CMatd::Zero(4, 4);
  u(0, 0) = 1.0;
  u(1, 1) = 1.0;
  u(3, 2) = 1.0;
  u(2, 3) = 1.0;
  return u;
}

/// Post-measurement entangled state cos α |s1 a1⟩ + e^{iφ} sin α |s2 a2⟩ in
/// the order |s1 a1⟩, |s1 a2⟩, |s2 a1⟩, |s2 a2⟩.
inline StateVec build_ms(const SuperpositionParams& p) {
  p.validate();
  CVecd amps(4);
  amps << std::cos(p.alpha), 0.0, 0.0, std::polar(std::sin(p.alpha), p.phi);
  return make_state(std::move(amps), bipartite_basis_labels);
}

/// Pure-state density operator |v⟩⟨v|; rejects unnormalized input.
inline DensityOp density(const StateVec& v) {
  if (std::abs(v.amplitudes.squaredNorm() - 1.0) > exact_tol) {
    throw std::invalid_argument("density: state vector is not normalized");
  }
  return make_density(CMatd(v.amplitudes * v.amplitudes.adjoint()));
}

/// (ρ'_S, ρ'_A) of the measurement state; both are diag(cos²α, sin²α) for
/// every φ.
inline std::pair<DensityOp, DensityOp> reduced_pair(const SuperpositionParams& p) {
  const DensityOp rho = density(build_ms(p));
  return {partial_trace(rho, Subsystem::S), partial_trace(rho, Subsystem::A)};
}

/// Expectations of the two coherence observables; both vanish iff the qubit
/// carries no superposition between the basis states.
struct CoherenceWitness {
  double q;
  double p;
};

/// Q_S = |s1⟩⟨s2| + |s2⟩⟨s1|.
inline CMatd coherence_observable_q() {
  CMatd m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}

/// P_S = i|s1⟩⟨s2| − i|s2⟩⟨s1|.
inline CMatd coherence_observable_p() {
  using namespace std::complex_literals;
  CMatd m(2, 2);
  m << 0.0 + 0.0i, 1.0i, -1.0i, 0.0 + 0.0i;
  return m;
}

inline CoherenceWitness coherence_witness(const DensityOp& rho) {
  if (rho.dim() != 2) {
    throw std::invalid_argument("coherence_witness: expected a qubit density operator");
  }
  return {expectation(rho, coherence_observable_q()), expectation(rho, coherence_observable_p())};
}

/// The fully collapsed candidate state: cos²α |s1 a1⟩⟨s1 a1| + sin²α |s2 a2⟩⟨s2 a2|.
inline DensityOp collapsed_mixture(const SuperpositionParams& p) {
  p.validate();
  const double c = std::cos(p.alpha);
  const double s = std::sin(p.alpha);
  CMatd m = CMatd::Zero(4, 4);
  m(0, 0) = c * c;
  m(3, 3) = s * s;
  return make_density(std::move(m));
}

/// True iff the two eigenvalues of a qubit density operator coincide within
/// tol (the only case where the mixture's eigenbasis is ambiguous).
inline bool degeneracy_flag(const DensityOp& rho, double tol) {
  if (rho.dim() != 2) {
    throw std::invalid_argument("degeneracy_flag: expected a qubit density operator");
  }
  const Spectrumd spectrum = eig_hermitian(rho.matrix);
  return std::abs(spectrum.eigenvalues(0) - spectrum.eigenvalues(1)) < tol;
}

/// Outcome tallies of repeated local measurements; outcome1 ↔ |s1⟩
/// ("undecayed"/"alive"), outcome2 ↔ |s2⟩ ("decayed"/"dead").
struct EnsembleCounts {
  std::int64_t n_trials;
  std::int64_t n_outcome1;
  std::int64_t n_outcome2;
  std::uint64_t seed;
};

/// n Born-rule draws with P(outcome1) = cos²α; bit-reproducible for a fixed
/// (params, n, seed) triple.
inline EnsembleCounts sample_outcomes(const SuperpositionParams& p, std::int64_t n,
                                      std::uint64_t seed) {
  p.validate();
  if (n < 1) {
    throw std::invalid_argument("sample_outcomes: trial count must be at least 1");
  }
  const double p1 = std::cos(p.alpha) * std::cos(p.alpha);
  SplitMix64 rng(seed);
  std::int64_t n1 = 0;
  for (std::int64_t i = 0; i < n; ++i) {
    if (rng.next_double() < p1) ++n1;
  }
  return {n, n1, n - n1, seed};
}

}  // namespace msim
