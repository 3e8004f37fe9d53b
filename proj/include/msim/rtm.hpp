#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "msim/linalg.hpp"
#include "msim/mstate.hpp"
#include "msim/rng.hpp"
#include "msim/types.hpp"

namespace msim {

/// Two-photon interferometer settings. Only the difference φ_S − φ_A is
/// observable in coincidences; α is the source amplitude split (π/4 for the
/// standard Bell-state source).
struct RTMConfig {
  double phi_S = 0.0;
  double phi_A = 0.0;
  double alpha = std::numbers::pi / 4;

  void validate() const {
    if (!std::isfinite(phi_S) || !std::isfinite(phi_A)) {
      throw std::invalid_argument("phi_S and phi_A must be finite");
    }
    if (!(alpha >= 0.0 && alpha <= std::numbers::pi / 2)) {
      throw std::out_of_range("alpha must lie in [0, pi/2]");
    }
  }
};

/// Symmetric 50/50 beam splitter, i on reflection: (1/√2)((1, i), (i, 1)).
inline CMatd beam_splitter() {
  using namespace std::complex_literals;
  CMatd bs(2, 2);
  bs << 1.0 + 0.0i, 1.0i, 1.0i, 1.0 + 0.0i;
  return bs / std::sqrt(2.0);
}

/// diag(1, e^{iφ}) acting on one arm's second beam.
inline CMatd phase_shifter(double phi) {
  if (!std::isfinite(phi)) {
    throw std::invalid_argument("phase_shifter: phi must be finite");
  }
  CMatd ps = CMatd::Zero(2, 2);
  ps(0, 0) = 1.0;
  ps(1, 1) = std::polar(1.0, phi);
  return ps;
}

/// Source state with both phase shifters applied (+φ_S on S's second beam,
/// −φ_A on A's): equals the measurement state at relative phase φ_S − φ_A.
inline StateVec rtm_pre_splitter_state(const RTMConfig& cfg) {
  cfg.validate();
  const StateVec source = build_ms({cfg.alpha, 0.0});
  const CMatd shift = kron(phase_shifter(cfg.phi_S), phase_shifter(-cfg.phi_A));
  return make_state(CVecd(shift * source.amplitudes), source.basis_labels);
}

inline const std::vector<std::string> detector_basis_labels{
    "Sd1⊗Ad1", "Sd1⊗Ad2", "Sd2⊗Ad1", "Sd2⊗Ad2"};

/// Full interferometer output in the detector basis. After the beam
/// splitters, A's two detector ports are relabeled (swapped) so that matched
/// indices are the coincidences: with the i-on-reflection convention the raw
/// same-index pairs carry probability (1−cos φ)/4, the swapped ones
/// (1+cos φ)/4.
inline StateVec rtm_state(const RTMConfig& cfg) {
  const StateVec pre = rtm_pre_splitter_state(cfg);
  const CMatd bs = beam_splitter();
  CVecd out = kron(bs, bs) * pre.amplitudes;
  CMatd port_swap(2, 2);
  port_swap << 0.0, 1.0, 1.0, 0.0;
  out = kron(CMatd::Identity(2, 2), port_swap) * out;
  return make_state(std::move(out), detector_basis_labels);
}

/// Born-rule probabilities of the four detector pairs:
/// p(i, j) = P(S fires detector i AND A fires detector j), 0-indexed.
struct JointDistribution {
  Eigen::Matrix2d p;
};

inline JointDistribution joint_probs(const StateVec& v) {
  if (v.dim() != 4) {
    throw std::invalid_argument("joint_probs: expected a dim-4 state");
  }
  if (std::abs(v.amplitudes.squaredNorm() - 1.0) > exact_tol) {
    throw std::invalid_argument("joint_probs: state is not normalized");
  }
  JointDistribution jd;
  for (Eigen::Index i = 0; i < 2; ++i) {
    for (Eigen::Index j = 0; j < 2; ++j) {
      jd.p(i, j) = std::norm(v.amplitudes(2 * i + j));
    }
  }
  return jd;
}

/// Coincidence probability at relative phase φ for the Bell-state source:
/// equals (1 + cos φ)/2.
inline double coincidence_prob(double phi) {
  const JointDistribution jd = joint_probs(rtm_state({phi, 0.0, std::numbers::pi / 4}));
  return jd.p(0, 0) + jd.p(1, 1);
}

/// Single-side detector probabilities: row sums for S, column sums for A.
inline std::pair<double, double> marginals(const StateVec& v, Subsystem side) {
  const JointDistribution jd = joint_probs(v);
  if (side == Subsystem::S) {
    return {jd.p(0, 0) + jd.p(0, 1), jd.p(1, 0) + jd.p(1, 1)};
  }
  return {jd.p(0, 0) + jd.p(1, 0), jd.p(0, 1) + jd.p(1, 1)};
}

/// Sweeps the varied side's phase over a grid while the other side is held
/// fixed, and returns the largest change seen in the *remote* side's
/// marginals. Einstein causality demands this be numerically zero.
inline double no_signaling_scan(const std::vector<double>& phase_grid, double fixed_phase,
                                Subsystem varied = Subsystem::S) {
  if (phase_grid.empty()) {
    throw std::invalid_argument("no_signaling_scan: phase grid must be nonempty");
  }
  const Subsystem remote = varied == Subsystem::S ? Subsystem::A : Subsystem::S;
  double lo1 = 1.0, hi1 = 0.0, lo2 = 1.0, hi2 = 0.0;
  for (double phase : phase_grid) {
    RTMConfig cfg;
    if (varied == Subsystem::S) {
      cfg.phi_S = phase;
      cfg.phi_A = fixed_phase;
    } else {
      cfg.phi_S = fixed_phase;
      cfg.phi_A = phase;
    }
    const auto [m1, m2] = marginals(rtm_state(cfg), remote);
    lo1 = std::min(lo1, m1);
    hi1 = std::max(hi1, m1);
    lo2 = std::min(lo2, m2);
    hi2 = std::max(hi2, m2);
  }
  return std::max(hi1 - lo1, hi2 - lo2);
}

/// Screen-coordinate description of the coincidence fringes: δ = x_S − x_A,
/// L the fringe separation.
struct FringeMap {
  double L;
  double delta;
};

/// φ = 2π δ / L, so δ = nL ↦ 2nπ (coincidence) and δ = L/2 + nL ↦ (2n+1)π
/// (anti-coincidence).
inline double fringe_to_phase(const FringeMap& f) {
  if (!(f.L > 0.0)) {
    throw std::invalid_argument("fringe_to_phase: fringe separation L must be positive");
  }
  return 2.0 * std::numbers::pi * f.delta / f.L;
}

struct CoincidenceCounts {
  std::int64_t n_trials;
  std::int64_t n_coincidence;
  std::int64_t n_anticoincidence;
  std::uint64_t seed;
};

/// n Monte Carlo detector-pair draws from the interferometer's joint
/// distribution; a trial is a coincidence when both detector indices match.
inline CoincidenceCounts simulate_counts(const RTMConfig& cfg, std::int64_t n,
                                         std::uint64_t seed) {
  if (n < 1) {
    throw std::invalid_argument("simulate_counts: trial count must be at least 1");
  }
  const JointDistribution jd = joint_probs(rtm_state(cfg));
  const double cell[4] = {jd.p(0, 0), jd.p(0, 1), jd.p(1, 0), jd.p(1, 1)};
  SplitMix64 rng(seed);
  std::int64_t coincidences = 0;
  for (std::int64_t t = 0; t < n; ++t) {
    const double u = rng.next_double();
    double cum = 0.0;
    int pick = 3;
    for (int k = 0; k < 4; ++k) {
      cum += cell[k];
      if (u < cum) {
        pick = k;
        break;
      }
    }
    if (pick == 0 || pick == 3) ++coincidences;
  }
  return {n, coincidences, n - coincidences, seed};
}

}  // namespace msim
