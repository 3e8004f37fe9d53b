#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "msim/linalg.hpp"
#include "msim/rng.hpp"
#include "msim/types.hpp"

namespace msim {

/// Direction of a ±1-valued spin observable on the Bloch sphere.
struct MeasurementSetting {
  double theta;  // polar angle in [0, pi]
  double az;     // azimuth in [0, 2*pi)

  void validate() const {
    if (!(theta >= 0.0 && theta <= std::numbers::pi)) {
      throw std::out_of_range("theta must lie in [0, pi]");
    }
    if (!(az >= 0.0 && az < 2 * std::numbers::pi)) {
      throw std::out_of_range("az must lie in [0, 2*pi)");
    }
  }
};

struct CHSHSettings {
  MeasurementSetting a1, a2;  // side S
  MeasurementSetting b1, b2;  // side A
};

/// n̂·σ for the unit vector n̂(θ, az); eigenvalues ±1.
inline CMatd bloch_observable(const MeasurementSetting& m) {
  m.validate();
  const double nx = std::sin(m.theta) * std::cos(m.az);
  const double ny = std::sin(m.theta) * std::sin(m.az);
  const double nz = std::cos(m.theta);
  CMatd obs(2, 2);
  obs << std::complex<double>(nz, 0.0), std::complex<double>(nx, -ny),
      std::complex<double>(nx, ny), std::complex<double>(-nz, 0.0);
  return obs;
}

/// Two-outcome correlation E(s, a) = ⟨(s·σ) ⊗ (a·σ)⟩ ∈ [−1, 1].
inline double correlator(const DensityOp& rho, const MeasurementSetting& s,
                         const MeasurementSetting& a) {
  if (rho.dim() != 4) {
    throw std::invalid_argument("correlator: expected a two-qubit density operator");
  }
  return expectation(rho, CMatd(kron(bloch_observable(s), bloch_observable(a))));
}

/// CHSH combination E(a1,b1) + E(a1,b2) + E(a2,b1) − E(a2,b2).
inline double chsh(const DensityOp& rho, const CHSHSettings& st) {
  return correlator(rho, st.a1, st.b1) + correlator(rho, st.a1, st.b2) +
         correlator(rho, st.a2, st.b1) - correlator(rho, st.a2, st.b2);
}

struct CHSHOptimum {
  double value;  // best |S| found
  CHSHSettings settings;
};

namespace detail {

// Angle layout: {a1.θ, a1.az, a2.θ, a2.az, b1.θ, b1.az, b2.θ, b2.az};
// even slots are polar angles, odd slots azimuths.
using AngleVec = std::array<double, 8>;

inline double canonical_angle(std::size_t coord, double x) {
  if (coord % 2 == 0) {
    return std::clamp(x, 0.0, std::numbers::pi);
  }
  x = std::fmod(x, 2 * std::numbers::pi);
  if (x < 0.0) x += 2 * std::numbers::pi;
  // fmod can round up to the open bound itself
  if (x >= 2 * std::numbers::pi) x = 0.0;
  return x;
}

inline CHSHSettings settings_from(const AngleVec& x) {
  return {{x[0], x[1]}, {x[2], x[3]}, {x[4], x[5]}, {x[6], x[7]}};
}

}  // namespace detail

/// Maximizes |CHSH| over all eight setting angles: deterministic multi-start
/// per-coordinate sweeps on a coarse grid, then coordinate descent with step
/// halving down to 1e-6. The best value found is monotonically nondecreasing
/// in refine_iters.
inline CHSHOptimum optimize_chsh(const DensityOp& rho,
                                 double grid_step = std::numbers::pi / 12,
                                 int refine_iters = 200) {
  if (!(grid_step > 0.0)) {
    throw std::invalid_argument("optimize_chsh: grid_step must be positive");
  }
  if (refine_iters < 0) {
    throw std::invalid_argument("optimize_chsh: refine_iters must be nonnegative");
  }
  if (rho.dim() != 4) {
    throw std::invalid_argument("optimize_chsh: expected a two-qubit density operator");
  }

  const auto objective = [&rho](const detail::AngleVec& x) {
    return std::abs(chsh(rho, detail::settings_from(x)));
  };

  const double pi = std::numbers::pi;
  std::vector<detail::AngleVec> starts = {
      {0, 0, 0, 0, 0, 0, 0, 0},
      // planar textbook optimum for the phase-0 Bell state
      {0, 0, pi / 2, 0, pi / 4, 0, pi / 4, pi},
      // same geometry rotated into the y-z plane
      {0, 0, pi / 2, pi / 2, pi / 4, pi / 2, pi / 4, 3 * pi / 2},
  };
  SplitMix64 start_rng(0x6D73696D63687368ULL);
  while (starts.size() < 16) {
    detail::AngleVec x;
    for (std::size_t c = 0; c < 8; ++c) {
      x[c] = c % 2 == 0 ? start_rng.next_double() * pi : start_rng.next_double() * 2 * pi;
    }
    starts.push_back(x);
  }

  double best_value = -1.0;
  detail::AngleVec best_angles{};
  for (const detail::AngleVec& start : starts) {
    detail::AngleVec x = start;
    double fx = objective(x);

    // Coarse stage: cyclic per-coordinate scans over the full angle grid.
    for (int pass = 0; pass < 3; ++pass) {
      for (std::size_t c = 0; c < 8; ++c) {
        const double range = c % 2 == 0 ? pi : 2 * pi;
        double best_coord = x[c];
        for (double cand = 0.0; cand < range + grid_step / 2; cand += grid_step) {
          detail::AngleVec trial = x;
          trial[c] = detail::canonical_angle(c, cand);
          const double ft = objective(trial);
          if (ft > fx) {
            fx = ft;
            best_coord = trial[c];
          }
        }
        x[c] = best_coord;
      }
    }

    // Refinement: ±step moves per coordinate, halving on stalled passes.
    double step = grid_step;
    for (int pass = 0; pass < refine_iters && step >= 1e-6; ++pass) {
      bool improved = false;
      for (std::size_t c = 0; c < 8; ++c) {
        for (double dir : {-1.0, 1.0}) {
          detail::AngleVec trial = x;
          trial[c] = detail::canonical_angle(c, x[c] + dir * step);
          const double ft = objective(trial);
          if (ft > fx) {
            fx = ft;
            x = trial;
            improved = true;
          }
        }
      }
      if (!improved) step *= 0.5;
    }

    if (fx > best_value) {
      best_value = fx;
      best_angles = x;
    }
  }
  return {best_value, detail::settings_from(best_angles)};
}

/// Best |CHSH| found by the grid + coordinate-descent search.
inline double max_chsh(const DensityOp& rho, double grid_step = std::numbers::pi / 12,
                       int refine_iters = 200) {
  return optimize_chsh(rho, grid_step, refine_iters).value;
}

}  // namespace msim
