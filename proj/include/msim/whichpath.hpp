#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace msim {

/// Fraunhofer two-slit geometry; x_points are the sampled screen coordinates.
struct SlitGeometry {
  double slit_separation;
  double wavelength;
  double screen_distance;
  Eigen::VectorXd x_points;

  void validate() const {
    if (!(slit_separation > 0.0) || !(wavelength > 0.0) || !(screen_distance > 0.0)) {
      throw std::invalid_argument("slit geometry lengths must be positive");
    }
    if (x_points.size() == 0) {
      throw std::invalid_argument("x_points must be nonempty");
    }
    for (Eigen::Index k = 1; k < x_points.size(); ++k) {
      if (!(x_points(k) > x_points(k - 1))) {
        throw std::invalid_argument("x_points must be strictly increasing");
      }
    }
  }

  double fringe_length() const { return wavelength * screen_distance / slit_separation; }
};

/// Overlap ⟨a1|a2⟩ of the detector states tagging the two slits: |c| = 1
/// means no which-path information, c = 0 full information.
struct WhichPathOverlap {
  std::complex<double> c;

  void validate() const {
    if (!(std::abs(c) <= 1.0 + 1e-12)) {
      throw std::invalid_argument("which-path overlap must satisfy |c| <= 1");
    }
  }
};

/// Default screen grid: exactly `periods` central fringe periods sampled
/// uniformly, endpoint-exclusive so each period contributes whole. The grid
/// contains x = 0, putting fringe extrema on sample points for real overlaps.
inline SlitGeometry default_slit_geometry(int periods = 3, int samples_per_period = 1000,
                                          double slit_separation = 1.0,
                                          double wavelength = 1e-3,
                                          double screen_distance = 1000.0) {
  if (periods < 1 || periods % 2 == 0) {
    throw std::invalid_argument("periods must be a positive odd count");
  }
  if (samples_per_period < 2) {
    throw std::invalid_argument("samples_per_period must be at least 2");
  }
  if (!(slit_separation > 0.0) || !(wavelength > 0.0) || !(screen_distance > 0.0)) {
    throw std::invalid_argument("slit geometry lengths must be positive");
  }
  SlitGeometry g;
  g.slit_separation = slit_separation;
  g.wavelength = wavelength;
  g.screen_distance = screen_distance;  // defaults give fringe length L = 1
  const double L = g.fringe_length();
  const Eigen::Index n = static_cast<Eigen::Index>(periods) * samples_per_period;
  g.x_points.resize(n);
  const double x0 = -0.5 * periods * L;
  const double dx = L / samples_per_period;
  for (Eigen::Index k = 0; k < n; ++k) {
    g.x_points(k) = x0 + static_cast<double>(k) * dx;
  }
  return g;
}

/// Screen intensity with equal-amplitude plane-wave slits:
/// I ∝ |ψ1|² + |ψ2|² + 2 Re[ψ1 conj(ψ2) conj(c)], normalized to mean 1 over
/// the sampled points. The straight-line length common to both paths is
/// dropped (a global phase).
inline Eigen::VectorXd screen_intensity(const SlitGeometry& g, const WhichPathOverlap& w) {
  g.validate();
  w.validate();
  const double k = 2 * std::numbers::pi / g.wavelength;
  const double half = g.slit_separation / 2;
  const std::complex<double> amp = 1.0 / std::sqrt(2.0);
  Eigen::VectorXd intensity(g.x_points.size());
  for (Eigen::Index n = 0; n < g.x_points.size(); ++n) {
    const double x = g.x_points(n);
    const double path1 = (x + half) * (x + half) / (2 * g.screen_distance);
    const double path2 = (x - half) * (x - half) / (2 * g.screen_distance);
    const std::complex<double> psi1 = amp * std::polar(1.0, k * path1);
    const std::complex<double> psi2 = amp * std::polar(1.0, k * path2);
    intensity(n) = std::norm(psi1) + std::norm(psi2) +
                   2.0 * std::real(psi1 * std::conj(psi2) * std::conj(w.c));
  }
  const double mean = intensity.mean();
  if (!(mean > 0.0)) {
    throw std::runtime_error("screen_intensity: degenerate pattern with nonpositive mean");
  }
  return intensity / mean;
}

/// Fringe visibility (I_max − I_min)/(I_max + I_min) over the sampled points.
inline double visibility(const Eigen::VectorXd& intensities) {
  if (intensities.size() == 0) {
    throw std::invalid_argument("visibility: intensity sequence is empty");
  }
  if (intensities.cwiseAbs().maxCoeff() == 0.0) {
    throw std::invalid_argument("visibility: all-zero intensity sequence");
  }
  const double hi = intensities.maxCoeff();
  const double lo = intensities.minCoeff();
  return (hi - lo) / (hi + lo);
}

}  // namespace msim
