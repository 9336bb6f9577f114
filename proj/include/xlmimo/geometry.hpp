// SPDX-License-Identifier: Apache-2.0
//
// Ground-truth scene construction and exact channel synthesis. Everything in
// this header works from true element positions and Euclidean distances; the
// closed-form approximations live in model.hpp and are always measured
// against these exact matrices.
#pragma once

#include <cstdint>
#include <vector>

#include "xlmimo/rng.hpp"
#include "xlmimo/types.hpp"

namespace xlmimo {

struct ArrayGeometry {
  int n_tx = 64;
  int n_rx = 64;
  double carrier_hz = 100e9;
  double spacing_m = 0.0;  // 0 selects the half-wavelength default
  double r0_m = 35.0;      // Tx center to Rx center
  double theta_tx = 0.0;   // radians
  double theta_rx = 0.0;
  double phi_rx = 0.0;     // Rx array tilt out of the common plane

  double wavelength() const { return kSpeedOfLight / carrier_hz; }
  double spacing() const {
    return spacing_m > 0.0 ? spacing_m : 0.5 * wavelength();
  }
};

struct Scatterer {
  double r_tx_m = 0.0;  // Tx center to scatterer
  double r_rx_m = 0.0;  // scatterer to Rx center
  double theta_tx = 0.0;
  double theta_rx = 0.0;
  cplx gain{1.0, 0.0};
};

struct Scene {
  ArrayGeometry geometry;
  cplx los_gain{1.0, 0.0};
  std::vector<Scatterer> scatterers;  // may be empty (LoS-only scene)
};

// Random-scene parameters. Angle and tilt ranges are in radians, the path
// loss range is in dB relative to the LoS gain, and the scatterer radius
// range is in meters (zeros select [r0, 2*r0]).
struct SceneConfig {
  int n_paths = 3;
  double angle_lo = -kPi / 3.0;
  double angle_hi = kPi / 3.0;
  double tilt_lo = -kPi / 2.0;
  double tilt_hi = kPi / 2.0;
  double loss_lo_db = -25.0;
  double loss_hi_db = -20.0;
  double radius_lo_m = 0.0;
  double radius_hi_m = 0.0;
};

// Antenna elements use the signed index set {-N/2+1, ..., N/2}; storage
// index i maps to signed index i - N/2 + 1.
inline int signed_index(int i, int n) { return i - n / 2 + 1; }

// Element positions in meters. The Tx array lies on the x axis through the
// origin; the Rx array center sits at range r0 along direction theta_tx, and
// the Rx axis is rotated by (theta_rx - theta_tx) in plane and tilted by
// phi_rx out of plane.
Eigen::Vector3d tx_element_position(int n1, const ArrayGeometry& geom);
Eigen::Vector3d rx_element_position(int n2, const ArrayGeometry& geom);

double exact_distance(int n1, int n2, const ArrayGeometry& geom);

// Entry (n2, n1) = g_los * exp(-j 2 pi r / lambda) / r with r the exact
// element-to-element distance. Shape n_rx x n_tx.
CMat exact_los_channel(const Scene& scene);

// Single-bounce scatterer channel. Per-side distances come from the law of
// cosines at each array; the matrix is an outer product of the two per-side
// spherical-wave vectors and therefore has exact rank 1.
CMat exact_nlos_channel(const ArrayGeometry& geom, const Scatterer& scat);

// Draw a random scene: LoS angles and tilt first, then the LoS gain phase,
// then per scatterer (theta_tx, theta_rx, r_tx, r_rx, loss, phase).
// Deterministic under a fixed seed. Scatterer gains are calibrated so the
// drawn loss is the center-element power ratio relative to the LoS path.
// The Rng overload continues an existing stream instead.
Scene synthesize_scene(const ArrayGeometry& geom, const SceneConfig& cfg,
                       std::uint64_t seed);
Scene synthesize_scene(const ArrayGeometry& geom, const SceneConfig& cfg,
                       Rng& rng);

// Sum of the LoS matrix and all scatterer matrices.
CMat exact_channel(const Scene& scene);

}  // namespace xlmimo
