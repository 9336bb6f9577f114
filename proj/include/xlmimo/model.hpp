// SPDX-License-Identifier: Apache-2.0
//
// Closed-form channel representations: quadratic-phase steering vectors, the
// index-coupling window, the five-parameter LoS tuple, and the unified
// multi-path sum. Coefficients are stored in pure index units, so a steering
// phase is pi*(b*m + k*m^2) over the signed index m and the window phase is
// 2*pi*omega*n1*n2; the array spacing and wavelength are folded in when the
// parameters are derived from a geometry.
#pragma once

#include <vector>

#include "xlmimo/geometry.hpp"
#include "xlmimo/types.hpp"

namespace xlmimo {

struct PathParams {
  double b_tx = 0.0;  // first-order coefficient, in [-1, 1]
  double k_tx = 0.0;  // second-order coefficient, per index^2
  double b_rx = 0.0;
  double k_rx = 0.0;
  double omega = 0.0;  // Tx/Rx index coupling; exactly 0 for scatterer paths
  cplx beta{1.0, 0.0};
};

struct WindowMatrix {
  CMat values;  // n_rx x n_tx, unit-modulus entries
  double omega = 0.0;
};

// Element m of the result is exp(-j pi (b m + k m^2)) for the signed index
// set m in {-n/2+1, ..., n/2}. n must be even and at least 2.
CVec steering_vector(int n, double b, double k);

// Second-order expansion of the exact LoS distances of `geom`, expressed in
// index units. With half-wavelength spacing
//   b_tx = sin(theta_tx)
//   b_rx = sin(theta_rx) cos(phi)
//   k_tx = -lambda cos^2(theta_tx) / (4 r0)
//   k_rx = lambda (1 - sin^2(theta_rx) cos^2(phi)) / (4 r0)
//   omega = lambda cos(theta_tx) cos(theta_rx) cos(phi) / (4 r0)
// and beta = exp(-j 2 pi r0 / lambda) / r0. The Scene overload scales beta
// by the scene's LoS gain.
PathParams los_params(const ArrayGeometry& geom);
PathParams los_params(const Scene& scene);

// Entry (n2, n1) = exp(+j 2 pi omega n1 n2), signed indices.
WindowMatrix vandermonde_window(int n_rx, int n_tx, double omega);

// beta * (a_rx a_tx^H) entrywise-multiplied by the omega window.
CMat approx_los_channel(const PathParams& params, int n_rx, int n_tx);

// Rank-1 separable form; requires params.omega == 0.
CMat approx_nlos_channel(const PathParams& params, int n_rx, int n_tx);

// Sum over paths. Only the first path may carry a nonzero omega.
CMat unified_channel(const std::vector<PathParams>& paths, int n_rx, int n_tx);

}  // namespace xlmimo
