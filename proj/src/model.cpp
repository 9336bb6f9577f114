// SPDX-License-Identifier: Apache-2.0
#include "xlmimo/model.hpp"

#include <stdexcept>

namespace xlmimo {

CVec steering_vector(int n, double b, double k) {
  if (n < 2 || n % 2 != 0)
    throw std::invalid_argument("steering_vector: n must be even and >= 2");
  CVec a(n);
  for (int i = 0; i < n; ++i) {
    const double m = signed_index(i, n);
    a(i) = unit_phase(-0.5 * (b * m + k * m * m));
  }
  return a;
}

PathParams los_params(const ArrayGeometry& geom) {
  if (geom.r0_m <= 0.0)
    throw std::domain_error("los_params: r0 must be positive");
  const double lam = geom.wavelength();
  const double d = geom.spacing();
  const double st = std::sin(geom.theta_tx), ct = std::cos(geom.theta_tx);
  const double sr = std::sin(geom.theta_rx), cr = std::cos(geom.theta_rx);
  const double cp = std::cos(geom.phi_rx);

  // General-spacing coefficients; they reduce to the header formulas at
  // d = lambda/2. The quadratic terms carry the true 1/(2 r0) Taylor factor
  // of the exact distance, which the index-phase convention turns into the
  // d^2/(lambda r0) scale below.
  PathParams p;
  p.b_tx = (2.0 * d / lam) * st;
  p.b_rx = (2.0 * d / lam) * sr * cp;
  p.k_tx = -(d * d) * ct * ct / (lam * geom.r0_m);
  p.k_rx = (d * d) * (1.0 - sr * sr * cp * cp) / (lam * geom.r0_m);
  p.omega = (d * d) * ct * cr * cp / (lam * geom.r0_m);
  p.beta = unit_phase(-geom.r0_m / lam) / geom.r0_m;
  return p;
}

PathParams los_params(const Scene& scene) {
  PathParams p = los_params(scene.geometry);
  p.beta *= scene.los_gain;
  return p;
}

WindowMatrix vandermonde_window(int n_rx, int n_tx, double omega) {
  if (n_rx < 2 || n_rx % 2 != 0 || n_tx < 2 || n_tx % 2 != 0)
    throw std::invalid_argument("vandermonde_window: sizes must be even");
  WindowMatrix w;
  w.omega = omega;
  w.values.resize(n_rx, n_tx);
  for (int i1 = 0; i1 < n_tx; ++i1) {
    const double m1 = signed_index(i1, n_tx);
    for (int i2 = 0; i2 < n_rx; ++i2) {
      const double m2 = signed_index(i2, n_rx);
      w.values(i2, i1) = unit_phase(omega * m1 * m2);
    }
  }
  return w;
}

CMat approx_los_channel(const PathParams& params, int n_rx, int n_tx) {
  const CVec arx = steering_vector(n_rx, params.b_rx, params.k_rx);
  const CVec atx = steering_vector(n_tx, params.b_tx, params.k_tx);
  const WindowMatrix v = vandermonde_window(n_rx, n_tx, params.omega);
  return params.beta * (arx * atx.adjoint()).cwiseProduct(v.values);
}

CMat approx_nlos_channel(const PathParams& params, int n_rx, int n_tx) {
  if (params.omega != 0.0)
    throw std::invalid_argument(
        "approx_nlos_channel: omega must be exactly 0 for scatterer paths");
  const CVec arx = steering_vector(n_rx, params.b_rx, params.k_rx);
  const CVec atx = steering_vector(n_tx, params.b_tx, params.k_tx);
  return params.beta * arx * atx.adjoint();
}

CMat unified_channel(const std::vector<PathParams>& paths, int n_rx,
                     int n_tx) {
  CMat h = CMat::Zero(n_rx, n_tx);
  for (std::size_t l = 0; l < paths.size(); ++l) {
    if (l > 0 && paths[l].omega != 0.0)
      throw std::invalid_argument(
          "unified_channel: only the first path may have nonzero omega");
    h += approx_los_channel(paths[l], n_rx, n_tx);
  }
  return h;
}

}  // namespace xlmimo
