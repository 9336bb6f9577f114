// SPDX-License-Identifier: Apache-2.0
#include "xlmimo/geometry.hpp"

#include <cmath>
#include <stdexcept>

#include "xlmimo/rng.hpp"

namespace xlmimo {

namespace {

void check_index(int idx, int n, const char* side) {
  if (idx < -n / 2 + 1 || idx > n / 2)
    throw std::out_of_range(std::string(side) +
                            " element index outside {-N/2+1, ..., N/2}");
}

Eigen::Vector3d rx_center(const ArrayGeometry& g) {
  return {g.r0_m * std::sin(g.theta_tx), g.r0_m * std::cos(g.theta_tx), 0.0};
}

Eigen::Vector3d rx_axis(const ArrayGeometry& g) {
  const double a = g.theta_rx - g.theta_tx;
  return {std::cos(a) * std::cos(g.phi_rx), std::sin(a) * std::cos(g.phi_rx),
          std::sin(g.phi_rx)};
}

}  // namespace

Eigen::Vector3d tx_element_position(int n1, const ArrayGeometry& geom) {
  check_index(n1, geom.n_tx, "tx");
  return {geom.spacing() * n1, 0.0, 0.0};
}

Eigen::Vector3d rx_element_position(int n2, const ArrayGeometry& geom) {
  check_index(n2, geom.n_rx, "rx");
  return rx_center(geom) + geom.spacing() * n2 * rx_axis(geom);
}

double exact_distance(int n1, int n2, const ArrayGeometry& geom) {
  return (rx_element_position(n2, geom) - tx_element_position(n1, geom))
      .norm();
}

CMat exact_los_channel(const Scene& scene) {
  const ArrayGeometry& g = scene.geometry;
  const double lam = g.wavelength();
  const double d = g.spacing();
  const Eigen::Vector3d c = rx_center(g);
  const Eigen::Vector3d u = rx_axis(g);

  CMat h(g.n_rx, g.n_tx);
  for (int i1 = 0; i1 < g.n_tx; ++i1) {
    const double x1 = d * signed_index(i1, g.n_tx);
    for (int i2 = 0; i2 < g.n_rx; ++i2) {
      const double s = d * signed_index(i2, g.n_rx);
      const double dx = c.x() + s * u.x() - x1;
      const double dy = c.y() + s * u.y();
      const double dz = c.z() + s * u.z();
      const double r = std::sqrt(dx * dx + dy * dy + dz * dz);
      h(i2, i1) = scene.los_gain * unit_phase(-r / lam) / r;
    }
  }
  return h;
}

CMat exact_nlos_channel(const ArrayGeometry& geom, const Scatterer& scat) {
  const double lam = geom.wavelength();
  const double d = geom.spacing();
  if (scat.r_tx_m <= 0.0 || scat.r_rx_m <= 0.0)
    throw std::domain_error("scatterer ranges must be positive");

  // Law of cosines at each array. The Rx side carries the mirrored (+) sign
  // so that the arrival-angle convention matches the LoS one.
  CVec vt(geom.n_tx), vr(geom.n_rx);
  for (int i1 = 0; i1 < geom.n_tx; ++i1) {
    const double x = d * signed_index(i1, geom.n_tx);
    const double rt = std::sqrt(scat.r_tx_m * scat.r_tx_m + x * x -
                                2.0 * scat.r_tx_m * x * std::sin(scat.theta_tx));
    if (rt < 1e-9)
      throw std::domain_error("scatterer collocated with a tx element");
    vt(i1) = unit_phase(-rt / lam) / rt;
  }
  for (int i2 = 0; i2 < geom.n_rx; ++i2) {
    const double x = d * signed_index(i2, geom.n_rx);
    const double rr = std::sqrt(scat.r_rx_m * scat.r_rx_m + x * x +
                                2.0 * scat.r_rx_m * x * std::sin(scat.theta_rx));
    if (rr < 1e-9)
      throw std::domain_error("scatterer collocated with an rx element");
    vr(i2) = unit_phase(-rr / lam) / rr;
  }
  return scat.gain * vr * vt.transpose();
}

Scene synthesize_scene(const ArrayGeometry& geom, const SceneConfig& cfg,
                       Rng& rng) {
  if (cfg.n_paths < 0) throw std::invalid_argument("n_paths must be >= 0");
  if (cfg.angle_hi < cfg.angle_lo || cfg.tilt_hi < cfg.tilt_lo ||
      cfg.loss_hi_db < cfg.loss_lo_db)
    throw std::invalid_argument("scene config ranges must be ordered");

  double rad_lo = cfg.radius_lo_m, rad_hi = cfg.radius_hi_m;
  if (rad_lo <= 0.0 || rad_hi <= 0.0) {
    rad_lo = geom.r0_m;
    rad_hi = 2.0 * geom.r0_m;
  }
  if (rad_hi < rad_lo)
    throw std::invalid_argument("scatterer radius range must be ordered");

  Scene scene;
  scene.geometry = geom;
  scene.geometry.theta_tx = rng.uniform(cfg.angle_lo, cfg.angle_hi);
  scene.geometry.theta_rx = rng.uniform(cfg.angle_lo, cfg.angle_hi);
  scene.geometry.phi_rx = rng.uniform(cfg.tilt_lo, cfg.tilt_hi);
  scene.los_gain = unit_phase(rng.uniform());

  scene.scatterers.reserve(cfg.n_paths);
  for (int l = 0; l < cfg.n_paths; ++l) {
    Scatterer s;
    s.theta_tx = rng.uniform(cfg.angle_lo, cfg.angle_hi);
    s.theta_rx = rng.uniform(cfg.angle_lo, cfg.angle_hi);
    s.r_tx_m = rng.uniform(rad_lo, rad_hi);
    s.r_rx_m = rng.uniform(rad_lo, rad_hi);
    const double loss_db = rng.uniform(cfg.loss_lo_db, cfg.loss_hi_db);
    // 1/(r_tx*r_rx) is the center-element spreading loss of this path, so
    // scaling by r_tx*r_rx/r0 makes loss_db the center power ratio vs LoS.
    s.gain = std::pow(10.0, loss_db / 20.0) *
             (s.r_tx_m * s.r_rx_m / scene.geometry.r0_m) *
             unit_phase(rng.uniform());
    scene.scatterers.push_back(s);
  }
  return scene;
}

Scene synthesize_scene(const ArrayGeometry& geom, const SceneConfig& cfg,
                       std::uint64_t seed) {
  Rng rng(seed);
  return synthesize_scene(geom, cfg, rng);
}

CMat exact_channel(const Scene& scene) {
  CMat h = exact_los_channel(scene);
  for (const Scatterer& s : scene.scatterers)
    h += exact_nlos_channel(scene.geometry, s);
  return h;
}

}  // namespace xlmimo
