// SPDX-License-Identifier: Apache-2.0
#include "xlmimo/analysis.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>

#include "xlmimo/model.hpp"

namespace xlmimo {

double nmse(const CMat& h_est, const CMat& h_true) {
  if (h_est.rows() != h_true.rows() || h_est.cols() != h_true.cols()) {
    throw std::invalid_argument("nmse requires matching shapes");
  }
  const double denom = h_true.squaredNorm();
  if (denom == 0.0) {
    throw std::domain_error("nmse is undefined for a zero true channel");
  }
  const double ratio = (h_est - h_true).squaredNorm() / denom;
  if (ratio <= 0.0) {
    return -300.0;
  }
  return std::max(10.0 * std::log10(ratio), -300.0);
}

namespace {

// Fit one complex scalar to the exact channel, then measure the error.
double fitted_nmse_db(const CMat& model, const CMat& exact) {
  const cplx inner = model.conjugate().cwiseProduct(exact).sum();
  const double power = model.squaredNorm();
  const cplx beta = power > 0.0 ? inner / power : cplx(0.0, 0.0);
  return nmse(beta * model, exact);
}

}  // namespace

std::vector<ModelErrorPoint> model_error_curve(
    const ArrayGeometry& geom_template, const std::vector<double>& r0_list) {
  if (r0_list.empty()) {
    throw std::invalid_argument("r0 list must be nonempty");
  }
  std::vector<ModelErrorPoint> out;
  out.reserve(r0_list.size());
  for (double r0 : r0_list) {
    ArrayGeometry geom = geom_template;
    geom.r0_m = r0;

    Scene scene;
    scene.geometry = geom;
    const CMat exact = exact_los_channel(scene);

    PathParams generalized = los_params(geom);
    generalized.beta = cplx(1.0, 0.0);

    PathParams polar = generalized;
    polar.omega = 0.0;

    PathParams farfield = polar;
    farfield.k_tx = 0.0;
    farfield.k_rx = 0.0;

    ModelErrorPoint point;
    point.r0_m = r0;
    point.nmse_generalized_db = fitted_nmse_db(
        approx_los_channel(generalized, geom.n_rx, geom.n_tx), exact);
    point.nmse_polar_db = fitted_nmse_db(
        approx_los_channel(polar, geom.n_rx, geom.n_tx), exact);
    point.nmse_farfield_db = fitted_nmse_db(
        approx_los_channel(farfield, geom.n_rx, geom.n_tx), exact);
    out.push_back(point);
  }
  return out;
}

SubspacePower subspace_power(int n_rx, int n_tx, double omega) {
  if (n_rx < 1 || n_tx < 1) {
    throw std::invalid_argument("array sizes must be positive");
  }
  if (omega == 0.0) {
    throw std::domain_error("coupling of zero has no beam subspace");
  }
  const double budget = std::abs(omega) * n_rx * n_tx;
  if (std::round(budget) < 1.0) {
    throw std::domain_error("beam budget rounds below a single beam");
  }
  SubspacePower out;
  out.beams = static_cast<int>(
      std::min<double>(std::max(std::ceil(budget), 1.0), n_rx));

  // Window and beams in a common 0-based indexing; the captured power is
  // invariant to the index origin, which only modulates rows by unit phases.
  const double mag = std::abs(omega);
  CMat window(n_rx, n_tx);
  for (int n1 = 0; n1 < n_tx; ++n1) {
    for (int n2 = 0; n2 < n_rx; ++n2) {
      window(n2, n1) = unit_phase(mag * n1 * n2);
    }
  }
  CMat beams(n_rx, out.beams);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n_rx));
  for (int i = 0; i < out.beams; ++i) {
    for (int n2 = 0; n2 < n_rx; ++n2) {
      beams(n2, i) =
          scale * unit_phase(static_cast<double>(n2) * i / n_rx);
    }
  }
  out.fraction = (beams.adjoint() * window).squaredNorm() /
                 (static_cast<double>(n_tx) * n_rx);
  return out;
}

double subspace_power_fraction(int n_rx, int n_tx, double omega) {
  return subspace_power(n_rx, n_tx, omega).fraction;
}

int effective_rank(const CMat& channel, double energy) {
  if (!(energy > 0.0 && energy < 1.0)) {
    throw std::invalid_argument("energy must lie in (0,1)");
  }
  Eigen::BDCSVD<CMat> svd(channel);
  const RVec sv = svd.singularValues();
  const double total = sv.squaredNorm();
  if (total == 0.0) {
    return 0;
  }
  double cum = 0.0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    cum += sv(i) * sv(i);
    if (cum >= energy * total) {
      return static_cast<int>(i) + 1;
    }
  }
  return static_cast<int>(sv.size());
}

}  // namespace xlmimo
