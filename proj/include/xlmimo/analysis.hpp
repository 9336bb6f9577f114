// SPDX-License-Identifier: Apache-2.0
//
// Metrics: NMSE, model approximation error across the three channel
// representations, and the coupling-window subspace analysis (captured DFT
// power and effective rank).
#pragma once

#include <vector>

#include "xlmimo/geometry.hpp"
#include "xlmimo/types.hpp"

namespace xlmimo {

// 10*log10(||h_est - h_true||_F^2 / ||h_true||_F^2), floored at -300 dB.
// Throws when h_true is identically zero.
double nmse(const CMat& h_est, const CMat& h_true);

struct ModelErrorPoint {
  double r0_m = 0.0;
  double nmse_farfield_db = 0.0;
  double nmse_polar_db = 0.0;
  double nmse_generalized_db = 0.0;
};

// For each distance, compares the exact line-of-sight channel against the
// three approximations under perfect parameters: far-field (linear phase
// only), polar (per-side quadratic, no coupling), and generalized (full
// coupled form). Each model's scalar gain is least-squares fitted to the
// exact channel before the error is measured.
std::vector<ModelErrorPoint> model_error_curve(
    const ArrayGeometry& geom_template, const std::vector<double>& r0_list);

struct SubspacePower {
  double fraction = 0.0;
  int beams = 0;
};

// Power of the coupling window captured by the ceil(|omega|*n_rx*n_tx)
// lowest-frequency DFT receive beams (clamped to n_rx), as a fraction of the
// total n_tx*n_rx. omega = 0, or a beam budget that rounds below one beam,
// is degenerate and throws.
SubspacePower subspace_power(int n_rx, int n_tx, double omega);
double subspace_power_fraction(int n_rx, int n_tx, double omega);

// Smallest k whose top-k squared singular values hold at least
// energy * total. energy must lie in (0,1). A zero matrix reports 0.
int effective_rank(const CMat& channel, double energy);

}  // namespace xlmimo
