// SPDX-License-Identifier: Apache-2.0
//
// Greedy sparse channel estimation from compressed pilot measurements. One
// engine serves three front ends: the unified estimator that matches both
// generalized (coupled) atoms and separable per-side atoms each iteration,
// the polar-domain baseline (separable atoms only), and the far-field
// baseline (separable atoms with zero curvature).
#pragma once

#include <string>
#include <vector>

#include "xlmimo/dictionary.hpp"
#include "xlmimo/sensing.hpp"
#include "xlmimo/types.hpp"

namespace xlmimo {

struct SupportSets {
  std::vector<int> los;      // generalized-dictionary column indices
  std::vector<int> nlos_tx;  // per-side column indices, paired by position
  std::vector<int> nlos_rx;
};

struct EstimateResult {
  CMat channel;  // n_rx x n_tx
  CVec gains;    // beta over [generalized block, separable block]
  SupportSets support;
  std::vector<double> residual_norms;  // after each refit, non-increasing
  int iterations_run = 0;
  std::vector<std::string> warnings;
};

// Pilot-compressed dictionaries with cached column norms. These depend only
// on (pilots, dictionary) and are reused across iterations and trials.
struct SensedSideDictionary {
  CMat cols;  // T x columns
  RVec norms;
};
struct SensedLosDictionary {
  CMat cols;  // T^2 x columns
  RVec norms;
};

SensedSideDictionary sense_side(const SideDictionary& dict, const CMat& psi);
SensedLosDictionary sense_los_dictionary(const LosDictionary& dict,
                                         const PilotSet& pilots);

struct LosMatch {
  double gain = 0.0;  // normalized correlation magnitude
  int index = 0;
};
struct NlosMatch {
  double gain = 0.0;
  int tx_index = 0;
  int rx_index = 0;
};

// Normalized matched filter over the generalized dictionary. Ties resolve
// to the lowest column index (a zero residual returns index 0, gain 0).
LosMatch los_match(const CVec& residual, const SensedLosDictionary& sensed);
LosMatch los_match(const CVec& residual, const PilotSet& pilots,
                   const LosDictionary& g_sub);

// 2D matched filter over the per-side dictionaries, computed with two small
// products on the T x T residual matrix; the T^2 x (grid product) Kronecker
// dictionary is never formed.
NlosMatch nlos_match(const CMat& residual_matrix,
                     const SensedSideDictionary& sensed_tx,
                     const SensedSideDictionary& sensed_rx);
NlosMatch nlos_match(const CMat& residual_matrix, const PilotSet& pilots,
                     const SideDictionary& p_tx, const SideDictionary& p_rx);

// Unsensed atoms of the current support: generalized columns verbatim, then
// conj(tx atom) kron (rx atom) per separable pair, in insertion order.
// g_sub may be null when the generalized support is empty.
CMat build_active_dictionary(const SupportSets& support,
                             const LosDictionary* g_sub,
                             const SideDictionary& p_tx,
                             const SideDictionary& p_rx);

struct LsSolution {
  CVec gains;
  CVec fitted;         // in the measurement domain
  bool ridge = false;  // set when rank deficiency forced regularization
};

// Minimum-norm least squares of y against the pilot-compressed columns of
// active_dict. Rank-deficient systems fall back to a ridge solve with
// mu = 1e-10 * trace-scale and set the ridge flag.
LsSolution least_squares_gains(const CVec& y, const PilotSet& pilots,
                               const CMat& active_dict);

// Least squares against already-sensed columns (the engine's inner solver).
LsSolution solve_sensed_ls(const CVec& y, const CMat& sensed_active);

// Unified greedy estimation: per iteration, run both matchers on the
// residual, keep the stronger match (generalized wins ties), refit all
// gains, and stop early when the relative residual drops under stop_tol.
// Duplicate selections are skipped with a warning and do not consume an
// iteration; total attempts are capped at 3*n_iter.
EstimateResult xl_uomp(const CVec& y, const PilotSet& pilots,
                       const LosDictionary& g_sub, const SideDictionary& p_tx,
                       const SideDictionary& p_rx, int n_iter,
                       double stop_tol = 1e-8);

// Same engine with the generalized branch disabled.
EstimateResult baseline_polar_omp(const CVec& y, const PilotSet& pilots,
                                  const SideDictionary& p_tx,
                                  const SideDictionary& p_rx, int n_iter,
                                  double stop_tol = 1e-8);

// Polar baseline restricted to the k = 0 columns of both sides.
EstimateResult baseline_farfield_omp(const CVec& y, const PilotSet& pilots,
                                     const SideDictionary& p_tx,
                                     const SideDictionary& p_rx, int n_iter,
                                     double stop_tol = 1e-8);

}  // namespace xlmimo
