// SPDX-License-Identifier: Apache-2.0
#include "xlmimo/estimator.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <utility>

#include "xlmimo/model.hpp"

namespace xlmimo {

SensedSideDictionary sense_side(const SideDictionary& dict, const CMat& psi) {
  if (dict.atoms.rows() != psi.rows()) {
    throw std::invalid_argument("pilot matrix rows must match the array size");
  }
  SensedSideDictionary out;
  out.cols = psi.adjoint() * dict.atoms;
  out.norms = out.cols.colwise().norm().transpose();
  return out;
}

SensedLosDictionary sense_los_dictionary(const LosDictionary& dict,
                                         const PilotSet& pilots) {
  if (pilots.psi_tx.rows() != dict.n_tx || pilots.psi_rx.rows() != dict.n_rx) {
    throw std::invalid_argument("pilot matrices do not match dictionary dims");
  }
  const int t = pilots.pilot_len;
  const Eigen::Index n_cols = dict.cols();
  SensedLosDictionary out;
  out.cols.resize(static_cast<Eigen::Index>(t) * t, n_cols);

  const CMat psi_rx_h = pilots.psi_rx.adjoint();  // T x n_rx

  // The column order groups atoms by receive pair, then coupling, then
  // transmit pair; cache the pieces that survive across a group.
  std::map<double, CMat> window_cache;
  std::map<std::pair<double, double>, CMat> tx_cache;  // (b,k) -> n_tx x T

  const double nan = std::numeric_limits<double>::quiet_NaN();
  double prev_b_rx = nan, prev_k_rx = nan, prev_omega = nan;
  CMat rx_scaled;  // psi_rx^H * diag(a_rx), T x n_rx
  CMat mixed;      // rx_scaled * window, T x n_tx

  for (Eigen::Index j = 0; j < n_cols; ++j) {
    const LosAtomMeta& m = dict.meta[static_cast<size_t>(j)];
    const bool rx_changed = m.b_rx != prev_b_rx || m.k_rx != prev_k_rx;
    if (rx_changed) {
      const CVec a_rx = steering_vector(dict.n_rx, m.b_rx, m.k_rx);
      rx_scaled = psi_rx_h * a_rx.asDiagonal();
      prev_b_rx = m.b_rx;
      prev_k_rx = m.k_rx;
    }
    if (rx_changed || m.omega != prev_omega) {
      auto it = window_cache.find(m.omega);
      if (it == window_cache.end()) {
        it = window_cache
                 .emplace(m.omega,
                          vandermonde_window(dict.n_rx, dict.n_tx, m.omega)
                              .values)
                 .first;
      }
      mixed = rx_scaled * it->second;
      prev_omega = m.omega;
    }
    auto tx_it = tx_cache.find({m.b_tx, m.k_tx});
    if (tx_it == tx_cache.end()) {
      const CVec a_tx = steering_vector(dict.n_tx, m.b_tx, m.k_tx);
      tx_it = tx_cache
                  .emplace(std::make_pair(m.b_tx, m.k_tx),
                           a_tx.conjugate().asDiagonal() * pilots.psi_tx)
                  .first;
    }
    const CMat sensed = mixed * tx_it->second;  // T x T
    out.cols.col(j) =
        Eigen::Map<const CVec>(sensed.data(), sensed.size());
  }
  out.norms = out.cols.colwise().norm().transpose();
  return out;
}

LosMatch los_match(const CVec& residual, const SensedLosDictionary& sensed) {
  if (sensed.cols.cols() == 0) {
    throw std::invalid_argument("los_match requires a nonempty dictionary");
  }
  if (residual.size() != sensed.cols.rows()) {
    throw std::invalid_argument("residual length does not match dictionary");
  }
  RVec corr = (sensed.cols.adjoint() * residual).cwiseAbs();
  corr.array() /= sensed.norms.array().max(1e-300);
  Eigen::Index best = 0;
  const double gain = corr.maxCoeff(&best);
  return {gain, static_cast<int>(best)};
}

LosMatch los_match(const CVec& residual, const PilotSet& pilots,
                   const LosDictionary& g_sub) {
  return los_match(residual, sense_los_dictionary(g_sub, pilots));
}

NlosMatch nlos_match(const CMat& residual_matrix,
                     const SensedSideDictionary& sensed_tx,
                     const SensedSideDictionary& sensed_rx) {
  if (sensed_tx.cols.cols() == 0 || sensed_rx.cols.cols() == 0) {
    throw std::invalid_argument("nlos_match requires nonempty dictionaries");
  }
  if (residual_matrix.rows() != sensed_rx.cols.rows() ||
      residual_matrix.cols() != sensed_tx.cols.rows()) {
    throw std::invalid_argument("residual matrix does not match pilot length");
  }
  Eigen::MatrixXd corr =
      (sensed_rx.cols.adjoint() * residual_matrix * sensed_tx.cols).cwiseAbs();
  corr.array() /=
      (sensed_rx.norms * sensed_tx.norms.transpose()).array().max(1e-300);
  Eigen::Index row = 0, col = 0;
  const double gain = corr.maxCoeff(&row, &col);
  return {gain, static_cast<int>(col), static_cast<int>(row)};
}

NlosMatch nlos_match(const CMat& residual_matrix, const PilotSet& pilots,
                     const SideDictionary& p_tx, const SideDictionary& p_rx) {
  return nlos_match(residual_matrix, sense_side(p_tx, pilots.psi_tx),
                    sense_side(p_rx, pilots.psi_rx));
}

CMat build_active_dictionary(const SupportSets& support,
                             const LosDictionary* g_sub,
                             const SideDictionary& p_tx,
                             const SideDictionary& p_rx) {
  if (support.nlos_tx.size() != support.nlos_rx.size()) {
    throw std::invalid_argument("NLoS support indices must come in pairs");
  }
  const size_t k = support.los.size() + support.nlos_tx.size();
  if (k == 0) {
    throw std::invalid_argument("active support is empty");
  }
  if (!support.los.empty() && g_sub == nullptr) {
    throw std::invalid_argument(
        "generalized support requires a generalized dictionary");
  }
  const Eigen::Index rows =
      static_cast<Eigen::Index>(p_tx.n) * static_cast<Eigen::Index>(p_rx.n);
  CMat active(rows, static_cast<Eigen::Index>(k));
  Eigen::Index c = 0;
  for (int j : support.los) {
    active.col(c++) = g_sub->atom(j);
  }
  for (size_t i = 0; i < support.nlos_tx.size(); ++i) {
    const CVec tx = p_tx.atoms.col(support.nlos_tx[i]).conjugate();
    const CVec rx = p_rx.atoms.col(support.nlos_rx[i]);
    active.col(c++) = kron(tx, rx);
  }
  return active;
}

LsSolution solve_sensed_ls(const CVec& y, const CMat& sensed_active) {
  if (sensed_active.rows() != y.size()) {
    throw std::invalid_argument("sensed columns do not match measurement");
  }
  LsSolution out;
  Eigen::JacobiSVD<CMat> svd(sensed_active,
                             Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double cutoff =
      static_cast<double>(std::max(sensed_active.rows(), sensed_active.cols())) *
      std::numeric_limits<double>::epsilon() * (sv.size() > 0 ? sv(0) : 0.0);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff) ++rank;
  }
  if (rank < sensed_active.cols()) {
    out.ridge = true;
    const Eigen::Index k = sensed_active.cols();
    const double mu =
        1e-10 * sensed_active.squaredNorm() / static_cast<double>(k) + 1e-300;
    const CMat gram = sensed_active.adjoint() * sensed_active +
                      mu * CMat::Identity(k, k);
    out.gains = gram.ldlt().solve(sensed_active.adjoint() * y);
  } else {
    out.gains = svd.solve(y);
  }
  out.fitted = sensed_active * out.gains;
  return out;
}

LsSolution least_squares_gains(const CVec& y, const PilotSet& pilots,
                               const CMat& active_dict) {
  CMat sensed(static_cast<Eigen::Index>(pilots.pilot_len) * pilots.pilot_len,
              active_dict.cols());
  for (Eigen::Index j = 0; j < active_dict.cols(); ++j) {
    sensed.col(j) = apply_sensing(active_dict.col(j), pilots);
  }
  return solve_sensed_ls(y, sensed);
}

namespace {

bool has_los_index(const SupportSets& s, int index) {
  return std::find(s.los.begin(), s.los.end(), index) != s.los.end();
}

bool has_nlos_pair(const SupportSets& s, int tx, int rx) {
  for (size_t i = 0; i < s.nlos_tx.size(); ++i) {
    if (s.nlos_tx[i] == tx && s.nlos_rx[i] == rx) return true;
  }
  return false;
}

EstimateResult omp_engine(const CVec& y, const PilotSet& pilots,
                          const LosDictionary* g_sub,
                          const SideDictionary& p_tx,
                          const SideDictionary& p_rx, int n_iter,
                          double stop_tol) {
  if (n_iter < 1) {
    throw std::invalid_argument("n_iter must be at least 1");
  }
  const int t = pilots.pilot_len;
  if (y.size() != static_cast<Eigen::Index>(t) * t) {
    throw std::invalid_argument("measurement length must equal pilot_len^2");
  }
  if (pilots.psi_tx.rows() != p_tx.n || pilots.psi_rx.rows() != p_rx.n) {
    throw std::invalid_argument("pilot matrices do not match dictionary dims");
  }
  const bool los_on = g_sub != nullptr && g_sub->cols() > 0;
  if (los_on && (g_sub->n_tx != p_tx.n || g_sub->n_rx != p_rx.n)) {
    throw std::invalid_argument("dictionaries disagree on array sizes");
  }

  EstimateResult res;
  res.channel = CMat::Zero(p_rx.n, p_tx.n);
  const double y_norm = y.norm();
  if (y_norm == 0.0) {
    return res;  // nothing to explain
  }

  const SensedSideDictionary sensed_tx = sense_side(p_tx, pilots.psi_tx);
  const SensedSideDictionary sensed_rx = sense_side(p_rx, pilots.psi_rx);
  SensedLosDictionary sensed_los;
  if (los_on) {
    sensed_los = sense_los_dictionary(*g_sub, pilots);
  }

  CVec residual = y;
  CVec gains;
  int attempts = 0;
  while (res.iterations_run < n_iter && attempts < 3 * n_iter) {
    ++attempts;
    LosMatch lm;
    lm.gain = -1.0;
    if (los_on) {
      lm = los_match(residual, sensed_los);
    }
    const CMat residual_matrix = unvec(residual, t, t);
    const NlosMatch nm = nlos_match(residual_matrix, sensed_tx, sensed_rx);

    if (los_on && lm.gain >= nm.gain) {
      if (has_los_index(res.support, lm.index)) {
        res.warnings.push_back("duplicate-los-selection");
        continue;
      }
      res.support.los.push_back(lm.index);
    } else {
      if (has_nlos_pair(res.support, nm.tx_index, nm.rx_index)) {
        res.warnings.push_back("duplicate-nlos-selection");
        continue;
      }
      res.support.nlos_tx.push_back(nm.tx_index);
      res.support.nlos_rx.push_back(nm.rx_index);
    }
    ++res.iterations_run;

    const Eigen::Index k = static_cast<Eigen::Index>(
        res.support.los.size() + res.support.nlos_tx.size());
    CMat active(static_cast<Eigen::Index>(t) * t, k);
    Eigen::Index c = 0;
    for (int j : res.support.los) {
      active.col(c++) = sensed_los.cols.col(j);
    }
    for (size_t i = 0; i < res.support.nlos_tx.size(); ++i) {
      const CVec tx = sensed_tx.cols.col(res.support.nlos_tx[i]).conjugate();
      const CVec rx = sensed_rx.cols.col(res.support.nlos_rx[i]);
      active.col(c++) = kron(tx, rx);
    }

    const LsSolution ls = solve_sensed_ls(y, active);
    if (ls.ridge) {
      res.warnings.push_back("ridge-regularized-least-squares");
    }
    gains = ls.gains;
    residual = y - ls.fitted;
    const double r_norm = residual.norm();
    res.residual_norms.push_back(r_norm);
    if (r_norm / y_norm < stop_tol) {
      break;
    }
  }

  if (gains.size() > 0) {
    const CMat active =
        build_active_dictionary(res.support, g_sub, p_tx, p_rx);
    res.channel = unvec(active * gains, p_rx.n, p_tx.n);
    res.gains = gains;
  }
  return res;
}

}  // namespace

EstimateResult xl_uomp(const CVec& y, const PilotSet& pilots,
                       const LosDictionary& g_sub, const SideDictionary& p_tx,
                       const SideDictionary& p_rx, int n_iter,
                       double stop_tol) {
  return omp_engine(y, pilots, &g_sub, p_tx, p_rx, n_iter, stop_tol);
}

EstimateResult baseline_polar_omp(const CVec& y, const PilotSet& pilots,
                                  const SideDictionary& p_tx,
                                  const SideDictionary& p_rx, int n_iter,
                                  double stop_tol) {
  return omp_engine(y, pilots, nullptr, p_tx, p_rx, n_iter, stop_tol);
}

EstimateResult baseline_farfield_omp(const CVec& y, const PilotSet& pilots,
                                     const SideDictionary& p_tx,
                                     const SideDictionary& p_rx, int n_iter,
                                     double stop_tol) {
  const SideDictionary flat_tx = farfield_subset(p_tx);
  const SideDictionary flat_rx = farfield_subset(p_rx);
  return omp_engine(y, pilots, nullptr, flat_tx, flat_rx, n_iter, stop_tol);
}

}  // namespace xlmimo
