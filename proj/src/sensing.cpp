// SPDX-License-Identifier: Apache-2.0
#include "xlmimo/sensing.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace xlmimo {

CMat random_pilot_matrix(int n, int t, Rng& rng) {
  if (t < 1) throw std::invalid_argument("pilot length must be >= 1");
  if (n < 1) throw std::invalid_argument("array size must be >= 1");
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  CMat p(n, t);
  for (int j = 0; j < t; ++j)
    for (int i = 0; i < n; ++i) p(i, j) = rng.sign() * scale;
  return p;
}

CMat random_pilot_matrix(int n, int t, std::uint64_t seed) {
  Rng rng(seed);
  return random_pilot_matrix(n, t, rng);
}

PilotSet make_pilots(int n_tx, int n_rx, int t, Rng& rng) {
  PilotSet p;
  p.psi_tx = random_pilot_matrix(n_tx, t, rng);
  p.psi_rx = random_pilot_matrix(n_rx, t, rng);
  p.pilot_len = t;
  return p;
}

CVec apply_sensing(const CVec& h_vec, const PilotSet& pilots) {
  const Eigen::Index n_tx = pilots.psi_tx.rows();
  const Eigen::Index n_rx = pilots.psi_rx.rows();
  if (h_vec.size() != n_tx * n_rx)
    throw std::invalid_argument("apply_sensing: channel length != n_tx*n_rx");
  const CMat h = unvec(h_vec, n_rx, n_tx);
  const CMat y = pilots.psi_rx.adjoint() * h * pilots.psi_tx;
  return vec(y);
}

Measurement measure(const CMat& channel, const PilotSet& pilots,
                    double snr_db, Rng& rng) {
  Measurement m;
  const CMat y_clean = pilots.psi_rx.adjoint() * channel * pilots.psi_tx;
  m.y = vec(y_clean);
  if (std::isinf(snr_db) && snr_db > 0) return m;

  const double signal = m.y.squaredNorm();
  if (signal == 0.0)
    throw std::domain_error("measure: SNR undefined for a zero channel");

  // Unit-variance complex noise first, then the SNR-dependent scale, so two
  // streams seeded alike but measured at different SNRs share the same draw.
  CVec e(m.y.size());
  for (Eigen::Index i = 0; i < e.size(); ++i) {
    const double re = rng.gaussian();
    const double im = rng.gaussian();
    e(i) = cplx(re, im) * std::sqrt(0.5);
  }
  m.noise_var =
      signal / (static_cast<double>(m.y.size()) * std::pow(10.0, snr_db / 10.0));
  m.y += std::sqrt(m.noise_var) * e;
  return m;
}

Measurement measure(const CMat& channel, const PilotSet& pilots,
                    double snr_db, std::uint64_t seed) {
  Rng rng(seed);
  Measurement m = measure(channel, pilots, snr_db, rng);
  m.seed = seed;
  return m;
}

}  // namespace xlmimo
