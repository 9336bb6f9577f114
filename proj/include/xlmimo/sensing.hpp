// SPDX-License-Identifier: Apache-2.0
//
// Pilot design and the Kronecker-structured measurement operator. A channel
// H (n_rx x n_tx) is observed through T sounding vectors per side as
// Y = psi_rx^H H psi_tx, vectorized column-major into y of length T^2. The
// equivalent flat operator is (psi_tx^T kron psi_rx^H), but it is never
// materialized.
#pragma once

#include <cstdint>

#include "xlmimo/rng.hpp"
#include "xlmimo/types.hpp"

namespace xlmimo {

struct PilotSet {
  CMat psi_tx;  // n_tx x T
  CMat psi_rx;  // n_rx x T
  int pilot_len = 0;
};

struct Measurement {
  CVec y;                  // length T^2
  double noise_var = 0.0;  // per complex entry
  std::uint64_t seed = 0;
};

// Entries are +-1/sqrt(n) with equal sign probability, so every column has
// unit norm. Deterministic per seed; the stream overload draws from an
// existing generator (column-major entry order).
CMat random_pilot_matrix(int n, int t, std::uint64_t seed);
CMat random_pilot_matrix(int n, int t, Rng& rng);

PilotSet make_pilots(int n_tx, int n_rx, int t, Rng& rng);

// y = vec(psi_rx^H unvec(h) psi_tx), computed through the two small
// products. Throws on a length mismatch.
CVec apply_sensing(const CVec& h_vec, const PilotSet& pilots);

// Noisy observation. The noise is circular complex Gaussian with per-entry
// variance sigma^2 chosen so that |y_clean|^2 / (T^2 sigma^2) matches
// snr_db; +infinity gives the exact noiseless vector. A zero channel with a
// finite SNR is rejected (the SNR is undefined there). The stream overload
// draws noise from an existing generator; the raw unit-variance noise vector
// is drawn before scaling, so streams that share a seed across SNR values
// share the same noise shape.
Measurement measure(const CMat& channel, const PilotSet& pilots,
                    double snr_db, std::uint64_t seed);
Measurement measure(const CMat& channel, const PilotSet& pilots,
                    double snr_db, Rng& rng);

}  // namespace xlmimo
