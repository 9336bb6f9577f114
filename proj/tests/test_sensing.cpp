// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <limits>

#include "doctest.h"
#include "xlmimo/sensing.hpp"

using namespace xlmimo;

TEST_CASE("pilot matrices are sign flips scaled to unit columns") {
  const int n = 16, t = 5;
  const CMat psi = random_pilot_matrix(n, t, 42);
  REQUIRE(psi.rows() == n);
  REQUIRE(psi.cols() == t);
  const double mag = 1.0 / std::sqrt(double(n));
  for (int j = 0; j < t; ++j) {
    for (int i = 0; i < n; ++i) {
      CHECK(psi(i, j).imag() == 0.0);
      CHECK(std::abs(std::abs(psi(i, j).real()) - mag) < 1e-15);
    }
    CHECK(psi.col(j).norm() == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK((random_pilot_matrix(n, t, 42) - psi).norm() == 0.0);
  CHECK((random_pilot_matrix(n, t, 43) - psi).norm() > 0.0);

  // the seed overload is one fresh stream
  Rng rng(42);
  CHECK((random_pilot_matrix(n, t, rng) - psi).norm() == 0.0);
}

TEST_CASE("make_pilots draws tx then rx from one stream") {
  Rng rng(7);
  const PilotSet p = make_pilots(8, 6, 3, rng);
  CHECK(p.pilot_len == 3);
  CHECK(p.psi_tx.rows() == 8);
  CHECK(p.psi_rx.rows() == 6);

  Rng replay(7);
  const CMat tx = random_pilot_matrix(8, 3, replay);
  const CMat rx = random_pilot_matrix(6, 3, replay);
  CHECK((p.psi_tx - tx).norm() == 0.0);
  CHECK((p.psi_rx - rx).norm() == 0.0);
}

TEST_CASE("matrix-free sensing equals the dense Kronecker operator") {
  for (const auto& [n, t] : {std::pair{8, 3}, std::pair{16, 4}}) {
    Rng rng(100 + n);
    const PilotSet pilots = make_pilots(n, n, t, rng);
    CVec h(n * n);
    for (int i = 0; i < n * n; ++i) {
      h(i) = cplx(rng.gaussian(), rng.gaussian());
    }
    const CVec fast = apply_sensing(h, pilots);
    REQUIRE(fast.size() == t * t);

    // dense (psi_tx^T kron psi_rx^H), built entry by entry
    const CMat at = pilots.psi_tx.transpose();
    const CMat bh = pilots.psi_rx.adjoint();
    CMat op(t * t, n * n);
    for (int i = 0; i < t; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < t; ++k)
          for (int l = 0; l < n; ++l)
            op(i * t + k, j * n + l) = at(i, j) * bh(k, l);
    const CVec dense = op * h;
    CHECK((fast - dense).norm() < 1e-12 * dense.norm());
  }
}

TEST_CASE("apply_sensing rejects a length mismatch") {
  Rng rng(3);
  const PilotSet pilots = make_pilots(8, 8, 3, rng);
  CHECK_THROWS(apply_sensing(CVec::Zero(63), pilots));
}

TEST_CASE("measured noise power matches the requested SNR") {
  const int n = 16, t = 6;
  Rng rng(11);
  const PilotSet pilots = make_pilots(n, n, t, rng);
  CMat h(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) h(i, j) = cplx(rng.gaussian(), rng.gaussian());

  const CVec clean = apply_sensing(vec(h), pilots);
  const Measurement m = measure(h, pilots, 10.0, std::uint64_t(5));
  CHECK(m.seed == 5);
  const double expect_var = clean.squaredNorm() / (double(t * t) * 10.0);
  CHECK(m.noise_var == doctest::Approx(expect_var).epsilon(1e-12));

  // the realized noise is a unit-variance draw scaled by sigma, so its
  // empirical power sits near T^2 sigma^2 without matching it exactly
  const double noise_power = (m.y - clean).squaredNorm();
  CHECK(noise_power > 0.2 * t * t * expect_var);
  CHECK(noise_power < 5.0 * t * t * expect_var);
}

TEST_CASE("infinite SNR reproduces the clean measurement exactly") {
  const int n = 8, t = 4;
  Rng rng(21);
  const PilotSet pilots = make_pilots(n, n, t, rng);
  CMat h = CMat::Zero(n, n);
  h(2, 3) = cplx(1.0, -0.5);
  const CVec clean = apply_sensing(vec(h), pilots);
  const Measurement m =
      measure(h, pilots, std::numeric_limits<double>::infinity(), rng);
  CHECK((m.y - clean).norm() == 0.0);
  CHECK(m.noise_var == 0.0);
}

TEST_CASE("a zero channel with finite SNR is rejected") {
  Rng rng(1);
  const PilotSet pilots = make_pilots(8, 8, 3, rng);
  const CMat zero = CMat::Zero(8, 8);
  CHECK_THROWS(measure(zero, pilots, 10.0, std::uint64_t(1)));
  CHECK_NOTHROW(
      measure(zero, pilots, std::numeric_limits<double>::infinity(), rng));
}

TEST_CASE("replayed streams share the noise shape across SNR values") {
  const int n = 16, t = 6;
  Rng rng(31);
  const PilotSet pilots = make_pilots(n, n, t, rng);
  CMat h(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) h(i, j) = cplx(rng.gaussian(), rng.gaussian());
  const CVec clean = apply_sensing(vec(h), pilots);

  const Rng snapshot = rng;
  Rng a = snapshot;
  Rng b = snapshot;
  const Measurement low = measure(h, pilots, 0.0, a);
  const Measurement high = measure(h, pilots, 20.0, b);

  const CVec e_low = low.y - clean;
  const CVec e_high = high.y - clean;
  const double ratio = std::sqrt(low.noise_var / high.noise_var);
  CHECK((e_low - ratio * e_high).norm() < 1e-12 * e_low.norm());
}
