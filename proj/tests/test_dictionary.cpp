// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <cstdio>
#include <vector>

#include "doctest.h"
#include "xlmimo/dictionary.hpp"
#include "xlmimo/geometry.hpp"
#include "xlmimo/model.hpp"
#include "xlmimo/sensing.hpp"

using namespace xlmimo;

TEST_CASE("side grids cover their ranges with the documented signs") {
  const SideGrids g = make_side_grids(8, 3, 6e-3, 4, 5e-4);
  REQUIRE(g.rx.b_values.size() == 8);
  for (int i = 0; i < 8; ++i) {
    CHECK(g.rx.b_values[i] == doctest::Approx(-1.0 + 2.0 * i / 8.0));
  }
  CHECK(g.tx.b_values == g.rx.b_values);

  REQUIRE(g.rx.k_values.size() == 3);
  CHECK(g.rx.k_values[0] == 0.0);
  CHECK(g.rx.k_values[1] == doctest::Approx(3e-3));
  CHECK(g.rx.k_values[2] == doctest::Approx(6e-3));

  // Tx curvatures are the negated mirror, re-sorted ascending, ending at 0.
  REQUIRE(g.tx.k_values.size() == 3);
  CHECK(g.tx.k_values[0] == doctest::Approx(-6e-3));
  CHECK(g.tx.k_values[2] == 0.0);

  REQUIRE(g.rx.omega_values.size() == 4);
  CHECK(g.rx.omega_values[0] == 0.0);
  CHECK(g.rx.omega_values[3] == doctest::Approx(5e-4));
  CHECK(g.tx.omega_values == g.rx.omega_values);
}

TEST_CASE("per-side dictionary enumerates b-major with k fastest") {
  const SideGrids g = make_side_grids(4, 2, 1e-3, 1, 0.0);
  const SideDictionary d = polar_dictionary(8, g.rx);
  REQUIRE(d.atoms.cols() == 8);
  REQUIRE(d.meta.size() == 8);
  CHECK(d.meta[0].b_idx == 0);
  CHECK(d.meta[0].k_idx == 0);
  CHECK(d.meta[1].b_idx == 0);
  CHECK(d.meta[1].k_idx == 1);
  CHECK(d.meta[2].b_idx == 1);
  CHECK(d.meta[2].k_idx == 0);
  for (int j = 0; j < 8; ++j) {
    const CVec expect = steering_vector(8, d.meta[j].b, d.meta[j].k);
    CHECK((d.atoms.col(j) - expect).norm() == 0.0);
  }
}

TEST_CASE("far-field subset keeps exactly the zero-curvature columns") {
  const SideGrids g = make_side_grids(6, 3, 2e-3, 1, 0.0);
  const SideDictionary tx = polar_dictionary(8, g.tx);
  const SideDictionary flat = farfield_subset(tx);
  // one column per b value; the negated tx grid ends at -0.0 which still
  // compares equal to zero
  REQUIRE(flat.atoms.cols() == 6);
  for (const SideAtomMeta& m : flat.meta) {
    CHECK(m.k == 0.0);
  }
}

TEST_CASE("generalized atom entries follow the vec convention") {
  const int n_tx = 4, n_rx = 6;
  const double b_tx = 0.25, k_tx = -2e-3, b_rx = -0.5, k_rx = 1e-3,
               omega = 3e-4;
  const CVec atom = generalized_atom(b_tx, k_tx, b_rx, k_rx, omega, n_tx, n_rx);
  REQUIRE(atom.size() == n_tx * n_rx);
  const CVec atx = steering_vector(n_tx, b_tx, k_tx);
  const CVec arx = steering_vector(n_rx, b_rx, k_rx);
  const CMat v = vandermonde_window(n_rx, n_tx, omega).values;
  for (int i1 = 0; i1 < n_tx; ++i1) {
    for (int i2 = 0; i2 < n_rx; ++i2) {
      const cplx expect = arx(i2) * std::conj(atx(i1)) * v(i2, i1);
      CHECK(std::abs(atom(i1 * n_rx + i2) - expect) < 1e-14);
    }
  }
  // the meta overload is the same construction
  const CVec again =
      generalized_atom(LosAtomMeta{b_tx, k_tx, b_rx, k_rx, omega}, n_tx, n_rx);
  CHECK((again - atom).norm() == 0.0);
}

TEST_CASE("full generalized dictionary enumerates and materializes") {
  const SideGrids g = make_side_grids(4, 2, 1e-3, 2, 1e-4);
  const LosDictionary d = los_dictionary(g.tx, g.rx, 4, 4);
  REQUIRE(d.cols() == 4 * 2 * 4 * 2 * 2);  // b_tx k_tx b_rx k_rx omega
  CHECK(d.materialized);

  // order: b_rx major, then k_rx, omega, b_tx, k_tx fastest
  CHECK(d.meta[0].b_rx == g.rx.b_values[0]);
  CHECK(d.meta[0].k_rx == g.rx.k_values[0]);
  CHECK(d.meta[0].omega == g.rx.omega_values[0]);
  CHECK(d.meta[0].b_tx == g.tx.b_values[0]);
  CHECK(d.meta[0].k_tx == g.tx.k_values[0]);
  CHECK(d.meta[1].k_tx == g.tx.k_values[1]);
  CHECK(d.meta[1].b_tx == g.tx.b_values[0]);

  for (std::size_t j = 0; j < d.cols(); j += 17) {
    const CVec expect = generalized_atom(d.meta[j], 4, 4);
    CHECK((d.atom(j) - expect).norm() == 0.0);
  }
  CHECK_THROWS(d.atom(d.cols()));
}

TEST_CASE("dictionary over the memory budget throws with guidance") {
  const SideGrids g = make_side_grids(16, 4, 1e-3, 8, 1e-4);
  CHECK_THROWS_WITH_AS(los_dictionary(g.tx, g.rx, 64, 64, 1024),
                       doctest::Contains("budget"), std::runtime_error);
}

TEST_CASE("sector reduction at refine 1 is a slice of the full dictionary") {
  const SideGrids g = make_side_grids(6, 2, 1e-3, 2, 1e-4);
  SectorWindows sector;
  sector.tx_lo = 1;
  sector.tx_hi = 3;
  sector.tx_center = 2;
  sector.rx_lo = 0;
  sector.rx_hi = 1;
  sector.rx_center = 0;
  const LosDictionary sub = los_subdictionary(g.tx, g.rx, sector, 4, 4, 1);
  REQUIRE(sub.cols() == 3 * 2 * 2 * 2 * 2);

  const LosDictionary full = los_dictionary(g.tx, g.rx, 4, 4);
  std::size_t matched = 0;
  for (const LosAtomMeta& m : sub.meta) {
    bool found = false;
    for (const LosAtomMeta& fm : full.meta) {
      if (fm.b_tx == m.b_tx && fm.k_tx == m.k_tx && fm.b_rx == m.b_rx &&
          fm.k_rx == m.k_rx && fm.omega == m.omega) {
        found = true;
        break;
      }
    }
    if (found) ++matched;
    CHECK(m.b_tx >= g.tx.b_values[1]);
    CHECK(m.b_tx <= g.tx.b_values[3]);
  }
  CHECK(matched == sub.cols());  // bit-identical values, not approximations
}

TEST_CASE("sector refinement doubles the b density around the center") {
  const SideGrids g = make_side_grids(8, 1, 0.0, 1, 0.0);
  SectorWindows sector;
  sector.tx_lo = 2;
  sector.tx_hi = 5;
  sector.tx_center = 3;
  sector.rx_lo = 3;
  sector.rx_hi = 3;
  sector.rx_center = 3;
  const LosDictionary sub = los_subdictionary(g.tx, g.rx, sector, 4, 4, 2);
  // tx side: (5-2)*2+1 = 7 b values; rx side: 1
  REQUIRE(sub.cols() == 7);
  const double step = (g.tx.b_values[1] - g.tx.b_values[0]) / 2.0;
  std::vector<double> seen;
  for (std::size_t j = 0; j < sub.cols(); ++j) {
    seen.push_back(sub.meta[j].b_tx);
  }
  for (int j = 0; j < 7; ++j) {
    CHECK(seen[j] ==
          doctest::Approx(g.tx.b_values[3] + (j - 2) * step).epsilon(1e-12));
  }
  // grid points of the span stay included
  CHECK(seen[0] == doctest::Approx(g.tx.b_values[2]));
  CHECK(seen[2] == doctest::Approx(g.tx.b_values[3]));
  CHECK(seen[4] == doctest::Approx(g.tx.b_values[4]));
  CHECK(seen[6] == doctest::Approx(g.tx.b_values[5]));
}

TEST_CASE("sub-dictionary over budget stays usable as a lazy dictionary") {
  const SideGrids g = make_side_grids(8, 2, 1e-3, 2, 1e-4);
  SectorWindows sector;
  sector.tx_lo = 0;
  sector.tx_hi = 7;
  sector.tx_center = 3;
  sector.rx_lo = 0;
  sector.rx_hi = 7;
  sector.rx_center = 3;
  const LosDictionary sub =
      los_subdictionary(g.tx, g.rx, sector, 8, 8, 1, /*budget_bytes=*/64);
  CHECK_FALSE(sub.materialized);
  CHECK(sub.atoms.size() == 0);
  REQUIRE(sub.cols() == 8 * 2 * 8 * 2 * 2);
  const CVec a = sub.atom(100);
  const CVec expect = generalized_atom(sub.meta[100], 8, 8);
  CHECK((a - expect).norm() == 0.0);
}

TEST_CASE("coarse sector locks onto a planted beam pair") {
  const int n = 16, t = 6;
  const SideGrids g = make_side_grids(16, 2, 1e-3, 2, 1e-4);
  Rng rng(5);
  const PilotSet pilots = make_pilots(n, n, t, rng);

  const double b_tx = g.tx.b_values[10], b_rx = g.rx.b_values[3];
  const CVec atom = generalized_atom(b_tx, 0.0, b_rx, 0.0, 0.0, n, n);
  const CVec y = apply_sensing(atom, pilots);

  const SectorWindows w = coarse_sector(y, pilots, g.tx, g.rx, n, n, 2);
  CHECK(w.tx_center == 10);
  CHECK(w.rx_center == 3);
  CHECK(w.tx_lo == 8);
  CHECK(w.tx_hi == 12);
  CHECK(w.rx_lo == 1);
  CHECK(w.rx_hi == 5);

  // wide windows clip at the grid edges
  const SectorWindows wide = coarse_sector(y, pilots, g.tx, g.rx, n, n, 50);
  CHECK(wide.tx_lo == 0);
  CHECK(wide.tx_hi == 15);

  const CVec zero = CVec::Zero(t * t);
  CHECK_THROWS(coarse_sector(zero, pilots, g.tx, g.rx, n, n, 2));
}

TEST_CASE("coarse sector contains the LoS direction on random scenes") {
  const int n = 32, t = 12, width = 4;
  const SideGrids g = make_side_grids(64, 2, 5e-3, 2, 5e-3);
  ArrayGeometry geom;
  geom.n_tx = n;
  geom.n_rx = n;
  geom.r0_m = 1.5;
  SceneConfig cfg;
  cfg.n_paths = 0;  // LoS only
  cfg.tilt_lo = -kPi / 3.0;
  cfg.tilt_hi = kPi / 3.0;

  int hits = 0;
  const int trials = 40;
  for (int trial = 0; trial < trials; ++trial) {
    Rng rng(mix64(900, trial));
    const Scene scene = synthesize_scene(geom, cfg, rng);
    const PilotSet pilots = make_pilots(n, n, t, rng);
    const CVec y = apply_sensing(vec(exact_channel(scene)), pilots);
    const SectorWindows w = coarse_sector(y, pilots, g.tx, g.rx, n, n, width);

    const PathParams p = los_params(scene.geometry);
    int best_tx = 0, best_rx = 0;
    for (int j = 1; j < 64; ++j) {
      if (std::abs(g.tx.b_values[j] - p.b_tx) <
          std::abs(g.tx.b_values[best_tx] - p.b_tx))
        best_tx = j;
      if (std::abs(g.rx.b_values[j] - p.b_rx) <
          std::abs(g.rx.b_values[best_rx] - p.b_rx))
        best_rx = j;
    }
    if (best_tx >= w.tx_lo && best_tx <= w.tx_hi && best_rx >= w.rx_lo &&
        best_rx <= w.rx_hi) {
      ++hits;
    }
  }
  CHECK(hits >= trials * 95 / 100);
}

TEST_CASE("dictionary cache round-trips exactly") {
  const SideGrids g = make_side_grids(3, 2, 1e-3, 2, 2e-4);
  const LosDictionary d = los_dictionary(g.tx, g.rx, 4, 6);
  const std::string path = "/tmp/xlmimo_test_dict.bin";
  save_dictionary(d, path);
  const LosDictionary back = load_dictionary(path);
  CHECK(back.n_tx == d.n_tx);
  CHECK(back.n_rx == d.n_rx);
  REQUIRE(back.cols() == d.cols());
  CHECK((back.atoms - d.atoms).norm() == 0.0);
  for (std::size_t j = 0; j < d.cols(); ++j) {
    CHECK(back.meta[j].b_tx == d.meta[j].b_tx);
    CHECK(back.meta[j].k_tx == d.meta[j].k_tx);
    CHECK(back.meta[j].b_rx == d.meta[j].b_rx);
    CHECK(back.meta[j].k_rx == d.meta[j].k_rx);
    CHECK(back.meta[j].omega == d.meta[j].omega);
  }
  std::remove(path.c_str());
  CHECK_THROWS(load_dictionary(path));
}
