// SPDX-License-Identifier: Apache-2.0
//
// Quantized parameter grids and the dictionaries built on them: per-side
// beamspace/curvature dictionaries, the five-parameter generalized
// dictionary, and the coarse-sector reduction that keeps the generalized
// dictionary tractable.
#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "xlmimo/types.hpp"

namespace xlmimo {

struct Grid {
  std::vector<double> b_values;      // sorted, in [-1, 1]
  std::vector<double> k_values;      // sorted; Rx [0, k_max], Tx [-k_max, 0]
  std::vector<double> omega_values;  // generalized dictionary only
};

// b uniform on [-1, 1) with n_b points; k linspace over [0, k_max] with n_k
// points, negated and re-sorted on the Tx side; omega linspace over
// [0, omega_max] with n_omega points (carried on both returned grids).
struct SideGrids {
  Grid tx;
  Grid rx;
};
SideGrids make_side_grids(int n_b, int n_k, double k_max, int n_omega,
                          double omega_max);

struct SideAtomMeta {
  int b_idx = 0;
  int k_idx = 0;
  double b = 0.0;
  double k = 0.0;
};

// Per-side dictionary: column j is steering_vector(n, b, k) for meta[j],
// enumerated b-major with k fastest.
struct SideDictionary {
  CMat atoms;  // n x (N_b * N_k)
  std::vector<SideAtomMeta> meta;
  int n = 0;
};
SideDictionary polar_dictionary(int n, const Grid& grid);

// Columns of `dict` whose k value is exactly zero (the pure beamspace
// subset, used by the far-field baseline).
SideDictionary farfield_subset(const SideDictionary& dict);

struct LosAtomMeta {
  double b_tx = 0.0;
  double k_tx = 0.0;
  double b_rx = 0.0;
  double k_rx = 0.0;
  double omega = 0.0;
};

// vec((a_rx a_tx^H) .* V(omega)), column-major; equivalently
// kron(conj(a_tx), a_rx) entrywise-multiplied by vec(V).
CVec generalized_atom(double b_tx, double k_tx, double b_rx, double k_rx,
                      double omega, int n_tx, int n_rx);
CVec generalized_atom(const LosAtomMeta& meta, int n_tx, int n_rx);

// Generalized dictionary. `atoms` is only populated when the full matrix
// fits the memory budget; the meta list is always present and atom(j)
// regenerates any column from it, so consumers that stream columns never
// need the materialized form.
struct LosDictionary {
  CMat atoms;  // (n_tx*n_rx) x cols when materialized, else 0 x 0
  std::vector<LosAtomMeta> meta;
  int n_tx = 0;
  int n_rx = 0;
  bool materialized = false;

  std::size_t cols() const { return meta.size(); }
  CVec atom(std::size_t j) const;
};

inline constexpr std::size_t kDefaultDictionaryBudget =
    std::size_t(256) * 1024 * 1024;  // bytes of atom storage

// Full Cartesian product over (b_tx, k_tx, b_rx, k_rx, omega), enumerated
// b_rx-major, then k_rx, omega, b_tx, with k_tx fastest. Throws when the
// materialized size would exceed `budget_bytes`.
LosDictionary los_dictionary(const Grid& tx_grid, const Grid& rx_grid,
                             int n_tx, int n_rx,
                             std::size_t budget_bytes = kDefaultDictionaryBudget);

// Index windows into the per-side b grids, inclusive and clipped.
struct SectorWindows {
  int tx_lo = 0, tx_hi = 0;
  int rx_lo = 0, rx_hi = 0;
  int tx_center = 0, rx_center = 0;
};

struct PilotSet;  // sensing.hpp

// One far-field 2D matching pass over the measurement: correlates the
// unvectorized measurement with the k = 0 beamspace atoms of both sides and
// returns the argmax direction pair expanded by +-width grid points per
// side, clipped at the grid edges. Throws on an all-zero measurement.
SectorWindows coarse_sector(const CVec& y, const PilotSet& pilots,
                            const Grid& tx_grid, const Grid& rx_grid,
                            int n_tx, int n_rx, int width);

// Generalized dictionary restricted to the sector's b windows. With
// refine == 1 the per-side b values are exactly the global-grid slices; a
// larger refine subdivides the same span at refine times the grid density
// (the center stays on-grid, so refine == 1 reproduces the plain slice).
// Atoms are materialized only within `budget_bytes`; the meta list and
// atom(j) are always available.
LosDictionary los_subdictionary(const Grid& tx_grid, const Grid& rx_grid,
                                const SectorWindows& sector, int n_tx,
                                int n_rx, int refine = 1,
                                std::size_t budget_bytes = kDefaultDictionaryBudget);

// Binary cache for repeated sweeps: row and column counts as 64-bit
// little-endian words, interleaved re/im doubles in column-major order, then
// one meta line per column as text. Requires a materialized dictionary.
void save_dictionary(const LosDictionary& dict, const std::string& path);
LosDictionary load_dictionary(const std::string& path);

}  // namespace xlmimo
