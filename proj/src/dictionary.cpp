// SPDX-License-Identifier: Apache-2.0
#include "xlmimo/dictionary.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "xlmimo/model.hpp"
#include "xlmimo/sensing.hpp"

namespace xlmimo {

namespace {

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(n);
  if (n == 1) {
    v[0] = lo;
    return v;
  }
  for (int i = 0; i < n; ++i) v[i] = lo + i * (hi - lo) / (n - 1);
  return v;
}

// One generalized column written in place: entry (i2 + n_rx*i1) of the
// column equals arx(i2) * conj(atx(i1)) * V(i2, i1).
void fill_generalized_column(const CVec& arx, const CVec& atx, const CMat& v,
                             cplx* out) {
  const int n_tx = static_cast<int>(atx.size());
  const int n_rx = static_cast<int>(arx.size());
  for (int i1 = 0; i1 < n_tx; ++i1) {
    const cplx t = std::conj(atx(i1));
    for (int i2 = 0; i2 < n_rx; ++i2)
      out[std::size_t(i1) * n_rx + i2] = arx(i2) * t * v(i2, i1);
  }
}

struct BList {
  std::vector<double> values;
};

// Sector b values at `refine` times the grid density. refine == 1 takes the
// grid slice verbatim so the values stay bit-identical to the global grid.
BList sector_b_values(const Grid& grid, int lo, int hi, int center,
                      int refine) {
  BList out;
  const auto& b = grid.b_values;
  if (lo < 0 || hi >= static_cast<int>(b.size()) || lo > hi)
    throw std::invalid_argument("sector window outside the b grid");
  if (refine < 1) throw std::invalid_argument("refine must be >= 1");
  if (refine == 1 || b.size() < 2) {
    out.values.assign(b.begin() + lo, b.begin() + hi + 1);
    return out;
  }
  const double step = (b[1] - b[0]) / refine;
  for (int j = -(center - lo) * refine; j <= (hi - center) * refine; ++j)
    out.values.push_back(b[center] + j * step);
  return out;
}

LosDictionary build_los_dictionary(const std::vector<double>& b_tx,
                                   const std::vector<double>& k_tx,
                                   const std::vector<double>& b_rx,
                                   const std::vector<double>& k_rx,
                                   const std::vector<double>& omegas,
                                   int n_tx, int n_rx,
                                   std::size_t budget_bytes,
                                   bool throw_over_budget) {
  if (b_tx.empty() || k_tx.empty() || b_rx.empty() || k_rx.empty() ||
      omegas.empty())
    throw std::invalid_argument("generalized dictionary grids must be nonempty");

  LosDictionary dict;
  dict.n_tx = n_tx;
  dict.n_rx = n_rx;

  const std::size_t cols = b_tx.size() * k_tx.size() * b_rx.size() *
                           k_rx.size() * omegas.size();
  const std::size_t rows = std::size_t(n_tx) * n_rx;
  const std::size_t bytes = rows * cols * sizeof(cplx);
  if (bytes > budget_bytes && throw_over_budget) {
    char msg[256];
    std::snprintf(msg, sizeof msg,
                  "generalized dictionary needs %zu MB for %zu columns of "
                  "length %zu, over the %zu MB budget; reduce the b range "
                  "with coarse_sector / los_subdictionary",
                  bytes >> 20, cols, rows, budget_bytes >> 20);
    throw std::runtime_error(msg);
  }

  dict.meta.reserve(cols);
  for (double brv : b_rx)
    for (double krv : k_rx)
      for (double om : omegas)
        for (double btv : b_tx)
          for (double ktv : k_tx)
            dict.meta.push_back({btv, ktv, brv, krv, om});

  if (bytes <= budget_bytes) {
    dict.atoms.resize(rows, cols);
    dict.materialized = true;
    std::vector<CMat> windows;
    windows.reserve(omegas.size());
    for (double om : omegas)
      windows.push_back(vandermonde_window(n_rx, n_tx, om).values);

    std::size_t col = 0;
    for (double brv : b_rx)
      for (double krv : k_rx) {
        const CVec arx = steering_vector(n_rx, brv, krv);
        for (std::size_t oi = 0; oi < omegas.size(); ++oi)
          for (double btv : b_tx)
            for (double ktv : k_tx) {
              const CVec atx = steering_vector(n_tx, btv, ktv);
              fill_generalized_column(arx, atx, windows[oi],
                                      dict.atoms.col(col).data());
              ++col;
            }
      }
  }
  return dict;
}

}  // namespace

SideGrids make_side_grids(int n_b, int n_k, double k_max, int n_omega,
                          double omega_max) {
  if (n_b < 1 || n_k < 1 || n_omega < 0)
    throw std::invalid_argument("grid sizes must be positive");
  if (k_max < 0.0 || omega_max < 0.0)
    throw std::invalid_argument("k_max and omega_max must be nonnegative");

  SideGrids g;
  g.rx.b_values.resize(n_b);
  for (int i = 0; i < n_b; ++i) g.rx.b_values[i] = -1.0 + 2.0 * i / n_b;
  g.tx.b_values = g.rx.b_values;

  g.rx.k_values = linspace(0.0, k_max, n_k);
  g.tx.k_values = g.rx.k_values;
  for (double& k : g.tx.k_values) k = -k;
  std::sort(g.tx.k_values.begin(), g.tx.k_values.end());

  if (n_omega > 0) {
    g.rx.omega_values = linspace(0.0, omega_max, n_omega);
    g.tx.omega_values = g.rx.omega_values;
  }
  return g;
}

SideDictionary polar_dictionary(int n, const Grid& grid) {
  if (grid.b_values.empty() || grid.k_values.empty())
    throw std::invalid_argument("polar_dictionary: grid must carry b and k");
  SideDictionary d;
  d.n = n;
  const int nb = static_cast<int>(grid.b_values.size());
  const int nk = static_cast<int>(grid.k_values.size());
  d.atoms.resize(n, std::size_t(nb) * nk);
  d.meta.reserve(std::size_t(nb) * nk);
  int col = 0;
  for (int bi = 0; bi < nb; ++bi)
    for (int ki = 0; ki < nk; ++ki) {
      d.atoms.col(col++) = steering_vector(n, grid.b_values[bi],
                                           grid.k_values[ki]);
      d.meta.push_back({bi, ki, grid.b_values[bi], grid.k_values[ki]});
    }
  return d;
}

SideDictionary farfield_subset(const SideDictionary& dict) {
  SideDictionary d;
  d.n = dict.n;
  std::vector<int> keep;
  for (std::size_t j = 0; j < dict.meta.size(); ++j)
    if (dict.meta[j].k == 0.0) keep.push_back(static_cast<int>(j));
  d.atoms.resize(dict.atoms.rows(), keep.size());
  d.meta.reserve(keep.size());
  for (std::size_t j = 0; j < keep.size(); ++j) {
    d.atoms.col(j) = dict.atoms.col(keep[j]);
    d.meta.push_back(dict.meta[keep[j]]);
  }
  return d;
}

CVec generalized_atom(double b_tx, double k_tx, double b_rx, double k_rx,
                      double omega, int n_tx, int n_rx) {
  const CVec arx = steering_vector(n_rx, b_rx, k_rx);
  const CVec atx = steering_vector(n_tx, b_tx, k_tx);
  const CMat v = vandermonde_window(n_rx, n_tx, omega).values;
  CVec out(std::size_t(n_tx) * n_rx);
  fill_generalized_column(arx, atx, v, out.data());
  return out;
}

CVec generalized_atom(const LosAtomMeta& meta, int n_tx, int n_rx) {
  return generalized_atom(meta.b_tx, meta.k_tx, meta.b_rx, meta.k_rx,
                          meta.omega, n_tx, n_rx);
}

CVec LosDictionary::atom(std::size_t j) const {
  if (j >= meta.size())
    throw std::out_of_range("dictionary column index out of range");
  if (materialized) return atoms.col(j);
  return generalized_atom(meta[j], n_tx, n_rx);
}

LosDictionary los_dictionary(const Grid& tx_grid, const Grid& rx_grid,
                             int n_tx, int n_rx, std::size_t budget_bytes) {
  const std::vector<double>& omegas = !rx_grid.omega_values.empty()
                                          ? rx_grid.omega_values
                                          : tx_grid.omega_values;
  if (omegas.empty())
    throw std::invalid_argument("los_dictionary: grids must carry omega values");
  return build_los_dictionary(tx_grid.b_values, tx_grid.k_values,
                              rx_grid.b_values, rx_grid.k_values, omegas,
                              n_tx, n_rx, budget_bytes, true);
}

SectorWindows coarse_sector(const CVec& y, const PilotSet& pilots,
                            const Grid& tx_grid, const Grid& rx_grid,
                            int n_tx, int n_rx, int width) {
  if (width < 0) throw std::invalid_argument("sector width must be >= 0");
  if (y.norm() == 0.0)
    throw std::runtime_error(
        "coarse_sector: no dominant direction in an all-zero measurement");
  const int t = pilots.pilot_len;
  if (y.size() != Eigen::Index(t) * t)
    throw std::invalid_argument("coarse_sector: measurement length != T^2");

  const int nb_tx = static_cast<int>(tx_grid.b_values.size());
  const int nb_rx = static_cast<int>(rx_grid.b_values.size());
  CMat s_tx(t, nb_tx), s_rx(t, nb_rx);
  for (int j = 0; j < nb_tx; ++j)
    s_tx.col(j) = pilots.psi_tx.adjoint() *
                  steering_vector(n_tx, tx_grid.b_values[j], 0.0);
  for (int j = 0; j < nb_rx; ++j)
    s_rx.col(j) = pilots.psi_rx.adjoint() *
                  steering_vector(n_rx, rx_grid.b_values[j], 0.0);

  const CMat z = unvec(y, t, t);
  Eigen::MatrixXd c = (s_rx.adjoint() * z * s_tx).cwiseAbs();
  const RVec nr = s_rx.colwise().norm();
  const RVec nt = s_tx.colwise().norm();
  c = c.array() / (nr * nt.transpose()).array().max(1e-300);

  Eigen::Index m = 0, n = 0;
  c.maxCoeff(&m, &n);

  SectorWindows w;
  w.tx_center = static_cast<int>(n);
  w.rx_center = static_cast<int>(m);
  w.tx_lo = std::max(0, w.tx_center - width);
  w.tx_hi = std::min(nb_tx - 1, w.tx_center + width);
  w.rx_lo = std::max(0, w.rx_center - width);
  w.rx_hi = std::min(nb_rx - 1, w.rx_center + width);
  return w;
}

LosDictionary los_subdictionary(const Grid& tx_grid, const Grid& rx_grid,
                                const SectorWindows& sector, int n_tx,
                                int n_rx, int refine,
                                std::size_t budget_bytes) {
  const std::vector<double>& omegas = !rx_grid.omega_values.empty()
                                          ? rx_grid.omega_values
                                          : tx_grid.omega_values;
  if (omegas.empty())
    throw std::invalid_argument(
        "los_subdictionary: grids must carry omega values");
  const BList b_tx = sector_b_values(tx_grid, sector.tx_lo, sector.tx_hi,
                                     sector.tx_center, refine);
  const BList b_rx = sector_b_values(rx_grid, sector.rx_lo, sector.rx_hi,
                                     sector.rx_center, refine);
  return build_los_dictionary(b_tx.values, tx_grid.k_values, b_rx.values,
                              rx_grid.k_values, omegas, n_tx, n_rx,
                              budget_bytes, false);
}

void save_dictionary(const LosDictionary& dict, const std::string& path) {
  if (!dict.materialized)
    throw std::runtime_error("cannot cache a non-materialized dictionary");
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open dictionary cache for write");

  // Raw little-endian doubles; this cache is a local artifact, not an
  // interchange format, and every supported target is little-endian.
  const std::uint64_t rows = dict.atoms.rows(), cols = dict.atoms.cols();
  f.write(reinterpret_cast<const char*>(&rows), sizeof rows);
  f.write(reinterpret_cast<const char*>(&cols), sizeof cols);
  for (std::uint64_t j = 0; j < cols; ++j)
    for (std::uint64_t i = 0; i < rows; ++i) {
      const cplx v = dict.atoms(i, j);
      const double re = v.real(), im = v.imag();
      f.write(reinterpret_cast<const char*>(&re), sizeof re);
      f.write(reinterpret_cast<const char*>(&im), sizeof im);
    }
  f << dict.n_tx << ' ' << dict.n_rx << '\n';
  char line[160];
  for (const LosAtomMeta& m : dict.meta) {
    std::snprintf(line, sizeof line, "%.17g %.17g %.17g %.17g %.17g\n",
                  m.b_tx, m.k_tx, m.b_rx, m.k_rx, m.omega);
    f << line;
  }
  if (!f) throw std::runtime_error("dictionary cache write failed");
}

LosDictionary load_dictionary(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open dictionary cache for read");
  std::uint64_t rows = 0, cols = 0;
  f.read(reinterpret_cast<char*>(&rows), sizeof rows);
  f.read(reinterpret_cast<char*>(&cols), sizeof cols);
  if (!f || rows == 0) throw std::runtime_error("corrupt dictionary cache");

  LosDictionary dict;
  dict.atoms.resize(rows, cols);
  for (std::uint64_t j = 0; j < cols; ++j)
    for (std::uint64_t i = 0; i < rows; ++i) {
      double re = 0.0, im = 0.0;
      f.read(reinterpret_cast<char*>(&re), sizeof re);
      f.read(reinterpret_cast<char*>(&im), sizeof im);
      dict.atoms(i, j) = {re, im};
    }
  if (!f) throw std::runtime_error("corrupt dictionary cache");
  f >> dict.n_tx >> dict.n_rx;
  dict.meta.resize(cols);
  for (std::uint64_t j = 0; j < cols; ++j) {
    LosAtomMeta& m = dict.meta[j];
    f >> m.b_tx >> m.k_tx >> m.b_rx >> m.k_rx >> m.omega;
  }
  if (!f) throw std::runtime_error("corrupt dictionary cache");
  if (std::uint64_t(dict.n_tx) * dict.n_rx != rows)
    throw std::runtime_error("dictionary cache dimensions disagree");
  dict.materialized = true;
  return dict;
}

}  // namespace xlmimo
