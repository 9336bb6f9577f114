// SPDX-License-Identifier: Apache-2.0
#include "xlmimo/experiment.hpp"

#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "xlmimo/dictionary.hpp"
#include "xlmimo/estimator.hpp"
#include "xlmimo/model.hpp"
#include "xlmimo/rng.hpp"
#include "xlmimo/sensing.hpp"

namespace xlmimo {

namespace {

std::string fmt_g6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string join_warnings(const std::vector<std::string>& warnings) {
  std::string out;
  for (size_t i = 0; i < warnings.size(); ++i) {
    if (i > 0) out += ';';
    out += warnings[i];
  }
  return out;
}

}  // namespace

std::uint64_t sweep_point_seed(std::uint64_t seed_base, int pilot_len,
                               int trial) {
  return mix64(mix64(seed_base, static_cast<std::uint64_t>(pilot_len)),
               static_cast<std::uint64_t>(trial));
}

std::vector<ResultRow> run_sweep(const ExperimentConfig& config, int jobs) {
  require_valid(config);
  const SweepConfig& sw = config.sweep;
  const std::vector<std::string>& methods = config.estimator.methods;
  const int n_tx = config.geometry.n_tx;
  const int n_rx = config.geometry.n_rx;
  const ArrayGeometry base_geom = make_geometry(config.geometry);
  const SceneConfig scene_cfg = scene_config_from(config);

  const SideGrids grids =
      make_side_grids(config.grids.n_b, config.grids.n_k,
                      config.resolved_k_max(), config.grids.n_omega,
                      config.resolved_omega_max());
  const SideDictionary p_tx = polar_dictionary(n_tx, grids.tx);
  const SideDictionary p_rx = polar_dictionary(n_rx, grids.rx);

  const size_t n_t = sw.pilot_len.size();
  const size_t n_s = sw.snr_db.size();
  const size_t n_m = methods.size();
  const size_t n_trials = static_cast<size_t>(sw.trials);
  std::vector<ResultRow> rows(n_t * n_s * n_trials * n_m);

  struct Task {
    size_t t_idx;
    int trial;
  };
  std::vector<Task> tasks;
  tasks.reserve(n_t * n_trials);
  for (size_t t_idx = 0; t_idx < n_t; ++t_idx) {
    for (int trial = 0; trial < sw.trials; ++trial) {
      tasks.push_back({t_idx, trial});
    }
  }

  std::atomic<size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::mutex log_mutex;

  auto run_task = [&](const Task& task) {
    const int t = sw.pilot_len[task.t_idx];
    const std::uint64_t seed = sweep_point_seed(sw.seed_base, t, task.trial);

    Rng rng(seed);
    const Scene scene = synthesize_scene(base_geom, scene_cfg, rng);
    const CMat h_true = exact_channel(scene);
    const PilotSet pilots = make_pilots(n_tx, n_rx, t, rng);
    const Rng noise_state = rng;  // replayed so SNR levels share the noise

    for (size_t s_idx = 0; s_idx < n_s; ++s_idx) {
      Rng noise_rng = noise_state;
      const Measurement m =
          measure(h_true, pilots, sw.snr_db[s_idx], noise_rng);

      for (size_t m_idx = 0; m_idx < n_m; ++m_idx) {
        EstimateResult est;
        if (methods[m_idx] == "xl-uomp") {
          const SectorWindows sector =
              coarse_sector(m.y, pilots, grids.tx, grids.rx, n_tx, n_rx,
                            config.grids.sector_width);
          const LosDictionary g_sub =
              los_subdictionary(grids.tx, grids.rx, sector, n_tx, n_rx,
                                config.grids.sector_refine);
          est = xl_uomp(m.y, pilots, g_sub, p_tx, p_rx,
                        config.estimator.n_iter, config.estimator.stop_tol);
        } else if (methods[m_idx] == "polar-omp") {
          est = baseline_polar_omp(m.y, pilots, p_tx, p_rx,
                                   config.estimator.n_iter,
                                   config.estimator.stop_tol);
        } else {
          est = baseline_farfield_omp(m.y, pilots, p_tx, p_rx,
                                      config.estimator.n_iter,
                                      config.estimator.stop_tol);
        }

        ResultRow row;
        row.method = methods[m_idx];
        row.n_tx = n_tx;
        row.n_rx = n_rx;
        row.snr_db = sw.snr_db[s_idx];
        row.pilot_len = t;
        row.trial = task.trial;
        row.seed = seed;
        row.nmse_db = nmse(est.channel, h_true);
        row.iterations = est.iterations_run;
        row.warnings = join_warnings(est.warnings);
        const size_t r =
            ((task.t_idx * n_s + s_idx) * n_trials +
             static_cast<size_t>(task.trial)) *
                n_m +
            m_idx;
        rows[r] = std::move(row);
      }
    }
    if (config.output.verbosity >= 2) {
      std::lock_guard<std::mutex> lock(log_mutex);
      std::fprintf(stderr, "sweep point done: pilot_len=%d trial=%d\n", t,
                   task.trial);
    }
  };

  auto worker = [&]() {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= tasks.size() || failed.load()) {
        return;
      }
      try {
        run_task(tasks[i]);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) {
          first_error = std::current_exception();
        }
        failed.store(true);
        return;
      }
    }
  };

  size_t n_workers = jobs < 1 ? 1 : static_cast<size_t>(jobs);
  if (n_workers > tasks.size()) {
    n_workers = tasks.size();
  }
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (size_t i = 0; i < n_workers; ++i) {
      pool.emplace_back(worker);
    }
    for (std::thread& th : pool) {
      th.join();
    }
  }
  if (first_error) {
    std::rethrow_exception(first_error);
  }

  write_text_file(results_csv_text(rows), config.output.csv_path);
  return rows;
}

std::vector<TheoremRow> verify_theorem1(const ExperimentConfig& config) {
  require_valid(config);
  const int n_tx = config.geometry.n_tx;
  const int n_rx = config.geometry.n_rx;
  std::vector<TheoremRow> rows;
  rows.reserve(config.grids.theorem_products.size());
  for (double product : config.grids.theorem_products) {
    const double omega =
        product / (static_cast<double>(n_tx) * static_cast<double>(n_rx));
    TheoremRow row;
    row.omega = omega;
    const SubspacePower sp = subspace_power(n_rx, n_tx, omega);
    row.beams = sp.beams;
    row.fraction = sp.fraction;
    row.effective_rank =
        effective_rank(vandermonde_window(n_rx, n_tx, omega).values, 0.9);
    rows.push_back(row);
  }
  return rows;
}

std::vector<ModelErrorPoint> model_error_points(
    const ExperimentConfig& config) {
  require_valid(config);
  Rng rng(config.sweep.seed_base);
  ArrayGeometry geom = make_geometry(config.geometry);
  geom.theta_tx = rng.uniform(config.geometry.angle_lo, config.geometry.angle_hi);
  geom.theta_rx = rng.uniform(config.geometry.angle_lo, config.geometry.angle_hi);
  geom.phi_rx = rng.uniform(config.geometry.tilt_lo, config.geometry.tilt_hi);
  return model_error_curve(geom, config.geometry.r0_list_m);
}

std::string results_csv_text(const std::vector<ResultRow>& rows) {
  std::string out = "# xlmimo-sparse v1\n";
  for (const ResultRow& r : rows) {
    out += r.method;
    out += ',' + std::to_string(r.n_tx);
    out += ',' + std::to_string(r.n_rx);
    out += ',' + fmt_g6(r.snr_db);
    out += ',' + std::to_string(r.pilot_len);
    out += ',' + std::to_string(r.trial);
    out += ',' + std::to_string(r.seed);
    out += ',' + fmt_g6(r.nmse_db);
    out += ',' + fmt_g6(r.runtime_ms);
    out += ',' + std::to_string(r.iterations);
    out += ',' + r.warnings;
    out += '\n';
  }
  return out;
}

std::string theorem_csv_text(const std::vector<TheoremRow>& rows) {
  std::string out = "# xlmimo-sparse v1\n";
  for (const TheoremRow& r : rows) {
    out += fmt_g6(r.omega);
    out += ',' + std::to_string(r.beams);
    out += ',' + fmt_g6(r.fraction);
    out += ',' + std::to_string(r.effective_rank);
    out += '\n';
  }
  return out;
}

std::string model_error_csv_text(const std::vector<ModelErrorPoint>& rows) {
  std::string out = "# xlmimo-sparse v1\n";
  for (const ModelErrorPoint& r : rows) {
    out += fmt_g6(r.r0_m);
    out += ',' + fmt_g6(r.nmse_farfield_db);
    out += ',' + fmt_g6(r.nmse_polar_db);
    out += ',' + fmt_g6(r.nmse_generalized_db);
    out += '\n';
  }
  return out;
}

void write_text_file(const std::string& text, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write output file: " + path);
  }
  out << text;
  if (!out) {
    throw std::runtime_error("write failed: " + path);
  }
}

}  // namespace xlmimo
