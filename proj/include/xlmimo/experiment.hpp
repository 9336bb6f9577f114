// SPDX-License-Identifier: Apache-2.0
//
// Experiment orchestration: deterministic Monte-Carlo sweeps over SNR and
// pilot length, the coupling-window verification report, and the model-error
// report, all with stable CSV output.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "xlmimo/analysis.hpp"
#include "xlmimo/config.hpp"

namespace xlmimo {

struct ResultRow {
  std::string method;
  int n_tx = 0;
  int n_rx = 0;
  double snr_db = 0.0;
  int pilot_len = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  double nmse_db = 0.0;
  double runtime_ms = 0.0;  // kept at 0 so output bytes are reproducible
  int iterations = 0;
  std::string warnings;  // semicolon-joined
};

// Seed for one (pilot_len, trial) point. SNR is deliberately excluded:
// every SNR level of a point reuses the same scene, pilots, and noise shape,
// so SNR curves are paired comparisons.
std::uint64_t sweep_point_seed(std::uint64_t seed_base, int pilot_len,
                               int trial);

// Runs every configured method on identical data for each
// (pilot_len, snr, trial) combination and writes the CSV to
// config.output.csv_path. Rows come back in sweep-point order (pilot_len,
// snr, trial, method) regardless of how many worker threads ran.
std::vector<ResultRow> run_sweep(const ExperimentConfig& config, int jobs = 1);

struct TheoremRow {
  double omega = 0.0;
  int beams = 0;
  double fraction = 0.0;
  int effective_rank = 0;  // at 90% energy
};

// Sweeps the coupling value over grids.theorem_products / (n_tx * n_rx) at
// the configured array sizes.
std::vector<TheoremRow> verify_theorem1(const ExperimentConfig& config);

// Model-error curve over geometry.r0_list_m with angles drawn once from the
// configured ranges under sweep.seed_base.
std::vector<ModelErrorPoint> model_error_points(const ExperimentConfig& config);

// CSV renderings: a "# xlmimo-sparse v1" header line, then comma-separated
// data rows, floats with 6 significant digits, LF line ends.
std::string results_csv_text(const std::vector<ResultRow>& rows);
std::string theorem_csv_text(const std::vector<TheoremRow>& rows);
std::string model_error_csv_text(const std::vector<ModelErrorPoint>& rows);

void write_text_file(const std::string& text, const std::string& path);

}  // namespace xlmimo
