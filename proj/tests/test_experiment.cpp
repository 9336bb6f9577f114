// SPDX-License-Identifier: Apache-2.0
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "doctest.h"
#include "xlmimo/experiment.hpp"

using namespace xlmimo;

namespace {

// small enough to run in well under a second
ExperimentConfig tiny_config() {
  ExperimentConfig cfg = desk_scale_config();
  cfg.geometry.n_tx = 16;
  cfg.geometry.n_rx = 16;
  cfg.paths.n_paths = 1;
  cfg.grids.n_b = 32;
  cfg.grids.n_k = 2;
  cfg.grids.n_omega = 4;
  cfg.grids.sector_width = 2;
  cfg.grids.sector_refine = 1;
  cfg.estimator.n_iter = 4;
  cfg.sweep.snr_db = {10.0};
  cfg.sweep.pilot_len = {8};
  cfg.sweep.trials = 1;
  cfg.output.csv_path = "/tmp/xlmimo_test_sweep.csv";
  cfg.output.verbosity = 0;
  return cfg;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("sweep point seeds separate trials and pilot lengths") {
  std::set<std::uint64_t> seen;
  for (int t : {8, 16, 25}) {
    for (int trial = 0; trial < 10; ++trial) {
      seen.insert(sweep_point_seed(1, t, trial));
    }
  }
  CHECK(seen.size() == 30);
  CHECK(sweep_point_seed(1, 16, 3) != sweep_point_seed(2, 16, 3));
  CHECK(sweep_point_seed(5, 16, 3) == sweep_point_seed(5, 16, 3));
}

TEST_CASE("a one-point sweep produces one row per method") {
  ExperimentConfig cfg = tiny_config();
  const auto rows = run_sweep(cfg);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].method == "xl-uomp");
  CHECK(rows[1].method == "polar-omp");
  CHECK(rows[2].method == "farfield-omp");
  for (const ResultRow& r : rows) {
    CHECK(r.n_tx == 16);
    CHECK(r.n_rx == 16);
    CHECK(r.snr_db == 10.0);
    CHECK(r.pilot_len == 8);
    CHECK(r.trial == 0);
    CHECK(r.seed == sweep_point_seed(cfg.sweep.seed_base, 8, 0));
    CHECK(r.nmse_db < 0.0);  // anything above 0 dB failed outright
    CHECK(r.nmse_db >= -300.0);
    CHECK(r.runtime_ms == 0.0);
    CHECK(r.iterations >= 1);
  }
  std::remove(cfg.output.csv_path.c_str());
}

TEST_CASE("sweeps are deterministic byte for byte") {
  ExperimentConfig cfg = tiny_config();
  cfg.sweep.snr_db = {0.0, 20.0};
  cfg.sweep.trials = 2;

  const auto rows1 = run_sweep(cfg);
  const std::string file1 = slurp(cfg.output.csv_path);
  const auto rows2 = run_sweep(cfg);
  const std::string file2 = slurp(cfg.output.csv_path);

  CHECK(file1 == file2);
  CHECK(results_csv_text(rows1) == file1);
  REQUIRE(rows1.size() == rows2.size());
  for (std::size_t i = 0; i < rows1.size(); ++i) {
    CHECK(rows1[i].nmse_db == rows2[i].nmse_db);
    CHECK(rows1[i].seed == rows2[i].seed);
  }
  std::remove(cfg.output.csv_path.c_str());
}

TEST_CASE("worker count does not change the results") {
  ExperimentConfig cfg = tiny_config();
  cfg.sweep.trials = 3;
  const auto serial = run_sweep(cfg, 1);
  const auto threaded = run_sweep(cfg, 4);
  CHECK(results_csv_text(serial) == results_csv_text(threaded));
  std::remove(cfg.output.csv_path.c_str());
}

TEST_CASE("all SNR levels of a trial share one seed") {
  ExperimentConfig cfg = tiny_config();
  cfg.sweep.snr_db = {0.0, 10.0, 20.0};
  cfg.sweep.trials = 2;
  const auto rows = run_sweep(cfg);
  REQUIRE(rows.size() == 3 * 2 * 3);
  for (const ResultRow& a : rows) {
    for (const ResultRow& b : rows) {
      if (a.trial == b.trial && a.pilot_len == b.pilot_len) {
        CHECK(a.seed == b.seed);
      }
    }
  }
  // row order: snr outer, trial, then method
  CHECK(rows[0].snr_db == 0.0);
  CHECK(rows[0].trial == 0);
  CHECK(rows[3].trial == 1);
  CHECK(rows[6].snr_db == 10.0);
  std::remove(cfg.output.csv_path.c_str());
}

TEST_CASE("an invalid config is rejected before any work") {
  ExperimentConfig cfg = tiny_config();
  cfg.sweep.trials = -1;
  CHECK_THROWS_AS(run_sweep(cfg), std::runtime_error);
}

TEST_CASE("theorem verification sweeps the configured products") {
  ExperimentConfig cfg = desk_scale_config();
  cfg.geometry.n_tx = 32;
  cfg.geometry.n_rx = 32;
  cfg.grids.theorem_products = {1.0, 2.0, 4.0, 8.0};
  const auto rows = verify_theorem1(cfg);
  REQUIRE(rows.size() == 4);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double product = cfg.grids.theorem_products[i];
    CHECK(rows[i].omega == doctest::Approx(product / (32.0 * 32.0)));
    CHECK(rows[i].beams == int(std::ceil(product)));
    CHECK(rows[i].fraction > 0.0);
    CHECK(rows[i].fraction <= 1.0 + 1e-12);
    CHECK(rows[i].effective_rank >= 1);
  }
  // more coupling never needs fewer beams or less rank
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i].beams >= rows[i - 1].beams);
    CHECK(rows[i].effective_rank >= rows[i - 1].effective_rank);
  }
}

TEST_CASE("model error points keep the configured distances and ordering") {
  ExperimentConfig cfg = desk_scale_config();
  cfg.geometry.n_tx = 32;
  cfg.geometry.n_rx = 32;
  cfg.geometry.r0_list_m = {5.0, 15.0, 45.0};
  const auto points = model_error_points(cfg);
  REQUIRE(points.size() == 3);
  for (std::size_t i = 0; i < points.size(); ++i) {
    CHECK(points[i].r0_m == cfg.geometry.r0_list_m[i]);
    CHECK(points[i].nmse_generalized_db <= points[i].nmse_polar_db + 1e-9);
    CHECK(points[i].nmse_polar_db <= points[i].nmse_farfield_db + 1e-9);
  }
  // the draw is tied to the seed, so the same config reproduces itself
  const auto again = model_error_points(cfg);
  CHECK(again[0].nmse_generalized_db == points[0].nmse_generalized_db);
  ExperimentConfig other = cfg;
  other.sweep.seed_base = 99;
  const auto different = model_error_points(other);
  CHECK(different[0].nmse_generalized_db != points[0].nmse_generalized_db);
}

TEST_CASE("csv text is stable and carries no column header") {
  ResultRow row;
  row.method = "xl-uomp";
  row.n_tx = 64;
  row.n_rx = 64;
  row.snr_db = -10.0;
  row.pilot_len = 16;
  row.trial = 2;
  row.seed = 123;
  row.nmse_db = -31.2345678;
  row.iterations = 3;
  row.warnings = "a;b";
  const std::string text = results_csv_text({row});
  CHECK(text ==
        "# xlmimo-sparse v1\n"
        "xl-uomp,64,64,-10,16,2,123,-31.2346,0,3,a;b\n");
  CHECK(text.find('\r') == std::string::npos);

  TheoremRow tr;
  tr.omega = 1.0 / 4096.0;
  tr.beams = 2;
  tr.fraction = 0.6908553;
  tr.effective_rank = 3;
  const std::string ttext = theorem_csv_text({tr});
  CHECK(ttext ==
        "# xlmimo-sparse v1\n"
        "0.000244141,2,0.690855,3\n");

  ModelErrorPoint mp;
  mp.r0_m = 35.0;
  mp.nmse_farfield_db = -10.5;
  mp.nmse_polar_db = -20.25;
  mp.nmse_generalized_db = -64.4242424;
  const std::string mtext = model_error_csv_text({mp});
  CHECK(mtext ==
        "# xlmimo-sparse v1\n"
        "35,-10.5,-20.25,-64.4242\n");
}

TEST_CASE("text files write exactly and report failures") {
  const std::string path = "/tmp/xlmimo_test_text.csv";
  write_text_file("line1\nline2\n", path);
  CHECK(slurp(path) == "line1\nline2\n");
  std::remove(path.c_str());
  CHECK_THROWS(write_text_file("x", "/nonexistent-dir/file.csv"));
}
