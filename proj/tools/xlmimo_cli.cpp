// SPDX-License-Identifier: Apache-2.0
//
// Command-line harness: deterministic estimation sweeps, the model-error and
// coupling-window reports, scene dumps, and one-shot estimation runs.
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "xlmimo/config.hpp"
#include "xlmimo/experiment.hpp"

namespace {

using namespace xlmimo;

// 10*log10 of the mean linear error ratio per (method, pilot_len, snr).
void print_sweep_summary(const std::vector<ResultRow>& rows) {
  struct Key {
    std::string method;
    int pilot_len;
    double snr_db;
    bool operator<(const Key& o) const {
      if (method != o.method) return method < o.method;
      if (pilot_len != o.pilot_len) return pilot_len < o.pilot_len;
      return snr_db < o.snr_db;
    }
  };
  std::map<Key, std::pair<double, int>> acc;
  for (const ResultRow& r : rows) {
    auto& slot = acc[{r.method, r.pilot_len, r.snr_db}];
    slot.first += std::pow(10.0, r.nmse_db / 10.0);
    slot.second += 1;
  }
  for (const auto& [key, slot] : acc) {
    std::printf("%-14s pilot_len=%-3d snr=%6.1f dB  mean nmse %8.2f dB  (%d trials)\n",
                key.method.c_str(), key.pilot_len, key.snr_db,
                10.0 * std::log10(slot.first / slot.second), slot.second);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"xlmimo-sparse: near-field channel synthesis and estimation"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  std::string config_path;
  std::string out_path;
  std::string scale = "desk";
  std::uint64_t seed = 0;
  int jobs = 1;
  app.add_option("--config", config_path, "JSON config file (overlays the scale defaults)");
  CLI::Option* seed_opt =
      app.add_option("--seed", seed, "override sweep.seed_base");
  app.add_option("--jobs", jobs, "worker threads for sweeps")
      ->check(CLI::PositiveNumber);
  app.add_option("--out", out_path, "output path (overrides output.csv_path)");
  app.add_option("--scale", scale, "default parameter set")
      ->check(CLI::IsMember({"desk", "paper"}));

  CLI::App* cmd_sweep = app.add_subcommand(
      "sweep", "run the configured SNR x pilot-length estimation sweep");
  CLI::App* cmd_model_error = app.add_subcommand(
      "model-error", "model approximation error over the configured distances");
  CLI::App* cmd_theorem = app.add_subcommand(
      "verify-theorem1", "coupling-window subspace power and effective rank");
  CLI::App* cmd_synth =
      app.add_subcommand("synth", "draw one random scene and dump it as JSON");
  CLI::App* cmd_estimate = app.add_subcommand(
      "estimate", "one-shot: synthesize, measure, and estimate once");

  CLI11_PARSE(app, argc, argv);

  try {
    ExperimentConfig cfg =
        scale == "paper" ? paper_scale_config() : desk_scale_config();
    if (!config_path.empty()) {
      cfg = load_config(config_path, cfg);
    }
    if (seed_opt->count() > 0) {
      cfg.sweep.seed_base = seed;
    }
    if (!out_path.empty()) {
      cfg.output.csv_path = out_path;
    }

    if (cmd_sweep->parsed()) {
      const std::vector<ResultRow> rows = run_sweep(cfg, jobs);
      if (cfg.output.verbosity >= 1) {
        print_sweep_summary(rows);
        std::printf("wrote %zu rows to %s\n", rows.size(),
                    cfg.output.csv_path.c_str());
      }
    } else if (cmd_model_error->parsed()) {
      const std::vector<ModelErrorPoint> points = model_error_points(cfg);
      write_text_file(model_error_csv_text(points), cfg.output.csv_path);
      if (cfg.output.verbosity >= 1) {
        for (const ModelErrorPoint& p : points) {
          std::printf(
              "r0=%6.1f m  farfield %8.2f dB  polar %8.2f dB  generalized %8.2f dB\n",
              p.r0_m, p.nmse_farfield_db, p.nmse_polar_db,
              p.nmse_generalized_db);
        }
        std::printf("wrote %zu rows to %s\n", points.size(),
                    cfg.output.csv_path.c_str());
      }
    } else if (cmd_theorem->parsed()) {
      const std::vector<TheoremRow> rows = verify_theorem1(cfg);
      write_text_file(theorem_csv_text(rows), cfg.output.csv_path);
      if (cfg.output.verbosity >= 1) {
        for (const TheoremRow& r : rows) {
          std::printf(
              "omega=%-12g beams=%-4d power fraction %.4f  effective rank %d\n",
              r.omega, r.beams, r.fraction, r.effective_rank);
        }
        std::printf("wrote %zu rows to %s\n", rows.size(),
                    cfg.output.csv_path.c_str());
      }
    } else if (cmd_synth->parsed()) {
      require_valid(cfg);
      const Scene scene =
          synthesize_scene(make_geometry(cfg.geometry), scene_config_from(cfg),
                           cfg.sweep.seed_base);
      const std::string text = scene_to_json_text(scene);
      if (out_path.empty()) {
        std::fputs(text.c_str(), stdout);
      } else {
        write_text_file(text, out_path);
        if (cfg.output.verbosity >= 1) {
          std::printf("wrote scene to %s\n", out_path.c_str());
        }
      }
    } else if (cmd_estimate->parsed()) {
      require_valid(cfg);
      // One point: first pilot length, first SNR, trial 0.
      cfg.sweep.pilot_len = {cfg.sweep.pilot_len.front()};
      cfg.sweep.snr_db = {cfg.sweep.snr_db.front()};
      cfg.sweep.trials = 1;
      const std::vector<ResultRow> rows = run_sweep(cfg, 1);
      for (const ResultRow& r : rows) {
        std::printf("%-14s nmse %8.2f dB  %d iterations%s%s\n",
                    r.method.c_str(), r.nmse_db, r.iterations,
                    r.warnings.empty() ? "" : "  warnings: ",
                    r.warnings.c_str());
      }
      if (cfg.output.verbosity >= 1) {
        std::printf("wrote %zu rows to %s\n", rows.size(),
                    cfg.output.csv_path.c_str());
      }
    }
  } catch (const std::exception& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    return 1;
  }
  return 0;
}
