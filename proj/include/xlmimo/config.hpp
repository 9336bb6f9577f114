// SPDX-License-Identifier: Apache-2.0
//
// Experiment configuration: nested blocks loaded from JSON, validated as a
// whole (every offending field reported, not just the first), plus scene
// serialization for the synth/estimate commands.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "xlmimo/geometry.hpp"
#include "xlmimo/types.hpp"

namespace xlmimo {

struct GeometryConfig {
  int n_tx = 64;
  int n_rx = 64;
  double carrier_hz = 100e9;
  double spacing_m = 0.0;  // 0 selects half-wavelength spacing
  double r0_m = 0.75;
  double angle_lo = -kPi / 3.0;  // azimuth range for both link ends
  double angle_hi = kPi / 3.0;
  double tilt_lo = -kPi / 3.0;  // receive-array tilt range
  double tilt_hi = kPi / 3.0;
  std::vector<double> r0_list_m = {10.0, 20.0, 35.0, 50.0, 100.0};
};

struct PathsConfig {
  int n_paths = 3;
  double loss_lo_db = -10.0;
  double loss_hi_db = -5.0;
  double radius_lo_m = 0.0;  // 0/0 selects [r0, 2*r0]
  double radius_hi_m = 0.0;
};

struct GridsConfig {
  int n_b = 128;
  int n_k = 4;
  double k_max = 0.0;  // 0 derives wavelength / (4 * r0)
  int n_omega = 8;
  double omega_max = 0.0;  // 0 derives wavelength / (4 * r0)
  int sector_width = 4;
  int sector_refine = 2;
  std::vector<double> theorem_products = {1.0, 2.0,  3.0, 4.5,
                                          6.0, 8.0, 12.0, 16.0};
};

struct EstimatorConfig {
  int n_iter = 8;
  double stop_tol = 1e-8;
  int n_rf = 5;  // recorded with the setup; the measurement path doesn't use it
  std::vector<std::string> methods = {"xl-uomp", "polar-omp", "farfield-omp"};
};

struct SweepConfig {
  std::vector<double> snr_db = {-10.0, 0.0, 10.0, 20.0, 30.0};
  std::vector<int> pilot_len = {16};
  int trials = 20;
  std::uint64_t seed_base = 1;
};

struct OutputConfig {
  std::string csv_path = "results.csv";
  int verbosity = 1;
};

struct ExperimentConfig {
  GeometryConfig geometry;
  PathsConfig paths;
  GridsConfig grids;
  EstimatorConfig estimator;
  SweepConfig sweep;
  OutputConfig output;

  // Empty when the config is usable; otherwise one message per bad field.
  std::vector<std::string> validate() const;

  double wavelength() const { return kSpeedOfLight / geometry.carrier_hz; }
  double resolved_k_max() const;
  double resolved_omega_max() const;
};

// Baseline configs for the two supported scales. Desk is the default-
// constructed config above; paper raises the arrays to 256 elements with
// 25-symbol pilots at 35 m.
ExperimentConfig desk_scale_config();
ExperimentConfig paper_scale_config();

// JSON round trip. Loading overlays the file's keys onto `base`, so partial
// files are fine; unknown keys are an error. Throws std::runtime_error with
// every problem listed.
ExperimentConfig load_config(const std::string& path,
                             const ExperimentConfig& base = {});
ExperimentConfig config_from_json_text(const std::string& text,
                                       const ExperimentConfig& base = {});
std::string config_to_json_text(const ExperimentConfig& config);
void save_config(const ExperimentConfig& config, const std::string& path);

// Throws std::runtime_error listing every offending field when invalid.
void require_valid(const ExperimentConfig& config);

// Array geometry with the configured sizes and carrier; angles zeroed.
ArrayGeometry make_geometry(const GeometryConfig& geometry);

// Scene-draw parameters assembled from the geometry and paths blocks.
SceneConfig scene_config_from(const ExperimentConfig& config);

// Scene serialization used by the synth and estimate commands.
std::string scene_to_json_text(const Scene& scene);
Scene scene_from_json_text(const std::string& text);
void save_scene(const Scene& scene, const std::string& path);
Scene load_scene(const std::string& path);

}  // namespace xlmimo
