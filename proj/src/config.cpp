// SPDX-License-Identifier: Apache-2.0
#include "xlmimo/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace xlmimo {
namespace {

using nlohmann::json;

void join_and_throw(const std::string& what,
                    const std::vector<std::string>& errors) {
  std::string msg = what;
  for (const std::string& e : errors) {
    msg += "\n  - " + e;
  }
  throw std::runtime_error(msg);
}

void check_keys(const json& j, const std::string& block,
                const std::set<std::string>& allowed,
                std::vector<std::string>& errors) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (allowed.find(it.key()) == allowed.end()) {
      errors.push_back(block + ": unknown key '" + it.key() + "'");
    }
  }
}

template <typename T>
void read_key(const json& j, const std::string& block, const char* key,
              T& into, std::vector<std::string>& errors) {
  if (!j.contains(key)) {
    return;
  }
  try {
    into = j.at(key).get<T>();
  } catch (const json::exception&) {
    errors.push_back(block + "." + key + ": wrong type");
  }
}

void parse_geometry(const json& j, GeometryConfig& g,
                    std::vector<std::string>& errors) {
  check_keys(j, "geometry",
             {"n_tx", "n_rx", "carrier_hz", "spacing_m", "r0_m", "angle_lo",
              "angle_hi", "tilt_lo", "tilt_hi", "r0_list_m"},
             errors);
  read_key(j, "geometry", "n_tx", g.n_tx, errors);
  read_key(j, "geometry", "n_rx", g.n_rx, errors);
  read_key(j, "geometry", "carrier_hz", g.carrier_hz, errors);
  read_key(j, "geometry", "spacing_m", g.spacing_m, errors);
  read_key(j, "geometry", "r0_m", g.r0_m, errors);
  read_key(j, "geometry", "angle_lo", g.angle_lo, errors);
  read_key(j, "geometry", "angle_hi", g.angle_hi, errors);
  read_key(j, "geometry", "tilt_lo", g.tilt_lo, errors);
  read_key(j, "geometry", "tilt_hi", g.tilt_hi, errors);
  read_key(j, "geometry", "r0_list_m", g.r0_list_m, errors);
}

void parse_paths(const json& j, PathsConfig& p,
                 std::vector<std::string>& errors) {
  check_keys(j, "paths",
             {"n_paths", "loss_lo_db", "loss_hi_db", "radius_lo_m",
              "radius_hi_m"},
             errors);
  read_key(j, "paths", "n_paths", p.n_paths, errors);
  read_key(j, "paths", "loss_lo_db", p.loss_lo_db, errors);
  read_key(j, "paths", "loss_hi_db", p.loss_hi_db, errors);
  read_key(j, "paths", "radius_lo_m", p.radius_lo_m, errors);
  read_key(j, "paths", "radius_hi_m", p.radius_hi_m, errors);
}

void parse_grids(const json& j, GridsConfig& g,
                 std::vector<std::string>& errors) {
  check_keys(j, "grids",
             {"n_b", "n_k", "k_max", "n_omega", "omega_max", "sector_width",
              "sector_refine", "theorem_products"},
             errors);
  read_key(j, "grids", "n_b", g.n_b, errors);
  read_key(j, "grids", "n_k", g.n_k, errors);
  read_key(j, "grids", "k_max", g.k_max, errors);
  read_key(j, "grids", "n_omega", g.n_omega, errors);
  read_key(j, "grids", "omega_max", g.omega_max, errors);
  read_key(j, "grids", "sector_width", g.sector_width, errors);
  read_key(j, "grids", "sector_refine", g.sector_refine, errors);
  read_key(j, "grids", "theorem_products", g.theorem_products, errors);
}

void parse_estimator(const json& j, EstimatorConfig& e,
                     std::vector<std::string>& errors) {
  check_keys(j, "estimator", {"n_iter", "stop_tol", "n_rf", "methods"},
             errors);
  read_key(j, "estimator", "n_iter", e.n_iter, errors);
  read_key(j, "estimator", "stop_tol", e.stop_tol, errors);
  read_key(j, "estimator", "n_rf", e.n_rf, errors);
  read_key(j, "estimator", "methods", e.methods, errors);
}

void parse_sweep(const json& j, SweepConfig& s,
                 std::vector<std::string>& errors) {
  check_keys(j, "sweep", {"snr_db", "pilot_len", "trials", "seed_base"},
             errors);
  read_key(j, "sweep", "snr_db", s.snr_db, errors);
  read_key(j, "sweep", "pilot_len", s.pilot_len, errors);
  read_key(j, "sweep", "trials", s.trials, errors);
  read_key(j, "sweep", "seed_base", s.seed_base, errors);
}

void parse_output(const json& j, OutputConfig& o,
                  std::vector<std::string>& errors) {
  check_keys(j, "output", {"csv_path", "verbosity"}, errors);
  read_key(j, "output", "csv_path", o.csv_path, errors);
  read_key(j, "output", "verbosity", o.verbosity, errors);
}

}  // namespace

std::vector<std::string> ExperimentConfig::validate() const {
  std::vector<std::string> e;
  const double half_pi = kPi / 2.0;

  if (geometry.n_tx < 2 || geometry.n_tx % 2 != 0) {
    e.push_back("geometry.n_tx: must be an even integer >= 2");
  }
  if (geometry.n_rx < 2 || geometry.n_rx % 2 != 0) {
    e.push_back("geometry.n_rx: must be an even integer >= 2");
  }
  if (!(geometry.carrier_hz > 0.0)) {
    e.push_back("geometry.carrier_hz: must be positive (Hz)");
  }
  if (geometry.spacing_m < 0.0) {
    e.push_back("geometry.spacing_m: must be >= 0 (meters; 0 = half wave)");
  }
  if (!(geometry.r0_m > 0.0)) {
    e.push_back("geometry.r0_m: must be positive (meters)");
  }
  if (!(geometry.angle_lo > -half_pi && geometry.angle_lo <= geometry.angle_hi &&
        geometry.angle_hi < half_pi)) {
    e.push_back(
        "geometry.angle_lo/angle_hi: need -pi/2 < lo <= hi < pi/2 (radians)");
  }
  if (!(geometry.tilt_lo >= -half_pi && geometry.tilt_lo <= geometry.tilt_hi &&
        geometry.tilt_hi <= half_pi)) {
    e.push_back(
        "geometry.tilt_lo/tilt_hi: need -pi/2 <= lo <= hi <= pi/2 (radians)");
  }
  if (geometry.r0_list_m.empty()) {
    e.push_back("geometry.r0_list_m: must be nonempty (meters)");
  }
  for (double r : geometry.r0_list_m) {
    if (!(r > 0.0)) {
      e.push_back("geometry.r0_list_m: entries must be positive (meters)");
      break;
    }
  }

  if (paths.n_paths < 0) {
    e.push_back("paths.n_paths: must be >= 0");
  }
  if (!(paths.loss_lo_db <= paths.loss_hi_db)) {
    e.push_back("paths.loss_lo_db/loss_hi_db: need lo <= hi (dB)");
  }
  const bool radius_auto =
      paths.radius_lo_m == 0.0 && paths.radius_hi_m == 0.0;
  if (!radius_auto && !(paths.radius_lo_m > 0.0 &&
                        paths.radius_lo_m <= paths.radius_hi_m)) {
    e.push_back(
        "paths.radius_lo_m/radius_hi_m: need 0 < lo <= hi, or both 0 for "
        "[r0, 2*r0] (meters)");
  }

  if (grids.n_b < 2) {
    e.push_back("grids.n_b: must be >= 2");
  }
  if (grids.n_k < 1) {
    e.push_back("grids.n_k: must be >= 1");
  }
  if (grids.k_max < 0.0) {
    e.push_back("grids.k_max: must be >= 0 (0 = wavelength/(4*r0))");
  }
  if (grids.n_omega < 1) {
    e.push_back("grids.n_omega: must be >= 1");
  }
  if (grids.omega_max < 0.0) {
    e.push_back("grids.omega_max: must be >= 0 (0 = wavelength/(4*r0))");
  }
  if (grids.sector_width < 1) {
    e.push_back("grids.sector_width: must be >= 1 (grid steps)");
  }
  if (grids.sector_refine < 1) {
    e.push_back("grids.sector_refine: must be >= 1");
  }
  if (grids.theorem_products.empty()) {
    e.push_back("grids.theorem_products: must be nonempty");
  }
  for (double p : grids.theorem_products) {
    if (!(p >= 0.5)) {
      e.push_back(
          "grids.theorem_products: entries must be >= 0.5 (beam budget)");
      break;
    }
  }

  if (estimator.n_iter < 1) {
    e.push_back("estimator.n_iter: must be >= 1");
  }
  if (!(estimator.stop_tol >= 0.0)) {
    e.push_back("estimator.stop_tol: must be >= 0");
  }
  if (estimator.n_rf < 1) {
    e.push_back("estimator.n_rf: must be >= 1");
  }
  if (estimator.methods.empty()) {
    e.push_back("estimator.methods: must be nonempty");
  }
  for (const std::string& m : estimator.methods) {
    if (m != "xl-uomp" && m != "polar-omp" && m != "farfield-omp") {
      e.push_back("estimator.methods: unknown method '" + m + "'");
    }
  }

  if (sweep.snr_db.empty()) {
    e.push_back("sweep.snr_db: must be nonempty (dB)");
  }
  if (sweep.pilot_len.empty()) {
    e.push_back("sweep.pilot_len: must be nonempty");
  }
  for (int t : sweep.pilot_len) {
    if (t < 1) {
      e.push_back("sweep.pilot_len: entries must be >= 1");
      break;
    }
  }
  if (sweep.trials < 1) {
    e.push_back("sweep.trials: must be >= 1");
  }

  if (output.csv_path.empty()) {
    e.push_back("output.csv_path: must be nonempty");
  }
  if (output.verbosity < 0 || output.verbosity > 2) {
    e.push_back("output.verbosity: must be 0, 1, or 2");
  }
  return e;
}

double ExperimentConfig::resolved_k_max() const {
  if (grids.k_max > 0.0) {
    return grids.k_max;
  }
  return wavelength() / (4.0 * geometry.r0_m);
}

double ExperimentConfig::resolved_omega_max() const {
  if (grids.omega_max > 0.0) {
    return grids.omega_max;
  }
  return wavelength() / (4.0 * geometry.r0_m);
}

ExperimentConfig desk_scale_config() { return ExperimentConfig{}; }

ExperimentConfig paper_scale_config() {
  ExperimentConfig c;
  c.geometry.n_tx = 256;
  c.geometry.n_rx = 256;
  c.geometry.r0_m = 35.0;
  c.geometry.tilt_lo = -kPi / 2.0;
  c.geometry.tilt_hi = kPi / 2.0;
  c.paths.loss_lo_db = -25.0;
  c.paths.loss_hi_db = -20.0;
  c.grids.n_b = 512;
  c.sweep.pilot_len = {25};
  return c;
}

ExperimentConfig config_from_json_text(const std::string& text,
                                       const ExperimentConfig& base) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& ex) {
    throw std::runtime_error(std::string("config parse error: ") + ex.what());
  }
  if (!j.is_object()) {
    throw std::runtime_error("config parse error: top level must be an object");
  }
  ExperimentConfig c = base;
  std::vector<std::string> errors;
  check_keys(j, "config",
             {"geometry", "paths", "grids", "estimator", "sweep", "output"},
             errors);
  if (j.contains("geometry")) parse_geometry(j["geometry"], c.geometry, errors);
  if (j.contains("paths")) parse_paths(j["paths"], c.paths, errors);
  if (j.contains("grids")) parse_grids(j["grids"], c.grids, errors);
  if (j.contains("estimator")) parse_estimator(j["estimator"], c.estimator, errors);
  if (j.contains("sweep")) parse_sweep(j["sweep"], c.sweep, errors);
  if (j.contains("output")) parse_output(j["output"], c.output, errors);
  if (!errors.empty()) {
    join_and_throw("config errors:", errors);
  }
  return c;
}

ExperimentConfig load_config(const std::string& path,
                             const ExperimentConfig& base) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open config file: " + path);
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return config_from_json_text(buf.str(), base);
}

std::string config_to_json_text(const ExperimentConfig& c) {
  json j;
  j["geometry"] = {{"n_tx", c.geometry.n_tx},
                   {"n_rx", c.geometry.n_rx},
                   {"carrier_hz", c.geometry.carrier_hz},
                   {"spacing_m", c.geometry.spacing_m},
                   {"r0_m", c.geometry.r0_m},
                   {"angle_lo", c.geometry.angle_lo},
                   {"angle_hi", c.geometry.angle_hi},
                   {"tilt_lo", c.geometry.tilt_lo},
                   {"tilt_hi", c.geometry.tilt_hi},
                   {"r0_list_m", c.geometry.r0_list_m}};
  j["paths"] = {{"n_paths", c.paths.n_paths},
                {"loss_lo_db", c.paths.loss_lo_db},
                {"loss_hi_db", c.paths.loss_hi_db},
                {"radius_lo_m", c.paths.radius_lo_m},
                {"radius_hi_m", c.paths.radius_hi_m}};
  j["grids"] = {{"n_b", c.grids.n_b},
                {"n_k", c.grids.n_k},
                {"k_max", c.grids.k_max},
                {"n_omega", c.grids.n_omega},
                {"omega_max", c.grids.omega_max},
                {"sector_width", c.grids.sector_width},
                {"sector_refine", c.grids.sector_refine},
                {"theorem_products", c.grids.theorem_products}};
  j["estimator"] = {{"n_iter", c.estimator.n_iter},
                    {"stop_tol", c.estimator.stop_tol},
                    {"n_rf", c.estimator.n_rf},
                    {"methods", c.estimator.methods}};
  j["sweep"] = {{"snr_db", c.sweep.snr_db},
                {"pilot_len", c.sweep.pilot_len},
                {"trials", c.sweep.trials},
                {"seed_base", c.sweep.seed_base}};
  j["output"] = {{"csv_path", c.output.csv_path},
                 {"verbosity", c.output.verbosity}};
  return j.dump(2) + "\n";
}

void save_config(const ExperimentConfig& config, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write config file: " + path);
  }
  out << config_to_json_text(config);
}

void require_valid(const ExperimentConfig& config) {
  const std::vector<std::string> errors = config.validate();
  if (!errors.empty()) {
    join_and_throw("config errors:", errors);
  }
}

ArrayGeometry make_geometry(const GeometryConfig& geometry) {
  ArrayGeometry g;
  g.n_tx = geometry.n_tx;
  g.n_rx = geometry.n_rx;
  g.carrier_hz = geometry.carrier_hz;
  g.spacing_m = geometry.spacing_m;
  g.r0_m = geometry.r0_m;
  return g;
}

SceneConfig scene_config_from(const ExperimentConfig& config) {
  SceneConfig s;
  s.n_paths = config.paths.n_paths;
  s.angle_lo = config.geometry.angle_lo;
  s.angle_hi = config.geometry.angle_hi;
  s.tilt_lo = config.geometry.tilt_lo;
  s.tilt_hi = config.geometry.tilt_hi;
  s.loss_lo_db = config.paths.loss_lo_db;
  s.loss_hi_db = config.paths.loss_hi_db;
  s.radius_lo_m = config.paths.radius_lo_m;
  s.radius_hi_m = config.paths.radius_hi_m;
  return s;
}

std::string scene_to_json_text(const Scene& scene) {
  json j;
  j["geometry"] = {{"n_tx", scene.geometry.n_tx},
                   {"n_rx", scene.geometry.n_rx},
                   {"carrier_hz", scene.geometry.carrier_hz},
                   {"spacing_m", scene.geometry.spacing_m},
                   {"r0_m", scene.geometry.r0_m},
                   {"theta_tx", scene.geometry.theta_tx},
                   {"theta_rx", scene.geometry.theta_rx},
                   {"phi_rx", scene.geometry.phi_rx}};
  j["los_gain"] = {scene.los_gain.real(), scene.los_gain.imag()};
  j["scatterers"] = json::array();
  for (const Scatterer& s : scene.scatterers) {
    j["scatterers"].push_back({{"r_tx_m", s.r_tx_m},
                               {"r_rx_m", s.r_rx_m},
                               {"theta_tx", s.theta_tx},
                               {"theta_rx", s.theta_rx},
                               {"gain", {s.gain.real(), s.gain.imag()}}});
  }
  return j.dump(2) + "\n";
}

Scene scene_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& ex) {
    throw std::runtime_error(std::string("scene parse error: ") + ex.what());
  }
  Scene scene;
  try {
    const json& g = j.at("geometry");
    scene.geometry.n_tx = g.at("n_tx").get<int>();
    scene.geometry.n_rx = g.at("n_rx").get<int>();
    scene.geometry.carrier_hz = g.at("carrier_hz").get<double>();
    scene.geometry.spacing_m = g.at("spacing_m").get<double>();
    scene.geometry.r0_m = g.at("r0_m").get<double>();
    scene.geometry.theta_tx = g.at("theta_tx").get<double>();
    scene.geometry.theta_rx = g.at("theta_rx").get<double>();
    scene.geometry.phi_rx = g.at("phi_rx").get<double>();
    const auto lg = j.at("los_gain");
    scene.los_gain = cplx(lg.at(0).get<double>(), lg.at(1).get<double>());
    for (const json& sj : j.at("scatterers")) {
      Scatterer s;
      s.r_tx_m = sj.at("r_tx_m").get<double>();
      s.r_rx_m = sj.at("r_rx_m").get<double>();
      s.theta_tx = sj.at("theta_tx").get<double>();
      s.theta_rx = sj.at("theta_rx").get<double>();
      const auto sg = sj.at("gain");
      s.gain = cplx(sg.at(0).get<double>(), sg.at(1).get<double>());
      scene.scatterers.push_back(s);
    }
  } catch (const json::exception& ex) {
    throw std::runtime_error(std::string("scene format error: ") + ex.what());
  }
  return scene;
}

void save_scene(const Scene& scene, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write scene file: " + path);
  }
  out << scene_to_json_text(scene);
}

Scene load_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open scene file: " + path);
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return scene_from_json_text(buf.str());
}

}  // namespace xlmimo
