#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "grnsp/equilibria.hpp"
#include "grnsp/params.hpp"
#include "grnsp/sim.hpp"

namespace grnsp::cli {

struct PathSpec {
  std::string kind = "circle";  // circle | polyline
  Eigen::Vector2d center{1, 2};
  double radius = 0.5;
  int samples = 720;
  std::vector<Eigen::Vector2d> points;  // polyline vertices

  ParamPath build() const;
};

struct AxisSpec {
  double min = 0, max = 0;
  int count = 0;
  bool log = true;

  std::vector<double> values() const;
};

struct GridSpec {
  AxisSpec sigma{1e-4, 1e-1, 61, true};
  AxisSpec eps{1e-9, 1e-1, 81, true};
};

struct PwlSpec {
  Eigen::Vector2d initial{1.0, 1.5};
  double t_max = 20;
  int max_events = 10000;
  double sample_dt = 0.01;
  std::vector<double> section_points{1.1, 1.5, 2, 5};
};

struct ExperimentConfig {
  std::string experiment = "unnamed";
  ModelParams params;
  SystemKind system = SystemKind::Full;
  std::optional<std::vector<double>> initial;
  double t_end = 1000;
  double sample_dt = 0;
  double tol = 1e-9;
  bool deviation = false;
  PathSpec path;
  GridSpec grid;
  double mu0 = 1.0;
  HopfCurveOptions hopf_curve;
  PwlSpec pwl;
  int chart_samples = 100;
  std::uint64_t seed = 1;
  int threads = 1;
  std::string out_dir = "out";
  std::string format = "csv";

  // Initial state for the configured system; defaults to (0,0,0.5,0.5) in the
  // full system and its projection otherwise.
  Eigen::VectorXd initial_state() const;
};

// Values given on the command line; they replace the file's values.
struct Overrides {
  std::optional<std::string> out_dir, format;
  std::optional<double> tol;
  std::optional<int> threads;
};

// Throws ValidationError naming the offending field path (e.g. "params.sigma").
// Overrides are applied before the final checks, so a flag can repair a bad
// file value.
ExperimentConfig parse_config(const nlohmann::json& j, const Overrides& o = {});
ExperimentConfig load_config(const std::string& path, const Overrides& o = {});
void apply_overrides(ExperimentConfig& cfg, const Overrides& o);

// Effective configuration in canonical form. Output location and thread
// count are left out: they do not change any emitted value.
nlohmann::json canonical_json(const ExperimentConfig& cfg);
std::uint64_t fnv1a64(const std::string& bytes);
std::string config_hash(const ExperimentConfig& cfg);

}  // namespace grnsp::cli
