#pragma once

// Scenario orchestration: single runs, (voltage x C-rate) sweeps, resistance
// calibration and hybrid-vs-standalone delta reports.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hess/electrochem.hpp"
#include "hess/report.hpp"
#include "hess/scene.hpp"
#include "hess/solver.hpp"

namespace hess {

struct OperatingPoint {
  double c_rate = 0.0;                // 1/h
  std::optional<double> pem_voltage;  // V
};

struct ScenarioConfig {
  std::string label = "scenario";
  std::string scene_path;
  std::optional<SceneSpec> scene;  // takes precedence over scene_path
  SimConfig sim;
  OperatingPoint operating_point;
  std::optional<double> spacing;      // m, overrides the scene's spacing
  std::optional<double> ambient;      // K, overrides the scene's ambient temperature
  electrochem::BatterySourceParams battery;
  electrochem::PemSourceParams pem;

  std::optional<std::string> output_dir;  // CSV (and dumps) are written here when set
  bool dump_fields = false;
};

ScenarioConfig parse_scenario(std::string_view text, const std::string& base_dir = ".");
ScenarioConfig load_scenario(const std::string& path);
// Scenario file text; `scene_path` is written as given.
std::string scenario_to_json(const ScenarioConfig& cfg);

// Scene of the scenario with spacing and ambient overrides applied.
SceneSpec resolve_scene(const ScenarioConfig& cfg);

ScenarioReport run_scenario(const ScenarioConfig& cfg, const TransientHooks& hooks = {});

struct SweepResult {
  std::vector<ScenarioReport> reports;  // ordered by (voltage, c_rate) as given
};

// Runs the cartesian product of voltages x c_rates. `voltages` may be empty
// only for scenes without a PEM. Up to `workers` scenarios run concurrently.
// When `cfg.output_dir` is set, each run's CSV and the combined `sweep.csv`
// are written; a failure keeps whatever completed and rethrows.
SweepResult sweep(const ScenarioConfig& cfg, const std::vector<double>& c_rates,
                  const std::vector<double>& voltages, int workers = 1);

struct CalibrationResult {
  double resistance = 0.0;     // ohm
  double achieved_rise = 0.0;  // K
  std::string probe_entity;
  int evaluations = 0;
};

// Bisects R_ref over [1e-4, 1] ohm (geometric midpoints) until the centre
// cell's mean rise above ambient after `at_time` seconds at `c_rate` is
// within `tolerance` of `target_delta_t`.
CalibrationResult calibrate_resistance(double target_delta_t, double c_rate, double at_time,
                                       const ScenarioConfig& cfg, double tolerance = 0.05);

// Battery shape closest to the centroid of all battery shapes.
std::string center_cell(const SceneSpec& spec);

struct CellDelta {
  std::string cell;
  std::size_t index = 0;  // position among the battery cells
  double c_rate = 0.0;
  double time = 0.0;   // s
  double delta = 0.0;  // K, hybrid minus standalone
};

struct DeltaReport {
  std::vector<CellDelta> cells;
};

DeltaReport delta_report(const ScenarioReport& hybrid, const ScenarioReport& standalone);

// Standalone baseline of a hybrid scenario: PEM replaced by air on the same grid.
ScenarioConfig standalone_baseline(const ScenarioConfig& hybrid);

// "<base>_<c>c_<v>v" with dots as "p"; the C-rate part is left out for a
// PEM-only operating point (c_rate 0 with a voltage).
std::string operating_label(const std::string& base, double c_rate, std::optional<double> voltage);

}  // namespace hess
