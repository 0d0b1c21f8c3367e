// Command-line front end: run, sweep, calibrate, presets.

#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "hess/error.hpp"
#include "hess/export.hpp"
#include "hess/harness.hpp"
#include "hess/presets.hpp"

namespace {

using namespace hess;

// A path that exists wins; otherwise a preset name is accepted.
ScenarioConfig resolve(const std::string& arg) {
  if (!std::filesystem::exists(arg)) {
    if (auto preset = presets::scenario(arg)) return *preset;
  }
  return load_scenario(arg);
}

std::string summary(const ScenarioReport& r) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(6);
  os << r.label;
  if (!r.entities.empty()) os << " t=" << r.entities.front().final().time << "s";
  for (const auto& e : r.entities) os << ' ' << e.entity << '=' << e.final().mean_c;
  os << " hotspot=" << r.hotspot.entity << '@' << r.hotspot.temperature_c;
  os << std::scientific << std::setprecision(2) << " audit=" << r.audit.relative_residual();
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Voxel thermal simulator for battery packs and PEM fuel cells"};
  app.require_subcommand(1);

  std::string scenario;
  std::string out = ".";
  bool dump = false;
  int workers = 1;
  auto* run = app.add_subcommand("run", "Run one scenario");
  run->add_option("--scenario", scenario, "Scenario file or preset name")->required();
  run->add_option("--out", out, "Output directory");
  run->add_flag("--dump-fields", dump, "Write a field dump at every recorded time");
  run->add_option("--threads", workers, "Stencil threads")->check(CLI::PositiveNumber);

  std::vector<double> c_rates, voltages;
  auto* sw = app.add_subcommand("sweep", "Run the voltage x C-rate product");
  sw->add_option("--scenario", scenario, "Scenario file or preset name")->required();
  sw->add_option("--c-rates", c_rates, "Comma-separated C-rates")->delimiter(',')->required();
  sw->add_option("--voltages", voltages, "Comma-separated PEM voltages")->delimiter(',');
  sw->add_option("--out", out, "Output directory");
  sw->add_option("--workers", workers, "Concurrent scenarios")->check(CLI::PositiveNumber);

  double target = 0.0, cal_c_rate = 4.0, cal_time = 360.0, tolerance = 0.05;
  auto* cal = app.add_subcommand("calibrate", "Fit the battery reference resistance");
  cal->add_option("--scenario", scenario, "Scenario file or preset name")->required();
  cal->add_option("--target-dt", target, "Centre-cell rise to match, K")->required();
  cal->add_option("--c-rate", cal_c_rate, "C-rate of the calibration run");
  cal->add_option("--time", cal_time, "Time of the rise, s");
  cal->add_option("--tolerance", tolerance, "Accepted error, K");

  std::string dir = "presets";
  auto* pre = app.add_subcommand("presets", "Write the shipped scene and scenario files");
  pre->add_option("--dir", dir, "Target directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    if (*run) {
      ScenarioConfig cfg = resolve(scenario);
      cfg.output_dir = out;
      cfg.dump_fields = dump;
      cfg.sim.workers = workers;
      const ScenarioReport report = run_scenario(cfg);
      std::cout << summary(report) << '\n';
    } else if (*sw) {
      ScenarioConfig cfg = resolve(scenario);
      cfg.output_dir = out;
      const SweepResult result = sweep(cfg, c_rates, voltages, workers);
      for (const auto& r : result.reports) std::cout << summary(r) << '\n';
    } else if (*cal) {
      const ScenarioConfig cfg = resolve(scenario);
      const CalibrationResult r = calibrate_resistance(target, cal_c_rate, cal_time, cfg, tolerance);
      std::cout << std::setprecision(9) << "reference_resistance_ohm=" << r.resistance
                << " probe=" << r.probe_entity << std::fixed << std::setprecision(6)
                << " rise_k=" << r.achieved_rise << " evaluations=" << r.evaluations << '\n';
    } else if (*pre) {
      for (const auto& path : presets::write_all(dir)) std::cout << path << '\n';
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
