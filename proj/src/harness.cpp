#include "hess/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "hess/error.hpp"
#include "hess/export.hpp"
#include "json_fields.hpp"

namespace hess {

namespace {

using detail::json;

const detail::FieldReader reader("scenario");

electrochem::BatterySourceParams parse_battery(const json& obj) {
  if (!obj.is_object()) reader.fail("battery_params", "expected an object");
  electrochem::BatterySourceParams p;
  const std::string path = "battery_params";
  p.nominal_capacity = reader.number_or(obj, "nominal_capacity_ah", path, p.nominal_capacity);
  p.activation_energy = reader.number_or(obj, "activation_energy_j_mol", path, p.activation_energy);
  p.reference_resistance =
      reader.number_or(obj, "reference_resistance_ohm", path, p.reference_resistance);
  p.reference_temperature =
      reader.number_or(obj, "reference_temperature_k", path, p.reference_temperature);
  p.entropic_coefficient =
      reader.number_or(obj, "entropic_coefficient_v_k", path, p.entropic_coefficient);
  return p;
}

electrochem::PemSourceParams parse_pem(const json& obj) {
  if (!obj.is_object()) reader.fail("pem_params", "expected an object");
  electrochem::PemSourceParams p;
  const std::string path = "pem_params";
  p.equilibrium_potential = reader.number_or(obj, "equilibrium_potential_v", path, p.equilibrium_potential);
  p.thermoneutral_potential =
      reader.number_or(obj, "thermoneutral_potential_v", path, p.thermoneutral_potential);
  p.exchange_current_density =
      reader.number_or(obj, "exchange_current_density_a_m2", path, p.exchange_current_density);
  p.anodic_coefficient = reader.number_or(obj, "anodic_coefficient", path, p.anodic_coefficient);
  p.cathodic_coefficient = reader.number_or(obj, "cathodic_coefficient", path, p.cathodic_coefficient);
  p.area_specific_resistance =
      reader.number_or(obj, "area_specific_resistance_ohm_m2", path, p.area_specific_resistance);
  p.active_area = reader.number_or(obj, "active_area_m2", path, p.active_area);
  p.cathode_heat_fraction =
      reader.number_or(obj, "cathode_heat_fraction", path, p.cathode_heat_fraction);
  return p;
}

bool has_pem(const SceneSpec& spec) {
  return std::any_of(spec.shapes.begin(), spec.shapes.end(),
                     [](const Shape& s) { return s.source == SourceKind::pem; });
}

std::string number_tag(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  std::string s = os.str();
  std::replace(s.begin(), s.end(), '.', 'p');
  return s;
}

SourceField build_sources(const SceneSpec& spec, const VoxelGrid& grid, const ScenarioConfig& cfg) {
  SourceField field;
  const double current =
      electrochem::c_rate_to_current(cfg.operating_point.c_rate, cfg.battery.nominal_capacity);
  for (std::size_t s = 0; s < spec.shapes.size(); ++s) {
    const Shape& shape = spec.shapes[s];
    const int entity = static_cast<int>(s);
    if (shape.source == SourceKind::battery) {
      const auto params = cfg.battery;
      field.entries.push_back(uniform_source(grid, entity, [current, params](double t) {
        return electrochem::battery_heat_rate(current, t, params);
      }));
    } else if (shape.source == SourceKind::pem) {
      const auto params = cfg.pem;
      const double v = *cfg.operating_point.pem_voltage;
      PowerModel power = [v, params](double t) {
        return electrochem::pem_heat_rate(v, electrochem::pem_operating_point(v, t, params), params);
      };
      if (shape.cathode_face) {
        field.entries.push_back(split_source(grid, entity, *shape.cathode_face,
                                             params.cathode_heat_fraction, std::move(power)));
      } else {
        field.entries.push_back(uniform_source(grid, entity, std::move(power)));
      }
    }
  }
  return field;
}

}  // namespace

const EntitySeries* ScenarioReport::find(const std::string& entity) const {
  for (const auto& e : entities) {
    if (e.entity == entity) return &e;
  }
  return nullptr;
}

const EntitySeries& ScenarioReport::at(const std::string& entity) const {
  if (const auto* e = find(entity)) return *e;
  throw ValidationError("report '" + label + "' has no entity '" + entity + "'");
}

void ScenarioReport::validate() const {
  for (const auto& e : entities) {
    for (std::size_t i = 0; i < e.samples.size(); ++i) {
      const auto& s = e.samples[i];
      if (i > 0 && !(s.time > e.samples[i - 1].time)) {
        throw ValidationError("report: time series of '" + e.entity + "' is not increasing");
      }
      if (!(s.min_c <= s.mean_c + 1e-9 && s.mean_c <= s.max_c + 1e-9)) {
        throw ValidationError("report: min <= mean <= max violated for '" + e.entity + "'");
      }
    }
  }
}

ScenarioConfig parse_scenario(std::string_view text, const std::string& base_dir) {
  const json root = detail::parse_json_text(text, "scenario");
  if (!root.is_object()) throw ParseError("scenario: top level must be an object", 1, 1);

  ScenarioConfig cfg;
  cfg.label = reader.string_or(root, "label", "", cfg.label);
  const std::string scene = reader.string(root, "scene", "");
  const std::filesystem::path scene_path(scene);
  cfg.scene_path = scene_path.is_absolute() ? scene
                                            : (std::filesystem::path(base_dir) / scene_path).string();
  cfg.sim.duration = reader.number_or(root, "duration_s", "", cfg.sim.duration);
  cfg.sim.record_interval = reader.number_or(root, "record_interval_s", "", cfg.sim.record_interval);
  cfg.sim.convective_h = reader.number_or(root, "h_w_m2k", "", cfg.sim.convective_h);
  cfg.sim.safety_factor = reader.number_or(root, "safety_factor", "", cfg.sim.safety_factor);
  if (root.contains("dt_s")) cfg.sim.dt = reader.number(root, "dt_s", "");
  if (root.contains("workers")) cfg.sim.workers = static_cast<int>(reader.number(root, "workers", ""));
  cfg.operating_point.c_rate = reader.number_or(root, "c_rate", "", 0.0);
  if (root.contains("pem_voltage_v") && !root.at("pem_voltage_v").is_null()) {
    cfg.operating_point.pem_voltage = reader.number(root, "pem_voltage_v", "");
  }
  if (root.contains("spacing_m")) cfg.spacing = reader.number(root, "spacing_m", "");
  if (root.contains("ambient_c")) {
    cfg.ambient = celsius_to_kelvin(reader.number(root, "ambient_c", ""));
  }
  if (root.contains("battery_params")) cfg.battery = parse_battery(root.at("battery_params"));
  if (root.contains("pem_params")) cfg.pem = parse_pem(root.at("pem_params"));

  if (!(cfg.operating_point.c_rate >= 0.0)) reader.fail("c_rate", "must be >= 0");
  cfg.sim.validate();
  cfg.battery.validate();
  cfg.pem.validate();
  return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open scenario file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string base = std::filesystem::path(path).parent_path().string();
  try {
    return parse_scenario(buf.str(), base.empty() ? "." : base);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what(), e.line(), e.column());
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

std::string scenario_to_json(const ScenarioConfig& cfg) {
  nlohmann::ordered_json root;
  root["label"] = cfg.label;
  root["scene"] = cfg.scene_path;
  root["duration_s"] = cfg.sim.duration;
  root["record_interval_s"] = cfg.sim.record_interval;
  root["c_rate"] = cfg.operating_point.c_rate;
  if (cfg.operating_point.pem_voltage) root["pem_voltage_v"] = *cfg.operating_point.pem_voltage;
  if (cfg.spacing) root["spacing_m"] = *cfg.spacing;
  root["h_w_m2k"] = cfg.sim.convective_h;
  if (cfg.ambient) root["ambient_c"] = kelvin_to_celsius(*cfg.ambient);
  const auto& b = cfg.battery;
  root["battery_params"] = {{"nominal_capacity_ah", b.nominal_capacity},
                            {"activation_energy_j_mol", b.activation_energy},
                            {"reference_resistance_ohm", b.reference_resistance},
                            {"reference_temperature_k", b.reference_temperature},
                            {"entropic_coefficient_v_k", b.entropic_coefficient}};
  const auto& p = cfg.pem;
  root["pem_params"] = {{"equilibrium_potential_v", p.equilibrium_potential},
                        {"thermoneutral_potential_v", p.thermoneutral_potential},
                        {"exchange_current_density_a_m2", p.exchange_current_density},
                        {"anodic_coefficient", p.anodic_coefficient},
                        {"cathodic_coefficient", p.cathodic_coefficient},
                        {"area_specific_resistance_ohm_m2", p.area_specific_resistance},
                        {"active_area_m2", p.active_area},
                        {"cathode_heat_fraction", p.cathode_heat_fraction}};
  return root.dump(2) + "\n";
}

SceneSpec resolve_scene(const ScenarioConfig& cfg) {
  SceneSpec spec = cfg.scene ? *cfg.scene : load_scene(cfg.scene_path);
  if (cfg.spacing) spec.spacing = *cfg.spacing;
  if (cfg.ambient) spec.ambient_temperature = *cfg.ambient;
  spec.validate();
  return spec;
}

ScenarioReport run_scenario(const ScenarioConfig& cfg, const TransientHooks& hooks) {
  cfg.battery.validate();
  cfg.pem.validate();
  const SceneSpec spec = resolve_scene(cfg);
  const bool pem = has_pem(spec);
  if (pem != cfg.operating_point.pem_voltage.has_value()) {
    throw ValidationError("run_scenario: '" + cfg.label + "': pem_voltage_v must be given " +
                          (pem ? "for a scene with a PEM" : "only for scenes with a PEM"));
  }
  if (!(cfg.operating_point.c_rate >= 0.0)) {
    throw ValidationError("run_scenario: c_rate must be >= 0");
  }
  if (pem) {
    const double v = *cfg.operating_point.pem_voltage;
    if (!(v > 0.0) || v > cfg.pem.equilibrium_potential) {
      throw ValidationError("run_scenario: pem_voltage_v must lie in (0, E_eq]");
    }
  }

  SimConfig sim = cfg.sim;
  sim.ambient_temperature = spec.ambient_temperature;
  VoxelGrid grid = voxelize(spec, spec.spacing);
  SourceField sources = build_sources(spec, grid, cfg);

  TransientHooks run_hooks = hooks;
  if (cfg.output_dir && cfg.dump_fields) {
    const std::string dir = *cfg.output_dir;
    const std::string label = cfg.label;
    run_hooks.on_record = [dir, label, user = hooks.on_record](double t, const VoxelGrid& g) {
      std::ostringstream name;
      name << label << "_t" << std::setw(6) << std::setfill('0') << std::llround(t) << ".vtk";
      write_field_dump(g, (std::filesystem::path(dir) / name.str()).string(), t);
      if (user) user(t, g);
    };
  }

  TransientResult result = run_transient(grid, spec, std::move(sources), sim, run_hooks);

  ScenarioReport report;
  report.label = cfg.label;
  report.entities = std::move(result.series);
  report.hotspot = result.hotspot;
  report.audit = result.audit;
  report.meta.c_rate = cfg.operating_point.c_rate;
  report.meta.pem_voltage = cfg.operating_point.pem_voltage;
  report.meta.duration = sim.duration;
  report.meta.spacing = spec.spacing;
  report.meta.battery = cfg.battery;
  report.validate();

  if (cfg.output_dir) {
    write_cell_csv(report, (std::filesystem::path(*cfg.output_dir) / (cfg.label + ".csv")).string());
  }
  return report;
}

std::string operating_label(const std::string& base, double c_rate, std::optional<double> voltage) {
  std::string label = base;
  if (c_rate != 0.0 || !voltage) label += "_" + number_tag(c_rate) + "c";
  if (voltage) label += "_" + number_tag(*voltage) + "v";
  return label;
}

SweepResult sweep(const ScenarioConfig& cfg, const std::vector<double>& c_rates,
                  const std::vector<double>& voltages, int workers) {
  if (c_rates.empty()) throw ValidationError("sweep: c_rates must not be empty");
  const SceneSpec spec = resolve_scene(cfg);
  const bool pem = has_pem(spec);
  if (pem && voltages.empty()) throw ValidationError("sweep: voltages must not be empty for a PEM scene");
  if (!pem && !voltages.empty()) throw ValidationError("sweep: voltages given for a scene without a PEM");
  if (workers < 1) throw ValidationError("sweep: workers must be >= 1");

  std::vector<ScenarioConfig> runs;
  const std::vector<std::optional<double>> vs =
      pem ? std::vector<std::optional<double>>(voltages.begin(), voltages.end())
          : std::vector<std::optional<double>>{std::nullopt};
  for (const auto& v : vs) {
    for (double c : c_rates) {
      ScenarioConfig run = cfg;
      run.scene = spec;
      run.spacing.reset();
      run.ambient.reset();
      run.operating_point = {c, v};
      run.label = operating_label(cfg.label, c, v);
      runs.push_back(std::move(run));
    }
  }

  std::vector<std::optional<ScenarioReport>> slots(runs.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    while (!failed.load()) {
      const std::size_t i = next.fetch_add(1);
      if (i >= runs.size()) return;
      try {
        slots[i] = run_scenario(runs[i]);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        failed.store(true);
      }
    }
  };
  const int threads = std::min<int>(workers, static_cast<int>(runs.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  SweepResult result;
  for (auto& slot : slots) {
    if (slot) result.reports.push_back(std::move(*slot));
  }
  if (cfg.output_dir) {
    write_sweep_csv(result.reports, (std::filesystem::path(*cfg.output_dir) / "sweep.csv").string());
  }
  if (error) std::rethrow_exception(error);
  return result;
}

std::string center_cell(const SceneSpec& spec) {
  std::vector<const Shape*> cells;
  Vec3 centroid;
  for (const auto& s : spec.shapes) {
    if (s.source != SourceKind::battery) continue;
    cells.push_back(&s);
    const Vec3 lo = s.bbox_min(), hi = s.bbox_max();
    for (int ax = 0; ax < 3; ++ax) centroid[ax] += 0.5 * (lo[ax] + hi[ax]);
  }
  if (cells.empty()) throw ValidationError("center_cell: scene has no battery cells");
  for (int ax = 0; ax < 3; ++ax) centroid[ax] /= static_cast<double>(cells.size());
  const Shape* best = nullptr;
  double best_d2 = 0.0;
  for (const Shape* s : cells) {
    const Vec3 lo = s->bbox_min(), hi = s->bbox_max();
    double d2 = 0.0;
    for (int ax = 0; ax < 3; ++ax) {
      const double d = 0.5 * (lo[ax] + hi[ax]) - centroid[ax];
      d2 += d * d;
    }
    if (!best || d2 < best_d2 - 1e-15) {
      best = s;
      best_d2 = d2;
    }
  }
  return best->id;
}

CalibrationResult calibrate_resistance(double target_delta_t, double c_rate, double at_time,
                                       const ScenarioConfig& cfg, double tolerance) {
  if (!(target_delta_t > 0.0)) throw ValidationError("calibrate_resistance: target_delta_t must be > 0");
  if (!(at_time > 0.0)) throw ValidationError("calibrate_resistance: at_time must be > 0");
  if (!(tolerance > 0.0)) throw ValidationError("calibrate_resistance: tolerance must be > 0");

  ScenarioConfig base = cfg;
  base.scene = resolve_scene(cfg);
  base.spacing.reset();
  base.ambient.reset();
  base.output_dir.reset();
  base.dump_fields = false;
  base.operating_point.c_rate = c_rate;
  base.sim.duration = at_time;
  base.sim.record_interval = at_time;

  CalibrationResult result;
  result.probe_entity = center_cell(*base.scene);
  const auto probe = static_cast<std::size_t>(std::distance(
      base.scene->shapes.begin(),
      std::find_if(base.scene->shapes.begin(), base.scene->shapes.end(),
                   [&](const Shape& s) { return s.id == result.probe_entity; })));
  const double ambient = base.scene->ambient_temperature;
  const double ceiling = target_delta_t + tolerance;

  // Full-length responses, for the monotonicity check.
  std::map<double, double> responses;
  auto rise_at = [&](double resistance) {
    ScenarioConfig run = base;
    run.battery.reference_resistance = resistance;
    run.label = cfg.label + "_calibration";
    // The centre cell only warms under constant current, so a run that has
    // already overshot cannot come back within tolerance.
    TransientHooks hooks;
    hooks.stop = [&](double, std::span<const double> means) {
      return means[probe] - ambient > ceiling;
    };
    const ScenarioReport report = run_scenario(run, hooks);
    ++result.evaluations;
    const auto& final = report.at(result.probe_entity).final();
    const double rise = final.mean_c - kelvin_to_celsius(ambient);
    if (final.time >= at_time) {
      responses[resistance] = rise;
      double previous = -std::numeric_limits<double>::infinity();
      for (const auto& [r, value] : responses) {
        if (value < previous) {
          throw SolverError("calibrate_resistance: non-monotone response near R_ref = " +
                            std::to_string(r) + " ohm");
        }
        previous = value;
      }
    }
    return rise;
  };

  double lo = 1e-4, hi = 1.0;
  const double rise_hi = rise_at(hi);
  if (rise_hi < target_delta_t - tolerance) {
    throw ValidationError("calibrate_resistance: target rise unreachable within [1e-4, 1] ohm");
  }
  if (std::abs(rise_hi - target_delta_t) <= tolerance) {
    result.resistance = hi;
    result.achieved_rise = rise_hi;
    return result;
  }
  for (int iter = 0; iter < 64; ++iter) {
    const double mid = std::sqrt(lo * hi);
    const double rise = rise_at(mid);
    if (std::abs(rise - target_delta_t) <= tolerance) {
      result.resistance = mid;
      result.achieved_rise = rise;
      return result;
    }
    (rise > target_delta_t ? hi : lo) = mid;
    if (hi / lo - 1.0 < 1e-12) break;
  }
  throw ValidationError("calibrate_resistance: target rise unreachable within [1e-4, 1] ohm");
}

ScenarioConfig standalone_baseline(const ScenarioConfig& hybrid) {
  ScenarioConfig solo = hybrid;
  solo.scene = without_pem(resolve_scene(hybrid));
  solo.spacing.reset();
  solo.ambient.reset();
  solo.operating_point.pem_voltage.reset();
  solo.label = hybrid.label + "_standalone";
  return solo;
}

DeltaReport delta_report(const ScenarioReport& hybrid, const ScenarioReport& standalone) {
  const auto& a = hybrid.meta;
  const auto& b = standalone.meta;
  if (a.c_rate != b.c_rate || a.duration != b.duration || a.spacing != b.spacing ||
      !(a.battery == b.battery)) {
    throw ValidationError("delta_report: runs differ in c_rate, duration, spacing or battery parameters");
  }
  DeltaReport out;
  std::size_t index = 0;
  for (const auto& series : hybrid.entities) {
    if (series.source != SourceKind::battery) continue;
    const EntitySeries* other = standalone.find(series.entity);
    if (!other || other->source != SourceKind::battery) {
      throw ValidationError("delta_report: cell '" + series.entity + "' missing from the standalone run");
    }
    if (series.samples.empty() || other->samples.empty() ||
        series.final().time != other->final().time) {
      throw ValidationError("delta_report: final sample times differ for '" + series.entity + "'");
    }
    out.cells.push_back({series.entity, index++, a.c_rate, series.final().time,
                         series.final().mean_c - other->final().mean_c});
  }
  return out;
}

}  // namespace hess
