#include "hess/presets.hpp"

#include <filesystem>

#include "hess/error.hpp"
#include "hess/export.hpp"

namespace hess::presets {

namespace {

constexpr double kCRates[] = {4.0, 6.0, 8.0};
constexpr double kVoltages[] = {1.0, 0.8, 0.4};

SceneSpec base_scene(const Geometry& g) {
  SceneSpec spec;
  spec.materials = {{"air", materials::air()},
                    {"battery_cell", materials::battery_cell()},
                    {"pem_composite", materials::pem_composite()}};
  spec.ambient_temperature = celsius_to_kelvin(g.ambient_c);
  spec.domain_margin = g.margin;
  spec.spacing = g.spacing;
  return spec;
}

Shape cell(const std::string& id, double x, double y, const Geometry& g, bool exposed) {
  Shape s;
  s.id = id;
  s.geometry = Cylinder{Vec3{x, y, 0.0}, g.cell_radius, g.cell_height, Axis::z};
  s.material = "battery_cell";
  s.boundary_tag = exposed ? BoundaryTag::convective : BoundaryTag::none;
  s.source = SourceKind::battery;
  return s;
}

// Plate lying in the x-z plane with its thickness along y; the cathode cover
// faces away from the pack.
Shape pem_plate(double y_min, const Geometry& g) {
  Shape s;
  s.id = "pem";
  s.geometry = Box{Vec3{-0.5 * g.pem_length, y_min, -0.5 * g.pem_width},
                   Vec3{g.pem_length, g.pem_thickness, g.pem_width}};
  s.material = "pem_composite";
  s.boundary_tag = BoundaryTag::convective;
  s.source = SourceKind::pem;
  s.cathode_face = Face::y_plus;
  return s;
}

double pitch(const Geometry& g) { return 2.0 * g.cell_radius + g.cell_gap; }

std::string scene_file(const std::string& name) { return name + ".scene"; }

ScenarioConfig make_scenario(const std::string& scene_name, const SceneSpec& scene, double c_rate,
                             std::optional<double> voltage) {
  ScenarioConfig cfg;
  cfg.label = operating_label(scene_name, c_rate, voltage);
  cfg.scene_path = scene_file(scene_name);
  cfg.scene = scene;
  cfg.operating_point = {c_rate, voltage};
  cfg.pem = pem_params();
  return cfg;
}

std::vector<ScenarioConfig> all_scenarios() {
  std::vector<ScenarioConfig> out;
  const SceneSpec pack = pack6_scene(), pem = pem_scene(), hess = hess_scene();
  for (double c : kCRates) out.push_back(make_scenario("pack6", pack, c, std::nullopt));
  for (double v : kVoltages) out.push_back(make_scenario("pem", pem, 0.0, v));
  for (double v : kVoltages) {
    for (double c : kCRates) out.push_back(make_scenario("hess", hess, c, v));
  }
  return out;
}

}  // namespace

SceneSpec pack6_scene(const Geometry& g) {
  SceneSpec spec = base_scene(g);
  const double p = pitch(g);
  const double y = 0.5 * p;
  for (int row = 0; row < 2; ++row) {
    for (int col = 0; col < 3; ++col) {
      const int n = row * 3 + col + 1;
      spec.shapes.push_back(
          cell("cell" + std::to_string(n), (col - 1) * p, row == 0 ? -y : y, g, col != 1));
    }
  }
  spec.validate();
  return spec;
}

SceneSpec pem_scene(const Geometry& g) {
  SceneSpec spec = base_scene(g);
  spec.shapes.push_back(pem_plate(-0.5 * g.pem_thickness, g));
  spec.validate();
  return spec;
}

SceneSpec hess_scene(const Geometry& g) {
  SceneSpec spec = base_scene(g);
  const double p = pitch(g);
  for (int col = 0; col < 3; ++col) {
    spec.shapes.push_back(cell("cell" + std::to_string(col + 1), (col - 1) * p, 0.0, g, col != 1));
  }
  spec.shapes.push_back(pem_plate(g.cell_radius + g.hybrid_gap, g));
  spec.gap = g.hybrid_gap;
  spec.validate();
  return spec;
}

electrochem::PemSourceParams pem_params() {
  electrochem::PemSourceParams p;
  return p;
}

std::vector<File> files() {
  std::vector<File> out;
  out.push_back({scene_file("pack6"), scene_to_json(pack6_scene())});
  out.push_back({scene_file("pem"), scene_to_json(pem_scene())});
  out.push_back({scene_file("hess"), scene_to_json(hess_scene())});
  for (const auto& cfg : all_scenarios()) {
    out.push_back({cfg.label + ".json", scenario_to_json(cfg)});
  }
  return out;
}

std::vector<std::string> scenario_names() {
  std::vector<std::string> out;
  for (const auto& cfg : all_scenarios()) out.push_back(cfg.label);
  return out;
}

std::vector<std::string> write_all(const std::string& dir) {
  std::vector<std::string> written;
  for (const auto& f : files()) {
    const std::string path = (std::filesystem::path(dir) / f.name).string();
    write_text_file(path, f.contents);
    written.push_back(path);
  }
  return written;
}

std::optional<ScenarioConfig> scenario(std::string_view name) {
  for (auto& cfg : all_scenarios()) {
    if (cfg.label == name) return cfg;
  }
  return std::nullopt;
}

}  // namespace hess::presets
