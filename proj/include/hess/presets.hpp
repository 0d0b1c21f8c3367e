#pragma once

// Shipped scene and scenario presets: the six-cell pack, the standalone PEM
// cell and the hybrid layout (three cells facing the PEM across an air gap).

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hess/electrochem.hpp"
#include "hess/harness.hpp"
#include "hess/scene.hpp"

namespace hess::presets {

struct Geometry {
  double cell_radius = 0.0105;   // 21700 cell
  double cell_height = 0.070;
  double cell_gap = 0.002;       // edge-to-edge inside the pack
  double pem_length = 0.100;
  double pem_width = 0.020;
  double pem_thickness = 0.010;
  double hybrid_gap = 0.018;     // pack to PEM
  double margin = 0.030;
  double spacing = 0.002;
  double ambient_c = 25.0;
};

SceneSpec pack6_scene(const Geometry& g = {});
SceneSpec pem_scene(const Geometry& g = {});
SceneSpec hess_scene(const Geometry& g = {});

// PEM kinetics shipped with the presets.
electrochem::PemSourceParams pem_params();

struct File {
  std::string name;
  std::string contents;
};

// Scene files followed by scenario files.
std::vector<File> files();
std::vector<std::string> scenario_names();

// Writes every preset into `dir`; returns the written paths.
std::vector<std::string> write_all(const std::string& dir);

// Scenario by preset name (e.g. "hess_4c_1v") with its scene held in memory.
std::optional<ScenarioConfig> scenario(std::string_view name);

}  // namespace hess::presets
