#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "hess/electrochem.hpp"
#include "hess/scene.hpp"

namespace hess {

struct EnergyAudit {
  double initial_energy = 0.0;           // J
  double injected = 0.0;                 // J
  double lost_through_boundaries = 0.0;  // J
  double final_energy = 0.0;             // J
  double residual = 0.0;                 // final - (initial + injected - lost), J

  double relative_residual() const;
};

struct TemperatureSample {
  double time = 0.0;    // s
  double mean_c = 0.0;  // degC, volume-weighted
  double max_c = 0.0;
  double min_c = 0.0;
};

struct EntitySeries {
  std::string entity;
  SourceKind source = SourceKind::none;
  std::vector<TemperatureSample> samples;

  const TemperatureSample& final() const { return samples.back(); }
};

struct Hotspot {
  std::string entity;  // shape id, or "air"
  std::array<int, 3> voxel{0, 0, 0};
  double temperature_c = 0.0;
};

// Configuration a report was produced with; used to refuse comparisons
// between runs that are not like-for-like.
struct RunMetadata {
  double c_rate = 0.0;
  std::optional<double> pem_voltage;
  double duration = 0.0;
  double spacing = 0.0;
  electrochem::BatterySourceParams battery;
};

struct ScenarioReport {
  std::string label;
  std::vector<EntitySeries> entities;
  Hotspot hotspot;
  EnergyAudit audit;
  RunMetadata meta;

  const EntitySeries* find(const std::string& entity) const;
  const EntitySeries& at(const std::string& entity) const;
  void validate() const;
};

}  // namespace hess
