#pragma once

// CSV reports and legacy structured-points field dumps.

#include <array>
#include <string>
#include <vector>

#include "hess/report.hpp"
#include "hess/scene.hpp"

namespace hess {

// time_s,entity,mean_c,max_c,min_c; rows ordered by (time, entity), 6 decimals.
void write_cell_csv(const ScenarioReport& report, const std::string& path);
std::string cell_csv(const ScenarioReport& report);

struct CellCsvRow {
  double time = 0.0;
  std::string entity;
  double mean_c = 0.0;
  double max_c = 0.0;
  double min_c = 0.0;
};
std::vector<CellCsvRow> read_cell_csv(const std::string& path);

// One row per run with the final mean temperature of every entity:
// pem_voltage_v,c_rate,time_s,<entity>_c,...  (pem_voltage_v empty when absent).
std::string sweep_csv(const std::vector<ScenarioReport>& reports);
void write_sweep_csv(const std::vector<ScenarioReport>& reports, const std::string& path);

struct FieldDump {
  std::array<int, 3> dims{0, 0, 0};
  Vec3 origin;  // first voxel centre
  double spacing = 0.0;
  std::vector<double> temperature_c;  // x fastest
};

void write_field_dump(const VoxelGrid& grid, const std::string& path, double time = 0.0);
FieldDump read_field_dump(const std::string& path);

// Writes text to path, creating parent directories; I/O errors carry the path.
void write_text_file(const std::string& path, const std::string& text);

}  // namespace hess
