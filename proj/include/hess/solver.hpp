#pragma once

// Explicit finite-volume conduction on a voxel grid with harmonic-mean face
// conductances, Robin convective faces and lumped per-entity heat sources.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "hess/report.hpp"
#include "hess/scene.hpp"

namespace hess {

struct SimConfig {
  double duration = 360.0;                    // s
  std::optional<double> dt;                   // s; automatic when absent
  double ambient_temperature = 298.15;        // K
  double convective_h = 50.0;                 // W/(m^2 K)
  double record_interval = 36.0;              // s
  double safety_factor = 0.9;
  int workers = 1;                            // threads for the stencil update
  double instability_limit = 500.0;           // K away from ambient

  void validate() const;
};

// Power (W) injected into one entity as a function of its mean temperature (K).
using PowerModel = std::function<double(double)>;

struct SourceField {
  struct Entry {
    int entity = kAirEntity;
    std::vector<std::size_t> voxels;
    std::vector<double> weights;  // share of the entity power per voxel, sums to 1
    PowerModel power;
    double current_power = 0.0;   // W, last resolved value
  };
  std::vector<Entry> entries;

  double total_power() const;
};

// Spreads the entity power uniformly over its voxels.
SourceField::Entry uniform_source(const VoxelGrid& grid, int entity, PowerModel power);

// Puts `cathode_fraction` of the power into the half of the entity nearer
// `cathode` and the remainder into the other half.
SourceField::Entry split_source(const VoxelGrid& grid, int entity, Face cathode,
                                double cathode_fraction, PowerModel power);

// Largest explicit step keeping every update a convex combination, scaled by
// `safety_factor`. For a uniform medium this is dx^2 rho cp / (6 k).
double stable_dt(const VoxelGrid& grid, double safety_factor = 0.9);
// Same bound including the extra conductance of convective faces.
double stable_dt(const VoxelGrid& grid, const BoundaryMap& boundaries, double safety_factor = 0.9);

// Sum of rho cp T V over all voxels, J.
double total_energy(const VoxelGrid& grid);

// Conductance (W/K) of a convective face: film h A in series with the half
// voxel between the centre and the face.
double robin_conductance(double h, double spacing, double conductivity);

class ThermalSolver {
 public:
  ThermalSolver(VoxelGrid& grid, const BoundaryMap& boundaries, SourceField sources,
                int workers = 1);

  double stable_dt(double safety_factor) const;

  // Advances by dt; rejects steps above the stability limit.
  void step(double dt);

  // Writes the working field back into the grid.
  void sync_to_grid();

  const std::vector<double>& entity_means() const { return entity_means_; }
  const EnergyAudit& audit() const { return audit_; }
  double current_energy() const;
  std::size_t steps_taken() const { return steps_; }
  const SourceField& sources() const { return sources_; }

  // Aborts with a diagnostic on stderr if any voxel is non-finite or further
  // than `limit` from `reference`.
  void check_field(double reference, double limit) const;

 private:
  struct RobinVoxel {
    std::size_t voxel;
    double conductance;          // sum of h-film conductances, W/K
    double conductance_ambient;  // sum of conductance * T_ambient, W
  };

  void update_entity_means();
  void resolve_sources();

  VoxelGrid& grid_;
  std::size_t pad_ = 0;
  std::size_t nx_ = 0;
  std::size_t nxy_ = 0;
  std::vector<double> t_buf_;
  std::vector<double> next_buf_;
  std::vector<double> gx_buf_;
  std::vector<double> gy_buf_;
  std::vector<double> gz_buf_;
  std::vector<double> inv_capacity_;
  std::vector<double> capacity_;
  std::vector<RobinVoxel> robin_;
  SourceField sources_;
  std::vector<std::vector<std::size_t>> entity_voxels_;
  std::vector<double> entity_means_;
  EnergyAudit audit_;
  std::size_t steps_ = 0;
  int workers_ = 1;
  double limit_dt_ = 0.0;
};

// Single explicit step on a grid; convenience wrapper over ThermalSolver.
void step(VoxelGrid& grid, SourceField& sources, const BoundaryMap& boundaries, double dt);

struct TransientHooks {
  // Called at t = 0 and at every recorded time with the synced grid.
  std::function<void(double time, const VoxelGrid& grid)> on_record;
  // Polled after every step with the entity mean temperatures (K); returning
  // true ends the run at the current time.
  std::function<bool(double time, std::span<const double> entity_means)> stop;
};

struct TransientResult {
  std::vector<EntitySeries> series;
  Hotspot hotspot;
  EnergyAudit audit;
  double end_time = 0.0;
  bool stopped_early = false;
  std::size_t steps = 0;
  double dt = 0.0;  // largest step used
};

TransientResult run_transient(VoxelGrid& grid, const SceneSpec& spec, SourceField sources,
                              const SimConfig& sim, const TransientHooks& hooks = {});

TransientResult run_transient(VoxelGrid& grid, const SceneSpec& spec,
                              const BoundaryMap& boundaries, SourceField sources,
                              const SimConfig& sim, const TransientHooks& hooks = {});

}  // namespace hess
