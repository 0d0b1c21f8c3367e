#include "hess/solver.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <sstream>

#include "hess/error.hpp"

namespace hess {

double EnergyAudit::relative_residual() const {
  return std::abs(residual) / std::max(1.0, injected);
}

void SimConfig::validate() const {
  if (!(duration > 0.0)) throw ValidationError("sim: duration must be > 0");
  if (!(record_interval > 0.0)) throw ValidationError("sim: record_interval must be > 0");
  if (!(safety_factor > 0.0 && safety_factor <= 1.0)) {
    throw ValidationError("sim: safety_factor must lie in (0, 1]");
  }
  if (dt && !(*dt > 0.0)) throw ValidationError("sim: dt must be > 0");
  if (!(ambient_temperature > 0.0)) throw ValidationError("sim: ambient temperature must be > 0 K");
  if (!(convective_h >= 0.0)) throw ValidationError("sim: convective h must be >= 0");
  if (workers < 1) throw ValidationError("sim: workers must be >= 1");
}

double SourceField::total_power() const {
  double total = 0.0;
  for (const auto& e : entries) total += e.current_power;
  return total;
}

SourceField::Entry uniform_source(const VoxelGrid& grid, int entity, PowerModel power) {
  SourceField::Entry entry;
  entry.entity = entity;
  entry.power = std::move(power);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid.entity_id[i] == entity) entry.voxels.push_back(i);
  }
  if (entry.voxels.empty()) {
    throw ValidationError("uniform_source: entity " + std::to_string(entity) + " has no voxels");
  }
  entry.weights.assign(entry.voxels.size(), 1.0 / static_cast<double>(entry.voxels.size()));
  return entry;
}

SourceField::Entry split_source(const VoxelGrid& grid, int entity, Face cathode,
                                double cathode_fraction, PowerModel power) {
  SourceField::Entry entry;
  entry.entity = entity;
  entry.power = std::move(power);
  const int axis = face_axis(cathode);
  int lo = std::numeric_limits<int>::max();
  int hi = std::numeric_limits<int>::min();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid.entity_id[i] != entity) continue;
    entry.voxels.push_back(i);
    const int c = grid.coords(i)[axis];
    lo = std::min(lo, c);
    hi = std::max(hi, c);
  }
  if (entry.voxels.empty()) {
    throw ValidationError("split_source: entity " + std::to_string(entity) + " has no voxels");
  }
  // Twice the layer index is compared with lo + hi so a middle layer (odd
  // layer count) belongs to neither half and receives the mean weight.
  std::vector<int> side(entry.voxels.size());
  std::size_t n_cathode = 0, n_anode = 0, n_middle = 0;
  for (std::size_t v = 0; v < entry.voxels.size(); ++v) {
    const int twice = 2 * grid.coords(entry.voxels[v])[axis];
    int s = twice == lo + hi ? 0 : (twice > lo + hi ? 1 : -1);
    if (face_sign(cathode) < 0) s = -s;
    side[v] = s;
    (s > 0 ? n_cathode : (s < 0 ? n_anode : n_middle)) += 1;
  }
  const double total = static_cast<double>(entry.voxels.size());
  if (n_cathode == 0 || n_anode == 0) {
    entry.weights.assign(entry.voxels.size(), 1.0 / total);
    return entry;
  }
  // Middle voxels get the average density; the halves share what remains.
  const double middle_share = static_cast<double>(n_middle) / total;
  const double w_cathode = cathode_fraction * (1.0 - middle_share) / static_cast<double>(n_cathode);
  const double w_anode = (1.0 - cathode_fraction) * (1.0 - middle_share) / static_cast<double>(n_anode);
  entry.weights.resize(entry.voxels.size());
  for (std::size_t v = 0; v < entry.voxels.size(); ++v) {
    entry.weights[v] = side[v] > 0 ? w_cathode : (side[v] < 0 ? w_anode : 1.0 / total);
  }
  return entry;
}

double robin_conductance(double h, double spacing, double conductivity) {
  if (h <= 0.0) return 0.0;
  const double area = spacing * spacing;
  return 1.0 / (1.0 / (h * area) + spacing / (2.0 * conductivity * area));
}

namespace {

double face_conductance(const Material& a, const Material& b, double spacing) {
  // area / (dx/(2 ka) + dx/(2 kb)) = dx * harmonic_mean(ka, kb)
  return spacing * 2.0 * a.conductivity * b.conductivity / (a.conductivity + b.conductivity);
}

double grid_stable_dt(const VoxelGrid& grid, const BoundaryMap* boundaries, double safety) {
  if (!(safety > 0.0 && safety <= 1.0)) throw ValidationError("stable_dt: safety factor must lie in (0, 1]");
  const auto& d = grid.dims;
  const double dx = grid.spacing;
  std::vector<double> conductance_sum(grid.size(), 0.0);
  for (int k = 0; k < d[2]; ++k) {
    for (int j = 0; j < d[1]; ++j) {
      for (int i = 0; i < d[0]; ++i) {
        const std::size_t idx = grid.index(i, j, k);
        const Material& m = grid.material_at(idx);
        const std::array<int, 3> c{i, j, k};
        for (int axis = 0; axis < 3; ++axis) {
          if (c[axis] + 1 >= d[axis]) continue;
          std::array<int, 3> n = c;
          n[axis] += 1;
          const std::size_t nb = grid.index(n[0], n[1], n[2]);
          const double g = face_conductance(m, grid.material_at(nb), dx);
          conductance_sum[idx] += g;
          conductance_sum[nb] += g;
        }
      }
    }
  }
  if (boundaries) {
    for (const auto& f : boundaries->faces) {
      if (f.kind != FaceKind::convective) continue;
      conductance_sum[f.voxel] += robin_conductance(f.h, dx, grid.material_at(f.voxel).conductivity);
    }
  }
  double best = std::numeric_limits<double>::infinity();
  const double volume = grid.voxel_volume();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (conductance_sum[i] <= 0.0) continue;
    best = std::min(best, grid.material_at(i).volumetric_heat_capacity() * volume / conductance_sum[i]);
  }
  return safety * best;
}

}  // namespace

double stable_dt(const VoxelGrid& grid, double safety_factor) {
  return grid_stable_dt(grid, nullptr, safety_factor);
}

double stable_dt(const VoxelGrid& grid, const BoundaryMap& boundaries, double safety_factor) {
  return grid_stable_dt(grid, &boundaries, safety_factor);
}

double total_energy(const VoxelGrid& grid) {
  const double volume = grid.voxel_volume();
  const std::size_t plane = static_cast<std::size_t>(grid.dims[0]) * grid.dims[1];
  double total = 0.0;
  for (std::size_t start = 0; start < grid.size(); start += plane) {
    double partial = 0.0;
    for (std::size_t i = start; i < std::min(start + plane, grid.size()); ++i) {
      partial += grid.material_at(i).volumetric_heat_capacity() * volume * grid.temperature[i];
    }
    total += partial;
  }
  return total;
}

ThermalSolver::ThermalSolver(VoxelGrid& grid, const BoundaryMap& boundaries, SourceField sources,
                             int workers)
    : grid_(grid), sources_(std::move(sources)), workers_(std::max(1, workers)) {
  grid_.validate();
  const auto& d = grid_.dims;
  nx_ = static_cast<std::size_t>(d[0]);
  nxy_ = nx_ * static_cast<std::size_t>(d[1]);
  pad_ = nxy_;
  const std::size_t n = grid_.size();
  const double dx = grid_.spacing;
  const double volume = grid_.voxel_volume();

  t_buf_.assign(n + 2 * pad_, 0.0);
  next_buf_.assign(n + 2 * pad_, 0.0);
  gx_buf_.assign(n + 2 * pad_, 0.0);
  gy_buf_.assign(n + 2 * pad_, 0.0);
  gz_buf_.assign(n + 2 * pad_, 0.0);
  inv_capacity_.resize(n);
  capacity_.resize(n);
  std::copy(grid_.temperature.begin(), grid_.temperature.end(), t_buf_.begin() + pad_);

  double* gx = gx_buf_.data() + pad_;
  double* gy = gy_buf_.data() + pad_;
  double* gz = gz_buf_.data() + pad_;
  for (int k = 0; k < d[2]; ++k) {
    for (int j = 0; j < d[1]; ++j) {
      for (int i = 0; i < d[0]; ++i) {
        const std::size_t idx = grid_.index(i, j, k);
        const Material& m = grid_.material_at(idx);
        capacity_[idx] = m.volumetric_heat_capacity() * volume;
        inv_capacity_[idx] = 1.0 / capacity_[idx];
        if (i + 1 < d[0]) gx[idx] = face_conductance(m, grid_.material_at(idx + 1), dx);
        if (j + 1 < d[1]) gy[idx] = face_conductance(m, grid_.material_at(idx + nx_), dx);
        if (k + 1 < d[2]) gz[idx] = face_conductance(m, grid_.material_at(idx + nxy_), dx);
      }
    }
  }

  std::vector<double> robin_g(n, 0.0), robin_gt(n, 0.0);
  for (const auto& f : boundaries.faces) {
    if (f.voxel >= n) throw ValidationError("ThermalSolver: boundary face outside the grid");
    if (f.kind != FaceKind::convective) continue;
    const double g = robin_conductance(f.h, dx, grid_.material_at(f.voxel).conductivity);
    robin_g[f.voxel] += g;
    robin_gt[f.voxel] += g * f.t_ambient;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (robin_g[i] > 0.0) robin_.push_back({i, robin_g[i], robin_gt[i]});
  }

  int entity_count = 0;
  for (int e : grid_.entity_id) entity_count = std::max(entity_count, e + 1);
  entity_voxels_.resize(static_cast<std::size_t>(entity_count));
  for (std::size_t i = 0; i < n; ++i) {
    if (grid_.entity_id[i] != kAirEntity) {
      entity_voxels_[static_cast<std::size_t>(grid_.entity_id[i])].push_back(i);
    }
  }
  entity_means_.assign(entity_voxels_.size(), 0.0);
  for (const auto& e : sources_.entries) {
    if (e.voxels.size() != e.weights.size()) {
      throw ValidationError("ThermalSolver: source voxel and weight counts differ");
    }
    if (e.entity < 0 || static_cast<std::size_t>(e.entity) >= entity_voxels_.size()) {
      throw ValidationError("ThermalSolver: source attached to an unknown entity");
    }
  }

  // Exact convexity bound (safety factor 1).
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double sum = gx[i] + gx[i - 1] + gy[i] + gy[i - nx_] + gz[i] + gz[i - nxy_] + robin_g[i];
    if (sum > 0.0) best = std::min(best, capacity_[i] / sum);
  }
  limit_dt_ = best;

  audit_.initial_energy = current_energy();
  update_entity_means();
}

double ThermalSolver::stable_dt(double safety_factor) const { return safety_factor * limit_dt_; }

double ThermalSolver::current_energy() const {
  const double* t = t_buf_.data() + pad_;
  const std::size_t n = grid_.size();
  double total = 0.0;
  for (std::size_t start = 0; start < n; start += nxy_) {
    double partial = 0.0;
    const std::size_t end = std::min(start + nxy_, n);
    for (std::size_t i = start; i < end; ++i) partial += capacity_[i] * t[i];
    total += partial;
  }
  return total;
}

void ThermalSolver::update_entity_means() {
  const double* t = t_buf_.data() + pad_;
  for (std::size_t e = 0; e < entity_voxels_.size(); ++e) {
    const auto& voxels = entity_voxels_[e];
    if (voxels.empty()) continue;
    double sum = 0.0;
    for (std::size_t v : voxels) sum += t[v];
    entity_means_[e] = sum / static_cast<double>(voxels.size());
  }
}

void ThermalSolver::resolve_sources() {
  for (auto& e : sources_.entries) {
    const double p = e.power ? e.power(entity_means_[static_cast<std::size_t>(e.entity)]) : 0.0;
    if (!std::isfinite(p)) throw SolverError("ThermalSolver: non-finite source power");
    e.current_power = p;
  }
}

void ThermalSolver::step(double dt) {
  if (!(dt > 0.0)) throw ValidationError("step: dt must be > 0");
  if (dt > limit_dt_ * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "step: dt = " << dt << " s exceeds the stability limit " << limit_dt_ << " s";
    throw SolverError(os.str());
  }
  resolve_sources();

  const double* t = t_buf_.data() + pad_;
  double* next = next_buf_.data() + pad_;
  const double* gx = gx_buf_.data() + pad_;
  const double* gy = gy_buf_.data() + pad_;
  const double* gz = gz_buf_.data() + pad_;
  const double* inv_c = inv_capacity_.data();
  const std::ptrdiff_t sx = 1;
  const auto sy = static_cast<std::ptrdiff_t>(nx_);
  const auto sz = static_cast<std::ptrdiff_t>(nxy_);
  const auto planes = static_cast<std::ptrdiff_t>(grid_.dims[2]);

  // Whole z-planes per task: the per-voxel arithmetic is identical for any
  // worker count.
#pragma omp parallel for num_threads(workers_) schedule(static)
  for (std::ptrdiff_t k = 0; k < planes; ++k) {
    const std::ptrdiff_t begin = k * sz;
    const std::ptrdiff_t end = begin + sz;
    for (std::ptrdiff_t i = begin; i < end; ++i) {
      const double ti = t[i];
      const double flux = gx[i - sx] * (t[i - sx] - ti) + gx[i] * (t[i + sx] - ti) +
                          gy[i - sy] * (t[i - sy] - ti) + gy[i] * (t[i + sy] - ti) +
                          gz[i - sz] * (t[i - sz] - ti) + gz[i] * (t[i + sz] - ti);
      next[i] = ti + dt * inv_c[i] * flux;
    }
  }

  double lost = 0.0;
  for (const auto& r : robin_) {
    const double q = r.conductance_ambient - r.conductance * t[r.voxel];
    next[r.voxel] += dt * inv_c[r.voxel] * q;
    lost -= q;
  }
  audit_.lost_through_boundaries += dt * lost;

  double injected = 0.0;
  for (const auto& e : sources_.entries) {
    if (e.current_power == 0.0) continue;
    for (std::size_t v = 0; v < e.voxels.size(); ++v) {
      next[e.voxels[v]] += dt * inv_c[e.voxels[v]] * (e.current_power * e.weights[v]);
    }
    injected += e.current_power;
  }
  audit_.injected += dt * injected;

  std::swap(t_buf_, next_buf_);
  ++steps_;
  update_entity_means();
}

void ThermalSolver::sync_to_grid() {
  std::copy(t_buf_.begin() + static_cast<std::ptrdiff_t>(pad_),
            t_buf_.begin() + static_cast<std::ptrdiff_t>(pad_ + grid_.size()),
            grid_.temperature.begin());
  audit_.final_energy = current_energy();
  audit_.residual = audit_.final_energy -
                    (audit_.initial_energy + audit_.injected - audit_.lost_through_boundaries);
}

void ThermalSolver::check_field(double reference, double limit) const {
  const double* t = t_buf_.data() + pad_;
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    if (std::isfinite(t[i]) && std::abs(t[i] - reference) <= limit) continue;
    const auto c = grid_.coords(i);
    std::ostringstream os;
    os << "solver abort at step " << steps_ << ": voxel (" << c[0] << ", " << c[1] << ", " << c[2]
       << ") temperature " << t[i] << " K "
       << (std::isfinite(t[i]) ? "exceeds the instability limit" : "is not finite");
    std::cerr << os.str() << '\n';
    throw SolverError(os.str());
  }
}

void step(VoxelGrid& grid, SourceField& sources, const BoundaryMap& boundaries, double dt) {
  ThermalSolver solver(grid, boundaries, std::move(sources));
  solver.step(dt);
  solver.check_field(0.0, std::numeric_limits<double>::max());
  solver.sync_to_grid();
  sources = solver.sources();
}

namespace {

constexpr std::size_t kCheckEvery = 64;

Hotspot find_hotspot(const VoxelGrid& grid, const SceneSpec& spec) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (grid.temperature[i] > grid.temperature[best]) best = i;
  }
  Hotspot h;
  const int e = grid.entity_id[best];
  h.entity = e == kAirEntity ? "air" : spec.shapes[static_cast<std::size_t>(e)].id;
  h.voxel = grid.coords(best);
  h.temperature_c = kelvin_to_celsius(grid.temperature[best]);
  return h;
}

void record(const VoxelGrid& grid, const std::vector<std::vector<std::size_t>>& entity_voxels,
            double time, std::vector<EntitySeries>& series) {
  for (std::size_t e = 0; e < series.size(); ++e) {
    const auto& voxels = entity_voxels[e];
    TemperatureSample s;
    s.time = time;
    if (!voxels.empty()) {
      double sum = 0.0;
      double lo = std::numeric_limits<double>::infinity();
      double hi = -std::numeric_limits<double>::infinity();
      for (std::size_t v : voxels) {
        const double t = grid.temperature[v];
        sum += t;
        lo = std::min(lo, t);
        hi = std::max(hi, t);
      }
      s.mean_c = kelvin_to_celsius(sum / static_cast<double>(voxels.size()));
      s.max_c = kelvin_to_celsius(hi);
      s.min_c = kelvin_to_celsius(lo);
    }
    series[e].samples.push_back(s);
  }
}

}  // namespace

TransientResult run_transient(VoxelGrid& grid, const SceneSpec& spec, SourceField sources,
                              const SimConfig& sim, const TransientHooks& hooks) {
  const BoundaryMap boundaries =
      tag_boundaries(spec, grid, sim.convective_h, sim.ambient_temperature);
  return run_transient(grid, spec, boundaries, std::move(sources), sim, hooks);
}

TransientResult run_transient(VoxelGrid& grid, const SceneSpec& spec,
                              const BoundaryMap& boundaries, SourceField sources,
                              const SimConfig& sim, const TransientHooks& hooks) {
  sim.validate();
  ThermalSolver solver(grid, boundaries, std::move(sources), sim.workers);

  std::vector<std::vector<std::size_t>> entity_voxels(spec.shapes.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const int e = grid.entity_id[i];
    if (e != kAirEntity) {
      if (static_cast<std::size_t>(e) >= spec.shapes.size()) {
        throw ValidationError("run_transient: grid entity does not match the scene");
      }
      entity_voxels[static_cast<std::size_t>(e)].push_back(i);
    }
  }

  TransientResult result;
  result.series.resize(spec.shapes.size());
  for (std::size_t s = 0; s < spec.shapes.size(); ++s) {
    result.series[s].entity = spec.shapes[s].id;
    result.series[s].source = spec.shapes[s].source;
  }

  const double dt_max = sim.dt ? *sim.dt : solver.stable_dt(sim.safety_factor);
  if (sim.dt && *sim.dt > solver.stable_dt(1.0)) {
    throw ValidationError("run_transient: requested dt exceeds the stability limit");
  }

  record(grid, entity_voxels, 0.0, result.series);
  if (hooks.on_record) hooks.on_record(0.0, grid);

  const auto segments = static_cast<std::size_t>(std::ceil(sim.duration / sim.record_interval - 1e-9));
  double time = 0.0;
  for (std::size_t seg = 1; seg <= segments && !result.stopped_early; ++seg) {
    const double seg_end =
        seg == segments ? sim.duration : static_cast<double>(seg) * sim.record_interval;
    const double length = seg_end - time;
    const auto n_steps = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(length / dt_max - 1e-9)));
    const double dt = length / static_cast<double>(n_steps);
    result.dt = std::max(result.dt, dt);
    for (std::size_t s = 1; s <= n_steps; ++s) {
      solver.step(dt);
      const double now = s == n_steps ? seg_end : time + static_cast<double>(s) * dt;
      if (solver.steps_taken() % kCheckEvery == 0) {
        solver.check_field(sim.ambient_temperature, sim.instability_limit);
      }
      if (hooks.stop && hooks.stop(now, solver.entity_means())) {
        result.stopped_early = true;
        time = now;
        break;
      }
    }
    if (!result.stopped_early) time = seg_end;
    solver.check_field(sim.ambient_temperature, sim.instability_limit);
    solver.sync_to_grid();
    record(grid, entity_voxels, time, result.series);
    if (hooks.on_record) hooks.on_record(time, grid);
  }

  solver.sync_to_grid();
  result.end_time = time;
  result.steps = solver.steps_taken();
  result.audit = solver.audit();
  result.hotspot = find_hotspot(grid, spec);
  if (result.audit.relative_residual() >= 1e-6) {
    std::ostringstream os;
    os << "run_transient: energy audit residual " << result.audit.residual << " J exceeds 1e-6 of "
       << std::max(1.0, result.audit.injected) << " J";
    throw SolverError(os.str());
  }
  return result;
}

}  // namespace hess
