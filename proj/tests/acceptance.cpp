// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
//
//   acceptance [work_dir]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hess/electrochem.hpp"
#include "hess/error.hpp"
#include "hess/export.hpp"
#include "hess/harness.hpp"
#include "hess/presets.hpp"
#include "hess/solver.hpp"

using namespace hess;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double final_mean(const ScenarioReport& r, const std::string& entity) {
  return r.at(entity).final().mean_c;
}

class Suite {
 public:
  explicit Suite(fs::path work) : work_(std::move(work)) {}

  int run() {
    check(1, "calibration anchor", [&] { return calibration(); });
    check(2, "edge symmetry", [&] { return symmetry(); });
    check(3, "C-rate monotonicity", [&] { return c_rate_trend(); });
    check(4, "PEM voltage trend", [&] { return pem_trend(); });
    check(5, "HESS proximity deltas at 4C", [&] { return proximity(); });
    check(6, "energy audit", [&] { return audit(); });
    check(7, "analytic oracles", [&] { return oracles(); });
    check(8, "sweep determinism across workers", [&] { return determinism(); });
    check(9, "hotspot localization", [&] { return hotspots(); });
    std::printf("%d of 9 criteria passed\n", passed_);
    return passed_ == 9 ? 0 : 1;
  }

 private:
  void check(int id, const char* name, const std::function<Verdict()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = body();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    if (v.pass) ++passed_;
    std::printf("%s  %d %s: %s (%.1f s)\n", v.pass ? "PASS" : "FAIL", id, name, v.detail.c_str(),
                seconds_since(t0));
    std::fflush(stdout);
  }

  // Shared runs, computed once.
  const ScenarioReport& pack(double c_rate) {
    const std::string name = operating_label("pack6", c_rate, std::nullopt);
    auto it = reports_.find(name);
    if (it == reports_.end()) it = reports_.emplace(name, run_scenario(*presets::scenario(name))).first;
    return it->second;
  }

  const ScenarioReport& pem(double voltage) {
    const std::string name = operating_label("pem", 0.0, voltage);
    auto it = reports_.find(name);
    if (it == reports_.end()) {
      ScenarioConfig cfg = *presets::scenario("pem_1v");
      cfg.label = name;
      cfg.operating_point.pem_voltage = voltage;
      it = reports_.emplace(name, run_scenario(cfg)).first;
    }
    return it->second;
  }

  const std::vector<ScenarioReport>& hess_sweep() {
    if (hess_.empty()) hess_ = run_hess_sweep(1, work_ / "sweep_w1");
    return hess_;
  }

  std::vector<ScenarioReport> run_hess_sweep(int workers, const fs::path& dir) {
    fs::remove_all(dir);
    ScenarioConfig cfg = *presets::scenario("hess_4c_1v");
    cfg.label = "hess";
    cfg.output_dir = dir.string();
    return sweep(cfg, {4.0, 6.0, 8.0}, {1.0, 0.8, 0.4}, workers).reports;
  }

  const ScenarioReport& hess_at(double c_rate, double voltage) {
    for (const auto& r : hess_sweep()) {
      if (r.meta.c_rate == c_rate && r.meta.pem_voltage == voltage) return r;
    }
    throw std::runtime_error("missing hess run");
  }

  const ScenarioReport& standalone() {
    if (!standalone_) standalone_ = run_scenario(standalone_baseline(*presets::scenario("hess_4c_1v")));
    return *standalone_;
  }

  Verdict calibration() {
    const auto t0 = std::chrono::steady_clock::now();
    const CalibrationResult r =
        calibrate_resistance(0.94, 4.0, 360.0, *presets::scenario("pack6_4c"), 0.05);
    const double elapsed = seconds_since(t0);
    Verdict v;
    v.pass = std::abs(r.achieved_rise - 0.94) <= 0.05 && elapsed < 120.0;
    v.detail = "R_ref=" + fmt("%.4e", r.resistance) + " ohm, rise=" + fmt("%.4f", r.achieved_rise) +
               " K (target 0.94 +/- 0.05), " + std::to_string(r.evaluations) + " runs in " +
               fmt("%.1f", elapsed) + " s (limit 120 s); frozen R_ref=" +
               fmt("%.4e", electrochem::kCalibratedResistance) + " gives " +
               fmt("%.4f", final_mean(pack(4.0), "cell2") - 25.0) + " K";
    return v;
  }

  Verdict symmetry() {
    std::vector<const ScenarioReport*> runs;
    for (double c : {4.0, 6.0, 8.0}) runs.push_back(&pack(c));
    for (const auto& r : hess_sweep()) runs.push_back(&r);
    double worst = 0.0;
    for (const ScenarioReport* r : runs) {
      const auto& a = r->at("cell1").samples;
      const auto& b = r->at("cell3").samples;
      for (std::size_t i = 0; i < a.size(); ++i) {
        worst = std::max({worst, std::abs(a[i].mean_c - b[i].mean_c), std::abs(a[i].max_c - b[i].max_c),
                          std::abs(a[i].min_c - b[i].min_c)});
      }
    }
    return {worst < 1e-6, "max |T_cell1 - T_cell3| = " + fmt("%.3e", worst) + " K over " +
                              std::to_string(runs.size()) + " runs (limit 1e-6)"};
  }

  Verdict c_rate_trend() {
    const ScenarioReport& r4 = pack(4.0);
    const ScenarioReport& r6 = pack(6.0);
    const ScenarioReport& r8 = pack(8.0);
    bool ordered = true;
    double worst_ratio = 1e300;
    for (const auto& e : r4.entities) {
      const double t4 = e.final().mean_c;
      const double t6 = final_mean(r6, e.entity);
      const double t8 = final_mean(r8, e.entity);
      ordered = ordered && t8 > t6 && t6 > t4;
      worst_ratio = std::min(worst_ratio, (t8 - 25.0) / (t4 - 25.0));
    }
    return {ordered && worst_ratio > 2.0,
            std::string(ordered ? "T(8C) > T(6C) > T(4C) for all cells" : "ordering violated") +
                "; min rise(8C)/rise(4C) = " + fmt("%.3f", worst_ratio) + " (need > 2); centre " +
                fmt("%.3f", final_mean(r4, "cell2")) + "/" + fmt("%.3f", final_mean(r6, "cell2")) + "/" +
                fmt("%.3f", final_mean(r8, "cell2")) + " C"};
  }

  Verdict pem_trend() {
    const std::vector<double> volts{1.0, 0.9, 0.8, 0.6, 0.4};
    std::string detail;
    bool ok = true;
    double previous = -1e300;
    for (double v : volts) {
      const double t = final_mean(pem(v), "pem");
      ok = ok && t > previous;
      previous = t;
      detail += fmt("%.2f V: ", v) + fmt("%.3f C", t) + (v == 0.4 ? "" : ", ");
    }
    return {ok, detail};
  }

  Verdict proximity() {
    const std::vector<double> volts{1.0, 0.8, 0.4};
    bool ok = true;
    std::string detail;
    std::vector<double> previous;
    for (double v : volts) {
      const DeltaReport d = delta_report(hess_at(4.0, v), standalone());
      detail += fmt("%.1f V:", v);
      for (std::size_t i = 0; i < d.cells.size(); ++i) {
        const double x = d.cells[i].delta;
        ok = ok && x >= 0.01 && x <= 1.0;
        if (!previous.empty()) ok = ok && x > previous[i];
        detail += " " + fmt("%.4f", x);
      }
      detail += v == 0.4 ? " K" : " K; ";
      previous.clear();
      for (const auto& c : d.cells) previous.push_back(c.delta);
    }
    return {ok, detail + " (need all in [0.01, 1.0] K and increasing as voltage drops)"};
  }

  Verdict audit() {
    double worst = 0.0;
    std::size_t count = 0;
    auto take = [&](const ScenarioReport& r) {
      worst = std::max(worst, r.audit.relative_residual());
      ++count;
    };
    for (double c : {4.0, 6.0, 8.0}) take(pack(c));
    for (double v : {1.0, 0.8, 0.4}) take(pem(v));
    for (const auto& r : hess_sweep()) take(r);

    // Adiabatic, source-free: 10k steps on a mixed-material grid.
    const SceneSpec spec = presets::pack6_scene();
    VoxelGrid g = voxelize(spec, 0.004);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> temp(290.0, 320.0);
    for (double& t : g.temperature) t = temp(rng);
    ThermalSolver solver(g, outer_boundary(g, 0.0, 298.15), SourceField{});
    const double e0 = solver.current_energy();
    const double dt = solver.stable_dt(0.9);
    for (int n = 0; n < 10000; ++n) solver.step(dt);
    const double drift = std::abs(solver.current_energy() - e0) / e0;

    return {worst < 1e-6 && drift < 1e-8,
            "worst residual " + fmt("%.2e", worst) + " over " + std::to_string(count) +
                " shipped scenarios (limit 1e-6); adiabatic drift " + fmt("%.2e", drift) +
                " over 10000 steps (limit 1e-8)"};
  }

  Verdict oracles() {
    // Lumped cooling of a copper cube.
    const Material cu = materials::copper();
    SceneSpec block;
    block.materials = {{"air", materials::air()}, {"copper", cu}};
    block.domain_margin = 0.0;
    Shape s;
    s.id = "block";
    s.geometry = Box{{0, 0, 0}, {0.02, 0.02, 0.02}};
    s.material = "copper";
    block.shapes = {s};
    VoxelGrid g = voxelize(block, 0.002);
    std::fill(g.temperature.begin(), g.temperature.end(), 350.0);
    const double h = 50.0, t_amb = 300.0;
    const double tau = cu.density * cu.specific_heat * 0.02 / (6.0 * h);
    SimConfig sim;
    sim.ambient_temperature = t_amb;
    sim.convective_h = h;
    sim.duration = 3.0 * tau;
    sim.record_interval = tau / 10.0;
    const TransientResult cool = run_transient(g, block, outer_boundary(g, h, t_amb), SourceField{}, sim);
    double cool_err = 0.0;
    for (const auto& x : cool.series[0].samples) {
      const double expected = 50.0 * std::exp(-x.time / tau);
      cool_err = std::max(cool_err, std::abs(celsius_to_kelvin(x.mean_c) - t_amb - expected) / expected);
    }

    // Steady 1D slab between two films.
    const double length = 0.04, dx = 0.002, film = 1e4;
    block.shapes[0].geometry = Box{{0, 0, 0}, {length, 4 * dx, 4 * dx}};
    VoxelGrid slab = voxelize(block, dx);
    BoundaryMap b = outer_boundary(slab, 0.0, t_amb);
    for (auto& f : b.faces) {
      const auto c = slab.coords(f.voxel);
      if (f.face == Face::x_minus && c[0] == 0) f = {f.voxel, f.face, FaceKind::convective, film, 350.0};
      if (f.face == Face::x_plus && c[0] == slab.dims[0] - 1) {
        f = {f.voxel, f.face, FaceKind::convective, film, 300.0};
      }
    }
    std::fill(slab.temperature.begin(), slab.temperature.end(), 325.0);
    SimConfig steady;
    steady.ambient_temperature = t_amb;
    steady.duration = 200.0;
    steady.record_interval = 200.0;
    run_transient(slab, block, b, SourceField{}, steady);
    const double q = 50.0 / (2.0 / film + length / cu.conductivity);
    double slab_err = 0.0;
    for (int i = 0; i < slab.dims[0]; ++i) {
      const double expected = 350.0 - q / film - q * (i + 0.5) * dx / cu.conductivity;
      slab_err = std::max(slab_err, std::abs(slab.temperature[slab.index(i, 1, 1)] - expected) / 50.0);
    }

    // Voxelized 21 x 70 mm cylinder.
    SceneSpec cyl;
    cyl.materials = {{"air", materials::air()}, {"battery_cell", materials::battery_cell()}};
    cyl.domain_margin = 0.01;
    Shape c;
    c.id = "cell";
    c.geometry = Cylinder{{0, 0, 0}, 0.0105, 0.07, Axis::z};
    c.material = "battery_cell";
    cyl.shapes = {c};
    const double exact = std::numbers::pi * 0.0105 * 0.0105 * 0.07;
    auto vol_err = [&](double spacing) {
      const VoxelGrid vg = voxelize(cyl, spacing);
      const auto n = std::count(vg.entity_id.begin(), vg.entity_id.end(), 0);
      return std::abs(static_cast<double>(n) * vg.voxel_volume() - exact) / exact;
    };
    const double e2 = vol_err(0.002), e1 = vol_err(0.001);

    return {cool_err < 0.02 && slab_err < 0.01 && e2 < 0.05 && e1 < e2,
            "lumped cooling " + fmt("%.3f%%", 100 * cool_err) + " (limit 2%), slab " +
                fmt("%.4f%%", 100 * slab_err) + " (limit 1%), cylinder volume " + fmt("%.2f%%", 100 * e2) +
                " at 2 mm, " + fmt("%.2f%%", 100 * e1) + " at 1 mm"};
  }

  Verdict determinism() {
    hess_sweep();
    const fs::path base = work_ / "sweep_w1";
    std::size_t files = 0;
    bool same = true;
    for (int workers : {2, 8}) {
      const fs::path dir = work_ / ("sweep_w" + std::to_string(workers));
      run_hess_sweep(workers, dir);
      for (const auto& entry : fs::directory_iterator(base)) {
        const fs::path other = dir / entry.path().filename();
        same = same && fs::exists(other) && slurp(entry.path()) == slurp(other);
        ++files;
      }
    }
    return {same && files == 20, std::to_string(files) + " CSV files compared for 2 and 8 workers against 1 worker" +
                                     (same ? ", all byte-identical" : ", differences found")};
  }

  Verdict hotspots() {
    bool ok = true;
    std::string detail;
    for (double c : {4.0, 6.0, 8.0}) {
      const Hotspot& h = hess_at(c, 0.4).hotspot;
      ok = ok && h.entity == "pem";
      detail += fmt("0.4 V %gC: ", c) + h.entity + fmt(" %.3f C; ", h.temperature_c);
    }
    const Hotspot& h = hess_at(4.0, 1.0).hotspot;
    ok = ok && h.entity == center_cell(presets::hess_scene());
    detail += "1.0 V 4C: " + h.entity + fmt(" %.3f C", h.temperature_c);
    return {ok, detail};
  }

  fs::path work_;
  int passed_ = 0;
  std::map<std::string, ScenarioReport> reports_;
  std::vector<ScenarioReport> hess_;
  std::optional<ScenarioReport> standalone_;
};

}  // namespace

int main(int argc, char** argv) {
  const fs::path work = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "hess_acceptance";
  fs::create_directories(work);
  return Suite(work).run();
}
