#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hess/harness.hpp"
#include "hess/presets.hpp"

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("hess_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

Outcome cli(const std::string& args, const fs::path& workdir) {
  const fs::path out = workdir / "stdout.txt";
  const fs::path err = workdir / "stderr.txt";
  const std::string cmd = "cd '" + workdir.string() + "' && '" HESS_CLI "' " + args + " > '" +
                          out.string() + "' 2> '" + err.string() + "'";
  const int status = std::system(cmd.c_str());
  Outcome o;
  o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  o.out = slurp(out);
  o.err = slurp(err);
  return o;
}

// Pack scenario on a coarse grid so each CLI run takes well under a second.
fs::path quick_scenario(const fs::path& dir, const std::string& extra = "") {
  hess::presets::write_all(dir.string());
  std::ofstream(dir / "quick.json") << R"({
    "label": "quick", "scene": "pack6.scene", "c_rate": 4,
    "duration_s": 20, "record_interval_s": 10, "spacing_m": 0.004)"
                                    << extra << "}";
  return dir / "quick.json";
}

}  // namespace

TEST_CASE("usage errors exit with 1") {
  const fs::path dir = scratch("usage");
  Outcome o = cli("", dir);
  CHECK(o.code == 1);
  CHECK(o.err.find("run") != std::string::npos);

  o = cli("run --scenario x --bogus", dir);
  CHECK(o.code == 1);
  CHECK(o.err.find("--bogus") != std::string::npos);
  CHECK(o.err.find("Usage") != std::string::npos);

  o = cli("frobnicate", dir);
  CHECK(o.code == 1);
}

TEST_CASE("missing scenario file") {
  const fs::path dir = scratch("missing");
  const Outcome o = cli("run --scenario /does/not/exist.json", dir);
  CHECK(o.code == 1);
  CHECK(o.err.find("/does/not/exist.json") != std::string::npos);
}

TEST_CASE("invalid scenario content") {
  const fs::path dir = scratch("invalid");
  quick_scenario(dir, R"(, "c_rate": -2)");
  const Outcome o = cli("run --scenario quick.json", dir);
  CHECK(o.code == 1);
  CHECK(o.err.find("c_rate") != std::string::npos);
}

TEST_CASE("presets command") {
  const fs::path dir = scratch("presets");
  const Outcome o = cli("presets --dir out", dir);
  CHECK(o.code == 0);
  for (const char* f : {"pack6.scene", "pem.scene", "hess.scene", "hess_4c_1v.json", "pem_0p8v.json"}) {
    CHECK(fs::exists(dir / "out" / f));
  }
}

TEST_CASE("run writes a csv and prints a summary") {
  const fs::path dir = scratch("run");
  quick_scenario(dir);
  const Outcome o = cli("run --scenario quick.json --out results --dump-fields", dir);
  REQUIRE(o.code == 0);
  CHECK(o.out.rfind("quick t=20.000000s cell1=", 0) == 0);
  CHECK(o.out.find("hotspot=cell") != std::string::npos);
  CHECK(slurp(dir / "results" / "quick.csv").rfind("time_s,entity,mean_c,max_c,min_c\n", 0) == 0);
  CHECK(fs::exists(dir / "results" / "quick_t000020.vtk"));

  SUBCASE("repeated runs are byte-identical") {
    REQUIRE(cli("run --scenario quick.json --out again --dump-fields", dir).code == 0);
    CHECK(slurp(dir / "again" / "quick.csv") == slurp(dir / "results" / "quick.csv"));
    CHECK(slurp(dir / "again" / "quick_t000020.vtk") == slurp(dir / "results" / "quick_t000020.vtk"));
  }
}

TEST_CASE("runtime failures exit with 2") {
  const fs::path dir = scratch("runtime");
  quick_scenario(dir);
  std::ofstream(dir / "blocked") << "not a directory";
  const Outcome o = cli("run --scenario quick.json --out blocked", dir);
  CHECK(o.code == 2);
  CHECK(o.err.find("blocked") != std::string::npos);
}

TEST_CASE("sweep command") {
  const fs::path dir = scratch("sweep");
  quick_scenario(dir);
  const Outcome o = cli("sweep --scenario quick.json --c-rates 4,8 --out s --workers 2", dir);
  REQUIRE(o.code == 0);
  CHECK(fs::exists(dir / "s" / "quick_4c.csv"));
  CHECK(fs::exists(dir / "s" / "quick_8c.csv"));
  const std::string csv = slurp(dir / "s" / "sweep.csv");
  CHECK(csv.rfind("pem_voltage_v,c_rate,time_s,cell1_c", 0) == 0);
  CHECK(cli("sweep --scenario quick.json --c-rates 4 --voltages 0.8", dir).code == 1);
}

TEST_CASE("calibrate command") {
  const fs::path dir = scratch("calibrate");
  quick_scenario(dir);
  const Outcome o = cli("calibrate --scenario quick.json --target-dt 0.05 --time 20 --tolerance 0.002", dir);
  REQUIRE(o.code == 0);
  CHECK(o.out.find("reference_resistance_ohm=") == 0);
  CHECK(o.out.find("probe=cell2") != std::string::npos);
}

TEST_CASE("preset names are accepted as scenarios") {
  const fs::path dir = scratch("preset_run");
  const Outcome o = cli("run --scenario hess_4c_1v --out out", dir);
  REQUIRE(o.code == 0);
  CHECK(o.out.rfind("hess_4c_1v t=360.000000s cell1=", 0) == 0);
  for (const char* id : {"cell1=", "cell2=", "cell3=", "pem="}) {
    CHECK(o.out.find(id) != std::string::npos);
  }
  CHECK(fs::exists(dir / "out" / "hess_4c_1v.csv"));
}
