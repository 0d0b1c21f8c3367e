#include "doctest.h"

#include <cmath>
#include <numbers>
#include <set>
#include <string>

#include "hess/error.hpp"
#include "hess/presets.hpp"
#include "hess/scene.hpp"

using namespace hess;

namespace {

const char* kOneCell = R"({
  "ambient_c": 25,
  "margin_m": 0.01,
  "materials": {
    "cell": {"density": 2700, "specific_heat": 900, "conductivity": 3}
  },
  "shapes": [
    {"id": "c1", "kind": "cylinder", "material": "cell", "source": "battery",
     "geometry": {"center": [0, 0, 0], "radius": 0.0105, "height": 0.07}}
  ]
})";

SceneSpec air_box(double lx, double ly, double lz) {
  SceneSpec spec;
  spec.materials["air"] = materials::air();
  spec.domain = DomainBounds{{0, 0, 0}, {lx, ly, lz}};
  return spec;
}

Shape box(const std::string& id, Vec3 lo, Vec3 ext, const std::string& material = "copper") {
  Shape s;
  s.id = id;
  s.geometry = Box{lo, ext};
  s.material = material;
  return s;
}

double voxelized_volume(const SceneSpec& spec, double dx) {
  const VoxelGrid g = voxelize(spec, dx);
  std::size_t n = 0;
  for (int e : g.entity_id) n += e == 0 ? 1 : 0;
  return static_cast<double>(n) * g.voxel_volume();
}

}  // namespace

TEST_CASE("parse a single cylinder scene") {
  const SceneSpec spec = parse_scene(kOneCell);
  REQUIRE(spec.shapes.size() == 1);
  const auto& c = std::get<Cylinder>(spec.shapes[0].geometry);
  CHECK(c.radius == 0.0105);
  CHECK(c.height == 0.07);
  CHECK(c.axis == Axis::z);
  CHECK(spec.shapes[0].source == SourceKind::battery);
  CHECK(spec.ambient_temperature == doctest::Approx(298.15));
  CHECK(spec.materials.contains("air"));
}

TEST_CASE("empty shape list is a valid scene") {
  const SceneSpec spec = parse_scene(R"({"shapes": [], "domain": {"min": [0,0,0], "max": [0.01,0.01,0.01]}})");
  CHECK(spec.shapes.empty());
  const VoxelGrid g = voxelize(spec, spec.spacing);
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(g.entity_id[i] == kAirEntity);
    CHECK(g.temperature[i] == spec.ambient_temperature);
  }
}

TEST_CASE("scene validation errors") {
  SUBCASE("overlapping boxes") {
    const char* text = R"({
      "materials": {"m": {"density": 1, "specific_heat": 1, "conductivity": 1}},
      "shapes": [
        {"id": "a", "kind": "box", "material": "m", "geometry": {"min": [0,0,0], "extents": [0.02,0.02,0.02]}},
        {"id": "b", "kind": "box", "material": "m", "geometry": {"min": [0.01,0.01,0.01], "extents": [0.02,0.02,0.02]}}
      ]})";
    CHECK_THROWS_AS(parse_scene(text), ValidationError);
  }
  SUBCASE("touching boxes are fine") {
    const char* text = R"({
      "materials": {"m": {"density": 1, "specific_heat": 1, "conductivity": 1}},
      "shapes": [
        {"id": "a", "kind": "box", "material": "m", "geometry": {"min": [0,0,0], "extents": [0.02,0.02,0.02]}},
        {"id": "b", "kind": "box", "material": "m", "geometry": {"min": [0.02,0,0], "extents": [0.02,0.02,0.02]}}
      ]})";
    CHECK_NOTHROW(parse_scene(text));
  }
  SUBCASE("unknown material") {
    CHECK_THROWS_WITH_AS(
        parse_scene(R"({"shapes": [{"id": "a", "kind": "box", "material": "lead",
                        "geometry": {"min": [0,0,0], "extents": [0.01,0.01,0.01]}}]})"),
        doctest::Contains("lead"), ValidationError);
  }
  SUBCASE("duplicate ids") {
    SceneSpec spec = air_box(0.1, 0.1, 0.1);
    spec.materials["copper"] = materials::copper();
    spec.shapes = {box("a", {0, 0, 0}, {0.01, 0.01, 0.01}), box("a", {0.05, 0, 0}, {0.01, 0.01, 0.01})};
    CHECK_THROWS_AS(spec.validate(), ValidationError);
  }
  SUBCASE("non-positive dimensions") {
    SceneSpec spec = air_box(0.1, 0.1, 0.1);
    spec.materials["copper"] = materials::copper();
    spec.shapes = {box("a", {0, 0, 0}, {0.01, 0.0, 0.01})};
    CHECK_THROWS_AS(spec.validate(), ValidationError);
  }
  SUBCASE("cathode face only on pem shapes") {
    SceneSpec spec = air_box(0.1, 0.1, 0.1);
    spec.materials["copper"] = materials::copper();
    spec.shapes = {box("a", {0, 0, 0}, {0.01, 0.01, 0.01})};
    spec.shapes[0].cathode_face = Face::y_plus;
    CHECK_THROWS_AS(spec.validate(), ValidationError);
  }
  SUBCASE("declared gap must match the geometry") {
    presets::Geometry g;
    SceneSpec spec = presets::hess_scene(g);
    spec.gap = 0.010;
    CHECK_THROWS_AS(spec.validate(), ValidationError);
  }
}

TEST_CASE("syntax errors carry a position") {
  try {
    parse_scene("{\n  \"shapes\": [\n    {\"id\": }\n  ]\n}");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
    CHECK(e.column() > 1);
  }
}

TEST_CASE("missing scene file names the path") {
  CHECK_THROWS_WITH_AS(load_scene("/nonexistent/pack.scene"), doctest::Contains("/nonexistent/pack.scene"),
                       ValidationError);
}

TEST_CASE("scene text round trip") {
  for (const SceneSpec& spec : {presets::pack6_scene(), presets::pem_scene(), presets::hess_scene()}) {
    const SceneSpec back = parse_scene(scene_to_json(spec));
    REQUIRE(back.shapes.size() == spec.shapes.size());
    CHECK(scene_to_json(back) == scene_to_json(spec));
    const VoxelGrid a = voxelize(spec, 0.002);
    const VoxelGrid b = voxelize(back, 0.002);
    CHECK(a.dims == b.dims);
    CHECK(a.entity_id == b.entity_id);
  }
}

TEST_CASE("voxelized cylinder volume converges") {
  const SceneSpec spec = parse_scene(kOneCell);
  const double exact = std::numbers::pi * 0.0105 * 0.0105 * 0.07;
  CHECK(exact == doctest::Approx(2.42452413040792e-5).epsilon(1e-12));
  const double e4 = std::abs(voxelized_volume(spec, 0.004) - exact) / exact;
  const double e2 = std::abs(voxelized_volume(spec, 0.002) - exact) / exact;
  const double e1 = std::abs(voxelized_volume(spec, 0.001) - exact) / exact;
  CHECK(e2 < 0.05);
  CHECK(e2 < e4);
  CHECK(e1 < e2);
}

TEST_CASE("voxel grid invariants") {
  const SceneSpec spec = presets::hess_scene();
  const VoxelGrid g = voxelize(spec, 0.002);
  CHECK_NOTHROW(g.validate());
  const DomainBounds b = spec.bounds();
  for (int ax = 0; ax < 3; ++ax) {
    CHECK(g.origin[ax] <= b.min[ax] + 1e-12);
    CHECK(g.origin[ax] + g.dims[ax] * g.spacing >= b.max[ax] - 1e-12);
  }
  // Every voxel belongs to the shape containing its centre, else air.
  std::set<int> seen;
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const auto c = g.coords(idx);
    const Vec3 p = g.voxel_center(c[0], c[1], c[2]);
    int owner = kAirEntity;
    for (std::size_t s = 0; s < spec.shapes.size(); ++s) {
      if (spec.shapes[s].contains(p)) owner = static_cast<int>(s);
    }
    CHECK(g.entity_id[idx] == owner);
    CHECK(g.temperature[idx] == spec.ambient_temperature);
    seen.insert(g.entity_id[idx]);
  }
  CHECK(seen.size() == spec.shapes.size() + 1);
}

TEST_CASE("voxelize rejects unusable spacing") {
  const SceneSpec spec = parse_scene(kOneCell);
  CHECK_THROWS_AS(voxelize(spec, 0.0), ValidationError);
  CHECK_THROWS_AS(voxelize(spec, 0.01), ValidationError);  // coarser than a quarter of the radius
  VoxelizeOptions tight;
  tight.max_voxels = 1000;
  CHECK_THROWS_AS(voxelize(spec, 0.002, tight), ValidationError);
}

TEST_CASE("pem removal keeps the grid") {
  const SceneSpec hybrid = presets::hess_scene();
  const SceneSpec solo = without_pem(hybrid);
  CHECK(solo.shapes.size() == hybrid.shapes.size() - 1);
  const VoxelGrid a = voxelize(hybrid, 0.002);
  const VoxelGrid b = voxelize(solo, 0.002);
  CHECK(a.dims == b.dims);
  CHECK(a.origin == b.origin);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.entity_id[i] < 3) CHECK(a.entity_id[i] == b.entity_id[i]);
  }
}

TEST_CASE("boundary tagging") {
  SUBCASE("lone box, convective outer faces") {
    SceneSpec spec = air_box(0.04, 0.04, 0.04);
    spec.materials["copper"] = materials::copper();
    spec.shapes = {box("b", {0.01, 0.01, 0.01}, {0.02, 0.02, 0.02})};
    const VoxelGrid g = voxelize(spec, 0.002);
    const BoundaryMap m = tag_boundaries(spec, g, 50.0, spec.ambient_temperature);
    const std::size_t nx = g.dims[0], ny = g.dims[1], nz = g.dims[2];
    const std::size_t outer = 2 * (nx * ny + ny * nz + nx * nz);
    CHECK(m.count(FaceKind::convective) == outer);
    CHECK(m.count(FaceKind::adiabatic) == 0);
    for (const auto& f : m.faces) CHECK(f.h == 50.0);
    CHECK(m.warnings.empty());
  }
  SUBCASE("h = 0 makes every face adiabatic") {
    SceneSpec spec = air_box(0.04, 0.04, 0.04);
    const VoxelGrid g = voxelize(spec, 0.002);
    const BoundaryMap m = tag_boundaries(spec, g, 0.0, spec.ambient_temperature);
    CHECK(m.count(FaceKind::convective) == 0);
    CHECK(m.count(FaceKind::adiabatic) == m.faces.size());
  }
  SUBCASE("4 x 5 x 6 grid has 148 outer faces") {
    SceneSpec spec = air_box(0.008, 0.010, 0.012);
    const VoxelGrid g = voxelize(spec, 0.002);
    REQUIRE(g.dims == std::array<int, 3>{4, 5, 6});
    CHECK(tag_boundaries(spec, g, 50.0, 298.15).faces.size() == 148);
    CHECK(outer_boundary(g, 50.0, 298.15).faces.size() == 148);
  }
  SUBCASE("tagged shapes expose faces toward air") {
    SceneSpec spec = air_box(0.04, 0.04, 0.04);
    spec.materials["copper"] = materials::copper();
    spec.shapes = {box("b", {0.01, 0.01, 0.01}, {0.02, 0.02, 0.02})};
    spec.shapes[0].boundary_tag = BoundaryTag::convective;
    const VoxelGrid g = voxelize(spec, 0.002);
    const BoundaryMap m = tag_boundaries(spec, g, 50.0, spec.ambient_temperature);
    const std::size_t outer = 2 * (20 * 20 * 3);
    CHECK(m.count(FaceKind::convective) == outer + 6 * 10 * 10);
  }
  SUBCASE("pem exposes only its cathode face") {
    SceneSpec spec = presets::pem_scene();
    const VoxelGrid g = voxelize(spec, 0.002);
    const BoundaryMap m = tag_boundaries(spec, g, 50.0, spec.ambient_temperature);
    std::size_t shape_faces = 0;
    for (const auto& f : m.faces) {
      if (g.entity_id[f.voxel] == 0) {
        ++shape_faces;
        CHECK(f.face == Face::y_plus);
      }
    }
    CHECK(shape_faces == 50 * 10);
  }
  SUBCASE("buried tagged shape warns") {
    SceneSpec spec = air_box(0.04, 0.04, 0.04);
    spec.materials["copper"] = materials::copper();
    spec.shapes = {box("outer", {0.0, 0.0, 0.0}, {0.04, 0.04, 0.04})};
    spec.shapes[0].boundary_tag = BoundaryTag::convective;
    const VoxelGrid g = voxelize(spec, 0.002);
    CHECK(tag_boundaries(spec, g, 50.0, 298.15).warnings.size() == 1);
  }
}

TEST_CASE("face names") {
  for (Face f : {Face::x_minus, Face::x_plus, Face::y_minus, Face::y_plus, Face::z_minus, Face::z_plus}) {
    CHECK(parse_face(face_name(f)) == f);
  }
  CHECK_FALSE(parse_face("up").has_value());
}
