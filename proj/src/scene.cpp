#include "hess/scene.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "hess/error.hpp"
#include "json_fields.hpp"

namespace hess {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, 6> kFaceNames = {"-x", "+x", "-y", "+y", "-z", "+z"};

std::string axis_name(Axis a) {
  switch (a) {
    case Axis::x: return "x";
    case Axis::y: return "y";
    case Axis::z: return "z";
  }
  return "z";
}

const detail::FieldReader reader("parse_scene");

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  reader.fail(path, message);
}

Axis parse_axis(const std::string& text, const std::string& path) {
  if (text == "x") return Axis::x;
  if (text == "y") return Axis::y;
  if (text == "z") return Axis::z;
  fail(path, "unknown axis '" + text + "'");
}

Material parse_material(const std::string& name, const json& obj, const std::string& path) {
  if (!obj.is_object()) fail(path, "expected an object");
  Material m{name, reader.number(obj, "density", path), reader.number(obj, "specific_heat", path),
             reader.number(obj, "conductivity", path)};
  return m;
}

Shape parse_shape(const json& obj, const std::string& path) {
  if (!obj.is_object()) fail(path, "expected an object");
  Shape s;
  s.id = reader.string(obj, "id", path);
  s.material = reader.string(obj, "material", path);

  const std::string kind = reader.string(obj, "kind", path);
  if (!obj.contains("geometry") || !obj.at("geometry").is_object()) {
    fail(path + ".geometry", "missing geometry object");
  }
  const json& g = obj.at("geometry");
  const std::string gpath = path + ".geometry";
  if (kind == "cylinder") {
    Cylinder c;
    c.center = reader.vec3(g, "center", gpath);
    c.radius = reader.number(g, "radius", gpath);
    c.height = reader.number(g, "height", gpath);
    c.axis = parse_axis(reader.string_or(g, "axis", gpath, "z"), gpath + ".axis");
    s.geometry = c;
  } else if (kind == "box") {
    Box b;
    b.min_corner = reader.vec3(g, "min", gpath);
    b.extents = reader.vec3(g, "extents", gpath);
    s.geometry = b;
  } else {
    fail(path + ".kind", "unknown shape kind '" + kind + "'");
  }

  const std::string tag = reader.string_or(obj, "boundary_tag", path, "none");
  if (tag == "none") {
    s.boundary_tag = BoundaryTag::none;
  } else if (tag == "convective") {
    s.boundary_tag = BoundaryTag::convective;
  } else {
    fail(path + ".boundary_tag", "unknown boundary tag '" + tag + "'");
  }

  const std::string source = reader.string_or(obj, "source", path, "none");
  if (source == "none") {
    s.source = SourceKind::none;
  } else if (source == "battery") {
    s.source = SourceKind::battery;
  } else if (source == "pem") {
    s.source = SourceKind::pem;
  } else {
    fail(path + ".source", "unknown source attachment '" + source + "'");
  }

  if (obj.contains("cathode_face")) {
    const std::string face = reader.string(obj, "cathode_face", path);
    auto f = parse_face(face);
    if (!f) fail(path + ".cathode_face", "expected one of -x,+x,-y,+y,-z,+z");
    s.cathode_face = *f;
  }
  return s;
}

bool intervals_overlap(double a0, double a1, double b0, double b1) {
  return std::min(a1, b1) - std::max(a0, b0) > 1e-12;
}

// True when the two shapes share a region of positive volume.
bool shapes_overlap(const Shape& a, const Shape& b) {
  const Vec3 amin = a.bbox_min(), amax = a.bbox_max();
  const Vec3 bmin = b.bbox_min(), bmax = b.bbox_max();
  for (int ax = 0; ax < 3; ++ax) {
    if (!intervals_overlap(amin[ax], amax[ax], bmin[ax], bmax[ax])) return false;
  }
  if (std::holds_alternative<Box>(a.geometry) && std::holds_alternative<Box>(b.geometry)) {
    return true;
  }
  if (std::holds_alternative<Cylinder>(a.geometry) && std::holds_alternative<Cylinder>(b.geometry)) {
    const auto& ca = std::get<Cylinder>(a.geometry);
    const auto& cb = std::get<Cylinder>(b.geometry);
    if (ca.axis == cb.axis) {
      const int ax = static_cast<int>(ca.axis);
      double d2 = 0.0;
      for (int k = 0; k < 3; ++k) {
        if (k == ax) continue;
        const double d = ca.center[k] - cb.center[k];
        d2 += d * d;
      }
      const double reach = ca.radius + cb.radius;
      return std::sqrt(d2) < reach - 1e-12;
    }
  }
  // Mixed pairs: sample the bounding-box intersection at cell midpoints.
  constexpr int kSamples = 48;
  Vec3 lo, hi;
  for (int ax = 0; ax < 3; ++ax) {
    lo[ax] = std::max(amin[ax], bmin[ax]);
    hi[ax] = std::min(amax[ax], bmax[ax]);
  }
  for (int k = 0; k < kSamples; ++k) {
    for (int j = 0; j < kSamples; ++j) {
      for (int i = 0; i < kSamples; ++i) {
        const Vec3 p{lo.x + (i + 0.5) * (hi.x - lo.x) / kSamples,
                     lo.y + (j + 0.5) * (hi.y - lo.y) / kSamples,
                     lo.z + (k + 0.5) * (hi.z - lo.z) / kSamples};
        if (a.contains(p) && b.contains(p)) return true;
      }
    }
  }
  return false;
}

DomainBounds union_bounds(const std::vector<const Shape*>& shapes) {
  DomainBounds b{{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
                  std::numeric_limits<double>::infinity()},
                 {-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
                  -std::numeric_limits<double>::infinity()}};
  for (const Shape* s : shapes) {
    const Vec3 lo = s->bbox_min(), hi = s->bbox_max();
    for (int ax = 0; ax < 3; ++ax) {
      b.min[ax] = std::min(b.min[ax], lo[ax]);
      b.max[ax] = std::max(b.max[ax], hi[ax]);
    }
  }
  return b;
}

json vec3_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

}  // namespace

std::string_view face_name(Face f) { return kFaceNames[static_cast<std::size_t>(f)]; }

std::optional<Face> parse_face(std::string_view text) {
  for (std::size_t i = 0; i < kFaceNames.size(); ++i) {
    if (kFaceNames[i] == text) return static_cast<Face>(i);
  }
  return std::nullopt;
}

namespace materials {
Material battery_cell() { return {"battery", 2700.0, 900.0, 3.0}; }
Material copper() { return {"copper", 8960.0, 385.0, 400.0}; }
Material pem_composite() { return {"pem", 2000.0, 1000.0, 20.0}; }
Material air() { return {"air", 1.2, 1005.0, 0.026}; }
}  // namespace materials

bool Shape::contains(const Vec3& p) const {
  if (const auto* c = std::get_if<Cylinder>(&geometry)) {
    const int ax = static_cast<int>(c->axis);
    if (!(std::abs(p[ax] - c->center[ax]) < 0.5 * c->height - kSurfaceTolerance)) return false;
    double r2 = 0.0;
    for (int k = 0; k < 3; ++k) {
      if (k == ax) continue;
      const double d = p[k] - c->center[k];
      r2 += d * d;
    }
    const double r = c->radius - kSurfaceTolerance;
    return r2 < r * r;
  }
  const auto& b = std::get<Box>(geometry);
  for (int ax = 0; ax < 3; ++ax) {
    if (!(p[ax] > b.min_corner[ax] + kSurfaceTolerance &&
          p[ax] < b.min_corner[ax] + b.extents[ax] - kSurfaceTolerance)) {
      return false;
    }
  }
  return true;
}

Vec3 Shape::bbox_min() const {
  if (const auto* c = std::get_if<Cylinder>(&geometry)) {
    Vec3 lo = c->center;
    for (int k = 0; k < 3; ++k) {
      lo[k] -= (k == static_cast<int>(c->axis)) ? 0.5 * c->height : c->radius;
    }
    return lo;
  }
  return std::get<Box>(geometry).min_corner;
}

Vec3 Shape::bbox_max() const {
  if (const auto* c = std::get_if<Cylinder>(&geometry)) {
    Vec3 hi = c->center;
    for (int k = 0; k < 3; ++k) {
      hi[k] += (k == static_cast<int>(c->axis)) ? 0.5 * c->height : c->radius;
    }
    return hi;
  }
  const auto& b = std::get<Box>(geometry);
  return {b.min_corner.x + b.extents.x, b.min_corner.y + b.extents.y, b.min_corner.z + b.extents.z};
}

double Shape::volume() const {
  if (const auto* c = std::get_if<Cylinder>(&geometry)) {
    return M_PI * c->radius * c->radius * c->height;
  }
  const auto& b = std::get<Box>(geometry);
  return b.extents.x * b.extents.y * b.extents.z;
}

double Shape::smallest_dimension() const {
  if (const auto* c = std::get_if<Cylinder>(&geometry)) {
    return std::min(2.0 * c->radius, c->height);
  }
  const auto& e = std::get<Box>(geometry).extents;
  return std::min({e.x, e.y, e.z});
}

const Shape* SceneSpec::find_shape(std::string_view id) const {
  for (const auto& s : shapes) {
    if (s.id == id) return &s;
  }
  return nullptr;
}

DomainBounds SceneSpec::bounds() const {
  if (domain) return *domain;
  if (shapes.empty()) {
    return {{-domain_margin, -domain_margin, -domain_margin},
            {domain_margin, domain_margin, domain_margin}};
  }
  std::vector<const Shape*> all;
  for (const auto& s : shapes) all.push_back(&s);
  DomainBounds b = union_bounds(all);
  for (int ax = 0; ax < 3; ++ax) {
    b.min[ax] -= domain_margin;
    b.max[ax] += domain_margin;
  }
  return b;
}

void SceneSpec::validate() const {
  if (!(ambient_temperature > 0.0) || !std::isfinite(ambient_temperature)) {
    throw ValidationError("scene: ambient temperature must be > 0 K");
  }
  if (!(domain_margin >= 0.0)) throw ValidationError("scene: margin_m must be >= 0");
  if (!(spacing > 0.0)) throw ValidationError("scene: spacing_m must be > 0");
  if (materials.size() > 255) throw ValidationError("scene: at most 255 materials are supported");
  for (const auto& [name, m] : materials) {
    if (!(m.density > 0.0) || !(m.specific_heat > 0.0) || !(m.conductivity > 0.0)) {
      throw ValidationError("scene: material '" + name + "' must have positive density, "
                            "specific_heat and conductivity");
    }
  }
  if (!materials.contains("air")) throw ValidationError("scene: material 'air' is not declared");

  std::set<std::string> ids;
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    const Shape& s = shapes[i];
    const std::string where = "scene: shape '" + s.id + "'";
    if (s.id.empty()) throw ValidationError("scene: shapes[" + std::to_string(i) + "] has an empty id");
    if (!ids.insert(s.id).second) throw ValidationError(where + ": duplicate id");
    if (!materials.contains(s.material)) {
      throw ValidationError(where + ": unknown material '" + s.material + "'");
    }
    if (const auto* c = std::get_if<Cylinder>(&s.geometry)) {
      if (!(c->radius > 0.0) || !(c->height > 0.0)) {
        throw ValidationError(where + ": radius and height must be > 0");
      }
    } else {
      const auto& e = std::get<Box>(s.geometry).extents;
      if (!(e.x > 0.0) || !(e.y > 0.0) || !(e.z > 0.0)) {
        throw ValidationError(where + ": extents must be > 0 componentwise");
      }
    }
    if (s.cathode_face && s.source != SourceKind::pem) {
      throw ValidationError(where + ": cathode_face is only valid on pem-attached shapes");
    }
  }

  for (std::size_t i = 0; i < shapes.size(); ++i) {
    for (std::size_t j = i + 1; j < shapes.size(); ++j) {
      if (shapes_overlap(shapes[i], shapes[j])) {
        throw ValidationError("scene: shapes '" + shapes[i].id + "' and '" + shapes[j].id +
                              "' overlap");
      }
    }
  }

  if (domain) {
    for (int ax = 0; ax < 3; ++ax) {
      if (!(domain->max[ax] > domain->min[ax])) throw ValidationError("scene: empty domain bounds");
    }
  }

  if (gap) {
    std::vector<const Shape*> cells, pems;
    for (const auto& s : shapes) {
      if (s.source == SourceKind::battery) cells.push_back(&s);
      if (s.source == SourceKind::pem) pems.push_back(&s);
    }
    if (cells.empty() || pems.empty()) {
      throw ValidationError("scene: gap_m declared but the scene lacks battery or pem shapes");
    }
    const DomainBounds b = union_bounds(cells);
    const DomainBounds p = union_bounds(pems);
    double separation = -std::numeric_limits<double>::infinity();
    for (int ax = 0; ax < 3; ++ax) {
      separation = std::max({separation, p.min[ax] - b.max[ax], b.min[ax] - p.max[ax]});
    }
    if (std::abs(separation - *gap) > 1e-9) {
      std::ostringstream os;
      os << "scene: declared gap_m " << *gap << " does not match the geometry (" << separation
         << " m)";
      throw ValidationError(os.str());
    }
  }
}

SceneSpec parse_scene(std::string_view text) {
  const json root = detail::parse_json_text(text, "parse_scene");
  if (!root.is_object()) throw ParseError("parse_scene: top level must be an object", 1, 1);

  SceneSpec spec;
  spec.ambient_temperature = celsius_to_kelvin(reader.number_or(root, "ambient_c", "", 25.0));
  spec.domain_margin = reader.number_or(root, "margin_m", "", 0.03);
  spec.spacing = reader.number_or(root, "spacing_m", "", 0.002);
  if (root.contains("gap_m")) spec.gap = reader.number(root, "gap_m", "");

  if (root.contains("materials")) {
    const json& mats = root.at("materials");
    if (!mats.is_object()) fail("materials", "expected an object");
    for (const auto& [name, value] : mats.items()) {
      spec.materials.emplace(name, parse_material(name, value, "materials." + name));
    }
  }
  if (!spec.materials.contains("air")) spec.materials.emplace("air", materials::air());

  if (root.contains("shapes")) {
    const json& shapes = root.at("shapes");
    if (!shapes.is_array()) fail("shapes", "expected an array");
    for (std::size_t i = 0; i < shapes.size(); ++i) {
      spec.shapes.push_back(parse_shape(shapes[i], "shapes[" + std::to_string(i) + "]"));
    }
  }

  if (root.contains("domain")) {
    const json& d = root.at("domain");
    if (!d.is_object()) fail("domain", "expected an object");
    spec.domain = DomainBounds{reader.vec3(d, "min", "domain"), reader.vec3(d, "max", "domain")};
  }

  spec.validate();
  return spec;
}

SceneSpec load_scene(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open scene file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_scene(buf.str());
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what(), e.line(), e.column());
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

std::string scene_to_json(const SceneSpec& spec) {
  nlohmann::ordered_json root;
  root["ambient_c"] = kelvin_to_celsius(spec.ambient_temperature);
  root["margin_m"] = spec.domain_margin;
  root["spacing_m"] = spec.spacing;
  if (spec.gap) root["gap_m"] = *spec.gap;
  if (spec.domain) {
    root["domain"] = {{"min", vec3_json(spec.domain->min)}, {"max", vec3_json(spec.domain->max)}};
  }
  nlohmann::ordered_json mats = nlohmann::ordered_json::object();
  for (const auto& [name, m] : spec.materials) {
    mats[name] = {{"density", m.density},
                  {"specific_heat", m.specific_heat},
                  {"conductivity", m.conductivity}};
  }
  root["materials"] = mats;
  nlohmann::ordered_json shapes = nlohmann::ordered_json::array();
  for (const auto& s : spec.shapes) {
    nlohmann::ordered_json js;
    js["id"] = s.id;
    if (const auto* c = std::get_if<Cylinder>(&s.geometry)) {
      js["kind"] = "cylinder";
      js["geometry"] = {{"center", vec3_json(c->center)},
                        {"radius", c->radius},
                        {"height", c->height},
                        {"axis", axis_name(c->axis)}};
    } else {
      const auto& b = std::get<Box>(s.geometry);
      js["kind"] = "box";
      js["geometry"] = {{"min", vec3_json(b.min_corner)}, {"extents", vec3_json(b.extents)}};
    }
    js["material"] = s.material;
    js["boundary_tag"] = s.boundary_tag == BoundaryTag::convective ? "convective" : "none";
    js["source"] = s.source == SourceKind::battery ? "battery"
                   : s.source == SourceKind::pem   ? "pem"
                                                   : "none";
    if (s.cathode_face) js["cathode_face"] = std::string(face_name(*s.cathode_face));
    shapes.push_back(std::move(js));
  }
  root["shapes"] = shapes;
  return root.dump(2) + "\n";
}

SceneSpec without_pem(const SceneSpec& spec) {
  SceneSpec out = spec;
  out.domain = spec.bounds();
  out.gap.reset();
  std::erase_if(out.shapes, [](const Shape& s) { return s.source == SourceKind::pem; });
  return out;
}

std::array<int, 3> VoxelGrid::coords(std::size_t idx) const {
  const auto nx = static_cast<std::size_t>(dims[0]);
  const auto ny = static_cast<std::size_t>(dims[1]);
  return {static_cast<int>(idx % nx), static_cast<int>((idx / nx) % ny),
          static_cast<int>(idx / (nx * ny))};
}

// Measured from the grid centre so that mirrored voxels get exactly negated
// offsets.
Vec3 VoxelGrid::voxel_center(int i, int j, int k) const {
  const std::array<int, 3> c{i, j, k};
  Vec3 p;
  for (int ax = 0; ax < 3; ++ax) {
    const double mid = origin[ax] + 0.5 * dims[ax] * spacing;
    p[ax] = mid + (static_cast<double>(c[ax]) - 0.5 * (dims[ax] - 1)) * spacing;
  }
  return p;
}

void VoxelGrid::validate() const {
  for (int ax = 0; ax < 3; ++ax) {
    if (dims[ax] < 3) throw ValidationError("voxel grid: every dimension must be >= 3");
  }
  const std::size_t n = size();
  if (material_id.size() != n || temperature.size() != n || entity_id.size() != n) {
    throw ValidationError("voxel grid: field sizes do not match dims");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (material_id[i] >= materials.size()) {
      throw ValidationError("voxel grid: material id out of range at voxel " + std::to_string(i));
    }
    if (!std::isfinite(temperature[i]) || !(temperature[i] > 0.0)) {
      throw ValidationError("voxel grid: temperature must be finite and > 0 K at voxel " +
                            std::to_string(i));
    }
  }
}

VoxelGrid voxelize(const SceneSpec& spec, double spacing, const VoxelizeOptions& options) {
  if (!(spacing > 0.0)) throw ValidationError("voxelize: spacing must be > 0");
  for (const auto& s : spec.shapes) {
    if (spacing > 0.25 * s.smallest_dimension() * (1.0 + 1e-12)) {
      throw ValidationError("voxelize: spacing " + std::to_string(spacing) +
                            " m is too coarse for shape '" + s.id +
                            "' (must be <= 1/4 of its smallest dimension)");
    }
  }

  const DomainBounds b = spec.bounds();
  VoxelGrid grid;
  grid.spacing = spacing;
  Vec3 center;
  for (int ax = 0; ax < 3; ++ax) {
    const double extent = b.max[ax] - b.min[ax];
    const double cells = std::ceil(extent / spacing - 1e-9);
    if (!(cells < 1e9)) throw ValidationError("voxelize: grid dimension overflow");
    grid.dims[ax] = std::max(3, static_cast<int>(cells));
    center[ax] = 0.5 * (b.min[ax] + b.max[ax]);
    grid.origin[ax] = center[ax] - 0.5 * grid.dims[ax] * spacing;
  }
  const double total = static_cast<double>(grid.dims[0]) * grid.dims[1] * grid.dims[2];
  if (total > static_cast<double>(options.max_voxels)) {
    throw ValidationError("voxelize: grid of " + std::to_string(static_cast<long long>(total)) +
                          " voxels exceeds the cap of " + std::to_string(options.max_voxels));
  }

  std::map<std::string, std::uint8_t> ids;
  for (const auto& [name, m] : spec.materials) {
    ids[name] = static_cast<std::uint8_t>(grid.materials.size());
    grid.materials.push_back(m);
  }
  const std::uint8_t air = ids.at("air");

  const std::size_t n = grid.size();
  grid.material_id.assign(n, air);
  grid.entity_id.assign(n, kAirEntity);
  grid.temperature.assign(n, spec.ambient_temperature);

  std::vector<std::array<Vec3, 2>> boxes;
  for (const auto& s : spec.shapes) boxes.push_back({s.bbox_min(), s.bbox_max()});

  for (int k = 0; k < grid.dims[2]; ++k) {
    for (int j = 0; j < grid.dims[1]; ++j) {
      for (int i = 0; i < grid.dims[0]; ++i) {
        const Vec3 p = grid.voxel_center(i, j, k);
        const std::size_t idx = grid.index(i, j, k);
        for (std::size_t s = 0; s < spec.shapes.size(); ++s) {
          const auto& bb = boxes[s];
          if (p.x < bb[0].x || p.x > bb[1].x || p.y < bb[0].y || p.y > bb[1].y || p.z < bb[0].z ||
              p.z > bb[1].z) {
            continue;
          }
          if (!spec.shapes[s].contains(p)) continue;
          if (grid.entity_id[idx] != kAirEntity) {
            throw ValidationError("voxelize: shapes '" + spec.shapes[grid.entity_id[idx]].id +
                                  "' and '" + spec.shapes[s].id + "' share a voxel");
          }
          grid.entity_id[idx] = static_cast<int>(s);
          grid.material_id[idx] = ids.at(spec.shapes[s].material);
        }
      }
    }
  }
  return grid;
}

std::size_t BoundaryMap::count(FaceKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(faces.begin(), faces.end(), [&](const BoundaryFace& f) { return f.kind == kind; }));
}

namespace {

void check_convection(double h, double t_ambient) {
  if (!(h >= 0.0) || !std::isfinite(h)) throw ValidationError("tag_boundaries: h must be >= 0");
  if (!(t_ambient > 0.0)) throw ValidationError("tag_boundaries: ambient temperature must be > 0 K");
}

void append_outer_faces(const VoxelGrid& grid, double h, double t_ambient, BoundaryMap& map) {
  const FaceKind kind = h > 0.0 ? FaceKind::convective : FaceKind::adiabatic;
  const auto& d = grid.dims;
  for (int f = 0; f < 6; ++f) {
    const Face face = static_cast<Face>(f);
    const int axis = face_axis(face);
    const int plane = face_sign(face) < 0 ? 0 : d[axis] - 1;
    for (int k = 0; k < d[2]; ++k) {
      for (int j = 0; j < d[1]; ++j) {
        for (int i = 0; i < d[0]; ++i) {
          const std::array<int, 3> c{i, j, k};
          if (c[axis] != plane) continue;
          map.faces.push_back({grid.index(i, j, k), face, kind, h, t_ambient});
        }
      }
    }
  }
}

}  // namespace

BoundaryMap outer_boundary(const VoxelGrid& grid, double h, double t_ambient) {
  check_convection(h, t_ambient);
  BoundaryMap map;
  append_outer_faces(grid, h, t_ambient, map);
  return map;
}

BoundaryMap tag_boundaries(const SceneSpec& spec, const VoxelGrid& grid, double h,
                           double t_ambient) {
  check_convection(h, t_ambient);
  BoundaryMap map;
  append_outer_faces(grid, h, t_ambient, map);

  const FaceKind kind = h > 0.0 ? FaceKind::convective : FaceKind::adiabatic;
  std::vector<std::size_t> exposed(spec.shapes.size(), 0);
  const auto& d = grid.dims;
  for (int k = 0; k < d[2]; ++k) {
    for (int j = 0; j < d[1]; ++j) {
      for (int i = 0; i < d[0]; ++i) {
        const std::size_t idx = grid.index(i, j, k);
        const int e = grid.entity_id[idx];
        if (e == kAirEntity) continue;
        const Shape& shape = spec.shapes[static_cast<std::size_t>(e)];
        if (shape.boundary_tag != BoundaryTag::convective) continue;
        for (int f = 0; f < 6; ++f) {
          const Face face = static_cast<Face>(f);
          if (shape.cathode_face && *shape.cathode_face != face) continue;
          std::array<int, 3> nb{i, j, k};
          nb[face_axis(face)] += face_sign(face);
          const int axis = face_axis(face);
          if (nb[axis] < 0 || nb[axis] >= d[axis]) continue;  // already an outer face
          if (grid.entity_id[grid.index(nb[0], nb[1], nb[2])] != kAirEntity) continue;
          map.faces.push_back({idx, face, kind, h, t_ambient});
          ++exposed[static_cast<std::size_t>(e)];
        }
      }
    }
  }
  for (std::size_t s = 0; s < spec.shapes.size(); ++s) {
    if (spec.shapes[s].boundary_tag == BoundaryTag::convective && exposed[s] == 0) {
      map.warnings.push_back("tag_boundaries: convective shape '" + spec.shapes[s].id +
                             "' has no exposed faces");
    }
  }
  return map;
}

}  // namespace hess

namespace hess::detail {

json parse_json_text(std::string_view text, const std::string& who) {
  try {
    return json::parse(text.begin(), text.end(), nullptr, true, true);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, column = 1;
    const std::size_t offset = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < offset; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ParseError(who + ": syntax error at line " + std::to_string(line) + ", column " +
                         std::to_string(column) + ": " + e.what(),
                     line, column);
  }
}

}  // namespace hess::detail
