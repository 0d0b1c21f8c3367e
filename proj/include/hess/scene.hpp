#pragma once

// Declarative scene description and its rasterization onto a uniform voxel grid.

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace hess {

constexpr double kCelsiusOffset = 273.15;

inline double celsius_to_kelvin(double c) { return c + kCelsiusOffset; }
inline double kelvin_to_celsius(double k) { return k - kCelsiusOffset; }

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double operator[](int axis) const { return axis == 0 ? x : (axis == 1 ? y : z); }
  double& operator[](int axis) { return axis == 0 ? x : (axis == 1 ? y : z); }
  friend bool operator==(const Vec3&, const Vec3&) = default;
};

enum class Axis : std::uint8_t { x = 0, y = 1, z = 2 };

// Grid face directions. Order matches the (axis, sign) pairs used by the solver.
enum class Face : std::uint8_t { x_minus, x_plus, y_minus, y_plus, z_minus, z_plus };

inline int face_axis(Face f) { return static_cast<int>(f) / 2; }
inline int face_sign(Face f) { return (static_cast<int>(f) % 2) == 0 ? -1 : 1; }
std::string_view face_name(Face f);
std::optional<Face> parse_face(std::string_view text);

enum class BoundaryTag : std::uint8_t { none, convective };
enum class SourceKind : std::uint8_t { none, battery, pem };

struct Material {
  std::string name;
  double density = 0.0;        // kg/m^3
  double specific_heat = 0.0;  // J/(kg K)
  double conductivity = 0.0;   // W/(m K)

  double volumetric_heat_capacity() const { return density * specific_heat; }
  double diffusivity() const { return conductivity / (density * specific_heat); }
};

// Default material presets used by the shipped scenes.
namespace materials {
Material battery_cell();
Material copper();
Material pem_composite();
Material air();
}  // namespace materials

// Axis-aligned cylinder; `center` is the midpoint of the axis segment.
struct Cylinder {
  Vec3 center;
  double radius = 0.0;
  double height = 0.0;
  Axis axis = Axis::z;
};

struct Box {
  Vec3 min_corner;
  Vec3 extents;
};

// Points closer than this to a shape surface count as outside, so voxel
// centres lying on a face are classified the same way on every side.
inline constexpr double kSurfaceTolerance = 1e-9;  // m

struct Shape {
  std::string id;
  std::variant<Cylinder, Box> geometry;
  std::string material;
  BoundaryTag boundary_tag = BoundaryTag::none;
  SourceKind source = SourceKind::none;
  // PEM only: the cathode cover plate. It carries the convective tag and the
  // larger share of the generated heat.
  std::optional<Face> cathode_face;

  bool contains(const Vec3& p) const;
  Vec3 bbox_min() const;
  Vec3 bbox_max() const;
  double volume() const;
  double smallest_dimension() const;
};

struct DomainBounds {
  Vec3 min;
  Vec3 max;
};

struct SceneSpec {
  std::vector<Shape> shapes;
  std::map<std::string, Material> materials;
  double ambient_temperature = celsius_to_kelvin(25.0);  // K
  double domain_margin = 0.03;                           // m
  double spacing = 0.002;                                // m, default grid spacing
  std::optional<double> gap;                             // declared battery-to-PEM gap, m
  // Explicit air-block bounds; when absent the block is the shapes' bounding
  // box padded by domain_margin.
  std::optional<DomainBounds> domain;

  const Shape* find_shape(std::string_view id) const;
  DomainBounds bounds() const;
  void validate() const;
};

// Parses a scene file (JSON text). Throws ParseError on syntax errors and
// ValidationError on any violated invariant.
SceneSpec parse_scene(std::string_view text);
SceneSpec load_scene(const std::string& path);
std::string scene_to_json(const SceneSpec& spec);

// Returns a copy with every PEM-attached shape removed while keeping the air
// block of the original, so the result voxelizes onto an identical grid.
SceneSpec without_pem(const SceneSpec& spec);

constexpr int kAirEntity = -1;

struct VoxelGrid {
  std::array<int, 3> dims{0, 0, 0};
  double spacing = 0.0;
  Vec3 origin;  // minimum corner of the grid
  std::vector<Material> materials;
  std::vector<std::uint8_t> material_id;
  std::vector<double> temperature;  // K
  std::vector<int> entity_id;       // shape index into SceneSpec::shapes, or kAirEntity

  std::size_t size() const {
    return static_cast<std::size_t>(dims[0]) * static_cast<std::size_t>(dims[1]) *
           static_cast<std::size_t>(dims[2]);
  }
  std::size_t index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(dims[0]) *
               (static_cast<std::size_t>(j) + static_cast<std::size_t>(dims[1]) * k);
  }
  std::array<int, 3> coords(std::size_t idx) const;
  Vec3 voxel_center(int i, int j, int k) const;
  double voxel_volume() const { return spacing * spacing * spacing; }
  const Material& material_at(std::size_t idx) const { return materials[material_id[idx]]; }
  void validate() const;
};

struct VoxelizeOptions {
  std::size_t max_voxels = 20'000'000;
};

VoxelGrid voxelize(const SceneSpec& spec, double spacing, const VoxelizeOptions& options = {});

enum class FaceKind : std::uint8_t { adiabatic, convective };

struct BoundaryFace {
  std::size_t voxel = 0;
  Face face = Face::x_minus;
  FaceKind kind = FaceKind::adiabatic;
  double h = 0.0;          // W/(m^2 K)
  double t_ambient = 0.0;  // K
};

// Boundary faces of the thermal problem. Faces on the outer grid boundary
// replace the missing neighbour; faces on a shape surface add a convective
// loss on top of conduction into the adjacent air.
struct BoundaryMap {
  std::vector<BoundaryFace> faces;
  std::vector<std::string> warnings;

  std::size_t count(FaceKind kind) const;
};

BoundaryMap tag_boundaries(const SceneSpec& spec, const VoxelGrid& grid, double h,
                           double t_ambient);

// Convective faces on every outer face of the grid; used by tests and small setups.
BoundaryMap outer_boundary(const VoxelGrid& grid, double h, double t_ambient);

}  // namespace hess
