#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace texprint {

using Vec3 = Eigen::Vector3d;
using Vec2 = Eigen::Vector2d;
using Face = std::array<int, 3>;

enum class FaceTag : std::uint8_t { Untouched = 0, TextureInterior = 1, TextureWall = 2 };

// Undirected edge key with lo < hi.
struct EdgeKey {
  int lo = 0;
  int hi = 0;

  EdgeKey() = default;
  EdgeKey(int a, int b) : lo(a < b ? a : b), hi(a < b ? b : a) {}

  friend bool operator==(const EdgeKey&, const EdgeKey&) = default;
  friend auto operator<=>(const EdgeKey&, const EdgeKey&) = default;
};

struct EdgeKeyHash {
  std::size_t operator()(const EdgeKey& e) const noexcept {
    return std::hash<std::uint64_t>{}((static_cast<std::uint64_t>(static_cast<std::uint32_t>(e.lo)) << 32) |
                                      static_cast<std::uint32_t>(e.hi));
  }
};

// Incidence of one undirected edge: up to the faces that use it, with the
// direction each face traverses it (true when the face goes lo -> hi).
struct EdgeIncidence {
  EdgeKey key;
  std::vector<int> faces;
  std::vector<bool> forward;
};

// Indexed triangle mesh. Positions are millimeters. Values are treated as
// immutable snapshots: operations build new meshes instead of editing.
class TriMesh {
 public:
  TriMesh() = default;
  TriMesh(std::vector<Vec3> positions, std::vector<Face> faces, std::vector<FaceTag> tags = {});

  const std::vector<Vec3>& positions() const { return positions_; }
  const std::vector<Face>& faces() const { return faces_; }
  const std::vector<FaceTag>& tags() const { return tags_; }

  std::size_t vertex_count() const { return positions_.size(); }
  std::size_t face_count() const { return faces_.size(); }
  bool empty() const { return faces_.empty(); }

  const Vec3& position(int v) const { return positions_[static_cast<std::size_t>(v)]; }
  const Face& face(int f) const { return faces_[static_cast<std::size_t>(f)]; }
  FaceTag tag(int f) const { return tags_[static_cast<std::size_t>(f)]; }

  // Sorted by edge key; built on demand, never cached across meshes.
  std::vector<EdgeIncidence> edges() const;

  Vec3 face_normal(int f) const;  // unit; zero vector for degenerate faces
  double face_area(int f) const;
  double surface_area() const;
  // Sum of signed tetrahedron volumes against the origin; positive for a
  // closed, outward-oriented mesh.
  double signed_volume() const;
  double bbox_diagonal() const;
  std::pair<Vec3, Vec3> bbox() const;

  TriMesh with_tags(std::vector<FaceTag> tags) const;

 private:
  std::vector<Vec3> positions_;
  std::vector<Face> faces_;
  std::vector<FaceTag> tags_;
};

// Throws InvalidInput when an index is out of range or a face repeats a vertex.
void validate_indices(std::span<const Vec3> positions, std::span<const Face> faces);

struct WatertightReport {
  bool is_closed = false;
  std::size_t boundary_edge_count = 0;
  std::size_t nonmanifold_edge_count = 0;
  std::size_t inconsistent_winding_pairs = 0;
  long euler_characteristic = 0;
};

WatertightReport check_watertight(const TriMesh& mesh);

// Angle-weighted vertex normals. Throws GeometryError naming the vertex when
// every incident face is degenerate.
std::vector<Vec3> vertex_normals(const TriMesh& mesh);

// Per-vertex one-ring (sorted, unique neighbour indices).
std::vector<std::vector<int>> vertex_neighbors(const TriMesh& mesh);
std::vector<std::vector<int>> vertex_faces(const TriMesh& mesh);

// Number of edge-connected face components.
int connected_components(const TriMesh& mesh, std::vector<int>* face_component = nullptr);

// Interior angle of face f at its corner c (0..2).
double corner_angle(const TriMesh& mesh, int f, int c);

// Closest point on the surface; returns face index and the point.
struct SurfacePoint {
  int face = -1;
  Vec3 point = Vec3::Zero();
  double distance = 0.0;
};
SurfacePoint closest_point(const TriMesh& mesh, const Vec3& query);
Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

// ---- I/O -------------------------------------------------------------------

enum class MeshFormat { Obj, Stl };
enum class ExportFormat { StlBinary, Obj };

inline constexpr double kStlWeldTolerance = 1e-6;

TriMesh load_mesh(std::span<const std::uint8_t> bytes, MeshFormat format);
TriMesh load_mesh_file(const std::string& path);
std::vector<std::uint8_t> export_mesh(const TriMesh& mesh, ExportFormat format);
void write_file(const std::string& path, std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> read_file(const std::string& path);

// Guess from extension (.obj / .stl), case-insensitive.
std::optional<MeshFormat> format_from_path(std::string_view path);

}  // namespace texprint
