#pragma once

#include <array>
#include <optional>
#include <vector>

#include "texprint/error.hpp"
#include "texprint/mesh.hpp"

namespace texprint {

using UVTriangle = std::array<Vec2, 3>;

// A flattening of a mesh into the plane. Face f of the chart belongs to face
// f of the mesh it was computed for; coordinates are in millimetres.
struct UVChart {
  std::vector<UVTriangle> uv;
  std::vector<EdgeKey> seam_edges;        // mesh edges split by cutting, sorted
  std::vector<double> area_distortion;    // per face |area_uv / area_3d - 1|
  double max_distortion = 0.0;
  double raw_area_ratio = 1.0;            // uv / 3d area before calibration
  std::vector<double> energy_history;     // ARAP energy per iteration

  std::size_t face_count() const { return uv.size(); }
  double signed_area(int f) const;
};

// Raised when the converged chart still contains inverted triangles.
class FlipError : public GeometryError {
 public:
  FlipError(const std::string& what, int flipped) : GeometryError(what), flipped_(flipped) {}
  int flipped() const { return flipped_; }

 private:
  int flipped_;
};

struct CutMesh {
  TriMesh mesh;                     // same faces, seam vertices duplicated
  std::vector<int> source_vertex;   // cut vertex -> input vertex
  std::vector<EdgeKey> seam_edges;  // input-mesh edges that were cut, sorted
};

// True when the mesh is one connected open component with a single boundary
// loop and Euler characteristic 1.
bool is_disk(const TriMesh& mesh);

// Cuts a mesh open into a topological disk. Seams join the four highest
// distortion vertices by shortest edge paths, plus whatever loops the
// topology needs. Disks are returned unchanged.
CutMesh cut_seams(const TriMesh& mesh);

struct ArapOptions {
  int max_iterations = 100;
  double relative_tolerance = 1e-7;
};

// ARAP parameterization of a disk, started from a Tutte embedding and scaled
// so the chart area equals the surface area.
UVChart arap_parameterize(const TriMesh& disk, const ArapOptions& options = {});

// cut_seams followed by arap_parameterize; the chart indexes the input faces.
UVChart parameterize(const TriMesh& mesh, const ArapOptions& options = {});

// Barycentric coordinates of p in the uv triangle of face.
Vec3 barycentric(const UVTriangle& t, const Vec2& p);

// Maps p inside the uv triangle of face back onto the face in 3D.
Vec3 uv_to_3d(const UVChart& chart, const TriMesh& mesh, int face, const Vec2& p);

// Lowest-index face whose uv triangle contains p (boundary included).
std::optional<int> locate_in_chart(const UVChart& chart, const Vec2& p);

// Uniform-grid point location over a chart; same answers as locate_in_chart.
class ChartIndex {
 public:
  explicit ChartIndex(const UVChart& chart);
  std::optional<int> locate(const Vec2& p) const;
  // Faces whose uv bounding box meets [lo, hi], ascending.
  std::vector<int> faces_in_box(const Vec2& lo, const Vec2& hi) const;

 private:
  std::pair<int, int> cell_of(const Vec2& p) const;

  const UVChart* chart_;
  Vec2 origin_ = Vec2::Zero();
  double cell_ = 1.0;
  int nx_ = 1, ny_ = 1;
  std::vector<std::vector<int>> cells_;
};

}  // namespace texprint
