#include "texprint/extrude.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "texprint/error.hpp"

namespace texprint {

namespace {

// Distance along the unit direction d from o to triangle (a, b, c), if hit.
std::optional<double> ray_hit(const Vec3& o, const Vec3& d, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 e1 = b - a, e2 = c - a;
  const Vec3 p = d.cross(e2);
  const double det = e1.dot(p);
  if (std::abs(det) < 1e-300) return std::nullopt;
  const Vec3 s = o - a;
  const double u = s.dot(p) / det;
  if (u < 0 || u > 1) return std::nullopt;
  const Vec3 q = s.cross(e1);
  const double v = d.dot(q) / det;
  if (v < 0 || u + v > 1) return std::nullopt;
  return e2.dot(q) / det;
}

TriMesh drop_unused(const std::vector<Vec3>& positions, const std::vector<Face>& faces, std::vector<FaceTag> tags) {
  std::vector<int> remap(positions.size(), -1);
  std::vector<Vec3> kept;
  std::vector<Face> out;
  for (const Face& f : faces) {
    Face g;
    for (int k = 0; k < 3; ++k) {
      int& r = remap[static_cast<std::size_t>(f[static_cast<std::size_t>(k)])];
      if (r < 0) {
        r = static_cast<int>(kept.size());
        kept.push_back(positions[static_cast<std::size_t>(f[static_cast<std::size_t>(k)])]);
      }
      g[static_cast<std::size_t>(k)] = r;
    }
    out.push_back(g);
  }
  return TriMesh(std::move(kept), std::move(out), std::move(tags));
}

TriMesh cutout(const ImprintedMesh& im) {
  if (check_watertight(im.mesh).is_closed)
    throw InvalidInput("cutout would open a closed solid; hollow it into a shell first or use embossed mode");
  std::vector<Face> faces;
  std::vector<FaceTag> tags;
  for (std::size_t f = 0; f < im.mesh.face_count(); ++f) {
    if (im.face_placement[f] >= 0) continue;
    faces.push_back(im.mesh.face(static_cast<int>(f)));
    tags.push_back(im.mesh.tags().empty() ? FaceTag::Untouched : im.mesh.tag(static_cast<int>(f)));
  }
  return drop_unused(im.mesh.positions(), faces, std::move(tags));
}

}  // namespace

std::vector<Face> wall_triangulation(const std::vector<int>& base_loop, const std::vector<int>& offset_loop) {
  if (base_loop.size() != offset_loop.size()) throw InvalidInput("wall loops differ in length");
  if (base_loop.size() < 3) throw InvalidInput("wall loop needs at least 3 vertices");
  std::vector<Face> out;
  const std::size_t n = base_loop.size();
  for (std::size_t i = 0; i < n; ++i) {
    const int a = base_loop[i], b = base_loop[(i + 1) % n];
    const int a2 = offset_loop[i], b2 = offset_loop[(i + 1) % n];
    out.push_back({a, b, b2});
    out.push_back({a, b2, a2});
  }
  return out;
}

TriMesh extrude_texture(const ImprintedMesh& im, const ExtrudeOptions& options) {
  const TriMesh& mesh = im.mesh;
  if (im.face_placement.size() != mesh.face_count()) throw InvalidInput("face placements do not match the mesh");
  if (options.mode == ExtrudeMode::Cutout) return cutout(im);
  const bool hollow = options.mode == ExtrudeMode::Embossed && static_cast<bool>(options.thickness);
  if (!hollow && !(options.depth > 0)) throw InvalidInput("extrusion depth must be positive");

  const std::vector<Vec3> normals = vertex_normals(mesh);
  const double sign = options.mode == ExtrudeMode::Raised ? 1.0 : -1.0;
  auto depth_at = [&](int v) {
    if (!hollow) return options.depth;
    return std::max(0.0, options.thickness(mesh.position(v)) - options.wall);
  };

  std::vector<Vec3> positions = mesh.positions();
  std::map<std::pair<int, int>, int> offset;  // (placement, loop vertex) -> offset copy
  std::vector<int> moved(positions.size(), -1);
  std::vector<std::pair<int, int>> displaced;  // (input vertex, output vertex)

  for (const BoundaryLoop& loop : im.loops)
    for (int v : loop.vertices) {
      const auto [it, fresh] = offset.emplace(std::pair{loop.placement, v}, static_cast<int>(positions.size()));
      if (!fresh) continue;
      positions.push_back(mesh.position(v) + sign * depth_at(v) * normals[static_cast<std::size_t>(v)]);
      displaced.emplace_back(v, it->second);
    }

  std::vector<Face> faces;
  std::vector<FaceTag> tags;
  for (std::size_t f = 0; f < mesh.face_count(); ++f) {
    const int p = im.face_placement[f];
    Face fc = mesh.face(static_cast<int>(f));
    if (p >= 0) {
      for (int& v : fc) {
        const auto it = offset.find({p, v});
        if (it != offset.end()) {
          v = it->second;
        } else if (moved[static_cast<std::size_t>(v)] < 0) {
          moved[static_cast<std::size_t>(v)] = v;
          positions[static_cast<std::size_t>(v)] += sign * depth_at(v) * normals[static_cast<std::size_t>(v)];
          displaced.emplace_back(v, v);
        }
      }
    }
    faces.push_back(fc);
    tags.push_back(p >= 0 ? FaceTag::TextureInterior : (mesh.tags().empty() ? FaceTag::Untouched : mesh.tag(static_cast<int>(f))));
  }
  for (const BoundaryLoop& loop : im.loops) {
    std::vector<int> top;
    for (int v : loop.vertices) top.push_back(offset.at({loop.placement, v}));
    for (const Face& w : wall_triangulation(loop.vertices, top)) {
      faces.push_back(w);
      tags.push_back(FaceTag::TextureWall);
    }
  }

  if (options.mode == ExtrudeMode::Embossed) {
    // Cast each displacement against the faces that stay in place.
    std::vector<int> fixed;
    for (std::size_t f = 0; f < mesh.face_count(); ++f)
      if (im.face_placement[f] < 0) fixed.push_back(static_cast<int>(f));
    for (const auto& [v, out] : displaced) {
      const Vec3& o = mesh.position(v);
      const Vec3 d = -normals[static_cast<std::size_t>(v)];
      const double reach = (positions[static_cast<std::size_t>(out)] - o).norm();
      for (int f : fixed) {
        const Face& fc = mesh.face(f);
        if (fc[0] == v || fc[1] == v || fc[2] == v) continue;
        const auto t = ray_hit(o, d, mesh.position(fc[0]), mesh.position(fc[1]), mesh.position(fc[2]));
        if (t && *t > 0 && *t <= reach)
          throw GeometryError("embossing vertex " + std::to_string(v) + " would pass through face " + std::to_string(f));
      }
    }
  }
  return TriMesh(std::move(positions), std::move(faces), std::move(tags));
}

}  // namespace texprint
