#include "texprint/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <queue>
#include <tuple>

#include "texprint/error.hpp"

namespace texprint {

void validate_indices(std::span<const Vec3> positions, std::span<const Face> faces) {
  const auto n = static_cast<long>(positions.size());
  for (std::size_t f = 0; f < faces.size(); ++f) {
    const Face& t = faces[f];
    for (int v : t) {
      if (v < 0 || v >= n) {
        throw InvalidInput("face " + std::to_string(f) + " references vertex " + std::to_string(v) +
                           " outside [0, " + std::to_string(n) + ")");
      }
    }
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) {
      throw InvalidInput("face " + std::to_string(f) + " repeats a vertex");
    }
  }
}

TriMesh::TriMesh(std::vector<Vec3> positions, std::vector<Face> faces, std::vector<FaceTag> tags)
    : positions_(std::move(positions)), faces_(std::move(faces)), tags_(std::move(tags)) {
  validate_indices(positions_, faces_);
  if (tags_.empty()) {
    tags_.assign(faces_.size(), FaceTag::Untouched);
  } else if (tags_.size() != faces_.size()) {
    throw InvalidInput("face tag count does not match face count");
  }
}

TriMesh TriMesh::with_tags(std::vector<FaceTag> tags) const {
  return TriMesh(positions_, faces_, std::move(tags));
}

std::vector<EdgeIncidence> TriMesh::edges() const {
  struct Rec {
    EdgeKey key;
    int face;
    bool forward;
  };
  std::vector<Rec> recs;
  recs.reserve(faces_.size() * 3);
  for (std::size_t f = 0; f < faces_.size(); ++f) {
    const Face& t = faces_[f];
    for (int c = 0; c < 3; ++c) {
      const int a = t[static_cast<std::size_t>(c)];
      const int b = t[static_cast<std::size_t>((c + 1) % 3)];
      recs.push_back({EdgeKey(a, b), static_cast<int>(f), a < b});
    }
  }
  std::sort(recs.begin(), recs.end(), [](const Rec& x, const Rec& y) {
    return std::tie(x.key, x.face) < std::tie(y.key, y.face);
  });
  std::vector<EdgeIncidence> out;
  for (std::size_t i = 0; i < recs.size();) {
    EdgeIncidence inc;
    inc.key = recs[i].key;
    std::size_t j = i;
    for (; j < recs.size() && recs[j].key == inc.key; ++j) {
      inc.faces.push_back(recs[j].face);
      inc.forward.push_back(recs[j].forward);
    }
    out.push_back(std::move(inc));
    i = j;
  }
  return out;
}

Vec3 TriMesh::face_normal(int f) const {
  const Face& t = face(f);
  const Vec3 n = (position(t[1]) - position(t[0])).cross(position(t[2]) - position(t[0]));
  const double len = n.norm();
  return len > 0.0 ? Vec3(n / len) : Vec3::Zero();
}

double TriMesh::face_area(int f) const {
  const Face& t = face(f);
  return 0.5 * (position(t[1]) - position(t[0])).cross(position(t[2]) - position(t[0])).norm();
}

double TriMesh::surface_area() const {
  double a = 0.0;
  for (std::size_t f = 0; f < faces_.size(); ++f) a += face_area(static_cast<int>(f));
  return a;
}

double TriMesh::signed_volume() const {
  double v = 0.0;
  for (const Face& t : faces_) {
    v += position(t[0]).dot(position(t[1]).cross(position(t[2])));
  }
  return v / 6.0;
}

std::pair<Vec3, Vec3> TriMesh::bbox() const {
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = -lo;
  for (const Vec3& p : positions_) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  return {lo, hi};
}

double TriMesh::bbox_diagonal() const {
  if (positions_.empty()) return 0.0;
  const auto [lo, hi] = bbox();
  return (hi - lo).norm();
}

WatertightReport check_watertight(const TriMesh& mesh) {
  WatertightReport r;
  const auto edges = mesh.edges();
  for (const EdgeIncidence& e : edges) {
    if (e.faces.size() == 1) {
      ++r.boundary_edge_count;
    } else if (e.faces.size() > 2) {
      ++r.nonmanifold_edge_count;
    } else if (e.forward[0] == e.forward[1]) {
      ++r.inconsistent_winding_pairs;
    }
  }
  r.euler_characteristic = static_cast<long>(mesh.vertex_count()) - static_cast<long>(edges.size()) +
                           static_cast<long>(mesh.face_count());
  r.is_closed = r.boundary_edge_count == 0 && r.nonmanifold_edge_count == 0 && r.inconsistent_winding_pairs == 0;
  return r;
}

double corner_angle(const TriMesh& mesh, int f, int c) {
  const Face& t = mesh.face(f);
  const Vec3& p = mesh.position(t[static_cast<std::size_t>(c)]);
  const Vec3 a = mesh.position(t[static_cast<std::size_t>((c + 1) % 3)]) - p;
  const Vec3 b = mesh.position(t[static_cast<std::size_t>((c + 2) % 3)]) - p;
  return std::atan2(a.cross(b).norm(), a.dot(b));
}

std::vector<Vec3> vertex_normals(const TriMesh& mesh) {
  std::vector<Vec3> acc(mesh.vertex_count(), Vec3::Zero());
  std::vector<bool> used(mesh.vertex_count(), false);
  for (std::size_t f = 0; f < mesh.face_count(); ++f) {
    const Face& t = mesh.face(static_cast<int>(f));
    for (int v : t) used[static_cast<std::size_t>(v)] = true;
    const Vec3 e0 = mesh.position(t[1]) - mesh.position(t[0]);
    const Vec3 e1 = mesh.position(t[2]) - mesh.position(t[0]);
    const Vec3 e2 = mesh.position(t[2]) - mesh.position(t[1]);
    const Vec3 cr = e0.cross(e1);
    const double longest = std::max({e0.squaredNorm(), e1.squaredNorm(), e2.squaredNorm()});
    // Slivers carry no reliable orientation.
    if (cr.norm() <= 1e-10 * longest || longest == 0.0) continue;
    const Vec3 n = cr.normalized();
    for (int c = 0; c < 3; ++c) {
      acc[static_cast<std::size_t>(t[static_cast<std::size_t>(c)])] += corner_angle(mesh, static_cast<int>(f), c) * n;
    }
  }
  for (std::size_t v = 0; v < acc.size(); ++v) {
    if (!used[v]) continue;
    const double len = acc[v].norm();
    if (!(len > 1e-300)) {
      throw GeometryError("vertex " + std::to_string(v) + " has a zero-area incident fan; normal undefined");
    }
    acc[v] /= len;
  }
  return acc;
}

std::vector<std::vector<int>> vertex_neighbors(const TriMesh& mesh) {
  std::vector<std::vector<int>> nb(mesh.vertex_count());
  for (const Face& t : mesh.faces()) {
    for (int c = 0; c < 3; ++c) {
      const int a = t[static_cast<std::size_t>(c)];
      const int b = t[static_cast<std::size_t>((c + 1) % 3)];
      nb[static_cast<std::size_t>(a)].push_back(b);
      nb[static_cast<std::size_t>(b)].push_back(a);
    }
  }
  for (auto& l : nb) {
    std::sort(l.begin(), l.end());
    l.erase(std::unique(l.begin(), l.end()), l.end());
  }
  return nb;
}

std::vector<std::vector<int>> vertex_faces(const TriMesh& mesh) {
  std::vector<std::vector<int>> vf(mesh.vertex_count());
  for (std::size_t f = 0; f < mesh.face_count(); ++f) {
    for (int v : mesh.face(static_cast<int>(f))) vf[static_cast<std::size_t>(v)].push_back(static_cast<int>(f));
  }
  return vf;
}

int connected_components(const TriMesh& mesh, std::vector<int>* face_component) {
  const auto nf = mesh.face_count();
  std::vector<int> parent(nf);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };
  for (const EdgeIncidence& e : mesh.edges()) {
    for (std::size_t i = 1; i < e.faces.size(); ++i) {
      const int a = find(e.faces[0]);
      const int b = find(e.faces[i]);
      if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
    }
  }
  std::vector<int> label(nf, -1);
  std::vector<int> root_label(nf, -1);
  int count = 0;
  for (std::size_t f = 0; f < nf; ++f) {
    const int r = find(static_cast<int>(f));
    if (root_label[static_cast<std::size_t>(r)] < 0) root_label[static_cast<std::size_t>(r)] = count++;
    label[f] = root_label[static_cast<std::size_t>(r)];
  }
  if (face_component) *face_component = std::move(label);
  return count;
}

Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  // Ericson, Real-Time Collision Detection, 5.1.5.
  const Vec3 ab = b - a;
  const Vec3 ac = c - a;
  const Vec3 ap = p - a;
  const double d1 = ab.dot(ap);
  const double d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return a;
  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp);
  const double d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return b;
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return a + ab * (d1 / (d1 - d3));
  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp);
  const double d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return c;
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return a + ac * (d2 / (d2 - d6));
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));
  }
  const double denom = 1.0 / (va + vb + vc);
  return a + ab * (vb * denom) + ac * (vc * denom);
}

SurfacePoint closest_point(const TriMesh& mesh, const Vec3& query) {
  SurfacePoint best;
  best.distance = std::numeric_limits<double>::infinity();
  for (std::size_t f = 0; f < mesh.face_count(); ++f) {
    const Face& t = mesh.face(static_cast<int>(f));
    const Vec3 q = closest_point_on_triangle(query, mesh.position(t[0]), mesh.position(t[1]), mesh.position(t[2]));
    const double d = (q - query).norm();
    if (d < best.distance) {
      best = {static_cast<int>(f), q, d};
    }
  }
  return best;
}

}  // namespace texprint
