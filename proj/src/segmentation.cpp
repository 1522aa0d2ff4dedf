#include "texprint/segmentation.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <queue>
#include <unordered_map>

#include "texprint/error.hpp"

namespace texprint {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kMinWeight = 1e-8;

std::vector<bool> boundary_vertices(const TriMesh& mesh) {
  std::vector<bool> out(mesh.vertex_count(), false);
  for (const EdgeIncidence& e : mesh.edges()) {
    if (e.faces.size() == 1) out[static_cast<std::size_t>(e.key.lo)] = out[static_cast<std::size_t>(e.key.hi)] = true;
  }
  return out;
}

Vec3 face_gradient(const TriMesh& mesh, int f, const std::vector<double>& phi) {
  const Face& t = mesh.face(f);
  const Vec3& p0 = mesh.position(t[0]);
  const Vec3& p1 = mesh.position(t[1]);
  const Vec3& p2 = mesh.position(t[2]);
  const Vec3 n = (p1 - p0).cross(p2 - p0);
  const double a2 = n.norm();
  if (a2 == 0.0) return Vec3::Zero();
  const Vec3 u = n / a2;
  // grad = sum_i phi_i (u x e_i) / (2A), e_i the edge opposite corner i.
  const Vec3 g = phi[static_cast<std::size_t>(t[0])] * u.cross(p2 - p1) + phi[static_cast<std::size_t>(t[1])] * u.cross(p0 - p2) +
                 phi[static_cast<std::size_t>(t[2])] * u.cross(p1 - p0);
  return g / a2;
}

struct Submesh {
  TriMesh mesh;
  std::vector<int> face_map;  // sub face -> original face
};

Submesh component_of(const TriMesh& mesh, int face) {
  std::vector<int> comp;
  connected_components(mesh, &comp);
  const int c = comp[static_cast<std::size_t>(face)];
  std::vector<int> vmap(mesh.vertex_count(), -1);
  std::vector<Vec3> pos;
  std::vector<Face> faces;
  Submesh out;
  for (int f = 0; f < static_cast<int>(mesh.face_count()); ++f) {
    if (comp[static_cast<std::size_t>(f)] != c) continue;
    Face nf{};
    for (int k = 0; k < 3; ++k) {
      int& m = vmap[static_cast<std::size_t>(mesh.face(f)[k])];
      if (m < 0) {
        m = static_cast<int>(pos.size());
        pos.push_back(mesh.position(mesh.face(f)[k]));
      }
      nf[k] = m;
    }
    faces.push_back(nf);
    out.face_map.push_back(f);
  }
  out.mesh = TriMesh(std::move(pos), std::move(faces));
  return out;
}

// Edge-length Dijkstra distances seeded at the corners of face `f`.
// Fraction of a face's area where the linearly interpolated field is at or
// above level, counting only corners inside the marked component as above.
double area_above(const Face& f, const std::vector<double>& phi, const std::vector<bool>& mark, double level) {
  int up = 0;
  for (int v : f) up += mark[static_cast<std::size_t>(v)] ? 1 : 0;
  if (up == 0 || up == 3) return up == 3 ? 1.0 : 0.0;
  // Corner on its own side of the isoline.
  int lone = 0;
  for (int c = 0; c < 3; ++c) {
    if ((mark[static_cast<std::size_t>(f[c])] ? 1 : 0) == (up == 1 ? 1 : 0)) lone = c;
  }
  const double a = phi[static_cast<std::size_t>(f[lone])];
  double corner = 1.0;
  for (int c = 0; c < 3; ++c) {
    if (c == lone) continue;
    const double b = phi[static_cast<std::size_t>(f[c])];
    corner *= std::abs(a - b) > 0.0 ? std::clamp((a - level) / (a - b), 0.0, 1.0) : 1.0;
  }
  return up == 1 ? corner : 1.0 - corner;
}

// Signed mean curvature from the cotangent Laplacian, positive on convex
// regions.
std::vector<double> mean_curvature(const TriMesh& mesh, const std::vector<Vec3>& normals) {
  std::vector<Vec3> lap(mesh.vertex_count(), Vec3::Zero());
  std::vector<double> area(mesh.vertex_count(), 0.0);
  for (const auto& [e, w] : cotangent_weights(mesh)) {
    const Vec3 d = mesh.position(e.lo) - mesh.position(e.hi);
    lap[static_cast<std::size_t>(e.lo)] += w * d;
    lap[static_cast<std::size_t>(e.hi)] -= w * d;
  }
  for (int f = 0; f < static_cast<int>(mesh.face_count()); ++f) {
    for (int v : mesh.face(f)) area[static_cast<std::size_t>(v)] += mesh.face_area(f) / 3.0;
  }
  std::vector<double> h(mesh.vertex_count(), 0.0);
  for (std::size_t v = 0; v < h.size(); ++v) {
    if (area[v] > 0.0) h[v] = lap[v].dot(normals[v]) / (2.0 * area[v]);
  }
  return h;
}

// Marks the vertices reachable from seed through vertices satisfying pass.
template <typename Pred>
void flood(const std::vector<std::vector<int>>& nbr, int seed, std::vector<bool>& mark, Pred pass) {
  std::fill(mark.begin(), mark.end(), false);
  std::vector<int> stack{seed};
  mark[static_cast<std::size_t>(seed)] = true;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int w : nbr[static_cast<std::size_t>(v)]) {
      if (!mark[static_cast<std::size_t>(w)] && pass(w)) {
        mark[static_cast<std::size_t>(w)] = true;
        stack.push_back(w);
      }
    }
  }
}

std::vector<double> geodesic_from(const TriMesh& mesh, const std::vector<std::vector<int>>& nbr, int f, const Vec3& p) {
  std::vector<double> dist(mesh.vertex_count(), std::numeric_limits<double>::infinity());
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> q;
  for (int v : mesh.face(f)) {
    dist[static_cast<std::size_t>(v)] = (mesh.position(v) - p).norm();
    q.emplace(dist[static_cast<std::size_t>(v)], v);
  }
  while (!q.empty()) {
    const auto [d, v] = q.top();
    q.pop();
    if (d > dist[static_cast<std::size_t>(v)]) continue;
    for (int w : nbr[static_cast<std::size_t>(v)]) {
      const double nd = d + (mesh.position(v) - mesh.position(w)).norm();
      if (nd < dist[static_cast<std::size_t>(w)]) {
        dist[static_cast<std::size_t>(w)] = nd;
        q.emplace(nd, w);
      }
    }
  }
  return dist;
}

}  // namespace

std::vector<double> angle_deficits(const TriMesh& mesh) {
  std::vector<double> sum(mesh.vertex_count(), 0.0);
  for (int f = 0; f < static_cast<int>(mesh.face_count()); ++f) {
    for (int c = 0; c < 3; ++c) sum[static_cast<std::size_t>(mesh.face(f)[c])] += corner_angle(mesh, f, c);
  }
  const std::vector<bool> boundary = boundary_vertices(mesh);
  std::vector<double> out(mesh.vertex_count());
  for (std::size_t v = 0; v < out.size(); ++v) out[v] = (boundary[v] ? std::numbers::pi : kTwoPi) - sum[v];
  return out;
}

DistortionField distortion(const TriMesh& mesh, int R) {
  if (R < 0) throw InvalidInput("distortion radius must be >= 0");
  // Boundary turning is not surface curvature; boundary vertices contribute
  // nothing to the accumulated deficit.
  std::vector<double> deficit = angle_deficits(mesh);
  const std::vector<bool> boundary = boundary_vertices(mesh);
  for (std::size_t v = 0; v < deficit.size(); ++v) {
    if (boundary[v]) deficit[v] = 0.0;
  }
  const auto nbr = vertex_neighbors(mesh);
  DistortionField out;
  out.R = R;
  out.d.assign(mesh.vertex_count(), 0.0);
  std::vector<int> seen(mesh.vertex_count(), -1);
  std::vector<int> layer, next;
  for (int i = 0; i < static_cast<int>(mesh.vertex_count()); ++i) {
    double acc = deficit[static_cast<std::size_t>(i)];
    double best = acc;
    layer.assign(1, i);
    seen[static_cast<std::size_t>(i)] = i;
    for (int r = 1; r <= R && !layer.empty(); ++r) {
      next.clear();
      for (int v : layer) {
        for (int w : nbr[static_cast<std::size_t>(v)]) {
          if (seen[static_cast<std::size_t>(w)] == i) continue;
          seen[static_cast<std::size_t>(w)] = i;
          next.push_back(w);
          acc += deficit[static_cast<std::size_t>(w)];
        }
      }
      best = std::max(best, acc);
      std::swap(layer, next);
    }
    out.d[static_cast<std::size_t>(i)] = std::clamp(best / kTwoPi, 0.0, 1.0);
  }
  return out;
}

std::vector<int> boundary_candidates(const DistortionField& field, const TriMesh& mesh, const Vec3& cursor, int k,
                                     double lambda, double threshold) {
  if (k < 1) throw InvalidInput("candidate count must be >= 1");
  if (mesh.vertex_count() < static_cast<std::size_t>(k)) throw InvalidInput("mesh has fewer vertices than requested candidates");
  if (field.d.size() != mesh.vertex_count()) throw InvalidInput("distortion field does not match mesh");
  if (!(lambda > 0.0)) throw InvalidInput("distance weight must be positive");
  const auto nbr = vertex_neighbors(mesh);
  std::vector<std::pair<double, int>> order;
  for (int v = 0; v < static_cast<int>(mesh.vertex_count()); ++v) {
    const double d = field.d[static_cast<std::size_t>(v)];
    if (d < threshold) continue;
    // Terminals are local maxima of the distortion field.
    bool peak = true;
    for (int w : nbr[static_cast<std::size_t>(v)]) peak = peak && field.d[static_cast<std::size_t>(w)] <= d;
    if (!peak) continue;
    order.emplace_back(d / (1.0 + (cursor - mesh.position(v)).norm() / lambda), v);
  }
  std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  std::vector<bool> blocked(mesh.vertex_count(), false);
  std::vector<int> out;
  for (const auto& [score, v] : order) {
    if (static_cast<int>(out.size()) == k) break;
    if (blocked[static_cast<std::size_t>(v)]) continue;
    out.push_back(v);
    blocked[static_cast<std::size_t>(v)] = true;
    for (int w : nbr[static_cast<std::size_t>(v)]) blocked[static_cast<std::size_t>(w)] = true;
  }
  return out;
}

std::vector<int> boundary_candidates(const DistortionField& field, const TriMesh& mesh, const Vec3& cursor, int k) {
  const SegmentationConfig cfg;
  return boundary_candidates(field, mesh, cursor, k, cfg.lambda_fraction * mesh.bbox_diagonal(), cfg.threshold);
}

std::vector<std::pair<EdgeKey, double>> cotangent_weights(const TriMesh& mesh) {
  std::map<EdgeKey, double> w;
  for (const Face& f : mesh.faces()) {
    for (int c = 0; c < 3; ++c) {
      const int o = f[c], a = f[(c + 1) % 3], b = f[(c + 2) % 3];
      const Vec3 u = mesh.position(a) - mesh.position(o);
      const Vec3 v = mesh.position(b) - mesh.position(o);
      const double s = u.cross(v).norm();
      double& slot = w[EdgeKey(a, b)];
      if (s > 0.0) slot += 0.5 * u.dot(v) / s;
    }
  }
  std::vector<std::pair<EdgeKey, double>> out;
  out.reserve(w.size());
  for (const auto& [e, x] : w) out.emplace_back(e, std::max(x, kMinWeight));
  return out;
}

HarmonicField harmonic_field(const TriMesh& mesh, std::span<const int> v_one, std::span<const int> v_zero) {
  const int n = static_cast<int>(mesh.vertex_count());
  if (v_one.empty() || v_zero.empty()) throw InvalidInput("harmonic field needs vertices on both sides");
  std::vector<int> fixed(static_cast<std::size_t>(n), -1);
  for (int v : v_one) {
    if (v < 0 || v >= n) throw InvalidInput("constraint vertex out of range");
    fixed[static_cast<std::size_t>(v)] = 1;
  }
  for (int v : v_zero) {
    if (v < 0 || v >= n) throw InvalidInput("constraint vertex out of range");
    if (fixed[static_cast<std::size_t>(v)] == 1) throw InvalidInput("constraint sets are not disjoint");
    fixed[static_cast<std::size_t>(v)] = 0;
  }

  const auto weights = cotangent_weights(mesh);
  std::vector<std::vector<std::pair<int, double>>> adj(static_cast<std::size_t>(n));
  for (const auto& [e, w] : weights) {
    adj[static_cast<std::size_t>(e.lo)].emplace_back(e.hi, w);
    adj[static_cast<std::size_t>(e.hi)].emplace_back(e.lo, w);
  }
  // Every vertex that belongs to a face must reach a constraint.
  std::vector<bool> reached(static_cast<std::size_t>(n), false);
  std::vector<int> stack;
  for (int v = 0; v < n; ++v) {
    if (fixed[static_cast<std::size_t>(v)] >= 0) {
      reached[static_cast<std::size_t>(v)] = true;
      stack.push_back(v);
    }
  }
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (const auto& [w, _] : adj[static_cast<std::size_t>(v)]) {
      if (!reached[static_cast<std::size_t>(w)]) {
        reached[static_cast<std::size_t>(w)] = true;
        stack.push_back(w);
      }
    }
  }
  std::vector<int> free_index(static_cast<std::size_t>(n), -1);
  int m = 0;
  for (int v = 0; v < n; ++v) {
    if (adj[static_cast<std::size_t>(v)].empty() || fixed[static_cast<std::size_t>(v)] >= 0) continue;
    if (!reached[static_cast<std::size_t>(v)]) throw InvalidInput("mesh component contains no harmonic field constraint");
    free_index[static_cast<std::size_t>(v)] = m++;
  }

  HarmonicField out;
  out.phi.assign(static_cast<std::size_t>(n), 0.0);
  for (int v = 0; v < n; ++v) {
    if (fixed[static_cast<std::size_t>(v)] == 1) {
      out.phi[static_cast<std::size_t>(v)] = 1.0;
      out.constrained_one.push_back(v);
    } else if (fixed[static_cast<std::size_t>(v)] == 0) {
      out.constrained_zero.push_back(v);
    }
  }
  if (m == 0) return out;

  // Dirichlet conditions are eliminated, so constrained values are exact.
  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
  for (int v = 0; v < n; ++v) {
    const int i = free_index[static_cast<std::size_t>(v)];
    if (i < 0) continue;
    double diag = 0.0;
    for (const auto& [w, x] : adj[static_cast<std::size_t>(v)]) {
      diag += x;
      const int j = free_index[static_cast<std::size_t>(w)];
      if (j >= 0) {
        trip.emplace_back(i, j, -x);
      } else {
        rhs[i] += x * out.phi[static_cast<std::size_t>(w)];
      }
    }
    trip.emplace_back(i, i, diag);
  }
  Eigen::SparseMatrix<double> L(m, m);
  L.setFromTriplets(trip.begin(), trip.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(L);
  if (solver.info() != Eigen::Success) throw GeometryError("harmonic field factorization failed");
  const Eigen::VectorXd x = solver.solve(rhs);
  if (solver.info() != Eigen::Success) throw GeometryError("harmonic field solve failed");
  for (int v = 0; v < n; ++v) {
    const int i = free_index[static_cast<std::size_t>(v)];
    if (i >= 0) out.phi[static_cast<std::size_t>(v)] = std::clamp(x[i], 0.0, 1.0);
  }
  return out;
}

std::vector<Isoline> extract_isolines(const HarmonicField& field, const TriMesh& mesh, double level) {
  const auto& phi = field.phi;
  if (phi.size() != mesh.vertex_count()) throw InvalidInput("harmonic field does not match mesh");
  auto above = [&](int v) { return phi[static_cast<std::size_t>(v)] >= level; };

  // Crossing point per cut edge; each face joins two of them.
  std::map<EdgeKey, int> node_of;
  std::vector<Vec3> node_point;
  std::vector<EdgeKey> node_edge;
  std::vector<std::vector<std::pair<int, int>>> links;  // node -> (other node, face)
  auto node = [&](int a, int b) {
    const EdgeKey e(a, b);
    const auto [it, fresh] = node_of.emplace(e, static_cast<int>(node_point.size()));
    if (fresh) {
      const double pa = phi[static_cast<std::size_t>(e.lo)], pb = phi[static_cast<std::size_t>(e.hi)];
      const double t = (level - pa) / (pb - pa);
      node_point.push_back(mesh.position(e.lo) + t * (mesh.position(e.hi) - mesh.position(e.lo)));
      node_edge.push_back(e);
      links.emplace_back();
    }
    return it->second;
  };
  for (int f = 0; f < static_cast<int>(mesh.face_count()); ++f) {
    const Face& t = mesh.face(f);
    std::vector<int> cut;
    for (int c = 0; c < 3; ++c) {
      if (above(t[c]) != above(t[(c + 1) % 3])) cut.push_back(node(t[c], t[(c + 1) % 3]));
    }
    if (cut.size() != 2) continue;
    links[static_cast<std::size_t>(cut[0])].emplace_back(cut[1], f);
    links[static_cast<std::size_t>(cut[1])].emplace_back(cut[0], f);
  }

  std::vector<double> grad(mesh.face_count(), -1.0);
  auto face_grad = [&](int f) {
    double& g = grad[static_cast<std::size_t>(f)];
    if (g < 0.0) g = face_gradient(mesh, f, phi).norm();
    return g;
  };

  std::vector<bool> used_face(mesh.face_count(), false);
  std::vector<Isoline> out;
  auto trace = [&](int start) {
    Isoline iso;
    iso.points.push_back(node_point[static_cast<std::size_t>(start)]);
    iso.edges.push_back(node_edge[static_cast<std::size_t>(start)]);
    double weighted = 0.0;
    int cur = start;
    while (true) {
      int next = -1, via = -1;
      for (const auto& [o, f] : links[static_cast<std::size_t>(cur)]) {
        if (!used_face[static_cast<std::size_t>(f)]) {
          next = o;
          via = f;
          break;
        }
      }
      if (next < 0) break;
      used_face[static_cast<std::size_t>(via)] = true;
      const Vec3& p = node_point[static_cast<std::size_t>(next)];
      const double len = (p - iso.points.back()).norm();
      iso.length += len;
      weighted += len * face_grad(via);
      iso.points.push_back(p);
      iso.edges.push_back(node_edge[static_cast<std::size_t>(next)]);
      cur = next;
      if (cur == start) {
        iso.closed = true;
        break;
      }
    }
    iso.mean_gradient = iso.length > 0.0 ? weighted / iso.length : 0.0;
    if (iso.points.size() >= 2) out.push_back(std::move(iso));
  };
  // Open chains start at nodes of degree one, then the remaining cycles.
  for (int s = 0; s < static_cast<int>(node_point.size()); ++s) {
    if (links[static_cast<std::size_t>(s)].size() == 1 && !used_face[static_cast<std::size_t>(links[static_cast<std::size_t>(s)][0].second)]) trace(s);
  }
  for (int s = 0; s < static_cast<int>(node_point.size()); ++s) {
    for (const auto& [o, f] : links[static_cast<std::size_t>(s)]) {
      if (!used_face[static_cast<std::size_t>(f)]) {
        trace(s);
        break;
      }
    }
  }
  return out;
}

SegmentRegion infer_region(const TriMesh& mesh, const Vec3& cursor, const SegmentationConfig& config) {
  if (mesh.empty()) throw InvalidInput("cannot segment an empty mesh");
  const SurfacePoint hit = closest_point(mesh, cursor);
  const Submesh sub = component_of(mesh, hit.face);
  const TriMesh& m = sub.mesh;
  int cursor_face = -1;
  for (std::size_t i = 0; i < sub.face_map.size(); ++i) {
    if (sub.face_map[i] == hit.face) cursor_face = static_cast<int>(i);
  }

  SegmentRegion region;
  auto whole = [&] {
    region.faces = sub.face_map;
    std::sort(region.faces.begin(), region.faces.end());
    region.fallback = true;
    return region;
  };

  const DistortionField d = distortion(m, config.R);
  const std::vector<int> cand =
      boundary_candidates(d, m, hit.point, std::min<int>(config.k, static_cast<int>(m.vertex_count())),
                          config.lambda_fraction * m.bbox_diagonal(), config.threshold);
  if (cand.empty()) return whole();

  const auto nbr = vertex_neighbors(m);
  const auto normals = vertex_normals(m);
  const std::vector<double> geo = geodesic_from(m, nbr, cursor_face, hit.point);
  const std::vector<double> H = mean_curvature(m, normals);
  // For each candidate, the neighbour pair whose normals differ most
  // straddles the crease.
  std::vector<std::pair<int, int>> pairs;  // (higher H, lower H)
  for (int c : cand) {
    const auto& ring = nbr[static_cast<std::size_t>(c)];
    int best_a = -1, best_b = -1;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < ring.size(); ++i) {
      for (std::size_t j = i + 1; j < ring.size(); ++j) {
        const double dot = normals[static_cast<std::size_t>(ring[i])].dot(normals[static_cast<std::size_t>(ring[j])]);
        if (dot < best) {
          best = dot;
          best_a = ring[i];
          best_b = ring[j];
        }
      }
    }
    if (best_a < 0) continue;
    if (H[static_cast<std::size_t>(best_b)] > H[static_cast<std::size_t>(best_a)]) std::swap(best_a, best_b);
    pairs.emplace_back(best_a, best_b);
  }
  if (pairs.empty()) return whole();
  // The pair nearest the cursor decides whether the cursor lies on the high
  // or the low curvature side; every pair follows it.
  const auto nearest = *std::min_element(pairs.begin(), pairs.end(), [&](const auto& x, const auto& y) {
    return std::min(geo[static_cast<std::size_t>(x.first)], geo[static_cast<std::size_t>(x.second)]) <
           std::min(geo[static_cast<std::size_t>(y.first)], geo[static_cast<std::size_t>(y.second)]);
  });
  const bool cursor_high = geo[static_cast<std::size_t>(nearest.first)] <= geo[static_cast<std::size_t>(nearest.second)];
  std::vector<int> side(m.vertex_count(), -1);
  for (auto [hi, lo] : pairs) {
    if (!cursor_high) std::swap(hi, lo);
    if (side[static_cast<std::size_t>(hi)] == 0 || side[static_cast<std::size_t>(lo)] == 1) continue;
    side[static_cast<std::size_t>(hi)] = 1;
    side[static_cast<std::size_t>(lo)] = 0;
  }
  std::vector<int> one, zero;
  for (int v = 0; v < static_cast<int>(m.vertex_count()); ++v) {
    if (side[static_cast<std::size_t>(v)] == 1) one.push_back(v);
    if (side[static_cast<std::size_t>(v)] == 0) zero.push_back(v);
  }
  if (zero.empty()) return whole();
  const HarmonicField field = harmonic_field(m, one, zero);
  const auto& phi = field.phi;
  const Face& cf = m.face(cursor_face);
  int anchor = cf[0];
  for (int v : cf) {
    if (phi[static_cast<std::size_t>(v)] > phi[static_cast<std::size_t>(anchor)]) anchor = v;
  }

  // A level is usable when the cursor-side component of {phi >= level}
  // reaches every cursor-side constraint; its score is the mean gradient
  // along the isolines bounding that component.
  double best_score = -1.0;
  double best_level = 0.0;
  std::vector<bool> best_component;
  Isoline best_loop;
  std::vector<bool> comp(m.vertex_count()), low(m.vertex_count());
  for (int step = 1; step <= 9; ++step) {
    const double level = 0.1 * step;
    // The level must split the constraints into two connected sets.
    const auto above = [&](int v) { return phi[static_cast<std::size_t>(v)] >= level; };
    flood(nbr, anchor, comp, above);
    if (!std::all_of(one.begin(), one.end(), [&](int v) { return comp[static_cast<std::size_t>(v)]; })) continue;
    flood(nbr, zero.front(), low, [&](int v) { return !above(v); });
    if (!std::all_of(zero.begin(), zero.end(), [&](int v) { return low[static_cast<std::size_t>(v)]; })) continue;
    double length = 0.0, weighted = 0.0;
    Isoline longest;
    for (Isoline& iso : extract_isolines(field, m, level)) {
      const EdgeKey& e = iso.edges.front();
      if (!comp[static_cast<std::size_t>(e.lo)] && !comp[static_cast<std::size_t>(e.hi)]) continue;
      length += iso.length;
      weighted += iso.length * iso.mean_gradient;
      if (iso.length > longest.length) longest = std::move(iso);
    }
    if (length <= 0.0) continue;
    const double score = weighted / length;
    if (score > best_score) {
      best_score = score;
      best_level = level;
      best_component = comp;
      best_loop = std::move(longest);
    }
  }
  if (best_score < 0.0) return whole();

  // Faces mostly on the cursor side of the chosen isolines, connected to the
  // cursor face.
  std::vector<bool> keep(m.face_count(), false);
  for (int f = 0; f < static_cast<int>(m.face_count()); ++f) {
    keep[static_cast<std::size_t>(f)] = area_above(m.face(f), phi, best_component, best_level) >= 0.5;
  }
  keep[static_cast<std::size_t>(cursor_face)] = true;
  std::unordered_map<EdgeKey, std::vector<int>, EdgeKeyHash> edge_faces;
  for (int f = 0; f < static_cast<int>(m.face_count()); ++f) {
    for (int c = 0; c < 3; ++c) edge_faces[EdgeKey(m.face(f)[c], m.face(f)[(c + 1) % 3])].push_back(f);
  }
  std::vector<bool> in(m.face_count(), false);
  std::vector<int> stack{cursor_face};
  in[static_cast<std::size_t>(cursor_face)] = true;
  while (!stack.empty()) {
    const int f = stack.back();
    stack.pop_back();
    for (int c = 0; c < 3; ++c) {
      for (int g : edge_faces[EdgeKey(m.face(f)[c], m.face(f)[(c + 1) % 3])]) {
        if (!in[static_cast<std::size_t>(g)] && keep[static_cast<std::size_t>(g)]) {
          in[static_cast<std::size_t>(g)] = true;
          stack.push_back(g);
        }
      }
    }
  }
  for (int f = 0; f < static_cast<int>(m.face_count()); ++f) {
    if (in[static_cast<std::size_t>(f)]) region.faces.push_back(sub.face_map[static_cast<std::size_t>(f)]);
  }
  std::sort(region.faces.begin(), region.faces.end());
  region.boundary_loop = std::move(best_loop.points);
  region.score = best_score;
  region.level = best_level;
  return region;
}

}  // namespace texprint
