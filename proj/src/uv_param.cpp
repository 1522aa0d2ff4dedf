#include "texprint/uv_param.hpp"

#include <Eigen/SVD>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <queue>
#include <unordered_map>
#include <unordered_set>

#include "texprint/predicates.hpp"
#include "texprint/segmentation.hpp"

namespace texprint {
namespace {

constexpr double kMinWeight = 1e-8;
constexpr int kSeamTerminals = 4;
constexpr double kTerminalSpread = 0.4;

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
  }
};

int corner_of(const Face& f, int v) {
  for (int c = 0; c < 3; ++c)
    if (f[c] == v) return c;
  return -1;
}

// Shortest edge path from any source vertex to the nearest target vertex.
std::vector<EdgeKey> shortest_path(const TriMesh& mesh, const std::vector<std::vector<int>>& nbr,
                                   const std::vector<bool>& source, const std::vector<bool>& target) {
  const std::size_t n = mesh.vertex_count();
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  std::vector<int> prev(n, -1);
  int reached = -1;
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> q;
  for (std::size_t v = 0; v < n; ++v) {
    if (source[v]) {
      dist[v] = 0.0;
      q.emplace(0.0, static_cast<int>(v));
    }
  }
  while (!q.empty()) {
    const auto [d, v] = q.top();
    q.pop();
    if (d > dist[static_cast<std::size_t>(v)]) continue;
    if (target[static_cast<std::size_t>(v)]) {
      reached = v;
      break;
    }
    for (int w : nbr[static_cast<std::size_t>(v)]) {
      const double nd = d + (mesh.position(v) - mesh.position(w)).norm();
      if (nd < dist[static_cast<std::size_t>(w)]) {
        dist[static_cast<std::size_t>(w)] = nd;
        prev[static_cast<std::size_t>(w)] = v;
        q.emplace(nd, w);
      }
    }
  }
  std::vector<EdgeKey> path;
  if (reached < 0) return path;
  for (int v = reached; prev[static_cast<std::size_t>(v)] >= 0; v = prev[static_cast<std::size_t>(v)]) {
    path.emplace_back(v, prev[static_cast<std::size_t>(v)]);
  }
  return path;
}

// Geodesic (edge path) distance from a vertex to every vertex.
std::vector<double> edge_distances(const TriMesh& mesh, const std::vector<std::vector<int>>& nbr, int source) {
  std::vector<double> dist(mesh.vertex_count(), std::numeric_limits<double>::infinity());
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> q;
  dist[static_cast<std::size_t>(source)] = 0.0;
  q.emplace(0.0, source);
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

// Highest-distortion vertices, each at least kTerminalSpread of the bounding
// box diagonal (along edges) from earlier picks; ties to the lower index.
std::vector<int> seam_terminals(const TriMesh& mesh, const std::vector<std::vector<int>>& nbr, int k) {
  const DistortionField d = distortion(mesh, 3);
  std::vector<int> order(mesh.vertex_count());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return d.d[static_cast<std::size_t>(a)] > d.d[static_cast<std::size_t>(b)]; });
  const double radius = kTerminalSpread * mesh.bbox_diagonal();
  std::vector<bool> blocked(mesh.vertex_count(), false);
  std::vector<int> out;
  for (int v : order) {
    if (static_cast<int>(out.size()) == k) break;
    if (blocked[static_cast<std::size_t>(v)]) continue;
    out.push_back(v);
    const std::vector<double> dist = edge_distances(mesh, nbr, v);
    for (std::size_t w = 0; w < dist.size(); ++w)
      if (dist[w] < radius) blocked[w] = true;
  }
  return out;
}

// Splits the mesh along the given interior edges.
CutMesh split_along(const TriMesh& mesh, const std::vector<EdgeIncidence>& edges,
                    const std::unordered_set<EdgeKey, EdgeKeyHash>& cut) {
  const std::size_t nf = mesh.face_count();
  UnionFind corners(3 * nf);
  for (const EdgeIncidence& e : edges) {
    if (e.faces.size() != 2 || cut.count(e.key)) continue;
    const int f = e.faces[0], g = e.faces[1];
    for (int v : {e.key.lo, e.key.hi}) {
      corners.unite(3 * f + corner_of(mesh.face(f), v), 3 * g + corner_of(mesh.face(g), v));
    }
  }
  CutMesh out;
  std::vector<Vec3> positions = mesh.positions();
  out.source_vertex.resize(mesh.vertex_count());
  std::iota(out.source_vertex.begin(), out.source_vertex.end(), 0);
  // Corner groups per vertex in order of first appearance by face index.
  std::vector<int> first_root(mesh.vertex_count(), -1);
  std::unordered_map<int, int> root_vertex;
  std::vector<Face> faces = mesh.faces();
  for (std::size_t f = 0; f < nf; ++f) {
    for (int c = 0; c < 3; ++c) {
      const int v = faces[f][c];
      const int root = corners.find(static_cast<int>(3 * f) + c);
      if (first_root[static_cast<std::size_t>(v)] < 0) first_root[static_cast<std::size_t>(v)] = root;
      if (root == first_root[static_cast<std::size_t>(v)]) continue;
      auto it = root_vertex.find(root);
      if (it == root_vertex.end()) {
        it = root_vertex.emplace(root, static_cast<int>(positions.size())).first;
        positions.push_back(mesh.position(v));
        out.source_vertex.push_back(v);
      }
      faces[f][c] = it->second;
    }
  }
  out.mesh = TriMesh(std::move(positions), std::move(faces), mesh.tags());
  out.seam_edges.assign(cut.begin(), cut.end());
  std::sort(out.seam_edges.begin(), out.seam_edges.end());
  return out;
}

}  // namespace

double UVChart::signed_area(int f) const {
  const UVTriangle& t = uv[static_cast<std::size_t>(f)];
  return 0.5 * predicates::orient2d_fast(t[0], t[1], t[2]);
}

bool is_disk(const TriMesh& mesh) {
  if (mesh.empty() || connected_components(mesh) != 1) return false;
  const auto edges = mesh.edges();
  std::vector<int> used(mesh.vertex_count(), 0);
  for (const Face& f : mesh.faces())
    for (int v : f) used[static_cast<std::size_t>(v)] = 1;
  const long vertices = std::accumulate(used.begin(), used.end(), 0L);
  UnionFind loops(mesh.vertex_count());
  std::size_t boundary = 0;
  for (const EdgeIncidence& e : edges) {
    if (e.faces.size() > 2) return false;
    if (e.faces.size() == 1) {
      ++boundary;
      loops.unite(e.key.lo, e.key.hi);
    }
  }
  if (boundary == 0) return false;
  std::unordered_set<int> roots;
  for (const EdgeIncidence& e : edges)
    if (e.faces.size() == 1) roots.insert(loops.find(e.key.lo));
  const long chi = vertices - static_cast<long>(edges.size()) + static_cast<long>(mesh.face_count());
  return chi == 1 && roots.size() == 1;
}

CutMesh cut_seams(const TriMesh& mesh) {
  if (mesh.empty()) throw InvalidInput("cannot cut an empty mesh");
  if (connected_components(mesh) != 1) throw InvalidInput("seam cutting needs a connected mesh");
  const auto edges = mesh.edges();
  for (const EdgeIncidence& e : edges) {
    if (e.faces.size() > 2) throw InvalidInput("seam cutting needs an edge-manifold mesh");
  }
  if (is_disk(mesh)) {
    CutMesh out;
    out.mesh = mesh;
    out.source_vertex.resize(mesh.vertex_count());
    std::iota(out.source_vertex.begin(), out.source_vertex.end(), 0);
    return out;
  }

  const auto nbr = vertex_neighbors(mesh);
  std::unordered_set<EdgeKey, EdgeKeyHash> seed;
  std::vector<bool> in_tree(mesh.vertex_count(), false);
  auto add_path = [&](const std::vector<EdgeKey>& path) {
    for (const EdgeKey& e : path) {
      seed.insert(e);
      in_tree[static_cast<std::size_t>(e.lo)] = in_tree[static_cast<std::size_t>(e.hi)] = true;
    }
  };
  std::vector<int> terminals = seam_terminals(mesh, nbr, kSeamTerminals);
  in_tree[static_cast<std::size_t>(terminals.front())] = true;
  auto only = [&](int v) {
    std::vector<bool> mark(mesh.vertex_count(), false);
    mark[static_cast<std::size_t>(v)] = true;
    return mark;
  };
  for (std::size_t i = 1; i < terminals.size(); ++i) {
    if (!in_tree[static_cast<std::size_t>(terminals[i])]) add_path(shortest_path(mesh, nbr, in_tree, only(terminals[i])));
  }
  std::vector<bool> on_boundary(mesh.vertex_count(), false);
  bool has_boundary = false;
  for (const EdgeIncidence& e : edges) {
    if (e.faces.size() == 1) {
      on_boundary[static_cast<std::size_t>(e.key.lo)] = on_boundary[static_cast<std::size_t>(e.key.hi)] = true;
      has_boundary = true;
    }
  }
  if (has_boundary) {
    // Join the seam tree to the boundary so cutting does not open a new hole.
    bool touches = false;
    for (std::size_t v = 0; v < on_boundary.size(); ++v) touches = touches || (on_boundary[v] && in_tree[v]);
    if (!touches) add_path(shortest_path(mesh, nbr, in_tree, on_boundary));
  } else if (seed.empty()) {
    // A single terminal cannot open a closed surface.
    add_path(shortest_path(mesh, nbr, only(terminals.front()), only(nbr[static_cast<std::size_t>(terminals.front())].front())));
  }

  // Dual spanning tree that never crosses the seed seams; the primal edges it
  // does not cross form a cut graph containing the seeds.
  std::unordered_map<EdgeKey, const EdgeIncidence*, EdgeKeyHash> by_key;
  for (const EdgeIncidence& e : edges) by_key.emplace(e.key, &e);
  std::vector<bool> visited(mesh.face_count(), false);
  std::unordered_set<EdgeKey, EdgeKeyHash> crossed;
  std::queue<int> q;
  q.push(0);
  visited[0] = true;
  while (!q.empty()) {
    const int f = q.front();
    q.pop();
    for (int c = 0; c < 3; ++c) {
      const EdgeKey k(mesh.face(f)[c], mesh.face(f)[(c + 1) % 3]);
      if (seed.count(k)) continue;
      for (int g : by_key.at(k)->faces) {
        if (!visited[static_cast<std::size_t>(g)]) {
          visited[static_cast<std::size_t>(g)] = true;
          crossed.insert(k);
          q.push(g);
        }
      }
    }
  }
  std::unordered_set<EdgeKey, EdgeKeyHash> graph;
  std::vector<int> degree(mesh.vertex_count(), 0);
  for (const EdgeIncidence& e : edges) {
    if (e.faces.size() == 1 || !crossed.count(e.key)) {
      if (e.faces.size() == 2) graph.insert(e.key);
      ++degree[static_cast<std::size_t>(e.key.lo)];
      ++degree[static_cast<std::size_t>(e.key.hi)];
    }
  }
  // Prune dangling branches that are not seeds.
  std::vector<std::vector<EdgeKey>> incident(mesh.vertex_count());
  for (const EdgeKey& e : graph) {
    incident[static_cast<std::size_t>(e.lo)].push_back(e);
    incident[static_cast<std::size_t>(e.hi)].push_back(e);
  }
  std::vector<int> leaves;
  for (std::size_t v = 0; v < degree.size(); ++v)
    if (degree[v] == 1) leaves.push_back(static_cast<int>(v));
  while (!leaves.empty()) {
    const int v = leaves.back();
    leaves.pop_back();
    if (degree[static_cast<std::size_t>(v)] != 1) continue;
    for (const EdgeKey& e : incident[static_cast<std::size_t>(v)]) {
      if (!graph.count(e) || seed.count(e)) continue;
      graph.erase(e);
      const int w = e.lo == v ? e.hi : e.lo;
      --degree[static_cast<std::size_t>(v)];
      if (--degree[static_cast<std::size_t>(w)] == 1) leaves.push_back(w);
      break;
    }
  }

  CutMesh out = split_along(mesh, edges, graph);
  if (!is_disk(out.mesh)) throw GeometryError("seam cutting did not produce a disk");
  return out;
}


namespace {

using SpMat = Eigen::SparseMatrix<double>;

// Boundary loop of a disk in face-winding order.
std::vector<int> boundary_loop(const TriMesh& mesh) {
  std::unordered_map<int, int> next;
  std::unordered_set<EdgeKey, EdgeKeyHash> boundary;
  for (const EdgeIncidence& e : mesh.edges())
    if (e.faces.size() == 1) boundary.insert(e.key);
  for (const Face& f : mesh.faces()) {
    for (int c = 0; c < 3; ++c) {
      const int a = f[c], b = f[(c + 1) % 3];
      if (boundary.count(EdgeKey(a, b))) next[a] = b;
    }
  }
  int start = std::numeric_limits<int>::max();
  for (const auto& [a, b] : next) start = std::min(start, a);
  std::vector<int> loop{start};
  for (int v = next.at(start); v != start; v = next.at(v)) {
    loop.push_back(v);
    if (loop.size() > next.size()) throw GeometryError("boundary loop is not simple");
  }
  if (loop.size() != next.size()) throw GeometryError("disk has more than one boundary loop");
  return loop;
}

// Tutte embedding: boundary on a circle by arclength, interior vertices at
// the average of their neighbours.
std::vector<Vec2> tutte(const TriMesh& mesh, const std::vector<int>& loop, double radius) {
  const std::size_t n = mesh.vertex_count();
  std::vector<Vec2> uv(n, Vec2::Zero());
  std::vector<int> fixed(n, 0);
  double perimeter = 0.0;
  for (std::size_t i = 0; i < loop.size(); ++i)
    perimeter += (mesh.position(loop[i]) - mesh.position(loop[(i + 1) % loop.size()])).norm();
  double s = 0.0;
  for (std::size_t i = 0; i < loop.size(); ++i) {
    const double a = 2.0 * std::numbers::pi * s / perimeter;
    uv[static_cast<std::size_t>(loop[i])] = radius * Vec2(std::cos(a), std::sin(a));
    fixed[static_cast<std::size_t>(loop[i])] = 1;
    s += (mesh.position(loop[i]) - mesh.position(loop[(i + 1) % loop.size()])).norm();
  }
  std::vector<int> index(n, -1);
  int m = 0;
  for (std::size_t v = 0; v < n; ++v)
    if (!fixed[v]) index[v] = m++;
  if (m == 0) return uv;
  const auto nbr = vertex_neighbors(mesh);
  std::vector<Eigen::Triplet<double>> trip;
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(m, 2);
  for (std::size_t v = 0; v < n; ++v) {
    if (fixed[v]) continue;
    const int i = index[v];
    trip.emplace_back(i, i, static_cast<double>(nbr[v].size()));
    for (int w : nbr[v]) {
      if (fixed[static_cast<std::size_t>(w)]) {
        rhs.row(i) += uv[static_cast<std::size_t>(w)].transpose();
      } else {
        trip.emplace_back(i, index[static_cast<std::size_t>(w)], -1.0);
      }
    }
  }
  SpMat A(m, m);
  A.setFromTriplets(trip.begin(), trip.end());
  Eigen::SimplicialLDLT<SpMat> solver(A);
  if (solver.info() != Eigen::Success) throw GeometryError("Tutte system factorization failed");
  const Eigen::MatrixXd x = solver.solve(rhs);
  for (std::size_t v = 0; v < n; ++v)
    if (!fixed[v]) uv[v] = x.row(index[v]).transpose();
  return uv;
}

constexpr double kMinStep = 1.0 / 1024.0;

int count_flips(const TriMesh& mesh, const std::vector<Vec2>& uv) {
  int flipped = 0;
  for (const Face& f : mesh.faces()) {
    if (predicates::orient2d_fast(uv[static_cast<std::size_t>(f[0])], uv[static_cast<std::size_t>(f[1])],
                                  uv[static_cast<std::size_t>(f[2])]) <= 0.0)
      ++flipped;
  }
  return flipped;
}

struct ArapFace {
  std::array<Vec2, 3> x;       // isometric local coordinates
  std::array<double, 3> w;     // weight of the edge opposite each corner
};

double face_energy(const ArapFace& t, const Face& f, const std::vector<Vec2>& uv, const Eigen::Matrix2d& R) {
  double e = 0.0;
  for (int c = 0; c < 3; ++c) {
    const int a = (c + 1) % 3, b = (c + 2) % 3;
    const Vec2 du = uv[static_cast<std::size_t>(f[a])] - uv[static_cast<std::size_t>(f[b])];
    e += t.w[c] * (du - R * (t.x[a] - t.x[b])).squaredNorm();
  }
  return e;
}

Eigen::Matrix2d best_rotation(const ArapFace& t, const Face& f, const std::vector<Vec2>& uv) {
  Eigen::Matrix2d P = Eigen::Matrix2d::Zero();
  for (int c = 0; c < 3; ++c) {
    const int a = (c + 1) % 3, b = (c + 2) % 3;
    P += t.w[c] * (t.x[a] - t.x[b]) * (uv[static_cast<std::size_t>(f[a])] - uv[static_cast<std::size_t>(f[b])]).transpose();
  }
  Eigen::JacobiSVD<Eigen::Matrix2d> svd(P, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix2d V = svd.matrixV();
  Eigen::Matrix2d R = V * svd.matrixU().transpose();
  if (R.determinant() < 0.0) {
    V.col(1) *= -1.0;
    R = V * svd.matrixU().transpose();
  }
  return R;
}

}  // namespace

UVChart arap_parameterize(const TriMesh& disk, const ArapOptions& options) {
  if (!is_disk(disk)) throw InvalidInput("parameterization needs a topological disk; cut seams first");
  const std::size_t n = disk.vertex_count();
  const std::size_t nf = disk.face_count();
  std::vector<ArapFace> local(nf);
  double area3d = 0.0;
  for (std::size_t f = 0; f < nf; ++f) {
    const Face& t = disk.face(static_cast<int>(f));
    const Vec3 e1 = disk.position(t[1]) - disk.position(t[0]);
    const Vec3 e2 = disk.position(t[2]) - disk.position(t[0]);
    const double l1 = e1.norm();
    const double a2 = e1.cross(e2).norm();
    if (l1 == 0.0 || a2 == 0.0) throw InvalidInput("degenerate face " + std::to_string(f) + " cannot be parameterized");
    area3d += 0.5 * a2;
    local[f].x = {Vec2::Zero(), Vec2(l1, 0.0), Vec2(e1.dot(e2) / l1, a2 / l1)};
    for (int c = 0; c < 3; ++c) {
      const Vec2 u = local[f].x[(c + 1) % 3] - local[f].x[c];
      const Vec2 v = local[f].x[(c + 2) % 3] - local[f].x[c];
      const double cot = u.dot(v) / std::abs(u.x() * v.y() - u.y() * v.x());
      local[f].w[c] = std::max(0.5 * cot, kMinWeight);
    }
  }

  const std::vector<int> loop = boundary_loop(disk);
  std::vector<Vec2> uv = tutte(disk, loop, std::sqrt(area3d / std::numbers::pi));

  // Global system: weighted Laplacian with vertex 0 pinned.
  const int pin = disk.face(0)[0];
  std::vector<int> index(n, -1);
  int m = 0;
  for (std::size_t v = 0; v < n; ++v)
    if (static_cast<int>(v) != pin) index[v] = m++;
  std::vector<Eigen::Triplet<double>> trip;
  for (std::size_t f = 0; f < nf; ++f) {
    const Face& t = disk.face(static_cast<int>(f));
    for (int c = 0; c < 3; ++c) {
      const int a = t[(c + 1) % 3], b = t[(c + 2) % 3];
      const double w = local[f].w[c];
      const int ia = index[static_cast<std::size_t>(a)], ib = index[static_cast<std::size_t>(b)];
      if (ia >= 0) trip.emplace_back(ia, ia, w);
      if (ib >= 0) trip.emplace_back(ib, ib, w);
      if (ia >= 0 && ib >= 0) {
        trip.emplace_back(ia, ib, -w);
        trip.emplace_back(ib, ia, -w);
      }
    }
  }
  SpMat A(m, m);
  A.setFromTriplets(trip.begin(), trip.end());
  Eigen::SimplicialLDLT<SpMat> solver(A);
  if (solver.info() != Eigen::Success) throw GeometryError("ARAP system factorization failed");

  UVChart chart;
  std::vector<Eigen::Matrix2d> rot(nf);
  auto local_step = [&] {
    double e = 0.0;
    for (std::size_t f = 0; f < nf; ++f) {
      rot[f] = best_rotation(local[f], disk.face(static_cast<int>(f)), uv);
      e += face_energy(local[f], disk.face(static_cast<int>(f)), uv, rot[f]);
    }
    return e;
  };
  double energy = local_step();
  chart.energy_history.push_back(energy);
  for (int it = 0; it < options.max_iterations && energy > 0.0; ++it) {
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(m, 2);
    for (std::size_t f = 0; f < nf; ++f) {
      const Face& t = disk.face(static_cast<int>(f));
      for (int c = 0; c < 3; ++c) {
        const int ka = (c + 1) % 3, kb = (c + 2) % 3;
        const int a = t[ka], b = t[kb];
        const Vec2 g = local[f].w[c] * (rot[f] * (local[f].x[ka] - local[f].x[kb]));
        const int ia = index[static_cast<std::size_t>(a)], ib = index[static_cast<std::size_t>(b)];
        if (ia >= 0) rhs.row(ia) += g.transpose();
        if (ib >= 0) rhs.row(ib) -= g.transpose();
        if (ia >= 0 && ib < 0) rhs.row(ia) += local[f].w[c] * uv[static_cast<std::size_t>(b)].transpose();
        if (ib >= 0 && ia < 0) rhs.row(ib) += local[f].w[c] * uv[static_cast<std::size_t>(a)].transpose();
      }
    }
    const Eigen::MatrixXd x = solver.solve(rhs);
    const std::vector<Vec2> previous = uv;
    std::vector<Vec2> target = uv;
    for (std::size_t v = 0; v < n; ++v)
      if (index[v] >= 0) target[v] = x.row(index[v]).transpose();
    // Backtrack towards the previous iterate until no triangle inverts. The
    // global energy is a convex quadratic along the step, so any fraction of
    // it still decreases the energy.
    double alpha = 1.0;
    for (; alpha >= kMinStep; alpha *= 0.5) {
      for (std::size_t v = 0; v < n; ++v) uv[v] = previous[v] + alpha * (target[v] - previous[v]);
      if (count_flips(disk, uv) == 0) break;
    }
    if (alpha < kMinStep) {
      uv = previous;
      break;
    }
    const double next = local_step();
    if (next > energy) {
      // Round-off at convergence; keep the better iterate.
      uv = previous;
      break;
    }
    chart.energy_history.push_back(next);
    const bool done = energy - next < options.relative_tolerance * energy;
    energy = next;
    if (done) break;
  }

  double area_uv = 0.0;
  for (std::size_t f = 0; f < nf; ++f) {
    const Face& t = disk.face(static_cast<int>(f));
    area_uv += 0.5 * predicates::orient2d_fast(uv[static_cast<std::size_t>(t[0])], uv[static_cast<std::size_t>(t[1])],
                                               uv[static_cast<std::size_t>(t[2])]);
  }
  chart.raw_area_ratio = area_uv / area3d;
  const double scale = area_uv > 0.0 ? std::sqrt(area3d / area_uv) : 1.0;
  Vec2 lo(std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity());
  for (const Vec2& p : uv) lo = lo.cwiseMin(scale * p);
  chart.uv.resize(nf);
  chart.area_distortion.resize(nf);
  int flipped = 0;
  for (std::size_t f = 0; f < nf; ++f) {
    const Face& t = disk.face(static_cast<int>(f));
    for (int c = 0; c < 3; ++c) chart.uv[f][c] = scale * uv[static_cast<std::size_t>(t[c])] - lo;
    const double a = chart.signed_area(static_cast<int>(f));
    if (predicates::orient2d(chart.uv[f][0], chart.uv[f][1], chart.uv[f][2]) <= 0) ++flipped;
    chart.area_distortion[f] = std::abs(a / disk.face_area(static_cast<int>(f)) - 1.0);
    chart.max_distortion = std::max(chart.max_distortion, chart.area_distortion[f]);
  }
  if (flipped > 0) throw FlipError(std::to_string(flipped) + " triangles flipped in the parameterization", flipped);
  return chart;
}

UVChart parameterize(const TriMesh& mesh, const ArapOptions& options) {
  const CutMesh cut = cut_seams(mesh);
  UVChart chart = arap_parameterize(cut.mesh, options);
  chart.seam_edges = cut.seam_edges;
  return chart;
}

Vec3 barycentric(const UVTriangle& t, const Vec2& p) {
  const double d = predicates::orient2d_fast(t[0], t[1], t[2]);
  if (d == 0.0) throw InvalidInput("degenerate uv triangle");
  const double b1 = predicates::orient2d_fast(t[0], p, t[2]) / d;
  const double b2 = predicates::orient2d_fast(t[0], t[1], p) / d;
  return Vec3(1.0 - b1 - b2, b1, b2);
}

Vec3 uv_to_3d(const UVChart& chart, const TriMesh& mesh, int face, const Vec2& p) {
  if (face < 0 || static_cast<std::size_t>(face) >= chart.face_count() || chart.face_count() != mesh.face_count())
    throw InvalidInput("face index does not belong to the chart");
  const Vec3 b = barycentric(chart.uv[static_cast<std::size_t>(face)], p);
  constexpr double tol = 1e-9;
  if (b.minCoeff() < -tol || b.maxCoeff() > 1.0 + tol) throw InvalidInput("point lies outside the uv triangle");
  const Face& t = mesh.face(face);
  return b[0] * mesh.position(t[0]) + b[1] * mesh.position(t[1]) + b[2] * mesh.position(t[2]);
}

namespace {

bool triangle_contains(const UVTriangle& t, const Vec2& p) {
  int pos = 0, neg = 0;
  for (int c = 0; c < 3; ++c) {
    const int s = predicates::orient2d(t[c], t[(c + 1) % 3], p);
    pos += s > 0;
    neg += s < 0;
  }
  return (pos == 0 || neg == 0) && pos + neg > 0;
}

}  // namespace

std::optional<int> locate_in_chart(const UVChart& chart, const Vec2& p) {
  for (std::size_t f = 0; f < chart.face_count(); ++f)
    if (triangle_contains(chart.uv[f], p)) return static_cast<int>(f);
  return std::nullopt;
}

ChartIndex::ChartIndex(const UVChart& chart) : chart_(&chart) {
  if (chart.uv.empty()) return;
  Vec2 lo = chart.uv[0][0], hi = lo;
  double extent = 0.0;
  for (const UVTriangle& t : chart.uv) {
    Vec2 tlo = t[0], thi = t[0];
    for (const Vec2& p : t) {
      tlo = tlo.cwiseMin(p);
      thi = thi.cwiseMax(p);
    }
    lo = lo.cwiseMin(tlo);
    hi = hi.cwiseMax(thi);
    extent += (thi - tlo).maxCoeff();
  }
  cell_ = std::max(extent / static_cast<double>(chart.uv.size()), 1e-9);
  origin_ = lo;
  nx_ = std::max(1, std::min(4096, static_cast<int>((hi.x() - lo.x()) / cell_) + 1));
  ny_ = std::max(1, std::min(4096, static_cast<int>((hi.y() - lo.y()) / cell_) + 1));
  cell_ = std::max({cell_, (hi.x() - lo.x()) / nx_, (hi.y() - lo.y()) / ny_}) * (1.0 + 1e-12);
  cells_.assign(static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_), {});
  for (std::size_t f = 0; f < chart.uv.size(); ++f) {
    const UVTriangle& t = chart.uv[f];
    const auto [x0, y0] = cell_of(t[0].cwiseMin(t[1]).cwiseMin(t[2]));
    const auto [x1, y1] = cell_of(t[0].cwiseMax(t[1]).cwiseMax(t[2]));
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x) cells_[static_cast<std::size_t>(y) * static_cast<std::size_t>(nx_) + x].push_back(static_cast<int>(f));
  }
}

std::pair<int, int> ChartIndex::cell_of(const Vec2& p) const {
  const int x = static_cast<int>(std::floor((p.x() - origin_.x()) / cell_));
  const int y = static_cast<int>(std::floor((p.y() - origin_.y()) / cell_));
  return {std::clamp(x, 0, nx_ - 1), std::clamp(y, 0, ny_ - 1)};
}

std::optional<int> ChartIndex::locate(const Vec2& p) const {
  if (cells_.empty()) return std::nullopt;
  const auto [x, y] = cell_of(p);
  for (int f : cells_[static_cast<std::size_t>(y) * static_cast<std::size_t>(nx_) + x])
    if (triangle_contains(chart_->uv[static_cast<std::size_t>(f)], p)) return f;
  return std::nullopt;
}

std::vector<int> ChartIndex::faces_in_box(const Vec2& lo, const Vec2& hi) const {
  std::vector<int> out;
  if (cells_.empty()) return out;
  const auto [x0, y0] = cell_of(lo);
  const auto [x1, y1] = cell_of(hi);
  for (int y = y0; y <= y1; ++y)
    for (int x = x0; x <= x1; ++x)
      for (int f : cells_[static_cast<std::size_t>(y) * static_cast<std::size_t>(nx_) + x]) {
        const UVTriangle& t = chart_->uv[static_cast<std::size_t>(f)];
        const Vec2 tlo = t[0].cwiseMin(t[1]).cwiseMin(t[2]);
        const Vec2 thi = t[0].cwiseMax(t[1]).cwiseMax(t[2]);
        if (tlo.x() <= hi.x() && tlo.y() <= hi.y() && thi.x() >= lo.x() && thi.y() >= lo.y()) out.push_back(f);
      }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace texprint
