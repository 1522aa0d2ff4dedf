// Constrained Delaunay triangulation: Bowyer-Watson insertion inside a super
// triangle, constraint recovery by cavity retriangulation, then region
// extraction by flood fill across boundary edges.

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <unordered_map>

#include "texprint/error.hpp"
#include "texprint/geom2d.hpp"
#include "texprint/predicates.hpp"

namespace texprint::geom2d {
namespace {

using predicates::incircle;
using predicates::orient2d;
using Tri = std::array<int, 3>;

std::uint64_t dkey(int u, int v) { return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(u)) << 32) | static_cast<std::uint32_t>(v); }
std::pair<int, int> ukey(int u, int v) { return u < v ? std::pair{u, v} : std::pair{v, u}; }

class Mesher {
 public:
  explicit Mesher(const std::vector<Vec2>& pts) : pts_(pts) {
    double x0 = 1e300, y0 = 1e300, x1 = -1e300, y1 = -1e300;
    for (const Vec2& p : pts_) {
      x0 = std::min(x0, p.x());
      y0 = std::min(y0, p.y());
      x1 = std::max(x1, p.x());
      y1 = std::max(y1, p.y());
    }
    const Vec2 c(0.5 * (x0 + x1), 0.5 * (y0 + y1));
    const double r = std::max({x1 - x0, y1 - y0, 1e-3}) * 64.0;
    n_real_ = static_cast<int>(pts_.size());
    pts_.emplace_back(c.x() - 2.0 * r, c.y() - r);
    pts_.emplace_back(c.x() + 2.0 * r, c.y() - r);
    pts_.emplace_back(c.x(), c.y() + 2.0 * r);
    tris_.push_back({n_real_, n_real_ + 1, n_real_ + 2});
  }

  void insert_all() {
    for (int i = 0; i < n_real_; ++i) insert(i);
  }

  void recover(int a, int b) {
    rebuild_edges();
    if (edge_owner_.count(dkey(a, b)) || edge_owner_.count(dkey(b, a))) return;
    // Triangles whose interior the open segment ab passes through.
    std::vector<int> crossed;
    for (int t = 0; t < static_cast<int>(tris_.size()); ++t) {
      const Tri& tr = tris_[static_cast<std::size_t>(t)];
      for (int k = 0; k < 3; ++k) {
        const int u = tr[static_cast<std::size_t>(k)];
        const int v = tr[static_cast<std::size_t>((k + 1) % 3)];
        if (u == a || u == b || v == a || v == b) continue;
        const int o1 = orient2d(pts_[a], pts_[b], pts_[u]);
        const int o2 = orient2d(pts_[a], pts_[b], pts_[v]);
        const int o3 = orient2d(pts_[u], pts_[v], pts_[a]);
        const int o4 = orient2d(pts_[u], pts_[v], pts_[b]);
        if (o1 * o2 < 0 && o3 * o4 < 0) {
          crossed.push_back(t);
          break;
        }
      }
    }
    if (crossed.empty()) throw GeometryError("constraint recovery found no crossed triangles");
    // Boundary of the union, as a CCW cycle of directed edges.
    std::set<std::uint64_t> inner;
    for (int t : crossed) {
      const Tri& tr = tris_[static_cast<std::size_t>(t)];
      for (int k = 0; k < 3; ++k) inner.insert(dkey(tr[static_cast<std::size_t>(k)], tr[static_cast<std::size_t>((k + 1) % 3)]));
    }
    std::unordered_map<int, int> next;
    for (int t : crossed) {
      const Tri& tr = tris_[static_cast<std::size_t>(t)];
      for (int k = 0; k < 3; ++k) {
        const int u = tr[static_cast<std::size_t>(k)];
        const int v = tr[static_cast<std::size_t>((k + 1) % 3)];
        if (!inner.count(dkey(v, u))) next[u] = v;
      }
    }
    std::vector<int> right;  // a -> b along the cycle
    std::vector<int> left;   // b -> a along the cycle
    for (int v = next.at(a); v != b; v = next.at(v)) right.push_back(v);
    for (int v = next.at(b); v != a; v = next.at(v)) left.push_back(v);
    std::sort(crossed.begin(), crossed.end());
    for (auto it = crossed.rbegin(); it != crossed.rend(); ++it) {
      tris_[static_cast<std::size_t>(*it)] = tris_.back();
      tris_.pop_back();
    }
    fill_pseudo_polygon(a, b, right);
    fill_pseudo_polygon(b, a, left);
  }

  // Keeps triangles inside the even-odd region bounded by `boundary`, found by
  // flood fill from the super-triangle corners.
  std::vector<Tri> region(const std::set<std::pair<int, int>>& boundary) {
    rebuild_edges();
    const std::size_t n = tris_.size();
    std::vector<int> state(n, -1);
    std::vector<std::size_t> stack;
    for (std::size_t t = 0; t < n; ++t) {
      for (int v : tris_[t]) {
        if (v >= n_real_ && state[t] < 0) {
          state[t] = 0;
          stack.push_back(t);
        }
      }
    }
    while (!stack.empty()) {
      const std::size_t t = stack.back();
      stack.pop_back();
      const Tri& tr = tris_[t];
      for (int k = 0; k < 3; ++k) {
        const int u = tr[static_cast<std::size_t>(k)];
        const int v = tr[static_cast<std::size_t>((k + 1) % 3)];
        const auto it = edge_owner_.find(dkey(v, u));
        if (it == edge_owner_.end()) continue;
        const std::size_t o = static_cast<std::size_t>(it->second);
        const int s = boundary.count(ukey(u, v)) ? 1 - state[t] : state[t];
        if (state[o] < 0) {
          state[o] = s;
          stack.push_back(o);
        } else if (state[o] != s) {
          throw GeometryError("triangulation region is inconsistent (boundary rings not closed)");
        }
      }
    }
    std::vector<Tri> out;
    for (std::size_t t = 0; t < n; ++t) {
      if (state[t] == 1) out.push_back(tris_[t]);
    }
    return out;
  }

  const std::vector<Vec2>& points() const { return pts_; }

 private:
  void insert(int p) {
    std::vector<int> bad;
    for (int t = 0; t < static_cast<int>(tris_.size()); ++t) {
      const Tri& tr = tris_[static_cast<std::size_t>(t)];
      if (incircle(pts_[tr[0]], pts_[tr[1]], pts_[tr[2]], pts_[p]) > 0) bad.push_back(t);
    }
    std::set<std::uint64_t> cavity;
    for (int t : bad) {
      const Tri& tr = tris_[static_cast<std::size_t>(t)];
      for (int k = 0; k < 3; ++k) cavity.insert(dkey(tr[static_cast<std::size_t>(k)], tr[static_cast<std::size_t>((k + 1) % 3)]));
    }
    std::vector<Tri> fresh;
    for (int t : bad) {
      const Tri& tr = tris_[static_cast<std::size_t>(t)];
      for (int k = 0; k < 3; ++k) {
        const int u = tr[static_cast<std::size_t>(k)];
        const int v = tr[static_cast<std::size_t>((k + 1) % 3)];
        if (!cavity.count(dkey(v, u))) fresh.push_back({u, v, p});
      }
    }
    for (auto it = bad.rbegin(); it != bad.rend(); ++it) {
      tris_[static_cast<std::size_t>(*it)] = tris_.back();
      tris_.pop_back();
    }
    tris_.insert(tris_.end(), fresh.begin(), fresh.end());
  }

  // Delaunay triangulation of the polygon a, chain..., b closed by edge b-a;
  // the chain lies to the left of a->b... walking a->chain->b is CCW.
  void fill_pseudo_polygon(int a, int b, const std::vector<int>& chain) {
    if (chain.empty()) return;
    std::size_t ci = 0;
    for (std::size_t i = 1; i < chain.size(); ++i) {
      // Triangle (a, chain[ci], b) is CCW.
      if (incircle(pts_[a], pts_[chain[ci]], pts_[b], pts_[chain[i]]) > 0) ci = i;
    }
    const int c = chain[ci];
    tris_.push_back({a, c, b});
    fill_pseudo_polygon(a, c, std::vector<int>(chain.begin(), chain.begin() + static_cast<long>(ci)));
    fill_pseudo_polygon(c, b, std::vector<int>(chain.begin() + static_cast<long>(ci) + 1, chain.end()));
  }

  void rebuild_edges() {
    edge_owner_.clear();
    for (int t = 0; t < static_cast<int>(tris_.size()); ++t) {
      const Tri& tr = tris_[static_cast<std::size_t>(t)];
      for (int k = 0; k < 3; ++k) edge_owner_[dkey(tr[static_cast<std::size_t>(k)], tr[static_cast<std::size_t>((k + 1) % 3)])] = t;
    }
  }

  std::vector<Vec2> pts_;
  int n_real_ = 0;
  std::vector<Tri> tris_;
  std::unordered_map<std::uint64_t, int> edge_owner_;
};

bool strictly_between(const Vec2& a, const Vec2& b, const Vec2& p) {
  if (orient2d(a, b, p) != 0) return false;
  if (a.x() != b.x()) return std::min(a.x(), b.x()) < p.x() && p.x() < std::max(a.x(), b.x());
  return std::min(a.y(), b.y()) < p.y() && p.y() < std::max(a.y(), b.y());
}

// Splits every segment at input points lying exactly on its interior.
std::vector<std::pair<int, int>> split_segments(const std::vector<Vec2>& pts, const std::vector<std::pair<int, int>>& segs) {
  std::set<std::pair<int, int>> out;
  for (auto [a, b] : segs) {
    std::vector<std::pair<double, int>> on;
    const Vec2 d = pts[static_cast<std::size_t>(b)] - pts[static_cast<std::size_t>(a)];
    for (int i = 0; i < static_cast<int>(pts.size()); ++i) {
      if (i == a || i == b) continue;
      if (strictly_between(pts[static_cast<std::size_t>(a)], pts[static_cast<std::size_t>(b)], pts[static_cast<std::size_t>(i)])) {
        on.emplace_back((pts[static_cast<std::size_t>(i)] - pts[static_cast<std::size_t>(a)]).dot(d), i);
      }
    }
    std::sort(on.begin(), on.end());
    int prev = a;
    for (const auto& [_, i] : on) {
      out.insert(ukey(prev, i));
      prev = i;
    }
    out.insert(ukey(prev, b));
  }
  return {out.begin(), out.end()};
}

void check_no_crossings(const std::vector<Vec2>& pts, const std::vector<std::pair<int, int>>& segs) {
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const Vec2& a = pts[static_cast<std::size_t>(segs[i].first)];
    const Vec2& b = pts[static_cast<std::size_t>(segs[i].second)];
    for (std::size_t j = i + 1; j < segs.size(); ++j) {
      const Vec2& c = pts[static_cast<std::size_t>(segs[j].first)];
      const Vec2& d = pts[static_cast<std::size_t>(segs[j].second)];
      if (std::max(a.x(), b.x()) < std::min(c.x(), d.x()) || std::max(c.x(), d.x()) < std::min(a.x(), b.x()) ||
          std::max(a.y(), b.y()) < std::min(c.y(), d.y()) || std::max(c.y(), d.y()) < std::min(a.y(), b.y())) {
        continue;
      }
      const int o1 = orient2d(a, b, c), o2 = orient2d(a, b, d);
      const int o3 = orient2d(c, d, a), o4 = orient2d(c, d, b);
      if (o1 * o2 < 0 && o3 * o4 < 0) throw InvalidInput("triangulation constraints cross each other");
    }
  }
}

// Lawson flips of unconstrained edges until every edge is locally Delaunay.
void make_delaunay(const std::vector<Vec2>& pts, std::vector<Tri>& tris, const std::set<std::pair<int, int>>& fixed) {
  for (int pass = 0; pass < 64; ++pass) {
    std::map<std::uint64_t, std::pair<int, int>> owner;  // directed edge -> (tri, corner opposite)
    for (int t = 0; t < static_cast<int>(tris.size()); ++t) {
      for (int k = 0; k < 3; ++k) {
        owner[dkey(tris[static_cast<std::size_t>(t)][static_cast<std::size_t>(k)], tris[static_cast<std::size_t>(t)][static_cast<std::size_t>((k + 1) % 3)])] = {t, (k + 2) % 3};
      }
    }
    std::vector<bool> touched(tris.size(), false);
    bool flipped = false;
    for (const auto& [key, val] : owner) {
      const int u = static_cast<int>(key >> 32);
      const int v = static_cast<int>(key & 0xffffffffu);
      if (u > v || fixed.count(ukey(u, v))) continue;
      const auto it = owner.find(dkey(v, u));
      if (it == owner.end()) continue;
      const auto [t0, k0] = val;
      const auto [t1, k1] = it->second;
      if (touched[static_cast<std::size_t>(t0)] || touched[static_cast<std::size_t>(t1)]) continue;
      const int w0 = tris[static_cast<std::size_t>(t0)][static_cast<std::size_t>(k0)];
      const int w1 = tris[static_cast<std::size_t>(t1)][static_cast<std::size_t>(k1)];
      if (incircle(pts[static_cast<std::size_t>(u)], pts[static_cast<std::size_t>(v)], pts[static_cast<std::size_t>(w0)],
                   pts[static_cast<std::size_t>(w1)]) <= 0) {
        continue;
      }
      tris[static_cast<std::size_t>(t0)] = {w0, u, w1};
      tris[static_cast<std::size_t>(t1)] = {w1, v, w0};
      touched[static_cast<std::size_t>(t0)] = touched[static_cast<std::size_t>(t1)] = true;
      flipped = true;
    }
    if (!flipped) return;
  }
}

}  // namespace

double Triangulation2::area() const {
  double a = 0.0;
  auto add = [&](const std::array<int, 3>& t) {
    a += 0.5 * predicates::orient2d_fast(points[static_cast<std::size_t>(t[0])], points[static_cast<std::size_t>(t[1])],
                                         points[static_cast<std::size_t>(t[2])]);
  };
  for (const auto& t : triangles) add(t);
  for (const auto& t : slivers) add(t);
  return a;
}

Triangulation2 cdt_indexed(const CdtInput& input) {
  const std::vector<Vec2>& pts = input.points;
  {
    std::set<std::pair<double, double>> seen;
    for (const Vec2& p : pts) {
      if (!std::isfinite(p.x()) || !std::isfinite(p.y())) throw InvalidInput("triangulation point is not finite");
      if (!seen.emplace(p.x(), p.y()).second) throw InvalidInput("triangulation input has duplicate points");
    }
  }
  auto check_index = [&](int i) {
    if (i < 0 || i >= static_cast<int>(pts.size())) throw InvalidInput("triangulation index out of range");
  };
  std::vector<std::pair<int, int>> boundary_raw;
  for (const auto& ring : input.boundary_rings) {
    if (ring.size() < 3) throw InvalidInput("triangulation boundary ring has fewer than 3 points");
    for (std::size_t i = 0; i < ring.size(); ++i) {
      check_index(ring[i]);
      boundary_raw.emplace_back(ring[i], ring[(i + 1) % ring.size()]);
    }
  }
  std::vector<std::pair<int, int>> constraint_raw;
  for (const auto& c : input.constraints) {
    check_index(c[0]);
    check_index(c[1]);
    if (c[0] == c[1]) throw InvalidInput("degenerate triangulation constraint");
    constraint_raw.emplace_back(c[0], c[1]);
  }
  const auto boundary = split_segments(pts, boundary_raw);
  auto all = boundary;
  const auto extra = split_segments(pts, constraint_raw);
  all.insert(all.end(), extra.begin(), extra.end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  check_no_crossings(pts, all);

  Triangulation2 out;
  out.points = pts;
  if (pts.size() < 3) return out;
  Mesher m(pts);
  m.insert_all();
  for (const auto& [a, b] : all) m.recover(a, b);
  std::set<std::pair<int, int>> boundary_set;
  for (const auto& e : boundary) {
    // Even-odd: an edge listed twice cancels.
    if (!boundary_set.insert(e).second) boundary_set.erase(e);
  }
  std::vector<Tri> tris = m.region(boundary_set);
  const std::set<std::pair<int, int>> fixed(all.begin(), all.end());
  make_delaunay(pts, tris, fixed);
  for (const Tri& t : tris) {
    const double a2 = predicates::orient2d_fast(pts[static_cast<std::size_t>(t[0])], pts[static_cast<std::size_t>(t[1])],
                                                pts[static_cast<std::size_t>(t[2])]);
    (0.5 * a2 < kSliverArea ? out.slivers : out.triangles).push_back(t);
  }
  for (const auto& [a, b] : all) out.constrained_edges.push_back({a, b});
  return out;
}

Triangulation2 cdt(const Polygon2& region, std::span<const Segment> extra_constraints) {
  CdtInput in;
  std::map<std::pair<double, double>, int> index;
  auto id = [&](const Vec2& p) {
    const auto [it, fresh] = index.emplace(std::pair{p.x(), p.y()}, static_cast<int>(in.points.size()));
    if (fresh) in.points.push_back(p);
    return it->second;
  };
  for (std::size_t r = 0; r < region.ring_count(); ++r) {
    std::vector<int> ring;
    for (const Vec2& p : region.ring(r)) ring.push_back(id(p));
    in.boundary_rings.push_back(std::move(ring));
  }
  for (const Segment& s : extra_constraints) {
    const int a = id(s.a);
    const int b = id(s.b);
    if (a != b) in.constraints.push_back({a, b});
  }
  return cdt_indexed(in);
}

}  // namespace texprint::geom2d
