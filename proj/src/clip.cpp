// Polygon booleans by intersection-vertex traversal (Greiner-Hormann), made
// total by symbolic perturbation of the clip operand.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include <boost/multiprecision/cpp_int.hpp>

#include "texprint/error.hpp"
#include "texprint/geom2d.hpp"
#include "texprint/predicates.hpp"

namespace texprint::geom2d {
namespace {

using predicates::orient2d;
using predicates::orient2d_perturbed;
using Rational = boost::multiprecision::cpp_rational;

constexpr double kU = std::numeric_limits<double>::epsilon();

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

Rational rcross(const Rational& ax, const Rational& ay, const Rational& bx, const Rational& by) {
  return ax * by - ay * bx;
}

bool lex_less(const Vec2& a, const Vec2& b) { return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y()); }

struct Box {
  double x0, y0, x1, y1;
};
Box box_of(const Vec2& a, const Vec2& b) {
  return {std::min(a.x(), b.x()), std::min(a.y(), b.y()), std::max(a.x(), b.x()), std::max(a.y(), b.y())};
}
bool overlaps(const Box& a, const Box& b) { return a.x0 <= b.x1 && b.x0 <= a.x1 && a.y0 <= b.y1 && b.y0 <= a.y1; }

Box ring_box(std::span<const Vec2> r) {
  Box b{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
        -std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const Vec2& p : r) {
    b.x0 = std::min(b.x0, p.x());
    b.y0 = std::min(b.y0, p.y());
    b.x1 = std::max(b.x1, p.x());
    b.y1 = std::max(b.y1, p.y());
  }
  return b;
}

// Position of a crossing along the edge (e0 -> e1) it lies on, as the
// symbolic expansion key0 + key1*eps + key2*eps^2 where, with
// e = e1 - e0, f = q1 - q0, D = cross(e, f):
//   key0 = cross(q0 - e0, f) / D
//   key1 = sign * f.y / D,  key2 = -sign * f.x / D
// sign = +1 when the crossing segment (q) is the displaced operand and -1
// when the edge itself is displaced.
struct SortKey {
  Vec2 e0, e1, q0, q1;
  int sign = 1;
  double approx = 0.0;
  double err = 0.0;
  bool reliable = false;
};

SortKey make_key(const Vec2& e0, const Vec2& e1, const Vec2& q0, const Vec2& q1, int sign) {
  SortKey k{e0, e1, q0, q1, sign};
  const Vec2 e = e1 - e0;
  const Vec2 f = q1 - q0;
  const Vec2 w = q0 - e0;
  const double num = cross(w, f);
  const double den = cross(e, f);
  const double num_err = 8.0 * kU * (std::abs(w.x() * f.y()) + std::abs(w.y() * f.x()));
  const double den_err = 8.0 * kU * (std::abs(e.x() * f.y()) + std::abs(e.y() * f.x()));
  if (std::abs(den) > 2.0 * den_err) {
    k.approx = num / den;
    k.err = 2.0 * (num_err + std::abs(k.approx) * den_err) / (std::abs(den) - den_err) + 4.0 * kU * std::abs(k.approx);
    k.reliable = true;
  }
  return k;
}

int cmp_frac(const Rational& na, const Rational& da, const Rational& nb, const Rational& db) {
  // na/da vs nb/db
  const Rational lhs = na * db;
  const Rational rhs = nb * da;
  int c = lhs < rhs ? -1 : (lhs > rhs ? 1 : 0);
  if ((da < 0) != (db < 0)) c = -c;
  return c;
}

int compare_keys(const SortKey& a, const SortKey& b) {
  if (a.reliable && b.reliable && std::abs(a.approx - b.approx) > a.err + b.err) {
    return a.approx < b.approx ? -1 : 1;
  }
  struct Exact {
    Rational n0, d, fx, fy;
  };
  auto exact = [](const SortKey& k) {
    const Rational e0x(k.e0.x()), e0y(k.e0.y()), e1x(k.e1.x()), e1y(k.e1.y());
    const Rational q0x(k.q0.x()), q0y(k.q0.y()), q1x(k.q1.x()), q1y(k.q1.y());
    const Rational ex = e1x - e0x, ey = e1y - e0y, fx = q1x - q0x, fy = q1y - q0y;
    Exact r;
    r.n0 = rcross(q0x - e0x, q0y - e0y, fx, fy);
    r.d = rcross(ex, ey, fx, fy);
    r.fx = k.sign > 0 ? Rational(-fx) : fx;  // key2 numerator
    r.fy = k.sign > 0 ? fy : Rational(-fy);  // key1 numerator
    return r;
  };
  const Exact x = exact(a);
  const Exact y = exact(b);
  if (int c = cmp_frac(x.n0, x.d, y.n0, y.d); c != 0) return c;
  if (int c = cmp_frac(x.fy, x.d, y.fy, y.d); c != 0) return c;
  return cmp_frac(x.fx, x.d, y.fx, y.d);
}

// Perturbed crossing test between subject edge (a1, a2) and clip edge
// (b1, b2) displaced by s.
bool edges_cross(const Vec2& a1, const Vec2& a2, const Vec2& b1, const Vec2& b2) {
  const int s1 = orient2d_perturbed(a1, a2, b1, +1);
  const int s2 = orient2d_perturbed(a1, a2, b2, +1);
  if (s1 == s2) return false;
  const int s3 = orient2d_perturbed(b1, b2, a1, -1);
  const int s4 = orient2d_perturbed(b1, b2, a2, -1);
  return s3 != s4;
}

// Limit position of the crossing, computed from the unordered subject edge so
// both faces sharing an edge obtain bit-identical values.
void crossing_point(const Vec2& a1, const Vec2& a2, const Vec2& b1, const Vec2& b2, Crossing& c) {
  const bool fwd = lex_less(a1, a2);
  const Vec2& p = fwd ? a1 : a2;
  const Vec2& q = fwd ? a2 : a1;
  c.subject_edge_lex_forward = fwd;
  if (orient2d(b1, b2, p) == 0) {
    c.point = p;
    c.subject_t_lex = 0.0;
    return;
  }
  if (orient2d(b1, b2, q) == 0) {
    c.point = q;
    c.subject_t_lex = 1.0;
    return;
  }
  const Vec2 eb = b2 - b1;
  const double den = cross(q - p, eb);
  double t = den != 0.0 ? cross(b1 - p, eb) / den : 0.5;
  t = std::clamp(t, 0.0, 1.0);
  c.subject_t_lex = t;
  if (orient2d(p, q, b1) == 0) {
    c.point = b1;
  } else if (orient2d(p, q, b2) == 0) {
    c.point = b2;
  } else {
    c.point = p + t * (q - p);
  }
}

enum class Op { Intersect, Difference };

struct Fragment {
  int start = -1;  // crossing id, -1 for a closed ring without crossings
  int end = -1;
  Ring points;     // includes the start crossing point, excludes the end
  bool used = false;
};

void collect_fragments(std::span<const Ring> rings, const std::vector<RingSplit>& splits,
                       const std::vector<Crossing>& crossings, bool keep_inside, bool reverse,
                       std::vector<Fragment>& out) {
  for (std::size_t r = 0; r < rings.size(); ++r) {
    const Ring& ring = rings[r];
    const RingSplit& split = splits[r];
    const std::size_t n = ring.size();
    if (split.crossing_count() == 0) {
      if (split.start_inside == keep_inside) {
        Fragment f;
        f.points = ring;
        if (reverse) std::reverse(f.points.begin(), f.points.end());
        out.push_back(std::move(f));
      }
      continue;
    }
    // Flatten the node sequence: vertex i then crossings on edge i.
    struct Node {
      int crossing;  // -1 for a ring vertex
      std::size_t vertex;
    };
    std::vector<Node> nodes;
    for (std::size_t i = 0; i < n; ++i) {
      nodes.push_back({-1, i});
      for (int c : split.edge_crossings[i]) nodes.push_back({c, 0});
    }
    // Inside status after each node, walking from vertex 0.
    std::vector<bool> status(nodes.size());
    bool inside = split.start_inside;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      if (nodes[k].crossing >= 0) inside = !inside;
      status[k] = inside;
    }
    const std::size_t m = nodes.size();
    for (std::size_t k = 0; k < m; ++k) {
      if (nodes[k].crossing < 0 || status[k] != keep_inside) continue;
      Fragment f;
      f.start = nodes[k].crossing;
      f.points.push_back(crossings[static_cast<std::size_t>(f.start)].point);
      std::size_t j = (k + 1) % m;
      while (nodes[j].crossing < 0) {
        f.points.push_back(ring[nodes[j].vertex]);
        j = (j + 1) % m;
      }
      f.end = nodes[j].crossing;
      if (reverse) {
        // Walk the same piece backwards: start at `end`, finish before `start`.
        Ring pts;
        pts.push_back(crossings[static_cast<std::size_t>(f.end)].point);
        for (std::size_t i = f.points.size(); i-- > 1;) pts.push_back(f.points[i]);
        std::swap(f.start, f.end);
        f.points = std::move(pts);
      }
      out.push_back(std::move(f));
    }
  }
}

Ring clean_ring(const Ring& r) {
  Ring out;
  for (const Vec2& p : r) {
    if (out.empty() || p != out.back()) out.push_back(p);
  }
  while (out.size() > 1 && out.front() == out.back()) out.pop_back();
  return out;
}

struct Edge {
  Vec2 a, b;
  Box box;
};

std::vector<Edge> ring_edges(const std::vector<Ring>& rings) {
  std::vector<Edge> out;
  for (const Ring& r : rings)
    for (std::size_t i = 0; i < r.size(); ++i) {
      const Vec2& a = r[i];
      const Vec2& b = r[(i + 1) % r.size()];
      out.push_back({a, b, box_of(a, b)});
    }
  return out;
}

// Whether p lies on segment e strictly between its endpoints, allowing
// `tol` of slack for rounded crossing points.
bool inside_edge(const Edge& e, const Vec2& p, double tol) {
  const Vec2 d = e.b - e.a;
  const double t = (p - e.a).dot(d);
  if (!(t > 0 && t < d.dot(d)) || p == e.a || p == e.b) return false;
  if (predicates::orient2d(e.a, e.b, p) == 0) return true;
  return std::abs(cross(d, p - e.a)) <= tol * d.norm();
}

bool touch(const Edge& e, const Edge& f, double tol) {
  return inside_edge(e, f.a, tol) || inside_edge(e, f.b, tol) || inside_edge(f, e.a, tol) || inside_edge(f, e.b, tol);
}

double snap_tolerance(const std::vector<Ring>& rings) {
  double extent = 1.0;
  for (const Ring& r : rings)
    for (const Vec2& p : r) extent = std::max(extent, p.cwiseAbs().maxCoeff());
  return 1e-12 * extent;
}

// Rings that pass through one point twice, or have a vertex on another
// edge, need rebuilding.
bool needs_rebuild(const std::vector<Ring>& rings) {
  std::vector<Vec2> pts;
  for (const Ring& r : rings) pts.insert(pts.end(), r.begin(), r.end());
  std::sort(pts.begin(), pts.end(), lex_less);
  if (std::adjacent_find(pts.begin(), pts.end()) != pts.end()) return true;
  const double tol = snap_tolerance(rings);
  std::vector<Edge> edges = ring_edges(rings);
  std::sort(edges.begin(), edges.end(), [](const Edge& x, const Edge& y) { return x.box.x0 < y.box.x0; });
  for (std::size_t i = 0; i < edges.size(); ++i)
    for (std::size_t j = i + 1; j < edges.size() && edges[j].box.x0 <= edges[i].box.x1 + tol; ++j)
      if (edges[i].box.y0 <= edges[j].box.y1 + tol && edges[j].box.y0 <= edges[i].box.y1 + tol && touch(edges[i], edges[j], tol))
        return true;
  return false;
}

// Splits every edge at the ring vertices lying on it, cancels opposite edge
// pairs and chains what is left into loops, turning as far clockwise as
// possible at each vertex so loops that touch come out separate.
std::vector<Ring> rebuild(const std::vector<Ring>& rings) {
  std::vector<Vec2> pts;
  for (const Ring& r : rings) pts.insert(pts.end(), r.begin(), r.end());
  std::sort(pts.begin(), pts.end(), lex_less);
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  auto id = [&](const Vec2& p) { return static_cast<int>(std::lower_bound(pts.begin(), pts.end(), p, lex_less) - pts.begin()); };

  const double tol = snap_tolerance(rings);
  std::map<std::pair<int, int>, int> count;
  for (const Edge& e : ring_edges(rings)) {
    const Vec2 d = e.b - e.a;
    const double len = d.dot(d);
    std::vector<std::pair<double, int>> stops{{0.0, id(e.a)}, {len, id(e.b)}};
    for (std::size_t k = 0; k < pts.size(); ++k)
      if (inside_edge(e, pts[k], tol)) stops.emplace_back((pts[k] - e.a).dot(d), static_cast<int>(k));
    std::sort(stops.begin(), stops.end());
    for (std::size_t k = 0; k + 1 < stops.size(); ++k) {
      const int u = stops[k].second, v = stops[k + 1].second;
      auto back = count.find({v, u});
      if (back != count.end() && back->second > 0) --back->second;
      else ++count[{u, v}];
    }
  }

  std::map<int, std::vector<int>> out_edges;
  std::size_t left = 0;
  for (const auto& [e, n] : count)
    for (int k = 0; k < n; ++k, ++left) out_edges[e.first].push_back(e.second);

  std::vector<Ring> result;
  while (left > 0) {
    auto it = out_edges.begin();
    while (it->second.empty()) ++it;
    const int start = it->first;
    int prev = start, cur = it->second.back();
    it->second.pop_back();
    --left;
    Ring ring{pts[static_cast<std::size_t>(start)]};
    while (cur != start) {
      ring.push_back(pts[static_cast<std::size_t>(cur)]);
      std::vector<int>& outs = out_edges[cur];
      if (outs.empty()) throw GeometryError("polygon boolean: open boundary after cleanup");
      const Vec2 back = pts[static_cast<std::size_t>(prev)] - pts[static_cast<std::size_t>(cur)];
      const double back_angle = std::atan2(back.y(), back.x());
      std::size_t best = 0;
      double best_turn = 0;
      for (std::size_t k = 0; k < outs.size(); ++k) {
        const Vec2 d = pts[static_cast<std::size_t>(outs[k])] - pts[static_cast<std::size_t>(cur)];
        double turn = std::fmod(back_angle - std::atan2(d.y(), d.x()) + 4 * std::numbers::pi, 2 * std::numbers::pi);
        if (turn <= 0) turn = 2 * std::numbers::pi;
        if (k == 0 || turn < best_turn) {
          best = k;
          best_turn = turn;
        }
      }
      prev = cur;
      cur = outs[best];
      outs.erase(outs.begin() + static_cast<std::ptrdiff_t>(best));
      --left;
    }
    result.push_back(std::move(ring));
  }
  return result;
}

std::vector<Polygon2> assemble(std::vector<Ring> rings, double drop_area) {
  for (Ring& r : rings) r = clean_ring(r);
  if (needs_rebuild(rings)) rings = rebuild(rings);
  std::vector<Ring> outers;
  std::vector<Ring> holes;
  for (Ring& r : rings) {
    if (r.size() < 3) continue;
    const double a = signed_area(r);
    if (std::abs(a) <= drop_area) continue;
    (a > 0.0 ? outers : holes).push_back(std::move(r));
  }
  std::vector<Polygon2> out(outers.size());
  std::vector<double> outer_area(outers.size());
  for (std::size_t i = 0; i < outers.size(); ++i) {
    outer_area[i] = signed_area(outers[i]);
    out[i].outer = std::move(outers[i]);
  }
  for (Ring& h : holes) {
    int best = -1;
    for (std::size_t i = 0; i < out.size(); ++i) {
      // A hole belongs to an outer ring when none of its vertices is strictly
      // outside and at least one edge midpoint is inside.
      bool outside = false;
      for (const Vec2& p : h) {
        if (!ring_contains(out[i].outer, p)) {
          outside = true;
          break;
        }
      }
      if (outside) continue;
      bool inside = false;
      for (std::size_t k = 0; k < h.size() && !inside; ++k) {
        inside = ring_contains(out[i].outer, 0.5 * (h[k] + h[(k + 1) % h.size()]));
      }
      if (!inside) continue;
      if (best < 0 || outer_area[i] < outer_area[static_cast<std::size_t>(best)]) best = static_cast<int>(i);
    }
    if (best < 0) throw GeometryError("polygon boolean produced an orphan hole ring");
    out[static_cast<std::size_t>(best)].holes.push_back(std::move(h));
  }
  return out;
}

std::vector<Ring> rings_of(const Polygon2& p) {
  std::vector<Ring> r;
  r.push_back(p.outer);
  for (const Ring& h : p.holes) r.push_back(h);
  return r;
}

std::vector<Polygon2> boolean_op(const Polygon2& a, const Polygon2& b, Op op) {
  const std::vector<Ring> ra = rings_of(a);
  const std::vector<Ring> rb = rings_of(b);
  const Overlay ov = overlay(ra, rb);
  std::vector<Fragment> frags;
  if (op == Op::Intersect) {
    collect_fragments(ra, ov.subject, ov.crossings, true, false, frags);
    collect_fragments(rb, ov.clip, ov.crossings, true, false, frags);
  } else {
    collect_fragments(ra, ov.subject, ov.crossings, false, false, frags);
    collect_fragments(rb, ov.clip, ov.crossings, true, true, frags);
  }
  std::map<int, std::size_t> by_start;
  std::vector<Ring> rings;
  for (std::size_t i = 0; i < frags.size(); ++i) {
    if (frags[i].start < 0) {
      rings.push_back(frags[i].points);
      frags[i].used = true;
      continue;
    }
    if (!by_start.emplace(frags[i].start, i).second) {
      throw GeometryError("polygon boolean: two fragments leave the same intersection");
    }
  }
  for (std::size_t i = 0; i < frags.size(); ++i) {
    if (frags[i].used) continue;
    Ring ring;
    std::size_t cur = i;
    const int first = frags[i].start;
    for (std::size_t guard = 0; guard <= frags.size(); ++guard) {
      Fragment& f = frags[cur];
      if (f.used) throw GeometryError("polygon boolean: fragment reused while linking");
      f.used = true;
      ring.insert(ring.end(), f.points.begin(), f.points.end());
      if (f.end == first) break;
      const auto it = by_start.find(f.end);
      if (it == by_start.end()) throw GeometryError("polygon boolean: dangling fragment");
      cur = it->second;
    }
    rings.push_back(std::move(ring));
  }
  const Box bb = ring_box(a.outer);
  const double scale = std::max(1.0, (bb.x1 - bb.x0) * (bb.y1 - bb.y0));
  return assemble(std::move(rings), 1e-15 * scale);
}

}  // namespace

std::size_t RingSplit::crossing_count() const {
  std::size_t n = 0;
  for (const auto& e : edge_crossings) n += e.size();
  return n;
}

bool perturbed_inside(std::span<const Ring> rings, const Vec2& p, int k) {
  // Ray towards +x from p + k*s, s = (eps, eps^2).
  auto above = [&](const Vec2& e) { return e.y() != p.y() ? e.y() > p.y() : k < 0; };
  bool inside = false;
  for (const Ring& ring : rings) {
    const std::size_t n = ring.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2& e1 = ring[i];
      const Vec2& e2 = ring[(i + 1) % n];
      const bool u1 = above(e1);
      const bool u2 = above(e2);
      if (u1 == u2) continue;
      const int o = orient2d_perturbed(e1, e2, p, k);
      if (u2 ? o > 0 : o < 0) inside = !inside;
    }
  }
  return inside;
}

Overlay overlay(std::span<const Ring> subject, std::span<const Ring> clip) {
  Overlay ov;
  ov.subject.resize(subject.size());
  ov.clip.resize(clip.size());
  for (std::size_t r = 0; r < subject.size(); ++r) ov.subject[r].edge_crossings.resize(subject[r].size());
  for (std::size_t r = 0; r < clip.size(); ++r) ov.clip[r].edge_crossings.resize(clip[r].size());

  std::vector<Box> clip_boxes;
  for (const Ring& r : clip) clip_boxes.push_back(ring_box(r));

  for (std::size_t rs = 0; rs < subject.size(); ++rs) {
    const Ring& sr = subject[rs];
    const Box sbox = ring_box(sr);
    for (std::size_t i = 0; i < sr.size(); ++i) {
      const Vec2& a1 = sr[i];
      const Vec2& a2 = sr[(i + 1) % sr.size()];
      const Box ea = box_of(a1, a2);
      for (std::size_t rc = 0; rc < clip.size(); ++rc) {
        if (!overlaps(sbox, clip_boxes[rc]) || !overlaps(ea, clip_boxes[rc])) continue;
        const Ring& cr = clip[rc];
        for (std::size_t j = 0; j < cr.size(); ++j) {
          const Vec2& b1 = cr[j];
          const Vec2& b2 = cr[(j + 1) % cr.size()];
          if (!overlaps(ea, box_of(b1, b2))) continue;
          if (!edges_cross(a1, a2, b1, b2)) continue;
          Crossing c;
          c.subject_ring = static_cast<int>(rs);
          c.subject_edge = static_cast<int>(i);
          c.clip_ring = static_cast<int>(rc);
          c.clip_edge = static_cast<int>(j);
          crossing_point(a1, a2, b1, b2, c);
          const int id = static_cast<int>(ov.crossings.size());
          ov.crossings.push_back(c);
          ov.subject[rs].edge_crossings[i].push_back(id);
          ov.clip[rc].edge_crossings[j].push_back(id);
        }
      }
    }
  }

  // Order crossings along every edge.
  for (std::size_t rs = 0; rs < subject.size(); ++rs) {
    const Ring& sr = subject[rs];
    for (std::size_t i = 0; i < sr.size(); ++i) {
      auto& ids = ov.subject[rs].edge_crossings[i];
      if (ids.size() < 2) continue;
      const Vec2& a1 = sr[i];
      const Vec2& a2 = sr[(i + 1) % sr.size()];
      std::vector<SortKey> keys;
      for (int id : ids) {
        const Crossing& c = ov.crossings[static_cast<std::size_t>(id)];
        const Ring& cr = clip[static_cast<std::size_t>(c.clip_ring)];
        keys.push_back(make_key(a1, a2, cr[static_cast<std::size_t>(c.clip_edge)],
                                cr[(static_cast<std::size_t>(c.clip_edge) + 1) % cr.size()], +1));
      }
      std::vector<std::size_t> order(ids.size());
      for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
      std::sort(order.begin(), order.end(),
                [&](std::size_t x, std::size_t y) { return compare_keys(keys[x], keys[y]) < 0; });
      std::vector<int> sorted;
      for (std::size_t k : order) sorted.push_back(ids[k]);
      ids = std::move(sorted);
    }
  }
  for (std::size_t rc = 0; rc < clip.size(); ++rc) {
    const Ring& cr = clip[rc];
    for (std::size_t j = 0; j < cr.size(); ++j) {
      auto& ids = ov.clip[rc].edge_crossings[j];
      if (ids.size() < 2) continue;
      const Vec2& b1 = cr[j];
      const Vec2& b2 = cr[(j + 1) % cr.size()];
      std::vector<SortKey> keys;
      for (int id : ids) {
        const Crossing& c = ov.crossings[static_cast<std::size_t>(id)];
        const Ring& sr = subject[static_cast<std::size_t>(c.subject_ring)];
        keys.push_back(make_key(b1, b2, sr[static_cast<std::size_t>(c.subject_edge)],
                                sr[(static_cast<std::size_t>(c.subject_edge) + 1) % sr.size()], -1));
      }
      std::vector<std::size_t> order(ids.size());
      for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
      std::sort(order.begin(), order.end(),
                [&](std::size_t x, std::size_t y) { return compare_keys(keys[x], keys[y]) < 0; });
      std::vector<int> sorted;
      for (std::size_t k : order) sorted.push_back(ids[k]);
      ids = std::move(sorted);
    }
  }

  for (std::size_t rs = 0; rs < subject.size(); ++rs) {
    ov.subject[rs].start_inside = perturbed_inside(clip, subject[rs][0], -1);
  }
  for (std::size_t rc = 0; rc < clip.size(); ++rc) {
    ov.clip[rc].start_inside = perturbed_inside(subject, clip[rc][0], +1);
  }
  return ov;
}

std::vector<Polygon2> intersect(const Polygon2& a, const Polygon2& b) { return boolean_op(a, b, Op::Intersect); }

std::vector<Polygon2> difference(const Polygon2& a, const Polygon2& b) { return boolean_op(a, b, Op::Difference); }

double intersection_area(const Polygon2& a, const Polygon2& b) { return area(intersect(a, b)); }

double intersection_area(const MultiPolygon2& a, const Polygon2& b) {
  double s = 0.0;
  for (const Polygon2& p : a) s += intersection_area(p, b);
  return s;
}

}  // namespace texprint::geom2d
