#include <algorithm>
#include <cmath>

#include "texprint/error.hpp"
#include "texprint/geom2d.hpp"
#include "texprint/predicates.hpp"

namespace texprint::geom2d {
namespace {

using predicates::orient2d;

bool on_segment(const Vec2& a, const Vec2& b, const Vec2& p) {
  if (orient2d(a, b, p) != 0) return false;
  return std::min(a.x(), b.x()) <= p.x() && p.x() <= std::max(a.x(), b.x()) && std::min(a.y(), b.y()) <= p.y() &&
         p.y() <= std::max(a.y(), b.y());
}

// Closed segments share at least one point.
bool segments_touch(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const int o1 = orient2d(a, b, c);
  const int o2 = orient2d(a, b, d);
  const int o3 = orient2d(c, d, a);
  const int o4 = orient2d(c, d, b);
  if (o1 * o2 < 0 && o3 * o4 < 0) return true;
  return on_segment(a, b, c) || on_segment(a, b, d) || on_segment(c, d, a) || on_segment(c, d, b);
}

Ring dedupe(Ring r) {
  Ring out;
  out.reserve(r.size());
  for (const Vec2& p : r) {
    if (out.empty() || (p - out.back()).norm() > kDuplicateSpacing) out.push_back(p);
  }
  while (out.size() > 1 && (out.front() - out.back()).norm() <= kDuplicateSpacing) out.pop_back();
  return out;
}

Ring collapse_short(Ring r) {
  bool changed = true;
  while (changed && r.size() > 3) {
    changed = false;
    for (std::size_t i = 0; i < r.size() && r.size() > 3; ++i) {
      const std::size_t j = (i + 1) % r.size();
      if ((r[i] - r[j]).norm() < kMinFeature) {
        r.erase(r.begin() + static_cast<long>(j));
        changed = true;
        break;
      }
    }
  }
  return r;
}

void orient(Ring& r, bool ccw) {
  if ((signed_area(r) > 0.0) != ccw) std::reverse(r.begin(), r.end());
}

bool rings_touch(std::span<const Vec2> a, std::span<const Vec2> b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Vec2& p = a[i];
    const Vec2& q = a[(i + 1) % a.size()];
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (segments_touch(p, q, b[j], b[(j + 1) % b.size()])) return true;
    }
  }
  return false;
}

}  // namespace

double signed_area(std::span<const Vec2> ring) {
  double a = 0.0;
  const std::size_t n = ring.size();
  if (n < 3) return 0.0;
  // Shoelace about the first vertex to limit cancellation.
  const Vec2& o = ring[0];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const Vec2 u = ring[i] - o;
    const Vec2 v = ring[i + 1] - o;
    a += u.x() * v.y() - u.y() * v.x();
  }
  return 0.5 * a;
}

double Polygon2::area() const {
  double a = signed_area(outer);
  for (const Ring& h : holes) a += signed_area(h);
  return a;
}

double area(const MultiPolygon2& mp) {
  double a = 0.0;
  for (const Polygon2& p : mp) a += p.area();
  return a;
}

Vec2 centroid(const Polygon2& p) {
  double a = 0.0;
  Vec2 c = Vec2::Zero();
  const Vec2 o = p.outer.empty() ? Vec2::Zero() : p.outer[0];
  for (std::size_t r = 0; r < p.ring_count(); ++r) {
    const Ring& ring = p.ring(r);
    for (std::size_t i = 0; i < ring.size(); ++i) {
      const Vec2 u = ring[i] - o;
      const Vec2 v = ring[(i + 1) % ring.size()] - o;
      const double w = u.x() * v.y() - u.y() * v.x();
      a += w;
      c += w * (u + v);
    }
  }
  if (a == 0.0) return o;
  return o + c / (3.0 * a);
}

bool ring_is_simple(std::span<const Vec2> ring) {
  const std::size_t n = ring.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = ring[i];
    const Vec2& b = ring[(i + 1) % n];
    for (std::size_t j = i + 1; j < n; ++j) {
      const Vec2& c = ring[j];
      const Vec2& d = ring[(j + 1) % n];
      const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      if (adjacent) {
        // Adjacent edges may only share their common vertex; reject folds.
        const Vec2& shared = (j == i + 1) ? b : a;
        const Vec2& other1 = (j == i + 1) ? a : b;
        const Vec2& other2 = (j == i + 1) ? d : c;
        if (orient2d(other1, shared, other2) == 0 && (other1 - shared).dot(other2 - shared) > 0.0) return false;
        continue;
      }
      if (segments_touch(a, b, c, d)) return false;
    }
  }
  return true;
}

bool ring_contains(std::span<const Vec2> ring, const Vec2& q) {
  bool inside = false;
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = ring[i];
    const Vec2& b = ring[(i + 1) % n];
    if (on_segment(a, b, q)) return true;
    if ((a.y() > q.y()) != (b.y() > q.y())) {
      const int o = orient2d(a, b, q);
      if ((b.y() > a.y()) ? o > 0 : o < 0) inside = !inside;
    }
  }
  return inside;
}

bool contains(const Polygon2& p, const Vec2& q) {
  if (!ring_contains(p.outer, q)) return false;
  for (const Ring& h : p.holes) {
    // On a hole boundary counts as contained.
    const std::size_t n = h.size();
    bool on = false;
    for (std::size_t i = 0; i < n && !on; ++i) on = on_segment(h[i], h[(i + 1) % n], q);
    if (!on && ring_contains(h, q)) return false;
  }
  return true;
}

bool contains(const MultiPolygon2& mp, const Vec2& q) {
  return std::any_of(mp.begin(), mp.end(), [&](const Polygon2& p) { return contains(p, q); });
}

void validate(const Polygon2& p) {
  if (p.outer.size() < 3) throw InvalidInput("polygon outer ring has fewer than 3 points");
  if (!(signed_area(p.outer) > 0.0)) throw InvalidInput("polygon outer ring must be counter-clockwise");
  if (!ring_is_simple(p.outer)) throw InvalidInput("polygon outer ring self-intersects");
  for (std::size_t h = 0; h < p.holes.size(); ++h) {
    const Ring& hole = p.holes[h];
    if (hole.size() < 3) throw InvalidInput("polygon hole has fewer than 3 points");
    if (!(signed_area(hole) < 0.0)) throw InvalidInput("polygon hole must be clockwise");
    if (!ring_is_simple(hole)) throw InvalidInput("polygon hole self-intersects");
    if (rings_touch(p.outer, hole)) throw InvalidInput("polygon hole touches the outer ring");
    if (!ring_contains(p.outer, hole[0])) throw InvalidInput("polygon hole lies outside the outer ring");
    for (std::size_t g = 0; g < h; ++g) {
      if (rings_touch(p.holes[g], hole) || ring_contains(p.holes[g], hole[0]) || ring_contains(hole, p.holes[g][0])) {
        throw InvalidInput("polygon holes overlap");
      }
    }
  }
}

Polygon2 make_polygon(Ring outer, std::vector<Ring> holes) {
  Polygon2 p;
  p.outer = dedupe(std::move(outer));
  if (p.outer.size() < 3) throw InvalidInput("polygon needs at least 3 distinct points");
  orient(p.outer, true);
  for (Ring& h : holes) {
    Ring r = dedupe(std::move(h));
    if (r.size() < 3) throw InvalidInput("polygon hole needs at least 3 distinct points");
    orient(r, false);
    p.holes.push_back(std::move(r));
  }
  validate(p);
  return p;
}

Polygon2 make_polygon_collapsed(Ring outer, std::vector<Ring> holes) {
  outer = collapse_short(dedupe(std::move(outer)));
  for (Ring& h : holes) h = collapse_short(dedupe(std::move(h)));
  return make_polygon(std::move(outer), std::move(holes));
}

Polygon2 transformed(const Polygon2& p, const Vec2& translate, double rotation, double scale) {
  const double c = std::cos(rotation) * scale;
  const double s = std::sin(rotation) * scale;
  auto map = [&](const Ring& r) {
    Ring out;
    out.reserve(r.size());
    for (const Vec2& q : r) out.emplace_back(translate.x() + c * q.x() - s * q.y(), translate.y() + s * q.x() + c * q.y());
    return out;
  };
  Polygon2 out;
  out.outer = map(p.outer);
  for (const Ring& h : p.holes) out.holes.push_back(map(h));
  return out;
}

Polygon2 translated(const Polygon2& p, const Vec2& offset) { return transformed(p, offset, 0.0, 1.0); }

}  // namespace texprint::geom2d
