#include "texprint/autocomplete.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "texprint/error.hpp"

namespace texprint {

using geom2d::MultiPolygon2;
using geom2d::Polygon2;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr long kMaxLatticePoints = 1'000'000;

double angle_gap(double a, double b) { return std::abs(std::remainder(a - b, 2 * kPi)); }

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

double distance_to_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 d = b - a;
  const double t = std::clamp((p - a).dot(d) / d.squaredNorm(), 0.0, 1.0);
  return (a + t * d - p).norm();
}

bool strictly_inside(const MultiPolygon2& region, const Vec2& p) {
  if (!geom2d::contains(region, p)) return false;
  for (const Polygon2& poly : region)
    for (std::size_t r = 0; r < poly.ring_count(); ++r) {
      const auto& ring = poly.ring(r);
      for (std::size_t i = 0; i < ring.size(); ++i)
        if (distance_to_segment(p, ring[i], ring[(i + 1) % ring.size()]) <= geom2d::kDuplicateSpacing) return false;
    }
  return true;
}

struct Box {
  Vec2 lo = Vec2::Constant(std::numeric_limits<double>::infinity());
  Vec2 hi = Vec2::Constant(-std::numeric_limits<double>::infinity());
  void add(const Vec2& p) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  bool empty() const { return !(lo.x() <= hi.x()); }
  bool meets(const Box& o) const {
    return !(o.lo.x() > hi.x() || o.hi.x() < lo.x() || o.lo.y() > hi.y() || o.hi.y() < lo.y());
  }
};

Box bounds(const MultiPolygon2& region) {
  Box b;
  for (const Polygon2& p : region)
    for (const Vec2& q : p.outer) b.add(q);
  return b;
}

// Largest distance from the anchor to any point of a placed footprint.
double footprint_radius(const std::optional<Polygon2>& element, double scale) {
  double r = 0.0;
  if (element)
    for (const Vec2& p : element->outer) r = std::max(r, p.norm());
  return r * scale;
}

void check_events(const std::vector<PlacementEvent>& events) {
  if (events.size() < 2) throw InvalidInput("pattern inference needs at least two placements");
  for (std::size_t i = 0; i < events.size(); ++i) {
    if (!(events[i].scale > 0)) throw InvalidInput("placement scale must be positive");
    if (i > 0 && events[i].seq <= events[i - 1].seq) throw InvalidInput("placement seq must be strictly increasing");
  }
}

PlacementEvent inferred_at(const PatternSuggestion& s, const Vec2& anchor, double rotation) {
  return {anchor, rotation, s.scale, 0};
}

// Appends inferred placements with fresh seq numbers after the demonstrated ones.
void append_inferred(PatternSuggestion& s, std::vector<PlacementEvent> inferred) {
  int seq = s.placements.empty() ? 0 : s.placements[s.demonstrated - 1].seq;
  for (PlacementEvent& p : inferred) {
    p.seq = ++seq;
    s.placements.push_back(p);
  }
}

void fill_row(PatternSuggestion& s) {
  const Vec2 origin = s.placements[0].anchor;
  const double step = s.d1.norm();
  std::vector<long> claimed;
  for (std::size_t i = 0; i < s.demonstrated; ++i) {
    const double k = std::round((s.placements[i].anchor - origin).dot(s.d1) / s.d1.squaredNorm());
    if ((origin + k * s.d1 - s.placements[i].anchor).norm() < 0.5 * step) claimed.push_back(static_cast<long>(k));
  }
  const Box box = bounds(s.region);
  const double reach = box.empty() ? 0.0 : (box.hi - box.lo).norm() + 2 * footprint_radius(s.element, s.scale);
  const long limit = static_cast<long>(std::ceil(reach / step)) + 2;
  if (limit > kMaxLatticePoints) throw InvalidInput("pattern spacing is too fine for the region");
  std::vector<std::pair<long, PlacementEvent>> found;
  for (int dir : {1, -1}) {
    for (long k = dir; std::abs(k) <= limit; k += dir) {
      if (std::find(claimed.begin(), claimed.end(), k) != claimed.end()) continue;
      const PlacementEvent p = inferred_at(s, origin + static_cast<double>(k) * s.d1, s.rotation);
      if (!placement_fits(p, s.region, s.element)) break;
      found.emplace_back(k, p);
    }
  }
  std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<PlacementEvent> out;
  for (auto& [k, p] : found) out.push_back(p);
  append_inferred(s, std::move(out));
}

void fill_grid(PatternSuggestion& s) {
  const Vec2 origin = s.placements[0].anchor;
  Eigen::Matrix2d basis;
  basis << s.d1, s.d2;
  const Eigen::Matrix2d inv = basis.inverse();
  const double claim = 0.5 * std::min({s.d1.norm(), s.d2.norm(), (s.d1 - s.d2).norm(), (s.d1 + s.d2).norm()});
  const Box box = bounds(s.region);
  if (box.empty()) return;
  const double margin = footprint_radius(s.element, s.scale);
  Vec2 lo = Vec2::Constant(std::numeric_limits<double>::infinity()), hi = -lo;
  for (double x : {box.lo.x() - margin, box.hi.x() + margin})
    for (double y : {box.lo.y() - margin, box.hi.y() + margin}) {
      const Vec2 c = inv * (Vec2(x, y) - origin);
      lo = lo.cwiseMin(c);
      hi = hi.cwiseMax(c);
    }
  const long k0 = static_cast<long>(std::floor(lo.x())), k1 = static_cast<long>(std::ceil(hi.x()));
  const long m0 = static_cast<long>(std::floor(lo.y())), m1 = static_cast<long>(std::ceil(hi.y()));
  if ((k1 - k0 + 1) * (m1 - m0 + 1) > kMaxLatticePoints) throw InvalidInput("pattern spacing is too fine for the region");
  std::vector<PlacementEvent> out;
  for (long m = m0; m <= m1; ++m) {
    for (long k = k0; k <= k1; ++k) {
      const Vec2 a = origin + static_cast<double>(k) * s.d1 + static_cast<double>(m) * s.d2;
      bool taken = false;
      for (std::size_t i = 0; i < s.demonstrated && !taken; ++i) taken = (s.placements[i].anchor - a).norm() < claim;
      if (taken) continue;
      const PlacementEvent p = inferred_at(s, a, s.rotation);
      if (placement_fits(p, s.region, s.element)) out.push_back(p);
    }
  }
  append_inferred(s, std::move(out));
}

void fill_curve(PatternSuggestion& s) {
  const double t0 = s.path.project(s.placements[0].anchor);
  const double start_angle = s.path.tangent_angle(t0);
  std::vector<long> claimed;
  for (std::size_t i = 0; i < s.demonstrated; ++i) {
    const double t = s.path.project(s.placements[i].anchor) - t0;
    const double k = std::round(t / s.spacing);
    if (std::abs(t - k * s.spacing) < 0.5 * s.spacing) claimed.push_back(static_cast<long>(k));
  }
  const double tail = s.path.length() - t0;
  const long count = static_cast<long>(std::floor(tail / s.spacing + 1e-12));
  if (count > kMaxLatticePoints) throw InvalidInput("pattern spacing is too fine for the path");
  std::vector<PlacementEvent> out;
  for (long k = 0; k <= count; ++k) {
    if (std::find(claimed.begin(), claimed.end(), k) != claimed.end()) continue;
    const double t = std::min(t0 + static_cast<double>(k) * s.spacing, s.path.length());
    const PlacementEvent p = inferred_at(s, s.path.at(t), s.rotation + s.path.tangent_angle(t) - start_angle);
    if (placement_fits(p, s.region, s.element)) out.push_back(p);
  }
  append_inferred(s, std::move(out));
}

void regenerate(PatternSuggestion& s) {
  s.placements.resize(s.demonstrated);
  switch (s.generator) {
    case Generator::Row:
      fill_row(s);
      break;
    case Generator::Grid:
      fill_grid(s);
      break;
    case Generator::Curve:
      fill_curve(s);
      break;
  }
}

PatternSuggestion start(const std::vector<PlacementEvent>& events, const MultiPolygon2& region,
                        const std::optional<Polygon2>& element) {
  PatternSuggestion s;
  s.placements = events;
  s.demonstrated = events.size();
  s.scale = events[0].scale;
  s.rotation = events[0].rotation;
  s.region = region;
  s.element = element;
  return s;
}

}  // namespace

CurvePath::CurvePath(std::vector<Vec2> points) : points_(std::move(points)) {
  if (points_.size() < 2) throw InvalidInput("curve path needs at least two points");
  arclength_.push_back(0.0);
  std::vector<double> seg;
  for (std::size_t i = 1; i < points_.size(); ++i) {
    const Vec2 d = points_[i] - points_[i - 1];
    if (d.norm() <= geom2d::kDuplicateSpacing) throw InvalidInput("curve path has repeated points");
    arclength_.push_back(arclength_.back() + d.norm());
    const double raw = std::atan2(d.y(), d.x());
    seg.push_back(seg.empty() ? raw : seg.back() + std::remainder(raw - seg.back(), 2 * kPi));
  }
  vertex_angle_.push_back(seg.front());
  for (std::size_t i = 1; i < seg.size(); ++i) vertex_angle_.push_back(0.5 * (seg[i - 1] + seg[i]));
  vertex_angle_.push_back(seg.back());
  // End tangents continue the turning of the neighbouring vertex.
  if (seg.size() > 1) {
    vertex_angle_.front() = 2 * seg.front() - vertex_angle_[1];
    vertex_angle_.back() = 2 * seg.back() - vertex_angle_[vertex_angle_.size() - 2];
  }
}

std::pair<std::size_t, double> CurvePath::locate(double s) const {
  s = std::clamp(s, 0.0, length());
  const auto it = std::upper_bound(arclength_.begin(), arclength_.end(), s);
  const std::size_t i = std::min(static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - arclength_.begin() - 1, 0)), points_.size() - 2);
  return {i, (s - arclength_[i]) / (arclength_[i + 1] - arclength_[i])};
}

Vec2 CurvePath::at(double s) const {
  const auto [i, f] = locate(s);
  return (1 - f) * points_[i] + f * points_[i + 1];
}

double CurvePath::tangent_angle(double s) const {
  const auto [i, f] = locate(s);
  return (1 - f) * vertex_angle_[i] + f * vertex_angle_[i + 1];
}

double CurvePath::project(const Vec2& p) const {
  double best = std::numeric_limits<double>::infinity(), at = 0.0;
  for (std::size_t i = 0; i + 1 < points_.size(); ++i) {
    const Vec2 d = points_[i + 1] - points_[i];
    const double t = std::clamp((p - points_[i]).dot(d) / d.squaredNorm(), 0.0, 1.0);
    const double dist = (points_[i] + t * d - p).norm();
    if (dist < best) {
      best = dist;
      at = arclength_[i] + t * (arclength_[i + 1] - arclength_[i]);
    }
  }
  return at;
}

bool placement_fits(const PlacementEvent& p, const MultiPolygon2& region, const std::optional<Polygon2>& element) {
  if (!element) return strictly_inside(region, p.anchor);
  const Polygon2 footprint = geom2d::transformed(*element, p.anchor, p.rotation, p.scale);
  Box fb;
  for (const Vec2& q : footprint.outer) fb.add(q);
  if (!bounds(region).meets(fb)) return false;
  return geom2d::intersection_area(region, footprint) >= kMinOverlap * footprint.area();
}

std::optional<PatternSuggestion> infer_pattern(const std::vector<PlacementEvent>& events, const MultiPolygon2& region,
                                               const std::optional<Polygon2>& element) {
  check_events(events);
  const PlacementEvent& first = events[0];
  for (const PlacementEvent& e : events) {
    if (angle_gap(e.rotation, first.rotation) > kRotationTolerance) return std::nullopt;
    if (std::abs(e.scale / first.scale - 1.0) > kSpacingTolerance) return std::nullopt;
  }
  const Vec2 d1 = events[1].anchor - first.anchor;
  const double step = d1.norm();
  if (step <= geom2d::kMinFeature) return std::nullopt;

  PatternSuggestion s = start(events, region, element);
  s.d1 = d1;
  s.density = step;
  s.generator = Generator::Row;
  // The first placement off the d1 line by more than a quarter step sets d2.
  for (std::size_t i = 2; i < events.size(); ++i) {
    const Vec2 r = events[i].anchor - first.anchor;
    if (std::abs(cross(d1, r)) / step > kGridThreshold * step) {
      s.generator = Generator::Grid;
      s.d2 = r;
      break;
    }
  }
  Eigen::Matrix2d basis;
  basis << s.d1, (s.generator == Generator::Grid ? s.d2 : Vec2(-d1.y(), d1.x()));
  const Eigen::Matrix2d inv = basis.inverse();
  for (std::size_t i = 2; i < events.size(); ++i) {
    const Vec2 c = inv * (events[i].anchor - first.anchor);
    const double k = std::round(c.x());
    const double m = s.generator == Generator::Grid ? std::round(c.y()) : 0.0;
    const Vec2 nearest = first.anchor + k * s.d1 + m * s.d2;
    if ((events[i].anchor - nearest).norm() > kSpacingTolerance * step) return std::nullopt;
    // A repeat of an earlier demonstrated lattice point is not regular either.
    for (std::size_t j = 0; j < i; ++j)
      if ((events[j].anchor - nearest).norm() <= kSpacingTolerance * step) return std::nullopt;
  }
  regenerate(s);
  return s;
}

PatternSuggestion complete_along_curve(const std::vector<PlacementEvent>& events, const CurvePath& path,
                                       const MultiPolygon2& region, const std::optional<Polygon2>& element) {
  check_events(events);
  const double spacing = (events[1].anchor - events[0].anchor).norm();
  if (spacing <= geom2d::kMinFeature) throw InvalidInput("the first two placements coincide");
  if (path.length() < spacing) throw InvalidInput("curve path is shorter than the demonstrated spacing");
  PatternSuggestion s = start(events, region, element);
  s.generator = Generator::Curve;
  s.path = path;
  s.spacing = spacing;
  s.density = spacing;
  regenerate(s);
  return s;
}

PatternSuggestion adjust(const PatternSuggestion& suggestion, const PatternEdit& edit) {
  PatternSuggestion s = suggestion;
  s.placements.resize(s.demonstrated);
  if (const auto* e = std::get_if<SetDensity>(&edit)) {
    if (!(e->density > 0)) throw InvalidInput("density must be positive");
    if (s.generator == Generator::Curve) {
      if (s.path.length() < e->density) throw InvalidInput("curve path is shorter than the spacing");
      s.spacing = e->density;
    } else {
      const double f = e->density / s.d1.norm();
      s.d1 *= f;
      s.d2 *= f;
    }
    s.density = e->density;
  } else if (const auto* e = std::get_if<SetScale>(&edit)) {
    if (!(e->scale > 0)) throw InvalidInput("scale must be positive");
    s.scale = e->scale;
    for (PlacementEvent& p : s.placements) p.scale = e->scale;
  } else if (const auto* e = std::get_if<SetRotation>(&edit)) {
    const double delta = e->rotation - s.rotation;
    s.rotation = e->rotation;
    for (PlacementEvent& p : s.placements) p.rotation += delta;
  } else if (const auto* e = std::get_if<MoveAnchor>(&edit)) {
    std::vector<PlacementEvent> events = s.placements;
    auto it = std::find_if(events.begin(), events.end(), [&](const PlacementEvent& p) { return p.seq == e->seq; });
    if (it == events.end()) throw InvalidInput("no demonstrated placement with seq " + std::to_string(e->seq));
    it->anchor = e->to;
    if (s.generator == Generator::Curve) return complete_along_curve(events, s.path, s.region, s.element);
    auto redone = infer_pattern(events, s.region, s.element);
    if (!redone) throw InvalidInput("moved placement leaves the demonstration irregular");
    return *redone;
  }
  regenerate(s);
  return s;
}

}  // namespace texprint
