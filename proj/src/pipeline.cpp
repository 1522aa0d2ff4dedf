#include "texprint/pipeline.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "texprint/error.hpp"

namespace texprint {

namespace {

using Key = std::pair<double, double>;
Key key(const Vec2& p) { return {p.x(), p.y()}; }

geom2d::MultiPolygon2 triangles(const UVChart& chart, const std::vector<int>& faces) {
  geom2d::MultiPolygon2 out;
  for (int f : faces) {
    const UVTriangle& t = chart.uv[static_cast<std::size_t>(f)];
    if (chart.signed_area(f) > 0) out.push_back(geom2d::make_polygon({t[0], t[1], t[2]}));
  }
  return out;
}

std::optional<geom2d::MultiPolygon2> chained(const TriMesh& mesh, const UVChart& chart, const std::vector<int>& faces) {
  std::vector<char> in(mesh.face_count(), 0);
  for (int f : faces) in[static_cast<std::size_t>(f)] = 1;
  std::map<EdgeKey, std::vector<int>> users;
  for (int f : faces)
    for (int k = 0; k < 3; ++k) users[EdgeKey(mesh.face(f)[static_cast<std::size_t>(k)], mesh.face(f)[static_cast<std::size_t>((k + 1) % 3)])].push_back(f);

  auto uv_of = [&](int f, int v) {
    const Face& fc = mesh.face(f);
    for (int c = 0; c < 3; ++c)
      if (fc[static_cast<std::size_t>(c)] == v) return chart.uv[static_cast<std::size_t>(f)][static_cast<std::size_t>(c)];
    return Vec2(Vec2::Zero());
  };

  std::map<Key, std::vector<Vec2>> next;
  for (int f : faces) {
    const Face& fc = mesh.face(f);
    for (int k = 0; k < 3; ++k) {
      const int a = fc[static_cast<std::size_t>(k)], b = fc[static_cast<std::size_t>((k + 1) % 3)];
      bool interior = false;
      for (int g : users[EdgeKey(a, b)])
        interior = interior || (g != f && uv_of(g, a) == uv_of(f, a) && uv_of(g, b) == uv_of(f, b));
      if (!interior) next[key(uv_of(f, a))].push_back(uv_of(f, b));
    }
  }
  for (const auto& [k, v] : next)
    if (v.size() != 1) return std::nullopt;

  std::vector<geom2d::Ring> outers, holes;
  while (!next.empty()) {
    geom2d::Ring ring;
    const Key start = next.begin()->first;
    Key at = start;
    do {
      const auto it = next.find(at);
      if (it == next.end()) return std::nullopt;
      ring.emplace_back(at.first, at.second);
      at = key(it->second.front());
      next.erase(it);
    } while (at != start);
    if (ring.size() < 3) return std::nullopt;
    (geom2d::signed_area(ring) > 0 ? outers : holes).push_back(std::move(ring));
  }
  std::vector<std::vector<geom2d::Ring>> holes_of(outers.size());
  for (geom2d::Ring& h : holes) {
    int best = -1;
    double best_area = 0;
    for (std::size_t o = 0; o < outers.size(); ++o) {
      const double a = geom2d::signed_area(outers[o]);
      if (geom2d::ring_contains(outers[o], h.front()) && (best < 0 || a < best_area)) {
        best = static_cast<int>(o);
        best_area = a;
      }
    }
    if (best < 0) return std::nullopt;
    holes_of[static_cast<std::size_t>(best)].push_back(std::move(h));
  }
  geom2d::MultiPolygon2 out;
  try {
    for (std::size_t o = 0; o < outers.size(); ++o) out.push_back(geom2d::make_polygon(std::move(outers[o]), std::move(holes_of[o])));
  } catch (const InvalidInput&) {
    return std::nullopt;
  }
  return out;
}

// Local length correction can grow neighbouring footprints into each other
// where the chart is compressed.
std::vector<PlacementEvent> drop_overlaps(const TriMesh& mesh, const UVChart& chart, const TextureElement& element,
                                          const std::vector<PlacementEvent>& placements, std::size_t demonstrated,
                                          const ImprintOptions& options, std::vector<std::string>& warnings) {
  const ChartIndex index(chart);
  std::vector<PlacementEvent> kept;
  std::vector<geom2d::Polygon2> footprints;
  std::vector<Eigen::AlignedBox2d> boxes;
  std::size_t dropped = 0;
  for (std::size_t i = 0; i < placements.size(); ++i) {
    geom2d::Polygon2 fp = footprint_in_chart(element, placements[i], chart, mesh, index, options);
    Eigen::AlignedBox2d box;
    for (const Vec2& q : fp.outer) box.extend(q);
    bool clash = false;
    if (i >= demonstrated)
      for (std::size_t j = 0; j < footprints.size(); ++j)
        if (boxes[j].intersects(box) && geom2d::intersection_area(footprints[j], fp) >= 1e-9) {
          clash = true;
          break;
        }
    if (clash) {
      ++dropped;
      continue;
    }
    kept.push_back(placements[i]);
    footprints.push_back(std::move(fp));
    boxes.push_back(box);
  }
  if (dropped > 0) warnings.push_back(std::to_string(dropped) + " inferred placements dropped where they would overlap");
  return kept;
}

}  // namespace

Vec2 surface_to_chart(const TriMesh& mesh, const UVChart& chart, const Vec3& p) {
  const SurfacePoint s = closest_point(mesh, p);
  if (s.face < 0) throw InvalidInput("mesh has no faces");
  const Face& f = mesh.face(s.face);
  const Vec3 a = mesh.position(f[0]), b = mesh.position(f[1]), c = mesh.position(f[2]);
  const Vec3 n = (b - a).cross(c - a);
  const double nn = n.squaredNorm();
  const UVTriangle& t = chart.uv[static_cast<std::size_t>(s.face)];
  if (nn == 0) return t[0];
  const double w0 = (c - b).cross(s.point - b).dot(n) / nn;
  const double w1 = (a - c).cross(s.point - c).dot(n) / nn;
  return w0 * t[0] + w1 * t[1] + (1 - w0 - w1) * t[2];
}

geom2d::MultiPolygon2 chart_region(const TriMesh& mesh, const UVChart& chart, const std::vector<int>& faces) {
  std::vector<int> sorted = faces;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  for (int f : sorted)
    if (f < 0 || static_cast<std::size_t>(f) >= chart.face_count()) throw InvalidInput("region face " + std::to_string(f) + " is out of range");
  if (auto mp = chained(mesh, chart, sorted)) return *mp;
  return triangles(chart, sorted);
}

Suggestion suggest(const TriMesh& mesh, const UVChart& chart, const TextureElement& element, const Demo& demo,
                   const std::optional<std::vector<int>>& region_faces, const ImprintOptions& imprint_options) {
  if (demo.events.empty()) throw InvalidInput("demo has no events");
  auto resolve = [&](const DemoPoint& p) { return p.uv ? *p.uv : surface_to_chart(mesh, chart, *p.surface); };

  Suggestion s;
  for (std::size_t i = 0; i < demo.events.size(); ++i) {
    const DemoEvent& e = demo.events[i];
    s.placements.push_back({resolve(e.at), e.rotation, e.scale, static_cast<int>(i)});
  }
  s.demonstrated = s.placements.size();
  if (!demo.complete || s.placements.size() < 2) return s;

  geom2d::MultiPolygon2 region;
  if (demo.region) {
    region = *demo.region;
  } else if (region_faces) {
    region = chart_region(mesh, chart, *region_faces);
  } else {
    std::vector<int> all(chart.face_count());
    for (std::size_t f = 0; f < all.size(); ++f) all[f] = static_cast<int>(f);
    region = chart_region(mesh, chart, all);
  }

  std::optional<PatternSuggestion> pattern;
  if (!demo.curve.empty()) {
    std::vector<Vec2> path;
    for (const DemoPoint& p : demo.curve) path.push_back(resolve(p));
    pattern = complete_along_curve(s.placements, CurvePath(std::move(path)), region, element.shape);
  } else {
    pattern = infer_pattern(s.placements, region, element.shape);
  }
  if (!pattern) {
    s.warnings.push_back("demonstration is irregular; only the demonstrated placements are used");
    return s;
  }
  s.demonstrated = pattern->demonstrated;
  s.placements = drop_overlaps(mesh, chart, element, pattern->placements, s.demonstrated, imprint_options, s.warnings);
  pattern->placements = s.placements;
  s.pattern = std::move(pattern);
  return s;
}

ApplyResult apply(const TriMesh& mesh, const UVChart& chart, const TextureElement& element,
                  const std::vector<PlacementEvent>& placements, const ExtrudeOptions& extrude,
                  const ImprintOptions& imprint_options) {
  const ImprintedMesh im = imprint(mesh, chart, element, placements, imprint_options);
  ApplyResult r;
  r.warnings = im.warnings;
  r.mesh = extrude_texture(im, extrude);
  r.report = check_watertight(r.mesh);
  const bool was_closed = check_watertight(mesh).is_closed;
  r.valid = r.report.nonmanifold_edge_count == 0 && r.report.inconsistent_winding_pairs == 0 && (!was_closed || r.report.is_closed);
  return r;
}

std::string describe(const WatertightReport& report) {
  std::ostringstream s;
  s << "closed: " << (report.is_closed ? "yes" : "no") << "\n"
    << "boundary edges: " << report.boundary_edge_count << "\n"
    << "nonmanifold edges: " << report.nonmanifold_edge_count << "\n"
    << "inconsistent winding pairs: " << report.inconsistent_winding_pairs << "\n"
    << "euler characteristic: " << report.euler_characteristic << "\n";
  return s.str();
}

}  // namespace texprint
