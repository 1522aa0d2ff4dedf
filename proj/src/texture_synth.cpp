#include "texprint/texture_synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <unordered_map>

#include "texprint/error.hpp"
#include "texprint/predicates.hpp"

namespace texprint {

using geom2d::Polygon2;
using geom2d::Ring;

namespace {

constexpr double kMergeT = 1e-9;         // split points closer than this along an edge merge
constexpr double kOverlapArea = 1e-9;    // pairwise outline overlap allowed
constexpr double kClippedArea = 1e-6;    // relative outline area lost before warning

struct Box {
  Vec2 lo = Vec2::Constant(std::numeric_limits<double>::infinity());
  Vec2 hi = Vec2::Constant(-std::numeric_limits<double>::infinity());
  void add(const Vec2& p) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  bool meets(const Box& o) const {
    return !(o.lo.x() > hi.x() || o.hi.x() < lo.x() || o.lo.y() > hi.y() || o.hi.y() < lo.y());
  }
};

Box box_of(const Polygon2& p) {
  Box b;
  for (const Vec2& q : p.outer) b.add(q);
  return b;
}

bool lex_less(const Vec2& a, const Vec2& b) { return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y()); }

std::vector<Ring> rings_of(const Polygon2& p) {
  std::vector<Ring> r{p.outer};
  r.insert(r.end(), p.holes.begin(), p.holes.end());
  return r;
}

// An element outline in chart coordinates: the placement itself, or its
// continuation across a seam.
struct Outline {
  int placement = 0;
  Polygon2 poly;
  Box box;
  bool copy = false;
};

// Parameter of a point along mesh edge (lo, hi), measured from lo.
struct EdgeSplits {
  std::vector<double> raw;
  std::vector<double> rep;                        // one per cluster
  std::vector<std::pair<double, double>> range;   // cluster extent
  bool low_corner = false, high_corner = false;   // clusters that snapped to an endpoint

  void finish() {
    std::sort(raw.begin(), raw.end());
    for (double t : raw) {
      if (!range.empty() && t - range.back().second <= kMergeT) {
        range.back().second = t;
      } else {
        range.emplace_back(t, t);
        rep.push_back(t);
      }
    }
    // Clusters touching an endpoint collapse onto that vertex.
    while (!range.empty() && range.front().first <= kMergeT) {
      low_corner = true;
      range.erase(range.begin());
      rep.erase(rep.begin());
    }
    while (!range.empty() && range.back().second >= 1.0 - kMergeT) {
      high_corner = true;
      range.pop_back();
      rep.pop_back();
    }
  }

  // Cluster index, or -1 / -2 for the lo / hi endpoint.
  int find(double t) const {
    if (t <= kMergeT) return -1;
    if (t >= 1.0 - kMergeT) return -2;
    for (std::size_t i = 0; i < range.size(); ++i)
      if (t >= range[i].first - kMergeT && t <= range[i].second + kMergeT) return static_cast<int>(i);
    if (low_corner && t <= 2 * kMergeT) return -1;
    return -2;
  }
};

// Where a face-local point sits on the output mesh.
struct PointRef {
  enum Kind { Corner, Split, Interior } kind = Interior;
  int corner = 0;
  EdgeKey edge;
  int cluster = 0;
};

struct FaceWork {
  std::vector<int> outlines;
  std::vector<Ring> rings;
  std::vector<int> ring_outline;
  geom2d::Overlay ov;
  // Per crossing: mesh edge and parameter from the lo vertex.
  std::vector<std::pair<EdgeKey, double>> crossing_at;
  // Ring vertices lying exactly on a triangle edge.
  std::vector<std::tuple<int, int, EdgeKey, double>> on_edge;  // ring, vertex, edge, t
  bool rebuild = false;
};

// Parameter from the mesh edge's lo vertex given a parameter measured from
// the lexicographically smaller uv endpoint; identical on both faces of a
// non-seam edge.
double t_from_lo(const UVTriangle& uv, const Face& face, int k, double t_lex) {
  const int a = face[static_cast<std::size_t>(k)];
  const int b = face[static_cast<std::size_t>((k + 1) % 3)];
  const bool a_lex_first = lex_less(uv[static_cast<std::size_t>(k)], uv[static_cast<std::size_t>((k + 1) % 3)]);
  const int lex_first = a_lex_first ? a : b;
  return lex_first == std::min(a, b) ? t_lex : 1.0 - t_lex;
}

EdgeKey edge_of(const Face& face, int k) { return {face[static_cast<std::size_t>(k)], face[static_cast<std::size_t>((k + 1) % 3)]}; }

int corner_of(const Face& face, int v) {
  for (int c = 0; c < 3; ++c)
    if (face[static_cast<std::size_t>(c)] == v) return c;
  return -1;
}

bool segment_meets_polygon(const Vec2& a, const Vec2& b, const Polygon2& p) {
  if (geom2d::contains(p, a) || geom2d::contains(p, b)) return true;
  for (std::size_t r = 0; r < p.ring_count(); ++r) {
    const Ring& ring = p.ring(r);
    for (std::size_t i = 0; i < ring.size(); ++i) {
      const Vec2& c = ring[i];
      const Vec2& d = ring[(i + 1) % ring.size()];
      const int o1 = predicates::orient2d(a, b, c), o2 = predicates::orient2d(a, b, d);
      const int o3 = predicates::orient2d(c, d, a), o4 = predicates::orient2d(c, d, b);
      if (o1 * o2 <= 0 && o3 * o4 <= 0 && !(o1 == 0 && o2 == 0)) return true;
    }
  }
  return false;
}

double distance_to_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 d = b - a;
  const double t = std::clamp((p - a).dot(d) / std::max(d.squaredNorm(), 1e-300), 0.0, 1.0);
  return (a + t * d - p).norm();
}

struct SeamSide {
  int face = 0, corner = 0;   // this side: edge from corner to corner + 1
  int twin = 0;               // face on the far side
  Vec2 a, b;                  // this side's uv
  Vec2 ta, tb;                // far side's uv of the same mesh vertices
};

std::vector<SeamSide> seam_sides(const TriMesh& mesh, const UVChart& chart) {
  std::vector<SeamSide> out;
  for (const EdgeIncidence& e : mesh.edges()) {
    if (e.faces.size() != 2) continue;
    const int f = e.faces[0], g = e.faces[1];
    const Face& ff = mesh.face(f);
    const Face& gf = mesh.face(g);
    auto uv = [&](int face, const Face& fc, int v) {
      return chart.uv[static_cast<std::size_t>(face)][static_cast<std::size_t>(corner_of(fc, v))];
    };
    if (uv(f, ff, e.key.lo) == uv(g, gf, e.key.lo) && uv(f, ff, e.key.hi) == uv(g, gf, e.key.hi)) continue;
    for (auto [x, xf, y, yf] : {std::tuple{f, &ff, g, &gf}, std::tuple{g, &gf, f, &ff}}) {
      SeamSide s;
      s.face = x;
      s.twin = y;
      for (int k = 0; k < 3; ++k)
        if (edge_of(*xf, k) == e.key) s.corner = k;
      const int u = (*xf)[static_cast<std::size_t>(s.corner)];
      const int w = (*xf)[static_cast<std::size_t>((s.corner + 1) % 3)];
      s.a = uv(x, *xf, u);
      s.b = uv(x, *xf, w);
      s.ta = uv(y, *yf, u);
      s.tb = uv(y, *yf, w);
      out.push_back(s);
    }
  }
  return out;
}

Polygon2 map_across(const Polygon2& p, const SeamSide& s) {
  const Vec2 d0 = s.b - s.a, d1 = s.tb - s.ta;
  const double scale = d1.norm() / d0.norm();
  const double angle = std::atan2(d1.y(), d1.x()) - std::atan2(d0.y(), d0.x());
  const Eigen::Matrix2d m = scale * Eigen::Rotation2Dd(angle).toRotationMatrix();
  auto map = [&](const Ring& r) {
    Ring out;
    for (const Vec2& q : r) out.push_back(s.ta + m * (q - s.a));
    return out;
  };
  Polygon2 out;
  out.outer = map(p.outer);
  for (const Ring& h : p.holes) out.holes.push_back(map(h));
  return out;
}

bool overlaps(const Outline& a, const Outline& b) {
  return a.box.meets(b.box) && geom2d::intersection_area(a.poly, b.poly) >= kOverlapArea;
}

std::vector<Outline> build_outlines(const TriMesh& mesh, const UVChart& chart, const std::vector<Polygon2>& footprints,
                                    const std::vector<PlacementEvent>& placements, std::vector<std::string>& warnings) {
  std::vector<Outline> out;
  for (std::size_t j = 0; j < footprints.size(); ++j) out.push_back({static_cast<int>(j), footprints[j], box_of(footprints[j]), false});
  for (std::size_t i = 0; i < out.size(); ++i)
    for (std::size_t j = i + 1; j < out.size(); ++j)
      if (overlaps(out[i], out[j]))
        throw InvalidInput("placements " + std::to_string(i) + " and " + std::to_string(j) + " overlap");

  const std::vector<SeamSide> sides = seam_sides(mesh, chart);
  const std::size_t primaries = out.size();
  for (std::size_t j = 0; j < primaries; ++j) {
    std::vector<std::pair<double, const SeamSide*>> crossed;
    for (const SeamSide& s : sides) {
      Box sb;
      sb.add(s.a);
      sb.add(s.b);
      if (!sb.meets(out[j].box) || !segment_meets_polygon(s.a, s.b, out[j].poly)) continue;
      crossed.emplace_back(distance_to_segment(placements[j].anchor, s.a, s.b), &s);
    }
    std::stable_sort(crossed.begin(), crossed.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    bool continued = false, blocked = false;
    for (const auto& [dist, s] : crossed) {
      const Vec2 mid = 0.5 * (s->ta + s->tb);
      bool covered = false;
      for (std::size_t c = primaries; c < out.size() && !covered; ++c)
        covered = out[c].placement == static_cast<int>(j) && geom2d::contains(out[c].poly, mid);
      if (covered) continue;
      Outline copy{static_cast<int>(j), map_across(out[j].poly, *s), {}, true};
      copy.box = box_of(copy.poly);
      bool clash = false;
      for (std::size_t c = 0; c < out.size() && !clash; ++c) clash = overlaps(copy, out[c]);
      if (clash) {
        blocked = true;
        continue;
      }
      out.push_back(std::move(copy));
      continued = true;
    }
    if (continued) warnings.push_back("placement " + std::to_string(j) + " crosses a seam; continued on the far side");
    if (blocked) warnings.push_back("placement " + std::to_string(j) + " crosses a seam where its continuation would overlap another outline");
  }
  return out;
}

}  // namespace

Polygon2 footprint_in_chart(const TextureElement& element, const PlacementEvent& placement, const UVChart& chart,
                            const TriMesh& mesh, const ChartIndex& index, const ImprintOptions& options) {
  double scale = placement.scale;
  if (options.physical_scale) {
    const double r = scale * element.nominal_size / 2;
    double a3 = 0.0, a2 = 0.0;
    for (int f : index.faces_in_box(placement.anchor - Vec2(r, r), placement.anchor + Vec2(r, r))) {
      a3 += mesh.face_area(f);
      a2 += chart.signed_area(f);
    }
    if (a2 > 0 && a3 > 0) scale *= std::sqrt(a2 / a3);
  }
  return geom2d::transformed(element.shape, placement.anchor, placement.rotation, scale);
}

ImprintedMesh imprint(const TriMesh& mesh, const UVChart& chart, const TextureElement& element,
                      const std::vector<PlacementEvent>& placements, const ImprintOptions& options) {
  if (chart.face_count() != mesh.face_count()) throw InvalidInput("chart does not match the mesh");
  ImprintedMesh result;
  std::vector<FaceTag> tags = mesh.tags();
  if (placements.empty()) {
    result.mesh = mesh;
    result.chart = chart;
    result.face_placement.assign(mesh.face_count(), -1);
    return result;
  }

  const ChartIndex index(chart);
  for (const PlacementEvent& p : placements) result.footprints.push_back(footprint_in_chart(element, p, chart, mesh, index, options));
  const std::vector<Outline> outlines = build_outlines(mesh, chart, result.footprints, placements, result.warnings);

  // Phase 1: overlay every touched face with its outlines and pool the split
  // points of each mesh edge.
  std::map<std::size_t, FaceWork> work;
  for (std::size_t o = 0; o < outlines.size(); ++o)
    for (int f : index.faces_in_box(outlines[o].box.lo, outlines[o].box.hi))
      work[static_cast<std::size_t>(f)].outlines.push_back(static_cast<int>(o));

  std::map<EdgeKey, EdgeSplits> splits;
  for (auto& [f, w] : work) {
    const UVTriangle& t = chart.uv[f];
    const Face& face = mesh.face(static_cast<int>(f));
    for (int o : w.outlines)
      for (const Ring& r : rings_of(outlines[static_cast<std::size_t>(o)].poly)) {
        w.rings.push_back(r);
        w.ring_outline.push_back(o);
      }
    const Ring tri{t[0], t[1], t[2]};
    w.ov = geom2d::overlay(std::span<const Ring>(&tri, 1), w.rings);
    for (const geom2d::Crossing& c : w.ov.crossings) {
      const EdgeKey e = edge_of(face, c.subject_edge);
      const double tl = t_from_lo(t, face, c.subject_edge, c.subject_t_lex);
      w.crossing_at.emplace_back(e, tl);
      splits[e].raw.push_back(tl);
    }
    for (std::size_t r = 0; r < w.rings.size(); ++r) {
      for (std::size_t v = 0; v < w.rings[r].size(); ++v) {
        const Vec2& q = w.rings[r][v];
        for (int k = 0; k < 3; ++k) {
          const Vec2& a = t[static_cast<std::size_t>(k)];
          const Vec2& b = t[static_cast<std::size_t>((k + 1) % 3)];
          if (q == a || q == b || predicates::orient2d(a, b, q) != 0) continue;
          if ((q - a).dot(b - a) <= 0 || (q - b).dot(a - b) <= 0) continue;
          const Vec2& p0 = lex_less(a, b) ? a : b;
          const Vec2& p1 = lex_less(a, b) ? b : a;
          const double tl = t_from_lo(t, face, k, (q - p0).norm() / (p1 - p0).norm());
          const EdgeKey e = edge_of(face, k);
          w.on_edge.emplace_back(static_cast<int>(r), static_cast<int>(v), e, tl);
          splits[e].raw.push_back(tl);
        }
      }
    }
    bool vertex_inside = false;
    for (std::size_t r = 0; r < w.rings.size(); ++r)
      vertex_inside = vertex_inside || w.ov.clip[r].start_inside || w.ov.clip[r].crossing_count() > 0;
    w.rebuild = !w.ov.crossings.empty() || vertex_inside || !w.on_edge.empty();
  }
  for (auto& [e, s] : splits) s.finish();

  // Phase 2: rebuild faces, sharing split vertices along edges.
  std::vector<Vec3> positions = mesh.positions();
  std::map<std::pair<EdgeKey, int>, int> split_vertex;
  std::vector<Face> faces;
  std::vector<FaceTag> out_tags;
  std::vector<int> face_placement;
  std::vector<UVTriangle> out_uv;

  auto emit = [&](const Face& fc, FaceTag tag, int placement, const UVTriangle& uv) {
    faces.push_back(fc);
    out_tags.push_back(tag);
    face_placement.push_back(placement);
    out_uv.push_back(uv);
  };

  for (std::size_t f = 0; f < mesh.face_count(); ++f) {
    const Face& face = mesh.face(static_cast<int>(f));
    const UVTriangle& t = chart.uv[f];
    const FaceTag input_tag = tags.empty() ? FaceTag::Untouched : tags[f];
    const auto wit = work.find(f);
    FaceWork* w = wit == work.end() ? nullptr : &wit->second;

    bool has_splits = false;
    for (int k = 0; k < 3 && !has_splits; ++k) {
      const auto it = splits.find(edge_of(face, k));
      has_splits = it != splits.end() && !it->second.rep.empty();
    }
    if (!has_splits && (!w || !w->rebuild)) {
      int placement = -1;
      if (w && w->ov.subject[0].start_inside) {
        // No outline edge enters the face: it lies wholly inside one outline.
        for (int o : w->outlines) {
          const auto rings = rings_of(outlines[static_cast<std::size_t>(o)].poly);
          if (geom2d::perturbed_inside(rings, t[0], -1)) placement = outlines[static_cast<std::size_t>(o)].placement;
        }
      }
      emit(face, placement >= 0 ? FaceTag::TextureInterior : input_tag, placement, t);
      continue;
    }

    geom2d::CdtInput in;
    std::vector<PointRef> refs;
    std::map<std::pair<double, double>, int> at;
    auto add_point = [&](const Vec2& p, PointRef ref) {
      const auto [it, fresh] = at.emplace(std::pair{p.x(), p.y()}, static_cast<int>(in.points.size()));
      if (fresh) {
        in.points.push_back(p);
        refs.push_back(ref);
      }
      return it->second;
    };

    // Face-local uv of each split: the exact outline vertex or crossing when
    // this face produced one, otherwise interpolated along the uv edge.
    std::map<std::pair<EdgeKey, int>, Vec2> local;
    if (w) {
      for (const auto& [r, v, e, tl] : w->on_edge) {
        const int c = splits.at(e).find(tl);
        if (c >= 0) local.emplace(std::pair{e, c}, w->rings[static_cast<std::size_t>(r)][static_cast<std::size_t>(v)]);
      }
      for (std::size_t i = 0; i < w->ov.crossings.size(); ++i) {
        const auto& [e, tl] = w->crossing_at[i];
        const int c = splits.at(e).find(tl);
        if (c >= 0) local.emplace(std::pair{e, c}, w->ov.crossings[i].point);
      }
    }

    std::vector<int> ring;
    for (int k = 0; k < 3; ++k) {
      PointRef corner;
      corner.kind = PointRef::Corner;
      corner.corner = k;
      ring.push_back(add_point(t[static_cast<std::size_t>(k)], corner));
      const EdgeKey e = edge_of(face, k);
      const auto it = splits.find(e);
      if (it == splits.end()) continue;
      const int u = face[static_cast<std::size_t>(k)];
      const bool from_lo = u == e.lo;
      const int n = static_cast<int>(it->second.rep.size());
      for (int i = 0; i < n; ++i) {
        const int c = from_lo ? i : n - 1 - i;
        const double tu = from_lo ? it->second.rep[static_cast<std::size_t>(c)] : 1.0 - it->second.rep[static_cast<std::size_t>(c)];
        const auto lit = local.find({e, c});
        const Vec2 p = lit != local.end() ? lit->second
                                          : Vec2(t[static_cast<std::size_t>(k)] + tu * (t[static_cast<std::size_t>((k + 1) % 3)] - t[static_cast<std::size_t>(k)]));
        PointRef ref;
        ref.kind = PointRef::Split;
        ref.edge = e;
        ref.cluster = c;
        ring.push_back(add_point(p, ref));
      }
    }
    in.boundary_rings.push_back(ring);

    auto corner_id = [&](const EdgeKey& e, int which) {
      const int v = which == -1 ? e.lo : e.hi;
      return at.at({t[static_cast<std::size_t>(corner_of(face, v))].x(), t[static_cast<std::size_t>(corner_of(face, v))].y()});
    };
    auto split_id = [&](const EdgeKey& e, double tl) {
      const int c = splits.at(e).find(tl);
      if (c < 0) return corner_id(e, c);
      for (std::size_t i = 0; i < refs.size(); ++i)
        if (refs[i].kind == PointRef::Split && refs[i].edge == e && refs[i].cluster == c) return static_cast<int>(i);
      throw GeometryError("imprint lost a split point on face " + std::to_string(f));
    };

    std::set<std::pair<int, int>> constraints;
    auto constrain = [&](int a, int b) {
      if (a != b) constraints.insert({std::min(a, b), std::max(a, b)});
    };
    if (w) {
      for (std::size_t r = 0; r < w->rings.size(); ++r) {
        const Ring& rr = w->rings[r];
        const geom2d::RingSplit& rs = w->ov.clip[r];
        auto vertex_id = [&](std::size_t v) {
          for (const auto& [ri, vi, e, tl] : w->on_edge)
            if (ri == static_cast<int>(r) && vi == static_cast<int>(v)) return split_id(e, tl);
          return add_point(rr[v], PointRef{});
        };
        bool inside = rs.start_inside;
        int cur = inside ? vertex_id(0) : -1;
        for (std::size_t j = 0; j < rr.size(); ++j) {
          if (inside) cur = vertex_id(j);
          for (int id : rs.edge_crossings[j]) {
            const auto& [e, tl] = w->crossing_at[static_cast<std::size_t>(id)];
            const int pid = split_id(e, tl);
            if (inside) constrain(cur, pid);
            inside = !inside;
            cur = pid;
          }
          if (inside) constrain(cur, vertex_id((j + 1) % rr.size()));
        }
      }
    }
    for (const auto& [a, b] : constraints) in.constraints.push_back({a, b});

    geom2d::Triangulation2 tri;
    try {
      tri = geom2d::cdt_indexed(in);
    } catch (const InvalidInput& e) {
      throw GeometryError("imprint could not retriangulate face " + std::to_string(f) + ": " + e.what());
    }

    std::vector<int> vid(in.points.size(), -1);
    auto vertex = [&](int i) {
      int& v = vid[static_cast<std::size_t>(i)];
      if (v >= 0) return v;
      const PointRef& ref = refs[static_cast<std::size_t>(i)];
      if (ref.kind == PointRef::Corner) {
        v = face[static_cast<std::size_t>(ref.corner)];
      } else if (ref.kind == PointRef::Split) {
        const auto key = std::pair{ref.edge, ref.cluster};
        const auto it = split_vertex.find(key);
        if (it != split_vertex.end()) {
          v = it->second;
        } else {
          const double tl = splits.at(ref.edge).rep[static_cast<std::size_t>(ref.cluster)];
          v = static_cast<int>(positions.size());
          positions.push_back((1.0 - tl) * mesh.position(ref.edge.lo) + tl * mesh.position(ref.edge.hi));
          split_vertex.emplace(key, v);
        }
      } else {
        v = static_cast<int>(positions.size());
        positions.push_back(uv_to_3d(chart, mesh, static_cast<int>(f), in.points[static_cast<std::size_t>(i)]));
      }
      return v;
    };

    for (const auto* list : {&tri.triangles, &tri.slivers}) {
      for (const auto& tr : *list) {
        const Vec2 c = (in.points[static_cast<std::size_t>(tr[0])] + in.points[static_cast<std::size_t>(tr[1])] +
                        in.points[static_cast<std::size_t>(tr[2])]) /
                       3.0;
        int placement = -1;
        if (w)
          for (int o : w->outlines)
            if (placement < 0 && geom2d::contains(outlines[static_cast<std::size_t>(o)].poly, c))
              placement = outlines[static_cast<std::size_t>(o)].placement;
        const UVTriangle uv{in.points[static_cast<std::size_t>(tr[0])], in.points[static_cast<std::size_t>(tr[1])],
                            in.points[static_cast<std::size_t>(tr[2])]};
        emit({vertex(tr[0]), vertex(tr[1]), vertex(tr[2])}, placement >= 0 ? FaceTag::TextureInterior : input_tag, placement, uv);
      }
    }
  }

  result.mesh = TriMesh(std::move(positions), std::move(faces), std::move(out_tags));
  result.face_placement = std::move(face_placement);

  // Output chart: same seams (now split), fresh distortion numbers.
  UVChart& oc = result.chart;
  oc.uv = std::move(out_uv);
  oc.raw_area_ratio = chart.raw_area_ratio;
  oc.energy_history = chart.energy_history;
  oc.area_distortion.resize(oc.uv.size());
  for (std::size_t f = 0; f < oc.uv.size(); ++f) {
    const double a3 = result.mesh.face_area(static_cast<int>(f));
    oc.area_distortion[f] = a3 > 0 ? std::abs(oc.signed_area(static_cast<int>(f)) / a3 - 1.0) : 0.0;
    oc.max_distortion = std::max(oc.max_distortion, oc.area_distortion[f]);
  }
  for (const EdgeIncidence& e : result.mesh.edges()) {
    if (e.faces.size() != 2) continue;
    const Face& a = result.mesh.face(e.faces[0]);
    const Face& b = result.mesh.face(e.faces[1]);
    for (int v : {e.key.lo, e.key.hi}) {
      if (oc.uv[static_cast<std::size_t>(e.faces[0])][static_cast<std::size_t>(corner_of(a, v))] !=
          oc.uv[static_cast<std::size_t>(e.faces[1])][static_cast<std::size_t>(corner_of(b, v))]) {
        oc.seam_edges.push_back(e.key);
        break;
      }
    }
  }

  std::sort(oc.seam_edges.begin(), oc.seam_edges.end());

  // Boundary loops: directed edges of interior faces whose twin lies outside
  // the same placement, chained head to tail.
  std::unordered_map<EdgeKey, std::vector<std::pair<int, bool>>, EdgeKeyHash> incident;
  for (const EdgeIncidence& e : result.mesh.edges())
    for (std::size_t i = 0; i < e.faces.size(); ++i) incident[e.key].emplace_back(e.faces[i], e.forward[i]);
  std::vector<double> interior_area(placements.size(), 0.0);
  for (std::size_t p = 0; p < placements.size(); ++p) {
    std::map<int, std::vector<int>> next;
    for (std::size_t f = 0; f < result.mesh.face_count(); ++f) {
      if (result.face_placement[f] != static_cast<int>(p)) continue;
      interior_area[p] += result.chart.signed_area(static_cast<int>(f));
      const Face& fc = result.mesh.face(static_cast<int>(f));
      for (int k = 0; k < 3; ++k) {
        const int a = fc[static_cast<std::size_t>(k)], b = fc[static_cast<std::size_t>((k + 1) % 3)];
        bool shared = false;
        for (const auto& [g, fwd] : incident[EdgeKey(a, b)])
          shared = shared || (g != static_cast<int>(f) && result.face_placement[static_cast<std::size_t>(g)] == static_cast<int>(p));
        if (!shared) next[a].push_back(b);
      }
    }
    if (interior_area[p] <= 0) throw InvalidInput("placement " + std::to_string(p) + " does not meet the chart");
    while (!next.empty()) {
      BoundaryLoop loop;
      loop.placement = static_cast<int>(p);
      const int start = next.begin()->first;
      int v = start;
      do {
        loop.vertices.push_back(v);
        auto it = next.find(v);
        if (it == next.end()) throw GeometryError("open boundary around placement " + std::to_string(p));
        const int n = it->second.back();
        it->second.pop_back();
        if (it->second.empty()) next.erase(it);
        v = n;
      } while (v != start);
      result.loops.push_back(std::move(loop));
    }
    if (interior_area[p] < (1.0 - kClippedArea) * result.footprints[p].area())
      result.warnings.push_back("placement " + std::to_string(p) + " is cut off by the chart boundary");
  }
  return result;
}

}  // namespace texprint
