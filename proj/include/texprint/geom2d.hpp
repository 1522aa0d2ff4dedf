#pragma once

#include <array>
#include <span>
#include <vector>

#include "texprint/mesh.hpp"

namespace texprint::geom2d {

using Ring = std::vector<Vec2>;

inline constexpr double kDuplicateSpacing = 1e-9;
inline constexpr double kMinFeature = 1e-6;
inline constexpr double kSliverArea = 1e-14;

// One outer ring (CCW) plus hole rings (CW). Chart units (mm).
struct Polygon2 {
  Ring outer;
  std::vector<Ring> holes;

  double area() const;
  std::size_t ring_count() const { return 1 + holes.size(); }
  const Ring& ring(std::size_t i) const { return i == 0 ? outer : holes[i - 1]; }
};

using MultiPolygon2 = std::vector<Polygon2>;

double signed_area(std::span<const Vec2> ring);
double area(const MultiPolygon2& mp);
Vec2 centroid(const Polygon2& p);

// Builds a valid polygon: drops consecutive duplicates (spacing <= 1e-9),
// orients the outer ring CCW and holes CW, then validates. Throws
// InvalidInput on self-intersection, holes outside the outer ring, or fewer
// than three distinct points.
Polygon2 make_polygon(Ring outer, std::vector<Ring> holes = {});
// Like make_polygon, but additionally collapses edges shorter than
// kMinFeature (element ingest).
Polygon2 make_polygon_collapsed(Ring outer, std::vector<Ring> holes = {});
void validate(const Polygon2& p);
bool ring_is_simple(std::span<const Vec2> ring);

// Even-odd containment over every ring of p. Points exactly on the boundary
// report true.
bool contains(const Polygon2& p, const Vec2& q);
bool contains(const MultiPolygon2& mp, const Vec2& q);
bool ring_contains(std::span<const Vec2> ring, const Vec2& q);  // strict interior or boundary

Polygon2 transformed(const Polygon2& p, const Vec2& translate, double rotation, double scale);
Polygon2 translated(const Polygon2& p, const Vec2& offset);

// ---- Boolean operations (Greiner-Hormann style traversal) ---------------------
//
// Degenerate incidences are resolved by symbolically displacing `b` by
// (eps, eps^2), eps -> 0+. Output coordinates are the unperturbed limit.

std::vector<Polygon2> intersect(const Polygon2& a, const Polygon2& b);
std::vector<Polygon2> difference(const Polygon2& a, const Polygon2& b);
double intersection_area(const Polygon2& a, const Polygon2& b);
double intersection_area(const MultiPolygon2& a, const Polygon2& b);

// Low-level overlay shared by the boolean operations and mesh imprinting.
struct Crossing {
  Vec2 point;
  int subject_ring = 0;
  int subject_edge = 0;
  int clip_ring = 0;
  int clip_edge = 0;
  // Parameter along the subject edge measured from its lexicographically
  // smaller endpoint; identical for two faces sharing that edge.
  double subject_t_lex = 0.0;
  bool subject_edge_lex_forward = true;  // ring direction == lexicographic direction
};

struct RingSplit {
  // Crossing ids on each edge, ordered along the ring direction.
  std::vector<std::vector<int>> edge_crossings;
  // Whether vertex 0 of the ring lies inside the other operand.
  bool start_inside = false;
  std::size_t crossing_count() const;
};

struct Overlay {
  std::vector<Crossing> crossings;
  std::vector<RingSplit> subject;
  std::vector<RingSplit> clip;
};

// Rings must be oriented (outer CCW, holes CW); the clip operand may be any
// collection of rings, interpreted with the even-odd rule.
Overlay overlay(std::span<const Ring> subject, std::span<const Ring> clip);

// Perturbed even-odd point test: is p + k*s inside the rings?
bool perturbed_inside(std::span<const Ring> rings, const Vec2& p, int k);

// ---- Constrained Delaunay triangulation -------------------------------------

struct Segment {
  Vec2 a;
  Vec2 b;
};

struct Triangulation2 {
  std::vector<Vec2> points;
  std::vector<std::array<int, 3>> triangles;  // CCW
  std::vector<std::array<int, 2>> constrained_edges;
  // Triangles with area below kSliverArea are reported here instead of in
  // `triangles`. Together both lists tile the region.
  std::vector<std::array<int, 3>> slivers;

  double area() const;
};

Triangulation2 cdt(const Polygon2& region, std::span<const Segment> extra_constraints = {});

// Indexed form: points are used verbatim (exact duplicates must not occur),
// region = even-odd interior of the boundary rings, constraints are pairs of
// point indices. Every boundary ring edge is constrained as well.
struct CdtInput {
  std::vector<Vec2> points;
  std::vector<std::vector<int>> boundary_rings;
  std::vector<std::array<int, 2>> constraints;
};
Triangulation2 cdt_indexed(const CdtInput& input);

}  // namespace texprint::geom2d
