#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include "shapes.hpp"
#include "texprint/texture_synth.hpp"

using namespace texprint;
using namespace texprint::testing;

namespace {

UVChart flat_chart(const TriMesh& m, double scale = 1.0) {
  UVChart c;
  for (std::size_t f = 0; f < m.face_count(); ++f) {
    UVTriangle t;
    for (int k = 0; k < 3; ++k) t[static_cast<std::size_t>(k)] = scale * m.position(m.face(static_cast<int>(f))[static_cast<std::size_t>(k)]).head<2>();
    c.uv.push_back(t);
  }
  c.area_distortion.assign(m.face_count(), 0.0);
  return c;
}

TriMesh fan_patch() {
  return TriMesh({{0, 0, 0}, {2, 0, 0}, {2, 2, 0}, {0, 2, 0}, {1, 1, 0}}, {{0, 1, 4}, {1, 2, 4}, {2, 3, 4}, {3, 0, 4}});
}

TextureElement square_element(double side) { return make_element(geom2d::make_polygon(square(0, 0, side))); }
TextureElement disc_element(double r, int n = 64) { return make_element(geom2d::make_polygon(ngon({0, 0}, r, n))); }

// Chart coordinates of the surface point nearest p.
Vec2 to_chart(const TriMesh& m, const UVChart& c, const Vec3& p) {
  const SurfacePoint s = closest_point(m, p);
  const Face& f = m.face(s.face);
  const Vec3 a = m.position(f[0]), b = m.position(f[1]), d = m.position(f[2]);
  const Vec3 n = (b - a).cross(d - a);
  const double w0 = (d - b).cross(s.point - b).dot(n) / n.squaredNorm();
  const double w1 = (a - d).cross(s.point - d).dot(n) / n.squaredNorm();
  const UVTriangle& t = c.uv[static_cast<std::size_t>(s.face)];
  return w0 * t[0] + w1 * t[1] + (1 - w0 - w1) * t[2];
}

double tagged_area(const ImprintedMesh& im, bool interior) {
  double a = 0.0;
  for (std::size_t f = 0; f < im.mesh.face_count(); ++f)
    if ((im.face_placement[f] >= 0) == interior) a += im.mesh.face_area(static_cast<int>(f));
  return a;
}

std::vector<PlacementEvent> cylinder_grid(const TriMesh& m, const UVChart& c, double r) {
  std::vector<PlacementEvent> out;
  int seq = 0;
  for (double z : {10.0, 15.0, 20.0})
    for (double th : {0.9, 1.5, 2.1}) out.push_back({to_chart(m, c, {r * std::cos(th), r * std::sin(th), z}), 0.0, 1.0, seq++});
  return out;
}

void expect_loops_separate(const ImprintedMesh& im) {
  std::map<EdgeKey, std::vector<int>> faces_of;
  for (const EdgeIncidence& e : im.mesh.edges()) faces_of[e.key] = e.faces;
  for (const BoundaryLoop& loop : im.loops) {
    ASSERT_GE(loop.vertices.size(), 3u);
    for (std::size_t i = 0; i < loop.vertices.size(); ++i) {
      const EdgeKey e(loop.vertices[i], loop.vertices[(i + 1) % loop.vertices.size()]);
      ASSERT_TRUE(faces_of.count(e)) << "loop edge missing from mesh";
      int inside = 0, outside = 0;
      for (int f : faces_of[e]) (im.face_placement[static_cast<std::size_t>(f)] == loop.placement ? inside : outside)++;
      EXPECT_EQ(inside, 1);
      EXPECT_LE(outside, 1);
      if (outside == 1) {
        for (int f : faces_of[e])
          if (im.face_placement[static_cast<std::size_t>(f)] != loop.placement)
            EXPECT_NE(im.mesh.tags()[static_cast<std::size_t>(f)], FaceTag::TextureInterior);
      }
    }
  }
}

void expect_on_surface(const TriMesh& input, const ImprintedMesh& im) {
  for (std::size_t v = input.vertex_count(); v < im.mesh.vertex_count(); ++v)
    EXPECT_LT(closest_point(input, im.mesh.position(static_cast<int>(v))).distance, 1e-9) << "vertex " << v;
}

}  // namespace

TEST(Imprint, UnitSquareOnFourTrianglePatch) {
  const TriMesh m = fan_patch();
  const ImprintedMesh im = imprint(m, flat_chart(m), square_element(1), {{{1, 1}, 0, 1, 0}});
  EXPECT_NEAR(tagged_area(im, true), 1.0, 1e-12);
  EXPECT_NEAR(tagged_area(im, false), 3.0, 1e-12);
  EXPECT_NEAR(im.mesh.surface_area(), m.surface_area(), 1e-9);
  ASSERT_EQ(im.loops.size(), 1u);
  EXPECT_EQ(im.loops[0].vertices.size(), 4u);
  EXPECT_TRUE(im.warnings.empty());
  expect_loops_separate(im);
  for (std::size_t f = 0; f < im.mesh.face_count(); ++f) {
    EXPECT_EQ(im.mesh.tags()[f] == FaceTag::TextureInterior, im.face_placement[f] == 0);
    EXPECT_GT(im.mesh.face_normal(static_cast<int>(f)).z(), 0.0);
  }
  const WatertightReport w = check_watertight(im.mesh);
  EXPECT_EQ(w.nonmanifold_edge_count, 0u);
  EXPECT_EQ(w.inconsistent_winding_pairs, 0u);
  EXPECT_EQ(w.boundary_edge_count, 4u);
}

TEST(Imprint, ElementInsideOneTriangleReplacesOneFace) {
  const TriMesh m = grid_mesh(4, 4, 4, 4);
  const UVChart c = flat_chart(m);
  const Vec2 anchor = (c.uv[5][0] + c.uv[5][1] + c.uv[5][2]) / 3.0;
  const ImprintedMesh im = imprint(m, c, disc_element(0.05, 6), {{anchor, 0.3, 1, 0}});
  std::size_t kept = 0;
  for (std::size_t f = 0; f < im.mesh.face_count(); ++f)
    for (std::size_t g = 0; g < m.face_count(); ++g)
      if (im.mesh.face(static_cast<int>(f)) == m.face(static_cast<int>(g))) ++kept;
  EXPECT_EQ(kept, m.face_count() - 1);
  ASSERT_EQ(im.loops.size(), 1u);
  EXPECT_EQ(im.loops[0].vertices.size(), 6u);
  EXPECT_NEAR(tagged_area(im, true), im.footprints[0].area(), 1e-12);
  EXPECT_NEAR(im.mesh.surface_area(), m.surface_area(), 1e-9);
  EXPECT_TRUE(check_watertight(im.mesh).boundary_edge_count == check_watertight(m).boundary_edge_count);
}

TEST(Imprint, CircleGridOnCylinderStaysWatertight) {
  const TriMesh m = capped_cylinder(10, 30, 48, 12, 4);
  const UVChart c = parameterize(m);
  const auto placements = cylinder_grid(m, c, 10);
  const ImprintedMesh im = imprint(m, c, disc_element(1), placements);
  const WatertightReport w = check_watertight(im.mesh);
  EXPECT_TRUE(w.is_closed);
  EXPECT_EQ(w.euler_characteristic, 2);
  EXPECT_NEAR(im.mesh.surface_area() / m.surface_area(), 1.0, 1e-6);
  std::vector<int> loops(placements.size(), 0);
  for (const BoundaryLoop& l : im.loops) ++loops[static_cast<std::size_t>(l.placement)];
  for (int n : loops) EXPECT_GE(n, 1);
  expect_loops_separate(im);
  expect_on_surface(m, im);
  // Splitting faces within their planes leaves the normals of input vertices unchanged.
  const auto before = vertex_normals(m), after = vertex_normals(im.mesh);
  for (std::size_t v = 0; v < m.vertex_count(); ++v) EXPECT_LT((before[v] - after[v]).norm(), 1e-9) << v;
  // Each disc covers close to pi mm^2 of the surface.
  EXPECT_NEAR(tagged_area(im, true), 9 * std::numbers::pi, 0.05 * 9 * std::numbers::pi);
}

TEST(Imprint, NoPlacementsIsIdentity) {
  const TriMesh m = capped_cylinder(5, 10, 16, 4, 2);
  const UVChart c = parameterize(m);
  const ImprintedMesh im = imprint(m, c, disc_element(1), {});
  EXPECT_EQ(im.mesh.positions(), m.positions());
  EXPECT_EQ(im.mesh.faces(), m.faces());
  EXPECT_TRUE(im.loops.empty());
  EXPECT_EQ(im.chart.uv, c.uv);
}

TEST(Imprint, RejectsOverlapAndOffChart) {
  const TriMesh m = grid_mesh(10, 10, 5, 5);
  const UVChart c = flat_chart(m);
  EXPECT_THROW(imprint(m, c, disc_element(1), {{{3, 3}, 0, 1, 0}, {{4.5, 3}, 0, 1, 1}}), InvalidInput);
  EXPECT_NO_THROW(imprint(m, c, disc_element(1), {{{3, 3}, 0, 1, 0}, {{5.1, 3}, 0, 1, 1}}));
  EXPECT_THROW(imprint(m, c, disc_element(1), {{{30, 3}, 0, 1, 0}}), InvalidInput);
}

TEST(Imprint, ClippedAtChartBoundaryWarns) {
  const TriMesh m = grid_mesh(10, 10, 5, 5);
  const ImprintedMesh im = imprint(m, flat_chart(m), square_element(2), {{{0, 5}, 0, 1, 0}});
  EXPECT_NEAR(tagged_area(im, true), 2.0, 1e-12);
  ASSERT_EQ(im.warnings.size(), 1u);
  EXPECT_NE(im.warnings[0].find("cut off"), std::string::npos);
  expect_loops_separate(im);
}

TEST(Imprint, HolesStayOutside) {
  const TriMesh m = grid_mesh(10, 10, 7, 7);
  const TextureElement ring = make_element(geom2d::make_polygon(ngon({0, 0}, 2, 32), {[] {
    auto h = ngon({0, 0}, 1, 32);
    std::reverse(h.begin(), h.end());
    return h;
  }()}));
  const ImprintedMesh im = imprint(m, flat_chart(m), ring, {{{5, 5}, 0.1, 1, 0}});
  EXPECT_NEAR(tagged_area(im, true), im.footprints[0].area(), 1e-10);
  EXPECT_NEAR(im.mesh.surface_area(), 100.0, 1e-9);
  EXPECT_EQ(im.loops.size(), 2u);
  expect_loops_separate(im);
}

TEST(Imprint, PhysicalScaleKeepsMillimetres) {
  const TriMesh m = grid_mesh(10, 10, 6, 6);
  const UVChart c = flat_chart(m, 3.0);
  const ImprintedMesh im = imprint(m, c, square_element(2), {{{15, 15}, 0, 1, 0}});
  EXPECT_NEAR(tagged_area(im, true), 4.0, 1e-10);
  ImprintOptions raw;
  raw.physical_scale = false;
  const ImprintedMesh unscaled = imprint(m, c, square_element(2), {{{15, 15}, 0, 1, 0}}, raw);
  EXPECT_NEAR(tagged_area(unscaled, true), 4.0 / 9.0, 1e-10);
}

TEST(Imprint, VerticesOnSharedEdgesAreShared) {
  // Element edges run exactly along mesh edges and through mesh vertices.
  const TriMesh m = grid_mesh(4, 4, 4, 4);
  const ImprintedMesh im = imprint(m, flat_chart(m), square_element(2), {{{2, 2}, 0, 1, 0}});
  EXPECT_NEAR(tagged_area(im, true), 4.0, 1e-12);
  EXPECT_EQ(im.mesh.vertex_count(), m.vertex_count());
  EXPECT_EQ(check_watertight(im.mesh).boundary_edge_count, check_watertight(m).boundary_edge_count);
  expect_loops_separate(im);
}

TEST(Imprint, SeamCrossingIsContinuedAndWarned) {
  const TriMesh m = capped_cylinder(10, 30, 48, 12, 4);
  const UVChart c = parameterize(m);
  ASSERT_FALSE(c.seam_edges.empty());
  // Pick a seam edge on the side wall, away from the caps.
  std::optional<Vec3> mid;
  for (const EdgeKey& e : c.seam_edges) {
    const Vec3 p = 0.5 * (m.position(e.lo) + m.position(e.hi));
    if (p.z() > 8 && p.z() < 22 && std::hypot(p.x(), p.y()) > 9.9) {
      mid = p;
      break;
    }
  }
  ASSERT_TRUE(mid.has_value());
  const ImprintedMesh im = imprint(m, c, disc_element(1.5), {{to_chart(m, c, *mid), 0, 1, 0}});
  ASSERT_FALSE(im.warnings.empty());
  EXPECT_NE(im.warnings[0].find("seam"), std::string::npos);
  EXPECT_TRUE(check_watertight(im.mesh).is_closed);
  EXPECT_NEAR(im.mesh.surface_area() / m.surface_area(), 1.0, 1e-9);
  // Both sides of the seam are textured: one full disc, up to the chart's
  // local area distortion.
  double distortion = 0.0;
  for (std::size_t f = 0; f < m.face_count(); ++f)
    if ((m.position(m.face(static_cast<int>(f))[0]) - *mid).norm() < 4.0) distortion = std::max(distortion, c.area_distortion[f]);
  EXPECT_NEAR(tagged_area(im, true), std::numbers::pi * 2.25, distortion * std::numbers::pi * 2.25);
  expect_loops_separate(im);
  expect_on_surface(m, im);
}

TEST(Imprint, RandomPlacementsOnClosedShapes) {
  std::mt19937 rng(7);
  for (const TriMesh& m : {icosphere(10, 3), blob(12, 3), box_mesh({20, 20, 20}, {4, 4, 4})}) {
    const UVChart c = parameterize(m);
    std::vector<PlacementEvent> placements;
    std::uniform_int_distribution<std::size_t> pick(0, m.face_count() - 1);
    std::uniform_real_distribution<double> angle(0, 2 * std::numbers::pi);
    const TextureElement e = disc_element(0.8, 24);
    for (int tries = 0; tries < 200 && placements.size() < 12; ++tries) {
      const auto& t = c.uv[pick(rng)];
      const PlacementEvent p{(t[0] + t[1] + t[2]) / 3.0, angle(rng), 1.0, static_cast<int>(placements.size())};
      bool clear = true;
      for (const auto& q : placements) clear = clear && (q.anchor - p.anchor).norm() > 4.0;
      if (clear) placements.push_back(p);
    }
    const ImprintedMesh im = imprint(m, c, e, placements);
    const WatertightReport w = check_watertight(im.mesh);
    EXPECT_TRUE(w.is_closed);
    EXPECT_EQ(w.euler_characteristic, 2);
    EXPECT_NEAR(im.mesh.surface_area() / m.surface_area(), 1.0, 1e-9);
    expect_loops_separate(im);
    expect_on_surface(m, im);
    for (std::size_t f = 0; f < im.chart.face_count(); ++f) EXPECT_GE(im.chart.signed_area(static_cast<int>(f)), 0.0);
  }
}

TEST(Imprint, Deterministic) {
  const TriMesh m = capped_cylinder(10, 30, 48, 12, 4);
  const UVChart c = parameterize(m);
  const auto placements = cylinder_grid(m, c, 10);
  const ImprintedMesh a = imprint(m, c, disc_element(1), placements);
  const ImprintedMesh b = imprint(m, c, disc_element(1), placements);
  EXPECT_EQ(a.mesh.positions(), b.mesh.positions());
  EXPECT_EQ(a.mesh.faces(), b.mesh.faces());
}
