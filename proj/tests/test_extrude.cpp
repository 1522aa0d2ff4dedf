#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numbers>

#include "shapes.hpp"
#include "texprint/extrude.hpp"

using namespace texprint;
using namespace texprint::testing;

namespace {

// Faces on the plane z = top map to their xy; every other face is parked far
// away in the chart.
UVChart top_chart(const TriMesh& m, double top) {
  UVChart c;
  for (std::size_t f = 0; f < m.face_count(); ++f) {
    const Face& fc = m.face(static_cast<int>(f));
    bool on_top = true;
    for (int v : fc) on_top = on_top && std::abs(m.position(v).z() - top) < 1e-12;
    UVTriangle t;
    for (int k = 0; k < 3; ++k) {
      const Vec3& p = m.position(fc[static_cast<std::size_t>(k)]);
      t[static_cast<std::size_t>(k)] = on_top ? Vec2(p.x(), p.y()) : Vec2(1000 + p.x() + 100 * p.z(), p.y());
    }
    c.uv.push_back(t);
  }
  c.area_distortion.assign(m.face_count(), 0.0);
  return c;
}

TextureElement square_element(double side) { return make_element(geom2d::make_polygon(square(0, 0, side))); }
TextureElement disc_element(double r) { return make_element(geom2d::make_polygon(ngon({0, 0}, r, 64))); }

ImprintedMesh plate_with_square() {
  const TriMesh plate = box_mesh({10, 10, 2}, {5, 5, 1});
  return imprint(plate, top_chart(plate, 2), square_element(1), {{{5, 5}, 0.3, 1, 0}});
}

ImprintedMesh cube_with_discs() {
  const TriMesh cube = box_mesh({20, 20, 20}, {10, 10, 10});
  std::vector<PlacementEvent> ps;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) ps.push_back({{6.0 + 4 * i, 6.0 + 4 * j}, 0, 1, 3 * i + j});
  return imprint(cube, top_chart(cube, 20), disc_element(1), ps);
}

void expect_closed(const TriMesh& m) {
  const WatertightReport w = check_watertight(m);
  EXPECT_TRUE(w.is_closed);
  EXPECT_EQ(w.nonmanifold_edge_count, 0u);
  EXPECT_EQ(w.inconsistent_winding_pairs, 0u);
  EXPECT_EQ(w.euler_characteristic, 2);
}

// Number of closed boundary curves.
int boundary_loops(const TriMesh& m) {
  std::map<int, std::vector<int>> adj;
  for (const EdgeIncidence& e : m.edges())
    if (e.faces.size() == 1) {
      adj[e.key.lo].push_back(e.key.hi);
      adj[e.key.hi].push_back(e.key.lo);
    }
  std::map<int, bool> seen;
  int loops = 0;
  for (const auto& [v, n] : adj) {
    if (seen[v]) continue;
    ++loops;
    std::vector<int> stack{v};
    while (!stack.empty()) {
      const int x = stack.back();
      stack.pop_back();
      if (seen[x]) continue;
      seen[x] = true;
      for (int y : adj[x]) stack.push_back(y);
    }
  }
  return loops;
}

double wall_area(const TriMesh& m, const std::vector<Face>& faces) {
  double a = 0;
  for (const Face& f : faces) a += 0.5 * (m.position(f[1]) - m.position(f[0])).cross(m.position(f[2]) - m.position(f[0])).norm();
  return a;
}

}  // namespace

TEST(WallTriangulation, SquarePrism) {
  const TriMesh m({{0, 0, 0}, {4, 0, 0}, {4, 4, 0}, {0, 4, 0}, {0, 0, 1}, {4, 0, 1}, {4, 4, 1}, {0, 4, 1}}, {});
  const auto walls = wall_triangulation({0, 1, 2, 3}, {4, 5, 6, 7});
  EXPECT_EQ(walls.size(), 8u);
  EXPECT_NEAR(wall_area(m, walls), 16.0, 1e-12);
  // Base loop runs CCW seen from +z, like a top cap: walls face outward.
  for (const Face& f : walls) {
    const Vec3 n = (m.position(f[1]) - m.position(f[0])).cross(m.position(f[2]) - m.position(f[0]));
    const Vec3 c = (m.position(f[0]) + m.position(f[1]) + m.position(f[2])) / 3.0;
    EXPECT_GT(n.dot(c - Vec3(2, 2, c.z())), 0.0);
    EXPECT_GT(n.norm(), 0.0);
  }
}

TEST(WallTriangulation, HexagonAndErrors) {
  EXPECT_EQ(wall_triangulation({0, 1, 2, 3, 4, 5}, {6, 7, 8, 9, 10, 11}).size(), 12u);
  EXPECT_THROW(wall_triangulation({0, 1, 2}, {3, 4}), InvalidInput);
  EXPECT_THROW(wall_triangulation({0, 1}, {2, 3}), InvalidInput);
}

TEST(Extrude, RaisedSquareOnPlateAddsPrismVolume) {
  const ImprintedMesh im = plate_with_square();
  const TriMesh out = extrude_texture(im, {ExtrudeMode::Raised, 2.0, {}, 0.0});
  expect_closed(out);
  EXPECT_NEAR(out.signed_volume() - im.mesh.signed_volume(), 2.0, 1e-9);
  std::size_t walls = 0;
  for (FaceTag t : out.tags()) walls += t == FaceTag::TextureWall;
  EXPECT_EQ(walls, 2 * im.loops[0].vertices.size());
}

TEST(Extrude, EmbossedSquareOnPlateRemovesPrismVolume) {
  const ImprintedMesh im = plate_with_square();
  const TriMesh out = extrude_texture(im, {ExtrudeMode::Embossed, 1.5, {}, 0.0});
  expect_closed(out);
  EXPECT_NEAR(out.signed_volume() - im.mesh.signed_volume(), -1.5, 1e-9);
}

TEST(Extrude, DiscsOnCubeFace) {
  const ImprintedMesh im = cube_with_discs();
  const TriMesh out = extrude_texture(im, {ExtrudeMode::Raised, 1.0, {}, 0.0});
  expect_closed(out);
  const double expected = 9 * std::numbers::pi;
  EXPECT_NEAR(out.signed_volume() - im.mesh.signed_volume(), expected, 0.03 * expected);
}

TEST(Extrude, VolumeChangeShrinksWithDepth) {
  const ImprintedMesh im = cube_with_discs();
  double last = 0.0;
  for (double depth : {0.01, 0.1, 1.0}) {
    const double raised = extrude_texture(im, {ExtrudeMode::Raised, depth, {}, 0.0}).signed_volume() - im.mesh.signed_volume();
    const double embossed = extrude_texture(im, {ExtrudeMode::Embossed, depth, {}, 0.0}).signed_volume() - im.mesh.signed_volume();
    EXPECT_GT(raised, last);
    EXPECT_LT(embossed, 0.0);
    EXPECT_NEAR(raised, -embossed, 1e-9);
    last = raised;
  }
}

TEST(Extrude, CurvedSurfaceStaysClosed) {
  const TriMesh m = capped_cylinder(10, 30, 48, 12, 4);
  const UVChart c = parameterize(m);
  std::vector<PlacementEvent> ps;
  for (int i = 0; i < 3; ++i) {
    const Vec3 p(10 * std::cos(0.6 * i), 10 * std::sin(0.6 * i), 15);
    const SurfacePoint s = closest_point(m, p);
    const auto& t = c.uv[static_cast<std::size_t>(s.face)];
    ps.push_back({(t[0] + t[1] + t[2]) / 3.0, 0, 1, i});
  }
  const ImprintedMesh im = imprint(m, c, disc_element(1), ps);
  for (ExtrudeMode mode : {ExtrudeMode::Raised, ExtrudeMode::Embossed}) {
    const TriMesh out = extrude_texture(im, {mode, 0.8, {}, 0.0});
    expect_closed(out);
    if (mode == ExtrudeMode::Raised)
      EXPECT_GT(out.signed_volume(), m.signed_volume());
    else
      EXPECT_LT(out.signed_volume(), m.signed_volume());
  }
}

TEST(Extrude, EmbossThroughThinPlateIsRejected) {
  const TriMesh plate = box_mesh({10, 10, 0.5}, {5, 5, 1});
  const ImprintedMesh im = imprint(plate, top_chart(plate, 0.5), square_element(1), {{{5, 5}, 0, 1, 0}});
  EXPECT_THROW(extrude_texture(im, {ExtrudeMode::Embossed, 1.0, {}, 0.0}), GeometryError);
  EXPECT_NO_THROW(extrude_texture(im, {ExtrudeMode::Embossed, 0.4, {}, 0.0}));
  EXPECT_NO_THROW(extrude_texture(im, {ExtrudeMode::Raised, 1.0, {}, 0.0}));
}

TEST(Extrude, HollowDepthFollowsThicknessProbe) {
  const ImprintedMesh im = plate_with_square();
  ExtrudeOptions o{ExtrudeMode::Embossed, 0.0, [](const Vec3&) { return 2.0; }, 0.5};
  const TriMesh out = extrude_texture(im, o);
  expect_closed(out);
  EXPECT_NEAR(out.signed_volume() - im.mesh.signed_volume(), -1.5, 1e-9);
}

TEST(Extrude, CutoutOnShellAddsOneHolePerPlacement) {
  const TriMesh shell = grid_mesh(10, 10, 6, 6);
  UVChart c;
  for (const Face& f : shell.faces()) c.uv.push_back({shell.position(f[0]).head<2>(), shell.position(f[1]).head<2>(), shell.position(f[2]).head<2>()});
  const ImprintedMesh im = imprint(shell, c, disc_element(1), {{{3, 3}, 0, 1, 0}, {{7, 6}, 0, 1, 1}});
  const TriMesh out = extrude_texture(im, {ExtrudeMode::Cutout, 1.0, {}, 0.0});
  EXPECT_EQ(boundary_loops(shell), 1);
  EXPECT_EQ(boundary_loops(out), 3);
  EXPECT_EQ(check_watertight(out).nonmanifold_edge_count, 0u);
  double interior = 0;
  for (std::size_t f = 0; f < im.mesh.face_count(); ++f)
    if (im.face_placement[f] >= 0) interior += im.mesh.face_area(static_cast<int>(f));
  EXPECT_NEAR(out.surface_area(), 100.0 - interior, 1e-9);
}

TEST(Extrude, CutoutOnClosedSolidIsRejected) {
  EXPECT_THROW(extrude_texture(plate_with_square(), {ExtrudeMode::Cutout, 1.0, {}, 0.0}), InvalidInput);
}

TEST(Extrude, RejectsNonPositiveDepth) {
  EXPECT_THROW(extrude_texture(plate_with_square(), {ExtrudeMode::Raised, 0.0, {}, 0.0}), InvalidInput);
  EXPECT_THROW(extrude_texture(plate_with_square(), {ExtrudeMode::Embossed, -1.0, {}, 0.0}), InvalidInput);
}
