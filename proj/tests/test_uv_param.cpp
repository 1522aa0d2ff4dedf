#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "shapes.hpp"
#include "texprint/segmentation.hpp"
#include "texprint/uv_param.hpp"

using namespace texprint;
using texprint::testing::blob;
using texprint::testing::box_mesh;
using texprint::testing::capped_cylinder;
using texprint::testing::closed_cone;
using texprint::testing::grid_mesh;
using texprint::testing::icosphere;
using texprint::testing::open_cone;
using texprint::testing::open_cylinder;

namespace {

constexpr double kPi = std::numbers::pi;

TriMesh torus(double R, double r, int nu, int nv) {
  std::vector<Vec3> p;
  std::vector<Face> f;
  for (int i = 0; i < nu; ++i) {
    for (int j = 0; j < nv; ++j) {
      const double u = 2 * kPi * i / nu, v = 2 * kPi * j / nv;
      p.emplace_back((R + r * std::cos(v)) * std::cos(u), (R + r * std::cos(v)) * std::sin(u), r * std::sin(v));
    }
  }
  auto id = [&](int i, int j) { return ((i + nu) % nu) * nv + (j + nv) % nv; };
  for (int i = 0; i < nu; ++i) {
    for (int j = 0; j < nv; ++j) {
      f.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      f.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  return TriMesh(p, f);
}

// Per-vertex uv from face corners (every corner of a vertex agrees on a disk).
std::vector<Vec2> vertex_uv(const UVChart& chart, const TriMesh& disk) {
  std::vector<Vec2> uv(disk.vertex_count(), Vec2::Zero());
  for (std::size_t f = 0; f < disk.face_count(); ++f)
    for (int c = 0; c < 3; ++c) uv[static_cast<std::size_t>(disk.face(static_cast<int>(f))[c])] = chart.uv[f][c];
  return uv;
}

long euler(const TriMesh& m) { return check_watertight(m).euler_characteristic; }

void expect_monotone(const UVChart& chart) {
  ASSERT_FALSE(chart.energy_history.empty());
  for (std::size_t i = 1; i < chart.energy_history.size(); ++i)
    EXPECT_LE(chart.energy_history[i], chart.energy_history[i - 1]) << "iteration " << i;
}

void expect_valid_chart(const UVChart& chart, const TriMesh& mesh) {
  ASSERT_EQ(chart.face_count(), mesh.face_count());
  double uv_area = 0.0;
  for (std::size_t f = 0; f < chart.face_count(); ++f) {
    EXPECT_GT(chart.signed_area(static_cast<int>(f)), 0.0) << "face " << f;
    uv_area += chart.signed_area(static_cast<int>(f));
  }
  EXPECT_NEAR(uv_area, mesh.surface_area(), 1e-9 * mesh.surface_area());
  expect_monotone(chart);
}

}  // namespace

TEST(CutSeams, DiskIsReturnedUnchanged) {
  const TriMesh g = grid_mesh(3, 2, 6, 4);
  EXPECT_TRUE(is_disk(g));
  const CutMesh c = cut_seams(g);
  EXPECT_TRUE(c.seam_edges.empty());
  EXPECT_EQ(c.mesh.positions(), g.positions());
  EXPECT_EQ(c.mesh.faces(), g.faces());
}

TEST(CutSeams, CappedCylinderBecomesDisk) {
  const TriMesh m = capped_cylinder(5, 10, 24, 6, 3);
  EXPECT_FALSE(is_disk(m));
  const CutMesh c = cut_seams(m);
  EXPECT_TRUE(is_disk(c.mesh));
  EXPECT_EQ(euler(c.mesh), 1);
  EXPECT_FALSE(c.seam_edges.empty());
  ASSERT_EQ(c.mesh.face_count(), m.face_count());
  ASSERT_EQ(c.source_vertex.size(), c.mesh.vertex_count());
  for (std::size_t v = 0; v < c.mesh.vertex_count(); ++v)
    EXPECT_EQ(c.mesh.position(static_cast<int>(v)), m.position(c.source_vertex[v]));
  for (std::size_t f = 0; f < m.face_count(); ++f)
    for (int k = 0; k < 3; ++k)
      EXPECT_EQ(c.source_vertex[static_cast<std::size_t>(c.mesh.face(static_cast<int>(f))[k])], m.face(static_cast<int>(f))[k]);
}

TEST(CutSeams, IcosphereSeamPassesMaximumDistortion) {
  const TriMesh m = icosphere(1.0, 3);
  const DistortionField d = distortion(m, 3);
  int best = 0;
  for (std::size_t v = 1; v < d.d.size(); ++v)
    if (d.d[v] > d.d[static_cast<std::size_t>(best)]) best = static_cast<int>(v);
  const CutMesh c = cut_seams(m);
  std::set<int> seam;
  for (const EdgeKey& e : c.seam_edges) {
    seam.insert(e.lo);
    seam.insert(e.hi);
  }
  EXPECT_TRUE(seam.count(best));
  EXPECT_TRUE(is_disk(c.mesh));
}

TEST(CutSeams, HandlesGenusAndOpenTubes) {
  const CutMesh t = cut_seams(torus(3, 1, 24, 12));
  EXPECT_TRUE(is_disk(t.mesh));
  // A tube without its seam column has two boundary loops.
  const TriMesh tube = capped_cylinder(2, 4, 16, 4, 2);
  std::vector<Face> side;
  for (const Face& f : tube.faces()) {
    bool cap = true;
    for (int v : f) cap = cap && (tube.position(v).z() == 0.0 || tube.position(v).z() == 4.0);
    if (!cap) side.push_back(f);
  }
  const CutMesh o = cut_seams(TriMesh(tube.positions(), side));
  EXPECT_TRUE(is_disk(o.mesh));
}

TEST(CutSeams, RejectsDisconnected) {
  const TriMesh a = grid_mesh(1, 1, 2, 2);
  std::vector<Vec3> p = a.positions();
  std::vector<Face> f = a.faces();
  const int n = static_cast<int>(p.size());
  for (const Vec3& v : a.positions()) p.push_back(v + Vec3(5, 0, 0));
  for (const Face& t : a.faces()) f.push_back({t[0] + n, t[1] + n, t[2] + n});
  EXPECT_THROW(cut_seams(TriMesh(p, f)), InvalidInput);
}

TEST(Arap, PlanarGridReproducesItself) {
  const TriMesh g = grid_mesh(10, 6, 20, 12);
  const UVChart chart = arap_parameterize(g);
  expect_valid_chart(chart, g);
  EXPECT_LT(chart.max_distortion, 1e-6);
  // Rigid: every edge keeps its length.
  const std::vector<Vec2> uv = vertex_uv(chart, g);
  for (const EdgeIncidence& e : g.edges()) {
    const double l3 = (g.position(e.key.lo) - g.position(e.key.hi)).norm();
    EXPECT_NEAR((uv[static_cast<std::size_t>(e.key.lo)] - uv[static_cast<std::size_t>(e.key.hi)]).norm(), l3, 1e-6);
  }
}

TEST(Arap, OpenCylinderUnrolls) {
  const double r = 5, h = 10;
  const int seg = 48, rings = 10;
  const TriMesh m = open_cylinder(r, h, seg, rings);
  const UVChart chart = arap_parameterize(m);
  expect_valid_chart(chart, m);
  EXPECT_NEAR(chart.raw_area_ratio, 1.0, 0.01);
  const std::vector<Vec2> uv = vertex_uv(chart, m);
  // Rows hold seg + 1 vertices; first and last of a row are the seam copies.
  const double width = (uv[0] - uv[static_cast<std::size_t>(seg)]).norm();
  const double height = (uv[0] - uv[static_cast<std::size_t>(rings * (seg + 1))]).norm();
  EXPECT_NEAR(width, 2 * kPi * r, 0.01 * 2 * kPi * r);
  EXPECT_NEAR(height, h, 0.01 * h);
}

TEST(Arap, OpenConeDevelopsToSector) {
  const double r = 5, h = 10;
  const int seg = 48;
  const TriMesh m = open_cone(r, h, seg, 10);
  const UVChart chart = arap_parameterize(m);
  expect_valid_chart(chart, m);
  EXPECT_NEAR(chart.raw_area_ratio, 1.0, 0.02);
  const std::vector<Vec2> uv = vertex_uv(chart, m);
  const int apex = static_cast<int>(m.vertex_count()) - 1;
  const double slant = std::hypot(r, h);
  const Vec2 a = uv[0] - uv[static_cast<std::size_t>(apex)];
  const Vec2 b = uv[static_cast<std::size_t>(seg)] - uv[static_cast<std::size_t>(apex)];
  EXPECT_NEAR(a.norm(), slant, 0.02 * slant);
  EXPECT_NEAR(b.norm(), slant, 0.02 * slant);
  // Sector angle, measured the long way round when it exceeds pi.
  const double inner = std::acos(std::clamp(a.dot(b) / (a.norm() * b.norm()), -1.0, 1.0));
  const double expected = 2 * kPi * r / slant;
  const double angle = expected > kPi ? 2 * kPi - inner : inner;
  EXPECT_NEAR(angle, expected, 0.02 * expected);
}

TEST(Arap, ClosedShapesGiveFlipFreeCharts) {
  for (const TriMesh& m : {capped_cylinder(10, 30, 32, 12, 4), closed_cone(10, 20, 32, 8, 4), icosphere(10, 3),
                           box_mesh({10, 10, 10}, {4, 4, 4}), blob(10, 3)}) {
    const UVChart chart = parameterize(m);
    expect_valid_chart(chart, m);
    EXPECT_FALSE(chart.seam_edges.empty());
    EXPECT_TRUE(std::is_sorted(chart.seam_edges.begin(), chart.seam_edges.end()));
  }
}

TEST(Arap, ChartContinuousAcrossNonSeamEdges) {
  const TriMesh m = capped_cylinder(10, 30, 32, 12, 4);
  const UVChart chart = parameterize(m);
  const std::set<EdgeKey> seams(chart.seam_edges.begin(), chart.seam_edges.end());
  int checked = 0;
  for (const EdgeIncidence& e : m.edges()) {
    if (e.faces.size() != 2 || seams.count(e.key)) continue;
    for (int v : {e.key.lo, e.key.hi}) {
      const Face& f = m.face(e.faces[0]);
      const Face& g = m.face(e.faces[1]);
      const auto cf = std::find(f.begin(), f.end(), v) - f.begin();
      const auto cg = std::find(g.begin(), g.end(), v) - g.begin();
      EXPECT_EQ(chart.uv[static_cast<std::size_t>(e.faces[0])][cf], chart.uv[static_cast<std::size_t>(e.faces[1])][cg]);
    }
    ++checked;
  }
  EXPECT_GT(checked, 0);
}

TEST(Arap, RejectsNonDisk) { EXPECT_THROW(arap_parameterize(icosphere(1, 1)), InvalidInput); }

TEST(UvTo3d, CornersAndCentroid) {
  const TriMesh m = open_cylinder(5, 10, 24, 4);
  const UVChart chart = arap_parameterize(m);
  for (int f = 0; f < static_cast<int>(m.face_count()); f += 7) {
    const UVTriangle& t = chart.uv[static_cast<std::size_t>(f)];
    EXPECT_EQ(uv_to_3d(chart, m, f, t[0]), m.position(m.face(f)[0]));
    const Vec3 c3 = (m.position(m.face(f)[0]) + m.position(m.face(f)[1]) + m.position(m.face(f)[2])) / 3.0;
    EXPECT_LT((uv_to_3d(chart, m, f, (t[0] + t[1] + t[2]) / 3.0) - c3).norm(), 1e-12);
    const Vec2 outside = t[0] + 2.0 * (t[0] - (t[1] + t[2]) / 2.0);
    EXPECT_THROW(uv_to_3d(chart, m, f, outside), InvalidInput);
  }
}

TEST(UvTo3d, RandomPointsLieOnCylinderFacets) {
  const double r = 5;
  const int seg = 24;
  const TriMesh m = open_cylinder(r, 10, seg, 4);
  const UVChart chart = arap_parameterize(m);
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double sagitta = r * (1.0 - std::cos(kPi / seg));
  for (int i = 0; i < 200; ++i) {
    const int f = static_cast<int>(rng() % m.face_count());
    double a = u(rng), b = u(rng);
    if (a + b > 1) {
      a = 1 - a;
      b = 1 - b;
    }
    const UVTriangle& t = chart.uv[static_cast<std::size_t>(f)];
    const Vec3 p = uv_to_3d(chart, m, f, t[0] + a * (t[1] - t[0]) + b * (t[2] - t[0]));
    // On the facet plane, and between the inscribed and true cylinder.
    const Vec3 n = m.face_normal(f);
    EXPECT_LT(std::abs(n.dot(p - m.position(m.face(f)[0]))), 1e-9);
    const double radial = std::hypot(p.x(), p.y());
    EXPECT_LE(radial, r + 1e-9);
    EXPECT_GE(radial, r - sagitta - 1e-9);
  }
}

TEST(LocateInChart, TwoTriangleSquare) {
  UVChart chart;
  chart.uv = {UVTriangle{Vec2(0, 0), Vec2(1, 0), Vec2(1, 1)}, UVTriangle{Vec2(0, 0), Vec2(1, 1), Vec2(0, 1)}};
  EXPECT_EQ(locate_in_chart(chart, Vec2(0.75, 0.25)), 0);
  EXPECT_EQ(locate_in_chart(chart, Vec2(0.25, 0.75)), 1);
  EXPECT_EQ(locate_in_chart(chart, Vec2(0.5, 0.5)), 0);
  EXPECT_EQ(locate_in_chart(chart, Vec2(1.5, 0.5)), std::nullopt);
  const ChartIndex index(chart);
  EXPECT_EQ(index.locate(Vec2(0.5, 0.5)), 0);
  EXPECT_EQ(index.locate(Vec2(0.25, 0.75)), 1);
}

TEST(LocateInChart, AgreesWithBruteForce) {
  const TriMesh m = capped_cylinder(10, 30, 32, 12, 4);
  const UVChart chart = parameterize(m);
  const ChartIndex index(chart);
  Vec2 lo = chart.uv[0][0], hi = lo;
  for (const UVTriangle& t : chart.uv)
    for (const Vec2& p : t) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> ux(lo.x(), hi.x()), uy(lo.y(), hi.y());
  int inside = 0;
  for (int i = 0; i < 1000; ++i) {
    const Vec2 p(ux(rng), uy(rng));
    // Brute force with barycentric coordinates.
    std::optional<int> expected;
    for (std::size_t f = 0; f < chart.face_count() && !expected; ++f) {
      const Vec3 b = barycentric(chart.uv[f], p);
      if (b.minCoeff() >= 0.0) expected = static_cast<int>(f);
    }
    EXPECT_EQ(locate_in_chart(chart, p), expected);
    EXPECT_EQ(index.locate(p), expected);
    inside += expected.has_value();
  }
  EXPECT_GT(inside, 100);
}

TEST(LocateInChart, VertexRoundTrip) {
  const TriMesh m = capped_cylinder(10, 30, 32, 12, 4);
  const UVChart chart = parameterize(m);
  const ChartIndex index(chart);
  for (std::size_t f = 0; f < m.face_count(); ++f) {
    for (int c = 0; c < 3; ++c) {
      const Vec2& p = chart.uv[f][c];
      const auto hit = index.locate(p);
      ASSERT_TRUE(hit.has_value());
      EXPECT_LT((uv_to_3d(chart, m, *hit, p) - m.position(m.face(static_cast<int>(f))[c])).norm(), 1e-9);
    }
  }
}
