#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "shapes.hpp"
#include "texprint/error.hpp"
#include "texprint/segmentation.hpp"

using namespace texprint;
using texprint::testing::blob;
using texprint::testing::box_mesh;
using texprint::testing::capped_cylinder;
using texprint::testing::grid_mesh;
using texprint::testing::icosphere;
using texprint::testing::unit_cube;

namespace {

TriMesh transformed(const TriMesh& m, double scale, const Vec3& shift) {
  const Eigen::Matrix3d rot =
      (Eigen::AngleAxisd(0.7, Vec3::UnitZ()) * Eigen::AngleAxisd(-0.4, Vec3(1, 1, 0).normalized())).toRotationMatrix();
  std::vector<Vec3> p;
  for (const Vec3& v : m.positions()) p.push_back(scale * (rot * v) + shift);
  return TriMesh(p, m.faces());
}

std::vector<int> vertices_where(const TriMesh& m, auto pred) {
  std::vector<int> out;
  for (int v = 0; v < static_cast<int>(m.vertex_count()); ++v)
    if (pred(m.position(v))) out.push_back(v);
  return out;
}

// Two disjoint copies of a mesh, the second shifted along x.
TriMesh two_copies(const TriMesh& m, double dx) {
  std::vector<Vec3> p = m.positions();
  std::vector<Face> f = m.faces();
  const int n = static_cast<int>(p.size());
  for (const Vec3& v : m.positions()) p.push_back(v + Vec3(dx, 0, 0));
  for (const Face& t : m.faces()) f.push_back({t[0] + n, t[1] + n, t[2] + n});
  return TriMesh(p, f);
}

}  // namespace

TEST(Distortion, FlatGridIsZero) {
  const TriMesh g = grid_mesh(10, 10, 20, 20);
  const DistortionField d0 = distortion(g, 0);
  const DistortionField d3 = distortion(g, 3);
  for (std::size_t v = 0; v < g.vertex_count(); ++v) {
    const Vec3& p = g.position(static_cast<int>(v));
    const bool interior = p.x() > 0 && p.x() < 10 && p.y() > 0 && p.y() < 10;
    if (interior) EXPECT_NEAR(d0.d[v], 0.0, 1e-12);
    if (std::abs(p.x() - 5) < 1e-9 && std::abs(p.y() - 5) < 1e-9) EXPECT_NEAR(d3.d[v], 0.0, 1e-12);
  }
  EXPECT_EQ(d3.R, 3);
}

TEST(Distortion, CubeCornerQuarter) {
  const TriMesh c = box_mesh({2, 2, 2}, {3, 3, 3});
  const DistortionField d = distortion(c, 0);
  const auto corners = vertices_where(c, [](const Vec3& p) {
    return (p.x() == 0 || p.x() == 2) && (p.y() == 0 || p.y() == 2) && (p.z() == 0 || p.z() == 2);
  });
  ASSERT_EQ(corners.size(), 8u);
  for (int v : corners) EXPECT_NEAR(d.d[static_cast<std::size_t>(v)], 0.25, 1e-12);
}

TEST(Distortion, GaussBonnetOnIcosphere) {
  const std::vector<double> deficits = angle_deficits(icosphere(1.0, 3));
  double total = 0.0;
  for (double x : deficits) total += x;
  EXPECT_NEAR(total, 4.0 * std::numbers::pi, 1e-9);
}

TEST(Distortion, ValuesClampedToUnitInterval) {
  for (int R : {0, 1, 3, 6}) {
    for (double x : distortion(blob(1.0, 3), R).d) {
      EXPECT_GE(x, 0.0);
      EXPECT_LE(x, 1.0);
    }
  }
  EXPECT_THROW(distortion(unit_cube(), -1), InvalidInput);
}

TEST(Distortion, RigidAndScaleInvariant) {
  const TriMesh b = blob(1.0, 3);
  const DistortionField a = distortion(b, 3);
  const DistortionField t = distortion(transformed(b, 2.5, Vec3(3, -1, 7)), 3);
  ASSERT_EQ(a.d.size(), t.d.size());
  for (std::size_t v = 0; v < a.d.size(); ++v) EXPECT_NEAR(a.d[v], t.d[v], 1e-9);
}

TEST(BoundaryCandidates, FlatPlaneHasNone) {
  const TriMesh g = grid_mesh(4, 4, 8, 8);
  EXPECT_TRUE(boundary_candidates(distortion(g, 3), g, Vec3(2, 2, 0), 8).empty());
}

TEST(BoundaryCandidates, CubeFaceCenterPicksFaceCorners) {
  const TriMesh c = box_mesh({1, 1, 1}, {4, 4, 4});
  const DistortionField d = distortion(c, 0);
  const Vec3 cursor(0.5, 0.5, 1.0);
  const double lambda = 0.1 * c.bbox_diagonal();
  const std::vector<int> got = boundary_candidates(d, c, cursor, 4);

  // Exhaustive scan: best remaining score, never adjacent to an earlier pick.
  const auto nbr = vertex_neighbors(c);
  std::vector<int> oracle;
  std::vector<bool> blocked(c.vertex_count(), false);
  for (int round = 0; round < 4; ++round) {
    int best = -1;
    double best_score = 0.0;
    for (int v = 0; v < static_cast<int>(c.vertex_count()); ++v) {
      if (blocked[static_cast<std::size_t>(v)] || d.d[static_cast<std::size_t>(v)] < 0.02) continue;
      const double s = d.d[static_cast<std::size_t>(v)] / (1.0 + (c.position(v) - cursor).norm() / lambda);
      if (s > best_score) {
        best_score = s;
        best = v;
      }
    }
    ASSERT_GE(best, 0);
    oracle.push_back(best);
    blocked[static_cast<std::size_t>(best)] = true;
    for (int w : nbr[static_cast<std::size_t>(best)]) blocked[static_cast<std::size_t>(w)] = true;
  }
  EXPECT_EQ(std::set<int>(got.begin(), got.end()), std::set<int>(oracle.begin(), oracle.end()));
  for (int v : got) {
    const Vec3& p = c.position(v);
    EXPECT_EQ(p.z(), 1.0);
    EXPECT_TRUE((p.x() == 0 || p.x() == 1) && (p.y() == 0 || p.y() == 1));
  }
}

TEST(BoundaryCandidates, CylinderCapCursorFindsCrease) {
  const TriMesh m = capped_cylinder(10, 30, 32, 12, 4);
  const std::vector<int> got = boundary_candidates(distortion(m, 3), m, Vec3(0, 0, 30), 8);
  ASSERT_FALSE(got.empty());
  const auto nbr = vertex_neighbors(m);
  for (int v : got) {
    const Vec3& p = m.position(v);
    EXPECT_NEAR(p.z(), 30.0, 1e-9);
    EXPECT_NEAR(std::hypot(p.x(), p.y()), 10.0, 1e-9);
    for (int w : got) {
      const auto& ring = nbr[static_cast<std::size_t>(v)];
      EXPECT_EQ(std::count(ring.begin(), ring.end(), w), 0);
    }
  }
}

TEST(BoundaryCandidates, RejectsBadArguments) {
  const TriMesh c = unit_cube();
  const DistortionField d = distortion(c, 0);
  EXPECT_THROW(boundary_candidates(d, c, Vec3::Zero(), 0), InvalidInput);
  EXPECT_THROW(boundary_candidates(d, c, Vec3::Zero(), 9), InvalidInput);
  EXPECT_THROW(boundary_candidates(d, c, Vec3::Zero(), 2, 0.0, 0.02), InvalidInput);
}

namespace {

// Strip along x, constrained at both ends.
struct Strip {
  TriMesh mesh = grid_mesh(10, 1, 40, 4);
  std::vector<int> left = vertices_where(mesh, [](const Vec3& p) { return p.x() == 0.0; });
  std::vector<int> right = vertices_where(mesh, [](const Vec3& p) { return p.x() == 10.0; });
};

}  // namespace

TEST(HarmonicField, StripIsLinear) {
  const Strip s;
  const HarmonicField h = harmonic_field(s.mesh, s.left, s.right);
  double worst = 0.0;
  for (std::size_t v = 0; v < s.mesh.vertex_count(); ++v) {
    worst = std::max(worst, std::abs(h.phi[v] - (1.0 - s.mesh.position(static_cast<int>(v)).x() / 10.0)));
  }
  EXPECT_LT(worst, 1e-6);
  // Monotone along the bottom row.
  auto row = vertices_where(s.mesh, [](const Vec3& p) { return p.y() == 0.0; });
  std::sort(row.begin(), row.end(), [&](int a, int b) { return s.mesh.position(a).x() < s.mesh.position(b).x(); });
  for (std::size_t i = 1; i < row.size(); ++i) EXPECT_LT(h.phi[row[i]], h.phi[row[i - 1]]);
}

TEST(HarmonicField, ConstraintsExactAndValuesBounded) {
  const TriMesh b = blob(1.0, 3);
  std::mt19937 rng(3);
  std::uniform_int_distribution<int> pick(0, static_cast<int>(b.vertex_count()) - 1);
  for (int trial = 0; trial < 5; ++trial) {
    std::set<int> one, zero;
    while (one.size() < 6) one.insert(pick(rng));
    while (zero.size() < 6) {
      const int v = pick(rng);
      if (!one.count(v)) zero.insert(v);
    }
    const std::vector<int> o(one.begin(), one.end()), z(zero.begin(), zero.end());
    const HarmonicField h = harmonic_field(b, o, z);
    for (int v : o) EXPECT_NEAR(h.phi[static_cast<std::size_t>(v)], 1.0, 1e-9);
    for (int v : z) EXPECT_NEAR(h.phi[static_cast<std::size_t>(v)], 0.0, 1e-9);
    for (double x : h.phi) {
      EXPECT_GE(x, 0.0);
      EXPECT_LE(x, 1.0);
    }
    EXPECT_EQ(h.constrained_one, o);
    EXPECT_EQ(h.constrained_zero, z);
  }
}

TEST(HarmonicField, MatchesDenseSolve) {
  const TriMesh m = icosphere(1.0, 1);
  const int n = static_cast<int>(m.vertex_count());
  const auto nbr = vertex_neighbors(m);
  auto two_ring = [&](int seed) {
    std::set<int> s{seed};
    for (int w : nbr[static_cast<std::size_t>(seed)]) {
      s.insert(w);
      for (int x : nbr[static_cast<std::size_t>(w)]) s.insert(x);
    }
    return s;
  };
  int far = 0;
  for (int v = 0; v < n; ++v)
    if (m.position(v).dot(m.position(0)) < m.position(far).dot(m.position(0))) far = v;
  const std::set<int> one = two_ring(0), zero = two_ring(far);
  const HarmonicField h = harmonic_field(m, std::vector<int>(one.begin(), one.end()), std::vector<int>(zero.begin(), zero.end()));

  // Dense Laplacian from corner angles, free rows solved directly.
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  for (const Face& f : m.faces()) {
    for (int c = 0; c < 3; ++c) {
      const int o = f[c], a = f[(c + 1) % 3], b = f[(c + 2) % 3];
      const Vec3 u = (m.position(a) - m.position(o)).normalized();
      const Vec3 v = (m.position(b) - m.position(o)).normalized();
      const double w = 0.5 / std::tan(std::acos(std::clamp(u.dot(v), -1.0, 1.0)));
      L(a, b) += w;
      L(b, a) += w;
    }
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && L(i, j) != 0.0) L(i, j) = std::max(L(i, j), 1e-8);
  std::vector<int> free_vertices;
  for (int v = 0; v < n; ++v)
    if (!one.count(v) && !zero.count(v)) free_vertices.push_back(v);
  const int k = static_cast<int>(free_vertices.size());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(k, k);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k);
  for (int i = 0; i < k; ++i) {
    const int v = free_vertices[static_cast<std::size_t>(i)];
    for (int j = 0; j < n; ++j) {
      if (j == v || L(v, j) == 0.0) continue;
      A(i, i) += L(v, j);
      if (one.count(j)) {
        rhs(i) += L(v, j);
      } else if (!zero.count(j)) {
        const auto it = std::find(free_vertices.begin(), free_vertices.end(), j);
        A(i, static_cast<int>(it - free_vertices.begin())) -= L(v, j);
      }
    }
  }
  const Eigen::VectorXd x = A.fullPivLu().solve(rhs);
  ASSERT_GT(k, 0);
  for (int i = 0; i < k; ++i) EXPECT_NEAR(h.phi[static_cast<std::size_t>(free_vertices[static_cast<std::size_t>(i)])], x(i), 1e-8);
}

TEST(HarmonicField, RigidInvariant) {
  const TriMesh b = blob(1.0, 2);
  const std::vector<int> one{0, 5, 9}, zero{20, 33};
  const HarmonicField a = harmonic_field(b, one, zero);
  const HarmonicField t = harmonic_field(transformed(b, 1.0, Vec3(-4, 2, 9)), one, zero);
  for (std::size_t v = 0; v < a.phi.size(); ++v) EXPECT_NEAR(a.phi[v], t.phi[v], 1e-9);
}

TEST(HarmonicField, RejectsBadConstraints) {
  const Strip s;
  const std::vector<int> none;
  EXPECT_THROW(harmonic_field(s.mesh, none, s.right), InvalidInput);
  EXPECT_THROW(harmonic_field(s.mesh, s.left, s.left), InvalidInput);
  EXPECT_THROW(harmonic_field(s.mesh, std::vector<int>{-1}, s.right), InvalidInput);
  // Second copy has no constraint at all.
  const TriMesh twin = two_copies(s.mesh, 20.0);
  EXPECT_THROW(harmonic_field(twin, s.left, s.right), InvalidInput);
}

TEST(Isolines, StripMidline) {
  const Strip s;
  const HarmonicField h = harmonic_field(s.mesh, s.left, s.right);
  const auto lines = extract_isolines(h, s.mesh, 0.5);
  ASSERT_EQ(lines.size(), 1u);
  EXPECT_FALSE(lines[0].closed);
  ASSERT_GE(lines[0].points.size(), 2u);
  for (const Vec3& p : lines[0].points) EXPECT_NEAR(p.x(), 5.0, 1e-6);
  EXPECT_NEAR(lines[0].length, 1.0, 1e-6);
  EXPECT_NEAR(lines[0].mean_gradient, 0.1, 1e-6);
}

TEST(Isolines, CylinderLoopCircumference) {
  const double r = 2.0, height = 4.0;
  const TriMesh m = capped_cylinder(r, height, 64, 8, 3);
  HarmonicField h;
  for (const Vec3& p : m.positions()) h.phi.push_back(p.z() / height);
  const auto loops = extract_isolines(h, m, 0.55);
  ASSERT_EQ(loops.size(), 1u);
  EXPECT_TRUE(loops[0].closed);
  EXPECT_NEAR(loops[0].length, 2.0 * std::numbers::pi * r, 0.01 * 2.0 * std::numbers::pi * r);
  EXPECT_LT((loops[0].points.front() - loops[0].points.back()).norm(), 1e-9);
  for (const Vec3& p : loops[0].points) EXPECT_NEAR(p.z(), 0.55 * height, 1e-9);
}

TEST(Isolines, OutsideRangeIsEmpty) {
  const Strip s;
  HarmonicField h = harmonic_field(s.mesh, s.left, s.right);
  for (double& x : h.phi) x = 0.25 + 0.5 * x;
  EXPECT_TRUE(extract_isolines(h, s.mesh, 0.1).empty());
  EXPECT_TRUE(extract_isolines(h, s.mesh, 0.9).empty());
}

TEST(Isolines, LoopsCloseOnWatertightMesh) {
  const TriMesh b = blob(1.0, 3);
  const HarmonicField h = harmonic_field(b, std::vector<int>{0, 1}, std::vector<int>{40, 77, 120});
  int loops = 0;
  for (int step = 1; step <= 9; ++step) {
    for (const Isoline& iso : extract_isolines(h, b, 0.1 * step)) {
      EXPECT_TRUE(iso.closed);
      EXPECT_LT((iso.points.front() - iso.points.back()).norm(), 1e-9);
      EXPECT_EQ(iso.points.size(), iso.edges.size());
      ++loops;
    }
  }
  EXPECT_GT(loops, 0);
}

TEST(InferRegion, FlatPlateFallsBackToWholePlate) {
  const TriMesh g = grid_mesh(5, 3, 10, 6);
  const SegmentRegion r = infer_region(g, Vec3(1, 1, 0.2));
  EXPECT_TRUE(r.fallback);
  EXPECT_EQ(r.faces.size(), g.face_count());
}

TEST(InferRegion, StaysInCursorComponent) {
  const TriMesh twin = two_copies(grid_mesh(2, 2, 4, 4), 10.0);
  const SegmentRegion r = infer_region(twin, Vec3(11, 1, 0));
  ASSERT_EQ(r.faces.size(), twin.face_count() / 2);
  for (int f : r.faces) EXPECT_GE(f, static_cast<int>(twin.face_count() / 2));
}

TEST(InferRegion, DeterministicConnectedAndContainsCursor) {
  const TriMesh m = capped_cylinder(10, 30, 32, 12, 4);
  const Vec3 cursor(2, 1, 30);
  const SegmentRegion a = infer_region(m, cursor);
  const SegmentRegion b = infer_region(m, cursor);
  EXPECT_EQ(a.faces, b.faces);
  EXPECT_FALSE(a.fallback);
  EXPECT_GE(a.level, 0.1);
  EXPECT_LE(a.level, 0.9);
  EXPECT_TRUE(std::is_sorted(a.faces.begin(), a.faces.end()));
  const int hit = closest_point(m, cursor).face;
  EXPECT_TRUE(std::binary_search(a.faces.begin(), a.faces.end(), hit));
  // One edge-connected component.
  std::vector<bool> in(m.face_count(), false);
  for (int f : a.faces) in[static_cast<std::size_t>(f)] = true;
  std::vector<Face> faces;
  for (int f : a.faces) faces.push_back(m.face(f));
  EXPECT_EQ(connected_components(TriMesh(m.positions(), faces)), 1);
  ASSERT_GE(a.boundary_loop.size(), 3u);
  EXPECT_LT((a.boundary_loop.front() - a.boundary_loop.back()).norm(), 1e-9);
}
