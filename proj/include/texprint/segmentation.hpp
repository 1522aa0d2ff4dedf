#pragma once

#include <span>
#include <vector>

#include "texprint/mesh.hpp"

namespace texprint {

// Regional angle deficit per vertex, normalized by 2*pi and clamped to [0, 1].
struct DistortionField {
  std::vector<double> d;
  int R = 0;
};

struct HarmonicField {
  std::vector<double> phi;
  std::vector<int> constrained_one;
  std::vector<int> constrained_zero;
};

// One traced isoline. Closed loops repeat the first point at the end.
struct Isoline {
  std::vector<Vec3> points;
  std::vector<EdgeKey> edges;  // mesh edge each point lies on
  bool closed = false;
  double length = 0.0;
  double mean_gradient = 0.0;  // length-weighted mean of |grad phi|
};

struct SegmentRegion {
  std::vector<int> faces;  // sorted
  std::vector<Vec3> boundary_loop;
  double score = 0.0;
  double level = 0.0;
  bool fallback = false;  // whole component (no boundary candidates)
};

struct SegmentationConfig {
  int R = 3;
  int k = 8;
  double lambda_fraction = 0.1;  // distance weight, fraction of bbox diagonal
  double threshold = 0.02;       // minimum D for a boundary candidate
};

// Angle deficit 2*pi - sum of incident angles (pi - sum on boundary vertices).
std::vector<double> angle_deficits(const TriMesh& mesh);

// Boundary vertices add nothing to the accumulated deficit.
DistortionField distortion(const TriMesh& mesh, int R);

// Greedy selection of up to k vertices by D / (1 + |cursor - v| / lambda),
// skipping vertices with D below the threshold and vertices adjacent to an
// earlier pick. Ties go to the lower vertex index.
std::vector<int> boundary_candidates(const DistortionField& field, const TriMesh& mesh, const Vec3& cursor, int k,
                                     double lambda, double threshold);
std::vector<int> boundary_candidates(const DistortionField& field, const TriMesh& mesh, const Vec3& cursor, int k);

// Cotangent weight per undirected edge, clamped below at 1e-8.
std::vector<std::pair<EdgeKey, double>> cotangent_weights(const TriMesh& mesh);

// Solves L phi = 0 with phi = 1 on v_one and phi = 0 on v_zero.
HarmonicField harmonic_field(const TriMesh& mesh, std::span<const int> v_one, std::span<const int> v_zero);

std::vector<Isoline> extract_isolines(const HarmonicField& field, const TriMesh& mesh, double level);

SegmentRegion infer_region(const TriMesh& mesh, const Vec3& cursor, const SegmentationConfig& config = {});

}  // namespace texprint
