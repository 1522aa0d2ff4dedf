#pragma once

#include <functional>
#include <vector>

#include "texprint/texture_synth.hpp"

namespace texprint {

enum class ExtrudeMode { Raised, Embossed, Cutout };

struct ExtrudeOptions {
  ExtrudeMode mode = ExtrudeMode::Raised;
  double depth = 1.0;  // mm
  // Hollowing: with a thickness probe, embossed depth at a vertex becomes
  // thickness(p) - wall, so every recess leaves `wall` mm of material.
  std::function<double(const Vec3&)> thickness;
  double wall = 0.0;
};

// Side wall between a base loop and its offset copy, matched by index: two
// triangles per loop edge, wound to continue the surface the base loop
// bounds. Throws InvalidInput on a length mismatch or fewer than 3 vertices.
std::vector<Face> wall_triangulation(const std::vector<int>& base_loop, const std::vector<int>& offset_loop);

// Raised: interior vertices move +depth along their pre-offset normals and
// walls join each boundary loop to its offset copy. Embossed: the same with
// -depth; throws GeometryError when an offset vertex would pass through the
// rest of the surface. Cutout: interior faces are removed; throws
// InvalidInput on a closed mesh.
TriMesh extrude_texture(const ImprintedMesh& im, const ExtrudeOptions& options);

}  // namespace texprint
