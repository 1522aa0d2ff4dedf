#pragma once

#include <optional>
#include <string>
#include <vector>

#include "texprint/extrude.hpp"
#include "texprint/formats.hpp"

// The end-to-end steps shared by the command-line tool and the service.
namespace texprint {

// Chart coordinates of the surface point nearest p.
Vec2 surface_to_chart(const TriMesh& mesh, const UVChart& chart, const Vec3& p);

// The chart-space outline of a face set: boundary uv edges chained into
// rings. Falls back to the individual uv triangles when the outline cannot
// be chained into simple rings.
geom2d::MultiPolygon2 chart_region(const TriMesh& mesh, const UVChart& chart, const std::vector<int>& faces);

struct Suggestion {
  std::vector<PlacementEvent> placements;  // demonstrated first
  std::size_t demonstrated = 0;
  std::optional<PatternSuggestion> pattern;  // none when nothing was inferred
  std::vector<std::string> warnings;
};

// Resolves demo events to chart placements and completes the pattern when
// asked. The fill region is the demo's own region, else `region_faces`, else
// the whole chart. Inferred placements whose imprinted footprint would
// overlap an earlier one are dropped with a warning.
Suggestion suggest(const TriMesh& mesh, const UVChart& chart, const TextureElement& element, const Demo& demo,
                   const std::optional<std::vector<int>>& region_faces = std::nullopt,
                   const ImprintOptions& imprint_options = {});

struct ApplyResult {
  TriMesh mesh;
  WatertightReport report;
  bool valid = false;  // closed input gave closed output; no nonmanifold or winding defects
  std::vector<std::string> warnings;
};

ApplyResult apply(const TriMesh& mesh, const UVChart& chart, const TextureElement& element,
                  const std::vector<PlacementEvent>& placements, const ExtrudeOptions& extrude,
                  const ImprintOptions& imprint_options = {});

// One line per field of the report.
std::string describe(const WatertightReport& report);

}  // namespace texprint
