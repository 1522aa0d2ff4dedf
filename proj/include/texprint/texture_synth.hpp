#pragma once

#include <string>
#include <vector>

#include "texprint/autocomplete.hpp"
#include "texprint/svg_element.hpp"
#include "texprint/uv_param.hpp"

namespace texprint {

// Closed loop of output vertices around the interior faces of one placement,
// ordered along the interior faces' winding.
struct BoundaryLoop {
  int placement = 0;
  std::vector<int> vertices;
};

struct ImprintedMesh {
  TriMesh mesh;                     // input vertices keep their indices; new ones follow
  std::vector<int> face_placement;  // placement index per face, -1 outside every element
  std::vector<BoundaryLoop> loops;
  UVChart chart;                    // uv per output face
  std::vector<geom2d::Polygon2> footprints;  // element outline per placement, chart coordinates
  std::vector<std::string> warnings;
};

struct ImprintOptions {
  // Scale each footprint by the chart's local length ratio so the element
  // keeps its millimetre size on the surface.
  bool physical_scale = true;
};

// Element outline of one placement in chart coordinates.
geom2d::Polygon2 footprint_in_chart(const TextureElement& element, const PlacementEvent& placement, const UVChart& chart,
                                    const TriMesh& mesh, const ChartIndex& index, const ImprintOptions& options = {});

// Splits every face whose uv triangle meets an element outline so the outline
// runs along mesh edges, and tags the faces inside as TextureInterior. Split
// points on a shared edge are shared by both faces, seams included. An
// outline that crosses a seam is continued on the far side and reported in
// `warnings`.
//
// Throws InvalidInput when outlines overlap or one misses the chart.
ImprintedMesh imprint(const TriMesh& mesh, const UVChart& chart, const TextureElement& element,
                      const std::vector<PlacementEvent>& placements, const ImprintOptions& options = {});

}  // namespace texprint
