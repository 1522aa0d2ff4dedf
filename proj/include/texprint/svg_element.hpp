#pragma once

#include <string>
#include <string_view>

#include "texprint/geom2d.hpp"

namespace texprint {

// The user's 2D texture element, centred on its area centroid.
struct TextureElement {
  geom2d::Polygon2 shape;
  double nominal_size = 0.0;  // bounding-box diagonal, mm
};

struct SvgOptions {
  double chord_deviation = 0.05;  // mm
  int min_circle_segments = 64;   // per full turn, for circles, ellipses, arcs and curves
};

// Reads an SVG document: path (M L H V C S Q T A Z), rect, circle, ellipse and
// polygon, with transforms. Fill geometry only. User units are millimetres
// unless the root declares a millimetre size with a viewBox. The y axis is
// flipped so the element reads upright in the chart.
//
// Throws ParseError on malformed XML or path data, InvalidInput when there is
// no closed shape, a ring self-intersects, or the rings form more than one
// disjoint part.
TextureElement load_element(std::string_view bytes, const SvgOptions& options = {});
TextureElement load_element_file(const std::string& path, const SvgOptions& options = {});

// Centres a polygon on its centroid and fills in nominal_size.
TextureElement make_element(const geom2d::Polygon2& shape);

}  // namespace texprint
