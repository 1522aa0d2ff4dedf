#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "texprint/autocomplete.hpp"
#include "texprint/extrude.hpp"
#include "texprint/segmentation.hpp"
#include "texprint/svg_element.hpp"
#include "texprint/uv_param.hpp"

// JSON documents exchanged by the CLI and the service. Each carries
// {"format": "texprint.<kind>", "version": 1}; readers reject other formats
// and newer versions with ParseError. Schemas are listed in docs/formats.md.
namespace texprint {

inline constexpr int kFormatVersion = 1;

std::string chart_to_json(const UVChart& chart);
UVChart chart_from_json(std::string_view text);

struct RegionDocument {
  Vec3 seed = Vec3::Zero();
  SegmentRegion region;
};
std::string region_to_json(const RegionDocument& doc);
RegionDocument region_from_json(std::string_view text);

// A point given either in chart coordinates or on the surface (mapped to the
// chart through the closest surface point).
struct DemoPoint {
  std::optional<Vec2> uv;
  std::optional<Vec3> surface;
};

struct DemoEvent {
  DemoPoint at;
  double rotation = 0.0;
  double scale = 1.0;
};

struct Demo {
  std::vector<DemoEvent> events;
  bool complete = true;                    // run pattern completion
  std::vector<DemoPoint> curve;            // completion path, optional
  std::optional<geom2d::MultiPolygon2> region;  // chart-space fill region, optional
};
std::string demo_to_json(const Demo& demo);
Demo demo_from_json(std::string_view text);

std::string placements_to_json(const std::vector<PlacementEvent>& placements, std::size_t demonstrated,
                               std::optional<Generator> generator);

struct Config {
  SegmentationConfig segmentation;
  SvgOptions svg;
  ArapOptions arap;
  ImprintOptions imprint;
};
// Every key is optional; missing keys keep their defaults.
Config config_from_json(std::string_view text);

const char* generator_name(Generator g);
ExtrudeMode parse_mode(std::string_view name);  // throws InvalidInput
Vec3 parse_point(std::string_view text);        // "x,y,z"; throws InvalidInput

}  // namespace texprint
