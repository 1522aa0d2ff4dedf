#include <gtest/gtest.h>

#include "shapes.hpp"
#include "texprint/error.hpp"
#include "texprint/formats.hpp"

using namespace texprint;
using namespace texprint::testing;

TEST(ChartJson, RoundTripIsExact) {
  const UVChart c = parameterize(capped_cylinder(5, 10, 16, 4, 2));
  const UVChart d = chart_from_json(chart_to_json(c));
  EXPECT_EQ(d.uv, c.uv);
  EXPECT_EQ(d.seam_edges, c.seam_edges);
  EXPECT_EQ(d.area_distortion, c.area_distortion);
  EXPECT_EQ(d.max_distortion, c.max_distortion);
  EXPECT_EQ(d.energy_history, c.energy_history);
}

TEST(ChartJson, RejectsWrongHeaders) {
  EXPECT_THROW(chart_from_json("{}"), ParseError);
  EXPECT_THROW(chart_from_json("not json"), ParseError);
  EXPECT_THROW(chart_from_json(R"({"format":"texprint.region","version":1})"), ParseError);
  EXPECT_THROW(chart_from_json(R"({"format":"texprint.chart","version":2,"uv":[]})"), ParseError);
  EXPECT_THROW(chart_from_json(R"({"format":"texprint.chart","version":1,"uv":[[1,2,3]]})"), ParseError);
  EXPECT_THROW(chart_from_json(R"({"format":"texprint.chart","version":1,"uv":"x"})"), ParseError);
}

TEST(RegionJson, RoundTrip) {
  RegionDocument doc;
  doc.seed = {1, 2, 3};
  doc.region.faces = {0, 4, 9};
  doc.region.boundary_loop = {{0, 0, 1}, {1, 0, 1}, {0, 1, 1}, {0, 0, 1}};
  doc.region.score = 0.25;
  doc.region.fallback = true;
  const RegionDocument back = region_from_json(region_to_json(doc));
  EXPECT_EQ(back.seed, doc.seed);
  EXPECT_EQ(back.region.faces, doc.region.faces);
  EXPECT_EQ(back.region.boundary_loop, doc.region.boundary_loop);
  EXPECT_EQ(back.region.score, 0.25);
  EXPECT_TRUE(back.region.fallback);
}

TEST(DemoJson, RoundTripWithEveryField) {
  Demo d;
  d.events.push_back({{Vec2(1, 2), std::nullopt}, 0.5, 1.5});
  d.events.push_back({{std::nullopt, Vec3(3, 4, 5)}, 0.0, 1.0});
  d.complete = false;
  d.curve = {{Vec2(0, 0), std::nullopt}, {Vec2(5, 0), std::nullopt}};
  d.region = geom2d::MultiPolygon2{geom2d::make_polygon(square(0, 0, 10), {[] {
    auto h = square(4, 4, 2);
    std::reverse(h.begin(), h.end());
    return h;
  }()})};
  const Demo back = demo_from_json(demo_to_json(d));
  ASSERT_EQ(back.events.size(), 2u);
  EXPECT_EQ(*back.events[0].at.uv, Vec2(1, 2));
  EXPECT_EQ(back.events[0].rotation, 0.5);
  EXPECT_EQ(back.events[0].scale, 1.5);
  EXPECT_EQ(*back.events[1].at.surface, Vec3(3, 4, 5));
  EXPECT_FALSE(back.complete);
  EXPECT_EQ(back.curve.size(), 2u);
  ASSERT_TRUE(back.region.has_value());
  EXPECT_NEAR(geom2d::area(*back.region), 96.0, 1e-12);
}

TEST(DemoJson, Errors) {
  EXPECT_THROW(demo_from_json(R"({"format":"texprint.demo","version":1})"), ParseError);
  EXPECT_THROW(demo_from_json(R"({"format":"texprint.demo","version":1,"events":[{}]})"), ParseError);
  EXPECT_THROW(demo_from_json(R"({"format":"texprint.demo","version":1,"events":[{"uv":[1,2],"point":[1,2,3]}]})"), ParseError);
  EXPECT_THROW(demo_from_json(R"({"format":"texprint.demo","version":1,"events":[{"uv":[1,2],"scale":0}]})"), ParseError);
  EXPECT_THROW(demo_from_json(R"({"format":"texprint.demo","version":1,"events":[{"uv":[1,2]}],"extra":1})"), ParseError);
  EXPECT_THROW(demo_from_json(R"({"format":"texprint.demo","version":1,"events":[{"uv":[1]}]})"), ParseError);
  EXPECT_NO_THROW(demo_from_json(R"({"format":"texprint.demo","version":1,"events":[{"uv":[1,2]}]})"));
}

TEST(ConfigJson, OverridesOnlyGivenKeys) {
  const Config c = config_from_json(R"({"format":"texprint.config","version":1,"segmentation":{"k":4},"imprint":{"physical_scale":false}})");
  EXPECT_EQ(c.segmentation.k, 4);
  EXPECT_EQ(c.segmentation.R, SegmentationConfig{}.R);
  EXPECT_FALSE(c.imprint.physical_scale);
  EXPECT_EQ(c.svg.chord_deviation, SvgOptions{}.chord_deviation);
  EXPECT_THROW(config_from_json(R"({"format":"texprint.config","version":1,"segmentation":{"kk":4}})"), ParseError);
}

TEST(Parsing, PointsAndModes) {
  EXPECT_EQ(parse_point("1,2.5,-3"), Vec3(1, 2.5, -3));
  EXPECT_EQ(parse_point(" 1, 2 ,3 "), Vec3(1, 2, 3));
  for (const char* bad : {"1,2", "1,2,3,4", "a,b,c", "", "1,,3", "1,2,nan"}) EXPECT_THROW(parse_point(bad), InvalidInput) << bad;
  EXPECT_EQ(parse_mode("raised"), ExtrudeMode::Raised);
  EXPECT_EQ(parse_mode("embossed"), ExtrudeMode::Embossed);
  EXPECT_EQ(parse_mode("cutout"), ExtrudeMode::Cutout);
  EXPECT_THROW(parse_mode("Raised"), InvalidInput);
}
