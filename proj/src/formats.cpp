#include "texprint/formats.hpp"

#include <charconv>
#include <set>

#include "json.hpp"
#include "texprint/error.hpp"

namespace texprint {

using nlohmann::json;

namespace {

json header(const char* kind) { return json{{"format", std::string("texprint.") + kind}, {"version", kFormatVersion}}; }

json parse(std::string_view text, const char* kind) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string(kind) + " document is not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw ParseError(std::string(kind) + " document must be a JSON object");
  const std::string want = std::string("texprint.") + kind;
  if (!j.contains("format") || j["format"] != want) throw ParseError("expected a document with format \"" + want + "\"");
  if (!j.contains("version") || !j["version"].is_number_integer()) throw ParseError(want + ": missing version");
  const int v = j["version"].get<int>();
  if (v < 1 || v > kFormatVersion) throw ParseError(want + ": unsupported version " + std::to_string(v));
  return j;
}

// Runs f, turning JSON type errors into ParseError.
template <typename F>
auto guarded(const char* kind, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed ") + kind + " document: " + e.what());
  }
}

void only_keys(const json& j, std::initializer_list<const char*> keys, const std::string& where) {
  std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) throw ParseError("unknown key \"" + k + "\" in " + where);
}

Vec2 vec2(const json& j) {
  if (!j.is_array() || j.size() != 2) throw ParseError("expected [u, v]");
  return {j[0].get<double>(), j[1].get<double>()};
}

Vec3 vec3(const json& j) {
  if (!j.is_array() || j.size() != 3) throw ParseError("expected [x, y, z]");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json point_json(const DemoPoint& p) {
  if (p.uv) return json{{"uv", {p.uv->x(), p.uv->y()}}};
  if (p.surface) return json{{"point", {p.surface->x(), p.surface->y(), p.surface->z()}}};
  throw InvalidInput("demo point has neither uv nor surface coordinates");
}

DemoPoint point_from(const json& j, std::initializer_list<const char*> extra) {
  std::vector<const char*> keys{"uv", "point"};
  keys.insert(keys.end(), extra.begin(), extra.end());
  std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) throw ParseError("unknown key \"" + k + "\" in demo point");
  DemoPoint p;
  if (j.contains("uv")) p.uv = vec2(j["uv"]);
  if (j.contains("point")) p.surface = vec3(j["point"]);
  if (p.uv.has_value() == p.surface.has_value()) throw ParseError("demo point needs exactly one of \"uv\" or \"point\"");
  return p;
}

}  // namespace

std::string chart_to_json(const UVChart& chart) {
  json j = header("chart");
  json uv = json::array();
  for (const UVTriangle& t : chart.uv) uv.push_back({t[0].x(), t[0].y(), t[1].x(), t[1].y(), t[2].x(), t[2].y()});
  json seams = json::array();
  for (const EdgeKey& e : chart.seam_edges) seams.push_back({e.lo, e.hi});
  j["uv"] = uv;
  j["seam_edges"] = seams;
  j["area_distortion"] = chart.area_distortion;
  j["max_distortion"] = chart.max_distortion;
  j["raw_area_ratio"] = chart.raw_area_ratio;
  j["energy_history"] = chart.energy_history;
  return j.dump();
}

UVChart chart_from_json(std::string_view text) {
  const json j = parse(text, "chart");
  return guarded("chart", [&] {
    UVChart c;
    for (const json& t : j.at("uv")) {
      if (t.size() != 6) throw ParseError("chart uv entries hold 6 numbers");
      c.uv.push_back({Vec2(t[0].get<double>(), t[1].get<double>()), Vec2(t[2].get<double>(), t[3].get<double>()),
                      Vec2(t[4].get<double>(), t[5].get<double>())});
    }
    for (const json& e : j.at("seam_edges")) c.seam_edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
    c.area_distortion = j.at("area_distortion").get<std::vector<double>>();
    if (c.area_distortion.size() != c.uv.size()) throw ParseError("chart area_distortion length differs from uv");
    c.max_distortion = j.at("max_distortion").get<double>();
    c.raw_area_ratio = j.value("raw_area_ratio", 1.0);
    c.energy_history = j.value("energy_history", std::vector<double>{});
    return c;
  });
}

std::string region_to_json(const RegionDocument& doc) {
  json j = header("region");
  j["seed"] = {doc.seed.x(), doc.seed.y(), doc.seed.z()};
  j["faces"] = doc.region.faces;
  json loop = json::array();
  for (const Vec3& p : doc.region.boundary_loop) loop.push_back({p.x(), p.y(), p.z()});
  j["boundary"] = loop;
  j["score"] = doc.region.score;
  j["level"] = doc.region.level;
  j["fallback"] = doc.region.fallback;
  return j.dump();
}

RegionDocument region_from_json(std::string_view text) {
  const json j = parse(text, "region");
  return guarded("region", [&] {
    RegionDocument d;
    d.seed = vec3(j.at("seed"));
    d.region.faces = j.at("faces").get<std::vector<int>>();
    for (const json& p : j.value("boundary", json::array())) d.region.boundary_loop.push_back(vec3(p));
    d.region.score = j.value("score", 0.0);
    d.region.level = j.value("level", 0.0);
    d.region.fallback = j.value("fallback", false);
    return d;
  });
}

std::string demo_to_json(const Demo& demo) {
  json j = header("demo");
  json events = json::array();
  for (const DemoEvent& e : demo.events) {
    json ev = point_json(e.at);
    ev["rotation"] = e.rotation;
    ev["scale"] = e.scale;
    events.push_back(ev);
  }
  j["events"] = events;
  j["complete"] = demo.complete;
  if (!demo.curve.empty()) {
    json curve = json::array();
    for (const DemoPoint& p : demo.curve) curve.push_back(point_json(p));
    j["curve"] = curve;
  }
  if (demo.region) {
    json polys = json::array();
    for (const geom2d::Polygon2& p : *demo.region) {
      json rings = json::array();
      for (std::size_t r = 0; r < p.ring_count(); ++r) {
        json ring = json::array();
        for (const Vec2& q : p.ring(r)) ring.push_back({q.x(), q.y()});
        rings.push_back(ring);
      }
      polys.push_back(rings);
    }
    j["region"] = polys;
  }
  return j.dump(2);
}

Demo demo_from_json(std::string_view text) {
  const json j = parse(text, "demo");
  only_keys(j, {"format", "version", "events", "complete", "curve", "region"}, "demo");
  return guarded("demo", [&] {
    Demo d;
    for (const json& e : j.at("events")) {
      DemoEvent ev;
      ev.at = point_from(e, {"rotation", "scale"});
      ev.rotation = e.value("rotation", 0.0);
      ev.scale = e.value("scale", 1.0);
      if (!(ev.scale > 0)) throw ParseError("demo event scale must be positive");
      d.events.push_back(ev);
    }
    d.complete = j.value("complete", true);
    for (const json& p : j.value("curve", json::array())) d.curve.push_back(point_from(p, {}));
    if (j.contains("region")) {
      geom2d::MultiPolygon2 mp;
      for (const json& poly : j["region"]) {
        std::vector<geom2d::Ring> rings;
        for (const json& ring : poly) {
          geom2d::Ring r;
          for (const json& q : ring) r.push_back(vec2(q));
          rings.push_back(std::move(r));
        }
        if (rings.empty()) throw ParseError("demo region polygon without rings");
        geom2d::Ring outer = std::move(rings.front());
        rings.erase(rings.begin());
        try {
          mp.push_back(geom2d::make_polygon(std::move(outer), std::move(rings)));
        } catch (const InvalidInput& e) {
          throw ParseError(std::string("demo region: ") + e.what());
        }
      }
      d.region = std::move(mp);
    }
    return d;
  });
}

std::string placements_to_json(const std::vector<PlacementEvent>& placements, std::size_t demonstrated,
                               std::optional<Generator> generator) {
  json j = header("placements");
  j["generator"] = generator ? json(generator_name(*generator)) : json(nullptr);
  j["demonstrated"] = demonstrated;
  json list = json::array();
  for (const PlacementEvent& p : placements)
    list.push_back({{"uv", {p.anchor.x(), p.anchor.y()}}, {"rotation", p.rotation}, {"scale", p.scale}, {"seq", p.seq}});
  j["placements"] = list;
  return j.dump(2);
}

Config config_from_json(std::string_view text) {
  const json j = parse(text, "config");
  only_keys(j, {"format", "version", "segmentation", "svg", "arap", "imprint"}, "config");
  return guarded("config", [&] {
    Config c;
    if (j.contains("segmentation")) {
      const json& s = j["segmentation"];
      only_keys(s, {"R", "k", "lambda_fraction", "threshold"}, "config.segmentation");
      c.segmentation.R = s.value("R", c.segmentation.R);
      c.segmentation.k = s.value("k", c.segmentation.k);
      c.segmentation.lambda_fraction = s.value("lambda_fraction", c.segmentation.lambda_fraction);
      c.segmentation.threshold = s.value("threshold", c.segmentation.threshold);
    }
    if (j.contains("svg")) {
      const json& s = j["svg"];
      only_keys(s, {"chord_deviation", "min_circle_segments"}, "config.svg");
      c.svg.chord_deviation = s.value("chord_deviation", c.svg.chord_deviation);
      c.svg.min_circle_segments = s.value("min_circle_segments", c.svg.min_circle_segments);
    }
    if (j.contains("arap")) {
      const json& s = j["arap"];
      only_keys(s, {"max_iterations", "relative_tolerance"}, "config.arap");
      c.arap.max_iterations = s.value("max_iterations", c.arap.max_iterations);
      c.arap.relative_tolerance = s.value("relative_tolerance", c.arap.relative_tolerance);
    }
    if (j.contains("imprint")) {
      const json& s = j["imprint"];
      only_keys(s, {"physical_scale"}, "config.imprint");
      c.imprint.physical_scale = s.value("physical_scale", c.imprint.physical_scale);
    }
    return c;
  });
}

const char* generator_name(Generator g) {
  switch (g) {
    case Generator::Row: return "row";
    case Generator::Grid: return "grid";
    case Generator::Curve: return "curve";
  }
  return "row";
}

ExtrudeMode parse_mode(std::string_view name) {
  if (name == "raised") return ExtrudeMode::Raised;
  if (name == "embossed") return ExtrudeMode::Embossed;
  if (name == "cutout") return ExtrudeMode::Cutout;
  throw InvalidInput("unknown mode \"" + std::string(name) + "\" (raised, embossed or cutout)");
}

Vec3 parse_point(std::string_view text) {
  Vec3 out;
  std::size_t pos = 0;
  for (int i = 0; i < 3; ++i) {
    const std::size_t end = i < 2 ? text.find(',', pos) : text.size();
    if (end == std::string_view::npos) throw InvalidInput("expected \"x,y,z\", got \"" + std::string(text) + "\"");
    std::string_view part = text.substr(pos, end - pos);
    while (!part.empty() && part.front() == ' ') part.remove_prefix(1);
    while (!part.empty() && part.back() == ' ') part.remove_suffix(1);
    double v = 0;
    const auto [p, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (ec != std::errc() || p != part.data() + part.size() || part.empty() || !std::isfinite(v))
      throw InvalidInput("expected \"x,y,z\", got \"" + std::string(text) + "\"");
    out[i] = v;
    pos = end + 1;
  }
  return out;
}

}  // namespace texprint
