#include "texprint/service.hpp"

#include <array>
#include <cmath>
#include <cstring>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>

// Eigen must come before httplib.h, whose resolver headers define `res`.
#include "texprint/error.hpp"
#include "texprint/pipeline.hpp"

#include "httplib.h"
#include "json.hpp"

namespace texprint {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

struct Service::Session {
  std::mutex mutex;  // one mutation at a time
  Clock::time_point last_used = Clock::now();

  TriMesh mesh;
  UVChart chart;
  TextureElement element;
  std::optional<std::vector<int>> region;
  std::optional<Suggestion> suggestion;
  std::optional<std::vector<PlacementEvent>> events;
  std::optional<std::vector<PlacementEvent>> accepted;

  std::mutex cache_mutex;
  std::map<std::array<long long, 3>, std::string> region_cache;
};

namespace {

MeshFormat sniff(const std::string& body) {
  if (body.size() >= 84) {
    std::uint32_t n = 0;
    std::memcpy(&n, body.data() + 80, 4);
    if (body.size() == 84 + 50 * static_cast<std::size_t>(n)) return MeshFormat::Stl;
  }
  if (body.rfind("solid", 0) == 0 && body.find("facet") != std::string::npos) return MeshFormat::Stl;
  return MeshFormat::Obj;
}

void send_json(httplib::Response& res, const json& j, int status = 200) {
  res.status = status;
  res.set_content(j.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message) { send_json(res, json{{"error", message}}, status); }

json placements_json(const std::vector<PlacementEvent>& ps) {
  json list = json::array();
  for (const PlacementEvent& p : ps)
    list.push_back({{"uv", {p.anchor.x(), p.anchor.y()}}, {"rotation", p.rotation}, {"scale", p.scale}, {"seq", p.seq}});
  return list;
}

json suggestion_json(const Suggestion& s) {
  if (!s.pattern) return json{{"suggestion", nullptr}, {"warnings", s.warnings}};
  json j{{"generator", generator_name(s.pattern->generator)},
         {"demonstrated", s.demonstrated},
         {"density", s.pattern->density},
         {"scale", s.pattern->scale},
         {"rotation", s.pattern->rotation},
         {"placements", placements_json(s.placements)}};
  return json{{"suggestion", j}, {"warnings", s.warnings}};
}

std::optional<Vec3> cursor(const httplib::Request& req) {
  Vec3 p;
  const char* names[] = {"x", "y", "z"};
  for (int i = 0; i < 3; ++i) {
    if (!req.has_param(names[i])) return std::nullopt;
    const std::string v = req.get_param_value(names[i]);
    char* end = nullptr;
    p[i] = std::strtod(v.c_str(), &end);
    if (v.empty() || *end != '\0' || !std::isfinite(p[i])) return std::nullopt;
  }
  return p;
}

TextureElement default_element() {
  geom2d::Ring disc;
  for (int i = 0; i < 64; ++i) disc.emplace_back(std::cos(2 * std::numbers::pi * i / 64), std::sin(2 * std::numbers::pi * i / 64));
  return make_element(geom2d::make_polygon(std::move(disc)));
}

}  // namespace

Service::Service(ServiceOptions options) : options_(options) {}
Service::~Service() = default;

std::size_t Service::session_count() const {
  std::lock_guard lock(mutex_);
  return sessions_.size();
}

std::size_t Service::evict_idle() {
  std::lock_guard lock(mutex_);
  const auto now = Clock::now();
  std::size_t dropped = 0;
  for (auto it = sessions_.begin(); it != sessions_.end();) {
    bool idle = false;
    {
      std::unique_lock s(it->second->mutex, std::try_to_lock);
      idle = s.owns_lock() && now - it->second->last_used > options_.idle_timeout;
    }
    if (idle) {
      it = sessions_.erase(it);
      ++dropped;
    } else {
      ++it;
    }
  }
  return dropped;
}

std::shared_ptr<Service::Session> Service::find(const std::string& id) {
  std::lock_guard lock(mutex_);
  const auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

std::string Service::create(std::shared_ptr<Session> session) {
  static thread_local std::mt19937_64 rng{std::random_device{}()};
  std::lock_guard lock(mutex_);
  std::ostringstream id;
  id << std::hex << ++counter_ << '-' << rng();
  sessions_.emplace(id.str(), std::move(session));
  return id.str();
}

void Service::mount(httplib::Server& server) {
  // Runs f on a live session under its lock; 404 for unknown ids.
  auto with_session = [this](const httplib::Request& req, httplib::Response& res, auto&& f) {
    evict_idle();
    const auto s = find(req.matches[1]);
    if (!s) return send_error(res, 404, "unknown session");
    std::lock_guard lock(s->mutex);
    s->last_used = Clock::now();
    try {
      f(*s);
    } catch (const ParseError& e) {
      send_error(res, 400, e.what());
    } catch (const InvalidInput& e) {
      send_error(res, 400, e.what());
    } catch (const json::exception& e) {
      send_error(res, 400, std::string("malformed request body: ") + e.what());
    } catch (const Error& e) {
      send_error(res, 422, e.what());
    }
  };

  server.Post("/v1/sessions", [this](const httplib::Request& req, httplib::Response& res) {
    evict_idle();
    auto s = std::make_shared<Session>();
    try {
      MeshFormat format = sniff(req.body);
      if (req.has_param("format")) {
        const std::string f = req.get_param_value("format");
        if (f != "obj" && f != "stl") return send_error(res, 400, "format must be obj or stl");
        format = f == "obj" ? MeshFormat::Obj : MeshFormat::Stl;
      }
      s->mesh = load_mesh(std::span(reinterpret_cast<const std::uint8_t*>(req.body.data()), req.body.size()), format);
      if (s->mesh.empty()) return send_error(res, 400, "mesh has no faces");
      s->chart = parameterize(s->mesh);
    } catch (const ParseError& e) {
      return send_error(res, 400, e.what());
    } catch (const InvalidInput& e) {
      return send_error(res, 400, e.what());
    } catch (const Error& e) {
      return send_error(res, 422, e.what());
    }
    s->element = default_element();
    const WatertightReport w = check_watertight(s->mesh);
    json body{{"session", ""},
              {"mesh", {{"vertices", s->mesh.vertex_count()}, {"faces", s->mesh.face_count()}, {"surface_area", s->mesh.surface_area()}, {"closed", w.is_closed}}},
              {"chart", {{"max_distortion", s->chart.max_distortion}, {"seam_edges", s->chart.seam_edges.size()}, {"raw_area_ratio", s->chart.raw_area_ratio}}}};
    body["session"] = create(s);
    send_json(res, body, 201);
  });

  server.Delete(R"(/v1/sessions/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    std::lock_guard lock(mutex_);
    if (sessions_.erase(req.matches[1]) == 0) return send_error(res, 404, "unknown session");
    res.status = 204;
  });

  server.Put(R"(/v1/sessions/([^/]+)/element)", [with_session](const httplib::Request& req, httplib::Response& res) {
    with_session(req, res, [&](Session& s) {
      s.element = load_element(req.body);
      s.suggestion.reset();
      s.accepted.reset();
      send_json(res, json{{"area", s.element.shape.area()}, {"nominal_size", s.element.nominal_size}});
    });
  });

  auto region = [this](const httplib::Request& req, httplib::Response& res, bool select) {
    const auto s = find(req.matches[1]);
    if (!s) return send_error(res, 404, "unknown session");
    const auto p = cursor(req);
    if (!p) return send_error(res, 400, "x, y and z query parameters are required");
    const std::array<long long, 3> key{std::llround(p->x() / options_.hover_grid), std::llround(p->y() / options_.hover_grid),
                                       std::llround(p->z() / options_.hover_grid)};
    std::string body;
    {
      std::lock_guard lock(s->cache_mutex);
      const auto it = s->region_cache.find(key);
      if (it != s->region_cache.end()) body = it->second;
    }
    SegmentRegion r;
    if (body.empty() || select) {
      // The mesh is immutable after upload, so reads need no session lock.
      const Vec3 q = Vec3(key[0], key[1], key[2]) * options_.hover_grid;
      r = infer_region(s->mesh, q);
      json boundary = json::array();
      for (const Vec3& b : r.boundary_loop) boundary.push_back({b.x(), b.y(), b.z()});
      body = json{{"cursor", {q.x(), q.y(), q.z()}}, {"faces", r.faces}, {"boundary", boundary}, {"score", r.score}, {"fallback", r.fallback}}.dump();
      std::lock_guard lock(s->cache_mutex);
      s->region_cache.emplace(key, body);
    }
    if (select) {
      std::lock_guard lock(s->mutex);
      s->last_used = Clock::now();
      s->region = r.faces;
      s->suggestion.reset();
      s->accepted.reset();
    }
    res.set_header("Cache-Control", "private, max-age=60");
    res.set_content(body, "application/json");
  };
  server.Get(R"(/v1/sessions/([^/]+)/region)", [region](const httplib::Request& req, httplib::Response& res) { region(req, res, false); });
  server.Post(R"(/v1/sessions/([^/]+)/region)", [region](const httplib::Request& req, httplib::Response& res) { region(req, res, true); });

  server.Post(R"(/v1/sessions/([^/]+)/events)", [with_session](const httplib::Request& req, httplib::Response& res) {
    with_session(req, res, [&](Session& s) {
      const Demo demo = demo_from_json(req.body);
      Suggestion sg = suggest(s.mesh, s.chart, s.element, demo, s.region);
      s.events = std::vector<PlacementEvent>(sg.placements.begin(), sg.placements.begin() + static_cast<std::ptrdiff_t>(sg.demonstrated));
      s.accepted.reset();
      const json body = suggestion_json(sg);
      if (sg.pattern) s.suggestion = std::move(sg);
      else s.suggestion.reset();
      send_json(res, body);
    });
  });

  server.Post(R"(/v1/sessions/([^/]+)/adjust)", [with_session](const httplib::Request& req, httplib::Response& res) {
    with_session(req, res, [&](Session& s) {
      if (!s.suggestion) return send_error(res, 409, "no suggestion to adjust");
      const json j = json::parse(req.body);
      PatternEdit edit;
      if (j.contains("density")) edit = SetDensity{j["density"].get<double>()};
      else if (j.contains("scale")) edit = SetScale{j["scale"].get<double>()};
      else if (j.contains("rotation")) edit = SetRotation{j["rotation"].get<double>()};
      else if (j.contains("move")) edit = MoveAnchor{j["move"].at("seq").get<int>(), {j["move"].at("uv").at(0).get<double>(), j["move"].at("uv").at(1).get<double>()}};
      else return send_error(res, 400, "expected density, scale, rotation or move");
      PatternSuggestion next = adjust(*s.suggestion->pattern, edit);
      s.suggestion->placements = next.placements;
      s.suggestion->demonstrated = next.demonstrated;
      s.suggestion->pattern = std::move(next);
      s.accepted.reset();
      send_json(res, suggestion_json(*s.suggestion));
    });
  });

  server.Post(R"(/v1/sessions/([^/]+)/accept)", [with_session](const httplib::Request& req, httplib::Response& res) {
    with_session(req, res, [&](Session& s) {
      if (s.suggestion) s.accepted = s.suggestion->placements;
      else if (s.events) s.accepted = s.events;
      else return send_error(res, 409, "no events or suggestion to accept");
      send_json(res, json{{"accepted", s.accepted->size()}});
    });
  });

  server.Post(R"(/v1/sessions/([^/]+)/apply)", [with_session](const httplib::Request& req, httplib::Response& res) {
    with_session(req, res, [&](Session& s) {
      const json j = req.body.empty() ? json::object() : json::parse(req.body);
      ExtrudeOptions o;
      o.mode = parse_mode(j.value("mode", std::string("raised")));
      o.depth = j.value("depth", 1.0);
      if (o.mode != ExtrudeMode::Cutout && !(o.depth > 0)) return send_error(res, 400, "depth must be positive");
      if (!s.accepted) return send_error(res, 409, "no placements accepted");
      ApplyResult r;
      try {
        r = apply(s.mesh, s.chart, s.element, *s.accepted, o);
      } catch (const Error& e) {
        return send_error(res, 409, e.what());
      }
      if (!r.valid)
        return send_json(res,
                         json{{"error", "output failed validation"},
                              {"boundary_edges", r.report.boundary_edge_count},
                              {"nonmanifold_edges", r.report.nonmanifold_edge_count},
                              {"inconsistent_winding_pairs", r.report.inconsistent_winding_pairs}},
                         409);
      const auto bytes = export_mesh(r.mesh, ExportFormat::StlBinary);
      res.set_content(std::string(bytes.begin(), bytes.end()), "model/stl");
    });
  });
}

}  // namespace texprint
