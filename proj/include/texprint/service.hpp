#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <mutex>
#include <string>

namespace httplib {
class Server;
}

// HTTP facade over the engine, mounted under /v1. Sessions live in memory
// and are dropped after an idle timeout. Endpoints:
//
//   POST   /v1/sessions                    mesh bytes (OBJ or STL) -> session id, mesh and chart summary
//   DELETE /v1/sessions/{id}
//   PUT    /v1/sessions/{id}/element       SVG body; the default element is a 1 mm radius disc
//   GET    /v1/sessions/{id}/region?x&y&z  region under the cursor (preview)
//   POST   /v1/sessions/{id}/region?x&y&z  same, and makes it the fill region
//   POST   /v1/sessions/{id}/events        texprint.demo body -> suggestion or null
//   POST   /v1/sessions/{id}/adjust        {"density"|"scale"|"rotation": x} or {"move": {"seq", "uv"}}
//   POST   /v1/sessions/{id}/accept        current suggestion, else the demonstrated events
//   POST   /v1/sessions/{id}/apply         {"mode", "depth"} -> binary STL; 409 when validation fails
namespace texprint {

struct ServiceOptions {
  std::chrono::seconds idle_timeout{30 * 60};
  double hover_grid = 0.1;  // mm; cursor quantization for the region cache
};

class Service {
 public:
  explicit Service(ServiceOptions options = {});
  ~Service();

  void mount(httplib::Server& server);

  std::size_t session_count() const;
  // Drops sessions idle for longer than the timeout; returns how many.
  std::size_t evict_idle();

  struct Session;

 private:
  std::shared_ptr<Session> find(const std::string& id);
  std::string create(std::shared_ptr<Session> session);

  ServiceOptions options_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::uint64_t counter_ = 0;
};

}  // namespace texprint
