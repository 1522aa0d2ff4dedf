// texprint-server: HTTP service for the companion UI, endpoints under /v1.

#include <iostream>

#include "CLI11.hpp"
#include "httplib.h"
#include "texprint/service.hpp"

int main(int argc, char** argv) {
  CLI::App app{"texprint HTTP service"};
  std::string host = "127.0.0.1";
  int port = 8080;
  int idle_minutes = 30;
  int threads = 4;
  app.add_option("--host", host, "Address to bind");
  app.add_option("--port", port, "Port to listen on");
  app.add_option("--idle-timeout", idle_minutes, "Minutes before an idle session is dropped");
  app.add_option("--threads", threads, "Worker threads");
  CLI11_PARSE(app, argc, argv);

  texprint::ServiceOptions options;
  options.idle_timeout = std::chrono::minutes(idle_minutes);
  texprint::Service service(options);
  httplib::Server server;
  server.new_task_queue = [threads] { return new httplib::ThreadPool(static_cast<std::size_t>(threads)); };
  server.set_payload_max_length(512u << 20);
  service.mount(server);
  std::cout << "listening on " << host << ":" << port << std::endl;
  if (!server.listen(host, port)) {
    std::cerr << "error: cannot listen on " << host << ":" << port << "\n";
    return 2;
  }
  return 0;
}
