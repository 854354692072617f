// draco-server: the recommendation engine over HTTP.

#include <iostream>

#include <CLI11.hpp>

#include "draco/service.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Serve validation, completion, rendering and debugging over HTTP"};
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string kb_dir;
  draco::ServerLimits limits;
  app.add_option("--host", host)->capture_default_str();
  app.add_option("--port", port, "0 picks a free port")->capture_default_str();
  app.add_option("--kb", kb_dir, "Knowledge base directory (default: built in)")->envname("DRACO_KB");
  app.add_option("--max-body", limits.max_body, "Largest request body in bytes")->capture_default_str();
  app.add_option("--timeout", limits.timeout_seconds, "Socket timeout in seconds")->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  try {
    draco::Service service(kb_dir.empty() ? draco::default_knowledge_base() : draco::load_kb(kb_dir));
    httplib::Server server;
    draco::configure(server, limits);
    service.mount(server);
    int bound = port == 0 ? server.bind_to_any_port(host) : (server.bind_to_port(host, port) ? port : -1);
    if (bound < 0) {
      std::cerr << "draco-server: cannot bind " << host << ":" << port << "\n";
      return 2;
    }
    std::cout << "listening on http://" << host << ":" << bound << std::endl;
    return server.listen_after_bind() ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "draco-server: " << e.what() << "\n";
    return 2;
  }
}
