#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <thread>

#include "proxweb/core/error.hpp"
#include "proxweb/service/platform.hpp"

namespace httplib {
class Server;
}

namespace proxweb::service {

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::string salt;  // PROXWEB_SALT overrides
  std::optional<std::filesystem::path> data_dir;  // in memory when empty
};

// HTTP status for a domain error.
int http_status(ErrorCode code) noexcept;

// JSON API over one Platform:
//
//   POST   /nodes                        register a node
//   GET    /nodes?owner=&venue=&protocol=&mobility=
//   GET    /nodes/{mac}
//   PATCH  /nodes/{mac}/metadata
//   GET    /venues/{id}/interference?radius=
//   PUT    /contents, GET /contents
//   PUT    /rules, GET /rules?mac=, DELETE /rules/{id}
//   POST   /rules:parse                  DSL text in, rule out
//   POST   /scans                        ingest a scan report
//   POST   /resolve                      activations for a scan report
//   GET    /stats/heatmap?mac=&from=&to=&bucket=   (CSV with Accept: text/csv)
//   GET    /stats/dwell?mac=&gap=
//   GET    /stats/live?metric=&mac=&window=&at=
//   GET    /config                       propagation and analytics defaults
//
// Errors come back as {"code", "message", "detail"}.
class Service {
 public:
  // Loads state. Throws Error{CorruptSnapshot}.
  explicit Service(ServiceConfig config);
  ~Service();

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Binds and starts serving on a background thread. Throws Error{PortInUse}.
  void start();
  // Stops accepting requests, then flushes the presence log and snapshots.
  void stop();

  // The bound port once started.
  int port() const { return bound_port_; }
  Platform& platform() { return *platform_; }

 private:
  void install_routes();

  ServiceConfig config_;
  std::unique_ptr<Platform> platform_;
  std::unique_ptr<httplib::Server> server_;
  std::thread worker_;
  int bound_port_ = 0;
};

}  // namespace proxweb::service
