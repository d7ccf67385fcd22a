#include "proxweb/service/service.hpp"

#include <sys/socket.h>

#include <charconv>
#include <sstream>

#include "httplib.h"
#include "json.hpp"
#include "proxweb/core/json_fields.hpp"
#include "proxweb/presence/codec.hpp"
#include "proxweb/registry/codec.hpp"
#include "proxweb/rules/codec.hpp"
#include "proxweb/rules/dsl.hpp"
#include "proxweb/simulator/scenario_io.hpp"

namespace proxweb::service {
namespace {

using json = nlohmann::ordered_json;
using httplib::Request;
using httplib::Response;

constexpr const char* kJson = "application/json";

json error_body(ErrorCode code, const std::string& message, const std::string& detail) {
  json j;
  j["code"] = std::string(code_name(code));
  j["message"] = message;
  j["detail"] = detail.empty() ? json(nullptr) : json(detail);
  return j;
}

void send_error(Response& res, ErrorCode code, const std::string& message,
                const std::string& detail = {}) {
  res.status = http_status(code);
  res.set_content(error_body(code, message, detail).dump(), kJson);
}

void send_json(Response& res, const json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), kJson);
}

json parse_body(const Request& req) {
  try {
    return json::parse(req.body);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::BadRequest, std::string("request body is not valid JSON: ") + e.what());
  }
}

std::optional<std::string> param(const Request& req, const char* name) {
  if (!req.has_param(name)) return std::nullopt;
  auto v = req.get_param_value(name);
  if (v.empty()) return std::nullopt;
  return v;
}

std::string required(const Request& req, const char* name) {
  auto v = param(req, name);
  if (!v) throw Error(ErrorCode::BadRequest, std::string("missing query parameter '") + name + "'", name);
  return *v;
}

std::int64_t int_param(const std::string& text, const char* name) {
  std::int64_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::BadRequest, std::string("parameter '") + name + "' must be an integer",
                name);
  }
  return value;
}

double number_param(const std::string& text, const char* name) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::BadRequest, std::string("parameter '") + name + "' must be a number",
              name);
}

Metric metric_param(const std::string& text) {
  auto m = parse_metric(text);
  if (!m) throw Error(ErrorCode::BadRequest, "metric must be visit_count or unique_devices", "metric");
  return *m;
}

bool wants_csv(const Request& req) {
  if (auto f = param(req, "format")) return *f == "csv";
  return req.get_header_value("Accept").find("text/csv") != std::string::npos;
}

}  // namespace

int http_status(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DuplicateMac: return 409;
    case ErrorCode::UnknownMac:
    case ErrorCode::UnknownRule:
    case ErrorCode::NotFound: return 404;
    case ErrorCode::UnknownContent: return 422;
    case ErrorCode::CorruptSnapshot:
    case ErrorCode::PortInUse:
    case ErrorCode::Internal: return 500;
    default: return 400;
  }
}

Service::Service(ServiceConfig config) : config_(std::move(config)) {
  const std::string salt = resolve_salt(config_.salt, config_.data_dir);
  platform_ = config_.data_dir ? std::make_unique<Platform>(*config_.data_dir, salt)
                               : std::make_unique<Platform>(salt);
  server_ = std::make_unique<httplib::Server>();
  // Plain SO_REUSEADDR: a second listener on a live port must fail.
  server_->set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
  install_routes();
}

Service::~Service() { stop(); }

void Service::start() {
  if (worker_.joinable()) return;
  if (config_.port == 0) {
    bound_port_ = server_->bind_to_any_port(config_.host);
  } else {
    bound_port_ = server_->bind_to_port(config_.host, config_.port) ? config_.port : -1;
  }
  if (bound_port_ <= 0) {
    throw Error(ErrorCode::PortInUse,
                "cannot bind " + config_.host + ":" + std::to_string(config_.port),
                std::to_string(config_.port));
  }
  worker_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
}

void Service::stop() {
  if (worker_.joinable()) {
    server_->stop();
    worker_.join();
  }
  if (platform_) {
    platform_->flush();
    platform_->save_registry();
    platform_->save_rules();
  }
}

void Service::install_routes() {
  auto& srv = *server_;
  Platform& p = *platform_;

  srv.set_exception_handler([](const Request&, Response& res, std::exception_ptr ep) {
    try {
      std::rethrow_exception(ep);
    } catch (const Error& e) {
      send_error(res, e.code(), e.what(), e.detail());
    } catch (const std::exception& e) {
      send_error(res, ErrorCode::Internal, e.what());
    } catch (...) {
      send_error(res, ErrorCode::Internal, "unknown failure");
    }
  });
  srv.set_error_handler([](const Request& req, Response& res) {
    if (!res.body.empty()) return httplib::Server::HandlerResponse::Unhandled;
    const int status = res.status;
    send_error(res, ErrorCode::NotFound, "no route for " + req.method + " " + req.path);
    if (status != 404) res.status = status;
    return httplib::Server::HandlerResponse::Handled;
  });

  // --- registry ---
  srv.Post("/nodes", [&p](const Request& req, Response& res) {
    auto node = p.registry().register_node(registry::node_from_json(parse_body(req)));
    p.save_registry();
    send_json(res, registry::to_json(node), 201);
  });

  srv.Get("/nodes", [&p](const Request& req, Response& res) {
    registry::NodeFilter filter;
    filter.owner = param(req, "owner");
    filter.venue_id = param(req, "venue");
    if (auto proto = param(req, "protocol")) {
      filter.protocol = parse_protocol(*proto);
      if (!filter.protocol) throw Error(ErrorCode::BadRequest, "protocol must be BLE or WIFI", "protocol");
    }
    if (auto mob = param(req, "mobility")) {
      filter.mobility = registry::parse_mobility(*mob);
      if (!filter.mobility) {
        throw Error(ErrorCode::BadRequest, "mobility must be FIXED or MOVABLE", "mobility");
      }
    }
    json out = json::array();
    for (const auto& n : p.registry().list_nodes(filter)) out.push_back(registry::to_json(n));
    send_json(res, out);
  });

  srv.Get(R"(/nodes/([^/]+))", [&p](const Request& req, Response& res) {
    const auto mac = MacAddress::parse(req.matches[1].str());
    auto node = p.registry().find(mac);
    if (!node) throw Error(ErrorCode::UnknownMac, "node " + mac.str() + " is not registered", mac.str());
    send_json(res, registry::to_json(*node));
  });

  srv.Patch(R"(/nodes/([^/]+)/metadata)", [&p](const Request& req, Response& res) {
    const auto mac = MacAddress::parse(req.matches[1].str());
    auto node = p.registry().update_metadata(mac, registry::patch_from_json(parse_body(req)));
    p.save_registry();
    send_json(res, registry::to_json(node));
  });

  srv.Get(R"(/venues/([^/]+)/interference)", [&p](const Request& req, Response& res) {
    double radius = registry::kDefaultInterferenceRadiusM;
    if (auto r = param(req, "radius")) radius = number_param(*r, "radius");
    json out = json::array();
    for (const auto& pair : p.registry().interference_report(req.matches[1].str(), radius)) {
      out.push_back(registry::to_json(pair));
    }
    send_json(res, out);
  });

  // --- rules ---
  srv.Put("/contents", [&p](const Request& req, Response& res) {
    auto id = p.rules().put_content(rules::content_from_json(parse_body(req)));
    p.save_rules();
    send_json(res, json{{"content_id", id}});
  });

  srv.Get("/contents", [&p](const Request&, Response& res) {
    json out = json::array();
    for (const auto& c : p.rules().all_contents()) out.push_back(rules::to_json(c));
    send_json(res, out);
  });

  srv.Put("/rules", [&p](const Request& req, Response& res) {
    auto id = p.rules().put_rule(rules::rule_from_json(parse_body(req)));
    p.save_rules();
    send_json(res, json{{"rule_id", id}});
  });

  srv.Get("/rules", [&p](const Request& req, Response& res) {
    auto list = param(req, "mac") ? p.rules().rules_for(MacAddress::parse(*param(req, "mac")))
                                  : p.rules().all_rules();
    json out = json::array();
    for (const auto& r : list) out.push_back(rules::to_json(r));
    send_json(res, out);
  });

  srv.Delete(R"(/rules/([^/]+))", [&p](const Request& req, Response& res) {
    p.rules().remove_rule(req.matches[1].str());
    p.save_rules();
    res.status = 204;
  });

  srv.Post("/rules:parse", [](const Request& req, Response& res) {
    std::string_view text = req.body;
    while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.remove_suffix(1);
    if (text.find('\n') != std::string_view::npos) {
      throw Error(ErrorCode::SyntaxError, "expected a single rule line");
    }
    try {
      const auto rule = rules::parse_rule(text);
      json out = rules::to_json(rule);
      out["dsl"] = rules::format_rule(rule);
      send_json(res, out);
    } catch (const Error& e) {
      json body = error_body(e.code(), e.what(), e.detail());
      if (e.position()) {
        body["line"] = e.position()->line;
        body["column"] = e.position()->column;
      }
      send_json(res, body, http_status(e.code()));
    }
  });

  // --- presence ---
  srv.Post("/scans", [&p](const Request& req, Response& res) {
    const auto n = p.presence().ingest_scan(presence::scan_from_json(parse_body(req)));
    send_json(res, json{{"appended", n}});
  });

  srv.Post("/resolve", [&p](const Request& req, Response& res) {
    const auto scan = presence::scan_from_json(parse_body(req));
    validate(scan);
    json out = json::array();
    for (const auto& a : p.resolve(scan)) out.push_back(rules::to_json(a));
    send_json(res, out);
  });

  srv.Get("/stats/heatmap", [&p](const Request& req, Response& res) {
    std::optional<MacAddress> mac;
    if (auto m = param(req, "mac")) mac = MacAddress::parse(*m);
    const Timestamp from = parse_time_arg(required(req, "from"));
    const Timestamp to = parse_time_arg(required(req, "to"));
    Seconds bucket = presence::kDefaultBucket;
    if (auto b = param(req, "bucket")) bucket = Seconds{int_param(*b, "bucket")};
    const auto cells = p.presence().heat_map(mac, from, to, bucket);
    if (wants_csv(req)) {
      std::ostringstream csv;
      presence::write_heat_map_csv(csv, cells);
      res.set_content(csv.str(), "text/csv");
      return;
    }
    json out = json::array();
    for (const auto& c : cells) out.push_back(presence::to_json(c));
    send_json(res, out);
  });

  srv.Get("/stats/dwell", [&p](const Request& req, Response& res) {
    const auto mac = MacAddress::parse(required(req, "mac"));
    Seconds gap = presence::kDefaultSessionGap;
    if (auto g = param(req, "gap")) gap = Seconds{int_param(*g, "gap")};
    json out = json::array();
    for (const auto& s : p.presence().dwell_sessions(mac, gap)) out.push_back(presence::to_json(s));
    send_json(res, out);
  });

  srv.Get("/stats/live", [&p](const Request& req, Response& res) {
    const Metric metric = metric_param(required(req, "metric"));
    const auto mac = MacAddress::parse(required(req, "mac"));
    const Seconds window{int_param(required(req, "window"), "window")};
    const Timestamp at = param(req, "at") ? parse_time_arg(*param(req, "at")) : now_utc();
    json out;
    out["metric"] = std::string(to_string(metric));
    out["mac"] = mac.str();
    out["window_s"] = window.count();
    out["at"] = format_rfc3339(at);
    out["value"] = p.presence().live_metric(metric, mac, window, at);
    send_json(res, out);
  });

  srv.Get("/config", [](const Request&, Response& res) {
    json out;
    out["propagation"] = simulator::to_json(simulator::PropagationParams{});
    out["interference_radius_m"] = registry::kDefaultInterferenceRadiusM;
    out["heatmap_bucket_s"] = presence::kDefaultBucket.count();
    out["session_gap_s"] = presence::kDefaultSessionGap.count();
    send_json(res, out);
  });
}

}  // namespace proxweb::service
