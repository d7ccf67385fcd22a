#include "commands.hpp"

#include <csignal>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "httplib.h"
#include "json.hpp"
#include "proxweb/core/error.hpp"
#include "proxweb/core/scan.hpp"
#include "proxweb/presence/codec.hpp"
#include "proxweb/rules/dsl.hpp"
#include "proxweb/service/platform.hpp"
#include "proxweb/service/service.hpp"
#include "proxweb/simulator/scenario_io.hpp"

namespace proxweb::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

struct Options {
  std::string scenario;
  std::string out_path;
  std::optional<std::uint64_t> seed;
  std::string log_path;
  std::string data_dir;
  std::string url;
  std::string mac;
  std::string from;
  std::string to;
  std::int64_t bucket = presence::kDefaultBucket.count();
  std::int64_t gap = presence::kDefaultSessionGap.count();
  std::string format = "csv";
  std::string rules_path;
  std::string host = "127.0.0.1";
  int port = 8080;
};

httplib::Client make_client(const std::string& url) {
  httplib::Client client(url);
  client.set_connection_timeout(5);
  client.set_read_timeout(30);
  return client;
}

[[noreturn]] void remote_failure(const httplib::Result& res, const std::string& what) {
  if (!res) throw Error(ErrorCode::Internal, what + ": " + httplib::to_string(res.error()));
  std::string message = what + ": HTTP " + std::to_string(res->status);
  try {
    const auto body = json::parse(res->body);
    message += " " + body.value("code", std::string{}) + " " + body.value("message", std::string{});
  } catch (const json::exception&) {
  }
  throw Error(ErrorCode::Internal, message);
}

int cmd_sim(const Options& o, std::ostream& out) {
  auto scenario = simulator::load_scenario(o.scenario);
  if (o.seed) scenario.seed = *o.seed;

  std::ofstream file(o.out_path, std::ios::trunc | std::ios::binary);
  if (!file) throw Error(ErrorCode::Internal, "cannot write " + o.out_path);
  std::size_t count = 0;
  simulator::run(scenario, [&](const ScanReport& r) {
    file << format_scan_line(r) << '\n';
    ++count;
  });
  file.flush();
  if (!file) throw Error(ErrorCode::Internal, "write failed for " + o.out_path);
  out << count << '\n';
  return kExitOk;
}

std::vector<ScanReport> read_scan_log(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MalformedRecord, "cannot read " + path);
  std::vector<ScanReport> reports;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    try {
      reports.push_back(parse_scan_line(line));
      validate(reports.back());
    } catch (const Error& e) {
      throw Error(e.code(), path + ": line " + std::to_string(line_no) + ": " + e.what(),
                  e.detail(), SourcePos{line_no, 0});
    }
  }
  return reports;
}

int cmd_ingest(const Options& o, std::ostream& out) {
  const auto reports = read_scan_log(o.log_path);
  std::size_t total = 0;
  if (!o.data_dir.empty()) {
    const fs::path dir = o.data_dir;
    service::Platform platform(dir, service::resolve_salt({}, dir));
    for (const auto& r : reports) total += platform.presence().ingest_scan(r);
    platform.flush();
  } else {
    auto client = make_client(o.url);
    for (const auto& r : reports) {
      auto res = client.Post("/scans", presence::to_json(r).dump(), "application/json");
      if (!res || res->status != 200) remote_failure(res, "POST /scans");
      total += json::parse(res->body).at("appended").get<std::size_t>();
    }
  }
  out << total << '\n';
  return kExitOk;
}

std::vector<presence::HeatMapCell> fetch_heat_map(const Options& o, std::optional<MacAddress> mac,
                                                  Timestamp from, Timestamp to) {
  if (!o.data_dir.empty()) {
    const fs::path dir = o.data_dir;
    service::Platform platform(dir, service::resolve_salt({}, dir));
    return platform.presence().heat_map(mac, from, to, Seconds{o.bucket});
  }
  httplib::Params params{{"from", std::to_string(epoch_seconds(from))},
                         {"to", std::to_string(epoch_seconds(to))},
                         {"bucket", std::to_string(o.bucket)}};
  if (mac) params.emplace("mac", mac->str());
  auto client = make_client(o.url);
  auto res = client.Get("/stats/heatmap", params, httplib::Headers{{"Accept", "application/json"}});
  if (!res || res->status != 200) remote_failure(res, "GET /stats/heatmap");
  std::vector<presence::HeatMapCell> cells;
  for (const auto& c : json::parse(res->body)) {
    cells.push_back({MacAddress::parse(c.at("mac").get<std::string>()),
                     parse_rfc3339(c.at("bucket_start").get<std::string>()),
                     c.at("visit_count").get<std::int64_t>(),
                     c.at("unique_devices").get<std::int64_t>()});
  }
  return cells;
}

int cmd_heatmap(const Options& o, std::ostream& out) {
  std::optional<MacAddress> mac;
  if (!o.mac.empty()) mac = MacAddress::parse(o.mac);
  const auto cells = fetch_heat_map(o, mac, parse_time_arg(o.from), parse_time_arg(o.to));
  if (o.format == "table") {
    presence::write_heat_map_table(out, cells);
  } else {
    presence::write_heat_map_csv(out, cells);
  }
  return kExitOk;
}

int cmd_dwell(const Options& o, std::ostream& out) {
  const fs::path dir = o.data_dir;
  service::Platform platform(dir, service::resolve_salt({}, dir));
  const auto sessions = platform.presence().dwell_sessions(MacAddress::parse(o.mac), Seconds{o.gap});
  out << "device_hash,mac,start,end,dwell_s\n";
  for (const auto& s : sessions) {
    out << s.device_hash << ',' << s.mac.str() << ',' << format_rfc3339(s.start) << ','
        << format_rfc3339(s.end) << ',' << s.dwell().count() << '\n';
  }
  return kExitOk;
}

int cmd_rules_lint(const Options& o, std::ostream& out, std::ostream& err) {
  std::ifstream in(o.rules_path);
  std::stringstream buf;
  buf << in.rdbuf();
  const auto file = rules::parse_rule_file(buf.str());
  for (const auto& d : file.diagnostics) {
    err << o.rules_path << ":" << d.what() << " [" << code_name(d.code()) << "]\n";
  }
  if (!file.diagnostics.empty()) {
    err << file.diagnostics.size() << " error(s), " << file.rules.size() << " rules ok\n";
    return kExitDomainError;
  }
  out << file.rules.size() << " rules ok\n";
  return kExitOk;
}

int cmd_serve(const Options& o, std::ostream& out) {
  sigset_t stop_signals;
  sigemptyset(&stop_signals);
  sigaddset(&stop_signals, SIGINT);
  sigaddset(&stop_signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &stop_signals, nullptr);

  service::ServiceConfig config;
  config.host = o.host;
  config.port = o.port;
  if (!o.data_dir.empty()) config.data_dir = fs::path(o.data_dir);
  service::Service svc(config);
  svc.start();
  out << "listening on http://" << o.host << ":" << svc.port() << std::endl;

  int sig = 0;
  sigwait(&stop_signals, &sig);
  svc.stop();
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"proxweb: proximity rules, presence analytics and wireless simulation", "proxweb"};
  app.require_subcommand(1);
  Options o;

  auto* sim = app.add_subcommand("sim", "Run a scenario and write the scan stream");
  sim->add_option("--scenario", o.scenario, "Scenario file (JSON)")->required()->check(CLI::ExistingFile);
  sim->add_option("--out", o.out_path, "Output scan stream")->required();
  sim->add_option("--seed", o.seed, "Override the scenario seed");

  auto* ingest = app.add_subcommand("ingest", "Replay a scan stream into local state or a service");
  ingest->add_option("log", o.log_path, "Scan stream file")->required()->check(CLI::ExistingFile);
  auto* ingest_dir = ingest->add_option("--data-dir", o.data_dir, "Local data directory");
  auto* ingest_url = ingest->add_option("--url", o.url, "Service base URL");
  ingest_dir->excludes(ingest_url);

  auto* heatmap = app.add_subcommand("heatmap", "Per-node visit counts by time bucket");
  auto* hm_dir = heatmap->add_option("--data-dir", o.data_dir, "Local data directory");
  auto* hm_url = heatmap->add_option("--url", o.url, "Service base URL");
  hm_dir->excludes(hm_url);
  heatmap->add_option("--mac", o.mac, "Restrict to one node");
  heatmap->add_option("--from", o.from, "Range start (RFC 3339 or epoch seconds)")->required();
  heatmap->add_option("--to", o.to, "Range end, exclusive")->required();
  heatmap->add_option("--bucket", o.bucket, "Bucket size in seconds")->capture_default_str();
  heatmap->add_option("--format", o.format, "csv or table")
      ->check(CLI::IsMember({"csv", "table"}))
      ->capture_default_str();

  auto* dwell = app.add_subcommand("dwell", "Dwell sessions at one node");
  dwell->add_option("--data-dir", o.data_dir, "Local data directory")->required();
  dwell->add_option("--mac", o.mac, "Node MAC")->required();
  dwell->add_option("--gap", o.gap, "Session gap in seconds")->capture_default_str();

  auto* rules_cmd = app.add_subcommand("rules", "Rule file tools");
  rules_cmd->require_subcommand(1);
  auto* lint = rules_cmd->add_subcommand("lint", "Check every rule in a DSL file");
  lint->add_option("path", o.rules_path, "Rule file")->required()->check(CLI::ExistingFile);

  auto* serve = app.add_subcommand("serve", "Run the HTTP API");
  serve->add_option("--port", o.port, "Listen port")->capture_default_str();
  serve->add_option("--host", o.host, "Listen address")->capture_default_str();
  serve->add_option("--data-dir", o.data_dir, "Data directory")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*sim) return cmd_sim(o, out);
    if ((*ingest || *heatmap) && o.data_dir.empty() && o.url.empty()) {
      err << "one of --data-dir or --url is required\n";
      return kExitUsage;
    }
    if (*ingest) return cmd_ingest(o, out);
    if (*heatmap) return cmd_heatmap(o, out);
    if (*dwell) return cmd_dwell(o, out);
    if (*lint) return cmd_rules_lint(o, out, err);
    if (*serve) return cmd_serve(o, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << " [" << code_name(e.code()) << "]\n";
    return kExitDomainError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitDomainError;
  }
  return kExitUsage;
}

}  // namespace proxweb::cli
