#include "proxweb/core/scan.hpp"

#include <algorithm>
#include <charconv>
#include <unordered_set>

#include "proxweb/core/error.hpp"

namespace proxweb {
namespace {

[[noreturn]] void malformed(std::string_view line, const std::string& why) {
  throw Error(ErrorCode::MalformedRecord, "malformed scan line: " + why,
              std::string(line));
}

}  // namespace

void validate(const ScanReport& report) {
  std::unordered_set<MacAddress> seen;
  for (const auto& obs : report.observations) {
    if (obs.rssi_dbm < kMinRssiDbm || obs.rssi_dbm > kMaxRssiDbm) {
      throw Error(ErrorCode::InvalidRssi,
                  "rssi " + std::to_string(obs.rssi_dbm) + " dBm outside [-120, 0]",
                  obs.mac.str());
    }
    if (!seen.insert(obs.mac).second) {
      throw Error(ErrorCode::DuplicateObservation,
                  "node " + obs.mac.str() + " observed twice in one scan",
                  obs.mac.str());
    }
  }
}

std::string format_scan_line(const ScanReport& report) {
  std::string out = format_rfc3339(report.timestamp);
  out += ',';
  out += report.device_id;
  out += ',';
  bool first = true;
  for (const auto& obs : report.observations) {
    if (!first) out += ';';
    first = false;
    out += obs.mac.str();
    out += ':';
    out += std::to_string(obs.rssi_dbm);
  }
  return out;
}

ScanReport parse_scan_line(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  const auto c1 = line.find(',');
  if (c1 == std::string_view::npos) malformed(line, "expected 3 fields");
  const auto c2 = line.find(',', c1 + 1);
  if (c2 == std::string_view::npos) malformed(line, "expected 3 fields");

  ScanReport report;
  report.timestamp = parse_rfc3339(line.substr(0, c1));
  report.device_id = std::string(line.substr(c1 + 1, c2 - c1 - 1));
  if (report.device_id.empty()) malformed(line, "empty device id");

  std::string_view rest = line.substr(c2 + 1);
  while (!rest.empty()) {
    const auto semi = rest.find(';');
    const std::string_view item = rest.substr(0, semi);
    const auto colon = item.rfind(':');
    if (colon == std::string_view::npos) malformed(line, "observation without rssi");
    int rssi = 0;
    const auto digits = item.substr(colon + 1);
    const auto [ptr, ec] =
        std::from_chars(digits.data(), digits.data() + digits.size(), rssi);
    if (ec != std::errc{} || ptr != digits.data() + digits.size()) {
      malformed(line, "bad rssi '" + std::string(digits) + "'");
    }
    report.observations.push_back({MacAddress::parse(item.substr(0, colon)), rssi});
    if (semi == std::string_view::npos) break;
    rest.remove_prefix(semi + 1);
    if (rest.empty()) malformed(line, "trailing ';'");
  }
  return report;
}

}  // namespace proxweb
