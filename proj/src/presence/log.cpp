#include <algorithm>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <unordered_set>

#include "json.hpp"
#include "proxweb/core/error.hpp"
#include "proxweb/core/json_fields.hpp"
#include "proxweb/presence/presence.hpp"

namespace proxweb::presence {

using json = nlohmann::ordered_json;

std::string format_record(const PresenceRecord& record) {
  std::string context;
  for (std::size_t i = 0; i < record.context.size(); ++i) {
    if (i > 0) context += ';';
    context += record.context[i].str();
  }
  json j;
  j["timestamp"] = format_rfc3339(record.timestamp);
  j["device_hash"] = record.device_hash;
  j["mac"] = record.mac.str();
  j["rssi_dbm"] = record.rssi_dbm;
  j["context"] = std::move(context);
  return j.dump();
}

PresenceRecord parse_record(std::string_view line) {
  using namespace json_fields;
  try {
    const json j = json::parse(line);
    PresenceRecord rec;
    rec.timestamp = as_timestamp(require(j, "timestamp"), "timestamp");
    rec.device_hash = as_string(require(j, "device_hash"), "device_hash");
    rec.mac = as_mac(require(j, "mac"), "mac");
    rec.rssi_dbm = static_cast<int>(as_int(require(j, "rssi_dbm"), "rssi_dbm"));
    const std::string ctx = as_string(require(j, "context"), "context");
    std::string_view rest = ctx;
    while (!rest.empty()) {
      const auto semi = rest.find(';');
      rec.context.push_back(MacAddress::parse(rest.substr(0, semi)));
      if (semi == std::string_view::npos) break;
      rest.remove_prefix(semi + 1);
    }
    return rec;
  } catch (const Error& e) {
    throw Error(ErrorCode::MalformedRecord, std::string("bad presence record: ") + e.what());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedRecord, std::string("bad presence record: ") + e.what());
  }
}

void write_heat_map_csv(std::ostream& out, std::span<const HeatMapCell> cells) {
  out << kHeatMapCsvHeader << '\n';
  for (const auto& c : cells) {
    out << c.mac.str() << ',' << format_rfc3339(c.bucket_start) << ',' << c.visit_count << ','
        << c.unique_devices << '\n';
  }
}

void write_heat_map_table(std::ostream& out, std::span<const HeatMapCell> cells) {
  out << std::left << std::setw(19) << "MAC" << std::setw(22) << "BUCKET START" << std::right
      << std::setw(8) << "VISITS" << std::setw(9) << "DEVICES" << '\n';
  for (const auto& c : cells) {
    out << std::left << std::setw(19) << c.mac.str() << std::setw(22)
        << format_rfc3339(c.bucket_start) << std::right << std::setw(8) << c.visit_count
        << std::setw(9) << c.unique_devices << '\n';
  }
}

PresenceLog::PresenceLog(std::string salt) : salt_(std::move(salt)) {
  if (salt_.empty()) throw Error(ErrorCode::EmptySalt, "anonymization salt must not be empty");
}

PresenceLog::PresenceLog(std::string salt, const std::filesystem::path& path)
    : PresenceLog(std::move(salt)) {
  if (std::filesystem::exists(path)) {
    std::ifstream in(path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      try {
        records_.push_back(parse_record(line));
      } catch (const Error& e) {
        throw Error(ErrorCode::CorruptSnapshot,
                    path.string() + " line " + std::to_string(line_no) + ": " + e.what(), {},
                    SourcePos{line_no, 0});
      }
      index(records_.size() - 1);
    }
  }
  sink_.open(path, std::ios::app);
  if (!sink_) {
    throw Error(ErrorCode::Internal, "cannot open presence log " + path.string());
  }
}

void PresenceLog::index(std::size_t record) {
  auto& ids = by_mac_[records_[record].mac];
  const Timestamp t = records_[record].timestamp;
  auto pos = std::upper_bound(ids.begin(), ids.end(), t, [this](Timestamp value, std::size_t i) {
    return value < records_[i].timestamp;
  });
  ids.insert(pos, record);
}

std::size_t PresenceLog::ingest_scan(const ScanReport& report) {
  validate(report);
  auto fresh = records_for_scan(report, salt_);

  std::unique_lock lock(mu_);
  if (sink_.is_open()) {
    for (const auto& r : fresh) sink_ << format_record(r) << '\n';
    sink_.flush();
  }
  for (auto& r : fresh) {
    records_.push_back(std::move(r));
    index(records_.size() - 1);
  }
  return fresh.size();
}

std::size_t PresenceLog::size() const {
  std::shared_lock lock(mu_);
  return records_.size();
}

std::vector<PresenceRecord> PresenceLog::records() const {
  std::shared_lock lock(mu_);
  return records_;
}

std::vector<HeatMapCell> PresenceLog::heat_map(std::optional<MacAddress> mac, Timestamp from,
                                               Timestamp to, Seconds bucket) const {
  std::shared_lock lock(mu_);
  return presence::heat_map(records_, mac, from, to, bucket);
}

std::vector<DwellSession> PresenceLog::dwell_sessions(MacAddress mac, Seconds gap) const {
  std::shared_lock lock(mu_);
  return presence::dwell_sessions(records_, mac, gap);
}

std::int64_t PresenceLog::live_metric(Metric metric, MacAddress mac, Seconds window,
                                      Timestamp at) const {
  if (window.count() <= 0) {
    throw Error(ErrorCode::InvalidRange, "metric window must be positive", "window");
  }
  std::shared_lock lock(mu_);
  auto it = by_mac_.find(mac);
  if (it == by_mac_.end()) return 0;
  const auto& ids = it->second;
  const Timestamp from = at - window;
  auto by_time = [this](std::size_t i, Timestamp t) { return records_[i].timestamp < t; };
  auto lo = std::lower_bound(ids.begin(), ids.end(), from, by_time);
  auto hi = std::lower_bound(lo, ids.end(), at, by_time);
  if (metric == Metric::VisitCount) return hi - lo;
  std::unordered_set<std::string_view> devices;
  for (auto i = lo; i != hi; ++i) devices.insert(records_[*i].device_hash);
  return static_cast<std::int64_t>(devices.size());
}

void PresenceLog::flush() {
  std::unique_lock lock(mu_);
  if (sink_.is_open()) sink_.flush();
}

}  // namespace proxweb::presence
