#include <algorithm>
#include <map>
#include <set>
#include <tuple>

#include "proxweb/core/error.hpp"
#include "proxweb/presence/presence.hpp"

namespace proxweb::presence {

std::vector<PresenceRecord> records_for_scan(const ScanReport& report, std::string_view salt) {
  const std::string device_hash = anonymize(report.device_id, salt);

  std::vector<MacAddress> visible;
  visible.reserve(report.observations.size());
  for (const auto& obs : report.observations) visible.push_back(obs.mac);
  std::ranges::sort(visible);

  std::vector<Observation> ordered = report.observations;
  std::ranges::sort(ordered, {}, &Observation::mac);

  std::vector<PresenceRecord> out;
  out.reserve(ordered.size());
  for (const auto& obs : ordered) {
    PresenceRecord rec{report.timestamp, device_hash, obs.mac, obs.rssi_dbm, {}};
    rec.context.reserve(visible.size() - 1);
    for (auto m : visible) {
      if (m != obs.mac) rec.context.push_back(m);
    }
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<HeatMapCell> heat_map(std::span<const PresenceRecord> records,
                                  std::optional<MacAddress> mac, Timestamp from, Timestamp to,
                                  Seconds bucket) {
  if (!(from < to)) throw Error(ErrorCode::InvalidRange, "heat map needs from < to", "from");
  if (bucket.count() <= 0) {
    throw Error(ErrorCode::InvalidRange, "heat map bucket must be positive", "bucket");
  }

  struct Acc {
    std::int64_t visits = 0;
    std::set<std::string_view> devices;
  };
  std::map<std::pair<MacAddress, std::int64_t>, Acc> cells;
  for (const auto& r : records) {
    if (mac && r.mac != *mac) continue;
    if (r.timestamp < from || r.timestamp >= to) continue;
    const std::int64_t k = (r.timestamp - from) / bucket;
    auto& acc = cells[{r.mac, k}];
    ++acc.visits;
    acc.devices.insert(r.device_hash);
  }

  std::vector<HeatMapCell> out;
  out.reserve(cells.size());
  for (const auto& [key, acc] : cells) {
    out.push_back({key.first, from + key.second * bucket, acc.visits,
                   static_cast<std::int64_t>(acc.devices.size())});
  }
  return out;
}

std::vector<DwellSession> dwell_sessions(std::span<const PresenceRecord> records,
                                         MacAddress mac, Seconds gap) {
  if (gap.count() <= 0) throw Error(ErrorCode::InvalidRange, "session gap must be positive", "gap");

  std::vector<std::pair<std::string_view, Timestamp>> seen;
  for (const auto& r : records) {
    if (r.mac == mac) seen.emplace_back(r.device_hash, r.timestamp);
  }
  std::ranges::sort(seen);

  std::vector<DwellSession> out;
  for (std::size_t i = 0; i < seen.size();) {
    std::size_t j = i;
    while (j + 1 < seen.size() && seen[j + 1].first == seen[i].first &&
           seen[j + 1].second - seen[j].second <= gap) {
      ++j;
    }
    out.push_back({std::string(seen[i].first), mac, seen[i].second, seen[j].second});
    i = j + 1;
  }
  return out;
}

std::int64_t live_metric(std::span<const PresenceRecord> records, Metric metric,
                         MacAddress mac, Seconds window, Timestamp at) {
  if (window.count() <= 0) {
    throw Error(ErrorCode::InvalidRange, "metric window must be positive", "window");
  }
  const Timestamp from = at - window;
  std::int64_t visits = 0;
  std::set<std::string_view> devices;
  for (const auto& r : records) {
    if (r.mac != mac || r.timestamp < from || r.timestamp >= at) continue;
    ++visits;
    devices.insert(r.device_hash);
  }
  return metric == Metric::VisitCount ? visits : static_cast<std::int64_t>(devices.size());
}

}  // namespace proxweb::presence
