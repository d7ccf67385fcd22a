#include "proxweb/presence/codec.hpp"

#include "proxweb/core/json_fields.hpp"

namespace proxweb::presence {

using namespace json_fields;

json to_json(const ScanReport& report) {
  json j;
  j["device_id"] = report.device_id;
  j["timestamp"] = format_rfc3339(report.timestamp);
  json obs = json::array();
  for (const auto& o : report.observations) {
    obs.push_back(json{{"mac", o.mac.str()}, {"rssi_dbm", o.rssi_dbm}});
  }
  j["observations"] = std::move(obs);
  return j;
}

ScanReport scan_from_json(const json& j) {
  ScanReport report;
  report.device_id = as_string(require(j, "device_id"), "device_id");
  report.timestamp = as_timestamp(require(j, "timestamp"), "timestamp");
  if (const auto* obs = optional_field(j, "observations")) {
    if (!obs->is_array()) shape_error("observations", "expected a list");
    for (std::size_t i = 0; i < obs->size(); ++i) {
      const auto path = "observations[" + std::to_string(i) + "]";
      const auto& o = (*obs)[i];
      report.observations.push_back(
          {as_mac(require(o, "mac", path), path + ".mac"),
           static_cast<int>(as_int(require(o, "rssi_dbm", path), path + ".rssi_dbm"))});
    }
  }
  return report;
}

json to_json(const PresenceRecord& record) {
  json j;
  j["timestamp"] = format_rfc3339(record.timestamp);
  j["device_hash"] = record.device_hash;
  j["mac"] = record.mac.str();
  j["rssi_dbm"] = record.rssi_dbm;
  json ctx = json::array();
  for (auto m : record.context) ctx.push_back(m.str());
  j["context"] = std::move(ctx);
  return j;
}

json to_json(const HeatMapCell& cell) {
  json j;
  j["mac"] = cell.mac.str();
  j["bucket_start"] = format_rfc3339(cell.bucket_start);
  j["visit_count"] = cell.visit_count;
  j["unique_devices"] = cell.unique_devices;
  return j;
}

json to_json(const DwellSession& session) {
  json j;
  j["device_hash"] = session.device_hash;
  j["mac"] = session.mac.str();
  j["start"] = format_rfc3339(session.start);
  j["end"] = format_rfc3339(session.end);
  j["dwell_s"] = session.dwell().count();
  return j;
}

}  // namespace proxweb::presence
