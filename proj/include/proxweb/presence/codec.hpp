#pragma once

#include "json.hpp"
#include "proxweb/presence/presence.hpp"

namespace proxweb::presence {

using json = nlohmann::ordered_json;

// {"device_id", "timestamp", "observations": [{"mac", "rssi_dbm"}...]}
json to_json(const ScanReport& report);
ScanReport scan_from_json(const json& j);

json to_json(const PresenceRecord& record);
json to_json(const HeatMapCell& cell);
json to_json(const DwellSession& session);

}  // namespace proxweb::presence
