#include "proxweb/registry/codec.hpp"

#include "proxweb/core/json_fields.hpp"

namespace proxweb::registry {

using namespace json_fields;

json to_json(const WirelessNode& node) {
  json j;
  j["mac"] = node.mac.str();
  j["protocol"] = std::string(to_string(node.protocol));
  j["owner"] = node.owner;
  j["venue_id"] = node.venue_id;
  j["position"] = node.position ? point_json(*node.position) : json(nullptr);
  j["mobility"] = std::string(to_string(node.mobility));
  j["wifi_channel"] = node.wifi_channel ? json(*node.wifi_channel) : json(nullptr);
  json md = json::array();
  for (const auto& [k, v] : node.metadata) md.push_back(json::array({k, v}));
  j["metadata"] = std::move(md);
  j["registered_at"] = format_rfc3339(node.registered_at);
  return j;
}

WirelessNode node_from_json(const json& j) {
  WirelessNode node;
  node.mac = as_mac(require(j, "mac"), "mac");
  const auto proto = as_string(require(j, "protocol"), "protocol");
  if (auto p = parse_protocol(proto)) {
    node.protocol = *p;
  } else {
    shape_error("protocol", "expected BLE or WIFI");
  }
  if (const auto* v = optional_field(j, "owner")) node.owner = as_string(*v, "owner");
  if (const auto* v = optional_field(j, "venue_id")) node.venue_id = as_string(*v, "venue_id");
  if (const auto* v = optional_field(j, "position")) node.position = as_point(*v, "position");
  if (const auto* v = optional_field(j, "mobility")) {
    auto m = parse_mobility(as_string(*v, "mobility"));
    if (!m) shape_error("mobility", "expected FIXED or MOVABLE");
    node.mobility = *m;
  }
  if (const auto* v = optional_field(j, "wifi_channel")) {
    node.wifi_channel = static_cast<int>(as_int(*v, "wifi_channel"));
  }
  if (const auto* v = optional_field(j, "metadata")) {
    if (v->is_array()) {
      for (std::size_t i = 0; i < v->size(); ++i) {
        const auto& kv = (*v)[i];
        const auto path = "metadata[" + std::to_string(i) + "]";
        if (!kv.is_array() || kv.size() != 2) shape_error(path, "expected [key, value]");
        node.metadata.emplace_back(as_string(kv[0], path), as_string(kv[1], path));
      }
    } else if (v->is_object()) {
      for (const auto& [k, val] : v->items()) {
        node.metadata.emplace_back(k, as_string(val, "metadata." + k));
      }
    } else {
      shape_error("metadata", "expected a list of pairs");
    }
  }
  if (const auto* v = optional_field(j, "registered_at")) {
    node.registered_at = as_timestamp(*v, "registered_at");
  }
  return node;
}

json to_json(const InterferencePair& pair) {
  json j;
  j["beacon_mac"] = pair.beacon_mac.str();
  j["ap_mac"] = pair.ap_mac.str();
  j["distance_m"] = pair.distance_m;
  j["overlap_mhz"] = pair.overlap_mhz;
  return j;
}

MetadataPatch patch_from_json(const json& j) {
  if (!j.is_object()) shape_error("$", "expected an object of key -> string|null");
  MetadataPatch patch;
  for (const auto& [k, v] : j.items()) {
    if (v.is_null()) {
      patch.emplace_back(k, std::nullopt);
    } else {
      patch.emplace_back(k, as_string(v, k));
    }
  }
  return patch;
}

}  // namespace proxweb::registry
