#include "proxweb/simulator/scenario_io.hpp"

#include <fstream>

#include "proxweb/core/error.hpp"
#include "proxweb/core/json_fields.hpp"

namespace proxweb::simulator {
namespace {

using namespace json_fields;

[[noreturn]] void invalid(const std::string& path, const std::string& why) {
  throw Error(ErrorCode::InvalidScenario, path + ": " + why, path);
}

const json& field(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) invalid(path.empty() ? "$" : path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) invalid(path.empty() ? key : path + "." + key, "missing field");
  return *it;
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) invalid(path, "expected a number");
  return v.get<double>();
}

std::int64_t integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) invalid(path, "expected an integer");
  return v.get<std::int64_t>();
}

std::string text(const json& v, const std::string& path) {
  if (!v.is_string()) invalid(path, "expected a string");
  return v.get<std::string>();
}

Point point(const json& v, const std::string& path) {
  if (v.is_array() && v.size() == 2) {
    return {number(v[0], path + "[0]"), number(v[1], path + "[1]")};
  }
  return {number(field(v, "x", path), path + ".x"), number(field(v, "y", path), path + ".y")};
}

const json& array(const json& v, const std::string& path) {
  if (!v.is_array()) invalid(path, "expected a list");
  return v;
}

MobileEntity entity(const json& j, const std::string& path, const std::string& default_id) {
  MobileEntity e;
  if (const auto* v = optional_field(j, "entity_id")) {
    e.entity_id = text(*v, path + ".entity_id");
  } else {
    e.entity_id = default_id;
  }
  const auto& wps = array(field(j, "path", path), path + ".path");
  for (std::size_t i = 0; i < wps.size(); ++i) {
    e.path.push_back(point(wps[i], path + ".path[" + std::to_string(i) + "]"));
  }
  if (const auto* v = optional_field(j, "speed_mps")) e.speed_mps = number(*v, path + ".speed_mps");
  if (const auto* v = optional_field(j, "loop")) {
    if (!v->is_boolean()) invalid(path + ".loop", "expected a boolean");
    e.loop = v->get<bool>();
  }
  return e;
}

json entity_json(const MobileEntity& e) {
  json j;
  j["entity_id"] = e.entity_id;
  json path = json::array();
  for (const auto& p : e.path) path.push_back(point_json(p));
  j["path"] = std::move(path);
  j["speed_mps"] = e.speed_mps;
  j["loop"] = e.loop;
  return j;
}

}  // namespace

Scenario scenario_from_json(const json& j) {
  if (!j.is_object()) invalid("$", "expected an object");
  Scenario s;

  if (const auto* nodes = optional_field(j, "nodes")) {
    array(*nodes, "nodes");
    for (std::size_t i = 0; i < nodes->size(); ++i) {
      const auto path = "nodes[" + std::to_string(i) + "]";
      const auto& nj = (*nodes)[i];
      ScenarioNode n;
      const auto mac_text = text(field(nj, "mac", path), path + ".mac");
      auto mac = MacAddress::try_parse(mac_text);
      if (!mac) invalid(path + ".mac", "invalid MAC address '" + mac_text + "'");
      n.mac = *mac;
      if (const auto* v = optional_field(nj, "protocol")) {
        auto proto = parse_protocol(text(*v, path + ".protocol"));
        if (!proto) invalid(path + ".protocol", "expected BLE or WIFI");
        n.protocol = *proto;
      }
      if (const auto* v = optional_field(nj, "wifi_channel")) {
        n.wifi_channel = static_cast<int>(integer(*v, path + ".wifi_channel"));
      }
      const auto* pos = optional_field(nj, "position");
      const auto* carrier = optional_field(nj, "attached_to");
      if ((pos != nullptr) == (carrier != nullptr)) {
        invalid(path, "needs exactly one of position or attached_to");
      }
      if (pos) {
        n.placement = point(*pos, path + ".position");
      } else {
        n.placement = text(*carrier, path + ".attached_to");
      }
      s.nodes.push_back(std::move(n));
    }
  }

  if (const auto* ents = optional_field(j, "entities")) {
    array(*ents, "entities");
    for (std::size_t i = 0; i < ents->size(); ++i) {
      s.entities.push_back(entity((*ents)[i], "entities[" + std::to_string(i) + "]", {}));
    }
  }

  if (const auto* devs = optional_field(j, "devices")) {
    array(*devs, "devices");
    for (std::size_t i = 0; i < devs->size(); ++i) {
      const auto path = "devices[" + std::to_string(i) + "]";
      ScenarioDevice d;
      d.device_id = text(field((*devs)[i], "device_id", path), path + ".device_id");
      d.motion = entity(field((*devs)[i], "motion", path), path + ".motion", d.device_id);
      s.devices.push_back(std::move(d));
    }
  }

  if (const auto* prop = optional_field(j, "propagation")) {
    auto& p = s.propagation;
    if (const auto* v = optional_field(*prop, "p0_dbm")) p.p0_dbm = number(*v, "propagation.p0_dbm");
    if (const auto* v = optional_field(*prop, "n")) p.path_loss_exponent = number(*v, "propagation.n");
    if (const auto* v = optional_field(*prop, "sigma_db")) p.sigma_db = number(*v, "propagation.sigma_db");
    if (const auto* v = optional_field(*prop, "sensitivity_dbm")) {
      p.sensitivity_dbm = number(*v, "propagation.sensitivity_dbm");
    }
  }

  s.scan_interval_s = integer(field(j, "scan_interval_s", ""), "scan_interval_s");
  s.duration_s = integer(field(j, "duration_s", ""), "duration_s");
  if (const auto* v = optional_field(j, "seed")) {
    if (!v->is_number_integer()) invalid("seed", "expected an integer");
    s.seed = v->is_number_unsigned() ? v->get<std::uint64_t>()
                                     : static_cast<std::uint64_t>(v->get<std::int64_t>());
  }

  validate(s);
  return s;
}

json to_json(const PropagationParams& p) {
  json j;
  j["p0_dbm"] = p.p0_dbm;
  j["n"] = p.path_loss_exponent;
  j["sigma_db"] = p.sigma_db;
  j["sensitivity_dbm"] = p.sensitivity_dbm;
  return j;
}

json to_json(const Scenario& s) {
  json j;
  json nodes = json::array();
  for (const auto& n : s.nodes) {
    json nj;
    nj["mac"] = n.mac.str();
    nj["protocol"] = std::string(to_string(n.protocol));
    if (n.wifi_channel) nj["wifi_channel"] = *n.wifi_channel;
    if (const auto* p = std::get_if<Point>(&n.placement)) {
      nj["position"] = point_json(*p);
    } else {
      nj["attached_to"] = std::get<std::string>(n.placement);
    }
    nodes.push_back(std::move(nj));
  }
  j["nodes"] = std::move(nodes);
  json ents = json::array();
  for (const auto& e : s.entities) ents.push_back(entity_json(e));
  j["entities"] = std::move(ents);
  json devs = json::array();
  for (const auto& d : s.devices) {
    devs.push_back(json{{"device_id", d.device_id}, {"motion", entity_json(d.motion)}});
  }
  j["devices"] = std::move(devs);
  j["propagation"] = to_json(s.propagation);
  j["scan_interval_s"] = s.scan_interval_s;
  j["duration_s"] = s.duration_s;
  j["seed"] = s.seed;
  return j;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidScenario, "cannot read scenario " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidScenario, path.string() + ": " + e.what());
  }
  return scenario_from_json(j);
}

}  // namespace proxweb::simulator
