#include "proxweb/simulator/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <unordered_map>

#include "proxweb/core/error.hpp"

namespace proxweb::simulator {

double rssi_at(double distance_m, const PropagationParams& params, double noise_db) {
  const double d = std::max(distance_m, 1.0);
  return params.p0_dbm - 10.0 * params.path_loss_exponent * std::log10(d) + noise_db;
}

double max_range_m(const PropagationParams& params) {
  return std::pow(10.0, (params.p0_dbm - params.sensitivity_dbm) /
                            (10.0 * params.path_loss_exponent));
}

Point position_at(const MobileEntity& entity, double t_s) {
  const auto& path = entity.path;
  if (path.empty()) return {};
  if (path.size() == 1 || t_s <= 0.0) return path.front();

  double total = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) total += distance(path[i - 1], path[i]);
  if (total <= 0.0) return path.front();

  double travel = entity.speed_mps * t_s;
  if (entity.loop) {
    travel = std::fmod(travel, total);
  } else if (travel >= total) {
    return path.back();
  }

  for (std::size_t i = 1; i < path.size(); ++i) {
    const double seg = distance(path[i - 1], path[i]);
    if (travel <= seg && seg > 0.0) {
      const double f = travel / seg;
      return {path[i - 1].x + f * (path[i].x - path[i - 1].x),
              path[i - 1].y + f * (path[i].y - path[i - 1].y)};
    }
    travel -= seg;
  }
  return path.back();
}

namespace {

[[noreturn]] void invalid(const std::string& path, const std::string& why) {
  throw Error(ErrorCode::InvalidScenario, path + ": " + why, path);
}

void validate_entity(const MobileEntity& e, const std::string& path) {
  if (e.entity_id.empty()) invalid(path + ".entity_id", "must not be empty");
  if (e.path.empty()) invalid(path + ".path", "needs at least one waypoint");
  for (std::size_t i = 0; i < e.path.size(); ++i) {
    if (!std::isfinite(e.path[i].x) || !std::isfinite(e.path[i].y)) {
      invalid(path + ".path[" + std::to_string(i) + "]", "non-finite coordinate");
    }
  }
  if (!(e.speed_mps > 0.0) || !std::isfinite(e.speed_mps)) {
    invalid(path + ".speed_mps", "must be positive");
  }
}

}  // namespace

void validate(const Scenario& s) {
  const auto& p = s.propagation;
  if (!(p.path_loss_exponent > 0.0)) invalid("propagation.n", "must be positive");
  if (!(p.sigma_db >= 0.0)) invalid("propagation.sigma_db", "must be non-negative");
  if (!(p.sensitivity_dbm < p.p0_dbm)) {
    invalid("propagation.sensitivity_dbm", "must be below p0_dbm");
  }
  if (p.sensitivity_dbm < kMinRssiDbm) {
    invalid("propagation.sensitivity_dbm", "must be at least -120 dBm");
  }
  if (s.scan_interval_s <= 0) invalid("scan_interval_s", "must be positive");
  if (s.duration_s <= 0) invalid("duration_s", "must be positive");
  if (s.duration_s < s.scan_interval_s) invalid("duration_s", "must be >= scan_interval_s");

  std::set<std::string> entity_ids;
  for (std::size_t i = 0; i < s.entities.size(); ++i) {
    const auto path = "entities[" + std::to_string(i) + "]";
    validate_entity(s.entities[i], path);
    if (!entity_ids.insert(s.entities[i].entity_id).second) {
      invalid(path + ".entity_id", "duplicate entity '" + s.entities[i].entity_id + "'");
    }
  }
  std::set<std::string> device_ids;
  for (std::size_t i = 0; i < s.devices.size(); ++i) {
    const auto path = "devices[" + std::to_string(i) + "]";
    const auto& d = s.devices[i];
    if (d.device_id.empty()) invalid(path + ".device_id", "must not be empty");
    if (d.device_id.find_first_of(",\r\n") != std::string::npos) {
      invalid(path + ".device_id", "must not contain ',' or line breaks");
    }
    if (!device_ids.insert(d.device_id).second) {
      invalid(path + ".device_id", "duplicate device '" + d.device_id + "'");
    }
    validate_entity(d.motion, path + ".motion");
    if (!entity_ids.insert(d.motion.entity_id).second) {
      invalid(path + ".motion.entity_id", "duplicate entity '" + d.motion.entity_id + "'");
    }
  }

  std::set<MacAddress> macs;
  for (std::size_t i = 0; i < s.nodes.size(); ++i) {
    const auto path = "nodes[" + std::to_string(i) + "]";
    const auto& n = s.nodes[i];
    if (!macs.insert(n.mac).second) invalid(path + ".mac", "duplicate mac " + n.mac.str());
    if (n.wifi_channel && n.protocol != Protocol::Wifi) {
      invalid(path + ".wifi_channel", "only Wi-Fi nodes carry a channel");
    }
    if (n.wifi_channel && (*n.wifi_channel < 1 || *n.wifi_channel > 14)) {
      invalid(path + ".wifi_channel", "must be in 1..14");
    }
    if (const auto* carrier = std::get_if<std::string>(&n.placement)) {
      if (!entity_ids.contains(*carrier)) {
        invalid(path + ".attached_to", "unknown entity '" + *carrier + "'");
      }
    } else {
      const auto& pt = std::get<Point>(n.placement);
      if (!std::isfinite(pt.x) || !std::isfinite(pt.y)) {
        invalid(path + ".position", "non-finite coordinate");
      }
    }
  }
}

std::size_t report_count(const Scenario& s) {
  return s.devices.size() * static_cast<std::size_t>(s.duration_s / s.scan_interval_s + 1);
}

double GaussianNoise::uniform() {
  // 53 random bits -> [0, 1)
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double GaussianNoise::next() {
  if (spare_) {
    const double z = *spare_;
    spare_.reset();
    return z;
  }
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  return r * std::cos(theta);
}

void run(const Scenario& scenario, const std::function<void(const ScanReport&)>& sink) {
  validate(scenario);
  const auto& params = scenario.propagation;

  std::unordered_map<std::string, const MobileEntity*> carriers;
  for (const auto& e : scenario.entities) carriers.emplace(e.entity_id, &e);
  for (const auto& d : scenario.devices) carriers.emplace(d.motion.entity_id, &d.motion);

  std::vector<const ScenarioNode*> nodes;
  for (const auto& n : scenario.nodes) nodes.push_back(&n);
  std::ranges::sort(nodes, {}, [](const ScenarioNode* n) { return n->mac; });

  std::vector<const ScenarioDevice*> devices;
  for (const auto& d : scenario.devices) devices.push_back(&d);
  std::ranges::sort(devices, {}, [](const ScenarioDevice* d) { return d->device_id; });

  GaussianNoise noise(scenario.seed);
  const bool noisy = params.sigma_db > 0.0;
  const std::int64_t ticks = scenario.duration_s / scenario.scan_interval_s;

  std::vector<Point> node_pos(nodes.size());
  for (std::int64_t k = 0; k <= ticks; ++k) {
    const std::int64_t t = k * scenario.scan_interval_s;
    const auto td = static_cast<double>(t);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const auto& placement = nodes[i]->placement;
      node_pos[i] = std::holds_alternative<Point>(placement)
                        ? std::get<Point>(placement)
                        : position_at(*carriers.at(std::get<std::string>(placement)), td);
    }
    for (const auto* device : devices) {
      ScanReport report;
      report.device_id = device->device_id;
      report.timestamp = from_epoch_seconds(t);
      const Point here = position_at(device->motion, td);
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        const double draw = noisy ? params.sigma_db * noise.next() : 0.0;
        const auto* carrier = std::get_if<std::string>(&nodes[i]->placement);
        if (carrier && *carrier == device->motion.entity_id) continue;
        const double rssi = rssi_at(distance(here, node_pos[i]), params, draw);
        if (rssi < params.sensitivity_dbm) continue;
        const auto observed = static_cast<int>(
            std::clamp(std::lround(rssi), static_cast<long>(kMinRssiDbm),
                       static_cast<long>(kMaxRssiDbm)));
        report.observations.push_back({nodes[i]->mac, observed});
      }
      sink(report);
    }
  }
}

std::vector<ScanReport> run(const Scenario& scenario) {
  std::vector<ScanReport> out;
  out.reserve(report_count(scenario));
  run(scenario, [&](const ScanReport& r) { out.push_back(r); });
  return out;
}

}  // namespace proxweb::simulator
