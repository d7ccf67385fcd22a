#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "proxweb/core/geometry.hpp"
#include "proxweb/core/mac.hpp"
#include "proxweb/core/scan.hpp"
#include "proxweb/core/types.hpp"

namespace proxweb::simulator {

// Log-distance path loss with optional log-normal shadowing.
struct PropagationParams {
  double p0_dbm = -40.0;           // RSSI at the 1 m reference distance
  double path_loss_exponent = 2.0;
  double sigma_db = 0.0;           // shadowing std-dev; Gaussian draws when > 0
  double sensitivity_dbm = -90.0;  // receiver threshold

  friend bool operator==(const PropagationParams&, const PropagationParams&) = default;
};

// p0 - 10 n log10(max(d, 1)) + noise
double rssi_at(double distance_m, const PropagationParams& params, double noise_db = 0.0);

// Distance at which the noise-free signal falls to the sensitivity threshold.
double max_range_m(const PropagationParams& params);

// A thing that moves along waypoints at constant speed: a phone, a car.
struct MobileEntity {
  std::string entity_id;
  std::vector<Point> path;
  double speed_mps = 1.0;
  bool loop = false;  // restart from the first waypoint instead of holding the last
};

// Piecewise-linear position at t_s seconds after the start.
Point position_at(const MobileEntity& entity, double t_s);

struct ScenarioNode {
  MacAddress mac;
  Protocol protocol = Protocol::Ble;
  std::optional<int> wifi_channel;
  // Fixed position, or the entity_id the tag rides on.
  std::variant<Point, std::string> placement;
};

struct ScenarioDevice {
  std::string device_id;
  MobileEntity motion;
};

struct Scenario {
  std::vector<ScenarioNode> nodes;
  std::vector<MobileEntity> entities;  // carriers for movable tags
  std::vector<ScenarioDevice> devices;
  PropagationParams propagation;
  std::int64_t scan_interval_s = 10;
  std::int64_t duration_s = 600;
  std::uint64_t seed = 0;
};

// Throws Error{InvalidScenario} with the offending field path as detail.
void validate(const Scenario& scenario);

// Number of reports run() emits: devices * (floor(duration / interval) + 1).
std::size_t report_count(const Scenario& scenario);

// Standard normal draws for shadowing: std::mt19937_64 seeded with the
// scenario seed, 53-bit uniforms, Box-Muller pairs (cosine branch first).
// Fully specified so output is reproducible across standard libraries.
class GaussianNoise {
 public:
  explicit GaussianNoise(std::uint64_t seed) : engine_(seed) {}
  double next();

 private:
  double uniform();

  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

// Emits reports for t = 0, interval, 2*interval, ... <= duration, ordered by
// (t, device_id); observations sorted by mac. Timestamps count from the epoch.
// A device does not observe tags riding on its own entity. When sigma > 0,
// one noise draw is taken per (tick, device, node) in that order whether or
// not the node ends up visible, so the seed never perturbs geometry.
void run(const Scenario& scenario, const std::function<void(const ScanReport&)>& sink);
std::vector<ScanReport> run(const Scenario& scenario);

}  // namespace proxweb::simulator
