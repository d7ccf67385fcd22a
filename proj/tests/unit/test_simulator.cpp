#include <algorithm>
#include <cmath>
#include <sstream>

#include "doctest.h"
#include "generators.hpp"
#include "oracles.hpp"
#include "scenarios.hpp"
#include "proxweb/core/error.hpp"
#include "proxweb/simulator/scenario_io.hpp"
#include "proxweb/simulator/simulator.hpp"

using namespace proxweb;
using namespace proxweb::simulator;

namespace {

const MacAddress N = MacAddress::parse("AA:00:00:00:00:01");

Scenario single_node(Point device, double sigma = 0.0) {
  Scenario s;
  s.nodes.push_back({N, Protocol::Ble, std::nullopt, Point{0, 0}});
  s.devices.push_back({"phone", {"phone", {device}, 1.0, false}});
  s.propagation.sigma_db = sigma;
  s.scan_interval_s = 10;
  s.duration_s = 60;
  return s;
}

std::string serialize(const std::vector<ScanReport>& reports) {
  std::string out;
  for (const auto& r : reports) out += format_scan_line(r) + "\n";
  return out;
}

std::string invalid_path(const Scenario& s) {
  try {
    validate(s);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidScenario);
    return e.detail();
  }
  FAIL("expected InvalidScenario");
  return {};
}

Scenario fixture() {
  return load_scenario(std::string(PROXWEB_FIXTURES_DIR) + "/airport.json");
}

}  // namespace

TEST_CASE("rssi_at at the defaults") {
  const PropagationParams p;
  CHECK(rssi_at(1, p) == -40.0);
  CHECK(rssi_at(10, p) == -60.0);
  CHECK(rssi_at(100, p) == -80.0);
  CHECK(rssi_at(0, p) == -40.0);
  CHECK(rssi_at(0.5, p) == -40.0);
  CHECK(rssi_at(10, p, 2.5) == -57.5);
}

TEST_CASE("max range matches a numeric inversion") {
  const PropagationParams p;
  const double oracle_range = oracle::range_by_bisection(-40, 2, -90);
  CHECK(oracle_range == doctest::Approx(316.2).epsilon(1e-3));
  CHECK(max_range_m(p) == doctest::Approx(oracle_range).epsilon(1e-9));
  CHECK(std::abs(rssi_at(max_range_m(p), p) - -90.0) <= 0.01);
  CHECK(std::abs(rssi_at(316.2, p) - -90.0) <= 0.01);
}

TEST_CASE("position_at") {
  const MobileEntity e{"e", {{0, 0}, {100, 0}}, 10, false};
  CHECK(position_at(e, 5) == Point{50, 0});
  CHECK(position_at(e, 20) == Point{100, 0});
  CHECK(position_at(e, 0) == Point{0, 0});
  CHECK(position_at({"s", {{3, 4}}, 1, false}, 1e6) == Point{3, 4});

  const MobileEntity corner{"c", {{0, 0}, {10, 0}, {10, 10}}, 1, false};
  CHECK(position_at(corner, 15) == Point{10, 5});

  const MobileEntity looped{"l", {{0, 0}, {100, 0}}, 10, true};
  CHECK(position_at(looped, 12) == Point{20, 0});

  // Coincident waypoints are a zero-length segment, not a pause.
  const MobileEntity repeat{"r", {{0, 0}, {0, 0}, {10, 0}}, 1, false};
  CHECK(position_at(repeat, 4) == Point{4, 0});
}

TEST_CASE("run examples") {
  SUBCASE("node at 10 m reads -60 in every report") {
    const auto reports = run(single_node({10, 0}));
    CHECK(reports.size() == 7);
    for (const auto& r : reports) {
      REQUIRE(r.observations.size() == 1);
      CHECK(r.observations[0] == Observation{N, -60});
      CHECK(r.device_id == "phone");
    }
    CHECK(reports[0].timestamp == from_epoch_seconds(0));
    CHECK(reports[6].timestamp == from_epoch_seconds(60));
  }
  SUBCASE("device beyond range never sees the node") {
    for (const auto& r : run(single_node({400, 0}))) CHECK(r.observations.empty());
  }
  SUBCASE("the tag drops out at the brute-force tick") {
    const auto reports = run(scenarios::tag_crossing());
    const auto expected = scenarios::first_absent_tick_by_brute_force();
    REQUIRE(expected);
    CHECK(*expected == 40);
    for (const auto& r : reports) {
      const bool visible = !r.observations.empty();
      CHECK(visible == (epoch_seconds(r.timestamp) < *expected));
    }
  }
}

TEST_CASE("reports are ordered by (t, device_id) with sorted observations") {
  const auto s = fixture();
  const auto reports = run(s);
  CHECK(reports.size() == report_count(s));
  CHECK(reports.size() == 610);
  for (std::size_t i = 1; i < reports.size(); ++i) {
    const auto& a = reports[i - 1];
    const auto& b = reports[i];
    CHECK(std::tie(a.timestamp, a.device_id) < std::tie(b.timestamp, b.device_id));
  }
  for (const auto& r : reports) {
    CHECK(std::is_sorted(r.observations.begin(), r.observations.end(),
                         [](const auto& x, const auto& y) { return x.mac < y.mac; }));
    CHECK_NOTHROW(validate(r));
    for (const auto& o : r.observations) CHECK(o.rssi_dbm >= -90);
  }
}

TEST_CASE("runs are byte-identical and the seed only moves noise") {
  auto s = fixture();
  const auto first = serialize(run(s));
  CHECK(first == serialize(run(s)));

  s.seed += 1;
  CHECK(serialize(run(s)) != first);

  s.propagation.sigma_db = 0;
  const auto quiet = serialize(run(s));
  s.seed += 12345;
  CHECK(serialize(run(s)) == quiet);
}

TEST_CASE("a device does not hear the tag on its own entity") {
  Scenario s;
  s.nodes.push_back({N, Protocol::Ble, std::nullopt, std::string("phone")});
  s.devices.push_back({"phone", {"phone", {{0, 0}}, 1.0, false}});
  s.devices.push_back({"other", {"other", {{5, 0}}, 1.0, false}});
  s.scan_interval_s = 10;
  s.duration_s = 10;
  for (const auto& r : run(s)) {
    CHECK(r.observations.empty() == (r.device_id == "phone"));
  }
}

TEST_CASE("rssi does not increase as a device recedes") {
  gen::Rng rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    PropagationParams p;
    p.p0_dbm = gen::uniform_real(rng, -60, -20);
    p.path_loss_exponent = gen::uniform_real(rng, 1.5, 4);
    double d = 0;
    double prev = rssi_at(d, p);
    for (int step = 0; step < 100; ++step) {
      d += gen::uniform_real(rng, 0, 20);
      const double now = rssi_at(d, p);
      CHECK(now <= prev);
      prev = now;
    }
  }

  Scenario s;
  s.nodes.push_back({N, Protocol::Ble, std::nullopt, Point{0, 0}});
  s.devices.push_back({"walker", {"walker", {{0, 0}, {400, 0}}, 3.0, false}});
  s.scan_interval_s = 1;
  s.duration_s = 140;
  int prev_obs = 0;
  for (const auto& r : run(s)) {
    if (r.observations.empty()) {
      prev_obs = -1000;
      continue;
    }
    CHECK(prev_obs != -1000);
    if (r.timestamp != from_epoch_seconds(0)) CHECK(r.observations[0].rssi_dbm <= prev_obs);
    prev_obs = r.observations[0].rssi_dbm;
  }
}

TEST_CASE("swapping node and device gives the same reading") {
  gen::Rng rng(42);
  for (int trial = 0; trial < 50; ++trial) {
    const Point a{gen::uniform_real(rng, -200, 200), gen::uniform_real(rng, -200, 200)};
    const Point b{gen::uniform_real(rng, -200, 200), gen::uniform_real(rng, -200, 200)};
    auto forward = single_node({0, 0});
    forward.nodes[0].placement = a;
    forward.devices[0].motion.path = {b};
    auto backward = forward;
    backward.nodes[0].placement = b;
    backward.devices[0].motion.path = {a};
    CHECK(run(forward) == run(backward));
  }
}

TEST_CASE("report count formula") {
  gen::Rng rng(43);
  for (int trial = 0; trial < 30; ++trial) {
    auto s = single_node({1, 1});
    for (int d = 1; d < gen::uniform_int(rng, 1, 4); ++d) {
      const auto id = "dev" + std::to_string(d);
      s.devices.push_back({id, {id, {{0, 0}}, 1.0, false}});
    }
    s.scan_interval_s = gen::uniform_int(rng, 1, 30);
    s.duration_s = s.scan_interval_s + gen::uniform_int(rng, 0, 300);
    std::size_t n = 0;
    run(s, [&](const ScanReport&) { ++n; });
    CHECK(n == s.devices.size() * static_cast<std::size_t>(s.duration_s / s.scan_interval_s + 1));
    CHECK(n == report_count(s));
  }
}

TEST_CASE("gaussian noise is reproducible and roughly standard") {
  GaussianNoise a(7), b(7);
  double sum = 0, sq = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double x = a.next();
    CHECK(x == b.next());
    sum += x;
    sq += x * x;
  }
  CHECK(std::abs(sum / n) < 0.05);
  CHECK(std::abs(sq / n - 1.0) < 0.05);
}

TEST_CASE("invalid scenarios name the offending field") {
  auto s = single_node({0, 0});
  s.propagation.path_loss_exponent = 0;
  CHECK(invalid_path(s) == "propagation.n");

  s = single_node({0, 0});
  s.propagation.sigma_db = -1;
  CHECK(invalid_path(s) == "propagation.sigma_db");

  s = single_node({0, 0});
  s.propagation.sensitivity_dbm = -30;
  CHECK(invalid_path(s) == "propagation.sensitivity_dbm");

  s = single_node({0, 0});
  s.scan_interval_s = 0;
  CHECK(invalid_path(s) == "scan_interval_s");

  s = single_node({0, 0});
  s.duration_s = 5;
  CHECK(invalid_path(s) == "duration_s");

  s = single_node({0, 0});
  s.nodes.push_back(s.nodes[0]);
  CHECK(invalid_path(s) == "nodes[1].mac");

  s = single_node({0, 0});
  s.nodes[0].placement = std::string("ghost");
  CHECK(invalid_path(s) == "nodes[0].attached_to");

  s = single_node({0, 0});
  s.devices[0].motion.speed_mps = 0;
  CHECK(invalid_path(s) == "devices[0].motion.speed_mps");

  s = single_node({0, 0});
  s.devices[0].motion.path.clear();
  CHECK(invalid_path(s) == "devices[0].motion.path");

  s = single_node({0, 0});
  s.nodes[0].wifi_channel = 6;
  CHECK(invalid_path(s) == "nodes[0].wifi_channel");
}

TEST_CASE("scenario JSON round-trips and reports shape errors") {
  const auto s = fixture();
  const auto again = scenario_from_json(to_json(s));
  CHECK(serialize(run(again)) == serialize(run(s)));
  CHECK(s.nodes.size() == 8);
  CHECK(s.devices.size() == 10);
  CHECK(s.propagation.sigma_db == 2.0);

  auto shape_error = [](const char* text) {
    try {
      scenario_from_json(json::parse(text));
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::InvalidScenario);
      return e.detail();
    }
    FAIL("expected InvalidScenario");
    return std::string();
  };
  CHECK(shape_error(R"({"duration_s": 10})") == "scan_interval_s");
  CHECK(shape_error(R"({"scan_interval_s": 1, "duration_s": 10,
      "nodes": [{"mac": "zz", "position": [0, 0]}]})") == "nodes[0].mac");
  CHECK(shape_error(R"({"scan_interval_s": 1, "duration_s": 10,
      "nodes": [{"mac": "AA:00:00:00:00:01"}]})") == "nodes[0]");
  CHECK(shape_error(R"({"scan_interval_s": 1, "duration_s": 10,
      "devices": [{"device_id": "p", "motion": {"path": [[0, "x"]]}}]})") ==
        "devices[0].motion.path[0][1]");
}
