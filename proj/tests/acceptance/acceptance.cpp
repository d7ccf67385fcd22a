// Prints one PASS/FAIL line per acceptance criterion; exits non-zero if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "commands.hpp"
#include "generators.hpp"
#include "oracles.hpp"
#include "proxweb/presence/presence.hpp"
#include "proxweb/registry/registry.hpp"
#include "proxweb/rules/rules.hpp"
#include "proxweb/service/platform.hpp"
#include "proxweb/simulator/scenario_io.hpp"
#include "proxweb/simulator/simulator.hpp"
#include "scenarios.hpp"
#include "temp_dir.hpp"

using namespace proxweb;

namespace {

struct Verdict {
  bool pass;
  std::string detail;
};

int failures = 0;

void criterion(const char* name, const std::function<Verdict()>& check) {
  Verdict v;
  try {
    v = check();
  } catch (const std::exception& e) {
    v = {false, std::string("threw: ") + e.what()};
  }
  if (!v.pass) ++failures;
  std::printf("[%s] %s: %s\n", v.pass ? "PASS" : "FAIL", name, v.detail.c_str());
  std::fflush(stdout);
}

const std::string kFixtures = PROXWEB_FIXTURES_DIR;

std::string stream_of(const std::vector<ScanReport>& reports) {
  std::string out;
  for (const auto& r : reports) out += format_scan_line(r) + "\n";
  return out;
}

Verdict resolver_oracle() {
  gen::Rng rng(20150801);
  const auto start = std::chrono::steady_clock::now();
  int mismatches = 0;
  for (int i = 0; i < 500; ++i) {
    const auto inst = gen::rule_instance(rng, 10, 20);
    const auto store = gen::load_store(inst);
    if (rules::resolve(inst.scan, *store->snapshot(), inst.provider()) !=
        oracle::resolve(inst.scan, inst.rules, inst.contents, inst.provider())) {
      ++mismatches;
    }
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::ostringstream d;
  d << "500 instances, " << mismatches << " mismatches, " << secs << " s (limit 10 s)";
  return {mismatches == 0 && secs < 10.0, d.str()};
}

Verdict key_value_locality() {
  gen::Rng rng(1);
  int changed = 0;
  for (int trial = 0; trial < 100; ++trial) {
    auto inst = gen::rule_instance(rng, 10, 20);
    const auto before = rules::resolve(inst.scan, *gen::load_store(inst)->snapshot(), inst.provider());
    std::set<MacAddress> present;
    for (const auto& o : inst.scan.observations) present.insert(o.mac);
    for (int k = 0; k < 100; ++k) {
      MacAddress m;
      do {
        m = gen::mac(rng, 64);
      } while (present.contains(m));
      rules::ProximityRule r;
      r.rule_id = "extra-" + std::to_string(k);
      r.trigger_mac = m;
      r.priority = gen::uniform_int(rng, -5, 100);
      r.content_ids = {inst.contents.begin()->first};
      inst.rules.push_back(r);
    }
    if (rules::resolve(inst.scan, *gen::load_store(inst)->snapshot(), inst.provider()) != before) {
      ++changed;
    }
  }
  return {changed == 0, "100 trials x 100 absent-mac rules, " + std::to_string(changed) + " changed"};
}

Verdict heat_map_conservation() {
  gen::Rng rng(2);
  const auto from = from_epoch_seconds(1438387200);
  const auto to = from + Seconds{86400};
  const auto records = gen::presence_records(rng, 1000, from, to);
  std::map<MacAddress, std::int64_t> want;
  for (const auto& r : records) ++want[r.mac];
  int bad = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const Seconds bucket{gen::uniform_int(rng, 1, 86400)};
    std::map<MacAddress, std::int64_t> got;
    for (const auto& c : presence::heat_map(records, std::nullopt, from, to, bucket)) {
      got[c.mac] += c.visit_count;
    }
    if (got != want) ++bad;
  }
  return {bad == 0, "1000 records, 50 random bucket sizes, " + std::to_string(bad) + " mismatches"};
}

Verdict simulator_determinism() {
  const auto scenario = simulator::load_scenario(kFixtures + "/airport.json");
  const auto a = stream_of(simulator::run(scenario));
  const auto b = stream_of(simulator::run(scenario));
  const auto lines = std::count(a.begin(), a.end(), '\n');
  return {a == b && lines == 610, "identical=" + std::string(a == b ? "yes" : "no") +
                                      ", lines=" + std::to_string(lines) + " (expected 610)"};
}

Verdict path_loss() {
  const simulator::PropagationParams p;
  const bool exact = simulator::rssi_at(1, p) == -40.0 && simulator::rssi_at(10, p) == -60.0 &&
                     simulator::rssi_at(100, p) == -80.0;
  const double range = simulator::max_range_m(p);
  const double oracle_range = oracle::range_by_bisection(p.p0_dbm, p.path_loss_exponent, p.sensitivity_dbm);
  const double at_range = simulator::rssi_at(range, p);
  const bool ok = exact && std::abs(range - 316.2) < 0.05 && std::abs(oracle_range - range) < 1e-6 &&
                  std::abs(at_range + 90.0) <= 0.01;
  std::ostringstream d;
  d << "rssi(1,10,100) exact=" << (exact ? "yes" : "no") << ", range=" << range
    << " m, rssi_at(range)=" << at_range << " dBm";
  return {ok, d.str()};
}

Verdict movable_tag() {
  rules::RuleStore store;
  store.put_content({"car-ad", rules::ContentKind::Text, "Rent this car"});
  rules::ProximityRule rule;
  rule.rule_id = "follow-the-car";
  rule.trigger_mac = scenarios::kTagMac;
  rule.content_ids = {"car-ad"};
  store.put_rule(rule);
  const auto expected = scenarios::first_absent_tick_by_brute_force();
  if (!expected) return {false, "brute force found no crossing"};

  std::optional<std::int64_t> first_empty;
  bool early_active = false;
  bool late_all_empty = true;
  for (const auto& r : simulator::run(scenarios::tag_crossing())) {
    const auto acts = rules::resolve(r, *store.snapshot(), {});
    const auto t = epoch_seconds(r.timestamp);
    if (t == 0) early_active = acts.size() == 1 && acts[0].content.content_id == "car-ad";
    if (acts.empty() && !first_empty) first_empty = t;
    if (first_empty && !acts.empty()) late_all_empty = false;
  }
  const bool ok = early_active && late_all_empty && first_empty == expected;
  return {ok, "first empty tick=" + (first_empty ? std::to_string(*first_empty) : "none") +
                  " s, brute force=" + std::to_string(*expected) + " s"};
}

// Three phones walk toward a beacon and enter range one after another.
simulator::Scenario arrivals() {
  simulator::Scenario s;
  const auto beacon = MacAddress::parse("AA:00:00:00:00:01");
  s.nodes.push_back({beacon, Protocol::Ble, std::nullopt, Point{0, 0}});
  int start = 400;
  for (const char* id : {"phone-1", "phone-2", "phone-3"}) {
    s.devices.push_back({id, {id, {{static_cast<double>(start), 0}, {10, 0}}, 5.0, false}});
    start += 200;
  }
  s.scan_interval_s = 10;
  s.duration_s = 300;
  return s;
}

Verdict statistics_in_rules() {
  const auto beacon = MacAddress::parse("AA:00:00:00:00:01");
  service::Platform platform("acceptance");
  platform.rules().put_content({"quiet", rules::ContentKind::Text, "It is quiet here"});
  rules::ProximityRule rule;
  rule.rule_id = "crowd-gate";
  rule.trigger_mac = beacon;
  rule.stat = rules::StatPredicate{Metric::UniqueDevices, Seconds{300}, rules::Comparison::Lt, 3};
  rule.content_ids = {"quiet"};
  platform.rules().put_rule(rule);

  const auto reports = simulator::run(arrivals());
  // The third distinct device's first sighting, found by scanning the stream.
  std::set<std::string> seen;
  std::optional<Timestamp> third;
  for (const auto& r : reports) {
    if (r.observations.empty() || third) continue;
    if (seen.insert(r.device_id).second && seen.size() == 3) third = r.timestamp;
  }
  if (!third) return {false, "fewer than three devices ever saw the beacon"};

  auto active_at = [&](Timestamp at) {
    return !platform.resolve({"probe", at, {{beacon, -50}}}).empty();
  };

  // Ingest tick by tick; before the third arrival the rule stays active.
  bool stayed_active = true;
  std::size_t i = 0;
  for (; i < reports.size() && reports[i].timestamp < *third; ++i) {
    platform.presence().ingest_scan(reports[i]);
    if (!active_at(reports[i].timestamp)) stayed_active = false;
  }
  for (; i < reports.size() && reports[i].timestamp == *third; ++i) {
    platform.presence().ingest_scan(reports[i]);
  }
  // Window [at - 300, at): the third record counts for every at > T3.
  bool flip_exact = true;
  for (std::int64_t dt = -5; dt <= 5; ++dt) {
    if (active_at(*third + Seconds{dt}) != (dt <= 0)) flip_exact = false;
  }
  const bool ok = stayed_active && flip_exact;
  return {ok, "third device first seen at " + format_rfc3339(*third) +
                  "; active for at <= T3, inactive from T3+1s: " + (flip_exact ? "yes" : "no") +
                  "; active before: " + (stayed_active ? "yes" : "no")};
}

Verdict interference_oracle() {
  gen::Rng rng(3);
  int bad = 0;
  std::size_t pairs = 0;
  for (int venue = 0; venue < 100; ++venue) {
    registry::Registry reg;
    const auto nodes = gen::venue_nodes(rng, 50);
    for (const auto& n : nodes) reg.register_node(n);
    const double radius = gen::uniform_real(rng, 1, 50);
    const auto got = reg.interference_report("term-1", radius);
    const auto want = oracle::interference(nodes, "term-1", radius, {});
    pairs += want.size();
    bool same = got.size() == want.size();
    for (std::size_t k = 0; same && k < got.size(); ++k) {
      same = got[k].beacon_mac == want[k].beacon_mac && got[k].ap_mac == want[k].ap_mac &&
             got[k].overlap_mhz == want[k].overlap_mhz &&
             std::abs(got[k].distance_m - want[k].distance_m) <= 1e-9 * (1 + want[k].distance_m);
    }
    if (!same) ++bad;
  }
  return {bad == 0, "100 venues, " + std::to_string(pairs) + " pairs, " + std::to_string(bad) +
                        " mismatching venues"};
}

Verdict pipeline_determinism() {
  std::vector<std::string> csvs;
  bool leaked = false;
  for (int round = 0; round < 2; ++round) {
    testing::TempDir dir;
    const auto scans = (dir / "scans.log").string();
    const auto data = (dir / "data").string();
    std::ostringstream out, err;
    if (cli::run({"sim", "--scenario", kFixtures + "/airport.json", "--out", scans}, out, err) != 0 ||
        cli::run({"ingest", scans, "--data-dir", data}, out, err) != 0) {
      return {false, "pipeline command failed: " + err.str()};
    }
    std::ostringstream csv;
    if (cli::run({"heatmap", "--data-dir", data, "--from", "0", "--to", "601", "--bucket", "60"},
                 csv, err) != 0) {
      return {false, "heatmap failed: " + err.str()};
    }
    csvs.push_back(csv.str());
    for (const auto& entry : std::filesystem::directory_iterator(dir / "data")) {
      if (testing::read_file(entry.path()).find("phone-") != std::string::npos) leaked = true;
    }
    if (csv.str().find("phone-") != std::string::npos) leaked = true;
  }
  const bool same = csvs[0] == csvs[1];
  const auto rows = std::count(csvs[0].begin(), csvs[0].end(), '\n') - 1;
  return {same && !leaked && rows > 0,
          "csv identical=" + std::string(same ? "yes" : "no") + " (" + std::to_string(rows) +
              " rows), raw device id in data dir or csv: " + (leaked ? "yes" : "no")};
}

}  // namespace

int main() {
  criterion("resolver oracle equivalence", resolver_oracle);
  criterion("key-value locality", key_value_locality);
  criterion("heat-map conservation", heat_map_conservation);
  criterion("simulator determinism", simulator_determinism);
  criterion("path-loss checks", path_loss);
  criterion("movable tag end-to-end", movable_tag);
  criterion("statistics-in-rules end-to-end", statistics_in_rules);
  criterion("interference oracle", interference_oracle);
  criterion("pipeline determinism", pipeline_determinism);
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
