#include <algorithm>
#include <set>
#include <sstream>

#include "doctest.h"
#include "generators.hpp"
#include "oracles.hpp"
#include "proxweb/core/error.hpp"
#include "proxweb/rules/rules.hpp"

using namespace proxweb;
using namespace proxweb::rules;

namespace {

const MacAddress A = MacAddress::parse("AA:00:00:00:00:01");
const MacAddress B = MacAddress::parse("AA:00:00:00:00:02");

ContentChunk text(const std::string& id) { return {id, ContentKind::Text, "about " + id}; }

ProximityRule rule(std::string id, MacAddress mac, std::vector<std::string> content,
                   int priority = 0) {
  ProximityRule r;
  r.rule_id = std::move(id);
  r.trigger_mac = mac;
  r.content_ids = std::move(content);
  r.priority = priority;
  return r;
}

ScanReport scan(std::vector<Observation> obs, std::int64_t t = 1000) {
  return {"device", from_epoch_seconds(t), std::move(obs)};
}

MetricProvider no_stats() {
  return [](Metric, MacAddress, Seconds, Timestamp) -> std::int64_t { return 0; };
}

std::vector<std::string> ids(const std::vector<Activation>& acts) {
  std::vector<std::string> out;
  for (const auto& a : acts) out.push_back(a.content.content_id);
  return out;
}

}  // namespace

TEST_CASE("put/get by key") {
  RuleStore store;
  store.put_content(text("c1"));
  store.put_rule(rule("R1", A, {"c1"}));
  const auto got = store.rules_for(A);
  REQUIRE(got.size() == 1);
  CHECK(got[0].rule_id == "R1");
  CHECK(store.rules_for(B).empty());
}

TEST_CASE("one key holds many rules") {
  RuleStore store;
  store.put_content(text("c1"));
  store.put_content(text("c2"));
  store.put_rule(rule("R2", A, {"c2"}));
  store.put_rule(rule("R1", A, {"c1"}));
  const auto got = store.rules_for(A);
  REQUIRE(got.size() == 2);
  CHECK(got[0].rule_id == "R1");
  CHECK(got[1].rule_id == "R2");
}

TEST_CASE("put_rule rejects dangling content and bad fields") {
  RuleStore store;
  try {
    store.put_rule(rule("R1", A, {"c9"}));
    FAIL("expected UnknownContent");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnknownContent);
    CHECK(e.detail() == "c9");
  }
  store.put_content(text("c1"));
  CHECK_THROWS_AS(store.put_rule(rule("", A, {"c1"})), Error);
  CHECK_THROWS_AS(store.put_rule(rule("R1", A, {})), Error);
  auto bad = rule("R1", A, {"c1"});
  bad.stat = StatPredicate{Metric::VisitCount, Seconds{0}, Comparison::Lt, 1};
  try {
    store.put_rule(bad);
    FAIL("expected InvalidThreshold");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidThreshold);
  }
  CHECK_THROWS_AS(store.put_content(ContentChunk{"c2", ContentKind::Text, ""}), Error);
}

TEST_CASE("put_rule upserts, moving the rule between keys") {
  RuleStore store;
  store.put_content(text("c1"));
  store.put_rule(rule("R1", A, {"c1"}));
  store.put_rule(rule("R1", B, {"c1"}));
  CHECK(store.rules_for(A).empty());
  CHECK(store.rules_for(B).size() == 1);
  CHECK(store.all_rules().size() == 1);
}

TEST_CASE("remove_rule") {
  RuleStore store;
  store.put_content(text("c1"));
  store.put_rule(rule("R1", A, {"c1"}));
  store.remove_rule("R1");
  CHECK(store.rules_for(A).empty());
  try {
    store.remove_rule("R1");
    FAIL("expected UnknownRule");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnknownRule);
  }
}

TEST_CASE("snapshots are isolated from later writes") {
  RuleStore store;
  store.put_content(text("c1"));
  const auto before = store.snapshot();
  store.put_rule(rule("R1", A, {"c1"}));
  CHECK(before->by_mac.empty());
  CHECK(store.snapshot()->rules_for(A) != nullptr);
}

TEST_CASE("resolve examples") {
  RuleStore store;
  for (auto id : {"c1", "c2"}) store.put_content(text(id));

  SUBCASE("direct match") {
    store.put_rule(rule("R1", A, {"c1"}));
    const auto acts = resolve(scan({{A, -50}}), *store.snapshot(), no_stats());
    REQUIRE(acts.size() == 1);
    CHECK(acts[0].content.content_id == "c1");
    CHECK(acts[0].via_mac == A);
    CHECK(acts[0].rssi_dbm == -50);
    CHECK(acts[0].rule_id == "R1");
  }
  SUBCASE("empty scan") {
    store.put_rule(rule("R1", A, {"c1"}));
    CHECK(resolve(scan({}), *store.snapshot(), no_stats()).empty());
  }
  SUBCASE("rssi gate") {
    auto r = rule("R1", A, {"c1"});
    r.min_rssi_dbm = -60;
    store.put_rule(r);
    CHECK(resolve(scan({{A, -70}}), *store.snapshot(), no_stats()).empty());
    CHECK(resolve(scan({{A, -60}}), *store.snapshot(), no_stats()).size() == 1);
  }
  SUBCASE("priority, rssi and dedup ordering") {
    store.put_rule(rule("R1", A, {"c1"}, 0));
    store.put_rule(rule("R2", B, {"c2"}, 5));
    store.put_rule(rule("R3", A, {"c2"}, 5));
    const auto acts = resolve(scan({{A, -50}, {B, -40}}), *store.snapshot(), no_stats());
    REQUIRE(acts.size() == 2);
    CHECK(acts[0].content.content_id == "c2");
    CHECK(acts[0].via_mac == B);
    CHECK(acts[0].rule_id == "R2");
    CHECK(acts[1].content.content_id == "c1");
    CHECK(acts[1].via_mac == A);
  }
  SUBCASE("disabled rules never fire") {
    auto r = rule("R1", A, {"c1"});
    r.enabled = false;
    store.put_rule(r);
    CHECK(resolve(scan({{A, -50}}), *store.snapshot(), no_stats()).empty());
  }
  SUBCASE("unknown macs are ignored") {
    store.put_rule(rule("R1", A, {"c1"}));
    CHECK(ids(resolve(scan({{B, -30}, {A, -80}}), *store.snapshot(), no_stats())) ==
          std::vector<std::string>{"c1"});
  }
}

TEST_CASE("evaluate_stat") {
  const auto at = from_epoch_seconds(1000);
  const StatPredicate lt5{Metric::VisitCount, Seconds{300}, Comparison::Lt, 5};
  CHECK(evaluate_stat(lt5, A, at, no_stats()));

  auto seven = [](Metric, MacAddress, Seconds, Timestamp) -> std::int64_t { return 7; };
  CHECK(evaluate_stat({Metric::VisitCount, Seconds{300}, Comparison::Ge, 5}, A, at, seven));
  CHECK_FALSE(evaluate_stat(lt5, A, at, seven));

  // The provider receives exactly the predicate's window and the scan time.
  Seconds seen_window{};
  Timestamp seen_at{};
  Metric seen_metric = Metric::VisitCount;
  auto spy = [&](Metric m, MacAddress, Seconds w, Timestamp t) -> std::int64_t {
    seen_metric = m;
    seen_window = w;
    seen_at = t;
    return 0;
  };
  evaluate_stat({Metric::UniqueDevices, Seconds{42}, Comparison::Le, 0}, A, at, spy);
  CHECK(seen_metric == Metric::UniqueDevices);
  CHECK(seen_window == Seconds{42});
  CHECK(seen_at == at);
}

TEST_CASE("resolve equals the brute-force oracle") {
  gen::Rng rng(101);
  for (int trial = 0; trial < 300; ++trial) {
    const auto inst = gen::rule_instance(rng);
    const auto store = gen::load_store(inst);
    const auto got = resolve(inst.scan, *store->snapshot(), inst.provider());
    const auto want = oracle::resolve(inst.scan, inst.rules, inst.contents, inst.provider());
    CHECK(got == want);
  }
}

TEST_CASE("output content ids are pairwise distinct") {
  gen::Rng rng(102);
  for (int trial = 0; trial < 200; ++trial) {
    const auto inst = gen::rule_instance(rng);
    const auto store = gen::load_store(inst);
    const auto acts = ids(resolve(inst.scan, *store->snapshot(), inst.provider()));
    const std::set<std::string> unique(acts.begin(), acts.end());
    CHECK(unique.size() == acts.size());
  }
}

TEST_CASE("permuting scan observations or rule insertion order changes nothing") {
  gen::Rng rng(103);
  for (int trial = 0; trial < 200; ++trial) {
    auto inst = gen::rule_instance(rng);
    const auto base = resolve(inst.scan, *gen::load_store(inst)->snapshot(), inst.provider());
    std::shuffle(inst.scan.observations.begin(), inst.scan.observations.end(), rng);
    std::shuffle(inst.rules.begin(), inst.rules.end(), rng);
    CHECK(resolve(inst.scan, *gen::load_store(inst)->snapshot(), inst.provider()) == base);
  }
}

TEST_CASE("raising min_rssi never adds activations") {
  gen::Rng rng(104);
  for (int trial = 0; trial < 200; ++trial) {
    auto inst = gen::rule_instance(rng);
    if (inst.rules.empty()) continue;
    const auto before = ids(resolve(inst.scan, *gen::load_store(inst)->snapshot(), inst.provider()));
    auto& r = inst.rules[gen::uniform_int(rng, 0, static_cast<int>(inst.rules.size()) - 1)];
    r.min_rssi_dbm = std::min(0, r.min_rssi_dbm.value_or(-120) + gen::uniform_int(rng, 1, 20));
    const auto after = ids(resolve(inst.scan, *gen::load_store(inst)->snapshot(), inst.provider()));
    const std::set<std::string> allowed(before.begin(), before.end());
    for (const auto& id : after) CHECK(allowed.contains(id));
  }
}

TEST_CASE("rule store snapshot round-trip") {
  gen::Rng rng(105);
  const auto inst = gen::rule_instance(rng, 10, 20);
  const auto store = gen::load_store(inst);
  std::stringstream contents, rules_text;
  store->export_snapshot(contents, rules_text);
  RuleStore copy;
  copy.import_snapshot(contents, rules_text);
  CHECK(copy.all_rules() == store->all_rules());
  CHECK(copy.all_contents() == store->all_contents());

  std::stringstream no_contents;
  std::stringstream dangling("{\"rule_id\":\"R\",\"trigger_mac\":\"AA:00:00:00:00:01\",\"content_ids\":[\"zz\"]}\n");
  try {
    copy.import_snapshot(no_contents, dangling);
    FAIL("expected CorruptSnapshot");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CorruptSnapshot);
  }
  CHECK(copy.all_rules() == store->all_rules());
}
