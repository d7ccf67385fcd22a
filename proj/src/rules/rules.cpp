#include "proxweb/rules/rules.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <unordered_set>

#include "proxweb/core/error.hpp"
#include "proxweb/rules/codec.hpp"

namespace proxweb::rules {

std::string_view to_string(ContentKind k) noexcept {
  switch (k) {
    case ContentKind::Text: return "TEXT";
    case ContentKind::ImageUri: return "IMAGE_URI";
    case ContentKind::Link: return "LINK";
  }
  return "TEXT";
}

std::optional<ContentKind> parse_content_kind(std::string_view text) noexcept {
  if (text == "TEXT") return ContentKind::Text;
  if (text == "IMAGE_URI") return ContentKind::ImageUri;
  if (text == "LINK") return ContentKind::Link;
  return std::nullopt;
}

std::string_view to_symbol(Comparison c) noexcept {
  switch (c) {
    case Comparison::Lt: return "<";
    case Comparison::Le: return "<=";
    case Comparison::Gt: return ">";
    case Comparison::Ge: return ">=";
  }
  return "<";
}

std::optional<Comparison> parse_comparison(std::string_view text) noexcept {
  if (text == "<" || text == "LT") return Comparison::Lt;
  if (text == "<=" || text == "LE") return Comparison::Le;
  if (text == ">" || text == "GT") return Comparison::Gt;
  if (text == ">=" || text == "GE") return Comparison::Ge;
  return std::nullopt;
}

bool compare(Comparison c, std::int64_t lhs, std::int64_t rhs) noexcept {
  switch (c) {
    case Comparison::Lt: return lhs < rhs;
    case Comparison::Le: return lhs <= rhs;
    case Comparison::Gt: return lhs > rhs;
    case Comparison::Ge: return lhs >= rhs;
  }
  return false;
}

bool evaluate_stat(const StatPredicate& pred, MacAddress mac, Timestamp at,
                   const MetricProvider& stats) {
  const std::int64_t value = stats ? stats(pred.metric, mac, pred.window, at) : 0;
  return compare(pred.cmp, value, pred.threshold);
}

void validate(const ContentChunk& chunk) {
  if (chunk.content_id.empty()) {
    throw Error(ErrorCode::InvalidContent, "content_id must not be empty", "content_id");
  }
  if (chunk.body.empty()) {
    throw Error(ErrorCode::InvalidContent, "content " + chunk.content_id + " has an empty body",
                "body");
  }
}

void validate(const ProximityRule& rule) {
  if (rule.rule_id.empty()) {
    throw Error(ErrorCode::InvalidRule, "rule_id must not be empty", "rule_id");
  }
  if (rule.content_ids.empty()) {
    throw Error(ErrorCode::InvalidRule, "rule " + rule.rule_id + " shows no content",
                "content_ids");
  }
  if (rule.min_rssi_dbm &&
      (*rule.min_rssi_dbm < kMinRssiDbm || *rule.min_rssi_dbm > kMaxRssiDbm)) {
    throw Error(ErrorCode::InvalidThreshold, "min_rssi_dbm outside [-120, 0]", "min_rssi_dbm");
  }
  if (rule.stat) {
    if (rule.stat->window.count() <= 0) {
      throw Error(ErrorCode::InvalidThreshold, "stat window must be positive", "stat.window_s");
    }
    if (rule.stat->threshold < 0) {
      throw Error(ErrorCode::InvalidThreshold, "stat threshold must be non-negative",
                  "stat.threshold");
    }
  }
}

const std::vector<ProximityRule>* RuleSet::rules_for(MacAddress mac) const {
  auto it = by_mac.find(mac);
  return it == by_mac.end() ? nullptr : &it->second;
}

const ContentChunk* RuleSet::content(const std::string& id) const {
  auto it = contents.find(id);
  return it == contents.end() ? nullptr : &it->second;
}

std::vector<Activation> resolve(const ScanReport& scan, const RuleSet& rules,
                                const MetricProvider& stats) {
  struct Match {
    const ProximityRule* rule;
    MacAddress mac;
    int rssi;
  };
  std::vector<Match> matches;
  for (const auto& obs : scan.observations) {
    const auto* bucket = rules.rules_for(obs.mac);
    if (!bucket) continue;
    for (const auto& rule : *bucket) {
      if (!rule.enabled) continue;
      if (rule.min_rssi_dbm && obs.rssi_dbm < *rule.min_rssi_dbm) continue;
      if (rule.stat && !evaluate_stat(*rule.stat, obs.mac, scan.timestamp, stats)) continue;
      matches.push_back({&rule, obs.mac, obs.rssi_dbm});
    }
  }

  std::ranges::sort(matches, [](const Match& a, const Match& b) {
    if (a.rule->priority != b.rule->priority) return a.rule->priority > b.rule->priority;
    if (a.rssi != b.rssi) return a.rssi > b.rssi;
    return a.rule->rule_id < b.rule->rule_id;
  });

  std::vector<Activation> out;
  std::unordered_set<std::string> shown;
  for (const auto& m : matches) {
    for (const auto& id : m.rule->content_ids) {
      const ContentChunk* chunk = rules.content(id);
      if (!chunk || !shown.insert(id).second) continue;
      out.push_back({*chunk, m.mac, m.rssi, m.rule->rule_id});
    }
  }
  return out;
}

namespace {

// Finds and removes a rule by id from whichever bucket holds it.
bool erase_rule(RuleSet& set, const std::string& rule_id) {
  for (auto it = set.by_mac.begin(); it != set.by_mac.end(); ++it) {
    auto& bucket = it->second;
    auto pos = std::ranges::find(bucket, rule_id, &ProximityRule::rule_id);
    if (pos == bucket.end()) continue;
    bucket.erase(pos);
    if (bucket.empty()) set.by_mac.erase(it);
    return true;
  }
  return false;
}

void insert_rule(RuleSet& set, ProximityRule rule) {
  auto& bucket = set.by_mac[rule.trigger_mac];
  auto pos = std::ranges::lower_bound(bucket, rule.rule_id, {}, &ProximityRule::rule_id);
  bucket.insert(pos, std::move(rule));
}

void check_contents(const RuleSet& set, const ProximityRule& rule) {
  for (const auto& id : rule.content_ids) {
    if (!set.contents.contains(id)) {
      throw Error(ErrorCode::UnknownContent,
                  "rule " + rule.rule_id + " references unknown content '" + id + "'", id);
    }
  }
}

}  // namespace

RuleStore::RuleStore() : current_(std::make_shared<const RuleSet>()) {}

std::string RuleStore::put_content(ContentChunk chunk) {
  validate(chunk);
  std::lock_guard lock(mu_);
  auto next = std::make_shared<RuleSet>(*current_);
  std::string id = chunk.content_id;
  next->contents.insert_or_assign(id, std::move(chunk));
  current_ = std::move(next);
  return id;
}

std::string RuleStore::put_rule(ProximityRule rule) {
  validate(rule);
  std::lock_guard lock(mu_);
  check_contents(*current_, rule);
  auto next = std::make_shared<RuleSet>(*current_);
  erase_rule(*next, rule.rule_id);
  std::string id = rule.rule_id;
  insert_rule(*next, std::move(rule));
  current_ = std::move(next);
  return id;
}

void RuleStore::remove_rule(const std::string& rule_id) {
  std::lock_guard lock(mu_);
  auto next = std::make_shared<RuleSet>(*current_);
  if (!erase_rule(*next, rule_id)) {
    throw Error(ErrorCode::UnknownRule, "no rule '" + rule_id + "'", rule_id);
  }
  current_ = std::move(next);
}

std::shared_ptr<const RuleSet> RuleStore::snapshot() const {
  std::lock_guard lock(mu_);
  return current_;
}

std::optional<ProximityRule> RuleStore::find_rule(const std::string& rule_id) const {
  const auto set = snapshot();
  for (const auto& [mac, bucket] : set->by_mac) {
    auto pos = std::ranges::find(bucket, rule_id, &ProximityRule::rule_id);
    if (pos != bucket.end()) return *pos;
  }
  return std::nullopt;
}

std::optional<ContentChunk> RuleStore::find_content(const std::string& content_id) const {
  const auto set = snapshot();
  if (const auto* c = set->content(content_id)) return *c;
  return std::nullopt;
}

std::vector<ProximityRule> RuleStore::rules_for(MacAddress mac) const {
  const auto set = snapshot();
  if (const auto* bucket = set->rules_for(mac)) return *bucket;
  return {};
}

std::vector<ProximityRule> RuleStore::all_rules() const {
  const auto set = snapshot();
  std::vector<ProximityRule> out;
  for (const auto& [mac, bucket] : set->by_mac) out.insert(out.end(), bucket.begin(), bucket.end());
  std::ranges::sort(out, {}, &ProximityRule::rule_id);
  return out;
}

std::vector<ContentChunk> RuleStore::all_contents() const {
  const auto set = snapshot();
  std::vector<ContentChunk> out;
  for (const auto& [id, chunk] : set->contents) out.push_back(chunk);
  std::ranges::sort(out, {}, &ContentChunk::content_id);
  return out;
}

void RuleStore::export_snapshot(std::ostream& contents, std::ostream& rules) const {
  const auto set = snapshot();
  std::vector<const ContentChunk*> chunks;
  for (const auto& [id, chunk] : set->contents) chunks.push_back(&chunk);
  std::ranges::sort(chunks, {}, [](const ContentChunk* c) { return c->content_id; });
  for (const auto* c : chunks) contents << to_json(*c).dump() << '\n';

  std::vector<const ProximityRule*> all;
  for (const auto& [mac, bucket] : set->by_mac) {
    for (const auto& r : bucket) all.push_back(&r);
  }
  std::ranges::sort(all, {}, [](const ProximityRule* r) { return r->rule_id; });
  for (const auto* r : all) rules << to_json(*r).dump() << '\n';
}

void RuleStore::import_snapshot(std::istream& contents, std::istream& rules) {
  RuleSet loaded;
  auto read_lines = [](std::istream& in, const char* what, auto&& handle) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      try {
        handle(json::parse(line));
      } catch (const std::exception& e) {
        throw Error(ErrorCode::CorruptSnapshot,
                    std::string(what) + " snapshot line " + std::to_string(line_no) + ": " +
                        e.what(),
                    {}, SourcePos{line_no, 0});
      }
    }
  };
  read_lines(contents, "content", [&](const json& j) {
    ContentChunk chunk = content_from_json(j);
    validate(chunk);
    if (loaded.contents.contains(chunk.content_id)) {
      throw Error(ErrorCode::InvalidContent, "duplicate content_id " + chunk.content_id);
    }
    loaded.contents.emplace(chunk.content_id, std::move(chunk));
  });
  std::unordered_set<std::string> rule_ids;
  read_lines(rules, "rule", [&](const json& j) {
    ProximityRule rule = rule_from_json(j);
    validate(rule);
    check_contents(loaded, rule);
    if (!rule_ids.insert(rule.rule_id).second) {
      throw Error(ErrorCode::InvalidRule, "duplicate rule_id " + rule.rule_id);
    }
    insert_rule(loaded, std::move(rule));
  });
  std::lock_guard lock(mu_);
  current_ = std::make_shared<const RuleSet>(std::move(loaded));
}

}  // namespace proxweb::rules
