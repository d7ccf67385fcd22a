#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "proxweb/core/mac.hpp"
#include "proxweb/core/scan.hpp"
#include "proxweb/core/time.hpp"
#include "proxweb/core/types.hpp"

namespace proxweb::rules {

enum class ContentKind { Text, ImageUri, Link };

std::string_view to_string(ContentKind k) noexcept;  // TEXT | IMAGE_URI | LINK
std::optional<ContentKind> parse_content_kind(std::string_view text) noexcept;

struct ContentChunk {
  std::string content_id;
  ContentKind kind = ContentKind::Text;
  std::string body;  // text payload or URI

  friend bool operator==(const ContentChunk&, const ContentChunk&) = default;
};

enum class Comparison { Lt, Le, Gt, Ge };

std::string_view to_symbol(Comparison c) noexcept;  // "<" "<=" ">" ">="
std::optional<Comparison> parse_comparison(std::string_view text) noexcept;
bool compare(Comparison c, std::int64_t lhs, std::int64_t rhs) noexcept;

// Evaluated for the rule's trigger mac over the trailing half-open window
// [at - window, at) ending at the scan timestamp.
struct StatPredicate {
  Metric metric = Metric::VisitCount;
  Seconds window{0};
  Comparison cmp = Comparison::Lt;
  std::int64_t threshold = 0;

  friend bool operator==(const StatPredicate&, const StatPredicate&) = default;
};

// IF visible(trigger_mac) [AND rssi >= min] [AND stat(...)] THEN show(content...)
struct ProximityRule {
  std::string rule_id;
  MacAddress trigger_mac;
  std::optional<int> min_rssi_dbm;
  std::optional<StatPredicate> stat;
  int priority = 0;  // higher wins
  std::vector<std::string> content_ids;
  bool enabled = true;

  friend bool operator==(const ProximityRule&, const ProximityRule&) = default;
};

struct Activation {
  ContentChunk content;
  MacAddress via_mac;
  int rssi_dbm = 0;
  std::string rule_id;

  friend bool operator==(const Activation&, const Activation&) = default;
};

// Answers a statistics query: metric value for `mac` over [at - window, at).
using MetricProvider =
    std::function<std::int64_t(Metric metric, MacAddress mac, Seconds window, Timestamp at)>;

bool evaluate_stat(const StatPredicate& pred, MacAddress mac, Timestamp at,
                   const MetricProvider& stats);

// Throws Error{InvalidContent}.
void validate(const ContentChunk& chunk);
// Checks the rule's own fields (not content references).
// Throws Error{InvalidRule | InvalidThreshold}.
void validate(const ProximityRule& rule);

// Immutable view of the store: rules keyed by trigger mac, each bucket sorted
// by rule_id, plus the content table.
struct RuleSet {
  std::unordered_map<MacAddress, std::vector<ProximityRule>> by_mac;
  std::unordered_map<std::string, ContentChunk> contents;

  const std::vector<ProximityRule>* rules_for(MacAddress mac) const;
  const ContentChunk* content(const std::string& id) const;
};

// Activations for a scan. Rules match when enabled, their trigger mac is in
// the scan, the observed rssi meets min_rssi_dbm and the stat predicate holds
// at scan.timestamp. Order: priority desc, observed rssi desc, rule_id asc,
// then position in the rule's content list; each content_id at most once.
// Macs without rules are ignored. Pure: safe to call concurrently.
std::vector<Activation> resolve(const ScanReport& scan, const RuleSet& rules,
                                const MetricProvider& stats);

// Key-value store of content chunks and rules. Writes are serialized and
// publish a fresh immutable RuleSet; readers grab the current one.
class RuleStore {
 public:
  RuleStore();

  // Upsert by id. Throws Error{InvalidContent}.
  std::string put_content(ContentChunk chunk);
  // Upsert by id. Throws Error{UnknownContent | InvalidRule | InvalidThreshold}.
  std::string put_rule(ProximityRule rule);
  // Throws Error{UnknownRule}.
  void remove_rule(const std::string& rule_id);

  std::optional<ProximityRule> find_rule(const std::string& rule_id) const;
  std::optional<ContentChunk> find_content(const std::string& content_id) const;
  // Sorted by rule_id.
  std::vector<ProximityRule> rules_for(MacAddress mac) const;
  std::vector<ProximityRule> all_rules() const;
  // Sorted by content_id.
  std::vector<ContentChunk> all_contents() const;

  std::shared_ptr<const RuleSet> snapshot() const;

  // Both streams are written from one snapshot.
  void export_snapshot(std::ostream& contents, std::ostream& rules) const;
  // Replaces the whole store, or nothing. Throws Error{CorruptSnapshot}.
  void import_snapshot(std::istream& contents, std::istream& rules);

 private:
  mutable std::mutex mu_;
  std::shared_ptr<const RuleSet> current_;
};

}  // namespace proxweb::rules
