#include "proxweb/rules/codec.hpp"

#include "proxweb/core/json_fields.hpp"

namespace proxweb::rules {

using namespace json_fields;

json to_json(const ContentChunk& chunk) {
  json j;
  j["content_id"] = chunk.content_id;
  j["kind"] = std::string(to_string(chunk.kind));
  j["body"] = chunk.body;
  return j;
}

json to_json(const StatPredicate& pred) {
  json j;
  j["metric"] = std::string(to_string(pred.metric));
  j["window_s"] = pred.window.count();
  j["cmp"] = std::string(to_symbol(pred.cmp));
  j["threshold"] = pred.threshold;
  return j;
}

json to_json(const ProximityRule& rule) {
  json j;
  j["rule_id"] = rule.rule_id;
  j["trigger_mac"] = rule.trigger_mac.str();
  j["min_rssi_dbm"] = rule.min_rssi_dbm ? json(*rule.min_rssi_dbm) : json(nullptr);
  j["stat"] = rule.stat ? to_json(*rule.stat) : json(nullptr);
  j["priority"] = rule.priority;
  j["content_ids"] = rule.content_ids;
  j["enabled"] = rule.enabled;
  return j;
}

json to_json(const Activation& activation) {
  json j;
  j["content"] = to_json(activation.content);
  j["via_mac"] = activation.via_mac.str();
  j["rssi_dbm"] = activation.rssi_dbm;
  j["rule_id"] = activation.rule_id;
  return j;
}

ContentChunk content_from_json(const json& j) {
  ContentChunk chunk;
  chunk.content_id = as_string(require(j, "content_id"), "content_id");
  if (const auto* v = optional_field(j, "kind")) {
    auto kind = parse_content_kind(as_string(*v, "kind"));
    if (!kind) shape_error("kind", "expected TEXT, IMAGE_URI or LINK");
    chunk.kind = *kind;
  }
  chunk.body = as_string(require(j, "body"), "body");
  return chunk;
}

ProximityRule rule_from_json(const json& j) {
  ProximityRule rule;
  if (const auto* v = optional_field(j, "rule_id")) rule.rule_id = as_string(*v, "rule_id");
  rule.trigger_mac = as_mac(require(j, "trigger_mac"), "trigger_mac");
  if (const auto* v = optional_field(j, "min_rssi_dbm")) {
    rule.min_rssi_dbm = static_cast<int>(as_int(*v, "min_rssi_dbm"));
  }
  if (const auto* v = optional_field(j, "stat")) {
    StatPredicate pred;
    auto metric = parse_metric(as_string(require(*v, "metric", "stat"), "stat.metric"));
    if (!metric) shape_error("stat.metric", "expected visit_count or unique_devices");
    pred.metric = *metric;
    pred.window = Seconds{as_int(require(*v, "window_s", "stat"), "stat.window_s")};
    auto cmp = parse_comparison(as_string(require(*v, "cmp", "stat"), "stat.cmp"));
    if (!cmp) shape_error("stat.cmp", "expected one of < <= > >=");
    pred.cmp = *cmp;
    pred.threshold = as_int(require(*v, "threshold", "stat"), "stat.threshold");
    rule.stat = pred;
  }
  if (const auto* v = optional_field(j, "priority")) {
    rule.priority = static_cast<int>(as_int(*v, "priority"));
  }
  const auto& ids = require(j, "content_ids");
  if (!ids.is_array()) shape_error("content_ids", "expected a list");
  for (std::size_t i = 0; i < ids.size(); ++i) {
    rule.content_ids.push_back(as_string(ids[i], "content_ids[" + std::to_string(i) + "]"));
  }
  if (const auto* v = optional_field(j, "enabled")) rule.enabled = as_bool(*v, "enabled");
  return rule;
}

}  // namespace proxweb::rules
