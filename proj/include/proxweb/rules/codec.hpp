#pragma once

#include "json.hpp"
#include "proxweb/rules/rules.hpp"

namespace proxweb::rules {

using json = nlohmann::ordered_json;

json to_json(const ContentChunk& chunk);
json to_json(const StatPredicate& pred);
json to_json(const ProximityRule& rule);
json to_json(const Activation& activation);

ContentChunk content_from_json(const json& j);
// Omitted fields take the DSL defaults: priority 0, enabled, no predicates.
ProximityRule rule_from_json(const json& j);

}  // namespace proxweb::rules
