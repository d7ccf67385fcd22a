#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "proxweb/core/error.hpp"
#include "proxweb/rules/rules.hpp"

// Rule editor text form, one rule per line:
//
//   IF visible(<MAC>) [AND rssi >= <int>]
//      [AND stat(<visit_count|unique_devices>, <window_s>) <op> <int>]
//      THEN show(<id>[, <id>]*) [PRIORITY <int>] [DISABLED]
//
// with <op> one of < <= > >=. Keywords are case-insensitive on input; the
// canonical form uses single spaces, uppercase keywords and an uppercase MAC,
// and omits PRIORITY when it is 0.
namespace proxweb::rules {

// The DSL carries no rule id; the returned rule has an empty rule_id.
// Throws Error{SyntaxError | InvalidMac | InvalidThreshold}, each positioned at
// `line` and a 1-based column.
ProximityRule parse_rule(std::string_view text, std::size_t line = 1);

std::string format_rule(const ProximityRule& rule);

struct ParsedRuleLine {
  std::size_t line = 0;
  ProximityRule rule;
};

struct RuleFile {
  std::vector<ParsedRuleLine> rules;
  std::vector<Error> diagnostics;
};

// Parses every non-blank, non-comment (`#`) line and keeps going past errors.
RuleFile parse_rule_file(std::string_view text);

}  // namespace proxweb::rules
