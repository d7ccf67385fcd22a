#pragma once

#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "proxweb/core/scan.hpp"
#include "proxweb/presence/presence.hpp"
#include "proxweb/registry/registry.hpp"
#include "proxweb/rules/rules.hpp"

namespace proxweb::service {

// Files kept under a data directory.
inline constexpr const char* kNodesFile = "nodes.jsonl";
inline constexpr const char* kContentsFile = "contents.jsonl";
inline constexpr const char* kRulesFile = "rules.jsonl";
inline constexpr const char* kPresenceFile = "presence.log";
inline constexpr const char* kSaltFile = "salt";

// Salt precedence: PROXWEB_SALT, then `configured`, then <data_dir>/salt,
// then a fresh random salt (written to <data_dir>/salt when there is one).
std::string resolve_salt(const std::string& configured,
                         const std::optional<std::filesystem::path>& data_dir);

// The registry, rule store and presence log wired together. Shared by the
// HTTP service and the CLI's local mode.
class Platform {
 public:
  // Purely in memory.
  explicit Platform(std::string salt);
  // Loads snapshots and the presence log from data_dir, creating it if needed.
  // Throws Error{CorruptSnapshot}.
  Platform(const std::filesystem::path& data_dir, std::string salt);

  registry::Registry& registry() { return registry_; }
  const registry::Registry& registry() const { return registry_; }
  rules::RuleStore& rules() { return rules_; }
  const rules::RuleStore& rules() const { return rules_; }
  presence::PresenceLog& presence() { return *presence_; }
  const presence::PresenceLog& presence() const { return *presence_; }

  // presence live_metric bound as the rule statistics provider.
  rules::MetricProvider metric_provider() const;
  std::vector<rules::Activation> resolve(const ScanReport& scan) const;

  // Atomic rewrite of the snapshot files; no-ops when in memory.
  void save_registry() const;
  void save_rules() const;
  void flush();

  const std::optional<std::filesystem::path>& data_dir() const { return data_dir_; }

 private:
  std::optional<std::filesystem::path> data_dir_;
  registry::Registry registry_;
  rules::RuleStore rules_;
  std::unique_ptr<presence::PresenceLog> presence_;
  mutable std::mutex persist_mu_;
};

}  // namespace proxweb::service
