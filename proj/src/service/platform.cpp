#include "proxweb/service/platform.hpp"

#include <cstdlib>
#include <fstream>
#include <mutex>
#include <random>
#include <sstream>

#include "proxweb/core/error.hpp"

namespace proxweb::service {
namespace fs = std::filesystem;

namespace {

std::string random_salt() {
  std::random_device rd;
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out(32, '0');
  for (auto& c : out) c = kHex[rd() & 0xF];
  return out;
}

void write_atomically(const fs::path& target, const std::string& contents) {
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc | std::ios::binary);
    out << contents;
    out.flush();
    if (!out) throw Error(ErrorCode::Internal, "cannot write " + tmp.string());
  }
  fs::rename(tmp, target);
}

}  // namespace

std::string resolve_salt(const std::string& configured,
                         const std::optional<fs::path>& data_dir) {
  if (const char* env = std::getenv("PROXWEB_SALT"); env && *env) return env;
  if (!configured.empty()) return configured;
  if (data_dir) {
    const fs::path file = *data_dir / kSaltFile;
    if (std::ifstream in(file); in) {
      std::string salt;
      std::getline(in, salt);
      if (!salt.empty()) return salt;
    }
    fs::create_directories(*data_dir);
    const std::string salt = random_salt();
    write_atomically(file, salt + "\n");
    return salt;
  }
  return random_salt();
}

Platform::Platform(std::string salt)
    : presence_(std::make_unique<presence::PresenceLog>(std::move(salt))) {}

Platform::Platform(const fs::path& data_dir, std::string salt) : data_dir_(data_dir) {
  fs::create_directories(data_dir);

  if (std::ifstream in(data_dir / kNodesFile); in) {
    try {
      registry_.import_snapshot(in);
    } catch (const Error& e) {
      throw Error(ErrorCode::CorruptSnapshot,
                  (data_dir / kNodesFile).string() + ": " + e.what(), {}, e.position());
    }
  }

  std::ifstream contents(data_dir / kContentsFile);
  std::ifstream rules(data_dir / kRulesFile);
  if (contents || rules) {
    std::istringstream empty;
    try {
      rules_.import_snapshot(contents ? static_cast<std::istream&>(contents) : empty,
                             rules ? static_cast<std::istream&>(rules) : empty);
    } catch (const Error& e) {
      throw Error(ErrorCode::CorruptSnapshot, data_dir.string() + ": " + e.what(), {},
                  e.position());
    }
  }

  presence_ = std::make_unique<presence::PresenceLog>(std::move(salt), data_dir / kPresenceFile);
}

rules::MetricProvider Platform::metric_provider() const {
  const presence::PresenceLog* log = presence_.get();
  return [log](Metric metric, MacAddress mac, Seconds window, Timestamp at) {
    return log->live_metric(metric, mac, window, at);
  };
}

std::vector<rules::Activation> Platform::resolve(const ScanReport& scan) const {
  const auto snapshot = rules_.snapshot();
  return rules::resolve(scan, *snapshot, metric_provider());
}

void Platform::save_registry() const {
  if (!data_dir_) return;
  std::lock_guard lock(persist_mu_);
  std::ostringstream out;
  registry_.export_snapshot(out);
  write_atomically(*data_dir_ / kNodesFile, out.str());
}

void Platform::save_rules() const {
  if (!data_dir_) return;
  std::lock_guard lock(persist_mu_);
  std::ostringstream contents;
  std::ostringstream rules;
  rules_.export_snapshot(contents, rules);
  write_atomically(*data_dir_ / kContentsFile, contents.str());
  write_atomically(*data_dir_ / kRulesFile, rules.str());
}

void Platform::flush() { presence_->flush(); }

}  // namespace proxweb::service
