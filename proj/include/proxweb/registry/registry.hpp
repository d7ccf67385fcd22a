#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <utility>
#include <vector>

#include "proxweb/core/geometry.hpp"
#include "proxweb/core/mac.hpp"
#include "proxweb/core/time.hpp"
#include "proxweb/core/types.hpp"

namespace proxweb::registry {

enum class Mobility { Fixed, Movable };

std::string_view to_string(Mobility m) noexcept;
std::optional<Mobility> parse_mobility(std::string_view text) noexcept;

using Metadata = std::vector<std::pair<std::string, std::string>>;
// A key with no value removes that key.
using MetadataPatch = std::vector<std::pair<std::string, std::optional<std::string>>>;

struct WirelessNode {
  MacAddress mac;
  Protocol protocol = Protocol::Ble;
  std::string owner;
  std::string venue_id;
  std::optional<Point> position;  // only for FIXED nodes
  Mobility mobility = Mobility::Fixed;
  std::optional<int> wifi_channel;  // present iff protocol == WIFI
  Metadata metadata;
  Timestamp registered_at{};

  friend bool operator==(const WirelessNode&, const WirelessNode&) = default;
};

// Throws Error{ChannelMismatch | InvalidChannel | InvalidPlacement}.
void validate(const WirelessNode& node);

struct NodeFilter {
  std::optional<std::string> owner;
  std::optional<std::string> venue_id;
  std::optional<Protocol> protocol;
  std::optional<Mobility> mobility;

  bool matches(const WirelessNode& node) const;
};

// --- 2.4 GHz spectrum ---------------------------------------------------

struct Band {
  int low_mhz = 0;
  int high_mhz = 0;

  bool contains(int mhz) const noexcept { return low_mhz <= mhz && mhz <= high_mhz; }
  friend bool operator==(const Band&, const Band&) = default;
};

// BLE advertising channels 37, 38, 39.
inline constexpr std::array<int, 3> kBleAdvertisingMhz{2402, 2426, 2480};
inline constexpr int kWifiHalfWidthMhz = 11;
inline constexpr double kDefaultInterferenceRadiusM = 25.0;

// Occupied 22 MHz band of a 2.4 GHz Wi-Fi channel. Throws Error{InvalidChannel}.
Band wifi_occupied_band(int channel);

struct InterferencePair {
  MacAddress beacon_mac;
  MacAddress ap_mac;
  double distance_m = 0.0;
  std::vector<int> overlap_mhz;

  friend bool operator==(const InterferencePair&, const InterferencePair&) = default;
};

// Pure report over a node list; Registry::interference_report delegates here.
std::vector<InterferencePair> interference_pairs(
    const std::vector<WirelessNode>& venue_nodes, double radius_m,
    const std::map<MacAddress, Point>& position_overrides);

// --- registry -----------------------------------------------------------

// In-process catalog of wireless nodes. Readers share a lock; writers are
// serialized, so every read observes whole nodes.
class Registry {
 public:
  using Clock = std::function<Timestamp()>;

  explicit Registry(Clock clock = now_utc);

  // Stamps registered_at from the registry clock.
  // Throws Error{DuplicateMac | ChannelMismatch | InvalidChannel | InvalidPlacement}.
  WirelessNode register_node(WirelessNode node);

  // Throws Error{UnknownMac}.
  WirelessNode update_metadata(MacAddress mac, const MetadataPatch& patch);

  std::optional<WirelessNode> find(MacAddress mac) const;

  // Sorted ascending by mac.
  std::vector<WirelessNode> list_nodes(const NodeFilter& filter = {}) const;

  // Throws Error{InvalidRange} when radius_m is not positive.
  std::vector<InterferencePair> interference_report(
      const std::string& venue_id, double radius_m = kDefaultInterferenceRadiusM,
      const std::map<MacAddress, Point>& position_overrides = {}) const;

  std::size_t size() const;

  // One JSON object per line, fields in snapshot order.
  void export_snapshot(std::ostream& out) const;
  // Replaces the whole catalog, or nothing: throws Error{CorruptSnapshot}
  // naming the first bad line.
  void import_snapshot(std::istream& in);

 private:
  Clock clock_;
  mutable std::shared_mutex mu_;
  std::map<MacAddress, WirelessNode> nodes_;
};

}  // namespace proxweb::registry
