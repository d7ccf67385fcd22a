#include "proxweb/registry/registry.hpp"

#include <algorithm>
#include <istream>
#include <mutex>
#include <ostream>

#include "proxweb/core/error.hpp"
#include "proxweb/registry/codec.hpp"

namespace proxweb::registry {

std::string_view to_string(Mobility m) noexcept {
  return m == Mobility::Fixed ? "FIXED" : "MOVABLE";
}

std::optional<Mobility> parse_mobility(std::string_view text) noexcept {
  if (text == "FIXED" || text == "fixed") return Mobility::Fixed;
  if (text == "MOVABLE" || text == "movable") return Mobility::Movable;
  return std::nullopt;
}

void validate(const WirelessNode& node) {
  const std::string mac = node.mac.str();
  if (node.protocol == Protocol::Wifi && !node.wifi_channel) {
    throw Error(ErrorCode::ChannelMismatch, "Wi-Fi node " + mac + " needs a wifi_channel",
                "wifi_channel");
  }
  if (node.protocol == Protocol::Ble && node.wifi_channel) {
    throw Error(ErrorCode::ChannelMismatch,
                "BLE node " + mac + " must not carry a wifi_channel", "wifi_channel");
  }
  if (node.wifi_channel) wifi_occupied_band(*node.wifi_channel);
  if (node.position && node.mobility == Mobility::Movable) {
    throw Error(ErrorCode::InvalidPlacement,
                "movable node " + mac + " cannot have a registry position", "position");
  }
}

bool NodeFilter::matches(const WirelessNode& node) const {
  return (!owner || node.owner == *owner) && (!venue_id || node.venue_id == *venue_id) &&
         (!protocol || node.protocol == *protocol) &&
         (!mobility || node.mobility == *mobility);
}

Band wifi_occupied_band(int channel) {
  if (channel < 1 || channel > 14) {
    throw Error(ErrorCode::InvalidChannel,
                "Wi-Fi channel " + std::to_string(channel) + " outside 1..14",
                "wifi_channel");
  }
  const int center = channel == 14 ? 2484 : 2407 + 5 * channel;
  return {center - kWifiHalfWidthMhz, center + kWifiHalfWidthMhz};
}

std::vector<InterferencePair> interference_pairs(
    const std::vector<WirelessNode>& venue_nodes, double radius_m,
    const std::map<MacAddress, Point>& position_overrides) {
  if (!(radius_m > 0.0)) {
    throw Error(ErrorCode::InvalidRange, "interference radius must be positive", "radius");
  }

  auto position_of = [&](const WirelessNode& n) -> std::optional<Point> {
    if (auto it = position_overrides.find(n.mac); it != position_overrides.end()) {
      return it->second;
    }
    return n.position;
  };

  struct Located {
    const WirelessNode* node;
    Point where;
  };
  std::vector<Located> beacons;
  std::vector<Located> aps;
  for (const auto& n : venue_nodes) {
    const auto p = position_of(n);
    if (!p) continue;
    (n.protocol == Protocol::Ble ? beacons : aps).push_back({&n, *p});
  }
  auto by_mac = [](const Located& a, const Located& b) { return a.node->mac < b.node->mac; };
  std::ranges::sort(beacons, by_mac);
  std::ranges::sort(aps, by_mac);

  std::vector<InterferencePair> out;
  for (const auto& b : beacons) {
    for (const auto& a : aps) {
      const double d = distance(b.where, a.where);
      if (d > radius_m) continue;
      const Band band = wifi_occupied_band(*a.node->wifi_channel);
      std::vector<int> overlap;
      for (int mhz : kBleAdvertisingMhz) {
        if (band.contains(mhz)) overlap.push_back(mhz);
      }
      if (overlap.empty()) continue;
      out.push_back({b.node->mac, a.node->mac, d, std::move(overlap)});
    }
  }
  return out;
}

Registry::Registry(Clock clock) : clock_(std::move(clock)) {}

WirelessNode Registry::register_node(WirelessNode node) {
  validate(node);
  std::unique_lock lock(mu_);
  if (nodes_.contains(node.mac)) {
    throw Error(ErrorCode::DuplicateMac, "node " + node.mac.str() + " already registered",
                node.mac.str());
  }
  node.registered_at = clock_();
  nodes_.emplace(node.mac, node);
  return node;
}

WirelessNode Registry::update_metadata(MacAddress mac, const MetadataPatch& patch) {
  std::unique_lock lock(mu_);
  auto it = nodes_.find(mac);
  if (it == nodes_.end()) {
    throw Error(ErrorCode::UnknownMac, "node " + mac.str() + " is not registered", mac.str());
  }
  Metadata& md = it->second.metadata;
  for (const auto& [key, value] : patch) {
    auto existing = std::ranges::find(md, key, &Metadata::value_type::first);
    if (value) {
      if (existing != md.end()) {
        existing->second = *value;
      } else {
        md.emplace_back(key, *value);
      }
    } else if (existing != md.end()) {
      md.erase(existing);
    }
  }
  return it->second;
}

std::optional<WirelessNode> Registry::find(MacAddress mac) const {
  std::shared_lock lock(mu_);
  if (auto it = nodes_.find(mac); it != nodes_.end()) return it->second;
  return std::nullopt;
}

std::vector<WirelessNode> Registry::list_nodes(const NodeFilter& filter) const {
  std::shared_lock lock(mu_);
  std::vector<WirelessNode> out;
  for (const auto& [mac, node] : nodes_) {
    if (filter.matches(node)) out.push_back(node);
  }
  return out;
}

std::vector<InterferencePair> Registry::interference_report(
    const std::string& venue_id, double radius_m,
    const std::map<MacAddress, Point>& position_overrides) const {
  NodeFilter filter;
  filter.venue_id = venue_id;
  return interference_pairs(list_nodes(filter), radius_m, position_overrides);
}

std::size_t Registry::size() const {
  std::shared_lock lock(mu_);
  return nodes_.size();
}

void Registry::export_snapshot(std::ostream& out) const {
  std::shared_lock lock(mu_);
  for (const auto& [mac, node] : nodes_) {
    out << to_json(node).dump() << '\n';
  }
}

void Registry::import_snapshot(std::istream& in) {
  std::map<MacAddress, WirelessNode> loaded;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fail = [&](const std::string& why) {
      throw Error(ErrorCode::CorruptSnapshot,
                  "node snapshot line " + std::to_string(line_no) + ": " + why, {},
                  SourcePos{line_no, 0});
    };
    try {
      WirelessNode node = node_from_json(json::parse(line));
      validate(node);
      if (!loaded.emplace(node.mac, node).second) fail("duplicate mac " + node.mac.str());
    } catch (const Error& e) {
      if (e.code() == ErrorCode::CorruptSnapshot) throw;
      fail(e.what());
    } catch (const json::exception& e) {
      fail(e.what());
    }
  }
  std::unique_lock lock(mu_);
  nodes_ = std::move(loaded);
}

}  // namespace proxweb::registry
