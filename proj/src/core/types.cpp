#include "proxweb/core/types.hpp"

#include <algorithm>
#include <cctype>
#include <string>

namespace proxweb {
namespace {

bool iequals(std::string_view a, std::string_view b) {
  return std::ranges::equal(a, b, [](char x, char y) {
    return std::tolower(static_cast<unsigned char>(x)) ==
           std::tolower(static_cast<unsigned char>(y));
  });
}

}  // namespace

std::string_view to_string(Protocol p) noexcept {
  return p == Protocol::Ble ? "BLE" : "WIFI";
}

std::optional<Protocol> parse_protocol(std::string_view text) noexcept {
  if (iequals(text, "BLE")) return Protocol::Ble;
  if (iequals(text, "WIFI")) return Protocol::Wifi;
  return std::nullopt;
}

std::string_view to_string(Metric m) noexcept {
  return m == Metric::VisitCount ? "visit_count" : "unique_devices";
}

std::optional<Metric> parse_metric(std::string_view text) noexcept {
  if (iequals(text, "visit_count")) return Metric::VisitCount;
  if (iequals(text, "unique_devices")) return Metric::UniqueDevices;
  return std::nullopt;
}

}  // namespace proxweb
