#pragma once

#include <optional>
#include <string_view>

namespace proxweb {

enum class Protocol { Ble, Wifi };

std::string_view to_string(Protocol p) noexcept;  // "BLE" | "WIFI"
std::optional<Protocol> parse_protocol(std::string_view text) noexcept;

// Presence statistics that rule predicates can be gated on.
enum class Metric { VisitCount, UniqueDevices };

std::string_view to_string(Metric m) noexcept;  // "visit_count" | "unique_devices"
// Case-insensitive.
std::optional<Metric> parse_metric(std::string_view text) noexcept;

}  // namespace proxweb
