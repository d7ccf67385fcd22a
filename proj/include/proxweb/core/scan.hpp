#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "proxweb/core/mac.hpp"
#include "proxweb/core/time.hpp"

namespace proxweb {

inline constexpr int kMinRssiDbm = -120;
inline constexpr int kMaxRssiDbm = 0;

struct Observation {
  MacAddress mac;
  int rssi_dbm = 0;

  friend bool operator==(const Observation&, const Observation&) = default;
};

// One device's snapshot of visible nodes at an instant.
struct ScanReport {
  std::string device_id;
  Timestamp timestamp;
  std::vector<Observation> observations;

  friend bool operator==(const ScanReport&, const ScanReport&) = default;
};

// Throws Error{InvalidRssi} or Error{DuplicateObservation}.
void validate(const ScanReport& report);

// Scan stream line: `<rfc3339>,<device_id>,<mac>:<rssi>;<mac>:<rssi>...`
// The observation list may be empty. device_id must not contain ',' or a
// line break.
std::string format_scan_line(const ScanReport& report);

// Throws Error{MalformedRecord} (or InvalidMac / InvalidTimestamp).
ScanReport parse_scan_line(std::string_view line);

}  // namespace proxweb
