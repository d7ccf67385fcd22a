#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "proxweb/core/mac.hpp"
#include "proxweb/core/scan.hpp"
#include "proxweb/core/time.hpp"
#include "proxweb/core/types.hpp"

namespace proxweb::presence {

inline constexpr Seconds kDefaultBucket{900};
inline constexpr Seconds kDefaultSessionGap{60};

// HMAC-SHA256(key = salt, message = device_id), first 8 bytes as lowercase
// hex. Throws Error{EmptySalt}.
std::string anonymize(std::string_view device_id, std::string_view salt);

// One line of the scan web-log: device_hash stands in for the client address
// and context (the other nodes visible in the same scan) for the referrer.
struct PresenceRecord {
  Timestamp timestamp;
  std::string device_hash;
  MacAddress mac;
  int rssi_dbm = 0;
  std::vector<MacAddress> context;  // ascending, excludes mac

  friend bool operator==(const PresenceRecord&, const PresenceRecord&) = default;
};

struct HeatMapCell {
  MacAddress mac;
  Timestamp bucket_start;
  std::int64_t visit_count = 0;
  std::int64_t unique_devices = 0;

  friend bool operator==(const HeatMapCell&, const HeatMapCell&) = default;
};

struct DwellSession {
  std::string device_hash;
  MacAddress mac;
  Timestamp start;
  Timestamp end;

  Seconds dwell() const { return end - start; }
  friend bool operator==(const DwellSession&, const DwellSession&) = default;
};

// Records for one scan, sorted by observed mac. The report must be valid.
std::vector<PresenceRecord> records_for_scan(const ScanReport& report,
                                             std::string_view salt);

// --- analytics over a record snapshot -----------------------------------

// Cells for each (mac, bucket) holding at least one record in [from, to).
// Buckets start at from + k*bucket. Sorted by (mac, bucket_start).
// Throws Error{InvalidRange} unless from < to and bucket > 0.
std::vector<HeatMapCell> heat_map(std::span<const PresenceRecord> records,
                                  std::optional<MacAddress> mac, Timestamp from, Timestamp to,
                                  Seconds bucket);

// Per device, records of `mac` ordered by time and split where the gap to the
// previous record is strictly greater than `gap`. Sorted by (device_hash,
// start). Throws Error{InvalidRange} unless gap > 0.
std::vector<DwellSession> dwell_sessions(std::span<const PresenceRecord> records,
                                         MacAddress mac, Seconds gap);

// Metric for `mac` over [at - window, at). Throws Error{InvalidRange} unless
// window > 0.
std::int64_t live_metric(std::span<const PresenceRecord> records, Metric metric,
                         MacAddress mac, Seconds window, Timestamp at);

// --- persistence formats ------------------------------------------------

// {"timestamp","device_hash","mac","rssi_dbm","context"} with context as a
// ';'-joined mac list.
std::string format_record(const PresenceRecord& record);
// Throws Error{MalformedRecord}.
PresenceRecord parse_record(std::string_view line);

inline constexpr std::string_view kHeatMapCsvHeader = "mac,bucket_start,visit_count,unique_devices";
void write_heat_map_csv(std::ostream& out, std::span<const HeatMapCell> cells);
void write_heat_map_table(std::ostream& out, std::span<const HeatMapCell> cells);

// --- the log ------------------------------------------------------------

// Append-only presence log. One appender at a time; readers see whole
// records only. When backed by a file every ingest is appended and flushed.
class PresenceLog {
 public:
  // Throws Error{EmptySalt}.
  explicit PresenceLog(std::string salt);
  // Loads existing records from `path` (if present) and appends to it.
  // Throws Error{EmptySalt | CorruptSnapshot}.
  PresenceLog(std::string salt, const std::filesystem::path& path);

  PresenceLog(const PresenceLog&) = delete;
  PresenceLog& operator=(const PresenceLog&) = delete;

  // Returns the number of records appended (= observation count).
  // Throws Error{InvalidRssi | DuplicateObservation}.
  std::size_t ingest_scan(const ScanReport& report);

  std::size_t size() const;
  std::vector<PresenceRecord> records() const;

  std::vector<HeatMapCell> heat_map(std::optional<MacAddress> mac, Timestamp from, Timestamp to,
                                    Seconds bucket = kDefaultBucket) const;
  std::vector<DwellSession> dwell_sessions(MacAddress mac,
                                           Seconds gap = kDefaultSessionGap) const;
  std::int64_t live_metric(Metric metric, MacAddress mac, Seconds window, Timestamp at) const;

  void flush();

 private:
  void index(std::size_t record);

  std::string salt_;
  mutable std::shared_mutex mu_;
  std::vector<PresenceRecord> records_;
  // Per node: record indices ordered by timestamp, for window queries.
  std::unordered_map<MacAddress, std::vector<std::size_t>> by_mac_;
  std::ofstream sink_;
};

}  // namespace proxweb::presence
