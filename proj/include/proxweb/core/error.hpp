#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

namespace proxweb {

// Closed set of domain errors. The names returned by code_name() are the
// stable wire codes used in API error bodies.
enum class ErrorCode {
  DuplicateMac,
  InvalidMac,
  ChannelMismatch,
  InvalidChannel,
  InvalidPlacement,
  UnknownMac,
  UnknownContent,
  UnknownRule,
  InvalidContent,
  InvalidRule,
  SyntaxError,
  InvalidThreshold,
  EmptySalt,
  InvalidRssi,
  DuplicateObservation,
  InvalidRange,
  InvalidTimestamp,
  MalformedRecord,
  InvalidScenario,
  CorruptSnapshot,
  PortInUse,
  BadRequest,
  NotFound,
  Internal,
};

std::string_view code_name(ErrorCode code) noexcept;
std::optional<ErrorCode> code_from_name(std::string_view name) noexcept;
std::span<const ErrorCode> all_error_codes() noexcept;

struct SourcePos {
  std::size_t line = 0;    // 1-based
  std::size_t column = 0;  // 1-based, 0 when unknown
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string detail = {},
        std::optional<SourcePos> pos = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  // Field path or offending token; empty when not applicable.
  const std::string& detail() const noexcept { return detail_; }
  const std::optional<SourcePos>& position() const noexcept { return pos_; }

 private:
  ErrorCode code_;
  std::string detail_;
  std::optional<SourcePos> pos_;
};

}  // namespace proxweb
