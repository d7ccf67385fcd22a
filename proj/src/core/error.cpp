#include "proxweb/core/error.hpp"

#include <array>

namespace proxweb {
namespace {

struct CodeEntry {
  ErrorCode code;
  std::string_view name;
};

constexpr std::array kCodes{
    CodeEntry{ErrorCode::DuplicateMac, "DUPLICATE_MAC"},
    CodeEntry{ErrorCode::InvalidMac, "INVALID_MAC"},
    CodeEntry{ErrorCode::ChannelMismatch, "CHANNEL_MISMATCH"},
    CodeEntry{ErrorCode::InvalidChannel, "INVALID_CHANNEL"},
    CodeEntry{ErrorCode::InvalidPlacement, "INVALID_PLACEMENT"},
    CodeEntry{ErrorCode::UnknownMac, "UNKNOWN_MAC"},
    CodeEntry{ErrorCode::UnknownContent, "UNKNOWN_CONTENT"},
    CodeEntry{ErrorCode::UnknownRule, "UNKNOWN_RULE"},
    CodeEntry{ErrorCode::InvalidContent, "INVALID_CONTENT"},
    CodeEntry{ErrorCode::InvalidRule, "INVALID_RULE"},
    CodeEntry{ErrorCode::SyntaxError, "SYNTAX_ERROR"},
    CodeEntry{ErrorCode::InvalidThreshold, "INVALID_THRESHOLD"},
    CodeEntry{ErrorCode::EmptySalt, "EMPTY_SALT"},
    CodeEntry{ErrorCode::InvalidRssi, "INVALID_RSSI"},
    CodeEntry{ErrorCode::DuplicateObservation, "DUPLICATE_OBSERVATION"},
    CodeEntry{ErrorCode::InvalidRange, "INVALID_RANGE"},
    CodeEntry{ErrorCode::InvalidTimestamp, "INVALID_TIMESTAMP"},
    CodeEntry{ErrorCode::MalformedRecord, "MALFORMED_RECORD"},
    CodeEntry{ErrorCode::InvalidScenario, "INVALID_SCENARIO"},
    CodeEntry{ErrorCode::CorruptSnapshot, "CORRUPT_SNAPSHOT"},
    CodeEntry{ErrorCode::PortInUse, "PORT_IN_USE"},
    CodeEntry{ErrorCode::BadRequest, "BAD_REQUEST"},
    CodeEntry{ErrorCode::NotFound, "NOT_FOUND"},
    CodeEntry{ErrorCode::Internal, "INTERNAL"},
};

constexpr auto make_code_list() {
  std::array<ErrorCode, kCodes.size()> out{};
  for (std::size_t i = 0; i < kCodes.size(); ++i) out[i] = kCodes[i].code;
  return out;
}

constexpr auto kCodeList = make_code_list();

}  // namespace

std::string_view code_name(ErrorCode code) noexcept {
  for (const auto& e : kCodes) {
    if (e.code == code) return e.name;
  }
  return "INTERNAL";
}

std::optional<ErrorCode> code_from_name(std::string_view name) noexcept {
  for (const auto& e : kCodes) {
    if (e.name == name) return e.code;
  }
  return std::nullopt;
}

std::span<const ErrorCode> all_error_codes() noexcept { return kCodeList; }

Error::Error(ErrorCode code, const std::string& message, std::string detail,
             std::optional<SourcePos> pos)
    : std::runtime_error(message),
      code_(code),
      detail_(std::move(detail)),
      pos_(pos) {}

}  // namespace proxweb
