#include "proxweb/core/mac.hpp"

#include "proxweb/core/error.hpp"

namespace proxweb {
namespace {

int hex_value(char c) noexcept {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  return -1;
}

}  // namespace

MacAddress MacAddress::from_bits(std::uint64_t bits) {
  if (bits >> 48) {
    throw Error(ErrorCode::InvalidMac, "MAC address exceeds 48 bits");
  }
  return MacAddress(bits);
}

std::optional<MacAddress> MacAddress::try_parse(std::string_view text) noexcept {
  if (text.size() != 17) return std::nullopt;
  const char sep = text[2];
  if (sep != ':' && sep != '-') return std::nullopt;
  std::uint64_t bits = 0;
  for (std::size_t octet = 0; octet < 6; ++octet) {
    const std::size_t at = octet * 3;
    if (octet > 0 && text[at - 1] != sep) return std::nullopt;
    const int hi = hex_value(text[at]);
    const int lo = hex_value(text[at + 1]);
    if (hi < 0 || lo < 0) return std::nullopt;
    bits = (bits << 8) | static_cast<std::uint64_t>(hi * 16 + lo);
  }
  return MacAddress(bits);
}

MacAddress MacAddress::parse(std::string_view text) {
  if (auto mac = try_parse(text)) return *mac;
  throw Error(ErrorCode::InvalidMac,
              "invalid MAC address '" + std::string(text) + "'",
              std::string(text));
}

std::string MacAddress::str() const {
  static constexpr char kDigits[] = "0123456789ABCDEF";
  std::string out(17, ':');
  for (int octet = 0; octet < 6; ++octet) {
    const auto byte = static_cast<unsigned>((bits_ >> (8 * (5 - octet))) & 0xFF);
    out[octet * 3] = kDigits[byte >> 4];
    out[octet * 3 + 1] = kDigits[byte & 0xF];
  }
  return out;
}

}  // namespace proxweb
