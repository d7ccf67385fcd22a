#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace proxweb {

// 48-bit hardware address. Canonical text form is `AA:BB:CC:DD:EE:FF`
// (uppercase hex, colon separated); parsing also accepts lowercase digits and
// `-` separators so every ingest path normalizes to one key format.
class MacAddress {
 public:
  constexpr MacAddress() = default;

  static MacAddress from_bits(std::uint64_t bits);
  static std::optional<MacAddress> try_parse(std::string_view text) noexcept;
  // Throws Error{InvalidMac}.
  static MacAddress parse(std::string_view text);

  constexpr std::uint64_t bits() const noexcept { return bits_; }
  std::string str() const;

  friend constexpr auto operator<=>(MacAddress, MacAddress) = default;

 private:
  constexpr explicit MacAddress(std::uint64_t bits) : bits_(bits) {}
  std::uint64_t bits_ = 0;
};

}  // namespace proxweb

template <>
struct std::hash<proxweb::MacAddress> {
  std::size_t operator()(proxweb::MacAddress mac) const noexcept {
    return std::hash<std::uint64_t>{}(mac.bits());
  }
};
