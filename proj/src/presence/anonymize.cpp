#include <openssl/evp.h>
#include <openssl/hmac.h>

#include "proxweb/core/error.hpp"
#include "proxweb/presence/presence.hpp"

namespace proxweb::presence {

std::string anonymize(std::string_view device_id, std::string_view salt) {
  if (salt.empty()) throw Error(ErrorCode::EmptySalt, "anonymization salt must not be empty");

  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int digest_len = 0;
  const auto* out = HMAC(EVP_sha256(), salt.data(), static_cast<int>(salt.size()),
                         reinterpret_cast<const unsigned char*>(device_id.data()),
                         device_id.size(), digest, &digest_len);
  if (!out || digest_len < 8) throw Error(ErrorCode::Internal, "HMAC-SHA256 failed");

  static constexpr char kHex[] = "0123456789abcdef";
  std::string hash(16, '0');
  for (int i = 0; i < 8; ++i) {
    hash[2 * i] = kHex[digest[i] >> 4];
    hash[2 * i + 1] = kHex[digest[i] & 0xF];
  }
  return hash;
}

}  // namespace proxweb::presence
