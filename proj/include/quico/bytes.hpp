#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace quico {

using Bytes = std::vector<uint8_t>;
using BytesView = std::span<const uint8_t>;

/// 32-byte digest used for transaction ids, header hashes and Merkle nodes.
using Hash32 = std::array<uint8_t, 32>;

/// 32 bytes of key material or derivation input.
using Seed32 = std::array<uint8_t, 32>;

inline constexpr Hash32 kZeroHash{};

/// Error with a stable machine-readable code, e.g. "EmptyLeafSet".
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(code + ": " + what), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

std::string to_hex(BytesView data);
inline std::string to_hex(const Hash32& h) { return to_hex(BytesView{h.data(), h.size()}); }
Bytes from_hex(const std::string& hex);

}  // namespace quico
