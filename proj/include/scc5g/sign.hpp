#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "scc5g/bytes.hpp"

namespace scc5g::sign {

// Stateful hash-based scheme: a Merkle tree over Winternitz one-time keys
// (16-byte chain values, 4-bit digits). scheme_id reserves room for external
// signature plug-ins behind the same byte-level interface.
constexpr std::uint8_t kSchemeWm16 = 0x01;

constexpr unsigned kUnitBytes = 16;
constexpr unsigned kDigitBits = 4;
constexpr unsigned kMsgDigits = 2 * kUnitBytes;  // 32 message digits
constexpr unsigned kChecksumDigits = 3;
constexpr unsigned kChains = kMsgDigits + kChecksumDigits;

struct SignKeyPair {
  std::uint8_t scheme_id = kSchemeWm16;
  Bytes public_key;  // scheme_id(1) | height(1) | salt(16) | root(16)
  std::array<std::uint8_t, 32> seed{};
  unsigned height = 0;
  std::uint32_t next_leaf = 0;

  std::uint32_t remaining_signatures() const { return (1u << height) - next_leaf; }

  // Merkle levels, bottom-up; derived from seed and rebuilt on load.
  std::vector<std::vector<std::array<std::uint8_t, kUnitBytes>>> tree;
};

struct Signature {
  std::uint8_t scheme_id = kSchemeWm16;
  std::uint32_t leaf_index = 0;
  Bytes bytes;  // scheme_id(1) | leaf(4) | ots(35*16) | path(height*16)
};

std::size_t signature_size(unsigned height);

SignKeyPair sign_keygen(ByteView seed32, unsigned height = 10);

/// Consumes one leaf; throws Error{ExhaustedKey} once all 2^height leaves
/// are spent.
Signature sign(SignKeyPair& kp, ByteView message);

/// Strict verifier: malformed input of any kind returns false, never throws.
bool verify(ByteView public_key, ByteView message, ByteView signature);

}  // namespace scc5g::sign
