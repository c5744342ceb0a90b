#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "scc5g/bytes.hpp"
#include "scc5g/hash.hpp"

namespace scc5g::hra {

// Simulated hardware root of authentication. The model is noiseless: a
// device answers the same challenge with the same response, forever, unless
// it has been tampered with, in which case it never answers again.
struct HraDevice {
  std::array<std::uint8_t, 32> device_secret{};  // never serialized
  unsigned challenge_bits = 8;                   // m, challenge space is 2^m
  bool tamper_flag = false;
};

HraDevice make_device(ByteView secret32, unsigned m);

/// Reduces an arbitrary-length public key to a challenge index in [0, 2^m):
/// H(user_id | 0x00 | public_key_bytes) truncated to m bits.
std::uint32_t challenge_of(std::string_view user_id, ByteView public_key_bytes, unsigned m);

/// Keyed response function f(.); throws Error{TamperedDevice} after tamper.
Digest32 respond(const HraDevice& dev, std::uint32_t challenge);

struct HraImage {
  std::string user_id;
  unsigned m = 0;
  std::vector<Digest32> entries;  // entry j = H(respond(dev, j)), 2^m rows

  Bytes encode() const;
  static HraImage decode(ByteView in);
};

/// Walks the whole challenge space and stores only hashed responses.
HraImage enumerate_image(const HraDevice& dev, std::string_view user_id);

/// Permanent: the device value never responds again (self-destruction model).
void set_tampered(HraDevice& dev);

}  // namespace scc5g::hra
