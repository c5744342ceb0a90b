#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <memory>

#include "scc5g/bytes.hpp"

namespace scc5g {

using Digest32 = std::array<std::uint8_t, 32>;

Digest32 sha256(ByteView data);
Digest32 sha256(std::initializer_list<ByteView> parts);

// Extendable-output functions. Output length is caller-chosen; shorter
// outputs are prefixes of longer ones for the same input.
Bytes shake128(ByteView input, std::size_t out_len);
Bytes shake256(ByteView input, std::size_t out_len);
Bytes shake256(std::initializer_list<ByteView> parts, std::size_t out_len);

// Incremental SHA-256, copyable so intermediate digests can be snapshotted.
class Sha256 {
 public:
  Sha256();
  Sha256(const Sha256& other);
  Sha256& operator=(const Sha256& other);
  ~Sha256();

  void update(ByteView data);
  Digest32 digest() const;  // digest of everything absorbed so far

 private:
  void* ctx_;
};

bool ct_equal(ByteView a, ByteView b);

// Deterministic byte generator over a SHAKE256 stream. Used wherever tests
// or the CLI need reproducible randomness.
class Drbg {
 public:
  explicit Drbg(ByteView seed);
  explicit Drbg(std::uint64_t seed);

  void fill(std::span<std::uint8_t> out);
  Bytes bytes(std::size_t n);
  std::array<std::uint8_t, 32> seed32();
  std::uint64_t next_u64();

 private:
  Bytes seed_;
  std::uint64_t counter_ = 0;
};

void system_random(std::span<std::uint8_t> out);

}  // namespace scc5g
