#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "scc5g/bytes.hpp"
#include "scc5g/hash.hpp"
#include "scc5g/hra.hpp"
#include "scc5g/kem.hpp"
#include "scc5g/sign.hpp"

namespace scc5g::certs {

// Wire frame unit. A certificate occupies the smallest whole number of
// frames that holds its content; small-profile certificates fit exactly one.
constexpr std::size_t kFrameUnit = 1024;
constexpr std::size_t kMaxUserIdLen = 64;
constexpr std::uint8_t kCertVersion = 0x01;
constexpr std::uint8_t kCompositeTag = 0x01;

struct UserIdentity {
  std::string user_id;
  kem::KemPublicKey kem_pk;
  Bytes sign_pk;
};

/// The composite public key Y: the KEM key and the signature verification
/// key travel together, length-prefixed behind a 1-byte tag.
Bytes encode_composite_key(const kem::KemPublicKey& kem_pk, const Bytes& sign_pk,
                           const kem::KemParams& p);

struct CompositeKeyParts {
  Bytes kem_pk_bytes;
  Bytes sign_pk_bytes;
};
CompositeKeyParts parse_composite_key(ByteView in);  // throws Error{CorruptEncoding}

struct Certificate {
  std::string user_id;
  Bytes public_key_bytes;  // serialized composite Y
  Bytes signature;         // over public_key_bytes
  Digest32 hra_hash{};     // H(f(Y))

  bool operator==(const Certificate&) const = default;
};

/// Binds ID, composite key, signature over the key, and the hashed device
/// response to the key-derived challenge. Consumes one signature leaf.
Certificate issue_certificate(const UserIdentity& identity, sign::SignKeyPair& sign_kp,
                              const hra::HraDevice& dev, const kem::KemParams& p);

/// Signature-level check only; the hra_hash binding is the verifier
/// authority's job.
bool verify_signature(const Certificate& cert);

Bytes encode(const Certificate& cert);
Certificate decode(ByteView in);
Digest32 cert_digest(const Certificate& cert);

/// Number of bytes the certificate starting at `in` occupies on the wire
/// (whole frames). Lets certificates be parsed out of larger bodies.
std::size_t encoded_frame_size(ByteView in);

}  // namespace scc5g::certs
