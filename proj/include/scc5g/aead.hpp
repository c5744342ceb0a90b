#pragma once

#include <optional>

#include "scc5g/bytes.hpp"
#include "scc5g/hash.hpp"

namespace scc5g {

// AES-256-GCM with an all-zero nonce. Callers must use a fresh key per
// message; every key in this codebase comes from a fresh KEM encapsulation.
Bytes aead_seal(const Digest32& key, ByteView plaintext, ByteView aad);

// Returns nullopt on authentication failure.
std::optional<Bytes> aead_open(const Digest32& key, ByteView sealed, ByteView aad);

}  // namespace scc5g
