#pragma once

#include <map>
#include <optional>
#include <string>

#include "scc5g/bytes.hpp"
#include "scc5g/certs.hpp"
#include "scc5g/hra.hpp"
#include "scc5g/kem.hpp"

namespace scc5g::hakf {

// Home-network database of hashed device images, keyed by user id. Stores
// hashes only; raw responses never reach this side of the network.
class CertificateDB {
 public:
  bool contains(std::string_view user_id) const;
  std::size_t user_count() const { return users_.size(); }
  std::size_t row_count() const;

  /// nullopt means the user is absent, as opposed to present-but-different.
  std::optional<Digest32> lookup(std::string_view user_id, std::uint32_t challenge) const;
  std::optional<unsigned> challenge_bits_of(std::string_view user_id) const;

  Bytes encode() const;
  static CertificateDB decode(ByteView in);

  friend void register_user(CertificateDB& db, const hra::HraImage& image);

 private:
  std::map<std::string, hra::HraImage> users_;
};

/// Ingests one user's image; throws Error{DuplicateUser} on re-registration.
void register_user(CertificateDB& db, const hra::HraImage& image);

struct VerificationRequest {
  certs::Certificate subject_cert;    // the certificate being verified
  certs::Certificate requester_cert;  // identifies the key the reply is sealed to

  Bytes encode() const;
  static VerificationRequest decode(ByteView in);
  Digest32 digest() const;
};

struct VerificationResponse {
  Bytes kem_ct;  // encapsulation to the requester
  Bytes sealed;  // AEAD over (verdict | request digest)

  Bytes encode() const;
  static VerificationResponse decode(ByteView in);
};

/// The verdict computation alone: subject signature valid and the stored
/// hash for the key-derived challenge equals the certificate's hra_hash.
/// Unknown users and hash mismatches are deliberately indistinguishable.
bool evaluate(const CertificateDB& db, const certs::Certificate& subject);

VerificationResponse seal_response(const kem::KemPublicKey& requester_pk, const kem::KemParams& p,
                                   bool verdict, const Digest32& request_digest, ByteView coins32);

/// Opens a sealed response. Throws Error{AuthFailure} when the seal does not
/// authenticate and Error{DigestMismatch} when the bound request digest is
/// not the one the caller sent.
bool open_response(const kem::KemPrivateKey& sk, const kem::KemParams& p,
                   const VerificationResponse& resp, const Digest32& expected_digest);

/// Full verification leg: checks the requester's certificate, evaluates the
/// subject, and seals the verdict to the requester's KEM key.
VerificationResponse verify(const CertificateDB& db, const VerificationRequest& req,
                            ByteView coins32);

}  // namespace scc5g::hakf
