#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "scc5g/bytes.hpp"
#include "scc5g/certs.hpp"
#include "scc5g/hakf.hpp"
#include "scc5g/hash.hpp"
#include "scc5g/hra.hpp"
#include "scc5g/kem.hpp"
#include "scc5g/sign.hpp"

namespace scc5g::handshake {

enum class Role { Initiator, Responder };

enum class State {
  Idle,
  SentCert,
  AwaitHakfVerdict,
  AwaitPeerCert,
  AwaitOwnVerdict,
  Established,
  Failed,
};

enum class FailReason {
  None,
  ProtocolViolation,  // message type illegal in the current state
  NonceMismatch,      // session id or nonce not constant within the session
  DecodeError,
  BadSignature,
  PeerIdMismatch,
  HakfRejected,     // authority verdict was false
  VerdictTampered,  // sealed verdict failed to authenticate
  DigestMismatch,   // verdict bound to a different request
  LocalFailure,     // own device/key material unusable
};

enum class MsgType : std::uint8_t {
  M1_InitCert = 1,
  M2_VerReq = 2,
  M3_VerResp = 3,
  M4_RespCertAndKem = 4,
  M5_VerReq = 5,
  M6_VerResp = 6,
};

const char* state_name(State s);
const char* fail_reason_name(FailReason r);
const char* msg_type_name(MsgType t);

struct Message {
  MsgType type;
  std::uint64_t session_id = 0;
  std::array<std::uint8_t, 16> nonce{};
  Bytes body;

  Bytes encode() const;
  static Message decode(ByteView in);
};

/// The fail-closed gate: the only (role, state, type) triples a session will
/// process. Everything else transitions to Failed.
bool message_legal(Role role, State state, MsgType type);

struct EndpointConfig {
  std::string user_id;
  const kem::KemParams* params = nullptr;
  kem::KemPublicKey kem_pk;
  kem::KemPrivateKey kem_sk;
  sign::SignKeyPair* sign_kp = nullptr;  // shared, consumed per certificate
  hra::HraDevice* device = nullptr;
  std::optional<std::string> expected_peer_id;
};

/// One endpoint of the six-message mutual-authentication run. Strict state
/// machine: verification failures park the session in Failed permanently.
class Session {
 public:
  Session(Role role, EndpointConfig cfg, Drbg* rng);

  /// Initiator only, from Idle: issues a fresh certificate and produces M1.
  /// Throws Error{StateViolation} when called twice or on a responder.
  Message initiate();

  /// Drives the state machine; returns the outbound messages (possibly
  /// none). Protocol-level problems never throw: they transition to Failed.
  std::vector<Message> on_message(const Message& msg);

  Role role() const { return role_; }
  State state() const { return state_; }
  FailReason fail_reason() const { return reason_; }
  std::uint64_t session_id() const { return session_id_; }
  const std::array<std::uint8_t, 16>& nonce() const { return nonce_; }
  const std::optional<certs::Certificate>& peer_cert() const { return peer_cert_; }
  const std::optional<Digest32>& session_key() const { return session_key_; }
  Digest32 transcript() const { return transcript_.digest(); }
  std::size_t transcript_messages() const { return transcript_count_; }

 private:
  friend struct SessionTestAccess;

  Message make_message(MsgType type, Bytes body);
  void fail(FailReason reason);
  std::vector<Message> handle_m1(const Message& msg);
  std::vector<Message> handle_m3(const Message& msg);
  std::vector<Message> handle_m4(const Message& msg);
  std::vector<Message> handle_m6(const Message& msg);
  void absorb(const Message& msg);

  Role role_;
  State state_ = State::Idle;
  FailReason reason_ = FailReason::None;
  EndpointConfig cfg_;
  Drbg* rng_;

  bool bound_ = false;  // session id + nonce fixed
  std::uint64_t session_id_ = 0;
  std::array<std::uint8_t, 16> nonce_{};

  Sha256 transcript_;
  std::size_t transcript_count_ = 0;

  std::optional<certs::Certificate> own_cert_;
  std::optional<certs::Certificate> peer_cert_;
  std::optional<Digest32> pending_digest_;  // digest of our outstanding request
  Bytes pending_kem_ct_;                    // initiator: ciphertext from M4
  std::optional<Digest32> session_key_;
};

/// KDF(shared secret | nonce | H(initiator cert) | H(responder cert)).
Digest32 derive_session_key(const kem::SharedSecret& ss, const std::array<std::uint8_t, 16>& nonce,
                            const certs::Certificate& initiator_cert,
                            const certs::Certificate& responder_cert);

/// Authority adapter: consumes an M2/M5 verification request and produces
/// the matching sealed M3/M6. Throws on requests it refuses to answer.
Message hakf_respond(const hakf::CertificateDB& db, const Message& request, Drbg& rng);

// In-memory exchange used by the CLI demo, the adversary drills and tests.
struct ExchangeResult {
  State initiator_state = State::Idle;
  State responder_state = State::Idle;
  FailReason initiator_reason = FailReason::None;
  FailReason responder_reason = FailReason::None;
  std::optional<Digest32> initiator_key;
  std::optional<Digest32> responder_key;
  std::size_t messages_delivered = 0;
  std::vector<std::pair<MsgType, std::size_t>> trace;  // delivered (type, bytes)

  bool established() const {
    return initiator_state == State::Established && responder_state == State::Established;
  }
};

/// Interceptor sees every in-flight message; return a replacement to tamper,
/// nullopt to drop it (the exchange then stalls and ends).
using Interceptor = std::function<std::optional<Message>(MsgType leg, const Message& msg)>;

ExchangeResult run_local_handshake(const EndpointConfig& initiator_cfg,
                                   const EndpointConfig& responder_cfg,
                                   const hakf::CertificateDB& db, Drbg& rng,
                                   const Interceptor& interceptor = {});

}  // namespace scc5g::handshake
