#include "scc5g/handshake.hpp"

#include <cstring>

#include "scc5g/errors.hpp"

namespace scc5g::handshake {

namespace {

ByteView label(const char* s) {
  return ByteView(reinterpret_cast<const std::uint8_t*>(s), std::strlen(s));
}

// Pulls the KEM public key out of a certificate's composite key field.
kem::KemPublicKey peer_kem_key(const certs::Certificate& cert, const kem::KemParams*& p_out) {
  const certs::CompositeKeyParts parts = certs::parse_composite_key(view(cert.public_key_bytes));
  if (parts.kem_pk_bytes.empty()) throw Error(ErrorClass::CorruptEncoding, "empty KEM key");
  const kem::KemParams* p = kem::params_for_profile(parts.kem_pk_bytes[0] & 0x0f);
  if (p == nullptr || (parts.kem_pk_bytes[0] & 0xf0) != 0x10)
    throw Error(ErrorClass::CorruptEncoding, "unknown KEM profile");
  p_out = p;
  return kem::KemPublicKey::decode(view(parts.kem_pk_bytes), *p);
}

}  // namespace

const char* state_name(State s) {
  switch (s) {
    case State::Idle: return "Idle";
    case State::SentCert: return "SentCert";
    case State::AwaitHakfVerdict: return "AwaitHakfVerdict";
    case State::AwaitPeerCert: return "AwaitPeerCert";
    case State::AwaitOwnVerdict: return "AwaitOwnVerdict";
    case State::Established: return "Established";
    case State::Failed: return "Failed";
  }
  return "?";
}

const char* fail_reason_name(FailReason r) {
  switch (r) {
    case FailReason::None: return "none";
    case FailReason::ProtocolViolation: return "protocol-violation";
    case FailReason::NonceMismatch: return "nonce-mismatch";
    case FailReason::DecodeError: return "decode-error";
    case FailReason::BadSignature: return "bad-signature";
    case FailReason::PeerIdMismatch: return "peer-id-mismatch";
    case FailReason::HakfRejected: return "hakf-mismatch";
    case FailReason::VerdictTampered: return "verdict-tampered";
    case FailReason::DigestMismatch: return "digest-mismatch";
    case FailReason::LocalFailure: return "local-failure";
  }
  return "?";
}

const char* msg_type_name(MsgType t) {
  switch (t) {
    case MsgType::M1_InitCert: return "M1-init-cert";
    case MsgType::M2_VerReq: return "M2-ver-req";
    case MsgType::M3_VerResp: return "M3-ver-resp";
    case MsgType::M4_RespCertAndKem: return "M4-resp-cert-kem";
    case MsgType::M5_VerReq: return "M5-ver-req";
    case MsgType::M6_VerResp: return "M6-ver-resp";
  }
  return "?";
}

Bytes Message::encode() const {
  Bytes out;
  out.push_back(static_cast<std::uint8_t>(type));
  append_u64le(out, session_id);
  append(out, ByteView(nonce.data(), nonce.size()));
  append(out, view(body));
  return out;
}

Message Message::decode(ByteView in) {
  if (in.size() < 25) throw Error(ErrorClass::CorruptEncoding, "message truncated");
  if (in[0] < 1 || in[0] > 6) throw Error(ErrorClass::CorruptEncoding, "unknown message type");
  Message m;
  m.type = static_cast<MsgType>(in[0]);
  m.session_id = read_u64le(in, 1);
  std::memcpy(m.nonce.data(), in.data() + 9, 16);
  m.body.assign(in.begin() + 25, in.end());
  return m;
}

bool message_legal(Role role, State state, MsgType type) {
  if (role == Role::Responder) {
    if (state == State::Idle && type == MsgType::M1_InitCert) return true;
    if (state == State::AwaitHakfVerdict && type == MsgType::M3_VerResp) return true;
    return false;
  }
  if (state == State::SentCert && type == MsgType::M4_RespCertAndKem) return true;
  if (state == State::AwaitOwnVerdict && type == MsgType::M6_VerResp) return true;
  return false;
}

Session::Session(Role role, EndpointConfig cfg, Drbg* rng)
    : role_(role), cfg_(std::move(cfg)), rng_(rng) {
  if (cfg_.params == nullptr || cfg_.sign_kp == nullptr || cfg_.device == nullptr ||
      rng_ == nullptr)
    throw Error(ErrorClass::InvalidArgument, "incomplete endpoint configuration");
}

Message Session::make_message(MsgType type, Bytes body) {
  Message m;
  m.type = type;
  m.session_id = session_id_;
  m.nonce = nonce_;
  m.body = std::move(body);
  absorb(m);
  return m;
}

void Session::absorb(const Message& msg) {
  transcript_.update(view(msg.encode()));
  ++transcript_count_;
}

void Session::fail(FailReason reason) {
  state_ = State::Failed;
  reason_ = reason;
  session_key_.reset();
}

Message Session::initiate() {
  if (role_ != Role::Initiator || state_ != State::Idle)
    throw Error(ErrorClass::StateViolation, "initiate is only valid once, from Idle, as initiator");

  rng_->fill(std::span<std::uint8_t>(reinterpret_cast<std::uint8_t*>(&session_id_), 8));
  rng_->fill(nonce_);
  bound_ = true;

  certs::UserIdentity identity{cfg_.user_id, cfg_.kem_pk, cfg_.sign_kp->public_key};
  own_cert_ = certs::issue_certificate(identity, *cfg_.sign_kp, *cfg_.device, *cfg_.params);

  state_ = State::SentCert;
  return make_message(MsgType::M1_InitCert, certs::encode(*own_cert_));
}

std::vector<Message> Session::on_message(const Message& msg) {
  if (state_ == State::Failed) return {};  // a failed session never recovers
  if (!message_legal(role_, state_, msg.type)) {
    fail(FailReason::ProtocolViolation);
    return {};
  }
  if (bound_ && (msg.session_id != session_id_ || msg.nonce != nonce_)) {
    fail(FailReason::NonceMismatch);
    return {};
  }
  if (!bound_) {
    session_id_ = msg.session_id;
    nonce_ = msg.nonce;
    bound_ = true;
  }
  absorb(msg);

  switch (msg.type) {
    case MsgType::M1_InitCert: return handle_m1(msg);
    case MsgType::M3_VerResp: return handle_m3(msg);
    case MsgType::M4_RespCertAndKem: return handle_m4(msg);
    case MsgType::M6_VerResp: return handle_m6(msg);
    default:
      fail(FailReason::ProtocolViolation);
      return {};
  }
}

std::vector<Message> Session::handle_m1(const Message& msg) {
  certs::Certificate peer;
  try {
    peer = certs::decode(view(msg.body));
  } catch (const Error&) {
    fail(FailReason::DecodeError);
    return {};
  }
  // Local signature check comes before anything is sent to the authority.
  if (!certs::verify_signature(peer)) {
    fail(FailReason::BadSignature);
    return {};
  }
  if (cfg_.expected_peer_id && peer.user_id != *cfg_.expected_peer_id) {
    fail(FailReason::PeerIdMismatch);
    return {};
  }
  peer_cert_ = peer;

  try {
    certs::UserIdentity identity{cfg_.user_id, cfg_.kem_pk, cfg_.sign_kp->public_key};
    own_cert_ = certs::issue_certificate(identity, *cfg_.sign_kp, *cfg_.device, *cfg_.params);
  } catch (const Error&) {
    fail(FailReason::LocalFailure);
    return {};
  }

  hakf::VerificationRequest req{*peer_cert_, *own_cert_};
  pending_digest_ = req.digest();
  state_ = State::AwaitHakfVerdict;
  return {make_message(MsgType::M2_VerReq, req.encode())};
}

std::vector<Message> Session::handle_m3(const Message& msg) {
  if (!pending_digest_ || !peer_cert_ || !own_cert_) {
    fail(FailReason::ProtocolViolation);
    return {};
  }
  bool verdict = false;
  try {
    const hakf::VerificationResponse resp = hakf::VerificationResponse::decode(view(msg.body));
    verdict = hakf::open_response(cfg_.kem_sk, *cfg_.params, resp, *pending_digest_);
  } catch (const Error& e) {
    switch (e.cls()) {
      case ErrorClass::DigestMismatch: fail(FailReason::DigestMismatch); break;
      case ErrorClass::AuthFailure: fail(FailReason::VerdictTampered); break;
      default: fail(FailReason::DecodeError); break;
    }
    return {};
  }
  if (!verdict) {
    fail(FailReason::HakfRejected);
    return {};
  }

  // Initiator authenticated: encapsulate to its key and answer with our own
  // certificate plus the ciphertext.
  Bytes ct_bytes;
  kem::SharedSecret ss;
  try {
    const kem::KemParams* peer_params = nullptr;
    const kem::KemPublicKey pk = peer_kem_key(*peer_cert_, peer_params);
    auto [ct, secret] = kem::encapsulate(pk, rng_->seed32(), *peer_params);
    ct_bytes = ct.encode(*peer_params);
    ss = secret;
  } catch (const Error&) {
    fail(FailReason::DecodeError);
    return {};
  }

  session_key_ = derive_session_key(ss, nonce_, *peer_cert_, *own_cert_);
  state_ = State::Established;

  Bytes body = certs::encode(*own_cert_);
  append_u16le(body, static_cast<std::uint16_t>(ct_bytes.size()));
  append(body, view(ct_bytes));
  return {make_message(MsgType::M4_RespCertAndKem, std::move(body))};
}

std::vector<Message> Session::handle_m4(const Message& msg) {
  if (!own_cert_) {
    fail(FailReason::ProtocolViolation);
    return {};
  }
  certs::Certificate peer;
  Bytes ct_bytes;
  try {
    const std::size_t cert_span = certs::encoded_frame_size(view(msg.body));
    peer = certs::decode(ByteView(msg.body).subspan(0, cert_span));
    const std::size_t ct_len = read_u16le(view(msg.body), cert_span);
    if (cert_span + 2 + ct_len != msg.body.size())
      throw Error(ErrorClass::CorruptEncoding, "trailing bytes after ciphertext");
    ct_bytes.assign(msg.body.begin() + static_cast<std::ptrdiff_t>(cert_span + 2), msg.body.end());
  } catch (const Error&) {
    fail(FailReason::DecodeError);
    return {};
  }
  if (!certs::verify_signature(peer)) {
    fail(FailReason::BadSignature);
    return {};
  }
  if (cfg_.expected_peer_id && peer.user_id != *cfg_.expected_peer_id) {
    fail(FailReason::PeerIdMismatch);
    return {};
  }
  peer_cert_ = peer;
  pending_kem_ct_ = std::move(ct_bytes);

  hakf::VerificationRequest req{*peer_cert_, *own_cert_};
  pending_digest_ = req.digest();
  state_ = State::AwaitOwnVerdict;
  return {make_message(MsgType::M5_VerReq, req.encode())};
}

std::vector<Message> Session::handle_m6(const Message& msg) {
  if (!pending_digest_ || !peer_cert_ || !own_cert_) {
    fail(FailReason::ProtocolViolation);
    return {};
  }
  bool verdict = false;
  try {
    const hakf::VerificationResponse resp = hakf::VerificationResponse::decode(view(msg.body));
    verdict = hakf::open_response(cfg_.kem_sk, *cfg_.params, resp, *pending_digest_);
  } catch (const Error& e) {
    switch (e.cls()) {
      case ErrorClass::DigestMismatch: fail(FailReason::DigestMismatch); break;
      case ErrorClass::AuthFailure: fail(FailReason::VerdictTampered); break;
      default: fail(FailReason::DecodeError); break;
    }
    return {};
  }
  if (!verdict) {
    fail(FailReason::HakfRejected);
    return {};
  }

  try {
    const kem::Ciphertext ct = kem::Ciphertext::decode(view(pending_kem_ct_), *cfg_.params);
    const kem::SharedSecret ss = kem::decapsulate(cfg_.kem_sk, ct, *cfg_.params);
    session_key_ = derive_session_key(ss, nonce_, *own_cert_, *peer_cert_);
  } catch (const Error&) {
    fail(FailReason::DecodeError);
    return {};
  }
  state_ = State::Established;
  return {};
}

Digest32 derive_session_key(const kem::SharedSecret& ss, const std::array<std::uint8_t, 16>& nonce,
                            const certs::Certificate& initiator_cert,
                            const certs::Certificate& responder_cert) {
  const Digest32 di = certs::cert_digest(initiator_cert);
  const Digest32 dj = certs::cert_digest(responder_cert);
  Bytes k = shake256({label("scc5g.hs.key"), ByteView(ss.bytes.data(), ss.bytes.size()),
                      ByteView(nonce.data(), nonce.size()), ByteView(di.data(), di.size()),
                      ByteView(dj.data(), dj.size())},
                     32);
  Digest32 out;
  std::memcpy(out.data(), k.data(), 32);
  return out;
}

Message hakf_respond(const hakf::CertificateDB& db, const Message& request, Drbg& rng) {
  if (request.type != MsgType::M2_VerReq && request.type != MsgType::M5_VerReq)
    throw Error(ErrorClass::StateViolation, "not a verification request");
  const hakf::VerificationRequest req = hakf::VerificationRequest::decode(view(request.body));
  const hakf::VerificationResponse resp = hakf::verify(db, req, rng.seed32());

  Message reply;
  reply.type =
      request.type == MsgType::M2_VerReq ? MsgType::M3_VerResp : MsgType::M6_VerResp;
  reply.session_id = request.session_id;
  reply.nonce = request.nonce;
  reply.body = resp.encode();
  return reply;
}

ExchangeResult run_local_handshake(const EndpointConfig& initiator_cfg,
                                   const EndpointConfig& responder_cfg,
                                   const hakf::CertificateDB& db, Drbg& rng,
                                   const Interceptor& interceptor) {
  Session initiator(Role::Initiator, initiator_cfg, &rng);
  Session responder(Role::Responder, responder_cfg, &rng);

  ExchangeResult result;
  std::vector<Message> in_flight{initiator.initiate()};

  while (!in_flight.empty()) {
    Message msg = std::move(in_flight.front());
    in_flight.erase(in_flight.begin());

    if (interceptor) {
      std::optional<Message> kept = interceptor(msg.type, msg);
      if (!kept) continue;  // dropped on the wire
      msg = std::move(*kept);
    }

    result.trace.emplace_back(msg.type, msg.encode().size());
    ++result.messages_delivered;

    switch (msg.type) {
      case MsgType::M1_InitCert:
      case MsgType::M3_VerResp: {
        auto out = responder.on_message(msg);
        in_flight.insert(in_flight.end(), out.begin(), out.end());
        break;
      }
      case MsgType::M4_RespCertAndKem:
      case MsgType::M6_VerResp: {
        auto out = initiator.on_message(msg);
        in_flight.insert(in_flight.end(), out.begin(), out.end());
        break;
      }
      case MsgType::M2_VerReq:
      case MsgType::M5_VerReq: {
        try {
          in_flight.push_back(hakf_respond(db, msg, rng));
        } catch (const Error&) {
          // The authority refuses malformed or unauthenticated requests;
          // the exchange stalls and both sides stay unestablished.
        }
        break;
      }
    }
  }

  result.initiator_state = initiator.state();
  result.responder_state = responder.state();
  result.initiator_reason = initiator.fail_reason();
  result.responder_reason = responder.fail_reason();
  result.initiator_key = initiator.session_key();
  result.responder_key = responder.session_key();
  return result;
}

}  // namespace scc5g::handshake
