#include "scc5g/drills.hpp"

#include "scc5g/errors.hpp"

namespace scc5g::drills {

using handshake::ExchangeResult;
using handshake::FailReason;
using handshake::Message;
using handshake::MsgType;
using handshake::State;

namespace {

certs::Certificate forge_cert_claiming(Actor& forger, const std::string& claimed_id,
                                       const kem::KemParams& params) {
  certs::UserIdentity identity{claimed_id, forger.kem_pk, forger.sign_kp.public_key};
  return certs::issue_certificate(identity, forger.sign_kp, forger.device, params);
}

}  // namespace

Actor make_actor(const std::string& id, Drbg& rng, const kem::KemParams& params,
                 unsigned sign_height, unsigned m) {
  Actor a;
  a.id = id;
  const Bytes kem_seed = rng.bytes(64);
  auto [pk, sk] = kem::keygen(view(kem_seed), params);
  a.kem_pk = pk;
  a.kem_sk = sk;
  a.sign_kp = sign::sign_keygen(view(rng.bytes(32)), sign_height);
  a.device = hra::make_device(view(rng.bytes(32)), m);
  return a;
}

DrillEnv make_drill_env(std::uint64_t seed, const kem::KemParams& params, unsigned sign_height,
                        unsigned m) {
  DrillEnv env;
  env.params = &params;
  env.rng = Drbg(seed);
  env.alice = make_actor("alice", env.rng, params, sign_height, m);
  env.bob = make_actor("bob", env.rng, params, sign_height, m);
  env.mallory = make_actor("mallory", env.rng, params, sign_height, m);
  for (Actor* a : {&env.alice, &env.bob, &env.mallory})
    hakf::register_user(env.db, hra::enumerate_image(a->device, a->id));
  return env;
}

handshake::EndpointConfig endpoint_of(Actor& actor, const kem::KemParams* params,
                                      std::optional<std::string> expected_peer) {
  handshake::EndpointConfig cfg;
  cfg.user_id = actor.id;
  cfg.params = params;
  cfg.kem_pk = actor.kem_pk;
  cfg.kem_sk = actor.kem_sk;
  cfg.sign_kp = &actor.sign_kp;
  cfg.device = &actor.device;
  cfg.expected_peer_id = std::move(expected_peer);
  return cfg;
}

ExchangeResult run_spoof_once(Actor& attacker, const std::string& victim_id,
                              const handshake::EndpointConfig& responder,
                              const hakf::CertificateDB& db, Drbg& rng,
                              const kem::KemParams& params) {
  handshake::EndpointConfig impostor = endpoint_of(attacker, &params);
  impostor.user_id = victim_id;  // claimed identity, foreign hardware
  return handshake::run_local_handshake(impostor, responder, db, rng);
}

ExchangeResult run_mitm_once(const handshake::EndpointConfig& initiator,
                             const handshake::EndpointConfig& responder, Actor& attacker,
                             const std::string& claimed_id, const hakf::CertificateDB& db,
                             Drbg& rng, const kem::KemParams& params) {
  certs::Certificate forged = forge_cert_claiming(attacker, claimed_id, params);
  std::optional<kem::KemPublicKey> initiator_pk;

  auto interceptor = [&](MsgType leg, const Message& msg) -> std::optional<Message> {
    if (leg == MsgType::M1_InitCert) {
      const certs::Certificate m1 = certs::decode(view(msg.body));
      const certs::CompositeKeyParts parts = certs::parse_composite_key(view(m1.public_key_bytes));
      initiator_pk = kem::KemPublicKey::decode(view(parts.kem_pk_bytes), params);
      return msg;
    }
    if (leg != MsgType::M4_RespCertAndKem || !initiator_pk) return msg;
    auto [ct, ss] = kem::encapsulate(*initiator_pk, rng.seed32(), params);
    const Bytes ct_bytes = ct.encode(params);
    Message swapped = msg;
    swapped.body = certs::encode(forged);
    append_u16le(swapped.body, static_cast<std::uint16_t>(ct_bytes.size()));
    append(swapped.body, view(ct_bytes));
    return swapped;
  };

  return handshake::run_local_handshake(initiator, responder, db, rng, interceptor);
}

ExchangeResult run_cert_tamper_once(const handshake::EndpointConfig& initiator,
                                    const handshake::EndpointConfig& responder,
                                    std::size_t byte_pos, const hakf::CertificateDB& db,
                                    Drbg& rng) {
  auto interceptor = [&](MsgType leg, const Message& msg) -> std::optional<Message> {
    if (leg != MsgType::M1_InitCert || byte_pos >= msg.body.size()) return msg;
    Message tampered = msg;
    tampered.body[byte_pos] ^= 0xff;
    return tampered;
  };
  return handshake::run_local_handshake(initiator, responder, db, rng, interceptor);
}

ExchangeResult run_verdict_replay_once(const handshake::EndpointConfig& initiator,
                                       const handshake::EndpointConfig& responder,
                                       const hakf::CertificateDB& db, Drbg& rng) {
  // Recording run: capture the sealed M6 of an honest session.
  std::optional<Message> recorded;
  auto recorder = [&](MsgType leg, const Message& msg) -> std::optional<Message> {
    if (leg == MsgType::M6_VerResp) recorded = msg;
    return msg;
  };
  handshake::run_local_handshake(initiator, responder, db, rng, recorder);
  if (!recorded) throw Error(ErrorClass::StateViolation, "recording run produced no verdict");

  // Attacked run: substitute the stale verdict, headers rewritten so that
  // only the digest binding inside the seal can catch it.
  auto interceptor = [&](MsgType leg, const Message& msg) -> std::optional<Message> {
    if (leg != MsgType::M6_VerResp) return msg;
    Message replayed = *recorded;
    replayed.session_id = msg.session_id;
    replayed.nonce = msg.nonce;
    return replayed;
  };
  return handshake::run_local_handshake(initiator, responder, db, rng, interceptor);
}

DrillReport drill_spoof(DrillEnv& env, std::size_t trials) {
  DrillReport report;
  for (std::size_t t = 0; t < trials; ++t) {
    const ExchangeResult r = run_spoof_once(env.mallory, env.alice.id,
                                            endpoint_of(env.bob, env.params), env.db, env.rng,
                                            *env.params);
    ++report.trials;
    if (r.established()) ++report.false_accepts;
    if (r.responder_state == State::Failed && r.responder_reason == FailReason::HakfRejected)
      ++report.failed_as_expected;
  }
  return report;
}

DrillReport drill_mitm(DrillEnv& env, std::size_t trials) {
  DrillReport report;
  for (std::size_t t = 0; t < trials; ++t) {
    const ExchangeResult r =
        run_mitm_once(endpoint_of(env.alice, env.params, env.bob.id),
                      endpoint_of(env.bob, env.params), env.mallory, env.bob.id, env.db, env.rng,
                      *env.params);
    ++report.trials;
    if (r.initiator_state == State::Established) ++report.false_accepts;
    if (r.initiator_state == State::Failed && r.initiator_reason == FailReason::HakfRejected)
      ++report.failed_as_expected;
  }
  return report;
}

DrillReport drill_cert_tamper(DrillEnv& env) {
  DrillReport report;
  for (std::size_t pos = 0; pos < certs::kFrameUnit; ++pos) {
    const ExchangeResult r =
        run_cert_tamper_once(endpoint_of(env.alice, env.params, env.bob.id),
                             endpoint_of(env.bob, env.params), pos, env.db, env.rng);
    ++report.trials;
    if (r.established()) ++report.false_accepts;
    if (r.responder_state == State::Failed) ++report.failed_as_expected;
  }
  return report;
}

DrillReport drill_verdict_replay(DrillEnv& env, std::size_t trials) {
  DrillReport report;
  for (std::size_t t = 0; t < trials; ++t) {
    const ExchangeResult r =
        run_verdict_replay_once(endpoint_of(env.alice, env.params, env.bob.id),
                                endpoint_of(env.bob, env.params), env.db, env.rng);
    ++report.trials;
    if (r.initiator_state == State::Established) ++report.false_accepts;
    if (r.initiator_state == State::Failed && r.initiator_reason == FailReason::DigestMismatch)
      ++report.failed_as_expected;
  }
  return report;
}

}  // namespace scc5g::drills
