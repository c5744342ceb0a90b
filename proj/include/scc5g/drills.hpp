#pragma once

#include <cstdint>
#include <string>

#include "scc5g/handshake.hpp"
#include "scc5g/hash.hpp"

namespace scc5g::drills {

// A small enrolled population: two honest users and one enrolled insider
// adversary, plus the authority database built from their device images.
struct Actor {
  std::string id;
  kem::KemPublicKey kem_pk;
  kem::KemPrivateKey kem_sk;
  sign::SignKeyPair sign_kp;
  hra::HraDevice device;
};

Actor make_actor(const std::string& id, Drbg& rng, const kem::KemParams& params,
                 unsigned sign_height, unsigned m);

struct DrillEnv {
  const kem::KemParams* params = nullptr;
  Actor alice, bob, mallory;
  hakf::CertificateDB db;
  Drbg rng;

  DrillEnv() : rng(std::uint64_t{0}) {}
};

DrillEnv make_drill_env(std::uint64_t seed, const kem::KemParams& params, unsigned sign_height,
                        unsigned m);

handshake::EndpointConfig endpoint_of(Actor& actor, const kem::KemParams* params,
                                      std::optional<std::string> expected_peer = std::nullopt);

// Single-run attack primitives. Each returns the exchange outcome; the
// caller decides what counts as a false acceptance.

/// The attacker initiates under `victim_id` with its own keys and device.
handshake::ExchangeResult run_spoof_once(Actor& attacker, const std::string& victim_id,
                                         const handshake::EndpointConfig& responder,
                                         const hakf::CertificateDB& db, Drbg& rng,
                                         const kem::KemParams& params);

/// Active adversary swaps its own certificate (claiming `claimed_id`) plus
/// its own encapsulation into M4.
handshake::ExchangeResult run_mitm_once(const handshake::EndpointConfig& initiator,
                                        const handshake::EndpointConfig& responder,
                                        Actor& attacker, const std::string& claimed_id,
                                        const hakf::CertificateDB& db, Drbg& rng,
                                        const kem::KemParams& params);

/// Flips one byte of the initiator's certificate frame in flight.
handshake::ExchangeResult run_cert_tamper_once(const handshake::EndpointConfig& initiator,
                                               const handshake::EndpointConfig& responder,
                                               std::size_t byte_pos,
                                               const hakf::CertificateDB& db, Drbg& rng);

/// Replays a sealed "true" verdict captured from an honest session into a
/// fresh session's M6 slot, headers rewritten to match.
handshake::ExchangeResult run_verdict_replay_once(const handshake::EndpointConfig& initiator,
                                                  const handshake::EndpointConfig& responder,
                                                  const hakf::CertificateDB& db, Drbg& rng);

struct DrillReport {
  std::size_t trials = 0;
  std::size_t false_accepts = 0;       // runs where the attacked side established
  std::size_t failed_as_expected = 0;  // runs rejected with the anticipated reason
};

DrillReport drill_spoof(DrillEnv& env, std::size_t trials);
DrillReport drill_mitm(DrillEnv& env, std::size_t trials);
DrillReport drill_cert_tamper(DrillEnv& env);  // every single-byte flip
DrillReport drill_verdict_replay(DrillEnv& env, std::size_t trials);

}  // namespace scc5g::drills
