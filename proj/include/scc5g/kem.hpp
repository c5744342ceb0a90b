#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "scc5g/bytes.hpp"
#include "scc5g/hash.hpp"

namespace scc5g::kem {

/// Module-LWE parameter set. All ring elements live in R_q = Z_q[X]/(X^n+1).
struct KemParams {
  unsigned n;        ///< ring dimension, power of two, <= 256
  unsigned k;        ///< module rank (A is k x k over R_q)
  std::uint32_t q;   ///< prime modulus, < 2^15
  unsigned eta;      ///< centered-binomial noise width (0 disables noise)
  unsigned d_t;      ///< bit width of stored public vector t
  unsigned d_u;      ///< bit width of ciphertext vector u
  unsigned d_v;      ///< bit width of ciphertext element v
  std::uint8_t profile_id;  ///< low nibble of serialized format tags

  void validate() const;         // throws Error{InvalidArgument}
  unsigned coeff_bits() const;   // ceil(log2 q)
  std::size_t public_key_size() const;
  std::size_t ciphertext_size() const;
  std::size_t message_size() const;  // ceil(n/8): one message bit per coefficient
};

// Registered profiles. `default` is sized like the lattice KEM it follows;
// `toy` is small enough for exhaustive oracle checks, with eta=0 so that
// decryption is exact; `toy-noisy` adds eta=1 noise for sampler tests.
const KemParams& default_params();
const KemParams& toy_params();
const KemParams& toy_noisy_params();
const KemParams* params_for_profile(std::uint8_t profile_id);

struct Poly {
  std::vector<std::uint16_t> c;
};
using PolyVec = std::vector<Poly>;
using Matrix = std::vector<PolyVec>;  // k rows, each of k polys

Poly poly_zero(const KemParams& p);
Poly poly_add(const Poly& a, const Poly& b, const KemParams& p);
Poly poly_sub(const Poly& a, const Poly& b, const KemParams& p);
// Negacyclic schoolbook convolution; the reference multiplication path.
Poly poly_mul(const Poly& a, const Poly& b, const KemParams& p);
PolyVec matvec_mul(const Matrix& a, const PolyVec& x, const KemParams& p, bool transpose);
Poly inner_product(const PolyVec& a, const PolyVec& b, const KemParams& p);

/// round(2^d * x / q) mod 2^d for x in [0, q).
std::uint32_t compress(std::uint32_t x, unsigned d, std::uint32_t q);
/// round(q * c / 2^d) for c in [0, 2^d).
std::uint32_t decompress(std::uint32_t c, unsigned d, std::uint32_t q);
/// Worst-case reconstruction error round(q / 2^(d+1)).
std::uint32_t compress_bound(std::uint32_t q, unsigned d);
/// |a - b| taking the shorter way around the mod-q circle.
std::uint32_t centered_distance(std::uint32_t a, std::uint32_t b, std::uint32_t q);

Poly compress_poly(const Poly& x, unsigned d, const KemParams& p);
Poly decompress_poly(const Poly& x, unsigned d, const KemParams& p);

/// Deterministic expansion of the 32-byte seed rho into a uniform k x k
/// matrix over R_q (XOF stream with rejection sampling, one domain-separated
/// stream per matrix cell).
Matrix expand_matrix(ByteView rho, const KemParams& p);

/// Deterministic (s, e) sampling from the 32-byte seed sigma; every
/// coefficient is centered-binomial with parameter eta, stored mod q.
std::pair<PolyVec, PolyVec> sample_noise(ByteView sigma, const KemParams& p);

struct KemPublicKey {
  std::uint8_t profile_id = 0;
  std::array<std::uint8_t, 32> rho{};
  PolyVec t;  // compressed at d_t bits

  Bytes encode(const KemParams& p) const;
  static KemPublicKey decode(ByteView in, const KemParams& p);
};

struct KemPrivateKey {
  std::uint8_t profile_id = 0;
  PolyVec s;
  std::array<std::uint8_t, 32> sigma{};  // regenerates (s, e)
  std::array<std::uint8_t, 32> z{};      // implicit-rejection secret
  KemPublicKey pk;                       // needed for the re-encryption check
};

struct Ciphertext {
  std::uint8_t profile_id = 0;
  PolyVec u;  // compressed at d_u bits
  Poly v;     // compressed at d_v bits

  Bytes encode(const KemParams& p) const;
  static Ciphertext decode(ByteView in, const KemParams& p);
};

struct SharedSecret {
  std::array<std::uint8_t, 32> bytes{};
};

/// Splits the 64-byte seed into (rho, sigma) and derives t = Compress(A s + e, d_t).
std::pair<KemPublicKey, KemPrivateKey> keygen(ByteView seed64, const KemParams& p);

/// CCA encapsulation (Fujisaki-Okamoto style: re-encryption checked on the
/// receiving side). Deterministic in (pk, coins).
std::pair<Ciphertext, SharedSecret> encapsulate(const KemPublicKey& pk, ByteView coins32,
                                                const KemParams& p);

/// Constant-work decapsulation: always decrypts, re-encrypts and derives
/// both the accept and reject secrets, selecting between them without a
/// data-dependent branch.
SharedSecret decapsulate(const KemPrivateKey& sk, const Ciphertext& ct, const KemParams& p);

// IND-CPA core, exposed so the noiseless toy profile can be driven
// message-by-message against an independent oracle.
Ciphertext pke_encrypt(const KemPublicKey& pk, ByteView message, ByteView rseed32,
                       const KemParams& p);
Bytes pke_decrypt(const KemPrivateKey& sk, const Ciphertext& ct, const KemParams& p);

}  // namespace scc5g::kem
