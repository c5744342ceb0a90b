#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "pke_oracle.hpp"
#include "scc5g/errors.hpp"
#include "scc5g/kem.hpp"

using namespace scc5g;
using namespace scc5g::kem;

namespace {

Bytes seed_of(std::uint64_t n, std::size_t len) {
  Drbg rng(n);
  return rng.bytes(len);
}

Bytes enumerated_seed(unsigned i, std::size_t len) {
  Bytes s(len, 0);
  s[0] = static_cast<std::uint8_t>(i);
  return s;
}

}  // namespace

TEST_SUITE("kem") {

TEST_CASE("expand_matrix is deterministic on the toy profile") {
  const KemParams& p = toy_params();
  const Bytes rho(32, 0);
  const Matrix a = expand_matrix(view(rho), p);
  const Matrix b = expand_matrix(view(rho), p);
  REQUIRE(a.size() == p.k);
  for (unsigned i = 0; i < p.k; ++i)
    for (unsigned j = 0; j < p.k; ++j) {
      CHECK(a[i][j].c == b[i][j].c);
      for (auto c : a[i][j].c) CHECK(c < p.q);
    }
}

TEST_CASE("distinct seeds give distinct matrices") {
  const KemParams& p = toy_params();
  for (std::uint64_t t = 0; t < 100; ++t) {
    const Bytes r1 = seed_of(2 * t, 32), r2 = seed_of(2 * t + 1, 32);
    const Matrix a = expand_matrix(view(r1), p);
    const Matrix b = expand_matrix(view(r2), p);
    bool differs = false;
    for (unsigned i = 0; i < p.k && !differs; ++i)
      for (unsigned j = 0; j < p.k && !differs; ++j) differs = a[i][j].c != b[i][j].c;
    CHECK(differs);
  }
}

TEST_CASE("expanded coefficients are uniform (16-bucket histogram, 3 sigma)") {
  const KemParams& p = default_params();
  const Bytes rho = seed_of(42, 32);

  std::vector<std::uint32_t> buckets(16, 0);
  std::size_t total = 0;
  double chi2 = 0;
  std::uint64_t s = 0;
  while (total < 100000) {
    const Bytes r = seed_of(1000 + s++, 32);
    const Matrix a = expand_matrix(view(r), p);
    for (unsigned i = 0; i < p.k && total < 100000; ++i)
      for (unsigned j = 0; j < p.k && total < 100000; ++j)
        for (unsigned idx = 0; idx < p.n && total < 100000; ++idx) {
          buckets[static_cast<std::size_t>(a[i][j].c[idx]) * 16 / p.q]++;
          ++total;
        }
  }
  // Bucket widths differ by at most one residue out of q/16; treat as equal.
  const double expected = static_cast<double>(total) / 16;
  const double sigma = std::sqrt(expected * (1.0 - 1.0 / 16));
  for (unsigned b = 0; b < 16; ++b) {
    CHECK(std::abs(buckets[b] - expected) <= 3.2 * sigma);
    chi2 += (buckets[b] - expected) * (buckets[b] - expected) / expected;
  }
  CHECK(chi2 < 37.7);  // chi-square df=15 at p=0.001
}

TEST_CASE("noise sampling: support, pmf and determinism") {
  KemParams p = default_params();  // eta = 2
  std::map<int, std::size_t> counts;
  std::size_t total = 0;
  std::uint64_t s = 0;
  while (total < 100000) {
    const Bytes sigma = seed_of(5000 + s++, 32);
    auto [sv, ev] = sample_noise(view(sigma), p);
    for (const PolyVec* vec : {&sv, &ev})
      for (const Poly& poly : *vec)
        for (std::uint16_t c : poly.c) {
          int v = static_cast<int>(c);
          if (v > static_cast<int>(p.q) / 2) v -= static_cast<int>(p.q);
          CHECK(v >= -2);
          CHECK(v <= 2);
          counts[v]++;
          ++total;
          if (total == 100000) break;
        }
  }
  // centered binomial, eta=2: {1,4,6,4,1}/16
  const std::map<int, double> pmf{{-2, 1.0 / 16}, {-1, 4.0 / 16}, {0, 6.0 / 16},
                                  {1, 4.0 / 16},  {2, 1.0 / 16}};
  for (const auto& [v, prob] : pmf)
    CHECK(std::abs(static_cast<double>(counts[v]) / 100000 - prob) < 0.01);

  const Bytes sigma = seed_of(7, 32);
  auto a = sample_noise(view(sigma), p);
  auto b = sample_noise(view(sigma), p);
  for (unsigned i = 0; i < p.k; ++i) {
    CHECK(a.first[i].c == b.first[i].c);
    CHECK(a.second[i].c == b.second[i].c);
  }
}

TEST_CASE("compress: fixed points, reference value, toy bound") {
  for (unsigned d : {1u, 3u, 4u, 10u}) {
    CHECK(compress(0, d, 17) == 0);
    CHECK(compress(0, d, 3329) == 0);
  }
  CHECK(compress(1664, 10, 3329) == 512);

  // exhaustive over the toy modulus at d=4: error bound round(17/32) = 1
  for (std::uint32_t x = 0; x < 17; ++x) {
    const std::uint32_t rt = decompress(compress(x, 4, 17), 4, 17);
    CHECK(centered_distance(rt, x, 17) <= 1);
  }
}

TEST_CASE("compression bound holds exhaustively (q=17) and sampled (q=3329)") {
  for (unsigned d = 1; d <= 5; ++d)
    for (std::uint32_t x = 0; x < 17; ++x)
      CHECK(centered_distance(decompress(compress(x, d, 17), d, 17), x, 17) <=
            compress_bound(17, d));

  Drbg rng(std::uint64_t{99});
  for (int i = 0; i < 20000; ++i) {
    const std::uint32_t x = static_cast<std::uint32_t>(rng.next_u64() % 3329);
    for (unsigned d : {1u, 4u, 10u, 12u})
      CHECK(centered_distance(decompress(compress(x, d, 3329), d, 3329), x, 3329) <=
            compress_bound(3329, d));
  }
}

TEST_CASE("keygen: determinism, schoolbook oracle, collision scan") {
  const KemParams& p = toy_noisy_params();
  const Bytes seed = seed_of(11, 64);
  auto [pk1, sk1] = keygen(view(seed), p);
  auto [pk2, sk2] = keygen(view(seed), p);
  CHECK(pk1.encode(p) == pk2.encode(p));
  CHECK(sk1.sigma == sk2.sigma);

  // independent reference: t must equal Compress(A s + e)
  const pke_oracle::OracleKeyPair okp = pke_oracle::keygen(view(seed), p);
  CHECK(okp.pk_bytes == pk1.encode(p));

  std::set<Bytes> pks;
  for (unsigned i = 0; i < 1000; ++i) {
    const Bytes s = seed_of(100000 + i, 64);
    auto [pk, sk] = keygen(view(s), p);
    pks.insert(pk.encode(p));
  }
  CHECK(pks.size() == 1000);
}

TEST_CASE("encapsulate/decapsulate: determinism and round trips") {
  const KemParams& p = default_params();
  const Bytes seed = seed_of(21, 64);
  auto [pk, sk] = keygen(view(seed), p);

  const Bytes coins = seed_of(22, 32);
  auto [ct1, ss1] = encapsulate(pk, view(coins), p);
  auto [ct2, ss2] = encapsulate(pk, view(coins), p);
  CHECK(ct1.encode(p) == ct2.encode(p));
  CHECK(ss1.bytes == ss2.bytes);

  for (unsigned t = 0; t < 200; ++t) {
    const Bytes c = seed_of(3000 + t, 32);
    auto [ct, ss] = encapsulate(pk, view(c), p);
    const SharedSecret rt = decapsulate(sk, ct, p);
    CHECK(rt.bytes == ss.bytes);
  }
}

TEST_CASE("noiseless toy profile: exact round trip for all 16 messages") {
  const KemParams& p = toy_params();  // eta = 0, lossless widths
  const Bytes seed = seed_of(31, 64);
  auto [pk, sk] = keygen(view(seed), p);
  const Bytes rseed = seed_of(32, 32);

  for (unsigned m = 0; m < 16; ++m) {
    const Bytes message{static_cast<std::uint8_t>(m)};
    const Ciphertext ct = pke_encrypt(pk, view(message), view(rseed), p);
    CHECK(pke_decrypt(sk, ct, p) == message);
  }

  // the all-zero ciphertext decodes the zero message
  Ciphertext zero;
  zero.profile_id = p.profile_id;
  zero.u.assign(p.k, poly_zero(p));
  zero.v = poly_zero(p);
  CHECK(pke_decrypt(sk, zero, p) == Bytes{0});
}

TEST_CASE("tampered ciphertext yields a different secret (1000 trials)") {
  const KemParams& p = default_params();
  const Bytes seed = seed_of(41, 64);
  auto [pk, sk] = keygen(view(seed), p);

  std::size_t differing = 0;
  Drbg rng(std::uint64_t{4141});
  for (unsigned t = 0; t < 1000; ++t) {
    const Bytes coins = seed_of(9000 + t, 32);
    auto [ct, ss] = encapsulate(pk, view(coins), p);
    // flip one compressed coefficient
    const unsigned vec = static_cast<unsigned>(rng.next_u64() % p.k);
    const unsigned idx = static_cast<unsigned>(rng.next_u64() % p.n);
    Ciphertext bad = ct;
    bad.u[vec].c[idx] ^= 1;
    const SharedSecret rt = decapsulate(sk, bad, p);
    if (rt.bytes != ss.bytes) ++differing;
  }
  CHECK(differing == 1000);
}

TEST_CASE("rank-1 toy ring matches the oracle too") {
  KemParams p = toy_params();
  p.k = 1;
  p.eta = 1;
  p.profile_id = 0xf;  // in-memory only
  p.validate();
  for (unsigned i = 0; i < 64; ++i) {
    const Bytes seed = enumerated_seed(i, 64);
    const Bytes coins = enumerated_seed(i ^ 0x2a, 32);
    auto [pk, sk] = keygen(view(seed), p);
    const pke_oracle::OracleKeyPair okp = pke_oracle::keygen(view(seed), p);
    REQUIRE(okp.pk_bytes == pk.encode(p));
    auto [ct, ss] = encapsulate(pk, view(coins), p);
    const pke_oracle::OracleEncaps oe = pke_oracle::encapsulate(okp.pk_bytes, view(coins), p);
    CHECK(oe.ct_bytes == ct.encode(p));
    CHECK(Bytes(ss.bytes.begin(), ss.bytes.end()) == oe.secret);
    const SharedSecret dec = decapsulate(sk, ct, p);
    CHECK(pke_oracle::decapsulate(okp, view(ct.encode(p)), p) ==
          Bytes(dec.bytes.begin(), dec.bytes.end()));
  }
}

TEST_CASE("malformed key material and dimension mismatches are rejected") {
  const KemParams& p = toy_params();
  const Bytes seed = seed_of(51, 64);
  auto [pk, sk] = keygen(view(seed), p);

  KemPublicKey broken = pk;
  broken.t.pop_back();
  CHECK_THROWS_AS(encapsulate(broken, view(seed_of(52, 32)), p), Error);

  auto [ct, ss] = encapsulate(pk, view(seed_of(53, 32)), p);
  Ciphertext bad = ct;
  bad.u.pop_back();
  CHECK_THROWS_AS(decapsulate(sk, bad, p), Error);

  Bytes enc = ct.encode(p);
  enc.pop_back();
  CHECK_THROWS_AS(Ciphertext::decode(view(enc), p), Error);
}

TEST_CASE("full pipeline matches the independent oracle (toy, both noise levels)") {
  for (const KemParams* p : {&toy_params(), &toy_noisy_params()}) {
    for (unsigned i = 0; i < 64; ++i) {
      const Bytes seed = enumerated_seed(i, 64);
      const Bytes coins = enumerated_seed(i, 32);

      auto [pk, sk] = keygen(view(seed), *p);
      const pke_oracle::OracleKeyPair okp = pke_oracle::keygen(view(seed), *p);
      REQUIRE(okp.pk_bytes == pk.encode(*p));

      auto [ct, ss] = encapsulate(pk, view(coins), *p);
      const pke_oracle::OracleEncaps oe = pke_oracle::encapsulate(okp.pk_bytes, view(coins), *p);
      CHECK(oe.ct_bytes == ct.encode(*p));
      CHECK(view(oe.secret).size() == 32);
      CHECK(Bytes(ss.bytes.begin(), ss.bytes.end()) == oe.secret);

      const SharedSecret dec = decapsulate(sk, ct, *p);
      const Bytes odec = pke_oracle::decapsulate(okp, view(ct.encode(*p)), *p);
      CHECK(Bytes(dec.bytes.begin(), dec.bytes.end()) == odec);
    }
  }
}

TEST_CASE("public key and ciphertext encodings round-trip and reject damage") {
  const KemParams& p = toy_noisy_params();
  const Bytes seed = seed_of(61, 64);
  auto [pk, sk] = keygen(view(seed), p);

  const Bytes pkb = pk.encode(p);
  const KemPublicKey pk2 = KemPublicKey::decode(view(pkb), p);
  CHECK(pk2.encode(p) == pkb);

  Bytes wrong_tag = pkb;
  wrong_tag[0] ^= 0xff;
  CHECK_THROWS_AS(KemPublicKey::decode(view(wrong_tag), p), Error);

  auto [ct, ss] = encapsulate(pk, view(seed_of(62, 32)), p);
  const Bytes ctb = ct.encode(p);
  CHECK(Ciphertext::decode(view(ctb), p).encode(p) == ctb);

  Bytes longer = ctb;
  longer.push_back(0);
  CHECK_THROWS_AS(Ciphertext::decode(view(longer), p), Error);
}

TEST_CASE("parameter validation") {
  KemParams p = default_params();
  p.q = 3330;  // not prime
  CHECK_THROWS_AS(p.validate(), Error);
  p = default_params();
  p.n = 48;  // not a power of two
  CHECK_THROWS_AS(p.validate(), Error);
  p = default_params();
  p.d_u = 13;  // wider than ceil(log2 q)
  CHECK_THROWS_AS(p.validate(), Error);
  CHECK(default_params().coeff_bits() == 12);
  CHECK(toy_params().coeff_bits() == 5);
}

}  // TEST_SUITE
