#pragma once

// Independent reference pipeline for the lattice KEM, used as a test oracle.
// It re-implements bit parsing, rejection sampling, noise expansion,
// convolution and rounding from scratch (centered-coefficient arithmetic,
// floating-point rounding), sharing only the hash primitives with the
// library. Any divergence between the two paths is a bug in one of them.

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "scc5g/bytes.hpp"
#include "scc5g/hash.hpp"
#include "scc5g/kem.hpp"

namespace pke_oracle {

using scc5g::Bytes;
using scc5g::ByteView;
using scc5g::view;
using Params = scc5g::kem::KemParams;

inline ByteView olabel(const char* s) {
  return ByteView(reinterpret_cast<const std::uint8_t*>(s), std::strlen(s));
}

// Centered representation in (-q/2, q/2].
struct OPoly {
  std::vector<long long> c;
};

inline long long center(long long v, long long q) {
  long long r = ((v % q) + q) % q;
  if (r > q / 2) r -= q;
  return r;
}

inline std::vector<unsigned> bits_lsb(ByteView data) {
  std::vector<unsigned> out;
  out.reserve(data.size() * 8);
  for (std::uint8_t byte : data)
    for (int b = 0; b < 8; ++b) out.push_back((byte >> b) & 1);
  return out;
}

inline OPoly parse_uniform(ByteView seedname, const Params& p) {
  unsigned cb = 0;
  while ((1u << cb) < p.q) ++cb;
  std::size_t len = 2 * ((static_cast<std::size_t>(p.n) * cb + 7) / 8) + 16;
  for (;;) {
    const Bytes stream = scc5g::shake128(seedname, len);
    const auto bits = bits_lsb(view(stream));
    OPoly poly;
    std::size_t pos = 0;
    while (poly.c.size() < p.n && pos + cb <= bits.size()) {
      long long v = 0;
      for (unsigned b = 0; b < cb; ++b) v |= static_cast<long long>(bits[pos + b]) << b;
      pos += cb;
      if (v < p.q) poly.c.push_back(center(v, p.q));
    }
    if (poly.c.size() == p.n) return poly;
    len *= 2;
  }
}

inline std::vector<std::vector<OPoly>> oracle_matrix(ByteView rho, const Params& p) {
  std::vector<std::vector<OPoly>> a(p.k, std::vector<OPoly>(p.k));
  for (unsigned i = 0; i < p.k; ++i)
    for (unsigned j = 0; j < p.k; ++j) {
      Bytes seed;
      scc5g::append(seed, olabel("scc5g.kem.mat"));
      scc5g::append(seed, rho);
      seed.push_back(static_cast<std::uint8_t>(i));
      seed.push_back(static_cast<std::uint8_t>(j));
      a[i][j] = parse_uniform(view(seed), p);
    }
  return a;
}

inline OPoly cbd_poly(ByteView seed, std::uint8_t nonce, const Params& p) {
  OPoly poly;
  poly.c.assign(p.n, 0);
  if (p.eta == 0) return poly;
  Bytes in;
  scc5g::append(in, olabel("scc5g.kem.noise"));
  scc5g::append(in, seed);
  in.push_back(nonce);
  const Bytes stream = scc5g::shake256(view(in), (2 * p.eta * p.n + 7) / 8);
  const auto bits = bits_lsb(view(stream));
  std::size_t pos = 0;
  for (unsigned i = 0; i < p.n; ++i) {
    long long a = 0, b = 0;
    for (unsigned t = 0; t < p.eta; ++t) a += bits[pos++];
    for (unsigned t = 0; t < p.eta; ++t) b += bits[pos++];
    poly.c[i] = a - b;
  }
  return poly;
}

// Direct negacyclic convolution, term by term.
inline OPoly conv(const OPoly& x, const OPoly& y, const Params& p) {
  OPoly out;
  out.c.assign(p.n, 0);
  for (unsigned i = 0; i < p.n; ++i)
    for (unsigned j = 0; j < p.n; ++j) {
      const long long prod = x.c[i] * y.c[j];
      if (i + j < p.n)
        out.c[i + j] += prod;
      else
        out.c[i + j - p.n] -= prod;
    }
  for (unsigned i = 0; i < p.n; ++i) out.c[i] = center(out.c[i], p.q);
  return out;
}

inline OPoly padd(const OPoly& x, const OPoly& y, const Params& p) {
  OPoly out;
  out.c.assign(p.n, 0);
  for (unsigned i = 0; i < p.n; ++i) out.c[i] = center(x.c[i] + y.c[i], p.q);
  return out;
}

inline OPoly psub(const OPoly& x, const OPoly& y, const Params& p) {
  OPoly out;
  out.c.assign(p.n, 0);
  for (unsigned i = 0; i < p.n; ++i) out.c[i] = center(x.c[i] - y.c[i], p.q);
  return out;
}

inline long long to_mod_q(long long centered, long long q) {
  return ((centered % q) + q) % q;
}

inline long long ocompress(long long x_mod_q, unsigned d, long long q) {
  const double scaled = std::ldexp(static_cast<double>(x_mod_q), static_cast<int>(d)) /
                        static_cast<double>(q);
  return std::llround(scaled) % (1ll << d);
}

inline long long odecompress(long long c, unsigned d, long long q) {
  const double scaled = static_cast<double>(q) * static_cast<double>(c) /
                        std::ldexp(1.0, static_cast<int>(d));
  return std::llround(scaled);
}

inline Bytes pack(const std::vector<long long>& values, unsigned bits) {
  Bytes out((values.size() * bits + 7) / 8, 0);
  std::size_t pos = 0;
  for (long long v : values) {
    for (unsigned b = 0; b < bits; ++b) {
      if ((v >> b) & 1) out[pos >> 3] |= static_cast<std::uint8_t>(1u << (pos & 7));
      ++pos;
    }
  }
  return out;
}

struct OracleKeyPair {
  Bytes pk_bytes;
  std::vector<OPoly> s;
  Bytes rho, sigma;
};

inline OracleKeyPair keygen(ByteView seed64, const Params& p) {
  OracleKeyPair kp;
  kp.rho.assign(seed64.begin(), seed64.begin() + 32);
  kp.sigma.assign(seed64.begin() + 32, seed64.end());

  const auto a = oracle_matrix(view(kp.rho), p);
  std::vector<OPoly> e(p.k);
  kp.s.resize(p.k);
  for (unsigned i = 0; i < p.k; ++i) kp.s[i] = cbd_poly(view(kp.sigma), static_cast<std::uint8_t>(i), p);
  for (unsigned i = 0; i < p.k; ++i)
    e[i] = cbd_poly(view(kp.sigma), static_cast<std::uint8_t>(p.k + i), p);

  // t = Compress(A s + e)
  std::vector<long long> packed_t;
  for (unsigned i = 0; i < p.k; ++i) {
    OPoly acc;
    acc.c.assign(p.n, 0);
    for (unsigned j = 0; j < p.k; ++j) acc = padd(acc, conv(a[i][j], kp.s[j], p), p);
    acc = padd(acc, e[i], p);
    for (unsigned idx = 0; idx < p.n; ++idx)
      packed_t.push_back(ocompress(to_mod_q(acc.c[idx], p.q), p.d_t, p.q));
  }

  kp.pk_bytes.push_back(static_cast<std::uint8_t>(0x10 | p.profile_id));
  scc5g::append(kp.pk_bytes, view(kp.rho));
  scc5g::append(kp.pk_bytes, view(pack(packed_t, p.d_t)));
  return kp;
}

inline Bytes encrypt(const Bytes& pk_bytes, ByteView message, ByteView rseed, const Params& p) {
  const Bytes rho(pk_bytes.begin() + 1, pk_bytes.begin() + 33);
  const auto a = oracle_matrix(view(rho), p);

  // unpack and decompress t
  const auto bits = bits_lsb(ByteView(pk_bytes).subspan(33));
  std::vector<OPoly> t_hat(p.k);
  std::size_t pos = 0;
  for (unsigned i = 0; i < p.k; ++i) {
    t_hat[i].c.assign(p.n, 0);
    for (unsigned idx = 0; idx < p.n; ++idx) {
      long long v = 0;
      for (unsigned b = 0; b < p.d_t; ++b) v |= static_cast<long long>(bits[pos + b]) << b;
      pos += p.d_t;
      t_hat[i].c[idx] = center(odecompress(v, p.d_t, p.q), p.q);
    }
  }

  std::vector<OPoly> r(p.k), e1(p.k);
  for (unsigned i = 0; i < p.k; ++i) r[i] = cbd_poly(rseed, static_cast<std::uint8_t>(i), p);
  for (unsigned i = 0; i < p.k; ++i)
    e1[i] = cbd_poly(rseed, static_cast<std::uint8_t>(p.k + i), p);
  const OPoly e2 = cbd_poly(rseed, static_cast<std::uint8_t>(2 * p.k), p);

  // u = Compress(A^T r + e1), v = Compress(t.r + e2 + msg)
  std::vector<long long> packed_u;
  for (unsigned i = 0; i < p.k; ++i) {
    OPoly acc;
    acc.c.assign(p.n, 0);
    for (unsigned j = 0; j < p.k; ++j) acc = padd(acc, conv(a[j][i], r[j], p), p);
    acc = padd(acc, e1[i], p);
    for (unsigned idx = 0; idx < p.n; ++idx)
      packed_u.push_back(ocompress(to_mod_q(acc.c[idx], p.q), p.d_u, p.q));
  }

  OPoly v_acc;
  v_acc.c.assign(p.n, 0);
  for (unsigned i = 0; i < p.k; ++i) v_acc = padd(v_acc, conv(t_hat[i], r[i], p), p);
  v_acc = padd(v_acc, e2, p);
  for (unsigned i = 0; i < p.n; ++i) {
    const unsigned bit = (message[i >> 3] >> (i & 7)) & 1;
    v_acc.c[i] = center(v_acc.c[i] + odecompress(bit, 1, p.q), p.q);
  }
  std::vector<long long> packed_v;
  for (unsigned i = 0; i < p.n; ++i)
    packed_v.push_back(ocompress(to_mod_q(v_acc.c[i], p.q), p.d_v, p.q));

  Bytes ct;
  ct.push_back(static_cast<std::uint8_t>(0x20 | p.profile_id));
  scc5g::append(ct, view(pack(packed_u, p.d_u)));
  scc5g::append(ct, view(pack(packed_v, p.d_v)));
  return ct;
}

inline Bytes decrypt(const OracleKeyPair& kp, ByteView ct_bytes, const Params& p) {
  const std::size_t u_bytes = (static_cast<std::size_t>(p.k) * p.n * p.d_u + 7) / 8;
  const auto ubits = bits_lsb(ct_bytes.subspan(1, u_bytes));
  const auto vbits = bits_lsb(ct_bytes.subspan(1 + u_bytes));

  std::vector<OPoly> u_hat(p.k);
  std::size_t pos = 0;
  for (unsigned i = 0; i < p.k; ++i) {
    u_hat[i].c.assign(p.n, 0);
    for (unsigned idx = 0; idx < p.n; ++idx) {
      long long v = 0;
      for (unsigned b = 0; b < p.d_u; ++b) v |= static_cast<long long>(ubits[pos + b]) << b;
      pos += p.d_u;
      u_hat[i].c[idx] = center(odecompress(v, p.d_u, p.q), p.q);
    }
  }
  OPoly v_hat;
  v_hat.c.assign(p.n, 0);
  pos = 0;
  for (unsigned idx = 0; idx < p.n; ++idx) {
    long long v = 0;
    for (unsigned b = 0; b < p.d_v; ++b) v |= static_cast<long long>(vbits[pos + b]) << b;
    pos += p.d_v;
    v_hat.c[idx] = center(odecompress(v, p.d_v, p.q), p.q);
  }

  OPoly w = v_hat;
  for (unsigned i = 0; i < p.k; ++i) w = psub(w, conv(kp.s[i], u_hat[i], p), p);

  Bytes message((p.n + 7) / 8, 0);
  for (unsigned i = 0; i < p.n; ++i)
    if (ocompress(to_mod_q(w.c[i], p.q), 1, p.q) & 1)
      message[i >> 3] |= static_cast<std::uint8_t>(1u << (i & 7));
  return message;
}

struct OracleEncaps {
  Bytes ct_bytes;
  Bytes secret;
};

inline Bytes derive_message(ByteView coins, const Params& p) {
  const scc5g::Digest32 mfull = scc5g::sha256({olabel("scc5g.kem.m"), coins});
  Bytes m(mfull.begin(), mfull.begin() + static_cast<std::ptrdiff_t>((p.n + 7) / 8));
  if (p.n % 8 != 0) m.back() &= static_cast<std::uint8_t>((1u << (p.n % 8)) - 1);
  return m;
}

inline OracleEncaps encapsulate(const Bytes& pk_bytes, ByteView coins, const Params& p) {
  const Bytes m = derive_message(coins, p);
  const scc5g::Digest32 pkh = scc5g::sha256(view(pk_bytes));
  const Bytes g = scc5g::shake256({olabel("scc5g.kem.g"), view(m), ByteView(pkh.data(), 32)}, 64);
  OracleEncaps out;
  out.ct_bytes = encrypt(pk_bytes, view(m), ByteView(g).subspan(32, 32), p);
  const scc5g::Digest32 cth = scc5g::sha256(view(out.ct_bytes));
  out.secret = scc5g::shake256(
      {olabel("scc5g.kem.k"), ByteView(g).subspan(0, 32), ByteView(cth.data(), 32)}, 32);
  return out;
}

inline Bytes decapsulate(const OracleKeyPair& kp, ByteView ct_bytes, const Params& p) {
  const Bytes m = decrypt(kp, ct_bytes, p);
  const scc5g::Digest32 pkh = scc5g::sha256(view(kp.pk_bytes));
  const Bytes g = scc5g::shake256({olabel("scc5g.kem.g"), view(m), ByteView(pkh.data(), 32)}, 64);
  const Bytes ct2 = encrypt(kp.pk_bytes, view(m), ByteView(g).subspan(32, 32), p);
  const scc5g::Digest32 cth = scc5g::sha256(ct_bytes);

  if (ct2.size() == ct_bytes.size() && std::memcmp(ct2.data(), ct_bytes.data(), ct2.size()) == 0)
    return scc5g::shake256(
        {olabel("scc5g.kem.k"), ByteView(g).subspan(0, 32), ByteView(cth.data(), 32)}, 32);
  const Bytes z = scc5g::shake256({olabel("scc5g.kem.z"), view(kp.sigma)}, 32);
  return scc5g::shake256({olabel("scc5g.kem.rej"), view(z), ByteView(cth.data(), 32)}, 32);
}

}  // namespace pke_oracle
