#include "scc5g/kem.hpp"

#include <cstring>

#include "scc5g/errors.hpp"

namespace scc5g::kem {

namespace {

constexpr char kLabelMatrix[] = "scc5g.kem.mat";
constexpr char kLabelNoise[] = "scc5g.kem.noise";
constexpr char kLabelMsg[] = "scc5g.kem.m";
constexpr char kLabelG[] = "scc5g.kem.g";
constexpr char kLabelKey[] = "scc5g.kem.k";
constexpr char kLabelReject[] = "scc5g.kem.rej";
constexpr char kLabelZ[] = "scc5g.kem.z";

ByteView label(const char* s) {
  return ByteView(reinterpret_cast<const std::uint8_t*>(s), std::strlen(s));
}

bool is_prime(std::uint32_t q) {
  if (q < 2) return false;
  for (std::uint32_t d = 2; d * d <= q; ++d)
    if (q % d == 0) return false;
  return true;
}

void check_poly(const Poly& x, const KemParams& p, const char* what) {
  if (x.c.size() != p.n) throw Error(ErrorClass::CorruptEncoding, std::string(what) + ": bad ring dimension");
}

void check_vec(const PolyVec& v, const KemParams& p, const char* what) {
  if (v.size() != p.k) throw Error(ErrorClass::CorruptEncoding, std::string(what) + ": bad vector length");
  for (const Poly& x : v) check_poly(x, p, what);
}

// LSB-first bit cursor over a byte stream.
struct BitReader {
  ByteView data;
  std::size_t bitpos = 0;

  bool has(unsigned bits) const { return bitpos + bits <= data.size() * 8; }
  std::uint32_t take(unsigned bits) {
    std::uint32_t v = 0;
    for (unsigned b = 0; b < bits; ++b) {
      v |= static_cast<std::uint32_t>((data[bitpos >> 3] >> (bitpos & 7)) & 1) << b;
      ++bitpos;
    }
    return v;
  }
};

Poly poly_cbd(ByteView stream, const KemParams& p) {
  Poly out = poly_zero(p);
  if (p.eta == 0) return out;
  BitReader r{stream};
  for (unsigned i = 0; i < p.n; ++i) {
    std::int32_t a = 0, b = 0;
    for (unsigned t = 0; t < p.eta; ++t) a += static_cast<std::int32_t>(r.take(1));
    for (unsigned t = 0; t < p.eta; ++t) b += static_cast<std::int32_t>(r.take(1));
    std::int32_t v = a - b;
    out.c[i] = static_cast<std::uint16_t>((v % static_cast<std::int32_t>(p.q) +
                                           static_cast<std::int32_t>(p.q)) %
                                          static_cast<std::int32_t>(p.q));
  }
  return out;
}

Poly sample_noise_poly(ByteView seed, std::uint8_t nonce, const KemParams& p) {
  if (p.eta == 0) return poly_zero(p);
  const std::size_t need = (2 * p.eta * p.n + 7) / 8;
  Bytes stream = shake256({label(kLabelNoise), seed, ByteView(&nonce, 1)}, need);
  return poly_cbd(stream, p);
}

Bytes pack_vec(const PolyVec& v, unsigned d) {
  std::vector<std::uint16_t> flat;
  for (const Poly& x : v) flat.insert(flat.end(), x.c.begin(), x.c.end());
  return pack_bits(flat, d);
}

PolyVec unpack_vec(ByteView in, unsigned count_polys, unsigned d, const KemParams& p) {
  std::vector<std::uint16_t> flat = unpack_bits(in, count_polys * p.n, d);
  PolyVec out(count_polys);
  for (unsigned i = 0; i < count_polys; ++i)
    out[i].c.assign(flat.begin() + i * p.n, flat.begin() + (i + 1) * p.n);
  return out;
}

// Rejects non-canonical encodings where spare bits in the final byte are set.
void check_spare_bits(ByteView packed, std::size_t count, unsigned d) {
  const std::size_t used_bits = count * d;
  if (used_bits % 8 == 0) return;
  const std::uint8_t mask = static_cast<std::uint8_t>(0xff << (used_bits % 8));
  if ((packed[packed.size() - 1] & mask) != 0)
    throw Error(ErrorClass::CorruptEncoding, "nonzero spare bits");
}

Poly message_poly(ByteView message, const KemParams& p) {
  Poly out = poly_zero(p);
  for (unsigned i = 0; i < p.n; ++i) {
    const unsigned bit = (message[i >> 3] >> (i & 7)) & 1;
    out.c[i] = static_cast<std::uint16_t>(decompress(bit, 1, p.q));
  }
  return out;
}

Bytes truncate_to_message(ByteView bytes, const KemParams& p) {
  Bytes m(bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>(p.message_size()));
  if (p.n % 8 != 0) m.back() &= static_cast<std::uint8_t>((1u << (p.n % 8)) - 1);
  return m;
}

}  // namespace

void KemParams::validate() const {
  if (n == 0 || n > 256 || (n & (n - 1)) != 0)
    throw Error(ErrorClass::InvalidArgument, "n must be a power of two in [1, 256]");
  if (k == 0 || k > 8) throw Error(ErrorClass::InvalidArgument, "k out of range");
  if (q < 3 || q >= (1u << 15) || !is_prime(q))
    throw Error(ErrorClass::InvalidArgument, "q must be a small odd prime");
  if (eta > 7) throw Error(ErrorClass::InvalidArgument, "eta out of range");
  const unsigned cb = coeff_bits();
  for (unsigned d : {d_t, d_u, d_v})
    if (d < 1 || d > cb) throw Error(ErrorClass::InvalidArgument, "compression width out of range");
}

unsigned KemParams::coeff_bits() const {
  unsigned b = 0;
  while ((1u << b) < q) ++b;
  return b;
}

std::size_t KemParams::public_key_size() const {
  return 1 + 32 + (static_cast<std::size_t>(k) * n * d_t + 7) / 8;
}

std::size_t KemParams::ciphertext_size() const {
  return 1 + (static_cast<std::size_t>(k) * n * d_u + 7) / 8 + (static_cast<std::size_t>(n) * d_v + 7) / 8;
}

std::size_t KemParams::message_size() const {
  return (n + 7) / 8;
}

const KemParams& default_params() {
  static const KemParams p{256, 3, 3329, 2, 12, 10, 4, 0x0};
  return p;
}

const KemParams& toy_params() {
  static const KemParams p{4, 2, 17, 0, 5, 5, 3, 0x1};
  return p;
}

const KemParams& toy_noisy_params() {
  static const KemParams p{4, 2, 17, 1, 5, 5, 3, 0x2};
  return p;
}

const KemParams* params_for_profile(std::uint8_t profile_id) {
  switch (profile_id) {
    case 0x0: return &default_params();
    case 0x1: return &toy_params();
    case 0x2: return &toy_noisy_params();
    default: return nullptr;
  }
}

Poly poly_zero(const KemParams& p) {
  Poly out;
  out.c.assign(p.n, 0);
  return out;
}

Poly poly_add(const Poly& a, const Poly& b, const KemParams& p) {
  Poly out = poly_zero(p);
  for (unsigned i = 0; i < p.n; ++i)
    out.c[i] = static_cast<std::uint16_t>((a.c[i] + b.c[i]) % p.q);
  return out;
}

Poly poly_sub(const Poly& a, const Poly& b, const KemParams& p) {
  Poly out = poly_zero(p);
  for (unsigned i = 0; i < p.n; ++i)
    out.c[i] = static_cast<std::uint16_t>((a.c[i] + p.q - b.c[i]) % p.q);
  return out;
}

Poly poly_mul(const Poly& a, const Poly& b, const KemParams& p) {
  const unsigned n = p.n;
  std::vector<std::int64_t> acc(n, 0);
  for (unsigned i = 0; i < n; ++i) {
    const std::int64_t ai = a.c[i];
    if (ai == 0) continue;
    for (unsigned j = 0; j < n; ++j) {
      const unsigned idx = i + j;
      // X^n = -1 in R_q
      if (idx < n)
        acc[idx] += ai * b.c[j];
      else
        acc[idx - n] -= ai * b.c[j];
    }
  }
  Poly out = poly_zero(p);
  const std::int64_t q = p.q;
  for (unsigned i = 0; i < n; ++i) out.c[i] = static_cast<std::uint16_t>(((acc[i] % q) + q) % q);
  return out;
}

PolyVec matvec_mul(const Matrix& a, const PolyVec& x, const KemParams& p, bool transpose) {
  PolyVec out(p.k, poly_zero(p));
  for (unsigned i = 0; i < p.k; ++i)
    for (unsigned j = 0; j < p.k; ++j) {
      const Poly& cell = transpose ? a[j][i] : a[i][j];
      out[i] = poly_add(out[i], poly_mul(cell, x[j], p), p);
    }
  return out;
}

Poly inner_product(const PolyVec& a, const PolyVec& b, const KemParams& p) {
  Poly out = poly_zero(p);
  for (unsigned i = 0; i < p.k; ++i) out = poly_add(out, poly_mul(a[i], b[i], p), p);
  return out;
}

std::uint32_t compress(std::uint32_t x, unsigned d, std::uint32_t q) {
  const std::uint64_t num = (static_cast<std::uint64_t>(x) << (d + 1)) + q;
  return static_cast<std::uint32_t>(num / (2 * static_cast<std::uint64_t>(q))) & ((1u << d) - 1);
}

std::uint32_t decompress(std::uint32_t c, unsigned d, std::uint32_t q) {
  return static_cast<std::uint32_t>((static_cast<std::uint64_t>(q) * c + (1u << (d - 1))) >> d);
}

std::uint32_t compress_bound(std::uint32_t q, unsigned d) {
  return (q + (1u << d)) >> (d + 1);
}

std::uint32_t centered_distance(std::uint32_t a, std::uint32_t b, std::uint32_t q) {
  const std::uint32_t diff = (a + q - b) % q;
  return std::min(diff, q - diff);
}

Poly compress_poly(const Poly& x, unsigned d, const KemParams& p) {
  Poly out = poly_zero(p);
  for (unsigned i = 0; i < p.n; ++i)
    out.c[i] = static_cast<std::uint16_t>(compress(x.c[i], d, p.q));
  return out;
}

Poly decompress_poly(const Poly& x, unsigned d, const KemParams& p) {
  Poly out = poly_zero(p);
  for (unsigned i = 0; i < p.n; ++i)
    out.c[i] = static_cast<std::uint16_t>(decompress(x.c[i], d, p.q));
  return out;
}

Matrix expand_matrix(ByteView rho, const KemParams& p) {
  if (rho.size() != 32) throw Error(ErrorClass::InvalidArgument, "rho must be 32 bytes");
  const unsigned cb = p.coeff_bits();
  Matrix a(p.k, PolyVec(p.k, poly_zero(p)));
  for (unsigned i = 0; i < p.k; ++i) {
    for (unsigned j = 0; j < p.k; ++j) {
      const std::uint8_t cell[2] = {static_cast<std::uint8_t>(i), static_cast<std::uint8_t>(j)};
      Bytes seed;
      append(seed, label(kLabelMatrix));
      append(seed, rho);
      append(seed, ByteView(cell, 2));
      // Rejection sampling over the XOF stream; on under-run the stream is
      // re-squeezed at double length, which keeps previously accepted
      // coefficients unchanged (XOF prefix property).
      std::size_t len = 2 * ((static_cast<std::size_t>(p.n) * cb + 7) / 8) + 16;
      for (;;) {
        Bytes stream = shake128(view(seed), len);
        BitReader r{view(stream)};
        unsigned got = 0;
        while (got < p.n && r.has(cb)) {
          const std::uint32_t cand = r.take(cb);
          if (cand < p.q) a[i][j].c[got++] = static_cast<std::uint16_t>(cand);
        }
        if (got == p.n) break;
        len *= 2;
      }
    }
  }
  return a;
}

std::pair<PolyVec, PolyVec> sample_noise(ByteView sigma, const KemParams& p) {
  if (sigma.size() != 32) throw Error(ErrorClass::InvalidArgument, "sigma must be 32 bytes");
  PolyVec s(p.k), e(p.k);
  for (unsigned i = 0; i < p.k; ++i) s[i] = sample_noise_poly(sigma, static_cast<std::uint8_t>(i), p);
  for (unsigned i = 0; i < p.k; ++i)
    e[i] = sample_noise_poly(sigma, static_cast<std::uint8_t>(p.k + i), p);
  return {std::move(s), std::move(e)};
}

Bytes KemPublicKey::encode(const KemParams& p) const {
  Bytes out;
  out.push_back(static_cast<std::uint8_t>(0x10 | p.profile_id));
  append(out, ByteView(rho.data(), rho.size()));
  append(out, pack_vec(t, p.d_t));
  return out;
}

KemPublicKey KemPublicKey::decode(ByteView in, const KemParams& p) {
  if (in.size() != p.public_key_size())
    throw Error(ErrorClass::CorruptEncoding, "public key length mismatch");
  if (in[0] != (0x10 | p.profile_id))
    throw Error(ErrorClass::CorruptEncoding, "public key format tag mismatch");
  KemPublicKey pk;
  pk.profile_id = p.profile_id;
  std::memcpy(pk.rho.data(), in.data() + 1, 32);
  ByteView packed = in.subspan(33);
  check_spare_bits(packed, static_cast<std::size_t>(p.k) * p.n, p.d_t);
  pk.t = unpack_vec(packed, p.k, p.d_t, p);
  return pk;
}

Bytes Ciphertext::encode(const KemParams& p) const {
  Bytes out;
  out.push_back(static_cast<std::uint8_t>(0x20 | p.profile_id));
  append(out, pack_vec(u, p.d_u));
  append(out, pack_bits(v.c, p.d_v));
  return out;
}

Ciphertext Ciphertext::decode(ByteView in, const KemParams& p) {
  if (in.size() != p.ciphertext_size())
    throw Error(ErrorClass::CorruptEncoding, "ciphertext length mismatch");
  if (in[0] != (0x20 | p.profile_id))
    throw Error(ErrorClass::CorruptEncoding, "ciphertext format tag mismatch");
  const std::size_t u_bytes = (static_cast<std::size_t>(p.k) * p.n * p.d_u + 7) / 8;
  Ciphertext ct;
  ct.profile_id = p.profile_id;
  ByteView packed_u = in.subspan(1, u_bytes);
  ByteView packed_v = in.subspan(1 + u_bytes);
  check_spare_bits(packed_u, static_cast<std::size_t>(p.k) * p.n, p.d_u);
  check_spare_bits(packed_v, p.n, p.d_v);
  ct.u = unpack_vec(packed_u, p.k, p.d_u, p);
  ct.v.c = unpack_bits(packed_v, p.n, p.d_v);
  return ct;
}

std::pair<KemPublicKey, KemPrivateKey> keygen(ByteView seed64, const KemParams& p) {
  p.validate();
  if (seed64.size() != 64) throw Error(ErrorClass::InvalidArgument, "keygen seed must be 64 bytes");
  ByteView rho = seed64.subspan(0, 32);
  ByteView sigma = seed64.subspan(32, 32);

  Matrix a = expand_matrix(rho, p);
  auto [s, e] = sample_noise(sigma, p);
  PolyVec t_raw = matvec_mul(a, s, p, /*transpose=*/false);
  for (unsigned i = 0; i < p.k; ++i) t_raw[i] = poly_add(t_raw[i], e[i], p);

  KemPublicKey pk;
  pk.profile_id = p.profile_id;
  std::memcpy(pk.rho.data(), rho.data(), 32);
  pk.t.resize(p.k);
  for (unsigned i = 0; i < p.k; ++i) pk.t[i] = compress_poly(t_raw[i], p.d_t, p);

  KemPrivateKey sk;
  sk.profile_id = p.profile_id;
  sk.s = std::move(s);
  std::memcpy(sk.sigma.data(), sigma.data(), 32);
  Bytes z = shake256({label(kLabelZ), sigma}, 32);
  std::memcpy(sk.z.data(), z.data(), 32);
  sk.pk = pk;
  return {pk, sk};
}

Ciphertext pke_encrypt(const KemPublicKey& pk, ByteView message, ByteView rseed32,
                       const KemParams& p) {
  check_vec(pk.t, p, "public key");
  if (message.size() != p.message_size())
    throw Error(ErrorClass::InvalidArgument, "message length mismatch");
  if (rseed32.size() != 32) throw Error(ErrorClass::InvalidArgument, "rseed must be 32 bytes");

  Matrix a = expand_matrix(ByteView(pk.rho.data(), 32), p);
  PolyVec r(p.k), e1(p.k);
  for (unsigned i = 0; i < p.k; ++i)
    r[i] = sample_noise_poly(rseed32, static_cast<std::uint8_t>(i), p);
  for (unsigned i = 0; i < p.k; ++i)
    e1[i] = sample_noise_poly(rseed32, static_cast<std::uint8_t>(p.k + i), p);
  Poly e2 = sample_noise_poly(rseed32, static_cast<std::uint8_t>(2 * p.k), p);

  PolyVec t_hat(p.k);
  for (unsigned i = 0; i < p.k; ++i) t_hat[i] = decompress_poly(pk.t[i], p.d_t, p);

  PolyVec u_raw = matvec_mul(a, r, p, /*transpose=*/true);
  for (unsigned i = 0; i < p.k; ++i) u_raw[i] = poly_add(u_raw[i], e1[i], p);

  Poly v_raw = inner_product(t_hat, r, p);
  v_raw = poly_add(v_raw, e2, p);
  v_raw = poly_add(v_raw, message_poly(message, p), p);

  Ciphertext ct;
  ct.profile_id = p.profile_id;
  ct.u.resize(p.k);
  for (unsigned i = 0; i < p.k; ++i) ct.u[i] = compress_poly(u_raw[i], p.d_u, p);
  ct.v = compress_poly(v_raw, p.d_v, p);
  return ct;
}

Bytes pke_decrypt(const KemPrivateKey& sk, const Ciphertext& ct, const KemParams& p) {
  check_vec(ct.u, p, "ciphertext");
  check_poly(ct.v, p, "ciphertext");
  PolyVec u_hat(p.k);
  for (unsigned i = 0; i < p.k; ++i) u_hat[i] = decompress_poly(ct.u[i], p.d_u, p);
  Poly v_hat = decompress_poly(ct.v, p.d_v, p);
  Poly w = poly_sub(v_hat, inner_product(sk.s, u_hat, p), p);

  Bytes message(p.message_size(), 0);
  for (unsigned i = 0; i < p.n; ++i)
    if (compress(w.c[i], 1, p.q) & 1) message[i >> 3] |= static_cast<std::uint8_t>(1u << (i & 7));
  return message;
}

std::pair<Ciphertext, SharedSecret> encapsulate(const KemPublicKey& pk, ByteView coins32,
                                                const KemParams& p) {
  check_vec(pk.t, p, "public key");
  if (coins32.size() != 32) throw Error(ErrorClass::InvalidArgument, "coins must be 32 bytes");

  Digest32 mfull = sha256({label(kLabelMsg), coins32});
  Bytes m = truncate_to_message(ByteView(mfull.data(), mfull.size()), p);
  Digest32 pkh = sha256(view(pk.encode(p)));

  Bytes g = shake256({label(kLabelG), view(m), ByteView(pkh.data(), 32)}, 64);
  ByteView kbar = ByteView(g).subspan(0, 32);
  ByteView rseed = ByteView(g).subspan(32, 32);

  Ciphertext ct = pke_encrypt(pk, view(m), rseed, p);
  Digest32 cth = sha256(view(ct.encode(p)));

  SharedSecret ss;
  Bytes key = shake256({label(kLabelKey), kbar, ByteView(cth.data(), 32)}, 32);
  std::memcpy(ss.bytes.data(), key.data(), 32);
  return {std::move(ct), ss};
}

SharedSecret decapsulate(const KemPrivateKey& sk, const Ciphertext& ct, const KemParams& p) {
  check_vec(ct.u, p, "ciphertext");
  check_poly(ct.v, p, "ciphertext");

  Bytes m = pke_decrypt(sk, ct, p);
  Digest32 pkh = sha256(view(sk.pk.encode(p)));
  Bytes g = shake256({label(kLabelG), view(m), ByteView(pkh.data(), 32)}, 64);
  ByteView kbar = ByteView(g).subspan(0, 32);
  ByteView rseed = ByteView(g).subspan(32, 32);

  Ciphertext ct2 = pke_encrypt(sk.pk, view(m), rseed, p);
  const Bytes ct_bytes = ct.encode(p);
  Digest32 cth = sha256(view(ct_bytes));

  Bytes accept = shake256({label(kLabelKey), kbar, ByteView(cth.data(), 32)}, 32);
  Bytes reject =
      shake256({label(kLabelReject), ByteView(sk.z.data(), 32), ByteView(cth.data(), 32)}, 32);

  // Branch-free select keeps the accept/reject paths doing identical work.
  const std::uint8_t mask = ct_equal(view(ct_bytes), view(ct2.encode(p))) ? 0xff : 0x00;
  SharedSecret ss;
  for (int i = 0; i < 32; ++i)
    ss.bytes[i] = static_cast<std::uint8_t>((accept[i] & mask) | (reject[i] & static_cast<std::uint8_t>(~mask)));
  return ss;
}

}  // namespace scc5g::kem
