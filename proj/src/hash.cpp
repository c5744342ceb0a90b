#include "scc5g/hash.hpp"

#include <openssl/crypto.h>
#include <openssl/evp.h>
#include <openssl/rand.h>

#include <cstring>

#include "scc5g/errors.hpp"

namespace scc5g {

namespace {

void evp_check(int ok, const char* what) {
  if (ok != 1) throw Error(ErrorClass::InvalidArgument, std::string("openssl: ") + what);
}

Bytes xof(const char* alg, std::initializer_list<ByteView> parts, std::size_t out_len) {
  const EVP_MD* md = EVP_get_digestbyname(alg);
  if (md == nullptr) throw Error(ErrorClass::InvalidArgument, std::string("missing digest ") + alg);
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  Bytes out(out_len);
  evp_check(EVP_DigestInit_ex(ctx, md, nullptr), "xof init");
  for (ByteView p : parts) evp_check(EVP_DigestUpdate(ctx, p.data(), p.size()), "xof update");
  evp_check(EVP_DigestFinalXOF(ctx, out.data(), out.size()), "xof final");
  EVP_MD_CTX_free(ctx);
  return out;
}

}  // namespace

Digest32 sha256(ByteView data) {
  return sha256({data});
}

Digest32 sha256(std::initializer_list<ByteView> parts) {
  Sha256 h;
  for (ByteView p : parts) h.update(p);
  return h.digest();
}

Bytes shake128(ByteView input, std::size_t out_len) {
  return xof("SHAKE128", {input}, out_len);
}

Bytes shake256(ByteView input, std::size_t out_len) {
  return xof("SHAKE256", {input}, out_len);
}

Bytes shake256(std::initializer_list<ByteView> parts, std::size_t out_len) {
  return xof("SHAKE256", parts, out_len);
}

Sha256::Sha256() {
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  evp_check(EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr), "sha256 init");
  ctx_ = ctx;
}

Sha256::Sha256(const Sha256& other) {
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  evp_check(EVP_MD_CTX_copy_ex(ctx, static_cast<EVP_MD_CTX*>(other.ctx_)), "sha256 copy");
  ctx_ = ctx;
}

Sha256& Sha256::operator=(const Sha256& other) {
  if (this != &other) {
    evp_check(EVP_MD_CTX_copy_ex(static_cast<EVP_MD_CTX*>(ctx_),
                                 static_cast<EVP_MD_CTX*>(other.ctx_)),
              "sha256 copy");
  }
  return *this;
}

Sha256::~Sha256() {
  EVP_MD_CTX_free(static_cast<EVP_MD_CTX*>(ctx_));
}

void Sha256::update(ByteView data) {
  evp_check(EVP_DigestUpdate(static_cast<EVP_MD_CTX*>(ctx_), data.data(), data.size()),
            "sha256 update");
}

Digest32 Sha256::digest() const {
  Sha256 snapshot(*this);
  Digest32 out{};
  unsigned len = 0;
  evp_check(EVP_DigestFinal_ex(static_cast<EVP_MD_CTX*>(snapshot.ctx_), out.data(), &len),
            "sha256 final");
  return out;
}

bool ct_equal(ByteView a, ByteView b) {
  if (a.size() != b.size()) return false;
  return CRYPTO_memcmp(a.data(), b.data(), a.size()) == 0;
}

Drbg::Drbg(ByteView seed) : seed_(seed.begin(), seed.end()) {}

Drbg::Drbg(std::uint64_t seed) {
  seed_.resize(8);
  for (int i = 0; i < 8; ++i) seed_[i] = static_cast<std::uint8_t>(seed >> (8 * i));
}

void Drbg::fill(std::span<std::uint8_t> out) {
  Bytes counter;
  append_u64le(counter, counter_++);
  Bytes block = shake256({view(seed_), view(counter)}, out.size());
  std::memcpy(out.data(), block.data(), out.size());
}

Bytes Drbg::bytes(std::size_t n) {
  Bytes out(n);
  fill(out);
  return out;
}

std::array<std::uint8_t, 32> Drbg::seed32() {
  std::array<std::uint8_t, 32> out{};
  fill(out);
  return out;
}

std::uint64_t Drbg::next_u64() {
  std::array<std::uint8_t, 8> buf{};
  fill(buf);
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | buf[i];
  return v;
}

void system_random(std::span<std::uint8_t> out) {
  evp_check(RAND_bytes(out.data(), static_cast<int>(out.size())), "rand bytes");
}

}  // namespace scc5g
