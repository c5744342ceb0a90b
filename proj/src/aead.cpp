#include "scc5g/aead.hpp"

#include <openssl/evp.h>

#include <memory>

#include "scc5g/errors.hpp"

namespace scc5g {

namespace {
constexpr std::size_t kTagLen = 16;
const unsigned char kZeroIv[12] = {0};

struct CtxDeleter {
  void operator()(EVP_CIPHER_CTX* c) const { EVP_CIPHER_CTX_free(c); }
};
using Ctx = std::unique_ptr<EVP_CIPHER_CTX, CtxDeleter>;
}  // namespace

Bytes aead_seal(const Digest32& key, ByteView plaintext, ByteView aad) {
  Ctx ctx(EVP_CIPHER_CTX_new());
  if (EVP_EncryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, key.data(), kZeroIv) != 1)
    throw Error(ErrorClass::InvalidArgument, "gcm init");
  int len = 0;
  if (!aad.empty() &&
      EVP_EncryptUpdate(ctx.get(), nullptr, &len, aad.data(), static_cast<int>(aad.size())) != 1)
    throw Error(ErrorClass::InvalidArgument, "gcm aad");
  Bytes out(plaintext.size() + kTagLen);
  if (EVP_EncryptUpdate(ctx.get(), out.data(), &len, plaintext.data(),
                        static_cast<int>(plaintext.size())) != 1)
    throw Error(ErrorClass::InvalidArgument, "gcm encrypt");
  int fin = 0;
  if (EVP_EncryptFinal_ex(ctx.get(), out.data() + len, &fin) != 1)
    throw Error(ErrorClass::InvalidArgument, "gcm final");
  if (EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_GET_TAG, kTagLen,
                          out.data() + plaintext.size()) != 1)
    throw Error(ErrorClass::InvalidArgument, "gcm tag");
  return out;
}

std::optional<Bytes> aead_open(const Digest32& key, ByteView sealed, ByteView aad) {
  if (sealed.size() < kTagLen) return std::nullopt;
  const std::size_t ptlen = sealed.size() - kTagLen;
  Ctx ctx(EVP_CIPHER_CTX_new());
  if (EVP_DecryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, key.data(), kZeroIv) != 1)
    return std::nullopt;
  int len = 0;
  if (!aad.empty() &&
      EVP_DecryptUpdate(ctx.get(), nullptr, &len, aad.data(), static_cast<int>(aad.size())) != 1)
    return std::nullopt;
  Bytes out(ptlen);
  if (EVP_DecryptUpdate(ctx.get(), out.data(), &len, sealed.data(), static_cast<int>(ptlen)) != 1)
    return std::nullopt;
  Bytes tag(sealed.begin() + static_cast<std::ptrdiff_t>(ptlen), sealed.end());
  if (EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_TAG, kTagLen, tag.data()) != 1)
    return std::nullopt;
  int fin = 0;
  if (EVP_DecryptFinal_ex(ctx.get(), out.data() + len, &fin) != 1) return std::nullopt;
  return out;
}

}  // namespace scc5g
