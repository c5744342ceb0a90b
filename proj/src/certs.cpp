#include "scc5g/certs.hpp"

#include <cstring>

#include "scc5g/errors.hpp"

namespace scc5g::certs {

Bytes encode_composite_key(const kem::KemPublicKey& kem_pk, const Bytes& sign_pk,
                           const kem::KemParams& p) {
  const Bytes kem_bytes = kem_pk.encode(p);
  if (kem_bytes.size() > 0xffff || sign_pk.size() > 0xffff)
    throw Error(ErrorClass::InvalidArgument, "component key too large");
  Bytes out;
  out.push_back(kCompositeTag);
  append_u16le(out, static_cast<std::uint16_t>(kem_bytes.size()));
  append(out, view(kem_bytes));
  append_u16le(out, static_cast<std::uint16_t>(sign_pk.size()));
  append(out, view(sign_pk));
  return out;
}

CompositeKeyParts parse_composite_key(ByteView in) {
  if (in.size() < 5 || in[0] != kCompositeTag)
    throw Error(ErrorClass::CorruptEncoding, "bad composite key tag");
  std::size_t off = 1;
  const std::size_t kem_len = read_u16le(in, off);
  off += 2;
  if (off + kem_len + 2 > in.size()) throw Error(ErrorClass::CorruptEncoding, "composite key truncated");
  CompositeKeyParts parts;
  parts.kem_pk_bytes.assign(in.begin() + static_cast<std::ptrdiff_t>(off),
                            in.begin() + static_cast<std::ptrdiff_t>(off + kem_len));
  off += kem_len;
  const std::size_t sign_len = read_u16le(in, off);
  off += 2;
  if (off + sign_len != in.size())
    throw Error(ErrorClass::CorruptEncoding, "composite key length mismatch");
  parts.sign_pk_bytes.assign(in.begin() + static_cast<std::ptrdiff_t>(off), in.end());
  return parts;
}

Certificate issue_certificate(const UserIdentity& identity, sign::SignKeyPair& sign_kp,
                              const hra::HraDevice& dev, const kem::KemParams& p) {
  if (identity.user_id.empty() || identity.user_id.size() > kMaxUserIdLen)
    throw Error(ErrorClass::InvalidArgument, "user id must be 1..64 bytes");

  Certificate cert;
  cert.user_id = identity.user_id;
  cert.public_key_bytes = encode_composite_key(identity.kem_pk, identity.sign_pk, p);

  const std::uint32_t challenge =
      hra::challenge_of(identity.user_id, view(cert.public_key_bytes), dev.challenge_bits);
  const Digest32 response = hra::respond(dev, challenge);  // throws if tampered
  cert.hra_hash = sha256(ByteView(response.data(), response.size()));

  cert.signature = sign::sign(sign_kp, view(cert.public_key_bytes)).bytes;
  return cert;
}

bool verify_signature(const Certificate& cert) {
  try {
    const CompositeKeyParts parts = parse_composite_key(view(cert.public_key_bytes));
    return sign::verify(view(parts.sign_pk_bytes), view(cert.public_key_bytes),
                        view(cert.signature));
  } catch (const Error&) {
    return false;
  }
}

Bytes encode(const Certificate& cert) {
  if (cert.user_id.empty() || cert.user_id.size() > kMaxUserIdLen)
    throw Error(ErrorClass::InvalidArgument, "user id must be 1..64 bytes");
  if (cert.public_key_bytes.size() > 0xffff || cert.signature.size() > 0xffff)
    throw Error(ErrorClass::InvalidArgument, "certificate field too large");

  Bytes out;
  out.push_back(kCertVersion);
  out.push_back(static_cast<std::uint8_t>(cert.user_id.size()));
  append(out, view(to_bytes(cert.user_id)));
  append_u16le(out, static_cast<std::uint16_t>(cert.public_key_bytes.size()));
  append(out, view(cert.public_key_bytes));
  append_u16le(out, static_cast<std::uint16_t>(cert.signature.size()));
  append(out, view(cert.signature));
  append(out, ByteView(cert.hra_hash.data(), cert.hra_hash.size()));

  const std::size_t frames = (out.size() + kFrameUnit - 1) / kFrameUnit;
  out.resize(frames * kFrameUnit, 0);
  return out;
}

Certificate decode(ByteView in) {
  if (in.empty() || in.size() % kFrameUnit != 0)
    throw Error(ErrorClass::CorruptEncoding, "certificate frame size not a frame multiple");
  if (in[0] != kCertVersion) throw Error(ErrorClass::CorruptEncoding, "unknown certificate version");

  std::size_t off = 1;
  const std::size_t id_len = in[off++];
  if (id_len == 0 || id_len > kMaxUserIdLen)
    throw Error(ErrorClass::CorruptEncoding, "certificate id length out of range");
  if (off + id_len + 2 > in.size()) throw Error(ErrorClass::CorruptEncoding, "certificate truncated");

  Certificate cert;
  cert.user_id.assign(reinterpret_cast<const char*>(in.data() + off), id_len);
  off += id_len;

  const std::size_t pk_len = read_u16le(in, off);
  off += 2;
  if (off + pk_len + 2 > in.size()) throw Error(ErrorClass::CorruptEncoding, "certificate truncated");
  cert.public_key_bytes.assign(in.begin() + static_cast<std::ptrdiff_t>(off),
                               in.begin() + static_cast<std::ptrdiff_t>(off + pk_len));
  off += pk_len;

  const std::size_t sig_len = read_u16le(in, off);
  off += 2;
  if (off + sig_len + 32 > in.size()) throw Error(ErrorClass::CorruptEncoding, "certificate truncated");
  cert.signature.assign(in.begin() + static_cast<std::ptrdiff_t>(off),
                        in.begin() + static_cast<std::ptrdiff_t>(off + sig_len));
  off += sig_len;

  std::memcpy(cert.hra_hash.data(), in.data() + off, 32);
  off += 32;

  // Content must end inside the final frame, and all padding must be zero.
  const std::size_t frames = (off + kFrameUnit - 1) / kFrameUnit;
  if (frames * kFrameUnit != in.size())
    throw Error(ErrorClass::CorruptEncoding, "certificate over-long for its content");
  for (std::size_t i = off; i < in.size(); ++i)
    if (in[i] != 0) throw Error(ErrorClass::CorruptEncoding, "nonzero certificate padding");
  return cert;
}

Digest32 cert_digest(const Certificate& cert) {
  return sha256(view(encode(cert)));
}

std::size_t encoded_frame_size(ByteView in) {
  if (in.size() < 2) throw Error(ErrorClass::CorruptEncoding, "certificate truncated");
  std::size_t off = 1;
  const std::size_t id_len = in[off++];
  off += id_len;
  const std::size_t pk_len = read_u16le(in, off);
  off += 2 + pk_len;
  const std::size_t sig_len = read_u16le(in, off);
  off += 2 + sig_len + 32;
  const std::size_t frames = (off + kFrameUnit - 1) / kFrameUnit;
  if (frames * kFrameUnit > in.size())
    throw Error(ErrorClass::CorruptEncoding, "certificate truncated");
  return frames * kFrameUnit;
}

}  // namespace scc5g::certs
