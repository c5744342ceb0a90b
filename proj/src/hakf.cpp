#include "scc5g/hakf.hpp"

#include <cstring>

#include "scc5g/aead.hpp"
#include "scc5g/errors.hpp"

namespace scc5g::hakf {

namespace {

constexpr char kDbMagic[4] = {'H', 'D', 'B', '1'};
constexpr std::uint8_t kRequestTag = 0x02;
constexpr std::uint8_t kResponseTag = 0x03;

ByteView label(const char* s) {
  return ByteView(reinterpret_cast<const std::uint8_t*>(s), std::strlen(s));
}

Digest32 seal_key(const kem::SharedSecret& ss) {
  Bytes k = shake256({label("scc5g.hakf.seal"), ByteView(ss.bytes.data(), ss.bytes.size())}, 32);
  Digest32 out;
  std::memcpy(out.data(), k.data(), 32);
  return out;
}

}  // namespace

bool CertificateDB::contains(std::string_view user_id) const {
  return users_.find(std::string(user_id)) != users_.end();
}

std::size_t CertificateDB::row_count() const {
  std::size_t n = 0;
  for (const auto& [id, img] : users_) n += img.entries.size();
  return n;
}

std::optional<Digest32> CertificateDB::lookup(std::string_view user_id,
                                              std::uint32_t challenge) const {
  auto it = users_.find(std::string(user_id));
  if (it == users_.end()) return std::nullopt;
  if (challenge >= it->second.entries.size()) return std::nullopt;
  return it->second.entries[challenge];
}

std::optional<unsigned> CertificateDB::challenge_bits_of(std::string_view user_id) const {
  auto it = users_.find(std::string(user_id));
  if (it == users_.end()) return std::nullopt;
  return it->second.m;
}

Bytes CertificateDB::encode() const {
  std::vector<Bytes> blobs;
  blobs.reserve(users_.size());
  std::size_t header = 4 + 4;
  for (const auto& [id, img] : users_) {
    blobs.push_back(img.encode());
    header += 1 + id.size() + 1 + 8;
  }
  Bytes out;
  append(out, ByteView(reinterpret_cast<const std::uint8_t*>(kDbMagic), 4));
  append_u32le(out, static_cast<std::uint32_t>(users_.size()));
  std::size_t offset = header;
  std::size_t i = 0;
  for (const auto& [id, img] : users_) {
    out.push_back(static_cast<std::uint8_t>(id.size()));
    append(out, view(to_bytes(id)));
    out.push_back(static_cast<std::uint8_t>(img.m));
    append_u64le(out, offset);
    offset += blobs[i++].size();
  }
  for (const Bytes& b : blobs) append(out, view(b));
  return out;
}

CertificateDB CertificateDB::decode(ByteView in) {
  if (in.size() < 8 || std::memcmp(in.data(), kDbMagic, 4) != 0)
    throw Error(ErrorClass::CorruptEncoding, "not a certificate database");
  const std::uint32_t count = read_u32le(in, 4);
  std::size_t off = 8;
  struct Entry {
    std::string id;
    std::uint64_t offset;
  };
  std::vector<Entry> index(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    if (off >= in.size()) throw Error(ErrorClass::CorruptEncoding, "database index truncated");
    const std::size_t id_len = in[off++];
    if (off + id_len + 1 + 8 > in.size())
      throw Error(ErrorClass::CorruptEncoding, "database index truncated");
    index[i].id.assign(reinterpret_cast<const char*>(in.data() + off), id_len);
    off += id_len + 1;  // m is carried inside the image itself
    index[i].offset = read_u64le(in, off);
    off += 8;
  }
  CertificateDB db;
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::size_t begin = index[i].offset;
    const std::size_t end = (i + 1 < count) ? index[i + 1].offset : in.size();
    if (begin > end || end > in.size())
      throw Error(ErrorClass::CorruptEncoding, "database image offsets inconsistent");
    hra::HraImage img = hra::HraImage::decode(in.subspan(begin, end - begin));
    if (img.user_id != index[i].id)
      throw Error(ErrorClass::CorruptEncoding, "database index does not match image");
    register_user(db, img);
  }
  return db;
}

void register_user(CertificateDB& db, const hra::HraImage& image) {
  if (image.user_id.empty() || image.user_id.size() > certs::kMaxUserIdLen)
    throw Error(ErrorClass::InvalidArgument, "user id must be 1..64 bytes");
  if (image.entries.size() != (std::size_t{1} << image.m))
    throw Error(ErrorClass::InvalidArgument, "image row count does not match challenge bits");
  if (db.users_.count(image.user_id) != 0)
    throw Error(ErrorClass::DuplicateUser, "user already registered: " + image.user_id);
  db.users_.emplace(image.user_id, image);
}

Bytes VerificationRequest::encode() const {
  const Bytes subj = certs::encode(subject_cert);
  const Bytes reqr = certs::encode(requester_cert);
  Bytes out;
  out.push_back(kRequestTag);
  append_u16le(out, static_cast<std::uint16_t>(subj.size()));
  append(out, view(subj));
  append_u16le(out, static_cast<std::uint16_t>(reqr.size()));
  append(out, view(reqr));
  return out;
}

VerificationRequest VerificationRequest::decode(ByteView in) {
  if (in.size() < 5 || in[0] != kRequestTag)
    throw Error(ErrorClass::CorruptEncoding, "bad verification request tag");
  std::size_t off = 1;
  const std::size_t subj_len = read_u16le(in, off);
  off += 2;
  if (off + subj_len + 2 > in.size())
    throw Error(ErrorClass::CorruptEncoding, "verification request truncated");
  VerificationRequest req;
  req.subject_cert = certs::decode(in.subspan(off, subj_len));
  off += subj_len;
  const std::size_t reqr_len = read_u16le(in, off);
  off += 2;
  if (off + reqr_len != in.size())
    throw Error(ErrorClass::CorruptEncoding, "verification request length mismatch");
  req.requester_cert = certs::decode(in.subspan(off, reqr_len));
  return req;
}

Digest32 VerificationRequest::digest() const {
  return sha256(view(encode()));
}

Bytes VerificationResponse::encode() const {
  Bytes out;
  out.push_back(kResponseTag);
  append_u16le(out, static_cast<std::uint16_t>(kem_ct.size()));
  append(out, view(kem_ct));
  append_u16le(out, static_cast<std::uint16_t>(sealed.size()));
  append(out, view(sealed));
  return out;
}

VerificationResponse VerificationResponse::decode(ByteView in) {
  if (in.size() < 5 || in[0] != kResponseTag)
    throw Error(ErrorClass::CorruptEncoding, "bad verification response tag");
  std::size_t off = 1;
  const std::size_t ct_len = read_u16le(in, off);
  off += 2;
  if (off + ct_len + 2 > in.size())
    throw Error(ErrorClass::CorruptEncoding, "verification response truncated");
  VerificationResponse resp;
  resp.kem_ct.assign(in.begin() + static_cast<std::ptrdiff_t>(off),
                     in.begin() + static_cast<std::ptrdiff_t>(off + ct_len));
  off += ct_len;
  const std::size_t sealed_len = read_u16le(in, off);
  off += 2;
  if (off + sealed_len != in.size())
    throw Error(ErrorClass::CorruptEncoding, "verification response length mismatch");
  resp.sealed.assign(in.begin() + static_cast<std::ptrdiff_t>(off), in.end());
  return resp;
}

bool evaluate(const CertificateDB& db, const certs::Certificate& subject) {
  if (!certs::verify_signature(subject)) return false;
  const auto m = db.challenge_bits_of(subject.user_id);
  if (!m) return false;  // unknown user: same outcome as a hash mismatch
  const std::uint32_t challenge =
      hra::challenge_of(subject.user_id, view(subject.public_key_bytes), *m);
  const auto stored = db.lookup(subject.user_id, challenge);
  if (!stored) return false;
  return ct_equal(ByteView(stored->data(), stored->size()),
                  ByteView(subject.hra_hash.data(), subject.hra_hash.size()));
}

VerificationResponse seal_response(const kem::KemPublicKey& requester_pk, const kem::KemParams& p,
                                   bool verdict, const Digest32& request_digest,
                                   ByteView coins32) {
  auto [ct, ss] = kem::encapsulate(requester_pk, coins32, p);
  Bytes plaintext;
  plaintext.push_back(verdict ? 0x01 : 0x00);
  append(plaintext, ByteView(request_digest.data(), request_digest.size()));
  VerificationResponse resp;
  resp.kem_ct = ct.encode(p);
  resp.sealed = aead_seal(seal_key(ss), view(plaintext), label("scc5g.hakf.resp"));
  return resp;
}

bool open_response(const kem::KemPrivateKey& sk, const kem::KemParams& p,
                   const VerificationResponse& resp, const Digest32& expected_digest) {
  const kem::Ciphertext ct = kem::Ciphertext::decode(view(resp.kem_ct), p);
  const kem::SharedSecret ss = kem::decapsulate(sk, ct, p);
  const auto plaintext = aead_open(seal_key(ss), view(resp.sealed), label("scc5g.hakf.resp"));
  if (!plaintext || plaintext->size() != 33 || ((*plaintext)[0] & ~1u) != 0)
    throw Error(ErrorClass::AuthFailure, "verification response failed to authenticate");
  if (!ct_equal(ByteView(plaintext->data() + 1, 32),
                ByteView(expected_digest.data(), expected_digest.size())))
    throw Error(ErrorClass::DigestMismatch, "response bound to a different request");
  return (*plaintext)[0] == 0x01;
}

VerificationResponse verify(const CertificateDB& db, const VerificationRequest& req,
                            ByteView coins32) {
  if (!certs::verify_signature(req.requester_cert))
    throw Error(ErrorClass::AuthFailure, "requester certificate signature invalid");
  const certs::CompositeKeyParts parts =
      certs::parse_composite_key(view(req.requester_cert.public_key_bytes));
  if (parts.kem_pk_bytes.empty())
    throw Error(ErrorClass::CorruptEncoding, "requester key missing");
  const kem::KemParams* p = kem::params_for_profile(parts.kem_pk_bytes[0] & 0x0f);
  if (p == nullptr || (parts.kem_pk_bytes[0] & 0xf0) != 0x10)
    throw Error(ErrorClass::CorruptEncoding, "requester key profile unknown");
  const kem::KemPublicKey requester_pk = kem::KemPublicKey::decode(view(parts.kem_pk_bytes), *p);

  const bool verdict = evaluate(db, req.subject_cert);
  return seal_response(requester_pk, *p, verdict, req.digest(), coins32);
}

}  // namespace scc5g::hakf
