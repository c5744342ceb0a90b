#include "scc5g/hra.hpp"

#include <cstring>

#include "scc5g/errors.hpp"

namespace scc5g::hra {

namespace {

constexpr char kImageMagic[4] = {'H', 'R', 'I', '1'};
constexpr std::uint8_t kHashTagSha256 = 0x01;

ByteView label(const char* s) {
  return ByteView(reinterpret_cast<const std::uint8_t*>(s), std::strlen(s));
}

void check_m(unsigned m) {
  if (m < 1 || m > 20) throw Error(ErrorClass::InvalidArgument, "challenge bits out of range");
}

}  // namespace

HraDevice make_device(ByteView secret32, unsigned m) {
  if (secret32.size() != 32) throw Error(ErrorClass::InvalidArgument, "device secret must be 32 bytes");
  check_m(m);
  HraDevice dev;
  std::memcpy(dev.device_secret.data(), secret32.data(), 32);
  dev.challenge_bits = m;
  return dev;
}

std::uint32_t challenge_of(std::string_view user_id, ByteView public_key_bytes, unsigned m) {
  if (m < 1 || m > 32) throw Error(ErrorClass::InvalidArgument, "challenge bits out of range");
  const std::uint8_t sep = 0x00;
  Digest32 h = sha256({ByteView(reinterpret_cast<const std::uint8_t*>(user_id.data()), user_id.size()),
                       ByteView(&sep, 1), public_key_bytes});
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | h[i];
  return m == 32 ? v : v & ((1u << m) - 1);
}

Digest32 respond(const HraDevice& dev, std::uint32_t challenge) {
  if (dev.tamper_flag)
    throw Error(ErrorClass::TamperedDevice, "device destroyed itself after tampering");
  if (challenge >= (1u << dev.challenge_bits))
    throw Error(ErrorClass::InvalidArgument, "challenge outside device space");
  Bytes c;
  append_u32le(c, challenge);
  Bytes r = shake256({label("scc5g.hra.resp"),
                      ByteView(dev.device_secret.data(), dev.device_secret.size()), view(c)},
                     32);
  Digest32 out;
  std::memcpy(out.data(), r.data(), 32);
  return out;
}

Bytes HraImage::encode() const {
  if (user_id.size() > 64) throw Error(ErrorClass::InvalidArgument, "user id too long");
  if (entries.size() != (std::size_t{1} << m))
    throw Error(ErrorClass::InvalidArgument, "image row count mismatch");
  Bytes out;
  append(out, ByteView(reinterpret_cast<const std::uint8_t*>(kImageMagic), 4));
  out.push_back(static_cast<std::uint8_t>(user_id.size()));
  append(out, view(to_bytes(user_id)));
  out.push_back(static_cast<std::uint8_t>(m));
  out.push_back(kHashTagSha256);
  for (const Digest32& e : entries) append(out, ByteView(e.data(), e.size()));
  return out;
}

HraImage HraImage::decode(ByteView in) {
  if (in.size() < 7 || std::memcmp(in.data(), kImageMagic, 4) != 0)
    throw Error(ErrorClass::CorruptEncoding, "not an image file");
  const std::size_t id_len = in[4];
  if (in.size() < 7 + id_len) throw Error(ErrorClass::CorruptEncoding, "image header truncated");
  HraImage img;
  img.user_id.assign(reinterpret_cast<const char*>(in.data() + 5), id_len);
  img.m = in[5 + id_len];
  if (img.m < 1 || img.m > 20) throw Error(ErrorClass::CorruptEncoding, "image challenge bits out of range");
  if (in[6 + id_len] != kHashTagSha256)
    throw Error(ErrorClass::CorruptEncoding, "unsupported hash algorithm tag");
  const std::size_t rows = std::size_t{1} << img.m;
  const std::size_t body = 7 + id_len;
  if (in.size() != body + rows * 32) throw Error(ErrorClass::CorruptEncoding, "image size mismatch");
  img.entries.resize(rows);
  for (std::size_t j = 0; j < rows; ++j)
    std::memcpy(img.entries[j].data(), in.data() + body + j * 32, 32);
  return img;
}

HraImage enumerate_image(const HraDevice& dev, std::string_view user_id) {
  if (dev.tamper_flag)
    throw Error(ErrorClass::TamperedDevice, "device destroyed itself after tampering");
  HraImage img;
  img.user_id = std::string(user_id);
  img.m = dev.challenge_bits;
  const std::uint32_t rows = 1u << dev.challenge_bits;
  img.entries.resize(rows);
  for (std::uint32_t j = 0; j < rows; ++j) {
    const Digest32 r = respond(dev, j);
    img.entries[j] = sha256(ByteView(r.data(), r.size()));
  }
  return img;
}

void set_tampered(HraDevice& dev) {
  dev.tamper_flag = true;
}

}  // namespace scc5g::hra
