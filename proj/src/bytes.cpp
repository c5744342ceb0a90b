#include "scc5g/bytes.hpp"

#include "scc5g/errors.hpp"

namespace scc5g {

Bytes to_bytes(std::string_view s) {
  return Bytes(s.begin(), s.end());
}

std::string to_hex(ByteView b) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(b.size() * 2);
  for (std::uint8_t v : b) {
    out.push_back(digits[v >> 4]);
    out.push_back(digits[v & 0xf]);
  }
  return out;
}

void append(Bytes& out, ByteView more) {
  out.insert(out.end(), more.begin(), more.end());
}

void append_u16le(Bytes& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void append_u32le(Bytes& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void append_u64le(Bytes& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

namespace {
void need(ByteView in, std::size_t offset, std::size_t n) {
  if (offset + n > in.size()) throw Error(ErrorClass::CorruptEncoding, "input truncated");
}
}  // namespace

std::uint16_t read_u16le(ByteView in, std::size_t offset) {
  need(in, offset, 2);
  return static_cast<std::uint16_t>(in[offset] | (in[offset + 1] << 8));
}

std::uint32_t read_u32le(ByteView in, std::size_t offset) {
  need(in, offset, 4);
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | in[offset + i];
  return v;
}

std::uint64_t read_u64le(ByteView in, std::size_t offset) {
  need(in, offset, 8);
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | in[offset + i];
  return v;
}

Bytes pack_bits(const std::vector<std::uint16_t>& values, unsigned bits) {
  if (bits == 0 || bits > 16) throw Error(ErrorClass::InvalidArgument, "bit width out of range");
  Bytes out((values.size() * bits + 7) / 8, 0);
  std::size_t bitpos = 0;
  for (std::uint16_t v : values) {
    if (bits < 16 && v >= (1u << bits))
      throw Error(ErrorClass::InvalidArgument, "value exceeds bit width");
    for (unsigned b = 0; b < bits; ++b) {
      if ((v >> b) & 1) out[bitpos >> 3] |= static_cast<std::uint8_t>(1u << (bitpos & 7));
      ++bitpos;
    }
  }
  return out;
}

std::vector<std::uint16_t> unpack_bits(ByteView data, std::size_t count, unsigned bits) {
  if (bits == 0 || bits > 16) throw Error(ErrorClass::InvalidArgument, "bit width out of range");
  if (data.size() < (count * bits + 7) / 8)
    throw Error(ErrorClass::CorruptEncoding, "packed data truncated");
  std::vector<std::uint16_t> out(count, 0);
  std::size_t bitpos = 0;
  for (std::size_t i = 0; i < count; ++i) {
    std::uint16_t v = 0;
    for (unsigned b = 0; b < bits; ++b) {
      v |= static_cast<std::uint16_t>(((data[bitpos >> 3] >> (bitpos & 7)) & 1) << b);
      ++bitpos;
    }
    out[i] = v;
  }
  return out;
}

}  // namespace scc5g
