#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace scc5g {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

inline ByteView view(const Bytes& b) { return ByteView(b.data(), b.size()); }

Bytes to_bytes(std::string_view s);
std::string to_hex(ByteView b);

void append(Bytes& out, ByteView more);
void append_u16le(Bytes& out, std::uint16_t v);
void append_u32le(Bytes& out, std::uint32_t v);
void append_u64le(Bytes& out, std::uint64_t v);

// Readers throw Error{CorruptEncoding} when the input is too short.
std::uint16_t read_u16le(ByteView in, std::size_t offset);
std::uint32_t read_u32le(ByteView in, std::size_t offset);
std::uint64_t read_u64le(ByteView in, std::size_t offset);

// Little-endian bit packing: value bits are emitted LSB-first into a byte
// stream. Every value must be < 2^bits.
Bytes pack_bits(const std::vector<std::uint16_t>& values, unsigned bits);
std::vector<std::uint16_t> unpack_bits(ByteView data, std::size_t count, unsigned bits);

}  // namespace scc5g
