#include "scc5g/sign.hpp"

#include <cstring>

#include "scc5g/errors.hpp"
#include "scc5g/hash.hpp"

namespace scc5g::sign {

namespace {

using Unit = std::array<std::uint8_t, kUnitBytes>;

constexpr unsigned kMaxDigit = (1u << kDigitBits) - 1;  // 15

ByteView label(const char* s) {
  return ByteView(reinterpret_cast<const std::uint8_t*>(s), std::strlen(s));
}

Unit first_unit(const Digest32& d) {
  Unit u;
  std::memcpy(u.data(), d.data(), kUnitBytes);
  return u;
}

Bytes le32(std::uint32_t v) {
  Bytes b;
  append_u32le(b, v);
  return b;
}

Unit derive_salt(ByteView seed) {
  Bytes s = shake256({label("scc5g.wm.salt"), seed}, kUnitBytes);
  Unit u;
  std::memcpy(u.data(), s.data(), kUnitBytes);
  return u;
}

Unit chain_start(ByteView seed, std::uint32_t leaf, unsigned chain) {
  const std::uint8_t c = static_cast<std::uint8_t>(chain);
  Bytes s = shake256({label("scc5g.wm.sk"), seed, view(le32(leaf)), ByteView(&c, 1)}, kUnitBytes);
  Unit u;
  std::memcpy(u.data(), s.data(), kUnitBytes);
  return u;
}

Unit chain_step(const Unit& salt, std::uint32_t leaf, unsigned chain, unsigned pos,
                const Unit& value) {
  const std::uint8_t cp[2] = {static_cast<std::uint8_t>(chain), static_cast<std::uint8_t>(pos)};
  return first_unit(sha256({label("scc5g.wm.ch"), ByteView(salt.data(), salt.size()),
                            view(le32(leaf)), ByteView(cp, 2),
                            ByteView(value.data(), value.size())}));
}

Unit apply_chain(const Unit& salt, std::uint32_t leaf, unsigned chain, unsigned from, unsigned to,
                 Unit value) {
  for (unsigned pos = from; pos < to; ++pos) value = chain_step(salt, leaf, chain, pos, value);
  return value;
}

Unit leaf_hash(const Unit& salt, std::uint32_t leaf, const std::vector<Unit>& ends) {
  Sha256 h;
  h.update(label("scc5g.wm.leaf"));
  h.update(ByteView(salt.data(), salt.size()));
  h.update(view(le32(leaf)));
  for (const Unit& e : ends) h.update(ByteView(e.data(), e.size()));
  return first_unit(h.digest());
}

Unit node_hash(const Unit& salt, unsigned level, std::uint32_t index, const Unit& left,
               const Unit& right) {
  const std::uint8_t lv = static_cast<std::uint8_t>(level);
  return first_unit(sha256({label("scc5g.wm.node"), ByteView(salt.data(), salt.size()),
                            ByteView(&lv, 1), view(le32(index)),
                            ByteView(left.data(), left.size()),
                            ByteView(right.data(), right.size())}));
}

// 35 base-16 digits: the truncated message digest plus a checksum that makes
// any digit increase force a checksum digit decrease.
std::array<std::uint8_t, kChains> message_digits(const Unit& salt, std::uint32_t leaf,
                                                 ByteView message) {
  const Digest32 d = sha256(
      {label("scc5g.wm.msg"), ByteView(salt.data(), salt.size()), view(le32(leaf)), message});
  std::array<std::uint8_t, kChains> digits{};
  for (unsigned i = 0; i < kUnitBytes; ++i) {
    digits[2 * i] = d[i] & 0xf;
    digits[2 * i + 1] = d[i] >> 4;
  }
  std::uint32_t checksum = 0;
  for (unsigned i = 0; i < kMsgDigits; ++i) checksum += kMaxDigit - digits[i];
  for (unsigned i = 0; i < kChecksumDigits; ++i)
    digits[kMsgDigits + i] = static_cast<std::uint8_t>((checksum >> (kDigitBits * i)) & 0xf);
  return digits;
}

Unit wots_public_end(const Unit& salt, ByteView seed, std::uint32_t leaf, unsigned chain) {
  return apply_chain(salt, leaf, chain, 0, kMaxDigit, chain_start(seed, leaf, chain));
}

}  // namespace

std::size_t signature_size(unsigned height) {
  return 1 + 4 + static_cast<std::size_t>(kChains) * kUnitBytes +
         static_cast<std::size_t>(height) * kUnitBytes;
}

SignKeyPair sign_keygen(ByteView seed32, unsigned height) {
  if (seed32.size() != 32) throw Error(ErrorClass::InvalidArgument, "sign seed must be 32 bytes");
  if (height < 1 || height > 20) throw Error(ErrorClass::InvalidArgument, "tree height out of range");

  SignKeyPair kp;
  std::memcpy(kp.seed.data(), seed32.data(), 32);
  kp.height = height;
  kp.next_leaf = 0;

  const Unit salt = derive_salt(seed32);
  const std::uint32_t leaves = 1u << height;

  kp.tree.resize(height + 1);
  kp.tree[0].resize(leaves);
  std::vector<Unit> ends(kChains);
  for (std::uint32_t leaf = 0; leaf < leaves; ++leaf) {
    for (unsigned c = 0; c < kChains; ++c) ends[c] = wots_public_end(salt, seed32, leaf, c);
    kp.tree[0][leaf] = leaf_hash(salt, leaf, ends);
  }
  for (unsigned level = 1; level <= height; ++level) {
    const std::size_t width = kp.tree[level - 1].size() / 2;
    kp.tree[level].resize(width);
    for (std::uint32_t i = 0; i < width; ++i)
      kp.tree[level][i] = node_hash(salt, level, i, kp.tree[level - 1][2 * i],
                                    kp.tree[level - 1][2 * i + 1]);
  }

  kp.public_key.clear();
  kp.public_key.push_back(kSchemeWm16);
  kp.public_key.push_back(static_cast<std::uint8_t>(height));
  append(kp.public_key, ByteView(salt.data(), salt.size()));
  const Unit& root = kp.tree[height][0];
  append(kp.public_key, ByteView(root.data(), root.size()));
  return kp;
}

Signature sign(SignKeyPair& kp, ByteView message) {
  if (kp.remaining_signatures() == 0)
    throw Error(ErrorClass::ExhaustedKey, "all one-time leaves consumed");
  if (kp.tree.empty() || kp.tree.size() != kp.height + 1)
    throw Error(ErrorClass::StateViolation, "keypair tree not materialized");

  const std::uint32_t leaf = kp.next_leaf++;
  const Unit salt = derive_salt(ByteView(kp.seed.data(), kp.seed.size()));
  const auto digits = message_digits(salt, leaf, message);

  Signature sig;
  sig.leaf_index = leaf;
  sig.bytes.push_back(kSchemeWm16);
  append_u32le(sig.bytes, leaf);
  for (unsigned c = 0; c < kChains; ++c) {
    Unit v = apply_chain(salt, leaf, c, 0, digits[c],
                         chain_start(ByteView(kp.seed.data(), kp.seed.size()), leaf, c));
    append(sig.bytes, ByteView(v.data(), v.size()));
  }
  std::uint32_t idx = leaf;
  for (unsigned level = 0; level < kp.height; ++level) {
    const Unit& sibling = kp.tree[level][idx ^ 1];
    append(sig.bytes, ByteView(sibling.data(), sibling.size()));
    idx >>= 1;
  }
  return sig;
}

bool verify(ByteView public_key, ByteView message, ByteView signature) {
  if (public_key.size() != 2 + 2 * kUnitBytes) return false;
  if (public_key[0] != kSchemeWm16) return false;
  const unsigned height = public_key[1];
  if (height < 1 || height > 20) return false;
  if (signature.size() != signature_size(height)) return false;
  if (signature[0] != kSchemeWm16) return false;

  Unit salt, root;
  std::memcpy(salt.data(), public_key.data() + 2, kUnitBytes);
  std::memcpy(root.data(), public_key.data() + 2 + kUnitBytes, kUnitBytes);

  std::uint32_t leaf = 0;
  try {
    leaf = read_u32le(signature, 1);
  } catch (const Error&) {
    return false;
  }
  if (leaf >= (1u << height)) return false;

  const auto digits = message_digits(salt, leaf, message);
  std::vector<Unit> ends(kChains);
  std::size_t off = 5;
  for (unsigned c = 0; c < kChains; ++c) {
    Unit v;
    std::memcpy(v.data(), signature.data() + off, kUnitBytes);
    off += kUnitBytes;
    ends[c] = apply_chain(salt, leaf, c, digits[c], kMaxDigit, v);
  }

  Unit node = leaf_hash(salt, leaf, ends);
  std::uint32_t idx = leaf;
  for (unsigned level = 0; level < height; ++level) {
    Unit sibling;
    std::memcpy(sibling.data(), signature.data() + off, kUnitBytes);
    off += kUnitBytes;
    node = (idx & 1) ? node_hash(salt, level + 1, idx >> 1, sibling, node)
                     : node_hash(salt, level + 1, idx >> 1, node, sibling);
    idx >>= 1;
  }
  return ct_equal(ByteView(node.data(), node.size()), ByteView(root.data(), root.size()));
}

}  // namespace scc5g::sign
