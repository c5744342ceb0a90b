#include <doctest.h>

#include <set>

#include "scc5g/errors.hpp"
#include "scc5g/hash.hpp"
#include "scc5g/hra.hpp"

using namespace scc5g;
using namespace scc5g::hra;

namespace {

HraDevice device_of(std::uint64_t n, unsigned m) {
  Drbg rng(n);
  return make_device(view(rng.bytes(32)), m);
}

bool contains_subsequence(ByteView haystack, ByteView needle) {
  if (needle.size() > haystack.size()) return false;
  for (std::size_t i = 0; i + needle.size() <= haystack.size(); ++i)
    if (std::equal(needle.begin(), needle.end(), haystack.begin() + static_cast<std::ptrdiff_t>(i)))
      return true;
  return false;
}

}  // namespace

TEST_SUITE("hra") {

TEST_CASE("challenge_of: deterministic, bounded, covers the space") {
  Drbg rng(std::uint64_t{1});
  const Bytes key = rng.bytes(100);
  CHECK(challenge_of("alice", view(key), 8) == challenge_of("alice", view(key), 8));
  CHECK(challenge_of("alice", view(key), 8) < 256);

  std::set<std::uint32_t> hit;
  for (int i = 0; i < 10000; ++i) {
    const Bytes k = rng.bytes(64);
    const std::uint32_t c = challenge_of("alice", view(k), 8);
    CHECK(c < 256);
    hit.insert(c);
  }
  CHECK(hit.size() == 256);  // coupon collector: 10^4 draws cover 256 buckets
}

TEST_CASE("respond is deterministic and device-unique") {
  HraDevice dev = device_of(1, 8);
  CHECK(respond(dev, 7) == respond(dev, 7));

  std::set<Digest32> responses;
  for (std::uint64_t d = 0; d < 2000; ++d) responses.insert(respond(device_of(100 + d, 8), 3));
  CHECK(responses.size() == 2000);
}

TEST_CASE("tampering permanently disables a device") {
  HraDevice dev = device_of(2, 4);
  CHECK_NOTHROW(respond(dev, 0));
  set_tampered(dev);
  CHECK_THROWS_AS(respond(dev, 0), Error);
  CHECK_THROWS_AS(enumerate_image(dev, "u"), Error);
  set_tampered(dev);  // idempotent
  CHECK_THROWS_AS(respond(dev, 0), Error);
}

TEST_CASE("enumerate_image: row count and per-row recomputation") {
  HraDevice dev = device_of(3, 4);
  const HraImage img = enumerate_image(dev, "carol");
  REQUIRE(img.entries.size() == 16);
  for (std::uint32_t j = 0; j < 16; ++j) {
    const Digest32 r = respond(dev, j);
    CHECK(img.entries[j] == sha256(ByteView(r.data(), r.size())));
  }
}

TEST_CASE("images of distinct devices differ in every row") {
  for (std::uint64_t t = 0; t < 100; ++t) {
    HraDevice d1 = device_of(3000 + 2 * t, 4);
    HraDevice d2 = device_of(3001 + 2 * t, 4);
    const HraImage i1 = enumerate_image(d1, "u");
    const HraImage i2 = enumerate_image(d2, "u");
    for (std::size_t j = 0; j < i1.entries.size(); ++j) CHECK(i1.entries[j] != i2.entries[j]);
  }
}

TEST_CASE("entropy proxy: no response collisions across devices and challenges") {
  std::set<Digest32> seen;
  std::size_t total = 0;
  for (std::uint64_t d = 0; d < 1000; ++d) {
    HraDevice dev = device_of(50000 + d, 4);
    for (std::uint32_t c = 0; c < 16; ++c) {
      seen.insert(respond(dev, c));
      ++total;
    }
  }
  CHECK(seen.size() == total);
}

TEST_CASE("serialized image never contains a raw response") {
  HraDevice dev = device_of(4, 4);
  const HraImage img = enumerate_image(dev, "dave");
  const Bytes file = img.encode();
  for (std::uint32_t j = 0; j < 16; ++j) {
    const Digest32 r = respond(dev, j);
    CHECK_FALSE(contains_subsequence(view(file), ByteView(r.data(), r.size())));
  }
  CHECK_FALSE(contains_subsequence(view(file), ByteView(dev.device_secret.data(), 32)));
}

TEST_CASE("image file round trip and strict decoding") {
  HraDevice dev = device_of(5, 4);
  const HraImage img = enumerate_image(dev, "erin");
  const Bytes file = img.encode();

  const HraImage back = HraImage::decode(view(file));
  CHECK(back.user_id == img.user_id);
  CHECK(back.m == img.m);
  CHECK(back.entries == img.entries);

  Bytes truncated = file;
  truncated.pop_back();
  CHECK_THROWS_AS(HraImage::decode(view(truncated)), Error);

  Bytes overlong = file;
  overlong.push_back(0);
  CHECK_THROWS_AS(HraImage::decode(view(overlong)), Error);

  Bytes bad_magic = file;
  bad_magic[0] ^= 0xff;
  CHECK_THROWS_AS(HraImage::decode(view(bad_magic)), Error);
}

TEST_CASE("out-of-range challenges are rejected") {
  HraDevice dev = device_of(6, 4);
  CHECK_THROWS_AS(respond(dev, 16), Error);
}

}  // TEST_SUITE
