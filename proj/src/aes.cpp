#include "bb84aes/crypto.hpp"

namespace bb84aes {
namespace {

constexpr std::array<std::uint8_t, 256> kSbox = {
    0x63, 0x7c, 0x77, 0x7b, 0xf2, 0x6b, 0x6f, 0xc5, 0x30, 0x01, 0x67, 0x2b, 0xfe, 0xd7, 0xab, 0x76,
    0xca, 0x82, 0xc9, 0x7d, 0xfa, 0x59, 0x47, 0xf0, 0xad, 0xd4, 0xa2, 0xaf, 0x9c, 0xa4, 0x72, 0xc0,
    0xb7, 0xfd, 0x93, 0x26, 0x36, 0x3f, 0xf7, 0xcc, 0x34, 0xa5, 0xe5, 0xf1, 0x71, 0xd8, 0x31, 0x15,
    0x04, 0xc7, 0x23, 0xc3, 0x18, 0x96, 0x05, 0x9a, 0x07, 0x12, 0x80, 0xe2, 0xeb, 0x27, 0xb2, 0x75,
    0x09, 0x83, 0x2c, 0x1a, 0x1b, 0x6e, 0x5a, 0xa0, 0x52, 0x3b, 0xd6, 0xb3, 0x29, 0xe3, 0x2f, 0x84,
    0x53, 0xd1, 0x00, 0xed, 0x20, 0xfc, 0xb1, 0x5b, 0x6a, 0xcb, 0xbe, 0x39, 0x4a, 0x4c, 0x58, 0xcf,
    0xd0, 0xef, 0xaa, 0xfb, 0x43, 0x4d, 0x33, 0x85, 0x45, 0xf9, 0x02, 0x7f, 0x50, 0x3c, 0x9f, 0xa8,
    0x51, 0xa3, 0x40, 0x8f, 0x92, 0x9d, 0x38, 0xf5, 0xbc, 0xb6, 0xda, 0x21, 0x10, 0xff, 0xf3, 0xd2,
    0xcd, 0x0c, 0x13, 0xec, 0x5f, 0x97, 0x44, 0x17, 0xc4, 0xa7, 0x7e, 0x3d, 0x64, 0x5d, 0x19, 0x73,
    0x60, 0x81, 0x4f, 0xdc, 0x22, 0x2a, 0x90, 0x88, 0x46, 0xee, 0xb8, 0x14, 0xde, 0x5e, 0x0b, 0xdb,
    0xe0, 0x32, 0x3a, 0x0a, 0x49, 0x06, 0x24, 0x5c, 0xc2, 0xd3, 0xac, 0x62, 0x91, 0x95, 0xe4, 0x79,
    0xe7, 0xc8, 0x37, 0x6d, 0x8d, 0xd5, 0x4e, 0xa9, 0x6c, 0x56, 0xf4, 0xea, 0x65, 0x7a, 0xae, 0x08,
    0xba, 0x78, 0x25, 0x2e, 0x1c, 0xa6, 0xb4, 0xc6, 0xe8, 0xdd, 0x74, 0x1f, 0x4b, 0xbd, 0x8b, 0x8a,
    0x70, 0x3e, 0xb5, 0x66, 0x48, 0x03, 0xf6, 0x0e, 0x61, 0x35, 0x57, 0xb9, 0x86, 0xc1, 0x1d, 0x9e,
    0xe1, 0xf8, 0x98, 0x11, 0x69, 0xd9, 0x8e, 0x94, 0x9b, 0x1e, 0x87, 0xe9, 0xce, 0x55, 0x28, 0xdf,
    0x8c, 0xa1, 0x89, 0x0d, 0xbf, 0xe6, 0x42, 0x68, 0x41, 0x99, 0x2d, 0x0f, 0xb0, 0x54, 0xbb, 0x16,
};

constexpr std::uint8_t xtime(std::uint8_t x) noexcept {
  return static_cast<std::uint8_t>((x << 1) ^ ((x & 0x80) ? 0x1b : 0x00));
}

constexpr std::uint32_t rotr(std::uint32_t x, int n) noexcept { return (x >> n) | (x << (32 - n)); }

struct Tables {
  std::array<std::uint32_t, 256> t0{}, t1{}, t2{}, t3{};
};

// Combined SubBytes/ShiftRows/MixColumns column tables.
constexpr Tables make_tables() noexcept {
  Tables t;
  for (int i = 0; i < 256; ++i) {
    const std::uint8_t s = kSbox[i];
    const std::uint8_t s2 = xtime(s);
    const std::uint8_t s3 = static_cast<std::uint8_t>(s2 ^ s);
    const std::uint32_t w = (std::uint32_t{s2} << 24) | (std::uint32_t{s} << 16) |
                            (std::uint32_t{s} << 8) | std::uint32_t{s3};
    t.t0[i] = w;
    t.t1[i] = rotr(w, 8);
    t.t2[i] = rotr(w, 16);
    t.t3[i] = rotr(w, 24);
  }
  return t;
}

constexpr Tables kTables = make_tables();

constexpr std::uint32_t sub_word(std::uint32_t w) noexcept {
  return (std::uint32_t{kSbox[w >> 24]} << 24) | (std::uint32_t{kSbox[(w >> 16) & 0xff]} << 16) |
         (std::uint32_t{kSbox[(w >> 8) & 0xff]} << 8) | std::uint32_t{kSbox[w & 0xff]};
}

std::uint32_t load_be32(const std::uint8_t* p) noexcept {
  return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) | (std::uint32_t{p[2]} << 8) |
         std::uint32_t{p[3]};
}

void store_be32(std::uint8_t* p, std::uint32_t w) noexcept {
  p[0] = static_cast<std::uint8_t>(w >> 24);
  p[1] = static_cast<std::uint8_t>(w >> 16);
  p[2] = static_cast<std::uint8_t>(w >> 8);
  p[3] = static_cast<std::uint8_t>(w);
}

}  // namespace

Aes256::Aes256(const CipherKey& key) noexcept {
  constexpr int nk = 8;
  for (int i = 0; i < nk; ++i) round_keys_[i] = load_be32(key.data() + 4 * i);
  std::uint32_t rcon = 0x01;
  for (int i = nk; i < 60; ++i) {
    std::uint32_t temp = round_keys_[i - 1];
    if (i % nk == 0) {
      temp = sub_word((temp << 8) | (temp >> 24)) ^ (rcon << 24);
      rcon = xtime(static_cast<std::uint8_t>(rcon));
    } else if (i % nk == 4) {
      temp = sub_word(temp);
    }
    round_keys_[i] = round_keys_[i - nk] ^ temp;
  }
}

Block Aes256::encrypt(const Block& in) const noexcept {
  const auto& rk = round_keys_;
  const auto& t = kTables;
  std::uint32_t s0 = load_be32(in.data()) ^ rk[0];
  std::uint32_t s1 = load_be32(in.data() + 4) ^ rk[1];
  std::uint32_t s2 = load_be32(in.data() + 8) ^ rk[2];
  std::uint32_t s3 = load_be32(in.data() + 12) ^ rk[3];

  for (int round = 1; round < 14; ++round) {
    const std::uint32_t* k = rk.data() + 4 * round;
    const std::uint32_t u0 = t.t0[s0 >> 24] ^ t.t1[(s1 >> 16) & 0xff] ^ t.t2[(s2 >> 8) & 0xff] ^
                             t.t3[s3 & 0xff] ^ k[0];
    const std::uint32_t u1 = t.t0[s1 >> 24] ^ t.t1[(s2 >> 16) & 0xff] ^ t.t2[(s3 >> 8) & 0xff] ^
                             t.t3[s0 & 0xff] ^ k[1];
    const std::uint32_t u2 = t.t0[s2 >> 24] ^ t.t1[(s3 >> 16) & 0xff] ^ t.t2[(s0 >> 8) & 0xff] ^
                             t.t3[s1 & 0xff] ^ k[2];
    const std::uint32_t u3 = t.t0[s3 >> 24] ^ t.t1[(s0 >> 16) & 0xff] ^ t.t2[(s1 >> 8) & 0xff] ^
                             t.t3[s2 & 0xff] ^ k[3];
    s0 = u0;
    s1 = u1;
    s2 = u2;
    s3 = u3;
  }

  // Last round has no MixColumns.
  const std::uint32_t* k = rk.data() + 56;
  auto last = [](std::uint32_t a, std::uint32_t b, std::uint32_t c, std::uint32_t d) {
    return (std::uint32_t{kSbox[a >> 24]} << 24) | (std::uint32_t{kSbox[(b >> 16) & 0xff]} << 16) |
           (std::uint32_t{kSbox[(c >> 8) & 0xff]} << 8) | std::uint32_t{kSbox[d & 0xff]};
  };
  Block out{};
  store_be32(out.data(), last(s0, s1, s2, s3) ^ k[0]);
  store_be32(out.data() + 4, last(s1, s2, s3, s0) ^ k[1]);
  store_be32(out.data() + 8, last(s2, s3, s0, s1) ^ k[2]);
  store_be32(out.data() + 12, last(s3, s0, s1, s2) ^ k[3]);
  return out;
}

uint128 Aes256::encrypt(uint128 in) const noexcept {
  const Block out = encrypt(store_be128(in));
  return load_be128(out);
}

Block block_encrypt(const CipherKey& key, const Block& block) noexcept {
  return Aes256(key).encrypt(block);
}

}  // namespace bb84aes
