#include "bb84aes/crypto.hpp"

namespace bb84aes {

uint128 reduction_polynomial(TagWidth w) noexcept {
  switch (w) {
    case TagWidth::Bits128: return 0x87;  // x^7 + x^2 + x + 1
    case TagWidth::Bits64: return 0x1b;   // x^4 + x^3 + x + 1
    case TagWidth::Bits16: return 0x2b;   // x^5 + x^3 + x + 1
  }
  return 0;
}

uint128 gf_multiply(uint128 a, uint128 b, TagWidth w) noexcept {
  const int n = bit_count(w);
  const uint128 mask = width_mask(w);
  const uint128 r = reduction_polynomial(w);
  a &= mask;
  uint128 acc = 0;
  // MSB-first double-and-add; the carry out of x^(n-1) folds back through r.
  for (int i = n - 1; i >= 0; --i) {
    const uint128 carry = (acc >> (n - 1)) & 1;
    acc = ((acc << 1) & mask) ^ (r & (uint128{0} - carry));
    acc ^= a & (uint128{0} - ((b >> i) & 1));
  }
  return acc;
}

std::vector<uint128> pad_message(std::span<const std::uint8_t> message, TagWidth w) {
  const std::size_t block_bytes = static_cast<std::size_t>(bit_count(w)) / 8;
  std::vector<std::uint8_t> padded(message.begin(), message.end());
  padded.push_back(0x80);
  while (padded.size() % block_bytes != 0) padded.push_back(0x00);

  std::vector<uint128> blocks;
  blocks.reserve(padded.size() / block_bytes);
  for (std::size_t off = 0; off < padded.size(); off += block_bytes) {
    uint128 v = 0;
    for (std::size_t i = 0; i < block_bytes; ++i) v = (v << 8) | padded[off + i];
    blocks.push_back(v);
  }
  return blocks;
}

uint128 poly_hash_blocks(uint128 key, std::span<const uint128> blocks, TagWidth w) noexcept {
  uint128 acc = 0;
  for (const uint128 m : blocks) acc = gf_multiply(acc ^ (m & width_mask(w)), key, w);
  return acc;
}

uint128 universal_hash(uint128 key, std::span<const std::uint8_t> message, TagWidth w) {
  const auto blocks = pad_message(message, w);
  return poly_hash_blocks(key, blocks, w);
}

}  // namespace bb84aes
