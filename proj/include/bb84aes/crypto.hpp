#pragma once

// Tag construction for basis announcements: a polynomial universal hash over
// GF(2^l) masked with truncated AES-256 output on a one-time nonce, plus the
// nonce counters and per-secret tag budgets that bound how long a secret lives.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace bb84aes {

__extension__ typedef unsigned __int128 uint128;

using Block = std::array<std::uint8_t, 16>;
using CipherKey = std::array<std::uint8_t, 32>;

/// Tag length l_tau. 16 is a test-only width used to make guessing
/// probabilities observable at desk scale.
enum class TagWidth : int { Bits16 = 16, Bits64 = 64, Bits128 = 128 };

constexpr int bit_count(TagWidth w) noexcept { return static_cast<int>(w); }

constexpr uint128 width_mask(TagWidth w) noexcept {
  return w == TagWidth::Bits128 ? ~uint128{0} : ((uint128{1} << bit_count(w)) - 1);
}

TagWidth tag_width_from_bits(int bits);

uint128 load_be128(std::span<const std::uint8_t, 16> bytes) noexcept;
Block store_be128(uint128 value) noexcept;
std::string to_hex(uint128 value, TagWidth width);

// ---------------------------------------------------------------------------
// Block cipher

/// AES-256 forward cipher (FIPS-197). Only encryption is needed: tags and CTR
/// keystream both run the cipher forwards.
class Aes256 {
 public:
  explicit Aes256(const CipherKey& key) noexcept;

  [[nodiscard]] Block encrypt(const Block& in) const noexcept;
  [[nodiscard]] uint128 encrypt(uint128 in) const noexcept;

 private:
  std::array<std::uint32_t, 60> round_keys_{};
};

Block block_encrypt(const CipherKey& key, const Block& block) noexcept;

// ---------------------------------------------------------------------------
// Universal hash

/// Low-order terms of the reduction polynomial: x^128+x^7+x^2+x+1,
/// x^64+x^4+x^3+x+1 and (test width) x^16+x^5+x^3+x+1.
uint128 reduction_polynomial(TagWidth w) noexcept;

/// Product in GF(2^l). Bit k of an element is the coefficient of x^k.
uint128 gf_multiply(uint128 a, uint128 b, TagWidth w) noexcept;

/// Append one 1 bit, then zeros up to an l-bit boundary, and split into
/// big-endian field elements.
std::vector<uint128> pad_message(std::span<const std::uint8_t> message, TagWidth w);

/// sum_i m_i * key^(n-i+1), evaluated by Horner's rule, no padding applied.
uint128 poly_hash_blocks(uint128 key, std::span<const uint128> blocks, TagWidth w) noexcept;

uint128 universal_hash(uint128 key, std::span<const std::uint8_t> message, TagWidth w);

// ---------------------------------------------------------------------------
// Secrets, nonces, budgets

enum class Direction : std::uint8_t { AliceToBob, BobToAlice };

const char* to_string(Direction d) noexcept;

/// One direction's pre-shared secret: a 256-bit cipher key followed by a
/// single-field-element hash key.
class InitialSecret {
 public:
  InitialSecret(const CipherKey& cipher_key, uint128 hash_key, TagWidth width,
                Direction direction);

  [[nodiscard]] const CipherKey& cipher_key() const noexcept { return cipher_key_; }
  [[nodiscard]] uint128 hash_key() const noexcept { return hash_key_; }
  [[nodiscard]] TagWidth width() const noexcept { return width_; }
  [[nodiscard]] Direction direction() const noexcept { return direction_; }
  [[nodiscard]] const Aes256& cipher() const noexcept { return cipher_; }

  /// l_k = 256 + hash-key bits.
  [[nodiscard]] std::size_t bit_length() const noexcept;

  static std::size_t bit_length_for(TagWidth w) noexcept { return 256 + bit_count(w); }

 private:
  CipherKey cipher_key_;
  uint128 hash_key_;
  TagWidth width_;
  Direction direction_;
  Aes256 cipher_;
};

/// `raw_bits` holds one bit per element (0/1); first 256 are k_C, the rest k_H.
InitialSecret split_secret(std::span<const std::uint8_t> raw_bits, TagWidth mode,
                           Direction direction = Direction::AliceToBob);

/// Nonce = iv (l_v bits, big-endian) || counter (128 - l_v bits, big-endian).
/// `counter_width` may be set below 128 - l_v to make exhaustion reachable.
class NonceGenerator {
 public:
  explicit NonceGenerator(std::uint64_t iv = 0, int iv_bits = 64, int counter_width = -1);

  /// Emit the next nonce; throws CounterExhausted once the counter space is spent.
  uint128 next();

  [[nodiscard]] uint128 peek() const;
  [[nodiscard]] bool exhausted() const noexcept { return exhausted_; }
  [[nodiscard]] uint128 counter() const noexcept { return counter_; }
  [[nodiscard]] std::uint64_t iv() const noexcept { return iv_; }
  [[nodiscard]] int iv_bits() const noexcept { return iv_bits_; }
  [[nodiscard]] int counter_width() const noexcept { return counter_width_; }

  static uint128 compose(std::uint64_t iv, int iv_bits, uint128 counter) noexcept;
  /// Counter field of a nonce produced by this generator layout.
  [[nodiscard]] uint128 counter_of(uint128 nonce) const noexcept;

 private:
  std::uint64_t iv_;
  int iv_bits_;
  int counter_width_;
  uint128 counter_ = 0;
  bool exhausted_ = false;
};

class TagBudget {
 public:
  /// 2^64 tags for 128-bit tags, 2^32 for 64-bit ones (and the test width).
  static uint128 default_limit(TagWidth w) noexcept;

  explicit TagBudget(uint128 limit) : limit_(limit) {}

  void consume();
  [[nodiscard]] bool exhausted() const noexcept { return consumed_ >= limit_; }
  [[nodiscard]] uint128 limit() const noexcept { return limit_; }
  [[nodiscard]] uint128 consumed() const noexcept { return consumed_; }
  [[nodiscard]] uint128 remaining() const noexcept { return limit_ - consumed_; }

 private:
  uint128 limit_;
  uint128 consumed_ = 0;
};

struct Tag {
  uint128 bits = 0;  // low `width` bits significant
  TagWidth width = TagWidth::Bits128;
  uint128 nonce_index = 0;  // counter value consumed

  friend bool operator==(const Tag&, const Tag&) = default;
};

struct IssuedTag {
  Tag tag;
  uint128 nonce = 0;
};

/// Most significant l bits of AES_{k_C}(nonce).
uint128 keystream(const Aes256& cipher, uint128 nonce, TagWidth w) noexcept;

/// Pure tag computation at a given nonce; make_tag is this plus nonce/budget
/// bookkeeping. Safe to call concurrently for precomputation.
uint128 compute_tag(const InitialSecret& secret, uint128 nonce,
                    std::span<const std::uint8_t> message);

IssuedTag make_tag(const InitialSecret& secret, NonceGenerator& gen, TagBudget& budget,
                   std::span<const std::uint8_t> message);

/// Full-width comparison without early exit.
bool tags_equal(uint128 a, uint128 b) noexcept;

bool verify_tag(const InitialSecret& secret, uint128 nonce, std::span<const std::uint8_t> message,
                const Tag& tag);

struct CtrCiphertext {
  std::vector<uint128> blocks;
  std::vector<uint128> nonces;
};

/// c_j = p_j xor truncate(AES(s_j)) with a fresh nonce per l-bit block.
CtrCiphertext ctr_encrypt(const InitialSecret& secret, NonceGenerator& gen,
                          std::span<const uint128> plaintext_blocks);

/// Secret + nonce stream + budget for one direction. Senders call issue();
/// the receiving side keeps a mirror and calls reserve_nonce() per message so
/// both ends agree on every nonce without it crossing the wire.
class Authenticator {
 public:
  Authenticator(InitialSecret secret, NonceGenerator generator, TagBudget budget);

  IssuedTag issue(std::span<const std::uint8_t> message);
  /// issue() for a message whose digest was evaluated earlier.
  IssuedTag issue_with_digest(uint128 digest);
  uint128 reserve_nonce();

  [[nodiscard]] uint128 keystream_at(uint128 nonce) const noexcept {
    return keystream(secret_.cipher(), nonce, secret_.width());
  }
  [[nodiscard]] uint128 digest(std::span<const std::uint8_t> message) const {
    return universal_hash(secret_.hash_key(), message, secret_.width());
  }

  [[nodiscard]] const InitialSecret& secret() const noexcept { return secret_; }
  [[nodiscard]] const NonceGenerator& generator() const noexcept { return generator_; }
  [[nodiscard]] const TagBudget& budget() const noexcept { return budget_; }
  [[nodiscard]] TagWidth width() const noexcept { return secret_.width(); }
  [[nodiscard]] bool must_rekey() const noexcept {
    return budget_.exhausted() || generator_.exhausted();
  }

 private:
  void check_available() const;

  InitialSecret secret_;
  NonceGenerator generator_;
  TagBudget budget_;
};

}  // namespace bb84aes
