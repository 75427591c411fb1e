#include "bb84aes/crypto.hpp"

#include "bb84aes/error.hpp"

namespace bb84aes {

TagWidth tag_width_from_bits(int bits) {
  switch (bits) {
    case 16: return TagWidth::Bits16;
    case 64: return TagWidth::Bits64;
    case 128: return TagWidth::Bits128;
    default: throw Error(ErrorCode::RangeError, "tag width must be 16, 64 or 128 bits");
  }
}

uint128 load_be128(std::span<const std::uint8_t, 16> bytes) noexcept {
  uint128 v = 0;
  for (const std::uint8_t b : bytes) v = (v << 8) | b;
  return v;
}

Block store_be128(uint128 value) noexcept {
  Block out{};
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(value);
    value >>= 8;
  }
  return out;
}

std::string to_hex(uint128 value, TagWidth width) {
  static constexpr char kDigits[] = "0123456789abcdef";
  const int nibbles = bit_count(width) / 4;
  std::string out(static_cast<std::size_t>(nibbles), '0');
  for (int i = nibbles - 1; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = kDigits[static_cast<unsigned>(value & 0xf)];
    value >>= 4;
  }
  return out;
}

const char* to_string(Direction d) noexcept {
  return d == Direction::AliceToBob ? "alice_to_bob" : "bob_to_alice";
}

// --- InitialSecret ----------------------------------------------------------

InitialSecret::InitialSecret(const CipherKey& cipher_key, uint128 hash_key, TagWidth width,
                             Direction direction)
    : cipher_key_(cipher_key),
      hash_key_(hash_key & width_mask(width)),
      width_(width),
      direction_(direction),
      cipher_(cipher_key) {
  if (hash_key_ == 0) throw Error(ErrorCode::ZeroHashKey, "hash key must be nonzero");
}

std::size_t InitialSecret::bit_length() const noexcept { return bit_length_for(width_); }

InitialSecret split_secret(std::span<const std::uint8_t> raw_bits, TagWidth mode,
                           Direction direction) {
  const std::size_t expected = InitialSecret::bit_length_for(mode);
  if (raw_bits.size() != expected) {
    throw Error(ErrorCode::WrongLength, "expected " + std::to_string(expected) + " secret bits, got " +
                                            std::to_string(raw_bits.size()));
  }
  CipherKey key{};
  for (std::size_t i = 0; i < 256; ++i) {
    key[i / 8] = static_cast<std::uint8_t>(key[i / 8] | ((raw_bits[i] & 1) << (7 - i % 8)));
  }
  uint128 hash_key = 0;
  for (std::size_t i = 256; i < expected; ++i) hash_key = (hash_key << 1) | (raw_bits[i] & 1);
  return InitialSecret(key, hash_key, mode, direction);
}

// --- NonceGenerator ---------------------------------------------------------

NonceGenerator::NonceGenerator(std::uint64_t iv, int iv_bits, int counter_width)
    : iv_(iv), iv_bits_(iv_bits), counter_width_(counter_width < 0 ? 128 - iv_bits : counter_width) {
  if (iv_bits < 0 || iv_bits > 64) throw Error(ErrorCode::RangeError, "iv length must be in [0, 64]");
  if (counter_width_ < 1 || counter_width_ > 128 - iv_bits) {
    throw Error(ErrorCode::RangeError, "counter width must be in [1, 128 - iv_bits]");
  }
  if (iv_bits < 64 && (iv >> iv_bits) != 0) {
    throw Error(ErrorCode::RangeError, "iv does not fit in iv_bits");
  }
}

uint128 NonceGenerator::compose(std::uint64_t iv, int iv_bits, uint128 counter) noexcept {
  if (iv_bits == 0) return counter;
  return (uint128{iv} << (128 - iv_bits)) | counter;
}

uint128 NonceGenerator::counter_of(uint128 nonce) const noexcept {
  const int field = 128 - iv_bits_;
  return field == 128 ? nonce : nonce & ((uint128{1} << field) - 1);
}

uint128 NonceGenerator::peek() const {
  if (exhausted_) throw Error(ErrorCode::CounterExhausted, "nonce counter exhausted");
  return compose(iv_, iv_bits_, counter_);
}

uint128 NonceGenerator::next() {
  if (exhausted_) throw Error(ErrorCode::CounterExhausted, "nonce counter exhausted");
  const uint128 nonce = compose(iv_, iv_bits_, counter_);
  const uint128 last = counter_width_ == 128 ? ~uint128{0} : (uint128{1} << counter_width_) - 1;
  if (counter_ == last) {
    exhausted_ = true;
  } else {
    ++counter_;
  }
  return nonce;
}

// --- TagBudget --------------------------------------------------------------

uint128 TagBudget::default_limit(TagWidth w) noexcept {
  return w == TagWidth::Bits128 ? (uint128{1} << 64) : (uint128{1} << 32);
}

void TagBudget::consume() {
  if (exhausted()) throw Error(ErrorCode::BudgetExhausted, "tag budget exhausted; rekey required");
  ++consumed_;
}

// --- Tags -------------------------------------------------------------------

uint128 keystream(const Aes256& cipher, uint128 nonce, TagWidth w) noexcept {
  const uint128 block = cipher.encrypt(nonce);
  return w == TagWidth::Bits128 ? block : block >> (128 - bit_count(w));
}

uint128 compute_tag(const InitialSecret& secret, uint128 nonce,
                    std::span<const std::uint8_t> message) {
  return universal_hash(secret.hash_key(), message, secret.width()) ^
         keystream(secret.cipher(), nonce, secret.width());
}

IssuedTag make_tag(const InitialSecret& secret, NonceGenerator& gen, TagBudget& budget,
                   std::span<const std::uint8_t> message) {
  if (budget.exhausted()) throw Error(ErrorCode::BudgetExhausted, "tag budget exhausted; rekey required");
  const uint128 nonce = gen.next();
  budget.consume();
  IssuedTag out;
  out.nonce = nonce;
  out.tag.bits = compute_tag(secret, nonce, message);
  out.tag.width = secret.width();
  out.tag.nonce_index = gen.counter_of(nonce);
  return out;
}

bool tags_equal(uint128 a, uint128 b) noexcept {
  uint128 diff = a ^ b;
  std::uint8_t acc = 0;
  for (int i = 0; i < 16; ++i) {
    acc = static_cast<std::uint8_t>(acc | static_cast<std::uint8_t>(diff));
    diff >>= 8;
  }
  return acc == 0;
}

bool verify_tag(const InitialSecret& secret, uint128 nonce, std::span<const std::uint8_t> message,
                const Tag& tag) {
  const uint128 expected = compute_tag(secret, nonce, message);
  const bool width_ok = tag.width == secret.width();
  return tags_equal(expected, tag.bits) & width_ok;
}

CtrCiphertext ctr_encrypt(const InitialSecret& secret, NonceGenerator& gen,
                          std::span<const uint128> plaintext_blocks) {
  CtrCiphertext out;
  out.blocks.reserve(plaintext_blocks.size());
  out.nonces.reserve(plaintext_blocks.size());
  const uint128 mask = width_mask(secret.width());
  for (const uint128 p : plaintext_blocks) {
    const uint128 nonce = gen.next();
    out.nonces.push_back(nonce);
    out.blocks.push_back((p & mask) ^ keystream(secret.cipher(), nonce, secret.width()));
  }
  return out;
}

// --- Authenticator ----------------------------------------------------------

Authenticator::Authenticator(InitialSecret secret, NonceGenerator generator, TagBudget budget)
    : secret_(std::move(secret)), generator_(generator), budget_(budget) {}

void Authenticator::check_available() const {
  if (budget_.exhausted()) throw Error(ErrorCode::BudgetExhausted, "tag budget exhausted; rekey required");
  if (generator_.exhausted()) throw Error(ErrorCode::CounterExhausted, "nonce counter exhausted");
}

IssuedTag Authenticator::issue(std::span<const std::uint8_t> message) {
  check_available();
  return make_tag(secret_, generator_, budget_, message);
}

IssuedTag Authenticator::issue_with_digest(uint128 digest) {
  const uint128 nonce = reserve_nonce();
  IssuedTag out;
  out.nonce = nonce;
  out.tag.bits = (digest & width_mask(width())) ^ keystream_at(nonce);
  out.tag.width = width();
  out.tag.nonce_index = generator_.counter_of(nonce);
  return out;
}

uint128 Authenticator::reserve_nonce() {
  check_available();
  const uint128 nonce = generator_.next();
  budget_.consume();
  return nonce;
}

}  // namespace bb84aes
