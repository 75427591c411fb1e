#include "bb84aes/post_processing.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "bb84aes/error.hpp"

namespace bb84aes {

double binary_entropy(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::DomainError, "binary entropy needs p in [0, 1]");
  if (p == 0.0 || p == 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

Estimate estimate_qber(std::span<const std::uint8_t> alice, std::span<const std::uint8_t> bob,
                       double fraction, Rng& rng) {
  if (alice.size() != bob.size()) throw Error(ErrorCode::WrongLength, "key lengths differ");
  if (alice.empty()) throw Error(ErrorCode::EmptyKey, "nothing to estimate from");
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw Error(ErrorCode::RangeError, "sample fraction must be in (0, 1]");
  }
  const std::size_t n = alice.size();
  const auto k = std::min(n, static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n))));

  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});
  Estimate e;
  e.disclosed.reserve(k);
  std::sample(all.begin(), all.end(), std::back_inserter(e.disclosed), k, rng);

  std::size_t errors = 0;
  std::vector<bool> shown(n, false);
  for (std::size_t i : e.disclosed) {
    shown[i] = true;
    errors += alice[i] != bob[i];
  }
  e.qber = static_cast<double>(errors) / static_cast<double>(k);
  e.alice_remaining.reserve(n - k);
  e.bob_remaining.reserve(n - k);
  for (std::size_t i = 0; i < n; ++i) {
    if (shown[i]) continue;
    e.alice_remaining.push_back(alice[i]);
    e.bob_remaining.push_back(bob[i]);
  }
  return e;
}

std::size_t reconciliation_leakage(std::size_t n, double qber, double inefficiency) {
  if (inefficiency < 1.0) throw Error(ErrorCode::RangeError, "reconciliation inefficiency below 1");
  const double leak = inefficiency * static_cast<double>(n) * binary_entropy(qber);
  // Values a hair above an integer are float noise, not an extra bit.
  const double rounded = std::round(leak);
  const double value = std::fabs(leak - rounded) < 1e-9 * std::max(1.0, leak) ? rounded : std::ceil(leak);
  return std::min(n, static_cast<std::size_t>(value));
}

Reconciliation reconcile(std::span<const std::uint8_t> alice, std::span<const std::uint8_t> bob,
                         double qber, double inefficiency, Authenticator* authenticator) {
  if (alice.size() != bob.size()) throw Error(ErrorCode::WrongLength, "key lengths differ");
  Reconciliation r;
  r.alice.assign(alice.begin(), alice.end());
  r.bob.assign(alice.begin(), alice.end());
  for (std::size_t i = 0; i < alice.size(); ++i) r.corrected += alice[i] != bob[i];
  r.leakage = reconciliation_leakage(alice.size(), qber, inefficiency);

  if (authenticator != nullptr) {
    // Stand-in syndrome: `leakage` interleaved parities of Alice's key.
    std::vector<std::uint8_t> message((r.leakage + 7) / 8, 0);
    if (r.leakage > 0) {
      std::vector<std::uint8_t> parity(r.leakage, 0);
      for (std::size_t i = 0; i < alice.size(); ++i) parity[i % r.leakage] ^= alice[i] & 1U;
      for (std::size_t i = 0; i < r.leakage; ++i) {
        message[i / 8] |= static_cast<std::uint8_t>(parity[i] << (7 - i % 8));
      }
    }
    r.tag = authenticator->issue(message);
  }
  return r;
}

std::size_t amplified_length(std::size_t n, std::size_t leakage, unsigned epsilon_exponent) {
  const std::size_t spent = leakage + 2 * static_cast<std::size_t>(epsilon_exponent);
  return n > spent ? n - spent : 0;
}

std::vector<std::uint64_t> toeplitz_hash(std::span<const std::uint8_t> key,
                                         std::span<const std::uint8_t> diagonal, std::size_t m) {
  const std::size_t n = key.size();
  std::vector<std::uint64_t> out((m + 63) / 64, 0);
  if (m == 0) return out;
  if (n == 0) throw Error(ErrorCode::EmptyKey, "Toeplitz hash of an empty key");
  if (diagonal.size() != m + n - 1) throw Error(ErrorCode::WrongLength, "Toeplitz diagonal needs m + n - 1 bits");

  // Row i is diagonal[i + n - 1 - j] for column j, i.e. diagonal[i .. i+n-1]
  // read against the key reversed. Pack both as words and slide.
  const std::size_t words = (n + 63) / 64;
  std::vector<std::uint64_t> rev(words, 0);
  for (std::size_t j = 0; j < n; ++j) {
    if (key[n - 1 - j] & 1U) rev[j / 64] |= std::uint64_t{1} << (j % 64);
  }
  const std::size_t dwords = (diagonal.size() + 63) / 64 + 1;
  std::vector<std::uint64_t> diag(dwords, 0);
  for (std::size_t t = 0; t < diagonal.size(); ++t) {
    if (diagonal[t] & 1U) diag[t / 64] |= std::uint64_t{1} << (t % 64);
  }
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t word = i / 64;
    const unsigned shift = i % 64;
    std::uint64_t acc = 0;
    for (std::size_t w = 0; w < words; ++w) {
      std::uint64_t window = diag[word + w] >> shift;
      if (shift != 0) window |= diag[word + w + 1] << (64 - shift);
      acc ^= window & rev[w];
    }
    if (__builtin_parityll(acc)) out[i / 64] |= std::uint64_t{1} << (63 - i % 64);
  }
  return out;
}

BitVector AmplifiedKey::unpack() const {
  BitVector bitsv(bits);
  for (std::size_t i = 0; i < bits; ++i) bitsv[i] = (words[i / 64] >> (63 - i % 64)) & 1U;
  return bitsv;
}

AmplifiedKey privacy_amplify(std::span<const std::uint8_t> key, std::size_t leakage,
                             unsigned epsilon_exponent, std::uint64_t seed) {
  AmplifiedKey out;
  out.bits = amplified_length(key.size(), leakage, epsilon_exponent);
  out.margin = std::min(key.size() - std::min(key.size(), leakage), 2 * static_cast<std::size_t>(epsilon_exponent));
  if (out.bits == 0) return out;
  Rng rng = derive_stream(seed, "privacy_amplification");
  BitVector diagonal(out.bits + key.size() - 1);
  for (auto& b : diagonal) b = random_bit(rng);
  out.words = toeplitz_hash(key, diagonal, out.bits);
  return out;
}

KeyLedger make_ledger(const InitialSecret& a2b, const InitialSecret& b2a, std::uint64_t iv,
                      const CryptoParams& params) {
  return KeyLedger{make_direction(a2b, iv, params).first, make_direction(b2a, iv, params).first, iv, 0, {}};
}

void rekey(KeyLedger& ledger, std::span<const std::uint8_t> final_key, std::uint64_t new_iv,
           const CryptoParams& params) {
  const TagWidth w = ledger.alice_to_bob.width();
  const std::size_t lk = InitialSecret::bit_length_for(w);
  if (final_key.size() < 2 * lk) {
    throw Error(ErrorCode::InsufficientKey, "final key has " + std::to_string(final_key.size()) +
                                                " bits, rekeying needs " + std::to_string(2 * lk));
  }
  if (new_iv == ledger.iv) throw Error(ErrorCode::InvalidArgument, "rekey must move to a fresh IV");
  const InitialSecret a2b = split_secret(final_key.subspan(0, lk), w, Direction::AliceToBob);
  const InitialSecret b2a = split_secret(final_key.subspan(lk, lk), w, Direction::BobToAlice);
  ledger.alice_to_bob = make_direction(a2b, new_iv, params).first;
  ledger.bob_to_alice = make_direction(b2a, new_iv, params).first;
  ledger.iv = new_iv;
  ++ledger.rounds_completed;
  ledger.consumer_key.insert(ledger.consumer_key.end(), final_key.begin() + static_cast<std::ptrdiff_t>(2 * lk),
                             final_key.end());
}

double rounds_per_secret(uint128 limit, std::uint64_t tags_per_round) {
  if (tags_per_round == 0) throw Error(ErrorCode::RangeError, "tags per round must be positive");
  return static_cast<double>(limit) / static_cast<double>(tags_per_round);
}

double rounds_per_secret(TagWidth width, std::uint64_t tags_per_round) {
  return rounds_per_secret(TagBudget::default_limit(width), tags_per_round);
}

std::string two_sig_figs(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1e", value);
  return buf;
}

}  // namespace bb84aes
