#pragma once

// Parameter estimation, reconciliation accounting, privacy amplification and
// key rotation. Reconciliation is an idealised leakage model: the bits
// disclosed are counted, not exchanged.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bb84aes/crypto.hpp"
#include "bb84aes/protocol.hpp"
#include "bb84aes/rng.hpp"

namespace bb84aes {

using BitVector = std::vector<std::uint8_t>;  // one bit per element

/// h2(p) = -p log2 p - (1-p) log2 (1-p), with h2(0) = h2(1) = 0.
double binary_entropy(double p);

struct Estimate {
  double qber = 0.0;
  std::vector<std::size_t> disclosed;  // indices into the input keys, ascending
  BitVector alice_remaining;
  BitVector bob_remaining;
};

/// Publicly compare a random subset of ceil(fraction * n) positions.
Estimate estimate_qber(std::span<const std::uint8_t> alice, std::span<const std::uint8_t> bob,
                       double fraction, Rng& rng);

struct Reconciliation {
  BitVector alice;
  BitVector bob;  // equal to alice afterwards
  std::size_t leakage = 0;
  std::size_t corrected = 0;
  std::optional<IssuedTag> tag;  // reconciliation message tag, if authenticated
};

/// leak_EC = ceil(f * n * h2(q_hat)).
std::size_t reconciliation_leakage(std::size_t n, double qber, double inefficiency);

Reconciliation reconcile(std::span<const std::uint8_t> alice, std::span<const std::uint8_t> bob,
                         double qber, double inefficiency = 1.2,
                         Authenticator* authenticator = nullptr);

/// Output length max(0, n - leakage - 2 * epsilon_exponent).
std::size_t amplified_length(std::size_t n, std::size_t leakage, unsigned epsilon_exponent);

/// y = T x over GF(2) with T[i][j] = diagonal[i - j + n - 1]; `diagonal`
/// holds m + n - 1 bits. Output packed MSB-first into 64-bit words.
std::vector<std::uint64_t> toeplitz_hash(std::span<const std::uint8_t> key,
                                         std::span<const std::uint8_t> diagonal, std::size_t m);

struct AmplifiedKey {
  std::vector<std::uint64_t> words;
  std::size_t bits = 0;
  std::size_t margin = 0;  // 2 * epsilon_exponent, or what was left of it

  [[nodiscard]] BitVector unpack() const;
};

/// Toeplitz matrix drawn from a public seed.
AmplifiedKey privacy_amplify(std::span<const std::uint8_t> key, std::size_t leakage,
                             unsigned epsilon_exponent, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Key rotation

struct KeyLedger {
  Authenticator alice_to_bob;
  Authenticator bob_to_alice;
  std::uint64_t iv = 0;
  std::uint64_t rounds_completed = 0;
  BitVector consumer_key;
};

KeyLedger make_ledger(const InitialSecret& a2b, const InitialSecret& b2a, std::uint64_t iv,
                      const CryptoParams& params = {});

/// Take 2 l_k bits from the front of `final_key` as the next pair of secrets
/// and hand the rest to the consumer. Throws InsufficientKey if short, and
/// InvalidArgument if `new_iv` repeats the current one.
void rekey(KeyLedger& ledger, std::span<const std::uint8_t> final_key, std::uint64_t new_iv,
           const CryptoParams& params = {});

/// Rounds a secret survives when each round spends `tags_per_round` tags.
double rounds_per_secret(TagWidth width, std::uint64_t tags_per_round);
double rounds_per_secret(uint128 limit, std::uint64_t tags_per_round);

/// Two significant figures, e.g. "1.8e+14".
std::string two_sig_figs(double value);

}  // namespace bb84aes
