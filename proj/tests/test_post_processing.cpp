#include <gtest/gtest.h>

#include <set>

#include "bb84aes/error.hpp"
#include "bb84aes/post_processing.hpp"
#include "oracles.hpp"

using namespace bb84aes;

namespace {

BitVector random_key(std::size_t n, Rng& rng) {
  BitVector k(n);
  for (auto& b : k) b = random_bit(rng);
  return k;
}

InitialSecret secret_for(TagWidth w, std::uint64_t seed) {
  Rng rng = derive_stream(seed, "secret");
  for (;;) {
    try {
      return split_secret(random_key(InitialSecret::bit_length_for(w), rng), w);
    } catch (const Error&) {
    }
  }
}

}  // namespace

// Reference values from 40-digit mpmath evaluation.
TEST(Entropy, KnownValues) {
  EXPECT_EQ(binary_entropy(0.0), 0.0);
  EXPECT_EQ(binary_entropy(1.0), 0.0);
  EXPECT_DOUBLE_EQ(binary_entropy(0.5), 1.0);
  EXPECT_NEAR(binary_entropy(0.11), 0.4999159582, 1e-6);
  EXPECT_NEAR(binary_entropy(0.05), 0.2863969571, 1e-9);
  EXPECT_THROW(binary_entropy(-0.1), Error);
  EXPECT_THROW(binary_entropy(1.5), Error);
}

TEST(Estimate, IdenticalKeysHaveZeroQber) {
  Rng rng = derive_stream(1, "est");
  const BitVector k = random_key(1000, rng);
  const Estimate e = estimate_qber(k, k, 0.2, rng);
  EXPECT_EQ(e.qber, 0.0);
  EXPECT_EQ(e.disclosed.size(), 200U);
  EXPECT_EQ(e.alice_remaining.size(), 800U);
  EXPECT_TRUE(std::is_sorted(e.disclosed.begin(), e.disclosed.end()));
}

TEST(Estimate, InjectedErrorRate) {
  Rng rng = derive_stream(2, "est");
  const BitVector a = random_key(100000, rng);
  BitVector b = a;
  for (auto& bit : b) bit ^= static_cast<std::uint8_t>(bernoulli(rng, 0.05));
  const Estimate e = estimate_qber(a, b, 0.1, rng);
  EXPECT_NEAR(e.qber, 0.05, 0.007);
  // Disclosed positions are gone from what remains.
  std::size_t kept_errors = 0;
  for (std::size_t i = 0; i < e.alice_remaining.size(); ++i) kept_errors += e.alice_remaining[i] != e.bob_remaining[i];
  std::size_t shown_errors = 0;
  for (std::size_t i : e.disclosed) shown_errors += a[i] != b[i];
  std::size_t total = 0;
  for (std::size_t i = 0; i < a.size(); ++i) total += a[i] != b[i];
  EXPECT_EQ(kept_errors + shown_errors, total);
}

TEST(Estimate, FullSampleLeavesNothing) {
  Rng rng = derive_stream(3, "est");
  const BitVector k = random_key(100, rng);
  EXPECT_TRUE(estimate_qber(k, k, 1.0, rng).alice_remaining.empty());
  try {
    estimate_qber(BitVector{}, BitVector{}, 0.1, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyKey);
  }
}

TEST(Reconcile, LeakageAccounting) {
  EXPECT_EQ(reconciliation_leakage(100000, 0.0, 1.2), 0U);
  EXPECT_EQ(reconciliation_leakage(100000, 0.05, 1.2), 34368U);
  EXPECT_EQ(reconciliation_leakage(1000, 0.5, 1.2), 1000U);
  EXPECT_EQ(reconciliation_leakage(1000, 0.5, 1.0), 1000U);
  Rng rng = derive_stream(4, "rec");
  const BitVector a = random_key(500, rng);
  BitVector b = a;
  b[3] ^= 1;
  b[400] ^= 1;
  const Reconciliation r = reconcile(a, b, 0.004, 1.2);
  EXPECT_EQ(r.bob, a);
  EXPECT_EQ(r.corrected, 2U);
  EXPECT_FALSE(r.tag.has_value());
}

TEST(Reconcile, MessagesAreTagged) {
  auto [auth, mirror] = make_direction(secret_for(TagWidth::Bits128, 5), 9, CryptoParams{});
  Rng rng = derive_stream(5, "rec");
  const BitVector a = random_key(2000, rng);
  const Reconciliation r = reconcile(a, a, 0.02, 1.2, &auth);
  ASSERT_TRUE(r.tag.has_value());
  EXPECT_EQ(r.tag->nonce, mirror.reserve_nonce());
  EXPECT_EQ(auth.budget().consumed(), 1);
}

TEST(Amplify, LengthRule) {
  EXPECT_EQ(amplified_length(1000, 100, 40), 820U);
  EXPECT_EQ(amplified_length(1000, 1000, 40), 0U);
  EXPECT_EQ(amplified_length(1000, 950, 40), 0U);
  Rng rng = derive_stream(6, "pa");
  const BitVector k = random_key(300, rng);
  EXPECT_EQ(privacy_amplify(k, 400, 40, 1).bits, 0U);
}

TEST(Amplify, MatchesDenseMatrixOracle) {
  Rng rng = derive_stream(7, "pa");
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng() % 300;
    const std::size_t m = 1 + rng() % 200;
    const BitVector x = random_key(n, rng);
    const BitVector diag = random_key(m + n - 1, rng);
    const auto words = toeplitz_hash(x, diag, m);
    const auto expected = oracle::toeplitz(x, diag, m);
    for (std::size_t i = 0; i < m; ++i) ASSERT_EQ((words[i / 64] >> (63 - i % 64)) & 1, expected[i]) << trial;
  }
}

TEST(Amplify, IdentityDiagonalReturnsKey) {
  Rng rng = derive_stream(8, "pa");
  const std::size_t n = 130;
  const BitVector x = random_key(n, rng);
  BitVector diag(2 * n - 1, 0);
  diag[n - 1] = 1;
  AmplifiedKey k;
  k.words = toeplitz_hash(x, diag, n);
  k.bits = n;
  EXPECT_EQ(k.unpack(), x);
}

TEST(Amplify, DeterministicAndLinear) {
  Rng rng = derive_stream(9, "pa");
  for (int trial = 0; trial < 20; ++trial) {
    const BitVector k1 = random_key(1000, rng);
    const BitVector k2 = random_key(1000, rng);
    BitVector k3(1000);
    for (std::size_t i = 0; i < 1000; ++i) k3[i] = k1[i] ^ k2[i];
    const AmplifiedKey a = privacy_amplify(k1, 100, 40, 77);
    EXPECT_EQ(a.words, privacy_amplify(k1, 100, 40, 77).words);
    const AmplifiedKey b = privacy_amplify(k2, 100, 40, 77);
    const AmplifiedKey c = privacy_amplify(k3, 100, 40, 77);
    ASSERT_EQ(a.bits, 820U);
    for (std::size_t w = 0; w < a.words.size(); ++w) ASSERT_EQ(a.words[w] ^ b.words[w], c.words[w]);
  }
}

TEST(Rekey, ExactBoundaryAndShortKeys) {
  const InitialSecret a2b = secret_for(TagWidth::Bits128, 10);
  const InitialSecret b2a = secret_for(TagWidth::Bits128, 11);
  KeyLedger ledger = make_ledger(a2b, b2a, 1);
  ledger.alice_to_bob.issue(std::vector<std::uint8_t>{1});
  Rng rng = derive_stream(10, "rekey");
  BitVector fresh = random_key(768, rng);
  fresh[383] = 1;
  fresh[767] = 1;
  rekey(ledger, fresh, 2);
  EXPECT_EQ(ledger.consumer_key.size(), 0U);
  EXPECT_EQ(ledger.rounds_completed, 1U);
  EXPECT_EQ(ledger.alice_to_bob.budget().consumed(), 0);
  EXPECT_EQ(ledger.alice_to_bob.generator().iv(), 2U);
  EXPECT_EQ(ledger.alice_to_bob.secret().hash_key(), split_secret(std::span(fresh).subspan(0, 384), TagWidth::Bits128).hash_key());
  EXPECT_EQ(ledger.bob_to_alice.secret().direction(), Direction::BobToAlice);

  BitVector more = random_key(1000, rng);
  more[383] = 1;
  more[767] = 1;
  rekey(ledger, more, 3);
  EXPECT_EQ(ledger.consumer_key, BitVector(more.begin() + 768, more.end()));

  try {
    rekey(ledger, random_key(767, rng), 4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InsufficientKey);
  }
  EXPECT_THROW(rekey(ledger, more, 3), Error);
}

TEST(Rekey, OldTagsNoLongerVerify) {
  const InitialSecret a2b = secret_for(TagWidth::Bits64, 12);
  const InitialSecret b2a = secret_for(TagWidth::Bits64, 13);
  KeyLedger ledger = make_ledger(a2b, b2a, 5);
  const std::vector<std::uint8_t> msg = {0};
  std::vector<IssuedTag> old;
  for (int i = 0; i < 100; ++i) old.push_back(ledger.alice_to_bob.issue(msg));
  Rng rng = derive_stream(12, "rekey");
  BitVector fresh = random_key(640, rng);
  fresh[319] = 1;
  fresh[639] = 1;
  rekey(ledger, fresh, 6);
  std::set<uint128> old_nonces;
  for (const IssuedTag& t : old) {
    old_nonces.insert(t.nonce);
    EXPECT_FALSE(verify_tag(ledger.alice_to_bob.secret(), t.nonce, msg, t.tag));
  }
  for (int i = 0; i < 100; ++i) EXPECT_FALSE(old_nonces.count(ledger.alice_to_bob.issue(msg).nonce));
}

TEST(RoundsPerSecret, BudgetArithmetic) {
  EXPECT_EQ(two_sig_figs(rounds_per_secret(TagWidth::Bits128, 100000)), "1.8e+14");
  EXPECT_EQ(two_sig_figs(rounds_per_secret(TagWidth::Bits64, 100000)), "4.3e+04");
  EXPECT_EQ(rounds_per_secret(uint128{256}, 2), 128.0);
}
