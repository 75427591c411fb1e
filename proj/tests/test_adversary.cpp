#include <gtest/gtest.h>

#include "bb84aes/adversary.hpp"
#include "bb84aes/error.hpp"

using namespace bb84aes;

namespace {

struct Outcome {
  RoundResult round;
  EveReport eve;
};

Outcome attacked(const ProtocolVariant& v, const EveStrategy& s, std::size_t pulses, std::uint64_t seed) {
  RoundConfig rc;
  rc.pulses = pulses;
  rc.channel.qber = 0.0;
  RoundStreams streams = RoundStreams::from_seed(seed);
  EveState state;
  Outcome o{run_round(rc, v, s, state, streams), {}};
  Rng rng = derive_stream(seed, "finalize");
  o.eve = finalize(s, state, o.round.public_view, rng);
  score_against(o.eve, o.round);
  return o;
}

}  // namespace

TEST(Forgery, NeverEqualsGenuine) {
  Rng rng = derive_stream(1, "forge");
  for (const TagWidth w : {TagWidth::Bits16, TagWidth::Bits64, TagWidth::Bits128}) {
    for (int i = 0; i < 20000; ++i) {
      Tag g;
      g.width = w;
      g.bits = rng() & width_mask(w);
      const Tag f = random_forgery(g, rng);
      ASSERT_NE(f.bits, g.bits);
      ASSERT_EQ(f.bits & ~width_mask(w), 0);
    }
  }
}

TEST(Intercept, SplittingRules) {
  Rng rng = derive_stream(2, "intercept");
  EveState st;
  const Pulse two[] = {Pulse{2, Basis::X, 1}};
  const Interception a = intercept(EveStrategy::pns_with_memory(), st, std::nullopt, two, 0, rng);
  ASSERT_TRUE(a.pulses[0].has_value());
  EXPECT_EQ(a.pulses[0]->photons, 1U);
  ASSERT_EQ(st.stored.size(), 1U);
  EXPECT_EQ(st.stored[0].kept.photons, 1U);
  EXPECT_EQ(st.pulses_blocked, 0U);

  EveState st2;
  const Interception b = intercept(EveStrategy::pns_three_plus(), st2, std::nullopt, two, 0, rng);
  EXPECT_FALSE(b.pulses[0].has_value());
  EXPECT_EQ(st2.pulses_blocked, 1U);

  const Pulse three[] = {Pulse{3, Basis::Z, 0}};
  const Interception c = intercept(EveStrategy::pns_three_plus(), st2, std::nullopt, three, 1, rng);
  EXPECT_EQ(c.pulses[0]->photons, 1U);
  EXPECT_EQ(st2.stored.back().kept.photons, 2U);
}

TEST(Intercept, TagForwardingPolicies) {
  Rng rng = derive_stream(3, "intercept");
  const Tag genuine{0x1234, TagWidth::Bits128, 0};
  const Pulse p[] = {Pulse{1, Basis::X, 0}};
  EveState st;
  EXPECT_EQ(*intercept(EveStrategy::blind_tag_flip(Basis::Z, false), st, genuine, p, 0, rng).tag, genuine);
  EXPECT_NE(intercept(EveStrategy::blind_tag_flip(Basis::Z, true), st, genuine, p, 0, rng).tag->bits, genuine.bits);
  EXPECT_NE(intercept(EveStrategy::dense_tag_guess(), st, genuine, p, 0, rng).tag->bits, genuine.bits);
  EXPECT_EQ(st.tags_replaced, 2U);
}

TEST(Finalize, RequiresCompletedRound) {
  EveState st;
  PublicTranscript t;
  Rng rng = derive_stream(4, "fin");
  try {
    finalize(EveStrategy::pns_with_memory(), st, t, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IncompleteRound);
  }
}

TEST(Attacks, PnsMemoryAgainstPlainIsPerfect) {
  const Outcome o = attacked(ProtocolVariant::plain(), EveStrategy::pns_with_memory(), 100000, 5);
  EXPECT_GT(o.eve.guesses_in_key, 1000U);
  EXPECT_EQ(o.eve.agreement, 1.0);
}

TEST(Attacks, PnsMemoryAgainstAesIsThreeQuarters) {
  const Outcome o = attacked(ProtocolVariant::basic(), EveStrategy::pns_with_memory(), 150000, 6);
  EXPECT_GE(o.eve.stored_in_key, 10000U);
  EXPECT_NEAR(o.eve.agreement, 0.75, 0.01);
  EXPECT_TRUE(o.round.detections.empty());
}

TEST(Attacks, UsdWithZeroSuccessGuessesNothing) {
  EveStrategy s = EveStrategy::pns_three_plus(0.0);
  const Outcome o = attacked(ProtocolVariant::plain(), s, 20000, 7);
  EXPECT_GT(o.eve.stored_photons, 0U);
  EXPECT_TRUE(o.eve.key_guess.empty());
}

TEST(Attacks, UsdPerCopyOverride) {
  EveStrategy s = EveStrategy::pns_three_plus(0.0);
  s.p_usd_by_copies[2] = 1.0;
  EXPECT_EQ(s.usd_probability(2), 1.0);
  EXPECT_EQ(s.usd_probability(3), 0.0);
  const Outcome o = attacked(ProtocolVariant::basic(), s, 20000, 8);
  EXPECT_EQ(o.eve.agreement, 1.0);
  EXPECT_EQ(o.eve.key_guess.size(), o.eve.stored_photons);
}

TEST(Attacks, InterceptResendInducesQuarterErrors) {
  const Outcome o = attacked(ProtocolVariant::basic(), EveStrategy::intercept_resend(), 100000, 9);
  EXPECT_NEAR(o.round.qber, 0.25, 0.01);
}

TEST(Attacks, PnsNoMemoryBiasedVersusAes) {
  const Outcome biased = attacked(ProtocolVariant::biased(Basis::Z, 0.9), EveStrategy::pns_no_memory(Basis::Z), 100000, 10);
  EXPECT_EQ(biased.eve.agreement, 1.0);
  EXPECT_EQ(biased.round.qber, 0.0);
  const Outcome aes = attacked(ProtocolVariant::basic(), EveStrategy::pns_no_memory(Basis::Z), 100000, 10);
  EXPECT_LE(aes.eve.agreement, 0.76);
  EXPECT_TRUE(aes.round.detections.empty());
}

TEST(Attacks, TagsRevealNoBasis) {
  // Basis guessed from the low tag bit.
  Rng keys = derive_stream(11, "keys");
  Rng source = derive_stream(11, "source");
  SessionPair s = make_sessions(ProtocolVariant::basic(), keys);
  int right = 0;
  constexpr int kTrials = 100000;
  for (int i = 0; i < kTrials; ++i) {
    const Announcement a = s.alice.announce(source, 0.5);
    const Basis guess = (a.issued.tag.bits & 1) ? Basis::Z : Basis::X;
    right += guess == a.bases[0];
  }
  EXPECT_NEAR(right / double(kTrials), 0.5, 0.01);
}

TEST(Attacks, BlindTagFlipOptimalityOfForwarding) {
  double forward = 1.0;
  double best_other = 1.0;
  for (const Basis alice : {Basis::X, Basis::Z}) {
    for (const Basis eve : {Basis::X, Basis::Z}) {
      for (const bool flip : {false, true}) {
        RoundConfig rc;
        rc.pulses = 20000;
        rc.channel.qber = 0.0;
        rc.fixed_alice_basis = alice;
        RoundStreams streams = RoundStreams::from_seed(12);
        EveState st;
        const RoundResult r = run_round(rc, ProtocolVariant::reduced_processing_mode(),
                                        EveStrategy::blind_tag_flip(eve, flip), st, streams);
        if (alice == eve && !flip) {
          forward = std::min(forward, r.qber);
        } else {
          best_other = std::min(best_other, r.qber);
        }
      }
    }
  }
  EXPECT_LE(forward, best_other);
}

TEST(DoS, FakeUserCaughtAtFirstResponse) {
  DoSConfig c;
  c.trials = 500;
  const DoSReport r = dos_scenario(EveStrategy::dos_probe(30.0), ProtocolVariant::basic(), c);
  EXPECT_EQ(r.detected, 500U);
  EXPECT_EQ(r.max_latency_groups, 1U);
  EXPECT_EQ(r.tags_per_probe, 2.0);
}

TEST(DoS, BaselineWaitsForWholeRound) {
  DoSConfig c;
  c.trials = 1;
  c.baseline_pulses = 20000;
  const DoSReport r = dos_scenario(EveStrategy::dos_probe(30.0), ProtocolVariant::plain(), c);
  EXPECT_EQ(r.detected, 1U);
  EXPECT_GE(r.max_latency_ticks, 20000U + c.post_processing_ticks);
}

TEST(DoS, KeyExhaustionWithSmallBudget) {
  DoSConfig c;
  c.crypto.budget_limit = 256;
  const DoSReport r = dos_scenario(EveStrategy::key_exhaustion(1000), ProtocolVariant::basic(), c);
  EXPECT_TRUE(r.exhausted);
  EXPECT_EQ(r.probes_run, 128U);
  ASSERT_TRUE(r.probes_to_exhaustion.has_value());
  EXPECT_EQ(*r.probes_to_exhaustion, 128.0);
  EXPECT_EQ(r.secret_remaining, "0");
}

TEST(DenseGuess, AcceptanceRateAtTestWidth) {
  const GuessTrialReport g = dense_guess_trials(ProtocolVariant::dense(4, TagWidth::Bits16), 200000, 13);
  EXPECT_NEAR(g.expected_rate, 15.0 / 65535.0, 1e-15);
  const double sigma = std::sqrt(g.expected_rate * (1 - g.expected_rate) / 200000.0);
  EXPECT_NEAR(g.rate, g.expected_rate, 3 * sigma);
}

TEST(Decimal, Formatting) {
  EXPECT_EQ(to_decimal(0), "0");
  EXPECT_EQ(to_decimal(uint128{1} << 64), "18446744073709551616");
}
