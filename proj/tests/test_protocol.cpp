#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <set>

#include "bb84aes/adversary.hpp"
#include "bb84aes/error.hpp"
#include "bb84aes/protocol.hpp"

using namespace bb84aes;

namespace {

RoundResult clean_round(const ProtocolVariant& v, std::size_t pulses, std::uint64_t seed, double q = 0.0,
                        bool transcript = false) {
  RoundConfig rc;
  rc.pulses = pulses;
  rc.channel.qber = q;
  rc.record_transcript = transcript;
  RoundStreams streams = RoundStreams::from_seed(seed);
  EveState state;
  return run_round(rc, v, EveStrategy::passive(), state, streams);
}

InitialSecret secret_for(TagWidth w, std::uint64_t seed) {
  Rng rng = derive_stream(seed, "secret");
  std::vector<std::uint8_t> bits(InitialSecret::bit_length_for(w));
  for (;;) {
    for (auto& b : bits) b = random_bit(rng);
    try {
      return split_secret(bits, w);
    } catch (const Error&) {
    }
  }
}

}  // namespace

TEST(Variant, ClassicalBitsPerQubit) {
  EXPECT_EQ(ProtocolVariant::basic().classical_bits_per_qubit(), 128.0);
  EXPECT_EQ(ProtocolVariant::reduced_bandwidth().classical_bits_per_qubit(), 64.0);
  EXPECT_EQ(ProtocolVariant::dense(8).classical_bits_per_qubit(), 8.0);
  EXPECT_EQ(ProtocolVariant::plain().classical_bits_per_qubit(), 0.0);
}

TEST(Variant, Validation) {
  EXPECT_THROW(ProtocolVariant::dense(1), Error);
  EXPECT_THROW(ProtocolVariant::dense(21), Error);
  EXPECT_THROW(ProtocolVariant::biased(Basis::Z, 0.5), Error);
  ProtocolVariant v = ProtocolVariant::dense(4);
  v.reduced_processing = true;
  EXPECT_THROW(v.validate(), Error);
}

TEST(Symbols, EncodingAndPatterns) {
  const std::vector<Basis> bases = {Basis::Z, Basis::X, Basis::Z, Basis::Z};
  EXPECT_EQ(encode_bases(bases), (std::vector<std::uint8_t>{1, 0, 1, 1}));
  EXPECT_EQ(bases_to_pattern(bases), 0b1011U);
  EXPECT_EQ(pattern_to_bases(0b1011, 4), bases);
  EXPECT_EQ(encode_pattern(0b1011, 4), encode_bases(bases));
  for (std::uint32_t p = 0; p < 256; ++p) EXPECT_EQ(bases_to_pattern(pattern_to_bases(p, 8)), p);
}

TEST(LookupTable, FootprintMatchesResourceFigures) {
  const std::map<int, std::size_t> expected = {{2, 32}, {3, 64}, {8, 2048}, {12, 32768}};
  for (const auto& [xi, bytes] : expected) {
    EXPECT_EQ(build_lookup_table(secret_for(TagWidth::Bits64, 1), xi).footprint_bytes(), bytes) << xi;
    EXPECT_EQ(build_lookup_table(secret_for(TagWidth::Bits128, 1), xi).footprint_bytes(), 2 * bytes) << xi;
  }
}

TEST(LookupTable, SortedAndComplete) {
  const InitialSecret s = secret_for(TagWidth::Bits64, 2);
  const LookupTable t = build_lookup_table(s, 8);
  ASSERT_EQ(t.size(), 256U);
  std::set<std::uint32_t> patterns;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i > 0) EXPECT_LT(t.entries()[i - 1].digest, t.entries()[i].digest);
    const auto& e = t.entries()[i];
    patterns.insert(e.pattern);
    EXPECT_EQ(e.digest, universal_hash(s.hash_key(), encode_pattern(e.pattern, 8), TagWidth::Bits64));
  }
  EXPECT_EQ(patterns.size(), 256U);
}

TEST(BinarySearch, BoundHoldsForEveryEntryAndMisses) {
  for (int xi = 0; xi <= 12; ++xi) {
    const LookupTable t = build_lookup_table(secret_for(TagWidth::Bits64, 3), xi);
    int worst = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      const SearchResult r = binary_search(t.entries(), t.entries()[i].digest);
      ASSERT_EQ(r.index, i);
      ASSERT_LE(r.comparisons, xi + 1);
      worst = std::max(worst, r.comparisons);
      const SearchResult miss = binary_search(t.entries(), t.entries()[i].digest + 1);
      if (i + 1 == t.size() || t.entries()[i + 1].digest != t.entries()[i].digest + 1) {
        ASSERT_FALSE(miss.index.has_value());
      }
      ASSERT_LE(miss.comparisons, xi + 1);
    }
    EXPECT_EQ(worst, xi + 1);
    EXPECT_EQ(worst_case_comparisons(t.size()), xi + 1);
  }
  const LookupTable single = build_lookup_table(secret_for(TagWidth::Bits64, 4), 0);
  EXPECT_EQ(binary_search(single.entries(), single.entries()[0].digest).comparisons, 1);
}

TEST(BinarySearch, SingleBitCorruptionsAreMisses) {
  const InitialSecret s = secret_for(TagWidth::Bits64, 5);
  const LookupTable t = build_lookup_table(s, 8);
  Rng rng = derive_stream(5, "corrupt");
  int hits = 0;
  for (int i = 0; i < 1000000; ++i) {
    const uint128 digest = t.entries()[rng() % t.size()].digest;
    hits += binary_search(t.entries(), digest ^ (uint128{1} << (rng() % 64))).index.has_value();
  }
  EXPECT_EQ(hits, 0);
}

TEST(Sessions, BasisRecoveryEveryVariant) {
  for (const ProtocolVariant& v :
       {ProtocolVariant::basic(), ProtocolVariant::reduced_processing_mode(), ProtocolVariant::reduced_bandwidth(),
        ProtocolVariant::reduced_bandwidth(true), ProtocolVariant::dense(8), ProtocolVariant::dense(3, TagWidth::Bits128)}) {
    Rng keys = derive_stream(6, "keys");
    Rng source = derive_stream(6, "source");
    SessionPair s = make_sessions(v, keys);
    std::set<uint128> nonces;
    for (int i = 0; i < 2000; ++i) {
      const Announcement a = s.alice.announce(source, 0.5);
      nonces.insert(a.issued.nonce);
      const Resolution r = s.bob.resolve_bases(a.issued.tag);
      ASSERT_TRUE(r.recognized()) << v.name();
      ASSERT_EQ(*r.bases, a.bases) << v.name();
      std::vector<bool> arrived(a.bases.size());
      for (std::size_t k = 0; k < arrived.size(); ++k) arrived[k] = (i + k) % 3 != 0;
      const auto confirmed = s.alice.check_response(s.bob.respond(arrived).tag);
      ASSERT_TRUE(confirmed.has_value()) << v.name();
      ASSERT_EQ(*confirmed, arrived) << v.name();
    }
    EXPECT_EQ(nonces.size(), 2000U);
  }
}

TEST(Sessions, ReducedProcessingTreatsUnknownTagAsZ) {
  Rng keys = derive_stream(7, "keys");
  Rng source = derive_stream(7, "source");
  Rng eve = derive_stream(7, "eve");
  SessionPair s = make_sessions(ProtocolVariant::reduced_processing_mode(), keys);
  for (int i = 0; i < 200; ++i) {
    const Announcement a = s.alice.announce(source, 0.5, Basis::Z);
    const Resolution r = s.bob.resolve_bases(random_forgery(a.issued.tag, eve));
    ASSERT_TRUE(r.recognized());
    ASSERT_EQ((*r.bases)[0], Basis::Z);
  }
}

TEST(Sessions, BasicFlagsForgedTags) {
  Rng keys = derive_stream(8, "keys");
  Rng source = derive_stream(8, "source");
  Rng eve = derive_stream(8, "eve");
  SessionPair s = make_sessions(ProtocolVariant::basic(), keys);
  for (int i = 0; i < 200; ++i) {
    const Announcement a = s.alice.announce(source, 0.5);
    ASSERT_FALSE(s.bob.resolve_bases(random_forgery(a.issued.tag, eve)).recognized());
  }
}

TEST(Sessions, FakeResponsesRejected) {
  Rng keys = derive_stream(9, "keys");
  Rng source = derive_stream(9, "source");
  Rng eve = derive_stream(9, "eve");
  SessionPair s = make_sessions(ProtocolVariant::dense(6), keys);
  for (int i = 0; i < 200; ++i) {
    const Announcement a = s.alice.announce(source, 0.5);
    s.bob.resolve_bases(a.issued.tag);
    const IssuedTag genuine = s.bob.respond(std::vector<bool>(6, true));
    ASSERT_FALSE(s.alice.check_response(random_forgery(genuine.tag, eve)).has_value());
  }
}

TEST(Gate, ReleaseTickIndependentOfBasisString) {
  for (int xi = 2; xi <= 10; ++xi) {
    Rng keys = derive_stream(10, "keys");
    SessionPair s = make_sessions(ProtocolVariant::dense(xi), keys);
    EXPECT_EQ(s.alice.worst_case_ticks(3), (xi + 1) * 3);
    const LookupTable& t = *s.bob.lookup_table();
    std::set<std::uint64_t> ticks;
    std::set<int> comparisons;
    for (const LookupEntry& e : t.entries()) {
      Resolution r;
      r.comparisons = binary_search(t.entries(), e.digest).comparisons;
      comparisons.insert(r.comparisons);
      ticks.insert(constant_time_gate(s.alice, 1000, r, 3));
    }
    EXPECT_EQ(ticks.size(), 1U) << xi;
    EXPECT_EQ(*ticks.begin(), 1000U + static_cast<std::uint64_t>((xi + 1) * 3));
    EXPECT_GT(comparisons.size(), 1U);
  }
  Rng keys = derive_stream(11, "keys");
  SessionPair basic = make_sessions(ProtocolVariant::basic(), keys);
  EXPECT_EQ(constant_time_gate(basic.alice, 77, Resolution{}, 5), 77U);
}

TEST(Round, LosslessNoiselessIsFullyEfficient) {
  for (const ProtocolVariant& v : {ProtocolVariant::basic(), ProtocolVariant::dense(8)}) {
    const RoundResult r = clean_round(v, 20000, 12);
    EXPECT_EQ(r.status, RoundStatus::Completed);
    EXPECT_EQ(r.efficiency, 1.0);
    EXPECT_EQ(r.qber, 0.0);
    EXPECT_EQ(r.alice_raw_key.size(), r.clicks);
    EXPECT_TRUE(r.detections.empty());
  }
}

TEST(Round, NoiseShowsUpAsQber) {
  const RoundResult r = clean_round(ProtocolVariant::basic(), 300000, 13, 0.05);
  ASSERT_GT(r.clicks, 100000U);
  EXPECT_NEAR(r.qber, 0.05, 0.005);
}

TEST(Round, NoClickExcludedFromKey) {
  const RoundResult r = clean_round(ProtocolVariant::basic(), 5000, 14);
  std::size_t vacuum = 0;
  for (std::size_t i = 0; i < r.pulses.size(); ++i) {
    if (r.pulses[i].photons_sent == 0) {
      ++vacuum;
      EXPECT_FALSE(r.pulses[i].outcome.clicked);
      EXPECT_FALSE(std::binary_search(r.key_indices.begin(), r.key_indices.end(), i));
    }
  }
  EXPECT_GT(vacuum, 0U);
  EXPECT_EQ(r.key_indices.size() + vacuum, r.pulses.size());
}

TEST(Round, TagsPrecedePulsesAndNoncesNeverRepeat) {
  for (const ProtocolVariant& v : {ProtocolVariant::basic(), ProtocolVariant::dense(5)}) {
    const RoundResult r = clean_round(v, 3000, 15, 0.0, true);
    std::uint64_t last_tag = 0;
    bool have_tag = false;
    std::size_t pulses = 0;
    for (const TranscriptEvent& e : r.transcript) {
      if (e.kind == "tag") {
        ASSERT_TRUE(!have_tag || e.tick > last_tag);
        last_tag = e.tick;
        have_tag = true;
      } else if (e.kind == "pulse") {
        ASSERT_TRUE(have_tag);
        ASSERT_GT(e.tick, last_tag);
        ++pulses;
      }
    }
    EXPECT_EQ(pulses, r.pulses.size());
    std::set<std::pair<int, uint128>> seen;
    for (const NonceUse& n : r.nonce_log) {
      ASSERT_TRUE(seen.insert({static_cast<int>(n.direction), n.nonce}).second);
    }
    EXPECT_EQ(seen.size(), r.tags_alice + r.tags_bob);
  }
}

TEST(Round, TranscriptFormat) {
  const RoundResult r = clean_round(ProtocolVariant::basic(), 2, 16, 0.0, true);
  const std::string text = format_transcript(r.transcript);
  EXPECT_EQ(text.rfind("tick=0 actor=alice event=tag payload=", 0), 0U);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), static_cast<long>(r.transcript.size()));
}

TEST(Round, ComparisonCeilingReachedInDenseRound) {
  const RoundResult r = clean_round(ProtocolVariant::dense(8), 80000, 17);
  EXPECT_EQ(r.max_comparisons, 9);
}

TEST(Round, BudgetExhaustionEndsWithMustRekey) {
  RoundConfig rc;
  rc.pulses = 1000;
  RoundStreams streams = RoundStreams::from_seed(18);
  EveState state;
  CryptoParams p;
  p.budget_limit = 100;
  const RoundResult r = run_round(rc, ProtocolVariant::basic(), EveStrategy::passive(), state, streams, p);
  EXPECT_EQ(r.status, RoundStatus::MustRekey);
  EXPECT_EQ(r.tags_alice, 100U);
  EXPECT_FALSE(r.public_view.complete);

  RoundStreams s2 = RoundStreams::from_seed(18);
  CryptoParams c;
  c.counter_width = 6;
  const RoundResult r2 = run_round(rc, ProtocolVariant::basic(), EveStrategy::passive(), state, s2, c);
  EXPECT_EQ(r2.status, RoundStatus::MustRekey);
  EXPECT_EQ(r2.tags_alice, 64U);
}

TEST(Round, SecretsCarryAcrossRounds) {
  Rng keys = derive_stream(19, "keys");
  CryptoParams p;
  p.budget_limit = 150;
  SessionPair s = make_sessions(ProtocolVariant::basic(), keys, p);
  RoundConfig rc;
  rc.pulses = 100;
  RoundStreams streams = RoundStreams::from_seed(19);
  EveState state;
  EXPECT_EQ(run_round(rc, s, EveStrategy::passive(), state, streams).status, RoundStatus::Completed);
  EXPECT_EQ(run_round(rc, s, EveStrategy::passive(), state, streams).status, RoundStatus::MustRekey);
  EXPECT_TRUE(s.alice.must_rekey());
}

TEST(Baselines, PlainSiftsHalf) {
  const RoundResult r = clean_round(ProtocolVariant::plain(), 100000, 20);
  EXPECT_NEAR(r.efficiency, 0.5, 0.01);
  EXPECT_EQ(r.qber, 0.0);
  EXPECT_TRUE(r.public_view.bases_public);
}

TEST(Baselines, BiasedMatchesMostly) {
  const RoundResult r = clean_round(ProtocolVariant::biased(Basis::Z, 0.9), 100000, 21);
  EXPECT_NEAR(r.efficiency, 0.82, 0.01);
  EXPECT_GT(r.check_bits, 0U);
  EXPECT_EQ(r.check_errors, 0U);
}
