#include <gtest/gtest.h>

#include <map>

#include "bb84aes/channel.hpp"
#include "bb84aes/error.hpp"
#include "oracles.hpp"

using namespace bb84aes;

TEST(Source, PoissonPhotonStatistics) {
  Rng rng = derive_stream(1, "source");
  constexpr int kDraws = 1000000;
  std::map<unsigned, int> hist;
  for (int i = 0; i < kDraws; ++i) {
    const Pulse p = emit_pulse(0.5, Basis::Z, 1, rng);
    ASSERT_EQ(p.basis, Basis::Z);
    ASSERT_EQ(p.bit, 1);
    ++hist[p.photons];
  }
  EXPECT_NEAR(hist[0] / double(kDraws), oracle::poisson_pmf(0, 0.5), 0.002);
  EXPECT_NEAR(double(hist[2]) / hist[1], oracle::poisson_pmf(2, 0.5) / oracle::poisson_pmf(1, 0.5), 0.01);
  EXPECT_NEAR(oracle::poisson_pmf(2, 0.5) / oracle::poisson_pmf(1, 0.5), 0.25, 1e-12);
}

TEST(Channel, TransmittanceFromDb) {
  EXPECT_DOUBLE_EQ(transmittance_from_db(0.0), 1.0);
  EXPECT_NEAR(transmittance_from_db(2.0), 0.630957, 1e-6);
  EXPECT_NEAR(transmittance_from_db(10.0), 0.1, 1e-12);
}

TEST(Channel, LosslessIsIdentityAndVacuumStaysEmpty) {
  Rng rng = derive_stream(2, "channel");
  const Pulse p{4, Basis::X, 1};
  EXPECT_EQ(transmit(p, 1.0, rng), p);
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(transmit(Pulse{0, Basis::Z, 0}, 0.3, rng).photons, 0U);
}

TEST(Channel, SinglePhotonSurvivalAtTwoDb) {
  Rng rng = derive_stream(3, "channel");
  const double t = transmittance_from_db(2.0);
  int survived = 0;
  for (int i = 0; i < 100000; ++i) survived += transmit(Pulse{1, Basis::X, 0}, t, rng).photons;
  EXPECT_NEAR(survived / 1e5, 0.631, 0.005);
}

TEST(Channel, LossComposes) {
  Rng a = derive_stream(4, "channel/a");
  Rng b = derive_stream(4, "channel/b");
  constexpr int kSamples = 100000;
  std::array<double, 8> two_step{}, one_step{};
  for (int i = 0; i < kSamples; ++i) {
    const Pulse p{6, Basis::X, 0};
    ++two_step[transmit(transmit(p, 0.7, a), 0.5, a).photons];
    ++one_step[transmit(p, 0.35, b).photons];
  }
  // Two-sample chi-square over occupied bins.
  double chi2 = 0;
  int bins = 0;
  for (std::size_t k = 0; k < 7; ++k) {
    const double s = two_step[k] + one_step[k];
    if (s == 0) continue;
    chi2 += (two_step[k] - one_step[k]) * (two_step[k] - one_step[k]) / s;
    ++bins;
  }
  // 99th percentile of chi-square with 6 degrees of freedom.
  ASSERT_EQ(bins, 7);
  EXPECT_LT(chi2, 16.81);
}

TEST(Detector, MatchedBasisNoNoiseIsExact) {
  Rng rng = derive_stream(5, "det");
  for (int i = 0; i < 1000; ++i) {
    const std::uint8_t bit = random_bit(rng);
    const auto o = measure(Pulse{1, Basis::Z, bit}, Basis::Z, 0.0, rng);
    ASSERT_EQ(o, DetectionOutcome::click(bit));
  }
  EXPECT_EQ(measure(Pulse{0, Basis::Z, 1}, Basis::Z, 0.0, rng), DetectionOutcome::no_click());
}

TEST(Detector, ErrorMarginals) {
  Rng rng = derive_stream(6, "det");
  int matched_errors = 0;
  int crossed_errors = 0;
  for (int i = 0; i < 100000; ++i) {
    matched_errors += measure(Pulse{1, Basis::X, 0}, Basis::X, 0.1, rng).bit;
    crossed_errors += measure(Pulse{1, Basis::X, 0}, Basis::Z, 0.0, rng).bit;
  }
  EXPECT_NEAR(matched_errors / 1e5, 0.10, 0.01);
  EXPECT_NEAR(crossed_errors / 1e5, 0.50, 0.01);
}

TEST(Splitter, ConservesPhotons) {
  const auto [k1, f1] = photon_number_split(Pulse{2, Basis::X, 1}, 1);
  EXPECT_EQ(k1.photons, 1U);
  EXPECT_EQ(f1.photons, 1U);
  const auto [k2, f2] = photon_number_split(Pulse{3, Basis::Z, 0}, 2);
  EXPECT_EQ(k2.photons, 2U);
  EXPECT_EQ(f2.photons, 1U);
  EXPECT_EQ(k2.basis, Basis::Z);
  const Pulse p{5, Basis::X, 1};
  EXPECT_EQ(photon_number_split(p, 0).second, p);
  for (unsigned n = 0; n < 8; ++n) {
    for (unsigned keep = 0; keep <= n; ++keep) {
      const auto [k, f] = photon_number_split(Pulse{n, Basis::X, 0}, keep);
      EXPECT_EQ(k.photons + f.photons, n);
    }
  }
  try {
    photon_number_split(Pulse{1, Basis::X, 0}, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InsufficientPhotons);
  }
}

TEST(ChannelConfig, Validation) {
  ChannelConfig c;
  EXPECT_NO_THROW(c.validate());
  c.qber = 0.7;
  EXPECT_THROW(c.validate(), Error);
  c = {};
  c.mean_photon_number = -1;
  EXPECT_THROW(c.validate(), Error);
}
