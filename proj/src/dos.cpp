#include <algorithm>
#include <cmath>
#include <string>

#include "bb84aes/adversary.hpp"
#include "bb84aes/error.hpp"

namespace bb84aes {
namespace {

bool is_budget_error(const Error& e) noexcept {
  return e.code() == ErrorCode::BudgetExhausted || e.code() == ErrorCode::CounterExhausted;
}

Tag blind_tag(TagWidth width, Rng& rng) {
  Tag t;
  t.width = width;
  t.bits = ((uint128{rng()} << 64) | rng()) & width_mask(width);
  return t;
}

struct ProbeOutcome {
  bool detected = false;
  bool exhausted = false;
  std::size_t groups = 0;
  std::uint64_t ticks = 0;
  std::uint64_t tags = 0;
};

// One fake-user connection against BB84-AES Alice. Alice keeps one group in
// flight: the tag for group g+1 is out before the response to group g is
// checked, so a probe detected at group g costs her g + 1 tags.
ProbeOutcome probe_bb84_aes(AliceSession& alice, const DoSConfig& config, Rng& rng) {
  ProbeOutcome out;
  const std::uint64_t group_ticks =
      static_cast<std::uint64_t>(alice.worst_case_ticks()) + alice.variant().group_size() + 1;
  try {
    alice.announce(rng, config.channel.mean_photon_number);
    ++out.tags;
    for (std::size_t g = 1; g <= config.max_groups; ++g) {
      // Whatever arrives over the lossy link, the fake Bob owes a response
      // and has no key to build one.
      alice.announce(rng, config.channel.mean_photon_number);
      ++out.tags;
      out.groups = g;
      out.ticks = g * group_ticks;
      if (!alice.check_response(blind_tag(alice.inbound().width(), rng))) {
        out.detected = true;
        return out;
      }
    }
  } catch (const Error& e) {
    if (!is_budget_error(e)) throw;
    out.exhausted = true;
  }
  return out;
}

// Canonical BB84 with one Wegman-Carter tag over the whole transcript: the
// fake user is only caught when that final tag fails to verify.
ProbeOutcome probe_baseline(Authenticator& mac, const EveStrategy& eve, const DoSConfig& config,
                            std::uint64_t seed) {
  ProbeOutcome out;
  RoundConfig rc;
  rc.pulses = config.baseline_pulses;
  rc.channel = config.channel;
  rc.channel.attenuation_db += eve.attenuation_db;
  RoundStreams streams = RoundStreams::from_seed(seed);
  EveState unused;
  const RoundResult round = plain_bb84_round(rc, EveStrategy::passive(), unused, streams);
  try {
    std::vector<std::uint8_t> transcript;
    transcript.reserve(round.public_view.announced_bases.size());
    for (const auto& [index, basis] : round.public_view.announced_bases) {
      transcript.push_back(static_cast<std::uint8_t>(basis));
    }
    const IssuedTag genuine = mac.issue(transcript);
    ++out.tags;
    const Tag forged = random_forgery(genuine.tag, streams.adversary);
    out.detected = !tags_equal(forged.bits, genuine.tag.bits);
  } catch (const Error& e) {
    if (!is_budget_error(e)) throw;
    out.exhausted = true;
    return out;
  }
  out.groups = round.pulses.size();
  out.ticks = round.ticks + config.post_processing_ticks;
  return out;
}

}  // namespace

DoSReport dos_scenario(const EveStrategy& strategy, const ProtocolVariant& defender,
                       const DoSConfig& config) {
  if (strategy.kind != EveKind::DoSProbe && strategy.kind != EveKind::KeyExhaustion) {
    throw Error(ErrorCode::InvalidArgument, "dos_scenario takes DoSProbe or KeyExhaustion");
  }
  strategy.validate();
  defender.validate();
  if (defender.scheme == Scheme::BiasedBb84) {
    throw Error(ErrorCode::InvalidArgument, "fake-user scenarios compare BB84-AES with plain BB84");
  }

  DoSReport report;
  report.defender = defender.name();
  report.strategy = strategy.name();
  Rng keys = derive_stream(config.seed, "dos/keys");
  Rng traffic = derive_stream(config.seed, "dos/traffic");

  const bool exhaustion = strategy.kind == EveKind::KeyExhaustion;
  const std::uint64_t probes = exhaustion ? strategy.repeat_count : config.trials;
  std::size_t latency_sum = 0;

  auto account = [&](const ProbeOutcome& o) {
    if (o.exhausted) {
      report.exhausted = true;
      report.tags_consumed += o.tags;
      return false;
    }
    ++report.probes_run;
    report.tags_consumed += o.tags;
    if (o.detected) {
      ++report.detected;
      report.max_latency_groups = std::max(report.max_latency_groups, o.groups);
      report.max_latency_ticks = std::max(report.max_latency_ticks, o.ticks);
      latency_sum += o.groups;
    }
    return true;
  };

  if (defender.is_aes()) {
    std::optional<SessionPair> shared;
    if (exhaustion) shared.emplace(make_sessions(defender, keys, config.crypto));
    for (std::uint64_t p = 0; p < probes; ++p) {
      std::optional<SessionPair> fresh;
      if (!exhaustion) fresh.emplace(make_sessions(defender, keys, config.crypto));
      AliceSession& alice = exhaustion ? shared->alice : fresh->alice;
      if (!account(probe_bb84_aes(alice, config, traffic))) break;
      if (!exhaustion && p + 1 == probes) report.secret_remaining = to_decimal(alice.outbound().budget().remaining());
    }
    if (exhaustion) report.secret_remaining = to_decimal(shared->alice.outbound().budget().remaining());
    if (report.probes_run > 0) {
      report.tags_per_probe =
          static_cast<double>(report.tags_consumed) / static_cast<double>(report.probes_run);
    }
  } else {
    auto fresh_mac = [&](std::uint64_t index) {
      Rng key_rng = derive_stream(config.seed, "dos/baseline_mac/" + std::to_string(index));
      std::vector<std::uint8_t> raw(InitialSecret::bit_length_for(defender.tag_width));
      for (;;) {
        for (auto& b : raw) b = random_bit(key_rng);
        try {
          return make_direction(split_secret(raw, defender.tag_width), 0, config.crypto).first;
        } catch (const Error& e) {
          if (e.code() != ErrorCode::ZeroHashKey) throw;
        }
      }
    };
    std::optional<Authenticator> mac;
    for (std::uint64_t p = 0; p < probes; ++p) {
      if (!mac || !exhaustion) mac.emplace(fresh_mac(p));
      if (!account(probe_baseline(*mac, strategy, config, config.seed + p))) break;
      report.secret_remaining = to_decimal(mac->budget().remaining());
    }
    report.tags_per_probe = 1.0;
  }

  report.trials = report.probes_run;
  report.mean_latency_groups =
      report.detected == 0 ? 0.0 : static_cast<double>(latency_sum) / static_cast<double>(report.detected);
  if (report.tags_per_probe > 0.0) {
    const CryptoParams& c = config.crypto;
    const uint128 limit = c.budget_limit.value_or(TagBudget::default_limit(defender.tag_width));
    report.probes_to_exhaustion = static_cast<double>(limit) / report.tags_per_probe;
  }
  return report;
}

GuessTrialReport dense_guess_trials(const ProtocolVariant& dense_variant, std::size_t trials,
                                    std::uint64_t seed, const CryptoParams& params) {
  if (!dense_variant.is_dense()) throw Error(ErrorCode::InvalidArgument, "dense variant required");
  Rng keys = derive_stream(seed, "guess/keys");
  Rng source = derive_stream(seed, "guess/source");
  Rng adversary = derive_stream(seed, "guess/adversary");
  SessionPair sessions = make_sessions(dense_variant, keys, params);

  GuessTrialReport report;
  report.trials = trials;
  for (std::size_t t = 0; t < trials; ++t) {
    const Announcement ann = sessions.alice.announce(source, 0.5);
    const Tag forged = random_forgery(ann.issued.tag, adversary);
    report.accepted += sessions.bob.resolve_bases(forged).recognized() ? 1 : 0;
  }
  report.rate = trials == 0 ? 0.0 : static_cast<double>(report.accepted) / static_cast<double>(trials);
  const double table = std::ldexp(1.0, dense_variant.bases_per_tag);
  report.expected_rate = (table - 1.0) / (std::ldexp(1.0, bit_count(dense_variant.tag_width)) - 1.0);
  return report;
}

}  // namespace bb84aes
