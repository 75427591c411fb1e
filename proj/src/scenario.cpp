#include <algorithm>

#include "bb84aes/error.hpp"
#include "bb84aes/harness.hpp"
#include "bb84aes/post_processing.hpp"

namespace bb84aes {
namespace {

std::int64_t count(std::uint64_t v) { return static_cast<std::int64_t>(v); }

bool is_fake_user(EveKind k) { return k == EveKind::DoSProbe || k == EveKind::KeyExhaustion; }

void add_resources(MetricsReport& r, const ProtocolVariant& v, const ScenarioConfig& config) {
  r.add("classical_bits_per_qubit", v.classical_bits_per_qubit(), "bit/qubit");
  r.add("classical_rate", v.classical_bits_per_qubit() * config.channel.clock_hz, "bit/s");
}

MetricsReport run_fake_user(const ScenarioConfig& config, const ProtocolVariant& v) {
  DoSConfig dc;
  dc.trials = 1;
  dc.baseline_pulses = config.pulses;
  dc.channel = config.channel;
  dc.crypto = config.crypto;
  dc.seed = config.seed;
  const DoSReport d = dos_scenario(config.eve, v, dc);

  MetricsReport r;
  r.add("variant", v.name(), "");
  r.add("eve_strategy", config.eve.name(), "");
  r.add("seed", count(config.seed), "");
  r.add("status", d.exhausted ? std::string("must_rekey") : std::string("completed"), "");
  r.add("probes_run", count(d.probes_run), "probes");
  r.add("probes_detected", count(d.detected), "probes");
  r.add("detection_latency_groups", count(d.max_latency_groups), "groups");
  r.add("detection_latency_ticks", count(d.max_latency_ticks), "ticks");
  r.add("detection_latency_time", static_cast<double>(d.max_latency_ticks) / config.channel.clock_hz, "s");
  r.add("tags_consumed", count(d.tags_consumed), "tags");
  r.add("tags_per_probe", d.tags_per_probe, "tags/probe");
  if (d.probes_to_exhaustion) r.add("probes_to_exhaustion", two_sig_figs(*d.probes_to_exhaustion), "probes");
  r.add("secret_remaining_alice", d.secret_remaining, "tags");
  add_resources(r, v, config);
  return r;
}

}  // namespace

MetricsReport run_scenario(const ScenarioConfig& config) {
  config.validate();
  const ProtocolVariant v = config.protocol();
  if (is_fake_user(config.eve.kind)) return run_fake_user(config, v);

  RoundStreams streams = RoundStreams::from_seed(config.seed);
  RoundConfig rc;
  rc.pulses = config.pulses;
  rc.channel = config.channel;
  rc.abort_on_detect = config.abort_on_detect;

  EveState eve_state;
  std::optional<SessionPair> sessions;
  RoundResult round;
  if (v.is_aes()) {
    sessions.emplace(make_sessions(v, streams.keys, config.crypto));
    round = run_round(rc, *sessions, config.eve, eve_state, streams);
  } else {
    round = run_round(rc, v, config.eve, eve_state, streams, config.crypto);
  }

  std::optional<EveReport> eve;
  if (config.eve.kind != EveKind::Passive && round.public_view.complete) {
    Rng er = derive_stream(config.seed, "adversary/finalize");
    eve = finalize(config.eve, eve_state, round.public_view, er);
    score_against(*eve, round);
  }

  std::string key_status = "none";
  std::size_t disclosed = 0;
  std::size_t leakage = 0;
  std::size_t margin = 0;
  std::size_t final_bits = 0;
  std::size_t consumer_bits = 0;
  double q_hat = 0.0;
  bool balanced = true;
  const std::size_t raw = round.alice_raw_key.size();
  if (round.status == RoundStatus::Completed && raw > 0) {
    try {
      Rng sampling = derive_stream(config.seed, "sampling");
      const Estimate est = estimate_qber(round.alice_raw_key, round.bob_raw_key, config.sample_fraction, sampling);
      q_hat = est.qber;
      disclosed = est.disclosed.size();
      Authenticator* auth = sessions ? &sessions->alice.outbound() : nullptr;
      const Reconciliation rec = reconcile(est.alice_remaining, est.bob_remaining, q_hat, config.ec_inefficiency, auth);
      const std::size_t n = rec.alice.size();
      leakage = std::min(rec.leakage, n);
      const AmplifiedKey amp =
          privacy_amplify(rec.alice, rec.leakage, config.epsilon_exponent, derive_stream(config.seed, "amplification")());
      final_bits = amp.bits;
      margin = n - leakage - final_bits;
      balanced = raw == final_bits + disclosed + leakage + margin;
      key_status = "final_key_only";
      if (sessions) {
        KeyLedger ledger{sessions->alice.outbound(), sessions->alice.inbound(),
                         sessions->alice.outbound().generator().iv(), 0, {}};
        const int iv_bits = config.crypto.iv_bits;
        const std::uint64_t iv_mask = iv_bits >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << iv_bits) - 1;
        try {
          rekey(ledger, amp.unpack(), (ledger.iv + 1) & iv_mask, config.crypto);
          key_status = "rekeyed";
          consumer_bits = ledger.consumer_key.size();
        } catch (const Error& e) {
          if (e.code() != ErrorCode::InsufficientKey && e.code() != ErrorCode::InvalidArgument) throw;
          key_status = e.code() == ErrorCode::InsufficientKey ? "insufficient_key" : "no_fresh_iv";
        }
      } else {
        consumer_bits = final_bits;
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::BudgetExhausted && e.code() != ErrorCode::CounterExhausted) throw;
      key_status = "must_rekey";
    }
  }

  MetricsReport r;
  r.add("variant", v.name(), "");
  r.add("eve_strategy", config.eve.name(), "");
  r.add("seed", count(config.seed), "");
  r.add("status", std::string(to_string(round.status)), "");
  r.add("key_status", key_status, "");
  r.add("compliance", std::string(config.pulses >= config.raw_bit_threshold ? "compliant" : "non_compliant"), "");
  r.add("pulses", count(round.pulses.size()), "pulses");
  r.add("groups", count(round.groups), "groups");
  r.add("clicks", count(round.clicks), "clicks");
  r.add("raw_key_bits", count(raw), "bits");
  r.add("efficiency", round.efficiency, "ratio");
  r.add("qber", round.qber, "ratio");
  r.add("qber_estimate", q_hat, "ratio");
  r.add("disclosed_bits", count(disclosed), "bits");
  r.add("leakage_bits", count(leakage), "bits");
  r.add("security_margin_bits", count(margin), "bits");
  r.add("final_key_bits", count(final_bits), "bits");
  r.add("consumer_key_bits", count(consumer_bits), "bits");
  r.add("ledger_balanced", std::string(balanced ? "yes" : "no"), "");
  if (v.scheme == Scheme::BiasedBb84) {
    r.add("check_bits", count(round.check_bits), "bits");
    r.add("check_errors", count(round.check_errors), "bits");
  }

  r.add("detections", count(round.detections.size()), "events");
  if (!round.detections.empty()) {
    const DetectionEvent& first = round.detections.front();
    r.add("first_detection_group", count(first.group), "groups");
    r.add("first_detection_tick", count(first.tick), "ticks");
    r.add("first_detection_time", static_cast<double>(first.tick) / config.channel.clock_hz, "s");
  }

  if (eve) {
    r.add("eve_guesses_in_key", count(eve->guesses_in_key), "bits");
    r.add("eve_agreement", eve->agreement, "ratio");
    r.add("eve_key_coverage", eve->key_coverage, "ratio");
    r.add("eve_stored_photons", count(eve->stored_photons), "photons");
    r.add("eve_stored_in_key", count(eve->stored_in_key), "photons");
    r.add("eve_pulses_blocked", count(eve->pulses_blocked), "pulses");
    r.add("eve_tags_replaced", count(eve->tags_replaced), "tags");
  }

  r.add("tags_alice", count(round.tags_alice), "tags");
  r.add("tags_bob", count(round.tags_bob), "tags");
  if (sessions && round.tags_alice > 0) {
    const uint128 limit = sessions->alice.outbound().budget().limit();
    r.add("rounds_per_secret", two_sig_figs(rounds_per_secret(limit, round.tags_alice)), "rounds");
    r.add("secret_remaining_alice", to_decimal(sessions->alice.outbound().budget().remaining()), "tags");
  }
  add_resources(r, v, config);
  const LookupTable* table = sessions ? sessions->bob.lookup_table() : nullptr;
  r.add("lookup_table_bytes", count(table ? table->footprint_bytes() : 0), "bytes");
  r.add("max_comparisons", count(static_cast<std::uint64_t>(round.max_comparisons)), "comparisons");
  r.add("ticks", count(round.ticks), "ticks");
  r.add("duration", static_cast<double>(round.ticks) / config.channel.clock_hz, "s");

  for (const DetectionEvent& d : round.detections) {
    r.events.push_back({d.tick, to_string(d.kind), d.group, d.pulse_index});
  }
  return r;
}

}  // namespace bb84aes
