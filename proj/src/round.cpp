#include <algorithm>
#include <cstdio>
#include <sstream>

#include "bb84aes/adversary.hpp"
#include "bb84aes/error.hpp"
#include "bb84aes/protocol.hpp"

namespace bb84aes {
namespace {

std::uint64_t digest_bytes(std::span<const std::uint8_t> bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const std::uint8_t b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t digest_tag(const Tag& tag) noexcept {
  const Block b = store_be128(tag.bits);
  return digest_bytes(b);
}

std::uint64_t digest_pulse(const Pulse& p) noexcept {
  const std::uint8_t bytes[] = {static_cast<std::uint8_t>(p.basis), p.bit,
                                static_cast<std::uint8_t>(p.photons & 0xff),
                                static_cast<std::uint8_t>((p.photons >> 8) & 0xff)};
  return digest_bytes(bytes);
}

bool is_budget_error(const Error& e) noexcept {
  return e.code() == ErrorCode::BudgetExhausted || e.code() == ErrorCode::CounterExhausted;
}

void finish(RoundResult& r) {
  r.efficiency = r.clicks == 0 ? 0.0 : static_cast<double>(r.matched_clicks) / static_cast<double>(r.clicks);
  std::size_t errors = 0;
  for (std::size_t i = 0; i < r.alice_raw_key.size(); ++i) errors += r.alice_raw_key[i] != r.bob_raw_key[i];
  r.qber = r.alice_raw_key.empty() ? 0.0
                                   : static_cast<double>(errors) / static_cast<double>(r.alice_raw_key.size());
  r.public_view.complete = r.status == RoundStatus::Completed;
}

void add_key_bit(RoundResult& r, std::size_t index) {
  const PulseRecord& rec = r.pulses[index];
  r.key_indices.push_back(index);
  r.alice_raw_key.push_back(rec.alice_bit);
  r.bob_raw_key.push_back(rec.outcome.bit);
}

}  // namespace

const char* to_string(RoundStatus s) noexcept {
  switch (s) {
    case RoundStatus::Completed: return "completed";
    case RoundStatus::Aborted: return "aborted";
    case RoundStatus::MustRekey: return "must_rekey";
  }
  return "unknown";
}

const char* to_string(DetectionKind k) noexcept {
  return k == DetectionKind::UnrecognizedTag ? "unrecognized_tag" : "unrecognized_response";
}

const char* to_string(Actor a) noexcept {
  switch (a) {
    case Actor::Alice: return "alice";
    case Actor::Bob: return "bob";
    case Actor::Eve: return "eve";
  }
  return "unknown";
}

std::string format_transcript(std::span<const TranscriptEvent> events) {
  std::ostringstream out;
  for (const auto& e : events) {
    char payload[17];
    std::snprintf(payload, sizeof payload, "%016llx", static_cast<unsigned long long>(e.payload_digest));
    out << "tick=" << e.tick << " actor=" << to_string(e.actor) << " event=" << e.kind
        << " payload=" << payload << '\n';
  }
  return out.str();
}

RoundStreams RoundStreams::from_seed(std::uint64_t seed) {
  return RoundStreams{derive_stream(seed, "keys"), derive_stream(seed, "source"),
                      derive_stream(seed, "channel"), derive_stream(seed, "bob"),
                      derive_stream(seed, "adversary")};
}

RoundResult run_round(const RoundConfig& config, const ProtocolVariant& variant,
                      const EveStrategy& eve, EveState& eve_state, RoundStreams& streams,
                      const CryptoParams& params) {
  variant.validate();
  switch (variant.scheme) {
    case Scheme::PlainBb84: return plain_bb84_round(config, eve, eve_state, streams);
    case Scheme::BiasedBb84: return biased_bb84_round(config, variant, eve, eve_state, streams);
    case Scheme::Bb84Aes: break;
  }
  SessionPair sessions = make_sessions(variant, streams.keys, params);
  return run_round(config, sessions, eve, eve_state, streams);
}

RoundResult run_round(const RoundConfig& config, SessionPair& sessions, const EveStrategy& eve,
                      EveState& eve_state, RoundStreams& streams) {
  if (config.pulses < 1) throw Error(ErrorCode::InvalidArgument, "a round needs at least one pulse");
  config.channel.validate();
  eve.validate();

  AliceSession& alice = sessions.alice;
  BobSession& bob = sessions.bob;
  const ProtocolVariant& variant = alice.variant();
  const std::size_t n = static_cast<std::size_t>(variant.group_size());
  const std::size_t groups = (config.pulses + n - 1) / n;
  const double transmittance = config.channel.transmittance();
  const double q = config.channel.qber;
  const int pct = config.per_comparison_tick;

  RoundResult r;
  r.variant = variant;
  r.pulses.reserve(groups * n);
  std::uint64_t tick = 0;

  auto log = [&](std::uint64_t t, Actor actor, const char* kind, std::uint64_t payload) {
    if (config.record_transcript) r.transcript.push_back({t, actor, kind, payload});
  };

  for (std::size_t g = 1; g <= groups; ++g) {
    const std::size_t first = r.pulses.size();
    Announcement ann;
    try {
      ann = alice.announce(streams.source, config.channel.mean_photon_number, config.fixed_alice_basis);
    } catch (const Error& e) {
      if (!is_budget_error(e)) throw;
      r.status = RoundStatus::MustRekey;
      break;
    }
    ++r.tags_alice;
    const std::uint64_t tag_tick = tick;
    log(tag_tick, Actor::Alice, "tag", digest_tag(ann.issued.tag));
    if (config.record_transcript) r.nonce_log.push_back({Direction::AliceToBob, ann.issued.nonce});

    const Interception seen =
        intercept(eve, eve_state, ann.issued.tag, ann.pulses, first, streams.adversary);
    if (seen.tag && !(*seen.tag == ann.issued.tag)) log(tag_tick, Actor::Eve, "tag_replaced", digest_tag(*seen.tag));

    Resolution res;
    try {
      res = bob.resolve_bases(*seen.tag);
    } catch (const Error& e) {
      if (!is_budget_error(e)) throw;
      r.status = RoundStatus::MustRekey;
      break;
    }
    r.max_comparisons = std::max(r.max_comparisons, res.comparisons);
    const std::uint64_t release = constant_time_gate(alice, tag_tick, res, pct);
    const bool recognized = res.recognized();
    if (!recognized) {
      const std::uint64_t when = tag_tick + static_cast<std::uint64_t>(res.comparisons * pct);
      r.detections.push_back({DetectionKind::UnrecognizedTag, first, g, when});
      log(when, Actor::Bob, "unrecognized_tag", digest_tag(*seen.tag));
    }

    std::vector<bool> arrivals(n, false);
    for (std::size_t k = 0; k < n; ++k) {
      PulseRecord rec;
      rec.alice_basis = ann.bases[k];
      rec.alice_bit = ann.bits[k];
      rec.photons_sent = ann.pulses[k].photons;
      rec.group = g;
      rec.verdict = recognized ? TagVerdict::Recognized : TagVerdict::Unrecognized;
      rec.discarded = !recognized;
      rec.bob_basis = recognized ? (*res.bases)[k] : Basis::X;

      Pulse arriving{0, ann.pulses[k].basis, ann.pulses[k].bit};
      if (seen.pulses[k]) arriving = transmit(*seen.pulses[k], transmittance, streams.channel);
      rec.photons_arrived = arriving.photons;
      rec.outcome = measure(arriving, rec.bob_basis, q, streams.channel);
      arrivals[k] = rec.outcome.clicked;
      log(release + 1 + k, Actor::Alice, "pulse", digest_pulse(ann.pulses[k]));

      r.pulses.push_back(rec);
      if (rec.outcome.clicked && !rec.discarded) {
        ++r.clicks;
        if (rec.bob_basis == rec.alice_basis) ++r.matched_clicks;
        add_key_bit(r, r.pulses.size() - 1);
      }
    }
    tick = release + n + 1;

    IssuedTag response;
    try {
      response = bob.respond(arrivals);
    } catch (const Error& e) {
      if (!is_budget_error(e)) throw;
      r.status = RoundStatus::MustRekey;
      break;
    }
    ++r.tags_bob;
    log(tick, Actor::Bob, "response", digest_tag(response.tag));
    if (config.record_transcript) r.nonce_log.push_back({Direction::BobToAlice, response.nonce});

    std::optional<std::vector<bool>> confirmed;
    try {
      confirmed = alice.check_response(response.tag);
    } catch (const Error& e) {
      if (!is_budget_error(e)) throw;
      r.status = RoundStatus::MustRekey;
      break;
    }
    if (!confirmed) {
      r.detections.push_back({DetectionKind::UnrecognizedResponse, first, g, tick});
      log(tick, Actor::Alice, "unrecognized_response", digest_tag(response.tag));
    }
    ++tick;
    r.groups = g;
    if (config.abort_on_detect && !r.detections.empty()) {
      r.status = RoundStatus::Aborted;
      break;
    }
  }
  r.ticks = tick;
  finish(r);
  return r;
}

namespace {

// Shared driver for the two baselines; `choose` draws a basis for Alice or Bob.
template <typename ChooseBasis>
RoundResult baseline_round(const RoundConfig& config, const ProtocolVariant& variant,
                           const EveStrategy& eve, EveState& eve_state, RoundStreams& streams,
                           ChooseBasis choose) {
  if (config.pulses < 1) throw Error(ErrorCode::InvalidArgument, "a round needs at least one pulse");
  config.channel.validate();
  eve.validate();
  const double transmittance = config.channel.transmittance();
  const double q = config.channel.qber;

  RoundResult r;
  r.variant = variant;
  r.pulses.reserve(config.pulses);
  auto log = [&](std::uint64_t t, Actor actor, const char* kind, std::uint64_t payload) {
    if (config.record_transcript) r.transcript.push_back({t, actor, kind, payload});
  };

  for (std::size_t i = 0; i < config.pulses; ++i) {
    PulseRecord rec;
    const Basis drawn = choose(streams.source);
    rec.alice_basis = config.fixed_alice_basis.value_or(drawn);
    rec.alice_bit = random_bit(streams.source);
    const Pulse sent = emit_pulse(config.channel.mean_photon_number, rec.alice_basis, rec.alice_bit,
                                  streams.source);
    rec.photons_sent = sent.photons;
    rec.group = i + 1;
    log(i, Actor::Alice, "pulse", digest_pulse(sent));

    const Interception seen = intercept(eve, eve_state, std::nullopt, std::span(&sent, 1), i,
                                        streams.adversary);
    Pulse arriving{0, sent.basis, sent.bit};
    if (seen.pulses[0]) arriving = transmit(*seen.pulses[0], transmittance, streams.channel);
    rec.photons_arrived = arriving.photons;
    rec.bob_basis = choose(streams.bob);
    rec.outcome = measure(arriving, rec.bob_basis, q, streams.channel);
    r.pulses.push_back(rec);
  }
  r.groups = config.pulses;

  // Public sifting: bases of every detected pulse are announced in the clear.
  std::uint64_t tick = config.pulses;
  r.public_view.bases_public = true;
  for (std::size_t i = 0; i < r.pulses.size(); ++i) {
    const PulseRecord& rec = r.pulses[i];
    if (!rec.outcome.clicked) continue;
    ++r.clicks;
    r.public_view.announced_bases.emplace_back(i, rec.alice_basis);
    if (rec.bob_basis != rec.alice_basis) continue;
    ++r.matched_clicks;
    const bool key_position = variant.scheme != Scheme::BiasedBb84 || rec.alice_basis == variant.key_basis;
    if (key_position) {
      r.public_view.sifted_indices.push_back(i);
      add_key_bit(r, i);
    } else {
      r.public_view.check_indices.push_back(i);
      ++r.check_bits;
      r.check_errors += rec.alice_bit != rec.outcome.bit;
    }
  }
  log(tick++, Actor::Alice, "basis_announcement", r.public_view.announced_bases.size());
  log(tick++, Actor::Bob, "sift_announcement", r.public_view.sifted_indices.size());
  r.ticks = tick;
  finish(r);
  return r;
}

}  // namespace

RoundResult plain_bb84_round(const RoundConfig& config, const EveStrategy& eve, EveState& eve_state,
                             RoundStreams& streams) {
  return baseline_round(config, ProtocolVariant::plain(), eve, eve_state, streams,
                        [](Rng& rng) { return random_basis(rng); });
}

RoundResult biased_bb84_round(const RoundConfig& config, const ProtocolVariant& variant,
                              const EveStrategy& eve, EveState& eve_state, RoundStreams& streams) {
  variant.validate();
  if (variant.scheme != Scheme::BiasedBb84) {
    throw Error(ErrorCode::InvalidArgument, "biased round needs a biased variant");
  }
  const Basis key = variant.key_basis;
  const double bias = variant.bias;
  return baseline_round(config, variant, eve, eve_state, streams,
                        [key, bias](Rng& rng) { return bernoulli(rng, bias) ? key : other(key); });
}

}  // namespace bb84aes
