#pragma once

// Eavesdropper strategies as interception policies over (tag, pulses)
// traffic, plus the fake-user denial-of-service scenarios.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bb84aes/channel.hpp"
#include "bb84aes/crypto.hpp"
#include "bb84aes/protocol.hpp"
#include "bb84aes/rng.hpp"

namespace bb84aes {

enum class EveKind : std::uint8_t {
  Passive,
  DoSProbe,         // fake user over a high-loss link
  KeyExhaustion,    // repeated fake-user sessions
  PnsWithMemory,    // block n=1, store one photon of n>=2, measure later
  InterceptResend,  // random-basis measure and resend
  PnsThreePlus,     // block n<=2, store two photons of n>=3, USD
  PnsNoMemory,      // block n=1, measure a split photon at once in key_basis
  BlindTagFlip,     // measure in a fixed basis, optionally replace the tag
  DenseTagGuess,    // forward a uniformly random tag
};

const char* to_string(EveKind k) noexcept;
EveKind eve_kind_from_string(const std::string& name);

struct EveStrategy {
  EveKind kind = EveKind::Passive;
  double attenuation_db = 0.0;
  std::uint64_t repeat_count = 1;
  /// USD success probability per stored copy count; `p_usd` applies to any
  /// count not listed. A modelling knob, not a derived value.
  double p_usd = 0.25;
  std::map<unsigned, double> p_usd_by_copies;
  Basis key_basis = Basis::Z;
  Basis measure_basis = Basis::X;
  bool flip = false;

  static EveStrategy passive() { return {}; }
  static EveStrategy dos_probe(double attenuation_db);
  static EveStrategy key_exhaustion(std::uint64_t repeat_count);
  static EveStrategy pns_with_memory();
  static EveStrategy intercept_resend();
  static EveStrategy pns_three_plus(double p_usd = 0.25);
  static EveStrategy pns_no_memory(Basis key_basis = Basis::Z);
  static EveStrategy blind_tag_flip(Basis measure_basis, bool flip);
  static EveStrategy dense_tag_guess();

  [[nodiscard]] double usd_probability(unsigned copies) const;
  [[nodiscard]] std::string name() const;
  void validate() const;
};

struct StoredPhotons {
  std::size_t pulse_index;
  Pulse kept;
};

struct EveGuess {
  std::size_t pulse_index;
  std::uint8_t bit;
};

struct EveState {
  std::vector<StoredPhotons> stored;
  std::vector<EveGuess> immediate;  // measured on the fly
  std::size_t tags_seen = 0;
  std::size_t tags_replaced = 0;
  std::size_t pulses_blocked = 0;
  std::size_t pulses_split = 0;
  bool finalized = false;
};

struct Interception {
  std::optional<Tag> tag;
  std::vector<std::optional<Pulse>> pulses;  // nullopt: blocked
};

/// Apply the strategy to one announcement group. `tag` is absent for the
/// baselines. `first_index` is the round-wide index of pulses[0].
Interception intercept(const EveStrategy& strategy, EveState& state, const std::optional<Tag>& tag,
                       std::span<const Pulse> pulses, std::size_t first_index, Rng& rng);

/// Uniform tag of the same width, never equal to `genuine`.
Tag random_forgery(const Tag& genuine, Rng& rng);

struct EveReport {
  std::vector<EveGuess> key_guess;  // sorted by pulse index
  std::vector<std::size_t> stored_indices;  // ascending
  std::size_t stored_photons = 0;
  std::size_t stored_in_key = 0;
  std::size_t guesses_in_key = 0;
  std::size_t agreements = 0;
  double agreement = 0.0;  // agreements / guesses_in_key
  double key_coverage = 0.0;  // guesses_in_key / raw key length
  std::size_t pulses_blocked = 0;
  std::size_t pulses_split = 0;
  std::size_t tags_replaced = 0;
};

/// Turn stored photons and immediate measurements into a key guess using only
/// what the public transcript reveals. Throws IncompleteRound if the round
/// did not finish.
EveReport finalize(const EveStrategy& strategy, EveState& state, const PublicTranscript& transcript,
                   Rng& rng);

/// Score a finalized report against the round's raw key (simulator view).
void score_against(EveReport& report, const RoundResult& round);

// ---------------------------------------------------------------------------
// Fake-user scenarios

struct DoSConfig {
  std::size_t trials = 1;
  std::size_t baseline_pulses = 100000;     // canonical round length
  std::uint64_t post_processing_ticks = 1000;
  std::size_t max_groups = 1000;            // BB84-AES probe cut-off
  ChannelConfig channel;
  CryptoParams crypto;
  std::uint64_t seed = 1;
};

struct DoSReport {
  std::string defender;
  std::string strategy;
  std::size_t trials = 0;
  std::size_t detected = 0;
  std::size_t max_latency_groups = 0;
  double mean_latency_groups = 0.0;
  std::uint64_t max_latency_ticks = 0;
  std::uint64_t tags_consumed = 0;      // Alice's outbound tags, all probes
  double tags_per_probe = 0.0;
  std::uint64_t probes_run = 0;
  std::optional<double> probes_to_exhaustion;
  std::string secret_remaining;         // Alice's outbound budget, decimal
  bool exhausted = false;
};

/// DoSProbe: fake Bob without key material. KeyExhaustion: repeat_count
/// probes (bounded by budget) against one secret.
DoSReport dos_scenario(const EveStrategy& strategy, const ProtocolVariant& defender,
                       const DoSConfig& config);

/// Acceptance rate of DenseTagGuess against a dense Bob over `trials` groups.
struct GuessTrialReport {
  std::size_t trials = 0;
  std::size_t accepted = 0;
  double rate = 0.0;
  double expected_rate = 0.0;  // (2^xi - 1) / (2^l - 1)
};

GuessTrialReport dense_guess_trials(const ProtocolVariant& dense_variant, std::size_t trials,
                                    std::uint64_t seed, const CryptoParams& params = {});

std::string to_decimal(uint128 value);

}  // namespace bb84aes
