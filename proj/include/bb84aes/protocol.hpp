#pragma once

// Alice/Bob state machines for BB84-AES (basic, reduced processing, reduced
// bandwidth, dense) and the plain / biased BB84 baselines.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bb84aes/channel.hpp"
#include "bb84aes/crypto.hpp"
#include "bb84aes/rng.hpp"

namespace bb84aes {

enum class Scheme : std::uint8_t { Bb84Aes, PlainBb84, BiasedBb84 };

struct ProtocolVariant {
  Scheme scheme = Scheme::Bb84Aes;
  TagWidth tag_width = TagWidth::Bits128;
  bool reduced_processing = false;
  int bases_per_tag = 1;  // xi; > 1 selects dense information transfer
  Basis key_basis = Basis::Z;
  double bias = 0.9;

  static ProtocolVariant basic();
  static ProtocolVariant reduced_processing_mode(TagWidth width = TagWidth::Bits128);
  static ProtocolVariant reduced_bandwidth(bool with_reduced_processing = false);
  static ProtocolVariant dense(int xi, TagWidth width = TagWidth::Bits64);
  static ProtocolVariant plain();
  static ProtocolVariant biased(Basis key_basis = Basis::Z, double bias = 0.9);

  [[nodiscard]] bool is_aes() const noexcept { return scheme == Scheme::Bb84Aes; }
  [[nodiscard]] bool is_dense() const noexcept { return is_aes() && bases_per_tag > 1; }
  [[nodiscard]] int group_size() const noexcept { return is_dense() ? bases_per_tag : 1; }
  /// l_tau / xi for BB84-AES; 0 for the baselines (their basis talk is not per qubit tags).
  [[nodiscard]] double classical_bits_per_qubit() const noexcept;
  [[nodiscard]] std::string name() const;
  void validate() const;
};

inline constexpr int kMinBasesPerTag = 2;
inline constexpr int kMaxBasesPerTag = 20;

// ---------------------------------------------------------------------------
// Symbol strings. Bases and Yes/No responses share one encoding:
// X / Yes -> 0x00, Z / No -> 0x01, one byte per symbol. A pattern packs a
// string with its first symbol in the most significant position.

std::vector<std::uint8_t> encode_bases(std::span<const Basis> bases);
std::uint32_t bases_to_pattern(std::span<const Basis> bases);
std::vector<Basis> pattern_to_bases(std::uint32_t pattern, int length);
std::vector<std::uint8_t> encode_pattern(std::uint32_t pattern, int length);

struct LookupEntry {
  uint128 digest = 0;
  std::uint32_t pattern = 0;
};

/// Digests of all 2^xi symbol strings, ascending. Built once per secret.
class LookupTable {
 public:
  LookupTable(std::vector<LookupEntry> sorted_entries, int symbols, TagWidth width);

  [[nodiscard]] std::span<const LookupEntry> entries() const noexcept { return entries_; }
  [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }
  [[nodiscard]] int symbols() const noexcept { return symbols_; }
  [[nodiscard]] TagWidth width() const noexcept { return width_; }
  /// Digest payload only: 2^xi * l_tau / 8 bytes.
  [[nodiscard]] std::size_t footprint_bytes() const noexcept;

 private:
  std::vector<LookupEntry> entries_;
  int symbols_;
  TagWidth width_;
};

/// Throws AmbiguousLookupTable if two strings share a digest (only plausible
/// at the 16-bit test width); callers resample the secret.
LookupTable build_lookup_table(const InitialSecret& secret, int symbols);

struct SearchResult {
  std::optional<std::size_t> index;
  int comparisons = 0;
};

/// Halving search with three-way comparisons; never more than
/// floor(log2 n) + 1 comparisons.
SearchResult binary_search(std::span<const LookupEntry> table, uint128 digest) noexcept;

inline int worst_case_comparisons(std::size_t table_size) noexcept {
  int bound = 0;
  while (table_size > 0) {
    ++bound;
    table_size >>= 1;
  }
  return bound;
}

// ---------------------------------------------------------------------------
// Sessions

struct CryptoParams {
  int iv_bits = 64;
  int counter_width = -1;  // -1: 128 - iv_bits
  std::optional<uint128> budget_limit;
};

struct Announcement {
  IssuedTag issued;
  std::vector<Basis> bases;
  std::vector<std::uint8_t> bits;
  std::vector<Pulse> pulses;
};

struct Resolution {
  std::optional<std::vector<Basis>> bases;  // nullopt: unrecognized tag
  int comparisons = 0;

  [[nodiscard]] bool recognized() const noexcept { return bases.has_value(); }
};

class AliceSession {
 public:
  AliceSession(ProtocolVariant variant, Authenticator outbound, Authenticator inbound);

  /// Draw bases/bits for one group, tag the basis string and prepare the pulses.
  /// Throws BudgetExhausted / CounterExhausted; must_rekey() is then true.
  Announcement announce(Rng& source, double mu, std::optional<Basis> forced_basis = {});

  /// Arrival flags carried by Bob's response tag, or nullopt if it matches no
  /// possible response.
  std::optional<std::vector<bool>> check_response(const Tag& response);

  [[nodiscard]] int worst_case_ticks(int per_comparison_tick = 1) const noexcept;
  [[nodiscard]] const ProtocolVariant& variant() const noexcept { return variant_; }
  [[nodiscard]] const Authenticator& outbound() const noexcept { return outbound_; }
  [[nodiscard]] const Authenticator& inbound() const noexcept { return inbound_; }
  /// For later classical messages (reconciliation) under the same nonce stream.
  Authenticator& outbound() noexcept { return outbound_; }
  [[nodiscard]] bool must_rekey() const noexcept { return must_rekey_; }

 private:
  ProtocolVariant variant_;
  Authenticator outbound_;
  Authenticator inbound_;
  std::vector<uint128> basis_digests_;  // indexed by pattern
  std::vector<uint128> response_digests_;
  std::optional<LookupTable> response_table_;
  bool must_rekey_ = false;
};

class BobSession {
 public:
  BobSession(ProtocolVariant variant, Authenticator inbound, Authenticator outbound);

  Resolution resolve_bases(const Tag& tag);
  IssuedTag respond(const std::vector<bool>& arrived);

  [[nodiscard]] const LookupTable* lookup_table() const noexcept {
    return table_ ? &*table_ : nullptr;
  }
  [[nodiscard]] const ProtocolVariant& variant() const noexcept { return variant_; }
  [[nodiscard]] const Authenticator& inbound() const noexcept { return inbound_; }
  [[nodiscard]] const Authenticator& outbound() const noexcept { return outbound_; }
  [[nodiscard]] bool must_rekey() const noexcept { return must_rekey_; }

 private:
  ProtocolVariant variant_;
  Authenticator inbound_;
  Authenticator outbound_;
  uint128 digest_x_ = 0;
  uint128 digest_z_ = 0;
  std::optional<LookupTable> table_;
  bool must_rekey_ = false;
};

struct SessionPair {
  AliceSession alice;
  BobSession bob;
};

/// Fresh independent secrets for both directions (drawn from `key_rng`) and
/// mirrored nonce generators on each side.
SessionPair make_sessions(const ProtocolVariant& variant, Rng& key_rng,
                          const CryptoParams& params = {});

/// Authenticator pair (sender, receiver mirror) sharing one secret.
std::pair<Authenticator, Authenticator> make_direction(const InitialSecret& secret,
                                                       std::uint64_t iv,
                                                       const CryptoParams& params);

/// Tick at which Alice may release the pulses covered by a tag sent at
/// `tag_tick`: always the worst case, wherever the digest sat in the table.
std::uint64_t constant_time_gate(const AliceSession& alice, std::uint64_t tag_tick,
                                 const Resolution& resolution, int per_comparison_tick = 1);

// ---------------------------------------------------------------------------
// Rounds

enum class RoundStatus : std::uint8_t { Completed, Aborted, MustRekey };
const char* to_string(RoundStatus s) noexcept;

enum class DetectionKind : std::uint8_t { UnrecognizedTag, UnrecognizedResponse };
const char* to_string(DetectionKind k) noexcept;

enum class TagVerdict : std::uint8_t { NotApplicable, Recognized, Unrecognized };

struct DetectionEvent {
  DetectionKind kind;
  std::size_t pulse_index;  // first pulse of the affected group
  std::size_t group;        // 1-based
  std::uint64_t tick;
};

struct PulseRecord {
  Basis alice_basis = Basis::X;
  std::uint8_t alice_bit = 0;
  unsigned photons_sent = 0;
  unsigned photons_arrived = 0;
  Basis bob_basis = Basis::X;
  DetectionOutcome outcome;
  TagVerdict verdict = TagVerdict::NotApplicable;
  bool discarded = false;
  std::size_t group = 0;
};

enum class Actor : std::uint8_t { Alice, Bob, Eve };
const char* to_string(Actor a) noexcept;

struct TranscriptEvent {
  std::uint64_t tick;
  Actor actor;
  std::string kind;
  std::uint64_t payload_digest;
};

/// One line per event: "tick=<n> actor=<a> event=<kind> payload=<16 hex>".
std::string format_transcript(std::span<const TranscriptEvent> events);

struct NonceUse {
  Direction direction;
  uint128 nonce;
};

/// What an eavesdropper can read off the public channel after the round.
struct PublicTranscript {
  bool complete = false;
  bool bases_public = false;
  std::vector<std::pair<std::size_t, Basis>> announced_bases;
  std::vector<std::size_t> sifted_indices;  // key positions
  std::vector<std::size_t> check_indices;   // biased baseline: minority-basis matches
};

struct RoundConfig {
  std::size_t pulses = 100000;
  ChannelConfig channel;
  bool abort_on_detect = false;
  int per_comparison_tick = 1;
  bool record_transcript = false;
  std::optional<Basis> fixed_alice_basis;  // experiment knob (blind tag-flip cells)
};

struct RoundStreams {
  Rng keys;
  Rng source;
  Rng channel;
  Rng bob;
  Rng adversary;

  static RoundStreams from_seed(std::uint64_t seed);
};

struct RoundResult {
  RoundStatus status = RoundStatus::Completed;
  ProtocolVariant variant;
  std::vector<PulseRecord> pulses;
  std::vector<std::size_t> key_indices;
  std::vector<std::uint8_t> alice_raw_key;
  std::vector<std::uint8_t> bob_raw_key;
  std::vector<DetectionEvent> detections;
  std::size_t clicks = 0;
  std::size_t matched_clicks = 0;
  double efficiency = 0.0;
  double qber = 0.0;  // over the raw key
  std::size_t check_bits = 0;
  std::size_t check_errors = 0;
  std::size_t groups = 0;
  std::uint64_t tags_alice = 0;
  std::uint64_t tags_bob = 0;
  int max_comparisons = 0;
  std::uint64_t ticks = 0;
  std::vector<TranscriptEvent> transcript;
  std::vector<NonceUse> nonce_log;
  PublicTranscript public_view;
};

struct EveStrategy;
struct EveState;

/// Full round: announcements, optional interception, transmission,
/// measurement, responses. Budget exhaustion ends the round with MustRekey.
RoundResult run_round(const RoundConfig& config, const ProtocolVariant& variant,
                      const EveStrategy& eve, EveState& eve_state, RoundStreams& streams,
                      const CryptoParams& params = {});

/// Same, continuing with caller-owned sessions (secrets persist across rounds).
RoundResult run_round(const RoundConfig& config, SessionPair& sessions, const EveStrategy& eve,
                      EveState& eve_state, RoundStreams& streams);

/// Canonical BB84: random bases, public plaintext basis announcement after
/// measurement, sifting.
RoundResult plain_bb84_round(const RoundConfig& config, const EveStrategy& eve, EveState& eve_state,
                             RoundStreams& streams);

/// Biased-basis BB84: key only from key_basis matches, minority matches used
/// for eavesdropper checks.
RoundResult biased_bb84_round(const RoundConfig& config, const ProtocolVariant& variant,
                              const EveStrategy& eve, EveState& eve_state, RoundStreams& streams);

}  // namespace bb84aes
