#include "bb84aes/error.hpp"
#include "bb84aes/protocol.hpp"

namespace bb84aes {
namespace {

constexpr std::uint8_t kX = 0x00;
constexpr std::uint8_t kZ = 0x01;

std::vector<bool> arrivals_from_pattern(std::uint32_t pattern, int length) {
  std::vector<bool> out(static_cast<std::size_t>(length));
  for (int k = 0; k < length; ++k) {
    out[static_cast<std::size_t>(k)] = ((pattern >> (length - 1 - k)) & 1) == 0;
  }
  return out;
}

std::vector<std::uint8_t> random_bits(Rng& rng, std::size_t n) {
  std::vector<std::uint8_t> bits(n);
  for (auto& b : bits) b = random_bit(rng);
  return bits;
}

std::uint64_t random_iv(Rng& rng, int iv_bits) {
  if (iv_bits == 0) return 0;
  const std::uint64_t v = rng();
  return iv_bits == 64 ? v : v >> (64 - iv_bits);
}

}  // namespace

// --- Alice ------------------------------------------------------------------

AliceSession::AliceSession(ProtocolVariant variant, Authenticator outbound, Authenticator inbound)
    : variant_(variant), outbound_(std::move(outbound)), inbound_(std::move(inbound)) {
  variant_.validate();
  if (!variant_.is_aes()) throw Error(ErrorCode::InvalidArgument, "sessions are BB84-AES only");
  if (variant_.is_dense()) {
    response_table_ = build_lookup_table(inbound_.secret(), variant_.bases_per_tag);
  } else {
    const std::uint8_t x[] = {kX};
    const std::uint8_t z[] = {kZ};
    // h(X), h(Z) and h(Yes), h(No) are evaluated once per secret.
    basis_digests_ = {outbound_.digest(x), outbound_.digest(z)};
    response_digests_ = {inbound_.digest(x), inbound_.digest(z)};
  }
}

Announcement AliceSession::announce(Rng& source, double mu, std::optional<Basis> forced_basis) {
  const int n = variant_.group_size();
  Announcement a;
  a.bases.reserve(static_cast<std::size_t>(n));
  a.bits.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const Basis drawn = random_basis(source);
    a.bases.push_back(forced_basis.value_or(drawn));
    a.bits.push_back(random_bit(source));
  }
  try {
    if (variant_.is_dense()) {
      a.issued = outbound_.issue(encode_bases(a.bases));
    } else {
      a.issued = outbound_.issue_with_digest(basis_digests_[static_cast<std::size_t>(a.bases[0])]);
    }
  } catch (const Error&) {
    must_rekey_ = true;
    throw;
  }
  a.pulses.reserve(static_cast<std::size_t>(n));
  for (std::size_t k = 0; k < a.bases.size(); ++k) {
    a.pulses.push_back(emit_pulse(mu, a.bases[k], a.bits[k], source));
  }
  return a;
}

std::optional<std::vector<bool>> AliceSession::check_response(const Tag& response) {
  uint128 nonce = 0;
  try {
    nonce = inbound_.reserve_nonce();
  } catch (const Error&) {
    must_rekey_ = true;
    throw;
  }
  const uint128 ks = inbound_.keystream_at(nonce);
  const bool width_ok = response.width == inbound_.width();
  if (variant_.is_dense()) {
    const SearchResult hit = binary_search(response_table_->entries(), response.bits ^ ks);
    if (!hit.index || !width_ok) return std::nullopt;
    return arrivals_from_pattern(response_table_->entries()[*hit.index].pattern, variant_.bases_per_tag);
  }
  const bool yes = tags_equal(response.bits, response_digests_[0] ^ ks);
  const bool no = tags_equal(response.bits, response_digests_[1] ^ ks);
  if (!width_ok || (!yes && !no)) return std::nullopt;
  return std::vector<bool>{yes};
}

int AliceSession::worst_case_ticks(int per_comparison_tick) const noexcept {
  return variant_.is_dense() ? (variant_.bases_per_tag + 1) * per_comparison_tick : 0;
}

// --- Bob --------------------------------------------------------------------

BobSession::BobSession(ProtocolVariant variant, Authenticator inbound, Authenticator outbound)
    : variant_(variant), inbound_(std::move(inbound)), outbound_(std::move(outbound)) {
  variant_.validate();
  if (!variant_.is_aes()) throw Error(ErrorCode::InvalidArgument, "sessions are BB84-AES only");
  if (variant_.is_dense()) {
    table_ = build_lookup_table(inbound_.secret(), variant_.bases_per_tag);
  } else {
    const std::uint8_t x[] = {kX};
    const std::uint8_t z[] = {kZ};
    digest_x_ = inbound_.digest(x);
    digest_z_ = inbound_.digest(z);
  }
}

Resolution BobSession::resolve_bases(const Tag& tag) {
  uint128 nonce = 0;
  try {
    nonce = inbound_.reserve_nonce();
  } catch (const Error&) {
    must_rekey_ = true;
    throw;
  }
  const uint128 ks = inbound_.keystream_at(nonce);
  const bool width_ok = tag.width == inbound_.width();
  Resolution r;
  if (variant_.is_dense()) {
    const SearchResult hit = binary_search(table_->entries(), tag.bits ^ ks);
    r.comparisons = hit.comparisons;
    if (hit.index && width_ok) {
      r.bases = pattern_to_bases(table_->entries()[*hit.index].pattern, variant_.bases_per_tag);
    }
    return r;
  }
  if (variant_.reduced_processing) {
    // Only tau^X is checked; anything else means Z.
    r.comparisons = 1;
    const bool is_x = tags_equal(tag.bits, digest_x_ ^ ks) && width_ok;
    r.bases = std::vector<Basis>{is_x ? Basis::X : Basis::Z};
    return r;
  }
  r.comparisons = 2;
  const bool is_x = tags_equal(tag.bits, digest_x_ ^ ks);
  const bool is_z = tags_equal(tag.bits, digest_z_ ^ ks);
  if (width_ok && is_x) r.bases = std::vector<Basis>{Basis::X};
  if (width_ok && is_z) r.bases = std::vector<Basis>{Basis::Z};
  return r;
}

IssuedTag BobSession::respond(const std::vector<bool>& arrived) {
  std::vector<std::uint8_t> message;
  message.reserve(arrived.size());
  for (const bool a : arrived) message.push_back(a ? kX : kZ);
  try {
    return outbound_.issue(message);
  } catch (const Error&) {
    must_rekey_ = true;
    throw;
  }
}

// --- Setup ------------------------------------------------------------------

std::pair<Authenticator, Authenticator> make_direction(const InitialSecret& secret, std::uint64_t iv,
                                                       const CryptoParams& params) {
  const NonceGenerator gen(iv, params.iv_bits, params.counter_width);
  const TagBudget budget(params.budget_limit.value_or(TagBudget::default_limit(secret.width())));
  return {Authenticator(secret, gen, budget), Authenticator(secret, gen, budget)};
}

SessionPair make_sessions(const ProtocolVariant& variant, Rng& key_rng, const CryptoParams& params) {
  variant.validate();
  const TagWidth w = variant.tag_width;
  const std::size_t secret_bits = InitialSecret::bit_length_for(w);
  for (;;) {
    try {
      const InitialSecret ab = split_secret(random_bits(key_rng, secret_bits), w, Direction::AliceToBob);
      const InitialSecret ba = split_secret(random_bits(key_rng, secret_bits), w, Direction::BobToAlice);
      auto [ab_send, ab_recv] = make_direction(ab, random_iv(key_rng, params.iv_bits), params);
      auto [ba_send, ba_recv] = make_direction(ba, random_iv(key_rng, params.iv_bits), params);
      return SessionPair{AliceSession(variant, std::move(ab_send), std::move(ba_recv)),
                         BobSession(variant, std::move(ab_recv), std::move(ba_send))};
    } catch (const Error& e) {
      // Degenerate keys (k_H = 0, colliding digests) are redrawn.
      if (e.code() != ErrorCode::ZeroHashKey && e.code() != ErrorCode::AmbiguousLookupTable) throw;
    }
  }
}

std::uint64_t constant_time_gate(const AliceSession& alice, std::uint64_t tag_tick,
                                 const Resolution& resolution, int per_comparison_tick) {
  if (!alice.variant().is_dense()) return tag_tick;
  const int worst = alice.worst_case_ticks(per_comparison_tick);
  if (resolution.comparisons * per_comparison_tick > worst) {
    throw Error(ErrorCode::InvalidArgument, "lookup exceeded its worst-case comparison bound");
  }
  return tag_tick + static_cast<std::uint64_t>(worst);
}

}  // namespace bb84aes
