#include "bb84aes/adversary.hpp"

#include <algorithm>

#include "bb84aes/error.hpp"

namespace bb84aes {

const char* to_string(EveKind k) noexcept {
  switch (k) {
    case EveKind::Passive: return "passive";
    case EveKind::DoSProbe: return "dos_probe";
    case EveKind::KeyExhaustion: return "key_exhaustion";
    case EveKind::PnsWithMemory: return "pns_memory";
    case EveKind::InterceptResend: return "intercept_resend";
    case EveKind::PnsThreePlus: return "pns_three_plus";
    case EveKind::PnsNoMemory: return "pns_no_memory";
    case EveKind::BlindTagFlip: return "blind_tag_flip";
    case EveKind::DenseTagGuess: return "dense_tag_guess";
  }
  return "unknown";
}

EveKind eve_kind_from_string(const std::string& name) {
  for (const EveKind k : {EveKind::Passive, EveKind::DoSProbe, EveKind::KeyExhaustion,
                          EveKind::PnsWithMemory, EveKind::InterceptResend, EveKind::PnsThreePlus,
                          EveKind::PnsNoMemory, EveKind::BlindTagFlip, EveKind::DenseTagGuess}) {
    if (name == to_string(k)) return k;
  }
  throw Error(ErrorCode::RangeError, "unknown eve strategy '" + name + "'");
}

EveStrategy EveStrategy::dos_probe(double attenuation_db) {
  EveStrategy s;
  s.kind = EveKind::DoSProbe;
  s.attenuation_db = attenuation_db;
  s.validate();
  return s;
}

EveStrategy EveStrategy::key_exhaustion(std::uint64_t repeat_count) {
  EveStrategy s;
  s.kind = EveKind::KeyExhaustion;
  s.repeat_count = repeat_count;
  s.validate();
  return s;
}

EveStrategy EveStrategy::pns_with_memory() {
  EveStrategy s;
  s.kind = EveKind::PnsWithMemory;
  return s;
}

EveStrategy EveStrategy::intercept_resend() {
  EveStrategy s;
  s.kind = EveKind::InterceptResend;
  return s;
}

EveStrategy EveStrategy::pns_three_plus(double p_usd) {
  EveStrategy s;
  s.kind = EveKind::PnsThreePlus;
  s.p_usd = p_usd;
  s.validate();
  return s;
}

EveStrategy EveStrategy::pns_no_memory(Basis key_basis) {
  EveStrategy s;
  s.kind = EveKind::PnsNoMemory;
  s.key_basis = key_basis;
  return s;
}

EveStrategy EveStrategy::blind_tag_flip(Basis measure_basis, bool flip) {
  EveStrategy s;
  s.kind = EveKind::BlindTagFlip;
  s.measure_basis = measure_basis;
  s.flip = flip;
  return s;
}

EveStrategy EveStrategy::dense_tag_guess() {
  EveStrategy s;
  s.kind = EveKind::DenseTagGuess;
  return s;
}

double EveStrategy::usd_probability(unsigned copies) const {
  const auto it = p_usd_by_copies.find(copies);
  return it == p_usd_by_copies.end() ? p_usd : it->second;
}

std::string EveStrategy::name() const {
  std::string n = to_string(kind);
  switch (kind) {
    case EveKind::BlindTagFlip:
      n += std::string("_") + to_char(measure_basis) + (flip ? "_flip" : "_keep");
      break;
    case EveKind::PnsNoMemory: n += std::string("_") + to_char(key_basis); break;
    default: break;
  }
  return n;
}

void EveStrategy::validate() const {
  auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!prob(p_usd)) throw Error(ErrorCode::RangeError, "p_usd must be in [0, 1]");
  for (const auto& [copies, p] : p_usd_by_copies) {
    if (!prob(p)) throw Error(ErrorCode::RangeError, "p_usd must be in [0, 1]");
  }
  if (!(attenuation_db >= 0.0)) throw Error(ErrorCode::RangeError, "attenuation must be >= 0 dB");
  if (repeat_count < 1) throw Error(ErrorCode::RangeError, "repeat count must be >= 1");
}

Tag random_forgery(const Tag& genuine, Rng& rng) {
  const uint128 mask = width_mask(genuine.width);
  Tag forged = genuine;
  do {
    forged.bits = ((uint128{rng()} << 64) | rng()) & mask;
  } while (forged.bits == genuine.bits);
  return forged;
}

namespace {

// Split keeping `keep` photons, or block when the pulse is too small.
std::optional<Pulse> split_or_block(EveState& state, const Pulse& p, std::size_t index, unsigned keep,
                                     unsigned block_up_to, bool store) {
  if (p.photons == 0) return p;
  if (p.photons <= block_up_to) {
    ++state.pulses_blocked;
    return std::nullopt;
  }
  auto [kept, forwarded] = photon_number_split(p, keep);
  ++state.pulses_split;
  if (store) state.stored.push_back({index, kept});
  return forwarded;
}

}  // namespace

Interception intercept(const EveStrategy& strategy, EveState& state, const std::optional<Tag>& tag,
                       std::span<const Pulse> pulses, std::size_t first_index, Rng& rng) {
  Interception out;
  out.tag = tag;
  out.pulses.reserve(pulses.size());
  if (tag) {
    ++state.tags_seen;
    const bool replace = strategy.kind == EveKind::DenseTagGuess ||
                         (strategy.kind == EveKind::BlindTagFlip && strategy.flip);
    if (replace) {
      out.tag = random_forgery(*tag, rng);
      ++state.tags_replaced;
    }
  }

  for (std::size_t k = 0; k < pulses.size(); ++k) {
    const Pulse& p = pulses[k];
    const std::size_t index = first_index + k;
    switch (strategy.kind) {
      case EveKind::Passive:
      case EveKind::KeyExhaustion:
      case EveKind::DenseTagGuess:
        out.pulses.emplace_back(p);
        break;
      case EveKind::DoSProbe:
        out.pulses.emplace_back(transmit(p, transmittance_from_db(strategy.attenuation_db), rng));
        break;
      case EveKind::PnsWithMemory:
        out.pulses.push_back(split_or_block(state, p, index, 1, 1, true));
        break;
      case EveKind::PnsThreePlus:
        out.pulses.push_back(split_or_block(state, p, index, 2, 2, true));
        break;
      case EveKind::PnsNoMemory: {
        const bool splittable = p.photons >= 2;
        auto fwd = split_or_block(state, p, index, 1, 1, false);
        if (splittable) {
          // The split-off photon is measured at once; no memory needed.
          const Pulse single{1, p.basis, p.bit};
          const DetectionOutcome o = measure(single, strategy.key_basis, 0.0, rng);
          state.immediate.push_back({index, o.bit});
        }
        out.pulses.push_back(fwd);
        break;
      }
      case EveKind::InterceptResend:
      case EveKind::BlindTagFlip: {
        if (p.photons == 0) {
          out.pulses.emplace_back(p);
          break;
        }
        const Basis b = strategy.kind == EveKind::InterceptResend ? random_basis(rng) : strategy.measure_basis;
        const DetectionOutcome o = measure(p, b, 0.0, rng);
        state.immediate.push_back({index, o.bit});
        out.pulses.emplace_back(Pulse{1, b, o.bit});
        break;
      }
    }
  }
  return out;
}

EveReport finalize(const EveStrategy& strategy, EveState& state, const PublicTranscript& transcript,
                   Rng& rng) {
  if (!transcript.complete) throw Error(ErrorCode::IncompleteRound, "round did not complete");
  EveReport report;
  report.stored_photons = state.stored.size();
  report.stored_indices.reserve(state.stored.size());
  for (const StoredPhotons& s : state.stored) report.stored_indices.push_back(s.pulse_index);
  std::sort(report.stored_indices.begin(), report.stored_indices.end());
  report.pulses_blocked = state.pulses_blocked;
  report.pulses_split = state.pulses_split;
  report.tags_replaced = state.tags_replaced;

  std::vector<std::optional<Basis>> announced;
  if (transcript.bases_public) {
    std::size_t max_index = 0;
    for (const auto& [i, b] : transcript.announced_bases) max_index = std::max(max_index, i + 1);
    announced.resize(max_index);
    for (const auto& [i, b] : transcript.announced_bases) announced[i] = b;
  }
  auto announced_at = [&](std::size_t i) -> std::optional<Basis> {
    return i < announced.size() ? announced[i] : std::nullopt;
  };

  for (const EveGuess& g : state.immediate) {
    if (strategy.kind == EveKind::PnsNoMemory && transcript.bases_public) {
      // Positions announced in the other basis were check bits; drop them.
      const auto b = announced_at(g.pulse_index);
      if (!b || *b != strategy.key_basis) continue;
    }
    report.key_guess.push_back(g);
  }

  for (const StoredPhotons& s : state.stored) {
    if (strategy.kind == EveKind::PnsThreePlus) {
      // Unambiguous discrimination: either the right bit or no answer.
      if (bernoulli(rng, strategy.usd_probability(s.kept.photons))) {
        report.key_guess.push_back({s.pulse_index, s.kept.bit});
      }
      continue;
    }
    std::optional<Basis> basis;
    if (transcript.bases_public) {
      basis = announced_at(s.pulse_index);
      if (!basis) continue;  // never detected, never in the key
    } else {
      basis = random_basis(rng);
    }
    report.key_guess.push_back({s.pulse_index, measure(s.kept, *basis, 0.0, rng).bit});
  }

  std::sort(report.key_guess.begin(), report.key_guess.end(),
            [](const EveGuess& a, const EveGuess& b) { return a.pulse_index < b.pulse_index; });
  state.finalized = true;
  return report;
}

void score_against(EveReport& report, const RoundResult& round) {
  std::vector<std::int64_t> position(round.pulses.size(), -1);
  for (std::size_t k = 0; k < round.key_indices.size(); ++k) {
    position[round.key_indices[k]] = static_cast<std::int64_t>(k);
  }
  report.guesses_in_key = 0;
  report.agreements = 0;
  report.stored_in_key = 0;
  for (std::size_t i : report.stored_indices) {
    report.stored_in_key += i < position.size() && position[i] >= 0;
  }
  for (const EveGuess& g : report.key_guess) {
    if (g.pulse_index >= position.size() || position[g.pulse_index] < 0) continue;
    ++report.guesses_in_key;
    report.agreements += g.bit == round.alice_raw_key[static_cast<std::size_t>(position[g.pulse_index])];
  }
  report.agreement = report.guesses_in_key == 0
                         ? 0.0
                         : static_cast<double>(report.agreements) / static_cast<double>(report.guesses_in_key);
  report.key_coverage = round.key_indices.empty()
                            ? 0.0
                            : static_cast<double>(report.guesses_in_key) / static_cast<double>(round.key_indices.size());
}

std::string to_decimal(uint128 value) {
  if (value == 0) return "0";
  std::string out;
  while (value > 0) {
    out.push_back(static_cast<char>('0' + static_cast<int>(value % 10)));
    value /= 10;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

}  // namespace bb84aes
