#include <algorithm>

#include "bb84aes/error.hpp"
#include "bb84aes/protocol.hpp"

namespace bb84aes {

// --- ProtocolVariant --------------------------------------------------------

ProtocolVariant ProtocolVariant::basic() { return {}; }

ProtocolVariant ProtocolVariant::reduced_processing_mode(TagWidth width) {
  ProtocolVariant v;
  v.reduced_processing = true;
  v.tag_width = width;
  return v;
}

ProtocolVariant ProtocolVariant::reduced_bandwidth(bool with_reduced_processing) {
  ProtocolVariant v;
  v.tag_width = TagWidth::Bits64;
  v.reduced_processing = with_reduced_processing;
  return v;
}

ProtocolVariant ProtocolVariant::dense(int xi, TagWidth width) {
  if (xi < kMinBasesPerTag) throw Error(ErrorCode::RangeError, "dense mode requires 2 <= xi <= 20");
  ProtocolVariant v;
  v.bases_per_tag = xi;
  v.tag_width = width;
  v.validate();
  return v;
}

ProtocolVariant ProtocolVariant::plain() {
  ProtocolVariant v;
  v.scheme = Scheme::PlainBb84;
  return v;
}

ProtocolVariant ProtocolVariant::biased(Basis key_basis, double bias) {
  ProtocolVariant v;
  v.scheme = Scheme::BiasedBb84;
  v.key_basis = key_basis;
  v.bias = bias;
  v.validate();
  return v;
}

double ProtocolVariant::classical_bits_per_qubit() const noexcept {
  if (!is_aes()) return 0.0;
  return static_cast<double>(bit_count(tag_width)) / group_size();
}

std::string ProtocolVariant::name() const {
  switch (scheme) {
    case Scheme::PlainBb84: return "plain_bb84";
    case Scheme::BiasedBb84: return "biased_bb84";
    case Scheme::Bb84Aes: break;
  }
  std::string n = is_dense() ? "dense_xi" + std::to_string(bases_per_tag) : "bb84_aes";
  if (reduced_processing) n += "_reduced_processing";
  n += "_l" + std::to_string(bit_count(tag_width));
  return n;
}

void ProtocolVariant::validate() const {
  if (scheme == Scheme::BiasedBb84) {
    if (!(bias > 0.5 && bias < 1.0)) throw Error(ErrorCode::RangeError, "bias must be in (0.5, 1)");
    return;
  }
  if (scheme != Scheme::Bb84Aes) return;
  if (bases_per_tag != 1 && (bases_per_tag < kMinBasesPerTag || bases_per_tag > kMaxBasesPerTag)) {
    throw Error(ErrorCode::RangeError, "dense mode requires 2 <= xi <= 20");
  }
  if (bases_per_tag > 1 && reduced_processing) {
    throw Error(ErrorCode::RangeError, "reduced processing does not combine with dense transfer");
  }
}

// --- Symbols ----------------------------------------------------------------

std::vector<std::uint8_t> encode_bases(std::span<const Basis> bases) {
  std::vector<std::uint8_t> out;
  out.reserve(bases.size());
  for (const Basis b : bases) out.push_back(static_cast<std::uint8_t>(b));
  return out;
}

std::uint32_t bases_to_pattern(std::span<const Basis> bases) {
  std::uint32_t p = 0;
  for (const Basis b : bases) p = (p << 1) | static_cast<std::uint32_t>(b);
  return p;
}

std::vector<Basis> pattern_to_bases(std::uint32_t pattern, int length) {
  std::vector<Basis> out(static_cast<std::size_t>(length));
  for (int k = 0; k < length; ++k) {
    out[static_cast<std::size_t>(k)] = ((pattern >> (length - 1 - k)) & 1) ? Basis::Z : Basis::X;
  }
  return out;
}

std::vector<std::uint8_t> encode_pattern(std::uint32_t pattern, int length) {
  std::vector<std::uint8_t> out(static_cast<std::size_t>(length));
  for (int k = 0; k < length; ++k) {
    out[static_cast<std::size_t>(k)] = static_cast<std::uint8_t>((pattern >> (length - 1 - k)) & 1);
  }
  return out;
}

// --- Lookup table -----------------------------------------------------------

LookupTable::LookupTable(std::vector<LookupEntry> sorted_entries, int symbols, TagWidth width)
    : entries_(std::move(sorted_entries)), symbols_(symbols), width_(width) {}

std::size_t LookupTable::footprint_bytes() const noexcept {
  return entries_.size() * static_cast<std::size_t>(bit_count(width_)) / 8;
}

LookupTable build_lookup_table(const InitialSecret& secret, int symbols) {
  if (symbols < 0 || symbols > kMaxBasesPerTag) {
    throw Error(ErrorCode::RangeError, "lookup tables cover 0..20 symbols");
  }
  const std::uint32_t count = std::uint32_t{1} << symbols;
  std::vector<LookupEntry> entries(count);
  for (std::uint32_t p = 0; p < count; ++p) {
    const auto message = encode_pattern(p, symbols);
    entries[p] = {universal_hash(secret.hash_key(), message, secret.width()), p};
  }
  std::sort(entries.begin(), entries.end(),
            [](const LookupEntry& a, const LookupEntry& b) { return a.digest < b.digest; });
  const auto dup = std::adjacent_find(entries.begin(), entries.end(),
                                      [](const LookupEntry& a, const LookupEntry& b) {
                                        return a.digest == b.digest;
                                      });
  if (dup != entries.end()) {
    throw Error(ErrorCode::AmbiguousLookupTable, "two symbol strings share a digest under this key");
  }
  return LookupTable(std::move(entries), symbols, secret.width());
}

SearchResult binary_search(std::span<const LookupEntry> table, uint128 digest) noexcept {
  SearchResult result;
  std::size_t lo = 0;
  std::size_t hi = table.size();
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    ++result.comparisons;
    const uint128 probe = table[mid].digest;
    if (probe == digest) {
      result.index = mid;
      return result;
    }
    if (digest < probe) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return result;
}

}  // namespace bb84aes
