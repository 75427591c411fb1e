#pragma once

// Weak-coherent pulses, lossy transmission and threshold detection with a
// lumped bit error rate q.

#include <cstdint>
#include <utility>

#include "bb84aes/rng.hpp"

namespace bb84aes {

enum class Basis : std::uint8_t { X = 0, Z = 1 };

constexpr Basis other(Basis b) noexcept { return b == Basis::X ? Basis::Z : Basis::X; }
constexpr char to_char(Basis b) noexcept { return b == Basis::X ? 'X' : 'Z'; }
inline Basis random_basis(Rng& rng) { return random_bit(rng) ? Basis::Z : Basis::X; }

struct Pulse {
  unsigned photons = 0;  // 0 is vacuum
  Basis basis = Basis::X;
  std::uint8_t bit = 0;

  friend bool operator==(const Pulse&, const Pulse&) = default;
};

struct ChannelConfig {
  double mean_photon_number = 0.5;
  double attenuation_db = 0.0;
  double qber = 0.02;
  double clock_hz = 5e6;  // reporting only

  [[nodiscard]] double transmittance() const noexcept;
  void validate() const;
};

double transmittance_from_db(double attenuation_db) noexcept;

struct DetectionOutcome {
  bool clicked = false;
  std::uint8_t bit = 0;

  static DetectionOutcome no_click() noexcept { return {}; }
  static DetectionOutcome click(std::uint8_t b) noexcept { return {true, b}; }

  friend bool operator==(const DetectionOutcome&, const DetectionOutcome&) = default;
};

/// Photon number ~ Poisson(mu).
Pulse emit_pulse(double mu, Basis basis, std::uint8_t bit, Rng& rng);

/// Each photon survives independently with probability `transmittance`.
Pulse transmit(const Pulse& pulse, double transmittance, Rng& rng);

/// Threshold detector: any photon clicks. Matching basis gives the encoded bit
/// with probability 1 - q; mismatched basis gives a uniform bit.
DetectionOutcome measure(const Pulse& pulse, Basis basis_choice, double q, Rng& rng);

/// Returns (kept, forwarded). Throws InsufficientPhotons if keep > photons.
std::pair<Pulse, Pulse> photon_number_split(const Pulse& pulse, unsigned keep);

}  // namespace bb84aes
