#include "bb84aes/channel.hpp"

#include <cmath>
#include <string>

#include "bb84aes/error.hpp"

namespace bb84aes {

double transmittance_from_db(double attenuation_db) noexcept {
  return std::pow(10.0, -attenuation_db / 10.0);
}

double ChannelConfig::transmittance() const noexcept { return transmittance_from_db(attenuation_db); }

void ChannelConfig::validate() const {
  if (!(mean_photon_number > 0.0)) throw Error(ErrorCode::RangeError, "mu must be > 0");
  if (!(attenuation_db >= 0.0)) throw Error(ErrorCode::RangeError, "attenuation must be >= 0 dB");
  if (!(qber >= 0.0 && qber <= 0.5)) throw Error(ErrorCode::RangeError, "qber must be in [0, 0.5]");
  if (!(clock_hz > 0.0)) throw Error(ErrorCode::RangeError, "clock rate must be > 0");
}

Pulse emit_pulse(double mu, Basis basis, std::uint8_t bit, Rng& rng) {
  if (!(mu > 0.0)) throw Error(ErrorCode::InvalidArgument, "mu must be > 0");
  std::poisson_distribution<unsigned> photons(mu);
  return Pulse{photons(rng), basis, static_cast<std::uint8_t>(bit & 1)};
}

Pulse transmit(const Pulse& pulse, double transmittance, Rng& rng) {
  if (!(transmittance > 0.0 && transmittance <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "transmittance must be in (0, 1]");
  }
  if (transmittance == 1.0 || pulse.photons == 0) return pulse;
  Pulse out = pulse;
  out.photons = 0;
  for (unsigned i = 0; i < pulse.photons; ++i) out.photons += bernoulli(rng, transmittance) ? 1U : 0U;
  return out;
}

DetectionOutcome measure(const Pulse& pulse, Basis basis_choice, double q, Rng& rng) {
  if (!(q >= 0.0 && q <= 0.5)) throw Error(ErrorCode::InvalidArgument, "q must be in [0, 0.5]");
  if (pulse.photons == 0) return DetectionOutcome::no_click();
  if (basis_choice != pulse.basis) return DetectionOutcome::click(random_bit(rng));
  const bool flip = q > 0.0 && bernoulli(rng, q);
  return DetectionOutcome::click(static_cast<std::uint8_t>(pulse.bit ^ (flip ? 1 : 0)));
}

std::pair<Pulse, Pulse> photon_number_split(const Pulse& pulse, unsigned keep) {
  if (keep > pulse.photons) {
    throw Error(ErrorCode::InsufficientPhotons, "cannot keep " + std::to_string(keep) + " of " +
                                                    std::to_string(pulse.photons) + " photons");
  }
  Pulse kept = pulse;
  Pulse forwarded = pulse;
  kept.photons = keep;
  forwarded.photons = pulse.photons - keep;
  return {kept, forwarded};
}

}  // namespace bb84aes
