#include "maopt/montecarlo.hpp"

#include <cmath>

namespace maopt {

ErgodicEstimate ergodic_sum_rate(const AntennaPositions& positions,
                                 const SystemConfig& config, ReceiverKind receiver,
                                 int n_samples, const RandomStream& stream) {
  if (n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");

  RealVector rates(n_samples);
  for (int s = 0; s < n_samples; ++s) {
    const ComplexMatrix nlos =
        sample_nlos(stream.substream(s), config.n_antennas, config.n_users);
    const ChannelRealization channel = assemble_channel(positions, config, nlos);
    rates[s] = instantaneous_sum_rate(channel, config, receiver);
  }

  ErgodicEstimate est;
  est.receiver = receiver;
  est.n_samples = n_samples;
  est.seed = stream.seed();
  est.mean = rates.sum() / n_samples;
  if (n_samples > 1) {
    const Real variance =
        (rates.array() - est.mean).square().sum() / (n_samples - 1);
    est.std_error = std::sqrt(variance / n_samples);
  }
  return est;
}

AntennaPositions fpa_positions(const SystemConfig& config) {
  const Real spacing = 0.5 * config.wavelength;
  if ((config.n_antennas - 1) * spacing > config.span) {
    throw InfeasibleGeometry("span cannot hold the half-wavelength fixed array");
  }
  RealVector x(config.n_antennas);
  for (int n = 0; n < config.n_antennas; ++n) x[n] = n * spacing;
  return AntennaPositions(std::move(x));
}

}  // namespace maopt
