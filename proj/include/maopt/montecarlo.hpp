#pragma once

#include "maopt/receivers.hpp"

namespace maopt {

/// Seeded Monte Carlo estimate of the ergodic sum rate at fixed positions.
struct ErgodicEstimate {
  Real mean = 0;       // bits/s/Hz
  Real std_error = 0;  // sample standard deviation / sqrt(n_samples)
  int n_samples = 0;
  ReceiverKind receiver = ReceiverKind::Zf;
  std::uint64_t seed = 0;
};

/// Averages the chosen receiver's instantaneous sum rate over n_samples
/// independent channel draws. Each draw uses its own substream indexed by
/// sample number, so any subset of samples can be recomputed independently
/// and the estimate does not depend on evaluation order.
ErgodicEstimate ergodic_sum_rate(const AntennaPositions& positions,
                                 const SystemConfig& config, ReceiverKind receiver,
                                 int n_samples, const RandomStream& stream);

/// Conventional fixed array: adjacent antennas exactly half a wavelength
/// apart, anchored at zero.
AntennaPositions fpa_positions(const SystemConfig& config);

}  // namespace maopt
