#pragma once

#include "maopt/random.hpp"
#include "maopt/types.hpp"

namespace maopt {

/// Static scenario parameters of the uplink: array geometry plus per-user
/// statistics. Noise power is normalized away at configuration time, so
/// power_ratio carries the per-user transmit power over noise power.
struct SystemConfig {
  int n_antennas = 0;       // N
  int n_users = 0;          // M
  Real span = 0;            // total aperture the antennas may occupy, in wavelengths
  Real min_spacing = 0;     // minimum distance between adjacent antennas
  Real wavelength = 1.0;
  RealVector power_ratio;   // per-user transmit power / noise power, linear
  RealVector rician_k;      // per-user Rician K-factor
  RealVector path_loss;     // per-user large-scale gain
  RealVector angle;         // per-user arrival angle, radians

  /// Throws std::invalid_argument on bad sizes/values, InfeasibleGeometry
  /// when the span cannot hold n_antennas at min_spacing.
  void validate() const;
};

/// Ordered antenna coordinates along the array axis, wavelength units.
/// Feasibility (spacing and span bounds) is validated explicitly where it
/// matters; objective functions accept arbitrary coordinates.
struct AntennaPositions {
  RealVector coords;

  AntennaPositions() = default;
  explicit AntennaPositions(RealVector c) : coords(std::move(c)) {}
  int size() const { return static_cast<int>(coords.size()); }
};

/// True when coords are non-decreasing with at least min_spacing gaps and lie
/// inside [0, span], up to `tol`.
bool is_feasible(const AntennaPositions& positions, Real span, Real min_spacing,
                 Real tol = 1e-12);

/// One instantaneous channel draw: deterministic steering part, random
/// scattered part, and their per-user mixture.
struct ChannelRealization {
  ComplexMatrix los;       // unit-modulus steering entries, antennas x users
  ComplexMatrix nlos;      // standard complex Gaussian draws
  ComplexMatrix combined;  // Rician mixture of the two
};

/// Per-antenna phase shifts seen from a plane wave at `angle`:
/// entry n is exp(j * 2*pi/wavelength * x_n * sin(angle)).
ComplexVector steering_vector(const AntennaPositions& positions, Real angle,
                              Real wavelength);

/// Stacks the per-user steering vectors into an antennas-by-users matrix.
ComplexMatrix los_matrix(const AntennaPositions& positions, const SystemConfig& config);

/// i.i.d. circularly symmetric complex Gaussian matrix (zero mean, unit
/// variance per entry), fully determined by the stream value.
ComplexMatrix sample_nlos(const RandomStream& stream, int n, int m);

/// Mixes steering and scattered parts per user with weights
/// sqrt(K*beta/(K+1)) and sqrt(beta/(K+1)).
ChannelRealization assemble_channel(const AntennaPositions& positions,
                                    const SystemConfig& config,
                                    const ComplexMatrix& nlos);

}  // namespace maopt
