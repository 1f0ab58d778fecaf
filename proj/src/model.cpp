#include "maopt/model.hpp"

#include <cmath>

namespace maopt {

void SystemConfig::validate() const {
  if (n_antennas < 1) throw std::invalid_argument("n_antennas must be >= 1");
  if (n_users < 1) throw std::invalid_argument("n_users must be >= 1");
  if (!(wavelength > 0)) throw std::invalid_argument("wavelength must be > 0");
  if (min_spacing < 0) throw std::invalid_argument("min_spacing must be >= 0");
  const auto m = static_cast<Eigen::Index>(n_users);
  if (power_ratio.size() != m || rician_k.size() != m || path_loss.size() != m ||
      angle.size() != m) {
    throw std::invalid_argument("per-user parameter vectors must have length n_users");
  }
  if ((power_ratio.array() <= 0).any()) {
    throw std::invalid_argument("power_ratio entries must be > 0");
  }
  if ((rician_k.array() <= 0).any()) {
    throw std::invalid_argument("rician_k entries must be > 0");
  }
  if ((path_loss.array() <= 0).any()) {
    throw std::invalid_argument("path_loss entries must be > 0");
  }
  if (span < (n_antennas - 1) * min_spacing) {
    throw InfeasibleGeometry("span " + std::to_string(span) + " cannot hold " +
                             std::to_string(n_antennas) + " antennas spaced " +
                             std::to_string(min_spacing) + " apart");
  }
}

bool is_feasible(const AntennaPositions& positions, Real span, Real min_spacing,
                 Real tol) {
  const auto& x = positions.coords;
  if (x.size() == 0) return false;
  if (x[0] < -tol || x[x.size() - 1] > span + tol) return false;
  for (Eigen::Index n = 1; n < x.size(); ++n) {
    if (x[n] - x[n - 1] < min_spacing - tol) return false;
  }
  return true;
}

ComplexVector steering_vector(const AntennaPositions& positions, Real angle,
                              Real wavelength) {
  if (!(wavelength > 0)) throw std::invalid_argument("wavelength must be > 0");
  const Real spatial_freq = 2.0 * kPi / wavelength * std::sin(angle);
  ComplexVector v(positions.size());
  for (int n = 0; n < positions.size(); ++n) {
    v[n] = std::polar(Real(1), spatial_freq * positions.coords[n]);
  }
  return v;
}

ComplexMatrix los_matrix(const AntennaPositions& positions, const SystemConfig& config) {
  if (positions.size() != config.n_antennas) {
    throw DimensionError("positions size does not match n_antennas");
  }
  ComplexMatrix out(config.n_antennas, config.n_users);
  for (int m = 0; m < config.n_users; ++m) {
    out.col(m) = steering_vector(positions, config.angle[m], config.wavelength);
  }
  return out;
}

ComplexMatrix sample_nlos(const RandomStream& stream, int n, int m) {
  auto engine = stream.make_engine();
  ComplexMatrix out(n, m);
  for (Eigen::Index col = 0; col < m; ++col) {
    for (Eigen::Index row = 0; row < n; ++row) {
      out(row, col) = detail::complex_gaussian(engine);
    }
  }
  return out;
}

ChannelRealization assemble_channel(const AntennaPositions& positions,
                                    const SystemConfig& config,
                                    const ComplexMatrix& nlos) {
  if (nlos.rows() != config.n_antennas || nlos.cols() != config.n_users) {
    throw DimensionError("nlos draw does not match config dimensions");
  }
  ChannelRealization out;
  out.los = los_matrix(positions, config);
  out.nlos = nlos;
  out.combined.resize(config.n_antennas, config.n_users);
  for (int m = 0; m < config.n_users; ++m) {
    const Real k = config.rician_k[m];
    const Real beta = config.path_loss[m];
    const Real los_weight = std::sqrt(k * beta / (k + 1));
    const Real nlos_weight = std::sqrt(beta / (k + 1));
    out.combined.col(m) = los_weight * out.los.col(m) + nlos_weight * out.nlos.col(m);
  }
  return out;
}

}  // namespace maopt
