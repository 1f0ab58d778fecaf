#pragma once

#include "maopt/model.hpp"
#include "maopt/receivers.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace maopt {

/// Per-user rates of change of one antenna's channel entries as that
/// antenna's coordinate moves. `phase_slope` is the bare angular factor,
/// `los_slope` adds the spatial frequency scale and is the derivative of the
/// unit steering entry, `channel_slope` further applies the Rician mixing
/// weight and is the derivative of the mean channel entry.
struct SteeringDerivatives {
  ComplexVector phase_slope;    // sin(theta_m) * exp(j*(2*pi*x*sin(theta_m)/lambda + pi/2))
  ComplexVector los_slope;      // (2*pi/lambda) * phase_slope
  ComplexVector channel_slope;  // sqrt(K*beta/(K+1)) * los_slope
};

SteeringDerivatives steering_derivatives(Real position, const SystemConfig& config);

/// Statistical context of the zero-forcing rate approximation. The diagonal
/// weights split each user's power into line-of-sight and scattered shares;
/// `expected_gram` assembles the expected noise-normalized user correlation
/// at the given positions.
struct ZfSurrogateContext {
  RealVector nlos_share;     // 1/(K_m + 1)
  RealVector los_amplitude;  // sqrt(K_m/(K_m + 1))

  ComplexMatrix expected_gram(const AntennaPositions& positions,
                              const SystemConfig& config) const;
};

ZfSurrogateContext make_zf_context(const SystemConfig& config);

/// Fixed set of scattered-channel draws backing the sample-average MMSE
/// objective. Drawn once per optimization run and reused at every iterate.
struct MmseSampleSet {
  std::vector<ComplexMatrix> draws;  // one antennas-by-users matrix per draw
  std::uint64_t seed = 0;            // provenance of the draws, for replay
  std::uint64_t stream_id = 0;

  int count() const { return static_cast<int>(draws.size()); }
};

MmseSampleSet draw_mmse_samples(const SystemConfig& config, int count,
                                const RandomStream& stream);

/// Mean receive covariance backing the SIC rate bound: the power-weighted
/// expected outer products of the user channels, plus its noise-normalized
/// factorization.
struct SicBoundContext {
  ComplexMatrix expected_outer;           // sum_m P_m E[h_m h_m^H]
  Eigen::LLT<ComplexMatrix> outer_llt;    // factorization of I + expected_outer
};

SicBoundContext make_sic_bound_context(const AntennaPositions& positions,
                                       const SystemConfig& config);

/// Approximate ergodic zero-forcing sum rate from statistics only.
/// Requires more antennas than users.
Real zf_surrogate(const AntennaPositions& positions, const SystemConfig& config);

/// Analytic gradient of zf_surrogate with respect to each coordinate.
RealVector zf_surrogate_grad(const AntennaPositions& positions, const SystemConfig& config);

/// Sample-average of the MMSE sum rate over the fixed draws.
Real mmse_saa_objective(const AntennaPositions& positions, const SystemConfig& config,
                        const MmseSampleSet& samples);

/// Analytic gradient of mmse_saa_objective.
RealVector mmse_saa_grad(const AntennaPositions& positions, const SystemConfig& config,
                         const MmseSampleSet& samples);

/// Upper bound on the ergodic SIC sum rate obtained by moving the
/// expectation inside the log-determinant.
Real sic_bound_objective(const AntennaPositions& positions, const SystemConfig& config);

/// Analytic gradient of sic_bound_objective.
RealVector sic_bound_grad(const AntennaPositions& positions, const SystemConfig& config);

/// Central-difference gradient oracle; evaluates f at x +- step along each
/// coordinate, ignoring feasibility (the objectives are defined everywhere).
RealVector finite_difference_gradient(const std::function<Real(const AntennaPositions&)>& f,
                                      const AntennaPositions& positions, Real step);

/// A position-design objective bundled with its gradient and feasible
/// geometry, ready for the optimizer.
struct SurrogateObjective {
  std::string name;
  Real span = 0;
  Real min_spacing = 0;
  std::function<Real(const AntennaPositions&)> value;
  std::function<RealVector(const AntennaPositions&)> gradient;
};

SurrogateObjective zf_objective(const SystemConfig& config);
SurrogateObjective mmse_objective(const SystemConfig& config, MmseSampleSet samples);
SurrogateObjective sic_objective(const SystemConfig& config);

}  // namespace maopt
