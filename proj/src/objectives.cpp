#include "maopt/objectives.hpp"

#include <Eigen/Cholesky>

#include <cmath>

namespace maopt {

namespace {

const Real kLn2 = std::log(Real(2));

Real log2_1p(Real x) { return std::log1p(x) / kLn2; }

/// Mixing weight of the deterministic channel part, sqrt(K*beta/(K+1)).
RealVector los_mix_weight(const SystemConfig& config) {
  return (config.rician_k.array() * config.path_loss.array() /
          (config.rician_k.array() + 1))
      .sqrt()
      .matrix();
}

}  // namespace

SteeringDerivatives steering_derivatives(Real position, const SystemConfig& config) {
  const Real spatial_scale = 2.0 * kPi / config.wavelength;
  SteeringDerivatives out;
  out.phase_slope.resize(config.n_users);
  for (int m = 0; m < config.n_users; ++m) {
    const Real s = std::sin(config.angle[m]);
    out.phase_slope[m] = s * std::polar(Real(1), spatial_scale * position * s + kPi / 2);
  }
  out.los_slope = spatial_scale * out.phase_slope;
  const RealVector mix = los_mix_weight(config);
  out.channel_slope = out.los_slope.cwiseProduct(mix.cast<Complex>());
  return out;
}

ZfSurrogateContext make_zf_context(const SystemConfig& config) {
  ZfSurrogateContext ctx;
  ctx.nlos_share = (config.rician_k.array() + 1).inverse().matrix();
  ctx.los_amplitude =
      (config.rician_k.array() / (config.rician_k.array() + 1)).sqrt().matrix();
  return ctx;
}

ComplexMatrix ZfSurrogateContext::expected_gram(const AntennaPositions& positions,
                                                const SystemConfig& config) const {
  const ComplexMatrix los = los_matrix(positions, config);
  const ComplexMatrix gram = los.adjoint() * los;
  const ComplexVector amp = los_amplitude.cast<Complex>();
  ComplexMatrix out = (amp.asDiagonal() * gram * amp.asDiagonal()) /
                      static_cast<Real>(config.n_antennas);
  out.diagonal() += nlos_share.cast<Complex>();
  return out;
}

MmseSampleSet draw_mmse_samples(const SystemConfig& config, int count,
                                const RandomStream& stream) {
  if (count < 1) throw EmptySampleSet("sample count must be >= 1");
  MmseSampleSet set;
  set.seed = stream.seed();
  set.stream_id = stream.stream_id();
  set.draws.reserve(count);
  for (int s = 0; s < count; ++s) {
    set.draws.push_back(
        sample_nlos(stream.substream(s), config.n_antennas, config.n_users));
  }
  return set;
}

SicBoundContext make_sic_bound_context(const AntennaPositions& positions,
                                       const SystemConfig& config) {
  const ComplexMatrix los = los_matrix(positions, config);
  SicBoundContext ctx;
  ctx.expected_outer = ComplexMatrix::Zero(config.n_antennas, config.n_antennas);
  Real scattered_power = 0;
  for (int m = 0; m < config.n_users; ++m) {
    const Real k = config.rician_k[m];
    const Real beta = config.path_loss[m];
    const Real p = config.power_ratio[m];
    ctx.expected_outer.noalias() +=
        Complex(p * k * beta / (k + 1)) * (los.col(m) * los.col(m).adjoint());
    scattered_power += p * beta / (k + 1);
  }
  ctx.expected_outer +=
      scattered_power * ComplexMatrix::Identity(config.n_antennas, config.n_antennas);
  ctx.outer_llt.compute(ctx.expected_outer +
                        ComplexMatrix::Identity(config.n_antennas, config.n_antennas));
  return ctx;
}

Real zf_surrogate(const AntennaPositions& positions, const SystemConfig& config) {
  const int n = config.n_antennas;
  const int m_users = config.n_users;
  if (n <= m_users) {
    throw DimensionError("zero-forcing surrogate needs n_antennas > n_users");
  }
  const ZfSurrogateContext ctx = make_zf_context(config);
  const ComplexMatrix gram = ctx.expected_gram(positions, config);
  const ComplexMatrix gram_inv =
      gram.llt().solve(ComplexMatrix::Identity(m_users, m_users));
  Real total = 0;
  for (int m = 0; m < m_users; ++m) {
    const Real diag = checked_real(gram_inv(m, m));
    total += log2_1p(config.power_ratio[m] * config.path_loss[m] * (n - m_users) / diag);
  }
  return total;
}

RealVector zf_surrogate_grad(const AntennaPositions& positions, const SystemConfig& config) {
  const int n = config.n_antennas;
  const int m_users = config.n_users;
  if (n <= m_users) {
    throw DimensionError("zero-forcing surrogate needs n_antennas > n_users");
  }
  const ZfSurrogateContext ctx = make_zf_context(config);
  const ComplexMatrix los = los_matrix(positions, config);
  const ComplexMatrix gram = ctx.expected_gram(positions, config);
  const ComplexMatrix gram_inv =
      gram.llt().solve(ComplexMatrix::Identity(m_users, m_users));

  // d(rate_m)/d([gram_inv]_mm), for the chain through the inverse diagonal.
  RealVector diag_sensitivity(m_users);
  for (int m = 0; m < m_users; ++m) {
    const Real diag = checked_real(gram_inv(m, m));
    const Real strength = config.power_ratio[m] * config.path_loss[m] * (n - m_users);
    diag_sensitivity[m] = -strength / (kLn2 * (diag * diag + strength * diag));
  }

  const ComplexVector los_amp = ctx.los_amplitude.cast<Complex>();
  RealVector grad(n);
  for (int antenna = 0; antenna < n; ++antenna) {
    const SteeringDerivatives sd = steering_derivatives(positions.coords[antenna], config);
    // Moving one antenna perturbs a single row of the steering matrix, so the
    // expected-Gram derivative is a conjugate pair of rank-one terms.
    const ComplexVector row = los.row(antenna).transpose();
    ComplexMatrix dgram = sd.los_slope.conjugate() * row.transpose();
    dgram += dgram.adjoint().eval();
    dgram = (los_amp.asDiagonal() * dgram * los_amp.asDiagonal()) / static_cast<Real>(n);
    const ComplexMatrix dinv = -gram_inv * dgram * gram_inv;
    Complex total = 0;
    for (int m = 0; m < m_users; ++m) {
      total += diag_sensitivity[m] * dinv(m, m);
    }
    grad[antenna] = checked_real(total);
  }
  return grad;
}

Real mmse_saa_objective(const AntennaPositions& positions, const SystemConfig& config,
                        const MmseSampleSet& samples) {
  if (samples.count() == 0) throw EmptySampleSet("MMSE sample set is empty");
  Real total = 0;
  for (const ComplexMatrix& draw : samples.draws) {
    const ChannelRealization channel = assemble_channel(positions, config, draw);
    for (int m = 0; m < config.n_users; ++m) {
      ComplexMatrix cov = ComplexMatrix::Identity(config.n_antennas, config.n_antennas);
      for (int i = 0; i < config.n_users; ++i) {
        if (i == m) continue;
        const ComplexVector& h = channel.combined.col(i);
        cov.noalias() += config.power_ratio[i] * (h * h.adjoint());
      }
      const ComplexVector& h = channel.combined.col(m);
      const Real quad = checked_real(h.dot(cov.llt().solve(h)));
      total += log2_1p(config.power_ratio[m] * quad);
    }
  }
  return total / samples.count();
}

RealVector mmse_saa_grad(const AntennaPositions& positions, const SystemConfig& config,
                         const MmseSampleSet& samples) {
  if (samples.count() == 0) throw EmptySampleSet("MMSE sample set is empty");
  const int n = config.n_antennas;
  const int m_users = config.n_users;

  // Channel-entry slopes for every (antenna, user) pair, reused across draws.
  ComplexMatrix slope(n, m_users);
  for (int antenna = 0; antenna < n; ++antenna) {
    slope.row(antenna) =
        steering_derivatives(positions.coords[antenna], config).channel_slope.transpose();
  }

  ComplexVector grad = ComplexVector::Zero(n);
  for (const ComplexMatrix& draw : samples.draws) {
    const ChannelRealization channel = assemble_channel(positions, config, draw);
    for (int m = 0; m < m_users; ++m) {
      ComplexMatrix cov = ComplexMatrix::Identity(n, n);
      for (int i = 0; i < m_users; ++i) {
        if (i == m) continue;
        const ComplexVector& h = channel.combined.col(i);
        cov.noalias() += config.power_ratio[i] * (h * h.adjoint());
      }
      const ComplexVector& h = channel.combined.col(m);
      const ComplexVector solved = cov.llt().solve(h);
      const Real quad = checked_real(h.dot(solved));
      const Real prefactor =
          config.power_ratio[m] / (1.0 + config.power_ratio[m] * quad);

      // Cross terms between the solved direction and each interferer, for
      // the covariance-inverse derivative.
      ComplexVector cross(m_users);
      for (int i = 0; i < m_users; ++i) {
        cross[i] = (i == m) ? Complex(0) : channel.combined.col(i).dot(solved);
      }

      for (int antenna = 0; antenna < n; ++antenna) {
        const Complex v = solved[antenna];
        // Direct movement of the desired channel entry.
        Complex dquad = std::conj(slope(antenna, m)) * v + slope(antenna, m) * std::conj(v);
        // Movement of the interference covariance.
        for (int i = 0; i < m_users; ++i) {
          if (i == m) continue;
          const Complex t =
              config.power_ratio[i] * slope(antenna, i) * std::conj(v) * cross[i];
          dquad -= t + std::conj(t);
        }
        grad[antenna] += prefactor * dquad;
      }
    }
  }
  RealVector out(n);
  for (int antenna = 0; antenna < n; ++antenna) {
    out[antenna] = checked_real(grad[antenna]) / (samples.count() * kLn2);
  }
  return out;
}

Real sic_bound_objective(const AntennaPositions& positions, const SystemConfig& config) {
  const SicBoundContext ctx = make_sic_bound_context(positions, config);
  const RealVector diag = ctx.outer_llt.matrixLLT().diagonal().real();
  return 2.0 * diag.array().log().sum() / kLn2;
}

RealVector sic_bound_grad(const AntennaPositions& positions, const SystemConfig& config) {
  const int n = config.n_antennas;
  const SicBoundContext ctx = make_sic_bound_context(positions, config);
  const ComplexMatrix los = los_matrix(positions, config);
  const RealVector mix2 = (config.power_ratio.array() * config.rician_k.array() *
                           config.path_loss.array() / (config.rician_k.array() + 1))
                              .matrix();

  // Whitened steering columns; the trace terms reduce to their entries.
  ComplexMatrix solved(n, config.n_users);
  for (int m = 0; m < config.n_users; ++m) {
    solved.col(m) = ctx.outer_llt.solve(los.col(m));
  }

  RealVector grad(n);
  for (int antenna = 0; antenna < n; ++antenna) {
    const SteeringDerivatives sd = steering_derivatives(positions.coords[antenna], config);
    Complex total = 0;
    for (int m = 0; m < config.n_users; ++m) {
      const Complex t = sd.los_slope[m] * std::conj(solved(antenna, m));
      total += mix2[m] * (t + std::conj(t));
    }
    grad[antenna] = checked_real(total) / kLn2;
  }
  return grad;
}

RealVector finite_difference_gradient(const std::function<Real(const AntennaPositions&)>& f,
                                      const AntennaPositions& positions, Real step) {
  if (!(step > 0)) throw std::invalid_argument("finite-difference step must be > 0");
  RealVector grad(positions.size());
  AntennaPositions probe = positions;
  for (int n = 0; n < positions.size(); ++n) {
    const Real base = positions.coords[n];
    probe.coords[n] = base + step;
    const Real up = f(probe);
    probe.coords[n] = base - step;
    const Real down = f(probe);
    probe.coords[n] = base;
    grad[n] = (up - down) / (2.0 * step);
  }
  return grad;
}

SurrogateObjective zf_objective(const SystemConfig& config) {
  SurrogateObjective obj;
  obj.name = "zf-approx";
  obj.span = config.span;
  obj.min_spacing = config.min_spacing;
  obj.value = [config](const AntennaPositions& x) { return zf_surrogate(x, config); };
  obj.gradient = [config](const AntennaPositions& x) { return zf_surrogate_grad(x, config); };
  return obj;
}

SurrogateObjective mmse_objective(const SystemConfig& config, MmseSampleSet samples) {
  auto shared = std::make_shared<const MmseSampleSet>(std::move(samples));
  SurrogateObjective obj;
  obj.name = "mmse-saa";
  obj.span = config.span;
  obj.min_spacing = config.min_spacing;
  obj.value = [config, shared](const AntennaPositions& x) {
    return mmse_saa_objective(x, config, *shared);
  };
  obj.gradient = [config, shared](const AntennaPositions& x) {
    return mmse_saa_grad(x, config, *shared);
  };
  return obj;
}

SurrogateObjective sic_objective(const SystemConfig& config) {
  SurrogateObjective obj;
  obj.name = "sic-bound";
  obj.span = config.span;
  obj.min_spacing = config.min_spacing;
  obj.value = [config](const AntennaPositions& x) { return sic_bound_objective(x, config); };
  obj.gradient = [config](const AntennaPositions& x) { return sic_bound_grad(x, config); };
  return obj;
}

}  // namespace maopt
