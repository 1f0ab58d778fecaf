#include "maopt/optimizer.hpp"

#include <algorithm>
#include <cmath>

namespace maopt {

void PgaOptions::validate() const {
  if (!(initial_step > 0)) throw std::invalid_argument("initial_step must be > 0");
  if (!(shrink > 0 && shrink < 1)) throw std::invalid_argument("shrink must be in (0, 1)");
  if (!(min_step > 0 && min_step < initial_step)) {
    throw std::invalid_argument("min_step must be in (0, initial_step)");
  }
  if (max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");
  if (!(value_tolerance > 0)) throw std::invalid_argument("value_tolerance must be > 0");
}

const char* stop_reason_name(StopReason reason) {
  switch (reason) {
    case StopReason::ValueTolerance: return "value-tolerance";
    case StopReason::MaxIterations: return "max-iterations";
    case StopReason::StepFloor: return "step-floor";
  }
  return "?";
}

AntennaPositions project(const RealVector& raw, Real span, Real min_spacing) {
  const int n = static_cast<int>(raw.size());
  if (span < (n - 1) * min_spacing) {
    throw InfeasibleGeometry("span cannot hold " + std::to_string(n) +
                             " antennas at the requested spacing");
  }
  RealVector x = raw;
  x[0] = std::max(Real(0), std::min(span - (n - 1) * min_spacing, x[0]));
  for (int k = 1; k < n; ++k) {
    const Real head_room = span - (n - 1 - k) * min_spacing;
    x[k] = std::max(x[k - 1] + min_spacing, std::min(head_room, x[k]));
  }
  return AntennaPositions(std::move(x));
}

OptimizationTrace pga_optimize(const SurrogateObjective& objective,
                               const AntennaPositions& start, const PgaOptions& options) {
  options.validate();
  if (!is_feasible(start, objective.span, objective.min_spacing, 1e-9)) {
    throw std::invalid_argument("pga_optimize start point is infeasible");
  }

  OptimizationTrace trace;
  AntennaPositions current = start;
  Real value = objective.value(current);
  trace.iterates.push_back({current, value, 0.0});

  for (int iteration = 0; iteration < options.max_iterations; ++iteration) {
    const RealVector grad = objective.gradient(current);

    Real step = options.initial_step;
    bool accepted = false;
    while (step >= options.min_step) {
      AntennaPositions candidate =
          project(current.coords + step * grad, objective.span, objective.min_spacing);
      const Real candidate_value = objective.value(candidate);
      if (candidate_value > value) {
        const Real improvement = candidate_value - value;
        current = std::move(candidate);
        value = candidate_value;
        trace.iterates.push_back({current, value, step});
        accepted = true;
        if (improvement < options.value_tolerance) {
          trace.converged = true;
          trace.stop_reason = StopReason::ValueTolerance;
          return trace;
        }
        break;
      }
      step *= options.shrink;
    }
    if (!accepted) {
      // No ascent direction at any admissible step; treat as converged.
      trace.converged = true;
      trace.stop_reason = StopReason::StepFloor;
      return trace;
    }
  }
  trace.converged = false;
  trace.stop_reason = StopReason::MaxIterations;
  return trace;
}

AntennaPositions uniform_start(int n_antennas, Real span, Real min_spacing) {
  if (span < (n_antennas - 1) * min_spacing) {
    throw InfeasibleGeometry("span cannot hold the uniform starting layout");
  }
  RealVector x(n_antennas);
  for (int n = 0; n < n_antennas; ++n) x[n] = n * min_spacing;
  return AntennaPositions(std::move(x));
}

OptimizationTrace multi_start(const SurrogateObjective& objective, const SystemConfig& config,
                              const PgaOptions& options, int n_starts,
                              const RandomStream& stream) {
  if (n_starts < 1) throw std::invalid_argument("n_starts must be >= 1");

  OptimizationTrace best = pga_optimize(
      objective, uniform_start(config.n_antennas, config.span, config.min_spacing), options);
  for (int k = 1; k < n_starts; ++k) {
    RealVector raw = sample_uniform(stream.substream(k), config.n_antennas, 0.0, config.span);
    std::sort(raw.begin(), raw.end());
    const AntennaPositions start = project(raw, config.span, config.min_spacing);
    OptimizationTrace candidate = pga_optimize(objective, start, options);
    if (candidate.final_point().objective > best.final_point().objective) {
      best = std::move(candidate);
    }
  }
  return best;
}

}  // namespace maopt
