#pragma once

#include "maopt/objectives.hpp"

#include <vector>

namespace maopt {

/// Projected-gradient-ascent controls. Defaults are the library's standard
/// operating point and are recorded in experiment metadata.
struct PgaOptions {
  Real initial_step = 0.1;      // step size each iteration starts from, wavelengths
  Real shrink = 0.5;            // backtracking factor, in (0, 1)
  Real min_step = 1e-8;         // line search gives up below this step
  int max_iterations = 1000;
  Real value_tolerance = 1e-5;  // stop once an accepted improvement is smaller

  void validate() const;
};

enum class StopReason { ValueTolerance, MaxIterations, StepFloor };

const char* stop_reason_name(StopReason reason);

struct TracePoint {
  AntennaPositions positions;
  Real objective;
  Real step;  // accepted step size; 0 for the starting point
};

/// Iterate history of one ascent run. Objective values are non-decreasing
/// along the trace by construction.
struct OptimizationTrace {
  std::vector<TracePoint> iterates;
  bool converged = false;
  StopReason stop_reason = StopReason::MaxIterations;

  const TracePoint& final_point() const { return iterates.back(); }
  int iterations() const { return static_cast<int>(iterates.size()) - 1; }
};

/// Clamps an arbitrary coordinate vector onto the feasible set by the
/// nearest-distance rule: sweep left to right, boxing each coordinate
/// between its predecessor plus the minimum spacing and the largest value
/// that still leaves room for the remaining antennas.
AntennaPositions project(const RealVector& raw, Real span, Real min_spacing);

/// Gradient ascent with projection and a backtracking line search: a
/// candidate is accepted only when it strictly improves the objective, the
/// step shrinks on rejection, and resets after every accepted iteration.
OptimizationTrace pga_optimize(const SurrogateObjective& objective,
                               const AntennaPositions& start, const PgaOptions& options);

/// Evenly spaced layout at exactly min_spacing, anchored at zero; the
/// optimizer's default starting point.
AntennaPositions uniform_start(int n_antennas, Real span, Real min_spacing);

/// Runs pga_optimize from the uniform start plus (n_starts - 1) random
/// feasible starts and keeps the best final objective. Deterministic given
/// the stream.
OptimizationTrace multi_start(const SurrogateObjective& objective, const SystemConfig& config,
                              const PgaOptions& options, int n_starts,
                              const RandomStream& stream);

}  // namespace maopt
