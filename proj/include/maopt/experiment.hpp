#pragma once

#include "maopt/montecarlo.hpp"
#include "maopt/optimizer.hpp"

#include <nlohmann/json_fwd.hpp>

#include <string>
#include <utility>
#include <vector>

namespace maopt {

enum class Layout { Ma, Fpa };

const char* layout_name(Layout layout);
Layout layout_from_name(const std::string& name);

enum class SweepKind { None, Span, Antennas };

/// Full description of one experiment: scenario, sweep grid, schemes,
/// seeds, and optimizer controls. Round-trips through JSON losslessly.
struct ExperimentSpec {
  SystemConfig config;
  SweepKind sweep_kind = SweepKind::None;
  std::vector<Real> sweep_values;
  std::vector<ReceiverKind> receivers;
  std::vector<Layout> layouts;
  std::uint64_t eval_seed = 1;
  std::uint64_t opt_seed = 2;
  int opt_samples = 100;     // draws behind the sample-average MMSE objective
  int eval_samples = 10000;  // Monte Carlo draws per ergodic-rate estimate
  PgaOptions pga;
  int n_starts = 1;

  friend bool operator==(const ExperimentSpec&, const ExperimentSpec&);
};

/// Stock scenario: five users at fixed angles, 15 dB per-user power over
/// noise, K-factor 10, unit path loss, half-wavelength minimum spacing,
/// ten antennas over an eight-wavelength span.
ExperimentSpec default_spec();

/// Strict parser over flat keys; unknown keys are errors. Scalar per-user
/// entries broadcast across users; power may be given in dB (power_db) or
/// linear (power_ratio).
ExperimentSpec parse_spec(const nlohmann::json& j);
ExperimentSpec parse_spec_file(const std::string& path);

/// Canonical emission; parse_spec(emit_spec(s)) == s.
nlohmann::json emit_spec(const ExperimentSpec& spec);

/// One evaluated scheme at one grid point.
struct ResultRow {
  Layout layout = Layout::Ma;
  ReceiverKind receiver = ReceiverKind::Zf;
  int n_antennas = 0;
  Real span = 0;
  AntennaPositions positions;
  Real surrogate_value = 0;
  Real ergodic_mean = 0;
  Real ergodic_stderr = 0;
  int iterations = 0;
  Real wall_time_s = 0;  // informational; never written to the CSV
  std::uint64_t seed = 0;
};

/// Ergodic rate versus span at fixed antenna count. Fixed-array rows do not
/// depend on the span and are identical across grid points.
std::vector<ResultRow> run_sweep_span(const ExperimentSpec& spec);

/// Ergodic rate versus antenna count at fixed span.
std::vector<ResultRow> run_sweep_antennas(const ExperimentSpec& spec);

struct SingleRunResult {
  std::vector<ResultRow> rows;
  std::vector<std::pair<ReceiverKind, OptimizationTrace>> traces;  // one per MA row
};

/// One optimization plus evaluation at the base scenario.
SingleRunResult run_single(const ExperimentSpec& spec);

struct GradCheckEntry {
  std::string objective;
  Real max_rel_error = 0;
  int trials = 0;
};

/// Randomized comparison of every analytic gradient against central finite
/// differences, plus a single-user sanity trial whose analytic gradient must
/// vanish. Deterministic given the optimization seed.
struct GradCheckReport {
  std::vector<GradCheckEntry> entries;
  Real single_user_zf_grad_norm = 0;
  bool passed = false;
};

GradCheckReport run_grad_check(const ExperimentSpec& spec);

/// CSV with the fixed column set, 12 significant digits, positions joined
/// by semicolons. Byte-identical across runs of the same spec.
std::string csv_from_rows(const std::vector<ResultRow>& rows);

/// CSV for one optimization trace: iteration, objective, step, positions.
std::string csv_from_trace(const OptimizationTrace& trace);

/// Replay sidecar: resolved spec, seeds, generator name, library version.
nlohmann::json metadata_json(const ExperimentSpec& spec, Real wall_time_s);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace maopt
