#include "maopt/experiment.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace maopt {

using nlohmann::json;

namespace {

/// Stable stream label from a role name and two integers. Keeps every
/// randomized stage of an experiment on its own substream so that rows do
/// not depend on which other rows are computed.
std::uint64_t stream_tag(const std::string& role, std::uint64_t a, std::uint64_t b) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix_byte = [&h](unsigned char byte) {
    h ^= byte;
    h *= 1099511628211ULL;
  };
  for (char c : role) mix_byte(static_cast<unsigned char>(c));
  for (int i = 0; i < 8; ++i) mix_byte(static_cast<unsigned char>(a >> (8 * i)));
  for (int i = 0; i < 8; ++i) mix_byte(static_cast<unsigned char>(b >> (8 * i)));
  return h;
}

std::string format_real(Real v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string format_positions(const AntennaPositions& positions) {
  std::string out;
  for (int n = 0; n < positions.size(); ++n) {
    if (n > 0) out += ';';
    out += format_real(positions.coords[n]);
  }
  return out;
}

RealVector per_user_field(const json& j, const char* key, int n_users,
                          const RealVector& fallback) {
  if (!j.contains(key)) {
    if (fallback.size() != n_users) {
      throw std::invalid_argument(std::string("'") + key +
                                  "' must be given explicitly for this n_users");
    }
    return fallback;
  }
  const json& v = j.at(key);
  if (v.is_number()) {
    return RealVector::Constant(n_users, v.get<Real>());
  }
  if (v.is_array()) {
    if (static_cast<int>(v.size()) != n_users) {
      throw std::invalid_argument(std::string("'") + key + "' must have n_users entries");
    }
    RealVector out(n_users);
    for (int i = 0; i < n_users; ++i) out[i] = v.at(i).get<Real>();
    return out;
  }
  throw std::invalid_argument(std::string("'") + key + "' must be a number or an array");
}

std::uint64_t seed_field(const json& j, const char* key, std::uint64_t fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number_unsigned()) {
    throw std::invalid_argument(std::string("'") + key + "' must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

const char* sweep_kind_name(SweepKind kind) {
  switch (kind) {
    case SweepKind::None: return "none";
    case SweepKind::Span: return "span";
    case SweepKind::Antennas: return "antennas";
  }
  return "?";
}

SweepKind sweep_kind_from_name(const std::string& name) {
  if (name == "none") return SweepKind::None;
  if (name == "span") return SweepKind::Span;
  if (name == "antennas") return SweepKind::Antennas;
  throw std::invalid_argument("unknown sweep_kind '" + name + "'");
}

SurrogateObjective make_surrogate(ReceiverKind kind, const SystemConfig& config,
                                  const ExperimentSpec& spec) {
  switch (kind) {
    case ReceiverKind::Zf:
      return zf_objective(config);
    case ReceiverKind::Mmse: {
      const RandomStream stream(
          spec.opt_seed,
          stream_tag("saa", static_cast<std::uint64_t>(kind), config.n_antennas));
      return mmse_objective(config, draw_mmse_samples(config, spec.opt_samples, stream));
    }
    case ReceiverKind::MmseSic:
      return sic_objective(config);
  }
  throw std::logic_error("unreachable receiver kind");
}

/// All scheme rows at one grid point. Evaluation streams are keyed by
/// (receiver, antenna count) only, so fixed-array rows are reproduced
/// identically at every span and movable rows at the same antenna count
/// share channel draws across spans.
void evaluate_point(const ExperimentSpec& spec, const SystemConfig& config,
                    std::vector<ResultRow>* rows,
                    std::vector<std::pair<ReceiverKind, OptimizationTrace>>* traces) {
  config.validate();
  for (ReceiverKind receiver : spec.receivers) {
    const auto receiver_code = static_cast<std::uint64_t>(receiver);
    const RandomStream eval_stream(spec.eval_seed,
                                   stream_tag("eval", receiver_code, config.n_antennas));
    const SurrogateObjective objective = make_surrogate(receiver, config, spec);
    for (Layout layout : spec.layouts) {
      const auto started = std::chrono::steady_clock::now();
      ResultRow row;
      row.layout = layout;
      row.receiver = receiver;
      row.n_antennas = config.n_antennas;
      row.span = config.span;
      row.seed = spec.eval_seed;
      if (layout == Layout::Fpa) {
        row.positions = fpa_positions(config);
        row.surrogate_value = objective.value(row.positions);
        row.iterations = 0;
      } else {
        const RandomStream start_stream(
            spec.opt_seed, stream_tag("start", receiver_code, config.n_antennas));
        OptimizationTrace trace =
            multi_start(objective, config, spec.pga, spec.n_starts, start_stream);
        row.positions = trace.final_point().positions;
        row.surrogate_value = trace.final_point().objective;
        row.iterations = trace.iterations();
        if (traces != nullptr) traces->emplace_back(receiver, std::move(trace));
      }
      const ErgodicEstimate estimate = ergodic_sum_rate(
          row.positions, config, receiver, spec.eval_samples, eval_stream);
      row.ergodic_mean = estimate.mean;
      row.ergodic_stderr = estimate.std_error;
      row.wall_time_s =
          std::chrono::duration<Real>(std::chrono::steady_clock::now() - started).count();
      rows->push_back(std::move(row));
    }
  }
}

/// Compact scenario sampler for gradient checks: small arrays, two or three
/// users, angles away from broadside extremes, mixed powers and K-factors.
SystemConfig random_scenario(const RandomStream& stream) {
  const RealVector u = sample_uniform(stream, 16, 0.0, 1.0);
  SystemConfig config;
  config.n_antennas = 4 + static_cast<int>(u[0] * 5.0);  // 4..8
  config.n_users = (u[1] < 0.5) ? 2 : 3;
  config.min_spacing = 0.5;
  config.wavelength = 1.0;
  config.span = (config.n_antennas - 1) * 0.5 + 1.0 + 2.0 * u[2];
  config.angle.resize(config.n_users);
  config.rician_k.resize(config.n_users);
  config.path_loss.resize(config.n_users);
  config.power_ratio.resize(config.n_users);
  for (int m = 0; m < config.n_users; ++m) {
    config.angle[m] = 0.05 + u[3 + m] * (kPi / 2 - 0.1);
    config.rician_k[m] = 1.0 + 19.0 * u[6 + m];
    config.path_loss[m] = 0.5 + 1.5 * u[9 + m];
    config.power_ratio[m] = std::pow(10.0, (5.0 + 15.0 * u[12 + m]) / 10.0);
  }
  config.validate();
  return config;
}

AntennaPositions random_feasible_positions(const SystemConfig& config,
                                           const RandomStream& stream) {
  RealVector raw = sample_uniform(stream, config.n_antennas, 0.0, config.span);
  std::sort(raw.begin(), raw.end());
  return project(raw, config.span, config.min_spacing);
}

Real max_component_rel_error(const RealVector& analytic, const RealVector& numeric) {
  Real worst = 0;
  for (Eigen::Index i = 0; i < analytic.size(); ++i) {
    const Real denom =
        std::max({std::abs(analytic[i]), std::abs(numeric[i]), Real(1e-8)});
    worst = std::max(worst, std::abs(analytic[i] - numeric[i]) / denom);
  }
  return worst;
}

}  // namespace

const char* layout_name(Layout layout) {
  return layout == Layout::Ma ? "ma" : "fpa";
}

Layout layout_from_name(const std::string& name) {
  if (name == "ma") return Layout::Ma;
  if (name == "fpa") return Layout::Fpa;
  throw std::invalid_argument("unknown layout '" + name + "' (expected ma or fpa)");
}

namespace {
bool exact_equal(const RealVector& a, const RealVector& b) {
  return a.size() == b.size() && (a.array() == b.array()).all();
}
}  // namespace

bool operator==(const ExperimentSpec& a, const ExperimentSpec& b) {
  return a.config.n_antennas == b.config.n_antennas &&
         a.config.n_users == b.config.n_users && a.config.span == b.config.span &&
         a.config.min_spacing == b.config.min_spacing &&
         a.config.wavelength == b.config.wavelength &&
         exact_equal(a.config.power_ratio, b.config.power_ratio) &&
         exact_equal(a.config.rician_k, b.config.rician_k) &&
         exact_equal(a.config.path_loss, b.config.path_loss) &&
         exact_equal(a.config.angle, b.config.angle) &&
         a.sweep_kind == b.sweep_kind && a.sweep_values == b.sweep_values &&
         a.receivers == b.receivers && a.layouts == b.layouts &&
         a.eval_seed == b.eval_seed && a.opt_seed == b.opt_seed &&
         a.opt_samples == b.opt_samples && a.eval_samples == b.eval_samples &&
         a.pga.initial_step == b.pga.initial_step && a.pga.shrink == b.pga.shrink &&
         a.pga.min_step == b.pga.min_step &&
         a.pga.max_iterations == b.pga.max_iterations &&
         a.pga.value_tolerance == b.pga.value_tolerance && a.n_starts == b.n_starts;
}

ExperimentSpec default_spec() {
  ExperimentSpec spec;
  spec.config.n_antennas = 10;
  spec.config.n_users = 5;
  spec.config.span = 8.0;
  spec.config.min_spacing = 0.5;
  spec.config.wavelength = 1.0;
  spec.config.power_ratio = RealVector::Constant(5, std::pow(10.0, 1.5));
  spec.config.rician_k = RealVector::Constant(5, 10.0);
  spec.config.path_loss = RealVector::Constant(5, 1.0);
  spec.config.angle.resize(5);
  spec.config.angle << 0.0542, 0.8186, 0.9386, 0.2841, 0.1805;
  spec.receivers = {ReceiverKind::Zf, ReceiverKind::Mmse, ReceiverKind::MmseSic};
  spec.layouts = {Layout::Ma, Layout::Fpa};
  return spec;
}

ExperimentSpec parse_spec(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("config root must be a JSON object");
  static const std::set<std::string> known = {
      "n_antennas",     "n_users",          "span",
      "min_spacing",    "wavelength",       "power_db",
      "power_ratio",    "rician_k",         "path_loss",
      "angle",          "sweep_kind",       "sweep_values",
      "receivers",      "layouts",          "eval_seed",
      "opt_seed",       "opt_samples",      "eval_samples",
      "pga_initial_step", "pga_shrink",     "pga_min_step",
      "pga_max_iterations", "pga_value_tolerance", "n_starts"};
  for (const auto& item : j.items()) {
    if (known.find(item.key()) == known.end()) {
      throw std::invalid_argument("unknown config key '" + item.key() + "'");
    }
  }

  ExperimentSpec spec = default_spec();

  int n_users = spec.config.n_users;
  if (j.contains("n_users")) {
    n_users = j.at("n_users").get<int>();
  } else if (j.contains("angle") && j.at("angle").is_array()) {
    n_users = static_cast<int>(j.at("angle").size());
  }
  spec.config.n_users = n_users;

  const RealVector default_angle =
      (n_users == 5) ? spec.config.angle : RealVector();
  spec.config.angle = per_user_field(j, "angle", n_users, default_angle);
  spec.config.rician_k =
      per_user_field(j, "rician_k", n_users, RealVector::Constant(n_users, 10.0));
  spec.config.path_loss =
      per_user_field(j, "path_loss", n_users, RealVector::Constant(n_users, 1.0));

  if (j.contains("power_db") && j.contains("power_ratio")) {
    throw std::invalid_argument("give either power_db or power_ratio, not both");
  }
  if (j.contains("power_db")) {
    const RealVector db = per_user_field(j, "power_db", n_users, RealVector());
    spec.config.power_ratio =
        db.unaryExpr([](Real v) { return std::pow(10.0, v / 10.0); });
  } else {
    spec.config.power_ratio =
        per_user_field(j, "power_ratio", n_users,
                       RealVector::Constant(n_users, std::pow(10.0, 1.5)));
  }

  if (j.contains("n_antennas")) spec.config.n_antennas = j.at("n_antennas").get<int>();
  if (j.contains("span")) spec.config.span = j.at("span").get<Real>();
  if (j.contains("min_spacing")) spec.config.min_spacing = j.at("min_spacing").get<Real>();
  if (j.contains("wavelength")) spec.config.wavelength = j.at("wavelength").get<Real>();

  if (j.contains("sweep_kind")) {
    spec.sweep_kind = sweep_kind_from_name(j.at("sweep_kind").get<std::string>());
  }
  if (j.contains("sweep_values")) {
    spec.sweep_values.clear();
    for (const auto& v : j.at("sweep_values")) spec.sweep_values.push_back(v.get<Real>());
  }
  if (j.contains("receivers")) {
    spec.receivers.clear();
    for (const auto& v : j.at("receivers")) {
      spec.receivers.push_back(receiver_from_name(v.get<std::string>()));
    }
    if (spec.receivers.empty()) throw std::invalid_argument("receivers must be non-empty");
  }
  if (j.contains("layouts")) {
    spec.layouts.clear();
    for (const auto& v : j.at("layouts")) {
      spec.layouts.push_back(layout_from_name(v.get<std::string>()));
    }
    if (spec.layouts.empty()) throw std::invalid_argument("layouts must be non-empty");
  }

  spec.eval_seed = seed_field(j, "eval_seed", spec.eval_seed);
  spec.opt_seed = seed_field(j, "opt_seed", spec.opt_seed);
  if (j.contains("opt_samples")) spec.opt_samples = j.at("opt_samples").get<int>();
  if (j.contains("eval_samples")) spec.eval_samples = j.at("eval_samples").get<int>();
  if (spec.opt_samples < 1) throw std::invalid_argument("opt_samples must be >= 1");
  if (spec.eval_samples < 1) throw std::invalid_argument("eval_samples must be >= 1");

  if (j.contains("pga_initial_step")) spec.pga.initial_step = j.at("pga_initial_step").get<Real>();
  if (j.contains("pga_shrink")) spec.pga.shrink = j.at("pga_shrink").get<Real>();
  if (j.contains("pga_min_step")) spec.pga.min_step = j.at("pga_min_step").get<Real>();
  if (j.contains("pga_max_iterations")) spec.pga.max_iterations = j.at("pga_max_iterations").get<int>();
  if (j.contains("pga_value_tolerance")) spec.pga.value_tolerance = j.at("pga_value_tolerance").get<Real>();
  if (j.contains("n_starts")) spec.n_starts = j.at("n_starts").get<int>();
  if (spec.n_starts < 1) throw std::invalid_argument("n_starts must be >= 1");

  spec.pga.validate();
  spec.config.validate();
  if (spec.sweep_kind != SweepKind::None && spec.sweep_values.empty()) {
    throw std::invalid_argument("sweep_values must be non-empty when sweep_kind is set");
  }
  return spec;
}

ExperimentSpec parse_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::invalid_argument("config parse error in '" + path + "': " + e.what());
  }
  return parse_spec(j);
}

json emit_spec(const ExperimentSpec& spec) {
  json j;
  j["n_antennas"] = spec.config.n_antennas;
  j["n_users"] = spec.config.n_users;
  j["span"] = spec.config.span;
  j["min_spacing"] = spec.config.min_spacing;
  j["wavelength"] = spec.config.wavelength;
  j["power_ratio"] = std::vector<Real>(spec.config.power_ratio.begin(),
                                       spec.config.power_ratio.end());
  j["rician_k"] =
      std::vector<Real>(spec.config.rician_k.begin(), spec.config.rician_k.end());
  j["path_loss"] =
      std::vector<Real>(spec.config.path_loss.begin(), spec.config.path_loss.end());
  j["angle"] = std::vector<Real>(spec.config.angle.begin(), spec.config.angle.end());
  j["sweep_kind"] = sweep_kind_name(spec.sweep_kind);
  j["sweep_values"] = spec.sweep_values;
  std::vector<std::string> receiver_names;
  for (ReceiverKind r : spec.receivers) receiver_names.emplace_back(receiver_name(r));
  j["receivers"] = receiver_names;
  std::vector<std::string> layout_names;
  for (Layout l : spec.layouts) layout_names.emplace_back(layout_name(l));
  j["layouts"] = layout_names;
  j["eval_seed"] = spec.eval_seed;
  j["opt_seed"] = spec.opt_seed;
  j["opt_samples"] = spec.opt_samples;
  j["eval_samples"] = spec.eval_samples;
  j["pga_initial_step"] = spec.pga.initial_step;
  j["pga_shrink"] = spec.pga.shrink;
  j["pga_min_step"] = spec.pga.min_step;
  j["pga_max_iterations"] = spec.pga.max_iterations;
  j["pga_value_tolerance"] = spec.pga.value_tolerance;
  j["n_starts"] = spec.n_starts;
  return j;
}

std::vector<ResultRow> run_sweep_span(const ExperimentSpec& spec) {
  if (spec.sweep_kind != SweepKind::Span) {
    throw std::invalid_argument("run_sweep_span needs sweep_kind = span");
  }
  if (spec.sweep_values.empty()) throw std::invalid_argument("sweep_values is empty");
  for (Real span : spec.sweep_values) {
    if (span < (spec.config.n_antennas - 1) * spec.config.min_spacing) {
      throw InfeasibleGeometry("sweep span " + format_real(span) +
                               " cannot hold the configured antennas");
    }
  }
  std::vector<ResultRow> rows;
  for (Real span : spec.sweep_values) {
    SystemConfig config = spec.config;
    config.span = span;
    evaluate_point(spec, config, &rows, nullptr);
  }
  return rows;
}

std::vector<ResultRow> run_sweep_antennas(const ExperimentSpec& spec) {
  if (spec.sweep_kind != SweepKind::Antennas) {
    throw std::invalid_argument("run_sweep_antennas needs sweep_kind = antennas");
  }
  if (spec.sweep_values.empty()) throw std::invalid_argument("sweep_values is empty");
  for (Real value : spec.sweep_values) {
    if (value < 1 || value != std::floor(value)) {
      throw std::invalid_argument("antenna sweep values must be positive integers");
    }
    if ((value - 1) * spec.config.min_spacing > spec.config.span) {
      throw InfeasibleGeometry("antenna count " + format_real(value) +
                               " does not fit the configured span");
    }
  }
  std::vector<ResultRow> rows;
  for (Real value : spec.sweep_values) {
    SystemConfig config = spec.config;
    config.n_antennas = static_cast<int>(value);
    evaluate_point(spec, config, &rows, nullptr);
  }
  return rows;
}

SingleRunResult run_single(const ExperimentSpec& spec) {
  if (spec.sweep_kind != SweepKind::None) {
    throw std::invalid_argument("run_single needs sweep_kind = none");
  }
  SingleRunResult result;
  evaluate_point(spec, spec.config, &result.rows, &result.traces);
  return result;
}

GradCheckReport run_grad_check(const ExperimentSpec& spec) {
  constexpr int kTrials = 20;
  constexpr Real kStep = 1e-6;
  constexpr Real kGate = 1e-4;
  const RandomStream root(spec.opt_seed, stream_tag("gradcheck", 0, 0));

  GradCheckReport report;
  int objective_index = 0;
  for (ReceiverKind receiver : spec.receivers) {
    GradCheckEntry entry;
    entry.trials = kTrials;
    for (int trial = 0; trial < kTrials; ++trial) {
      const RandomStream trial_stream = root.substream(objective_index * 1024 + trial);
      SystemConfig config = random_scenario(trial_stream.substream(0));
      const AntennaPositions x = random_feasible_positions(config, trial_stream.substream(1));
      RealVector analytic;
      RealVector numeric;
      switch (receiver) {
        case ReceiverKind::Zf: {
          entry.objective = "zf-approx";
          analytic = zf_surrogate_grad(x, config);
          numeric = finite_difference_gradient(
              [&config](const AntennaPositions& p) { return zf_surrogate(p, config); }, x,
              kStep);
          break;
        }
        case ReceiverKind::Mmse: {
          entry.objective = "mmse-saa";
          const MmseSampleSet samples =
              draw_mmse_samples(config, 4, trial_stream.substream(2));
          analytic = mmse_saa_grad(x, config, samples);
          numeric = finite_difference_gradient(
              [&config, &samples](const AntennaPositions& p) {
                return mmse_saa_objective(p, config, samples);
              },
              x, kStep);
          break;
        }
        case ReceiverKind::MmseSic: {
          entry.objective = "sic-bound";
          analytic = sic_bound_grad(x, config);
          numeric = finite_difference_gradient(
              [&config](const AntennaPositions& p) {
                return sic_bound_objective(p, config);
              },
              x, kStep);
          break;
        }
      }
      entry.max_rel_error =
          std::max(entry.max_rel_error, max_component_rel_error(analytic, numeric));
    }
    report.entries.push_back(std::move(entry));
    ++objective_index;
  }

  // One-user sanity: the zero-forcing surrogate is position-independent, so
  // its analytic gradient must vanish identically.
  {
    SystemConfig config = random_scenario(root.substream(999));
    config.n_users = 1;
    config.angle = config.angle.head(1).eval();
    config.rician_k = config.rician_k.head(1).eval();
    config.path_loss = config.path_loss.head(1).eval();
    config.power_ratio = config.power_ratio.head(1).eval();
    const AntennaPositions x = random_feasible_positions(config, root.substream(998));
    report.single_user_zf_grad_norm = zf_surrogate_grad(x, config).norm();
  }

  report.passed = report.single_user_zf_grad_norm < 1e-10;
  for (const GradCheckEntry& entry : report.entries) {
    if (!(entry.max_rel_error < kGate)) report.passed = false;
  }
  return report;
}

std::string csv_from_rows(const std::vector<ResultRow>& rows) {
  std::string out =
      "layout,receiver,n_antennas,span,ergodic_mean,ergodic_stderr,"
      "surrogate_value,iterations,positions,seed\n";
  for (const ResultRow& row : rows) {
    out += layout_name(row.layout);
    out += ',';
    out += receiver_name(row.receiver);
    out += ',';
    out += std::to_string(row.n_antennas);
    out += ',';
    out += format_real(row.span);
    out += ',';
    out += format_real(row.ergodic_mean);
    out += ',';
    out += format_real(row.ergodic_stderr);
    out += ',';
    out += format_real(row.surrogate_value);
    out += ',';
    out += std::to_string(row.iterations);
    out += ',';
    out += format_positions(row.positions);
    out += ',';
    out += std::to_string(row.seed);
    out += '\n';
  }
  return out;
}

std::string csv_from_trace(const OptimizationTrace& trace) {
  std::string out = "iteration,objective,step,positions\n";
  for (std::size_t i = 0; i < trace.iterates.size(); ++i) {
    const TracePoint& point = trace.iterates[i];
    out += std::to_string(i);
    out += ',';
    out += format_real(point.objective);
    out += ',';
    out += format_real(point.step);
    out += ',';
    out += format_positions(point.positions);
    out += '\n';
  }
  return out;
}

json metadata_json(const ExperimentSpec& spec, Real wall_time_s) {
  json j;
  j["library"] = "maopt";
  j["version"] = kVersion;
  j["generator"] = kGeneratorName;
  j["angles_unit"] = "radians";
  j["spec"] = emit_spec(spec);
  j["wall_time_s"] = wall_time_s;
  return j;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file '" + path + "'");
  out << content;
}

}  // namespace maopt
