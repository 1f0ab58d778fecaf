#include "maopt/experiment.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using maopt::ExperimentSpec;
using maopt::Real;

constexpr int kExitConfigError = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitGradCheckFailed = 4;

struct CommonArgs {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::string receivers;
  std::string layouts;
};

void add_common_flags(CLI::App* cmd, CommonArgs* args) {
  cmd->add_option("--config", args->config_path, "JSON experiment config");
  cmd->add_option("--out", args->out_dir, "output directory (created if missing)");
  cmd->add_option("--seed", args->seed, "override both evaluation and optimization seeds");
  cmd->add_option("--receivers", args->receivers,
                  "comma-separated subset of zf,mmse,mmse-sic");
  cmd->add_option("--layouts", args->layouts, "comma-separated subset of ma,fpa");
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream stream(text);
  while (std::getline(stream, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

ExperimentSpec load_spec(const CommonArgs& args) {
  ExperimentSpec spec = args.config_path.empty() ? maopt::default_spec()
                                                 : maopt::parse_spec_file(args.config_path);
  if (args.seed) {
    spec.eval_seed = *args.seed;
    spec.opt_seed = *args.seed;
  }
  if (!args.receivers.empty()) {
    spec.receivers.clear();
    for (const std::string& name : split_list(args.receivers)) {
      spec.receivers.push_back(maopt::receiver_from_name(name));
    }
  }
  if (!args.layouts.empty()) {
    spec.layouts.clear();
    for (const std::string& name : split_list(args.layouts)) {
      spec.layouts.push_back(maopt::layout_from_name(name));
    }
  }
  if (spec.receivers.empty() || spec.layouts.empty()) {
    throw std::invalid_argument("receivers and layouts must be non-empty");
  }
  return spec;
}

void ensure_out_dir(const std::string& dir) {
  std::filesystem::create_directories(dir);
}

void write_outputs(const std::string& dir, const std::string& stem,
                   const std::vector<maopt::ResultRow>& rows, const ExperimentSpec& spec,
                   Real wall_time_s) {
  ensure_out_dir(dir);
  const std::string csv_path = dir + "/" + stem + ".csv";
  maopt::write_text_file(csv_path, maopt::csv_from_rows(rows));
  const std::string meta_path = dir + "/" + stem + ".meta.json";
  maopt::write_text_file(meta_path, maopt::metadata_json(spec, wall_time_s).dump(2) + "\n");
  std::cout << "wrote " << csv_path << " and " << meta_path << "\n";
}

void print_rows(const std::vector<maopt::ResultRow>& rows) {
  for (const auto& row : rows) {
    std::printf("%-4s %-9s N=%-3d L=%-5g rate %.4f +- %.4f bits/s/Hz (surrogate %.4f, %d iterations)\n",
                maopt::layout_name(row.layout), maopt::receiver_name(row.receiver),
                row.n_antennas, row.span, row.ergodic_mean, row.ergodic_stderr,
                row.surrogate_value, row.iterations);
  }
}

std::vector<Real> default_sweep_values(maopt::SweepKind kind) {
  std::vector<Real> values;
  if (kind == maopt::SweepKind::Span) {
    for (Real span = 5.0; span <= 9.0 + 1e-9; span += 0.5) values.push_back(span);
  } else {
    for (int n = 6; n <= 13; ++n) values.push_back(n);
  }
  return values;
}

int run_sweep_command(const CommonArgs& args, maopt::SweepKind kind) {
  ExperimentSpec spec = load_spec(args);
  if (spec.sweep_kind != kind || spec.sweep_values.empty()) {
    spec.sweep_values = default_sweep_values(kind);
  }
  spec.sweep_kind = kind;
  const auto started = std::chrono::steady_clock::now();
  const std::vector<maopt::ResultRow> rows = (kind == maopt::SweepKind::Span)
                                                 ? maopt::run_sweep_span(spec)
                                                 : maopt::run_sweep_antennas(spec);
  const Real elapsed =
      std::chrono::duration<Real>(std::chrono::steady_clock::now() - started).count();
  print_rows(rows);
  write_outputs(args.out_dir, kind == maopt::SweepKind::Span ? "span_sweep" : "antenna_sweep",
                rows, spec, elapsed);
  return 0;
}

int run_optimize_command(const CommonArgs& args) {
  ExperimentSpec spec = load_spec(args);
  spec.sweep_kind = maopt::SweepKind::None;
  spec.sweep_values.clear();
  const auto started = std::chrono::steady_clock::now();
  const maopt::SingleRunResult result = maopt::run_single(spec);
  const Real elapsed =
      std::chrono::duration<Real>(std::chrono::steady_clock::now() - started).count();
  print_rows(result.rows);
  write_outputs(args.out_dir, "single", result.rows, spec, elapsed);
  for (const auto& [receiver, trace] : result.traces) {
    const std::string path = args.out_dir + "/trace_" +
                             std::string(maopt::receiver_name(receiver)) + ".csv";
    maopt::write_text_file(path, maopt::csv_from_trace(trace));
    std::cout << "wrote " << path << " (" << maopt::stop_reason_name(trace.stop_reason)
              << ")\n";
  }
  return 0;
}

int run_eval_command(const CommonArgs& args, const std::string& positions_text) {
  ExperimentSpec spec = load_spec(args);
  maopt::AntennaPositions positions;
  if (positions_text.empty()) {
    positions = maopt::fpa_positions(spec.config);
  } else {
    std::vector<Real> coords;
    std::string item;
    std::stringstream stream(positions_text);
    while (std::getline(stream, item, ';')) {
      if (!item.empty()) coords.push_back(std::stod(item));
    }
    positions.coords = Eigen::Map<const maopt::RealVector>(coords.data(), coords.size());
  }
  if (positions.size() != spec.config.n_antennas) {
    throw std::invalid_argument("positions must list n_antennas coordinates");
  }
  if (!maopt::is_feasible(positions, spec.config.span, spec.config.min_spacing, 1e-9)) {
    throw maopt::InfeasibleGeometry("given positions violate spacing or span constraints");
  }

  const maopt::AntennaPositions fpa = maopt::fpa_positions(spec.config);
  const bool is_fpa = (positions.coords.array() == fpa.coords.array()).all();

  const auto started = std::chrono::steady_clock::now();
  std::vector<maopt::ResultRow> rows;
  for (maopt::ReceiverKind receiver : spec.receivers) {
    maopt::ResultRow row;
    row.layout = is_fpa ? maopt::Layout::Fpa : maopt::Layout::Ma;
    row.receiver = receiver;
    row.n_antennas = spec.config.n_antennas;
    row.span = spec.config.span;
    row.positions = positions;
    row.seed = spec.eval_seed;
    const maopt::RandomStream eval_stream(spec.eval_seed, 0);
    const maopt::ErgodicEstimate estimate = maopt::ergodic_sum_rate(
        positions, spec.config, receiver, spec.eval_samples, eval_stream);
    row.ergodic_mean = estimate.mean;
    row.ergodic_stderr = estimate.std_error;
    try {
      switch (receiver) {
        case maopt::ReceiverKind::Zf:
          row.surrogate_value = maopt::zf_surrogate(positions, spec.config);
          break;
        case maopt::ReceiverKind::Mmse: {
          const maopt::MmseSampleSet samples = maopt::draw_mmse_samples(
              spec.config, spec.opt_samples, maopt::RandomStream(spec.opt_seed, 0));
          row.surrogate_value = maopt::mmse_saa_objective(positions, spec.config, samples);
          break;
        }
        case maopt::ReceiverKind::MmseSic:
          row.surrogate_value = maopt::sic_bound_objective(positions, spec.config);
          break;
      }
    } catch (const maopt::DimensionError&) {
      row.surrogate_value = std::numeric_limits<Real>::quiet_NaN();
    }
    rows.push_back(std::move(row));
  }
  const Real elapsed =
      std::chrono::duration<Real>(std::chrono::steady_clock::now() - started).count();
  print_rows(rows);
  write_outputs(args.out_dir, "eval", rows, spec, elapsed);
  return 0;
}

int run_grad_check_command(const CommonArgs& args) {
  ExperimentSpec spec = load_spec(args);
  const maopt::GradCheckReport report = maopt::run_grad_check(spec);
  nlohmann::json j;
  for (const auto& entry : report.entries) {
    std::printf("%-10s max relative error %.3e over %d trials\n", entry.objective.c_str(),
                entry.max_rel_error, entry.trials);
    j["objectives"][entry.objective] = entry.max_rel_error;
  }
  std::printf("single-user zf gradient norm %.3e\n", report.single_user_zf_grad_norm);
  std::printf("%s\n", report.passed ? "PASS" : "FAIL");
  j["single_user_zf_grad_norm"] = report.single_user_zf_grad_norm;
  j["passed"] = report.passed;
  ensure_out_dir(args.out_dir);
  maopt::write_text_file(args.out_dir + "/grad_check.json", j.dump(2) + "\n");
  return report.passed ? 0 : kExitGradCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"movable-antenna array position optimizer and uplink rate simulator"};
  app.require_subcommand(1);

  CommonArgs args;
  std::string positions_text;

  CLI::App* optimize = app.add_subcommand("optimize", "optimize positions and evaluate");
  add_common_flags(optimize, &args);
  CLI::App* sweep_span = app.add_subcommand("sweep-span", "rate versus antenna span");
  add_common_flags(sweep_span, &args);
  CLI::App* sweep_antennas =
      app.add_subcommand("sweep-antennas", "rate versus antenna count");
  add_common_flags(sweep_antennas, &args);
  CLI::App* grad_check =
      app.add_subcommand("grad-check", "compare analytic gradients to finite differences");
  add_common_flags(grad_check, &args);
  CLI::App* eval = app.add_subcommand("eval", "Monte Carlo rate at given positions");
  add_common_flags(eval, &args);
  eval->add_option("--positions", positions_text,
                   "semicolon-separated coordinates (default: fixed array)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfigError;
  }

  try {
    if (optimize->parsed()) return run_optimize_command(args);
    if (sweep_span->parsed()) return run_sweep_command(args, maopt::SweepKind::Span);
    if (sweep_antennas->parsed()) return run_sweep_command(args, maopt::SweepKind::Antennas);
    if (grad_check->parsed()) return run_grad_check_command(args);
    if (eval->parsed()) return run_eval_command(args, positions_text);
  } catch (const maopt::InfeasibleGeometry& e) {
    std::cerr << "infeasible geometry: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
