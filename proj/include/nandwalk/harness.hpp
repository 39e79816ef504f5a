#pragma once

// Experiment plumbing: serializable configs, output metadata and the
// gamma x N x instance sweep.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "nandwalk/dynamics.hpp"
#include "nandwalk/nand_core.hpp"

namespace nandwalk {

std::string code_version();

/// Everything that determines a command's output.
struct ExperimentConfig {
  std::string command;
  /// Explicit leaf string; when set it replaces the random instances.
  std::string input;
  /// Tree depths n (N = 2^n) for random instances.
  std::vector<int> depths;
  std::vector<double> gammas;
  int instances = 16;
  std::uint64_t seed = 1;
  int m_factor = 3;
  Propagator propagator = Propagator::Chebyshev;
  double tolerance = 1e-12;
  double threshold = 0.5;
  std::string out;
  std::string format = "csv";
  /// Subcommand-specific parameters.
  nlohmann::json extra = nlohmann::json::object();

  nlohmann::json to_json() const;
  static ExperimentConfig from_json(const nlohmann::json& j);

  RunConfig run_config(double gamma) const;

  /// FNV-1a 64 of the sorted-key JSON dump, output path excluded.
  std::string hash() const;
};

/// 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);

/// Shortest text that round-trips to the same double.
std::string format_double(double v);

/// "# key=value" lines: config hash, code version, config JSON, columns.
void write_metadata(std::ostream& os, const ExperimentConfig& config, std::string_view columns);

struct SweepRow {
  std::size_t leaves = 0;
  int instance_id = 0;
  double gamma = 0.0;
  int packet_length = 0;
  int half_runway = 0;
  double t_run = 0.0;
  double p_right = 0.0;
  double T0_sq = 0.0;
  int decision = 0;
  int nand = 0;
  bool correct = false;
  /// Non-empty if this grid point threw; numeric fields are then NaN.
  std::string error;
};

struct GammaSummary {
  double gamma = 0.0;
  std::size_t runs = 0;
  std::size_t failed = 0;
  std::size_t wrong = 0;
  /// wrong / (runs - failed).
  double error_rate = 0.0;
  /// Mean |p_right - T0^2| over successful runs.
  double mean_deviation = 0.0;
};

struct SweepSummary {
  std::vector<GammaSummary> per_gamma;
  /// Negated log-log slope of mean_deviation against gamma; NaN if fewer
  /// than two usable gammas.
  double alpha = 0.0;
  bool error_rate_nonincreasing = true;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  SweepSummary summary;
};

inline constexpr std::string_view kSweepColumns =
    "N,instance_id,gamma,L,M,t_run,p_right,T0_sq,decision,nand,correct";

/// Random instance k at the given depth, as drawn by sweeps and scans.
TreeInput grid_instance(int depth, int k, std::uint64_t seed);

/// NANDWALK_WORKERS if set to a positive integer, else hardware concurrency.
std::size_t worker_count();

/// Least-squares slope of log(ys) against log(xs).
double loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys);

/// Grid order: depth, then instance, then gamma. Throws std::invalid_argument
/// on an empty grid. Row failures are recorded in SweepRow::error.
SweepResult run_sweep(const ExperimentConfig& config, std::size_t workers);

SweepSummary summarize(const std::vector<SweepRow>& rows, const std::vector<double>& gammas);

/// One CSV line in kSweepColumns order.
void write_sweep_row(std::ostream& os, const SweepRow& row);

/// Metadata, header, rows, then the summary as '#' lines.
void write_sweep_csv(std::ostream& os, const ExperimentConfig& config, const SweepResult& result);

nlohmann::json sweep_to_json(const ExperimentConfig& config, const SweepResult& result);

}  // namespace nandwalk
