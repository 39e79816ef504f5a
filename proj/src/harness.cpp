#include "nandwalk/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "nandwalk/nand_core.hpp"
#include "nandwalk/scattering.hpp"

#ifndef NANDWALK_VERSION
#define NANDWALK_VERSION "unknown"
#endif

namespace nandwalk {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct GridPoint {
  TreeInput input;
  int instance_id;
  double gamma;
};

std::vector<GridPoint> build_grid(const ExperimentConfig& c) {
  std::vector<GridPoint> grid;
  if (!c.input.empty()) {
    const TreeInput in = parse_input(c.input);
    for (double g : c.gammas) grid.push_back({in, 0, g});
    return grid;
  }
  for (int depth : c.depths) {
    for (int k = 0; k < c.instances; ++k) {
      const TreeInput in = grid_instance(depth, k, c.seed);
      for (double g : c.gammas) grid.push_back({in, k, g});
    }
  }
  return grid;
}

SweepRow run_point(const GridPoint& p, const ExperimentConfig& c) {
  SweepRow row;
  row.leaves = p.input.size();
  row.instance_id = p.instance_id;
  row.gamma = p.gamma;
  row.nand = eval_nand(p.input);
  try {
    const Verdict v = run_algorithm(p.input, c.run_config(p.gamma));
    row.packet_length = v.packet_length;
    row.half_runway = v.half_runway;
    row.t_run = v.t_run;
    row.p_right = v.p_right;
    row.T0_sq = v.analytic_T0_sq;
    row.decision = v.decision;
    row.correct = v.decision == row.nand;
  } catch (const std::exception& e) {
    row.t_run = row.p_right = row.T0_sq = kNaN;
    row.decision = -1;
    row.error = e.what();
  }
  return row;
}

}  // namespace

std::string code_version() { return NANDWALK_VERSION; }

nlohmann::json ExperimentConfig::to_json() const {
  return {
      {"command", command},     {"input", input},         {"depths", depths},
      {"gammas", gammas},       {"instances", instances}, {"seed", seed},
      {"m_factor", m_factor},   {"propagator", to_string(propagator)},
      {"tolerance", tolerance}, {"threshold", threshold}, {"out", out},
      {"format", format},       {"extra", extra},
  };
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  c.command = j.value("command", c.command);
  c.input = j.value("input", c.input);
  c.depths = j.value("depths", c.depths);
  c.gammas = j.value("gammas", c.gammas);
  c.instances = j.value("instances", c.instances);
  c.seed = j.value("seed", c.seed);
  c.m_factor = j.value("m_factor", c.m_factor);
  c.propagator = parse_propagator(j.value("propagator", to_string(c.propagator)));
  c.tolerance = j.value("tolerance", c.tolerance);
  c.threshold = j.value("threshold", c.threshold);
  c.out = j.value("out", c.out);
  c.format = j.value("format", c.format);
  c.extra = j.value("extra", c.extra);
  return c;
}

RunConfig ExperimentConfig::run_config(double gamma) const {
  RunConfig r;
  r.gamma = gamma;
  r.m_factor = m_factor;
  r.propagator = propagator;
  r.tolerance = tolerance;
  r.threshold = threshold;
  return r;
}

std::string ExperimentConfig::hash() const {
  nlohmann::json j = to_json();
  j.erase("out");
  return fnv1a_hex(j.dump());
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<std::size_t>(i)] = kHex[h & 0xf];
  return out;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_metadata(std::ostream& os, const ExperimentConfig& config, std::string_view columns) {
  os << "# config_hash=" << config.hash() << '\n';
  os << "# version=" << code_version() << '\n';
  os << "# config=" << config.to_json().dump() << '\n';
  os << "# columns=" << columns << '\n';
}

TreeInput grid_instance(int depth, int k, std::uint64_t seed) {
  const auto stream = (static_cast<std::uint64_t>(depth) << 32) | static_cast<std::uint32_t>(k);
  return random_instance(depth, derive_seed(seed, stream));
}

std::size_t worker_count() {
  if (const char* env = std::getenv("NANDWALK_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

double loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2) return kNaN;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0 && ys[i] > 0)) return kNaN;
    const double lx = std::log(xs[i]);
    const double ly = std::log(ys[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) return kNaN;
  return (n * sxy - sx * sy) / denom;
}

SweepSummary summarize(const std::vector<SweepRow>& rows, const std::vector<double>& gammas) {
  SweepSummary s;
  for (double g : gammas) {
    GammaSummary gs;
    gs.gamma = g;
    double dev = 0.0;
    for (const auto& r : rows) {
      if (r.gamma != g) continue;
      ++gs.runs;
      if (!r.error.empty()) {
        ++gs.failed;
        continue;
      }
      if (!r.correct) ++gs.wrong;
      dev += std::abs(r.p_right - r.T0_sq);
    }
    const std::size_t ok = gs.runs - gs.failed;
    gs.error_rate = ok ? static_cast<double>(gs.wrong) / ok : kNaN;
    gs.mean_deviation = ok ? dev / ok : kNaN;
    s.per_gamma.push_back(gs);
  }

  auto sorted = s.per_gamma;
  std::sort(sorted.begin(), sorted.end(),
            [](const GammaSummary& a, const GammaSummary& b) { return a.gamma < b.gamma; });
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (i > 0 && sorted[i].error_rate > sorted[i - 1].error_rate) s.error_rate_nonincreasing = false;
    if (sorted[i].mean_deviation > 0) {
      xs.push_back(sorted[i].gamma);
      ys.push_back(sorted[i].mean_deviation);
    }
  }
  s.alpha = -loglog_slope(xs, ys);
  return s;
}

SweepResult run_sweep(const ExperimentConfig& config, std::size_t workers) {
  if (config.gammas.empty() || (config.input.empty() && (config.depths.empty() || config.instances < 1))) {
    throw std::invalid_argument("sweep grid is empty");
  }
  const auto grid = build_grid(config);

  SweepResult result;
  result.rows.resize(grid.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < grid.size(); i = next++) {
      result.rows[i] = run_point(grid[i], config);
    }
  };
  const std::size_t n_threads = std::clamp<std::size_t>(workers, 1, grid.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();

  result.summary = summarize(result.rows, config.gammas);
  return result;
}

void write_sweep_row(std::ostream& os, const SweepRow& r) {
  os << r.leaves << ',' << r.instance_id << ',' << format_double(r.gamma) << ',' << r.packet_length
     << ',' << r.half_runway << ',' << format_double(r.t_run) << ',' << format_double(r.p_right) << ','
     << format_double(r.T0_sq) << ',' << r.decision << ',' << r.nand << ',' << (r.correct ? 1 : 0)
     << '\n';
}

void write_sweep_csv(std::ostream& os, const ExperimentConfig& config, const SweepResult& result) {
  write_metadata(os, config, kSweepColumns);
  os << kSweepColumns << '\n';
  for (const auto& r : result.rows) write_sweep_row(os, r);
  for (std::size_t i = 0; i < result.rows.size(); ++i) {
    if (!result.rows[i].error.empty()) os << "# row " << i << " failed: " << result.rows[i].error << '\n';
  }
  for (const auto& g : result.summary.per_gamma) {
    os << "# summary gamma=" << format_double(g.gamma) << " runs=" << g.runs << " failed=" << g.failed
       << " wrong=" << g.wrong << " error_rate=" << format_double(g.error_rate)
       << " mean_deviation=" << format_double(g.mean_deviation) << '\n';
  }
  os << "# summary alpha=" << format_double(result.summary.alpha)
     << " error_rate_nonincreasing=" << (result.summary.error_rate_nonincreasing ? 1 : 0) << '\n';
}

nlohmann::json sweep_to_json(const ExperimentConfig& config, const SweepResult& result) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : result.rows) {
    nlohmann::json row = {{"N", r.leaves},         {"instance_id", r.instance_id},
                          {"gamma", r.gamma},      {"L", r.packet_length},
                          {"M", r.half_runway},    {"t_run", r.t_run},
                          {"p_right", r.p_right},  {"T0_sq", r.T0_sq},
                          {"decision", r.decision}, {"nand", r.nand},
                          {"correct", r.correct}};
    if (!r.error.empty()) row["error"] = r.error;
    rows.push_back(std::move(row));
  }
  nlohmann::json summary = nlohmann::json::array();
  for (const auto& g : result.summary.per_gamma) {
    summary.push_back({{"gamma", g.gamma},
                       {"runs", g.runs},
                       {"failed", g.failed},
                       {"wrong", g.wrong},
                       {"error_rate", g.error_rate},
                       {"mean_deviation", g.mean_deviation}});
  }
  return {{"config_hash", config.hash()},
          {"version", code_version()},
          {"config", config.to_json()},
          {"columns", kSweepColumns},
          {"rows", rows},
          {"summary",
           {{"per_gamma", summary},
            {"alpha", result.summary.alpha},
            {"error_rate_nonincreasing", result.summary.error_rate_nonincreasing}}}};
}

}  // namespace nandwalk
