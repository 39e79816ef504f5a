#include "nandwalk/cli.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nandwalk/dynamics.hpp"
#include "nandwalk/errors.hpp"
#include "nandwalk/harness.hpp"
#include "nandwalk/lattice.hpp"
#include "nandwalk/nand_core.hpp"
#include "nandwalk/scattering.hpp"
#include "nandwalk/spectral.hpp"

namespace nandwalk {

namespace {

using nlohmann::json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Option storage shared by the subcommands. Each subcommand registers the
// subset it understands; `opts` maps config keys to the registered options.
struct Options {
  std::string config_path;
  std::string input;
  std::vector<int> depths{4};
  std::uint64_t seed = 1;
  std::vector<double> gammas{16.0};
  int instances = 16;
  int m_factor = 3;
  std::string propagator = "cheb";
  double tolerance = 1e-12;
  double threshold = 0.5;
  std::string out;
  std::string format = "csv";
  json extra = json::object();
  std::map<std::string, CLI::Option*> opts;
  std::map<std::string, CLI::Option*> extra_opts;
};

// flags > config file > defaults
ExperimentConfig resolve(const std::string& command, const Options& o) {
  ExperimentConfig c;
  json file = json::object();
  const bool have_file = !o.config_path.empty();
  if (have_file) {
    std::ifstream in(o.config_path);
    if (!in) throw UsageError("cannot read config file '" + o.config_path + "'");
    try {
      file = json::parse(in);
    } catch (const json::exception& e) {
      throw UsageError("config file '" + o.config_path + "' is not valid JSON: " + e.what());
    }
    if (!file.is_object()) throw UsageError("config file must hold a JSON object");
    if (file.contains("command") && file["command"] != command) {
      throw UsageError("config file is for '" + file["command"].get<std::string>() + "', not '" +
                       command + "'");
    }
    c = ExperimentConfig::from_json(file);
  }
  auto take = [&](const std::string& key) {
    const auto it = o.opts.find(key);
    if (it == o.opts.end()) return false;
    return !have_file || it->second->count() > 0 || !file.contains(key);
  };
  c.command = command;
  if (take("input")) c.input = o.input;
  if (take("depths")) c.depths = o.depths;
  if (take("seed")) c.seed = o.seed;
  if (take("gammas")) c.gammas = o.gammas;
  if (take("instances")) c.instances = o.instances;
  if (take("m_factor")) c.m_factor = o.m_factor;
  if (take("propagator")) c.propagator = parse_propagator(o.propagator);
  if (take("tolerance")) c.tolerance = o.tolerance;
  if (take("threshold")) c.threshold = o.threshold;
  if (take("out")) c.out = o.out;
  if (take("format")) c.format = o.format;

  const json file_extra = file.value("extra", json::object());
  c.extra = json::object();
  for (const auto& [key, opt] : o.extra_opts) {
    if (!have_file || opt->count() > 0 || !file_extra.contains(key)) {
      c.extra[key] = o.extra.at(key);
    } else {
      c.extra[key] = file_extra.at(key);
    }
  }
  return c;
}

template <class T>
CLI::Option* add_extra(CLI::App* sub, Options& o, const std::string& flag, const std::string& key,
                       T& storage, const std::string& help) {
  CLI::Option* opt = nullptr;
  if constexpr (std::is_same_v<T, bool>) {
    opt = sub->add_flag(flag, storage, help);
  } else {
    opt = sub->add_option(flag, storage, help);
  }
  o.extra_opts[key] = opt;
  return opt;
}

void add_input(CLI::App* sub, Options& o) {
  o.opts["input"] = sub->add_option("--input", o.input, "Leaf bit-string, length a power of two >= 2");
}
void add_random(CLI::App* sub, Options& o) {
  o.opts["depths"] =
      sub->add_option("--n", o.depths, "Tree depths n (N = 2^n leaves) for random instances")
          ->delimiter(',');
  o.opts["instances"] = sub->add_option("--instances", o.instances, "Random instances per depth")
                            ->check(CLI::PositiveNumber);
  o.opts["seed"] = sub->add_option("--seed", o.seed, "Base RNG seed");
}
void add_walk(CLI::App* sub, Options& o) {
  o.opts["gammas"] =
      sub->add_option("--gamma", o.gammas, "Packet-length factors gamma (L ~ gamma sqrt(N))")->delimiter(',');
  o.opts["m_factor"] =
      sub->add_option("--m-factor", o.m_factor, "Runway half-length M = factor * L (>= 3)");
  o.opts["propagator"] = sub->add_option("--propagator", o.propagator, "Time propagator")
                             ->check(CLI::IsMember({"cheb", "chebyshev", "exact"}));
  o.opts["tolerance"] = sub->add_option("--tol", o.tolerance, "Chebyshev coefficient-tail tolerance");
  o.opts["threshold"] = sub->add_option("--threshold", o.threshold, "Decision threshold on p_right");
}
void add_output(CLI::App* sub, Options& o, std::vector<std::string> formats) {
  o.opts["out"] = sub->add_option("--out", o.out, "Output file (default: standard output)");
  o.opts["format"] =
      sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember(formats));
  sub->add_option("--config", o.config_path,
                  "JSON config as recorded in an output header; flags override it");
}

// Writes to --out if given, else to the command's standard output.
class Sink {
 public:
  Sink(const ExperimentConfig& c, std::ostream& fallback) : os_(&fallback) {
    if (!c.out.empty()) {
      file_.open(c.out);
      if (!file_) throw UsageError("cannot open output file '" + c.out + "'");
      os_ = &file_;
    }
  }
  std::ostream& get() { return *os_; }

 private:
  std::ofstream file_;
  std::ostream* os_;
};

TreeInput require_input(const ExperimentConfig& c) {
  if (c.input.empty()) throw UsageError("--input is required");
  return parse_input(c.input);
}

std::vector<std::pair<TreeInput, int>> instances_of(const ExperimentConfig& c) {
  std::vector<std::pair<TreeInput, int>> out;
  if (!c.input.empty()) {
    out.emplace_back(parse_input(c.input), 0);
    return out;
  }
  for (int depth : c.depths) {
    for (int k = 0; k < c.instances; ++k) out.emplace_back(grid_instance(depth, k, c.seed), k);
  }
  if (out.empty()) throw UsageError("no instances selected");
  return out;
}

json header_json(const ExperimentConfig& c, std::string_view columns) {
  return {{"config_hash", c.hash()},
          {"version", code_version()},
          {"config", c.to_json()},
          {"columns", columns}};
}

// ---- eval ------------------------------------------------------------------

int cmd_eval(const ExperimentConfig& c, std::ostream& out) {
  const TreeInput in = require_input(c);
  const bool randomized = c.extra.at("randomized").get<bool>();
  int value = eval_nand(in);
  std::optional<std::size_t> queries;
  if (randomized) {
    const EvalTrace tr = randomized_eval(in, c.seed);
    value = tr.value;
    queries = tr.queries;
  }
  Sink sink(c, out);
  auto& os = sink.get();
  if (c.format == "text") {
    os << value << '\n';
  } else if (c.format == "json") {
    json j = header_json(c, "input,value,queries");
    j["input"] = in.to_string();
    j["value"] = value;
    j["queries"] = queries ? json(*queries) : json(nullptr);
    os << j.dump(2) << '\n';
  } else {
    write_metadata(os, c, "input,value,queries");
    os << "input,value,queries\n" << in.to_string() << ',' << value << ',';
    if (queries) os << *queries;
    os << '\n';
  }
  return 0;
}

// ---- scatter ---------------------------------------------------------------

constexpr std::string_view kBoundColumns = "N,instance_id,E,nand,abs_y,abs_T,bound_y,bound_T,pass";
constexpr std::string_view kTableColumns = "N,instance_id,E,theta,y_num,y_den,abs_y,re_T,im_T,re_R,im_R";

double resolve_emax(const ExperimentConfig& c, std::size_t leaves) {
  const std::string text = c.extra.at("emax").get<std::string>();
  if (text == "auto") return bound_window(leaves);
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw UsageError("--emax must be a number or 'auto'");
  }
}

int cmd_scatter(const ExperimentConfig& c, std::ostream& out) {
  const auto instances = instances_of(c);
  const double emin = c.extra.at("emin").get<double>();
  const int points = c.extra.at("points").get<int>();
  const bool table = c.extra.at("table").get<bool>();
  if (points < 1) throw UsageError("--points must be positive");

  Sink sink(c, out);
  auto& os = sink.get();
  json rows = json::array();

  if (table) {
    if (c.format == "csv") {
      write_metadata(os, c, kTableColumns);
      os << kTableColumns << '\n';
    }
    for (const auto& [in, id] : instances) {
      const double emax = resolve_emax(c, in.size());
      if (!(emin > 0 && emax > emin && emax < 2)) throw UsageError("need 0 < emin < emax < 2");
      for (double e : log_grid(emin, emax, points)) {
        const ScatteringPoint p = scatter_at(in, e);
        if (c.format == "csv") {
          os << in.size() << ',' << id << ',' << format_double(e) << ',' << format_double(p.theta) << ','
             << format_double(p.y.num) << ',' << format_double(p.y.den) << ','
             << format_double(p.y.magnitude()) << ',' << format_double(p.T.real()) << ','
             << format_double(p.T.imag()) << ',' << format_double(p.R.real()) << ','
             << format_double(p.R.imag()) << '\n';
        } else {
          rows.push_back({{"N", in.size()}, {"instance_id", id}, {"E", e}, {"theta", p.theta},
                          {"y_num", p.y.num}, {"y_den", p.y.den}, {"abs_y", p.y.magnitude()},
                          {"re_T", p.T.real()}, {"im_T", p.T.imag()}, {"re_R", p.R.real()},
                          {"im_R", p.R.imag()}});
        }
      }
    }
    if (c.format == "json") {
      json j = header_json(c, kTableColumns);
      j["rows"] = rows;
      os << j.dump(2) << '\n';
    }
    return 0;
  }

  std::size_t violations = 0;
  std::size_t total = 0;
  double worst = std::numeric_limits<double>::infinity();
  if (c.format == "csv") {
    write_metadata(os, c, kBoundColumns);
    os << kBoundColumns << '\n';
  }
  for (const auto& [in, id] : instances) {
    const double emax = resolve_emax(c, in.size());
    if (!(emin > 0 && emax > emin)) throw UsageError("need 0 < emin < emax");
    const auto grid = log_grid(emin, emax, points);
    const BoundReport report = scan_bounds(in, grid, id);
    violations += report.violations();
    total += report.rows.size();
    worst = std::min(worst, report.worst_margin());
    if (c.format == "csv") {
      write_csv_rows(os, report);
    } else {
      for (const auto& r : report.rows) {
        rows.push_back({{"N", report.leaves}, {"instance_id", id}, {"E", r.energy},
                        {"nand", report.nand}, {"abs_y", r.abs_y}, {"abs_T", r.abs_T},
                        {"bound_y", r.bound_y}, {"bound_T", r.bound_T}, {"pass", r.pass}});
      }
    }
  }
  if (c.format == "csv") {
    os << "# summary instances=" << instances.size() << " rows=" << total << " violations=" << violations
       << " worst_margin=" << format_double(worst) << '\n';
  } else {
    json j = header_json(c, kBoundColumns);
    j["rows"] = rows;
    j["summary"] = {{"instances", instances.size()}, {"rows", total}, {"violations", violations},
                    {"worst_margin", worst}};
    os << j.dump(2) << '\n';
  }
  return violations == 0 ? 0 : 1;
}

// ---- run -------------------------------------------------------------------

int cmd_run(const ExperimentConfig& c, std::ostream& out) {
  const TreeInput in = require_input(c);
  if (c.gammas.size() != 1) throw UsageError("run takes exactly one --gamma");
  const Verdict v = run_algorithm(in, c.run_config(c.gammas.front()));
  const int nand = eval_nand(in);
  Sink sink(c, out);
  auto& os = sink.get();
  if (c.format == "json") {
    json j = v.to_json();
    j["nand"] = nand;
    j["correct"] = v.decision == nand;
    j["config_hash"] = c.hash();
    j["version"] = code_version();
    os << j.dump(2) << '\n';
  } else {
    const SweepRow row{in.size(), 0, v.gamma, v.packet_length, v.half_runway, v.t_run, v.p_right,
                       v.analytic_T0_sq, v.decision, nand, v.decision == nand, {}};
    write_metadata(os, c, kSweepColumns);
    os << kSweepColumns << '\n';
    write_sweep_row(os, row);
  }
  return v.decision == nand ? 0 : 1;
}

// ---- sweep -----------------------------------------------------------------

int cmd_sweep(const ExperimentConfig& c, std::ostream& out) {
  const SweepResult result = run_sweep(c, worker_count());
  Sink sink(c, out);
  if (c.format == "json") {
    sink.get() << sweep_to_json(c, result).dump(2) << '\n';
  } else {
    write_sweep_csv(sink.get(), c, result);
  }
  return 0;
}

// ---- embed-parity ----------------------------------------------------------

constexpr std::string_view kParityColumns = "k,x,leaves,value,expected,match";

std::vector<Bit> parse_bits(const std::string& text) {
  std::vector<Bit> bits;
  for (char ch : text) {
    if (ch != '0' && ch != '1') throw UsageError("--bits must contain only '0' and '1'");
    bits.push_back(static_cast<Bit>(ch - '0'));
  }
  return bits;
}

int cmd_embed_parity(const ExperimentConfig& c, std::ostream& out) {
  std::vector<std::vector<Bit>> inputs;
  const std::string bits = c.extra.at("bits").get<std::string>();
  if (!bits.empty()) {
    inputs.push_back(parse_bits(bits));
  } else {
    for (int k : c.extra.at("k").get<std::vector<int>>()) {
      if (k < 1 || k > 16) throw UsageError("--k values must lie in 1..16");
      for (std::uint32_t mask = 0; mask < (1u << k); ++mask) {
        std::vector<Bit> x(static_cast<std::size_t>(k));
        for (int i = 0; i < k; ++i) x[static_cast<std::size_t>(i)] = (mask >> i) & 1u;
        inputs.push_back(std::move(x));
      }
    }
  }
  if (inputs.empty()) throw UsageError("no parity inputs selected");

  Sink sink(c, out);
  auto& os = sink.get();
  json rows = json::array();
  if (c.format == "csv") {
    write_metadata(os, c, kParityColumns);
    os << kParityColumns << '\n';
  }
  std::size_t mismatches = 0;
  for (const auto& x : inputs) {
    const TreeInput tree = embed_parity(x);
    const int value = eval_nand(tree);
    int expected = 1;
    std::string xs;
    for (Bit b : x) {
      expected ^= b;
      xs.push_back(static_cast<char>('0' + b));
    }
    const bool match = value == expected;
    if (!match) ++mismatches;
    if (c.format == "csv") {
      os << x.size() << ',' << xs << ',' << tree.to_string() << ',' << value << ',' << expected << ','
         << (match ? 1 : 0) << '\n';
    } else {
      rows.push_back({{"k", x.size()}, {"x", xs}, {"leaves", tree.to_string()}, {"value", value},
                      {"expected", expected}, {"match", match}});
    }
  }
  if (c.format == "csv") {
    os << "# summary inputs=" << inputs.size() << " mismatches=" << mismatches << '\n';
  } else {
    json j = header_json(c, kParityColumns);
    j["rows"] = rows;
    j["summary"] = {{"inputs", inputs.size()}, {"mismatches", mismatches}};
    os << j.dump(2) << '\n';
  }
  return mismatches == 0 ? 0 : 1;
}

// ---- diagnose --------------------------------------------------------------

constexpr std::string_view kDiagColumns = "L,eps,quantity,value,bound,pass";

int cmd_diagnose(const ExperimentConfig& c, std::ostream& out) {
  const auto lengths = c.extra.at("L").get<std::vector<int>>();
  const auto epsilons = c.extra.at("eps").get<std::vector<double>>();
  const int grid = c.extra.at("grid").get<int>();
  if (grid < 1) throw UsageError("--grid must be positive");

  std::vector<DiagnosticRow> rows;
  for (int length : lengths) {
    if (length < 1) throw UsageError("--L values must be positive");
    for (double eps : epsilons) {
      if (!(eps > 0 && eps < 3.14159265358979)) throw UsageError("--eps values must lie in (0, pi)");
      const auto r = packet_diagnostics(length, eps, grid);
      rows.insert(rows.end(), r.begin(), r.end());
    }
  }

  if (!c.input.empty()) {
    const TreeInput in = parse_input(c.input);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double eps = default_window(in.size());
    const double slope = default_slope_bound(in.size());
    for (double gamma : c.gammas) {
      const int length = packet_length(gamma, in.size());
      if (c.m_factor < 3) throw UsageError("--m-factor must be >= 3");
      const double cube = length * eps * eps * eps;
      rows.push_back({length, eps, "l_eps_cubed", cube, 0.1, dispersion_regime(length, eps)});
      rows.push_back({length, eps, "error_budget", error_budget(length, eps, slope), nan, true});
      const HamiltonianGraph h = build_full(in, c.m_factor * length);
      const StateVector psi0 = initial_packet(length, h.index_map());
      rows.push_back({length, eps, "window_weight", window_weight(dense_eig(h), psi0, eps), nan, true});
    }
  }

  bool all_pass = true;
  for (const auto& r : rows) all_pass = all_pass && r.pass;

  Sink sink(c, out);
  auto& os = sink.get();
  if (c.format == "csv") {
    write_metadata(os, c, kDiagColumns);
    write_csv(os, rows);
  } else {
    json arr = json::array();
    for (const auto& r : rows) {
      arr.push_back({{"L", r.length}, {"eps", r.eps}, {"quantity", r.quantity}, {"value", r.value},
                     {"bound", std::isnan(r.bound) ? json(nullptr) : json(r.bound)}, {"pass", r.pass}});
    }
    json j = header_json(c, kDiagColumns);
    j["rows"] = arr;
    os << j.dump(2) << '\n';
  }
  return all_pass ? 0 : 1;
}

}  // namespace

int cli_main(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"NAND-tree evaluation by quantum-walk scattering"};
  app.name("nandwalk");
  app.set_version_flag("--version", code_version());
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  Options eval_o, scatter_o, run_o, sweep_o, parity_o, diag_o;
  bool randomized = false;
  double emin = 1e-8;
  std::string emax = "auto";
  int points = 64;
  bool table = false;
  std::string parity_bits;
  std::vector<int> parity_k{2, 4, 8};
  std::vector<int> diag_lengths{16, 64, 256};
  std::vector<double> diag_eps{0.1, 0.3};
  int diag_grid = 1000;

  auto* eval = app.add_subcommand("eval", "Classical evaluation of the tree");
  add_input(eval, eval_o);
  eval_o.opts["seed"] = eval->add_option("--seed", eval_o.seed, "RNG seed for --randomized");
  eval_o.format = "text";
  add_output(eval, eval_o, {"text", "csv", "json"});
  add_extra(eval, eval_o, "--randomized", "randomized", randomized,
            "Use randomized short-circuit evaluation and report queries");

  auto* scatter = app.add_subcommand("scatter", "Y(E), T(E) and the small-energy bound scan");
  add_input(scatter, scatter_o);
  add_random(scatter, scatter_o);
  add_output(scatter, scatter_o, {"csv", "json"});
  add_extra(scatter, scatter_o, "--emin", "emin", emin, "Lower end of the energy grid");
  add_extra(scatter, scatter_o, "--emax", "emax", emax, "Upper end, or 'auto' for 1/(16 sqrt(N))");
  add_extra(scatter, scatter_o, "--points", "points", points, "Log-spaced grid points");
  add_extra(scatter, scatter_o, "--table", "table", table, "Emit the raw Y/T/R table instead of the bound scan");

  auto* run = app.add_subcommand("run", "Single scattering run; prints the verdict");
  add_input(run, run_o);
  add_walk(run, run_o);
  run_o.format = "json";
  add_output(run, run_o, {"csv", "json"});

  auto* sweep = app.add_subcommand("sweep", "gamma x N x instances grid of runs");
  sweep_o.gammas = {4.0, 16.0, 64.0};
  add_input(sweep, sweep_o);
  add_random(sweep, sweep_o);
  add_walk(sweep, sweep_o);
  add_output(sweep, sweep_o, {"csv", "json"});

  auto* parity = app.add_subcommand("embed-parity", "Build the parity trees and check them exhaustively");
  add_output(parity, parity_o, {"csv", "json"});
  add_extra(parity, parity_o, "--bits", "bits", parity_bits, "Single parity input; overrides --k");
  add_extra(parity, parity_o, "--k", "k", parity_k, "Parity sizes to check over all inputs")->delimiter(',');

  auto* diag = app.add_subcommand("diagnose", "Packet spectrum and energy-window checks");
  add_input(diag, diag_o);
  add_walk(diag, diag_o);
  add_output(diag, diag_o, {"csv", "json"});
  add_extra(diag, diag_o, "--L", "L", diag_lengths, "Packet lengths")->delimiter(',');
  add_extra(diag, diag_o, "--eps", "eps", diag_eps, "Momentum window half-widths")->delimiter(',');
  add_extra(diag, diag_o, "--grid", "grid", diag_grid, "Grid points for the pointwise check");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  // Extra option values are read after parsing.
  eval_o.extra = {{"randomized", randomized}};
  scatter_o.extra = {{"emin", emin}, {"emax", emax}, {"points", points}, {"table", table}};
  parity_o.extra = {{"bits", parity_bits}, {"k", parity_k}};
  diag_o.extra = {{"L", diag_lengths}, {"eps", diag_eps}, {"grid", diag_grid}};

  try {
    if (eval->parsed()) return cmd_eval(resolve("eval", eval_o), out);
    if (scatter->parsed()) return cmd_scatter(resolve("scatter", scatter_o), out);
    if (run->parsed()) return cmd_run(resolve("run", run_o), out);
    if (sweep->parsed()) return cmd_sweep(resolve("sweep", sweep_o), out);
    if (parity->parsed()) return cmd_embed_parity(resolve("embed-parity", parity_o), out);
    if (diag->parsed()) return cmd_diagnose(resolve("diagnose", diag_o), out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::length_error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const json::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << '\n';
    return 1;
  }
  err << "error: no subcommand\n";
  return 2;
}

}  // namespace nandwalk
