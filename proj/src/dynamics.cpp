#include "nandwalk/dynamics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "nandwalk/scattering.hpp"

namespace nandwalk {

namespace {

// i^k for integer k.
std::complex<double> i_pow(long k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return {1, 0};
    case 1: return {0, 1};
    case 2: return {-1, 0};
    default: return {0, -1};
  }
}

double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

struct EnvelopeSample {
  int site;
  std::complex<double> value;  // carrier i^site removed
};

std::vector<EnvelopeSample> packet_envelope(const StateVector& psi0, const IndexMap& map) {
  std::vector<EnvelopeSample> out;
  const int m = map.half_runway();
  for (int s = -m; s <= m; ++s) {
    const auto a = psi0[static_cast<Eigen::Index>(map.runway_index(s))];
    if (a != 0.0) out.push_back({s, i_pow(-s) * a});
  }
  return out;
}

std::complex<double> shifted_envelope(const std::vector<EnvelopeSample>& envelope, int r,
                                      double shift) {
  std::complex<double> acc = 0.0;
  for (const auto& e : envelope) acc += e.value * sinc(r - shift - e.site);
  return i_pow(r) * acc;
}

}  // namespace

std::string to_string(Propagator p) { return p == Propagator::Exact ? "exact" : "cheb"; }

Propagator parse_propagator(const std::string& name) {
  if (name == "cheb" || name == "chebyshev") return Propagator::Chebyshev;
  if (name == "exact") return Propagator::Exact;
  throw std::invalid_argument("unknown propagator '" + name + "'");
}

int packet_length(double gamma, std::size_t leaves) {
  const double raw = gamma * std::sqrt(static_cast<double>(leaves));
  const int length = 2 * static_cast<int>(std::lround(raw / 2.0));
  if (length < 4) {
    throw std::invalid_argument("packet length " + std::to_string(length) + " below 4; raise gamma");
  }
  return length;
}

StateVector initial_packet(int length, const IndexMap& map) {
  if (length < 1) throw std::invalid_argument("packet length must be positive");
  if (!map.has_runway() || length > map.half_runway()) {
    throw std::invalid_argument("packet length exceeds runway half-length");
  }
  StateVector psi = StateVector::Zero(static_cast<Eigen::Index>(map.dim()));
  const double amp = 1.0 / std::sqrt(static_cast<double>(length));
  for (int r = -length + 1; r <= 0; ++r) {
    psi[static_cast<Eigen::Index>(map.runway_index(r))] = amp * i_pow(r);
  }
  return psi;
}

StateVector evolve_exact(const Eigensystem& eig, const StateVector& psi, double t) {
  if (psi.size() != eig.vectors.rows()) throw std::invalid_argument("state dimension mismatch");
  const Eigen::MatrixXcd v = eig.vectors.cast<std::complex<double>>();
  Eigen::VectorXcd coeffs = v.adjoint() * psi;
  for (Eigen::Index i = 0; i < coeffs.size(); ++i) {
    coeffs[i] *= std::exp(std::complex<double>(0.0, -eig.values[i] * t));
  }
  return v * coeffs;
}

double prob_right(const StateVector& psi, const IndexMap& map) {
  double p = 0.0;
  for (int r = 1; r <= map.half_runway(); ++r) {
    p += std::norm(psi[static_cast<Eigen::Index>(map.runway_index(r))]);
  }
  return p;
}

double prob_left_and_tree(const StateVector& psi, const IndexMap& map) {
  return psi.squaredNorm() - prob_right(psi, map);
}

nlohmann::json Verdict::to_json() const {
  return {
      {"decision", decision},
      {"p_right", p_right},
      {"analytic_T0_sq", analytic_T0_sq},
      {"threshold", threshold},
      {"config",
       {{"input", input},
        {"gamma", gamma},
        {"L", packet_length},
        {"M", half_runway},
        {"t_run", t_run},
        {"dim", dim},
        {"propagator", to_string(propagator)},
        {"tolerance", tolerance}}},
  };
}

RunState evolve_packet(const TreeInput& input, const RunConfig& config) {
  if (config.m_factor < 3) throw std::invalid_argument("runway factor must be >= 3 (M >= 3L)");
  if (!(config.gamma >= 1.0)) throw std::invalid_argument("gamma must be >= 1");
  const int length = packet_length(config.gamma, input.size());
  const int half_runway = config.m_factor * length;
  HamiltonianGraph graph = build_full(input, half_runway);
  StateVector psi0 = initial_packet(length, graph.index_map());
  const double t_run = length / 2.0;

  StateVector psi_t;
  if (config.propagator == Propagator::Exact) {
    psi_t = evolve_exact(dense_eig(graph), psi0, t_run);
  } else {
    ChebyshevOptions opts;
    opts.tolerance = config.tolerance;
    psi_t = evolve_cheb(graph, psi0, t_run, opts);
  }
  return {std::move(graph), std::move(psi0), std::move(psi_t), length, t_run};
}

Verdict run_algorithm(const TreeInput& input, const RunConfig& config) {
  const RunState state = evolve_packet(input, config);
  Verdict v;
  v.p_right = prob_right(state.psi_t, state.graph.index_map());
  v.threshold = config.threshold;
  v.decision = v.p_right >= config.threshold ? 1 : 0;
  v.analytic_T0_sq = y_at_zero(input) == SymbolicY::Zero ? 1.0 : 0.0;
  v.input = input.to_string();
  v.gamma = config.gamma;
  v.packet_length = state.packet_length;
  v.half_runway = state.graph.index_map().half_runway();
  v.t_run = state.t_run;
  v.dim = state.graph.dim();
  v.propagator = config.propagator;
  v.tolerance = config.tolerance;
  return v;
}

std::complex<double> translated_amplitude(const StateVector& psi0, const IndexMap& map, int r,
                                          double shift) {
  return shifted_envelope(packet_envelope(psi0, map), r, shift);
}

double translation_residual(const StateVector& psi_t, const StateVector& psi0,
                            const IndexMap& map, std::complex<double> T0, double t) {
  const int m = map.half_runway();
  if (!(t >= 0.0) || 2.0 * t > m) throw std::domain_error("2t must lie within the runway");
  const auto envelope = packet_envelope(psi0, map);
  double sum = 0.0;
  for (int r = 1; r <= m; ++r) {
    const auto actual = psi_t[static_cast<Eigen::Index>(map.runway_index(r))];
    sum += std::norm(actual - T0 * shifted_envelope(envelope, r, 2.0 * t));
  }
  return std::sqrt(sum);
}

}  // namespace nandwalk
