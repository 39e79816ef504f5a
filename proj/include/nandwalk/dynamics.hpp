#pragma once

// Runway wave packet, exp(-iHt) propagation and the scattering-based
// evaluation procedure.

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "nandwalk/lattice.hpp"
#include "nandwalk/nand_core.hpp"

namespace nandwalk {

/// Complex amplitudes over the flat node index of an IndexMap.
using StateVector = Eigen::VectorXcd;

enum class Propagator { Chebyshev, Exact };

std::string to_string(Propagator p);
/// Accepts "cheb"/"chebyshev" and "exact".
Propagator parse_propagator(const std::string& name);

struct RunConfig {
  double gamma = 16.0;
  /// M = m_factor * L.
  int m_factor = 3;
  Propagator propagator = Propagator::Chebyshev;
  /// Chebyshev coefficient-tail tolerance.
  double tolerance = 1e-12;
  double threshold = 0.5;
};

/// L = round(gamma sqrt(N)) rounded to the nearest even integer; throws
/// std::invalid_argument if that is below 4.
int packet_length(double gamma, std::size_t leaves);

/// e^{i pi r/2} / sqrt(L) on runway sites -L+1..0, zero elsewhere.
/// Throws std::invalid_argument if the runway is shorter than L.
StateVector initial_packet(int length, const IndexMap& map);

struct ChebyshevOptions {
  /// Upper bound on |spectrum|; the maximum degree of the graph.
  double spectral_bound = 3.0;
  /// Sum of dropped |coefficients|.
  double tolerance = 1e-12;
  /// Coefficient budget; exceeding it raises ConvergenceError.
  std::size_t max_terms = 200000;
};

/// Bessel J_0..J_kmax at x >= 0 by normalized backward recurrence.
std::vector<double> bessel_j_sequence(double x, std::size_t kmax);

/// Number of Chebyshev terms needed so the coefficient tail of exp(-iHt)
/// stays below `tolerance`, for argument x = spectral_bound * |t|.
std::size_t chebyshev_terms(double x, double tolerance, std::size_t max_terms);

/// Chebyshev expansion of exp(-iHt) psi.
StateVector evolve_cheb(const HamiltonianGraph& h, const StateVector& psi, double t,
                        const ChebyshevOptions& opts = {});

/// sum_i exp(-i lambda_i t) <v_i|psi> v_i.
StateVector evolve_exact(const Eigensystem& eig, const StateVector& psi, double t);

/// Probability on runway sites r = 1..M.
double prob_right(const StateVector& psi, const IndexMap& map);

/// Probability on runway sites r <= 0 plus the tree and extra nodes.
double prob_left_and_tree(const StateVector& psi, const IndexMap& map);

struct Verdict {
  int decision = 0;
  double p_right = 0.0;
  double analytic_T0_sq = 0.0;
  double threshold = 0.5;
  // config echo
  std::string input;
  double gamma = 0.0;
  int packet_length = 0;
  int half_runway = 0;
  double t_run = 0.0;
  std::size_t dim = 0;
  Propagator propagator = Propagator::Chebyshev;
  double tolerance = 0.0;

  nlohmann::json to_json() const;
};

/// Build H with M = m_factor * L, evolve the packet for t = L/2, measure the
/// right-runway probability and threshold it.
Verdict run_algorithm(const TreeInput& input, const RunConfig& config);

/// State right after the evolution, for callers needing more than p_right.
struct RunState {
  HamiltonianGraph graph;
  StateVector psi0;
  StateVector psi_t;
  int packet_length;
  double t_run;
};
RunState evolve_packet(const TreeInput& input, const RunConfig& config);

/// Reference amplitude of the translated packet at site r:
///   i^r * sum_s i^{-s} psi0(s) sinc(r - shift - s),
/// the band-limited continuation of psi0 shifted by `shift` sites. For an
/// integer shift this is i^{shift} psi0(r - shift).
std::complex<double> translated_amplitude(const StateVector& psi0, const IndexMap& map, int r,
                                          double shift);

/// L2 norm over r > 0 of psi_t(r) - T0 * translated_amplitude(psi0, r, 2t).
/// Requires 0 <= 2t <= M.
double translation_residual(const StateVector& psi_t, const StateVector& psi0,
                            const IndexMap& map, std::complex<double> T0, double t);

}  // namespace nandwalk
