#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include "nandwalk/dynamics.hpp"
#include "nandwalk/errors.hpp"

namespace nandwalk {

namespace {

constexpr double kRescaleAbove = 1e250;

}  // namespace

std::vector<double> bessel_j_sequence(double x, std::size_t kmax) {
  if (x < 0.0 || !std::isfinite(x)) throw std::domain_error("bessel_j_sequence needs finite x >= 0");
  std::vector<double> j(kmax + 1, 0.0);
  if (x == 0.0) {
    j[0] = 1.0;
    return j;
  }
  // Miller: start well above both kmax and x, recur downward from (1, 0),
  // then normalize with J_0 + 2 sum_k J_2k = 1.
  const double top = std::max(static_cast<double>(kmax), x);
  std::size_t start = static_cast<std::size_t>(top + 20.0 + std::sqrt(40.0 * top));
  start += start % 2;

  double next = 0.0;  // J_{k+1}
  double cur = 1e-300;  // J_k, k = start
  double norm = 0.0;
  for (std::size_t k = start; k > 0; --k) {
    if (k <= kmax) j[k] = cur;
    if (k % 2 == 0) norm += 2.0 * cur;
    const double prev = (2.0 * static_cast<double>(k) / x) * cur - next;
    next = cur;
    cur = prev;
    if (std::abs(cur) > kRescaleAbove) {
      const double s = 1.0 / kRescaleAbove;
      cur *= s;
      next *= s;
      norm *= s;
      for (std::size_t i = k; i <= std::min(kmax, start); ++i) j[i] *= s;
    }
  }
  j[0] = cur;
  norm += cur;
  for (double& v : j) v /= norm;
  return j;
}

std::size_t chebyshev_terms(double x, double tolerance, std::size_t max_terms) {
  if (x == 0.0) return 1;
  std::size_t kmax = static_cast<std::size_t>(x + 40.0 + 10.0 * std::cbrt(x));
  while (true) {
    const auto j = bessel_j_sequence(x, kmax);
    if (2.0 * std::abs(j[kmax]) < tolerance * 1e-6) {
      double tail = 0.0;
      std::size_t k = kmax;
      while (k > 0 && tail + 2.0 * std::abs(j[k]) < tolerance) {
        tail += 2.0 * std::abs(j[k]);
        --k;
      }
      const std::size_t terms = k + 1;
      if (terms > max_terms) {
        throw ConvergenceError("Chebyshev expansion needs " + std::to_string(terms) +
                               " terms, budget is " + std::to_string(max_terms));
      }
      return terms;
    }
    if (kmax > max_terms) {
      throw ConvergenceError("Chebyshev coefficients do not decay within budget " +
                             std::to_string(max_terms));
    }
    kmax *= 2;
  }
}

StateVector evolve_cheb(const HamiltonianGraph& h, const StateVector& psi, double t,
                        const ChebyshevOptions& opts) {
  if (static_cast<std::size_t>(psi.size()) != h.dim()) {
    throw std::invalid_argument("state dimension does not match Hamiltonian");
  }
  if (!(opts.tolerance >= 1e-14)) throw std::invalid_argument("Chebyshev tolerance must be >= 1e-14");
  if (!(opts.spectral_bound > 0.0)) throw std::invalid_argument("spectral bound must be positive");

  const double rho = opts.spectral_bound;
  const double x = rho * std::abs(t);
  const std::size_t terms = chebyshev_terms(x, opts.tolerance, opts.max_terms);
  if (terms == 1 && x == 0.0) return psi;
  const auto bessel = bessel_j_sequence(x, terms - 1);

  // c_k = (2 - delta_k0) (-i sign t)^k J_k(rho |t|)
  const std::complex<double> step = t >= 0 ? std::complex<double>(0, -1) : std::complex<double>(0, 1);
  std::complex<double> phase = 1.0;

  StateVector prev = psi;
  StateVector cur;
  StateVector next;
  StateVector result = bessel[0] * psi;
  if (terms == 1) return result;

  apply_h(h, prev, cur);
  cur /= rho;
  phase *= step;
  result += (2.0 * bessel[1] * phase) * cur;

  for (std::size_t k = 2; k < terms; ++k) {
    apply_h(h, cur, next);
    next *= 2.0 / rho;
    next -= prev;
    phase *= step;
    result += (2.0 * bessel[k] * phase) * next;
    std::swap(prev, cur);
    std::swap(cur, next);
  }
  return result;
}

}  // namespace nandwalk
