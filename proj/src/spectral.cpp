#include "nandwalk/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace nandwalk {

namespace {

constexpr double kPi = std::numbers::pi;

// sum_{r=0}^{L-1} e^{i r x}
std::complex<double> dirichlet_sum(int length, double x) {
  const double half_sin = std::sin(x / 2.0);
  if (std::abs(half_sin) < 1e-7) {
    std::complex<double> acc = 0.0;
    for (int r = 0; r < length; ++r) acc += std::polar(1.0, r * x);
    return acc;
  }
  return std::polar(std::sin(length * x / 2.0) / half_sin, (length - 1) * x / 2.0);
}

// |A(phi)|^2 / 2pi, the Fejer kernel scaled to unit mass.
double fejer_density(int length, double phi) {
  const double s = std::sin(phi / 2.0);
  if (std::abs(s) < 1e-7) {
    const double a = std::abs(dirichlet_sum(length, phi));
    return a * a / (2.0 * kPi * length);
  }
  const double num = std::sin(length * phi / 2.0);
  return num * num / (s * s) / (2.0 * kPi * length);
}

void check_length(int length) {
  if (length < 1) throw std::invalid_argument("packet length must be positive");
}

}  // namespace

PacketAmplitudes packet_spectrum(int length, double phi) {
  check_length(length);
  if (!(phi >= -kPi - 1e-12 && phi <= kPi + 1e-12)) throw std::domain_error("phi outside [-pi, pi]");
  const double norm = 1.0 / std::sqrt(static_cast<double>(length));
  // (-1)^r e^{-i r phi} = e^{i r (pi - phi)}
  return {norm * dirichlet_sum(length, phi), norm * dirichlet_sum(length, kPi - phi)};
}

SpectrumProfile spectrum_profile(int length, int points) {
  if (points < 2) throw std::invalid_argument("need at least two grid points");
  SpectrumProfile p;
  p.length = length;
  for (int k = 0; k < points; ++k) {
    const double phi = -kPi + 2.0 * kPi * k / (points - 1);
    const auto amp = packet_spectrum(length, phi);
    p.phis.push_back(phi);
    p.A.push_back(amp.A);
    p.B.push_back(amp.B);
  }
  return p;
}

double packet_mass(int length, double lo, double hi) {
  check_length(length);
  if (!(lo >= -kPi - 1e-15 && hi <= kPi + 1e-15 && lo <= hi)) {
    throw std::domain_error("packet_mass interval must lie in [-pi, pi]");
  }
  using boost::math::quadrature::gauss_kronrod;
  auto f = [length](double phi) { return fejer_density(length, phi); };
  // integrate lobe by lobe between zeros at multiples of 2pi/L
  const double lobe = 2.0 * kPi / length;
  double total = 0.0;
  double a = lo;
  while (a < hi) {
    double b = (std::floor(a / lobe + 1e-12) + 1.0) * lobe;
    b = std::min(b, hi);
    if (b - a > 1e-15) {
      double err = 0.0;
      total += gauss_kronrod<double, 31>::integrate(f, a, b, 15, 1e-12, &err);
      if (!std::isfinite(total) || err > 1e-10 * std::max(1.0, std::abs(total))) {
        throw std::runtime_error("packet_mass quadrature did not converge");
      }
    }
    a = b;
  }
  return total;
}

double tail_mass(int length, double eps) {
  if (!(eps > 0.0 && eps < kPi)) throw std::domain_error("tail_mass needs 0 < eps < pi");
  return 2.0 * packet_mass(length, eps, kPi);
}

double b_window_bound(int length, double eps) {
  const double c = std::cos(eps / 2.0);
  return 1.0 / (length * c * c);
}

double window_weight(const Eigensystem& eig, const StateVector& psi0, double eps) {
  if (!(eps > 0.0)) throw std::domain_error("window_weight needs eps > 0");
  if (psi0.size() != eig.vectors.rows()) throw std::invalid_argument("state dimension mismatch");
  const bool whole_band = eps >= kPi / 2.0;
  const double edge = whole_band ? 2.0 : 2.0 * std::sin(eps);
  const Eigen::VectorXcd coeffs = eig.vectors.cast<std::complex<double>>().adjoint() * psi0;
  double w = 0.0;
  for (Eigen::Index i = 0; i < coeffs.size(); ++i) {
    const double lam = std::abs(eig.values[i]);
    if (whole_band ? lam <= edge : lam < edge) w += std::norm(coeffs[i]);
  }
  return w;
}

double error_budget(double length, double eps, double slope_bound) {
  if (!(length > 0 && eps > 0 && slope_bound > 0)) {
    throw std::domain_error("error_budget needs positive inputs");
  }
  return std::max({1.0 / std::sqrt(length * eps), slope_bound * std::sqrt(eps / length),
                   std::pow(eps / length, 0.25)});
}

double default_window(std::size_t leaves) { return 1.0 / (16.0 * std::sqrt(double(leaves))); }

double default_slope_bound(std::size_t leaves) { return 8.0 * std::sqrt(double(leaves)); }

bool dispersion_regime(double length, double eps) { return length * eps * eps * eps < 0.1; }

std::vector<DiagnosticRow> packet_diagnostics(int length, double eps, int grid_points) {
  std::vector<DiagnosticRow> rows;

  const double parseval = packet_mass(length, -kPi, kPi);
  rows.push_back({length, eps, "parseval", parseval, 1.0, std::abs(parseval - 1.0) < 1e-10});

  const double tail = tail_mass(length, eps);
  const double tail_bound = tail_mass_bound(length, eps);
  rows.push_back({length, eps, "tail_mass", tail, tail_bound, tail < tail_bound});

  double b_max = 0.0;
  for (int k = 0; k < grid_points; ++k) {
    // open grid on (-eps, eps)
    const double phi = -eps + 2.0 * eps * (k + 0.5) / grid_points;
    b_max = std::max(b_max, std::norm(packet_spectrum(length, phi).B));
  }
  const double b_bound = b_window_bound(length, eps);
  rows.push_back({length, eps, "b_window_max", b_max, b_bound, b_max < b_bound});
  return rows;
}

void write_csv(std::ostream& os, const std::vector<DiagnosticRow>& rows) {
  const auto old_precision = os.precision(17);
  os << "L,eps,quantity,value,bound,pass\n";
  for (const auto& r : rows) {
    os << r.length << ',' << r.eps << ',' << r.quantity << ',' << r.value << ',' << r.bound << ','
       << (r.pass ? 1 : 0) << '\n';
  }
  os.precision(old_precision);
}

}  // namespace nandwalk
