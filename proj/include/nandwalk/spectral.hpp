#pragma once

// Momentum-space view of the runway packet: A(phi), B(phi), their
// quadratures, and the energy-window weight of the finite-runway packet.

#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

#include "nandwalk/dynamics.hpp"
#include "nandwalk/lattice.hpp"

namespace nandwalk {

/// A(phi) = L^{-1/2} sum_{r<L} e^{i r phi},
/// B(phi) = L^{-1/2} sum_{r<L} (-1)^r e^{-i r phi}.
struct PacketAmplitudes {
  std::complex<double> A;
  std::complex<double> B;
};

/// Closed forms, with the removable singularities (A at phi = 0, B at
/// phi = +-pi) taken as limits. phi must lie in [-pi, pi].
PacketAmplitudes packet_spectrum(int length, double phi);

struct SpectrumProfile {
  int length = 0;
  std::vector<double> phis;
  std::vector<std::complex<double>> A;
  std::vector<std::complex<double>> B;
};

/// Uniform grid of `points` angles over [-pi, pi].
SpectrumProfile spectrum_profile(int length, int points);

/// Integral of |A(phi)|^2 / 2pi over [lo, hi] subset of [-pi, pi]
/// (adaptive Gauss-Kronrod, relative tolerance 1e-10 per lobe).
double packet_mass(int length, double lo, double hi);

/// Packet mass outside the momentum window: |phi| in [eps, pi].
double tail_mass(int length, double eps);

/// Upper bound pi / (L eps) on tail_mass.
inline double tail_mass_bound(int length, double eps) {
  return 3.14159265358979323846 / (length * eps);
}

/// Upper bound 1 / (L cos^2(eps/2)) on |B(phi)|^2 for |phi| < eps.
double b_window_bound(int length, double eps);

/// Spectral weight of psi0 on eigenstates with |lambda| < 2 sin(eps); for
/// eps >= pi/2 the window is the closed band |lambda| <= 2.
double window_weight(const Eigensystem& eig, const StateVector& psi0, double eps);

/// max(1/sqrt(L eps), D sqrt(eps/L), (eps/L)^{1/4}).
double error_budget(double length, double eps, double slope_bound);

/// eps = 1/(16 sqrt(N)).
double default_window(std::size_t leaves);
/// D = 8 sqrt(N).
double default_slope_bound(std::size_t leaves);

/// L eps^3 < 0.1, the regime where the dispersion correction stays small.
bool dispersion_regime(double length, double eps);

struct DiagnosticRow {
  int length = 0;
  double eps = 0.0;
  std::string quantity;
  double value = 0.0;
  double bound = 0.0;
  bool pass = false;
};

/// Parseval mass, tail mass and max |B|^2 on a dense window grid, each with
/// its bound.
std::vector<DiagnosticRow> packet_diagnostics(int length, double eps, int grid_points = 1000);

void write_csv(std::ostream& os, const std::vector<DiagnosticRow>& rows);

}  // namespace nandwalk
