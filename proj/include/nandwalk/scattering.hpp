#pragma once

// Edge-ratio recursion Y(E) through the tree and the resulting runway
// transmission/reflection coefficients.

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "nandwalk/nand_core.hpp"

namespace nandwalk {

/// Y = num / den, kept projective so that poles (den == 0) are ordinary
/// values. Always renormalized to max(|num|, |den|) == 1.
struct ProjectiveValue {
  double num = 0.0;
  double den = 1.0;

  /// Throws DegenerateValue when both components vanish.
  static ProjectiveValue normalized(double num, double den);

  bool is_pole() const noexcept { return den == 0.0; }
  /// num/den; +-inf at a pole.
  double ratio() const noexcept;
  /// |num/den|; +inf at a pole.
  double magnitude() const noexcept;
};

/// E -> 0+ limits of Y: Zero encodes logical 1, Pole encodes logical 0.
enum class SymbolicY { Zero, Pole };

/// Y on the edge from a leaf down to its parent: E/(1-E^2) when the leaf's
/// extra node is attached, -1/E otherwise.
ProjectiveValue leaf_y(Bit bit, double energy);

/// Y = -1/(E + Y' + Y'') for the edge below a node whose upper edges carry
/// Y' and Y''.
ProjectiveValue combine_y(const ProjectiveValue& upper_left, const ProjectiveValue& upper_right,
                          double energy);

/// y(E) = <root|E> / <r=0|E>: the recursion folded from the leaves through
/// the root. Odd in E.
ProjectiveValue y_bottom(const TreeInput& input, double energy);

/// Exact E -> 0+ recursion; equals Zero iff eval_nand(input) == 1.
SymbolicY y_at_zero(const TreeInput& input);

struct Transmission {
  std::complex<double> T;
  std::complex<double> R;
};

/// T = 2i sin(theta) / (2i sin(theta) + y), theta = arccos(-E/2) in (0, pi),
/// and R = T - 1. Requires |E| < 2.
Transmission transmission(double energy, const ProjectiveValue& y);

struct ScatteringPoint {
  double energy = 0.0;
  double theta = 0.0;
  ProjectiveValue y;
  std::complex<double> T;
  std::complex<double> R;
};

ScatteringPoint scatter_at(const TreeInput& input, double energy);

struct BoundRow {
  double energy = 0.0;
  int nand = 0;
  double abs_y = 0.0;
  /// |T| when the tree value is 0, |T - 1| when it is 1.
  double abs_T = 0.0;
  double bound_y = 0.0;
  double bound_T = 0.0;
  bool pass = false;

  /// Slack of the tighter of the two inequalities as a ratio; > 1 passes.
  double margin() const noexcept;
};

struct BoundReport {
  std::size_t leaves = 0;
  int instance_id = 0;
  int nand = 0;
  std::vector<BoundRow> rows;

  std::size_t violations() const noexcept;
  double worst_margin() const noexcept;
};

/// Upper end (exclusive) of the small-energy window, 1/(16 sqrt(N)).
double bound_window(std::size_t leaves) noexcept;

/// `points` log-spaced energies strictly inside (lo, hi).
std::vector<double> log_grid(double lo, double hi, int points);

/// Checks, at every grid energy, the reflect/transmit inequalities:
///   NAND = 0: |y| > 1/(4 sqrt(N) E) and |T| < 8 sqrt(N) E
///   NAND = 1: |y| < 4 sqrt(N) E     and |T - 1| < 3 sqrt(N) E
/// Throws std::domain_error if a grid point lies outside (0, 1/(16 sqrt(N))).
BoundReport scan_bounds(const TreeInput& input, std::span<const double> grid, int instance_id = 0);

void write_csv_header(std::ostream& os, const BoundReport&);
void write_csv_rows(std::ostream& os, const BoundReport& report);

}  // namespace nandwalk
