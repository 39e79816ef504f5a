#include "nandwalk/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "nandwalk/errors.hpp"

namespace nandwalk {

ProjectiveValue ProjectiveValue::normalized(double num, double den) {
  const double scale = std::max(std::abs(num), std::abs(den));
  if (scale == 0.0 || !std::isfinite(scale)) {
    throw DegenerateValue("projective value collapsed to (0, 0)");
  }
  return {num / scale, den / scale};
}

double ProjectiveValue::ratio() const noexcept {
  if (den == 0.0) return num > 0 ? std::numeric_limits<double>::infinity()
                                  : -std::numeric_limits<double>::infinity();
  return num / den;
}

double ProjectiveValue::magnitude() const noexcept {
  if (den == 0.0) return std::numeric_limits<double>::infinity();
  return std::abs(num / den);
}

ProjectiveValue leaf_y(Bit bit, double energy) {
  if (bit) return ProjectiveValue::normalized(energy, 1.0 - energy * energy);
  return ProjectiveValue::normalized(-1.0, energy);
}

ProjectiveValue combine_y(const ProjectiveValue& a, const ProjectiveValue& b, double energy) {
  const double qq = a.den * b.den;
  return ProjectiveValue::normalized(-qq, energy * qq + a.num * b.den + b.num * a.den);
}

ProjectiveValue y_bottom(const TreeInput& input, double energy) {
  std::vector<ProjectiveValue> level;
  level.reserve(input.size());
  for (Bit b : input.bits()) level.push_back(leaf_y(b, energy));
  while (level.size() > 1) {
    for (std::size_t i = 0; i < level.size() / 2; ++i) {
      level[i] = combine_y(level[2 * i], level[2 * i + 1], energy);
    }
    level.resize(level.size() / 2);
  }
  return level.front();
}

SymbolicY y_at_zero(const TreeInput& input) {
  // Y(0) of a leaf: attached -> 0, detached -> pole. A node's Y is 0 unless
  // both upper edges carry 0, in which case -1/(0 + 0 + 0) is a pole.
  std::vector<SymbolicY> level;
  level.reserve(input.size());
  for (Bit b : input.bits()) level.push_back(b ? SymbolicY::Zero : SymbolicY::Pole);
  while (level.size() > 1) {
    for (std::size_t i = 0; i < level.size() / 2; ++i) {
      const bool both_zero = level[2 * i] == SymbolicY::Zero && level[2 * i + 1] == SymbolicY::Zero;
      level[i] = both_zero ? SymbolicY::Pole : SymbolicY::Zero;
    }
    level.resize(level.size() / 2);
  }
  return level.front();
}

Transmission transmission(double energy, const ProjectiveValue& y) {
  if (!(std::abs(energy) < 2.0)) throw std::domain_error("transmission needs |E| < 2");
  const double s = std::sqrt(1.0 - energy * energy / 4.0);
  const std::complex<double> two_i_s_q(0.0, 2.0 * s * y.den);
  const std::complex<double> denom = two_i_s_q + y.num;
  if (denom == 0.0) throw std::logic_error("transmission denominator vanished");
  const std::complex<double> T = two_i_s_q / denom;
  return {T, T - 1.0};
}

ScatteringPoint scatter_at(const TreeInput& input, double energy) {
  ScatteringPoint p;
  p.energy = energy;
  p.theta = std::acos(-energy / 2.0);
  p.y = y_bottom(input, energy);
  const auto tr = transmission(energy, p.y);
  p.T = tr.T;
  p.R = tr.R;
  return p;
}

double BoundRow::margin() const noexcept {
  const double inf = std::numeric_limits<double>::infinity();
  const double t_margin = abs_T > 0 ? bound_T / abs_T : inf;
  double y_margin;
  if (nand == 0) {
    y_margin = abs_y / bound_y;
  } else {
    y_margin = abs_y > 0 ? bound_y / abs_y : inf;
  }
  return std::min(t_margin, y_margin);
}

std::size_t BoundReport::violations() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [](const BoundRow& r) { return !r.pass; }));
}

double BoundReport::worst_margin() const noexcept {
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& r : rows) worst = std::min(worst, r.margin());
  return worst;
}

double bound_window(std::size_t leaves) noexcept {
  return 1.0 / (16.0 * std::sqrt(static_cast<double>(leaves)));
}

std::vector<double> log_grid(double lo, double hi, int points) {
  if (!(lo > 0.0 && hi > lo) || points < 1) throw std::invalid_argument("bad log grid");
  std::vector<double> grid;
  grid.reserve(points);
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (int i = 0; i < points; ++i) {
    // midpoints of `points` equal log-cells keep both ends open
    grid.push_back(std::exp(a + (b - a) * (i + 0.5) / points));
  }
  return grid;
}

BoundReport scan_bounds(const TreeInput& input, std::span<const double> grid, int instance_id) {
  const double root_n = std::sqrt(static_cast<double>(input.size()));
  const double window = bound_window(input.size());
  BoundReport report;
  report.leaves = input.size();
  report.instance_id = instance_id;
  report.nand = eval_nand(input);
  report.rows.reserve(grid.size());
  for (double e : grid) {
    if (!(e > 0.0 && e < window)) {
      throw std::domain_error("energy " + std::to_string(e) + " outside (0, 1/(16 sqrt N))");
    }
    const auto y = y_bottom(input, e);
    const auto tr = transmission(e, y);
    BoundRow row;
    row.energy = e;
    row.nand = report.nand;
    row.abs_y = y.magnitude();
    if (report.nand == 0) {
      row.bound_y = 1.0 / (4.0 * root_n * e);
      row.bound_T = 8.0 * root_n * e;
      row.abs_T = std::abs(tr.T);
      row.pass = row.abs_y > row.bound_y && row.abs_T < row.bound_T;
    } else {
      row.bound_y = 4.0 * root_n * e;
      row.bound_T = 3.0 * root_n * e;
      row.abs_T = std::abs(tr.T - 1.0);
      row.pass = row.abs_y < row.bound_y && row.abs_T < row.bound_T;
    }
    report.rows.push_back(row);
  }
  return report;
}

void write_csv_header(std::ostream& os, const BoundReport&) {
  os << "N,instance_id,E,nand,abs_y,abs_T,bound_y,bound_T,pass\n";
}

void write_csv_rows(std::ostream& os, const BoundReport& report) {
  const auto old_precision = os.precision(17);
  for (const auto& r : report.rows) {
    os << report.leaves << ',' << report.instance_id << ',' << r.energy << ',' << report.nand
       << ',' << r.abs_y << ',' << r.abs_T << ',' << r.bound_y << ',' << r.bound_T << ','
       << (r.pass ? 1 : 0) << '\n';
  }
  os.precision(old_precision);
}

}  // namespace nandwalk
