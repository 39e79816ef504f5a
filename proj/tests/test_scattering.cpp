#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <random>
#include <sstream>
#include <vector>

#include <Eigen/Dense>

#include "nandwalk/errors.hpp"
#include "nandwalk/lattice.hpp"
#include "nandwalk/nand_core.hpp"
#include "nandwalk/scattering.hpp"

using namespace nandwalk;
using cd = std::complex<double>;

namespace {

// Oracle: with psi(r=0) = 1 the tree amplitudes solve (E + A_tree) psi = -e_root,
// so y = psi(root) comes from one dense linear solve on the tree block.
double y_by_linear_solve(const TreeInput& in, double e) {
  const HamiltonianGraph g = build_full(in, 1);
  const IndexMap& map = g.index_map();
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < map.dim(); ++i) {
    if (!std::holds_alternative<RunwayNode>(map.node(i))) idx.push_back(i);
  }
  const Eigen::MatrixXd h = g.to_dense();
  const auto n = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) m(a, b) = -h(idx[a], idx[b]);
    m(a, a) += e;
  }
  const std::size_t root = map.flat(TreeNode{0, 0});
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  Eigen::Index root_row = 0;
  for (Eigen::Index a = 0; a < n; ++a) {
    if (idx[a] == root) root_row = a;
  }
  rhs[root_row] = -1.0;
  const Eigen::VectorXd psi = m.fullPivLu().solve(rhs);
  return psi[root_row];
}

cd transmission_oracle(double e, double y) {
  const double s = std::sqrt(1.0 - e * e / 4.0);
  const cd a(0.0, 2.0 * s);
  return a / (a + y);
}

}  // namespace

TEST(LeafY, Examples) {
  auto a = leaf_y(1, 0.0);
  EXPECT_EQ(a.num, 0.0);
  EXPECT_EQ(a.den, 1.0);
  auto b = leaf_y(0, 0.0);
  EXPECT_TRUE(b.is_pole());
  EXPECT_EQ(b.num, -1.0);
  EXPECT_NEAR(leaf_y(1, 0.5).ratio(), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(leaf_y(0, 0.25).ratio(), -4.0, 1e-15);
}

TEST(CombineY, Examples) {
  const ProjectiveValue zero{0.0, 1.0};
  const ProjectiveValue pole{-1.0, 0.0};
  const auto p = combine_y(zero, zero, 0.0);
  EXPECT_TRUE(p.is_pole());
  const auto z = combine_y(zero, pole, 0.0);
  EXPECT_EQ(z.num, 0.0);
  EXPECT_FALSE(z.is_pole());
  const auto y = combine_y(leaf_y(0, 0.1), leaf_y(0, 0.1), 0.1);
  EXPECT_NEAR(y.ratio(), -1.0 / (0.1 - 20.0), 1e-14);
}

TEST(ProjectiveValue, RejectsDegenerate) {
  EXPECT_THROW(ProjectiveValue::normalized(0.0, 0.0), DegenerateValue);
  EXPECT_THROW(ProjectiveValue::normalized(NAN, 1.0), DegenerateValue);
  const auto v = ProjectiveValue::normalized(-4.0, 2.0);
  EXPECT_EQ(std::max(std::abs(v.num), std::abs(v.den)), 1.0);
}

TEST(YBottom, MatchesLinearSolveOracle) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> energy(0.05, 0.6);
  for (int k = 0; k < 40; ++k) {
    const int depth = 1 + k % 4;
    const auto in = random_instance(depth, derive_seed(21, static_cast<std::uint64_t>(k)));
    const double e = energy(rng);
    const double want = y_by_linear_solve(in, e);
    EXPECT_NEAR(y_bottom(in, e).ratio(), want, 1e-10 * std::max(1.0, std::abs(want)))
        << in.to_string() << " E=" << e;
  }
}

TEST(YBottom, OddInEnergy) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> energy(1e-6, 0.9);
  for (int k = 0; k < 100; ++k) {
    const auto in = random_instance(1 + k % 6, derive_seed(4, static_cast<std::uint64_t>(k)));
    const double e = energy(rng);
    const double plus = y_bottom(in, e).ratio();
    const double minus = y_bottom(in, -e).ratio();
    EXPECT_NEAR(minus, -plus, 1e-12 * std::abs(plus));
  }
}

TEST(YBottom, ZeroInstanceIsLargeNearZero) {
  const auto in = parse_input("0110");
  EXPECT_GT(y_bottom(in, 1e-4).magnitude(), 1250.0);
}

TEST(YBottom, DeepTreeStaysFinite) {
  const auto in = random_instance(20, 12);
  for (double e : {1e-9, 1e-5, 1e-2, 0.3}) {
    const auto y = y_bottom(in, e);
    EXPECT_TRUE(std::isfinite(y.num) && std::isfinite(y.den));
    EXPECT_EQ(std::max(std::abs(y.num), std::abs(y.den)), 1.0);
  }
}

TEST(YAtZero, Examples) {
  EXPECT_EQ(y_at_zero(parse_input("11")), SymbolicY::Pole);
  EXPECT_EQ(y_at_zero(parse_input("00")), SymbolicY::Zero);
}

TEST(YAtZero, TracksNandValue) {
  for (unsigned mask = 0; mask < 16; ++mask) {
    std::vector<Bit> bits(4);
    for (int i = 0; i < 4; ++i) bits[static_cast<std::size_t>(i)] = (mask >> i) & 1u;
    const auto in = TreeInput::from_bits(bits);
    EXPECT_EQ(y_at_zero(in) == SymbolicY::Zero, eval_nand(in) == 1);
  }
  for (int depth : {4, 6, 8}) {
    const double root_n = std::sqrt(double(1 << depth));
    for (int k = 0; k < 512; ++k) {
      const auto in = random_instance(depth, derive_seed(31, static_cast<std::uint64_t>(k)));
      const int v = eval_nand(in);
      ASSERT_EQ(y_at_zero(in) == SymbolicY::Zero, v == 1);
      const double e = 1e-9;
      const double mag = y_bottom(in, e).magnitude();
      if (v == 1) {
        ASSERT_LT(mag, 4.0 * root_n * e);
      } else {
        ASSERT_GT(mag, 1.0 / (4.0 * root_n * e));
      }
    }
  }
}

TEST(Transmission, ZeroEnergyLimits) {
  const auto t1 = transmission(0.0, {0.0, 1.0});
  EXPECT_NEAR(std::abs(t1.T - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(t1.R), 0.0, 1e-15);
  const auto t0 = transmission(0.0, {-1.0, 0.0});
  EXPECT_NEAR(std::abs(t0.T), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(t0.R + 1.0), 0.0, 1e-15);
}

TEST(Transmission, HalfEnergyExample) {
  const auto y = leaf_y(1, 0.5);
  const auto tr = transmission(0.5, y);
  const cd want = transmission_oracle(0.5, 2.0 / 3.0);
  EXPECT_NEAR(std::abs(tr.T - want), 0.0, 1e-14);
  // frozen from the oracle above
  EXPECT_NEAR(tr.T.real(), 0.8940397350993378, 1e-12);
  EXPECT_NEAR(tr.T.imag(), 0.30778675598999344, 1e-12);
  EXPECT_NEAR(std::abs(1.0 + tr.R), std::abs(tr.T), 1e-15);
}

TEST(Transmission, OneMinusRIdentityAndOracle) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> energy(-1.9, 1.9);
  for (int k = 0; k < 200; ++k) {
    const auto in = random_instance(1 + k % 5, derive_seed(6, static_cast<std::uint64_t>(k)));
    const double e = energy(rng);
    const auto p = scatter_at(in, e);
    EXPECT_NEAR(std::abs(1.0 + p.R - p.T), 0.0, 1e-12);
    EXPECT_NEAR(-2.0 * std::cos(p.theta), e, 1e-12);
    EXPECT_GT(std::sin(p.theta), 0.0);
    if (!p.y.is_pole()) {
      EXPECT_NEAR(std::abs(p.T - transmission_oracle(e, p.y.ratio())), 0.0, 1e-10);
    }
  }
  EXPECT_THROW(transmission(2.0, {0.0, 1.0}), std::domain_error);
}

TEST(ScanBounds, TableExamples) {
  const double e[] = {0.01};
  const auto one = scan_bounds(parse_input("00"), e);
  ASSERT_EQ(one.nand, 1);
  EXPECT_LT(one.rows[0].abs_T, 3.0 * std::sqrt(2.0) * 0.01);
  EXPECT_EQ(one.violations(), 0u);
  const auto zero = scan_bounds(parse_input("11"), e);
  ASSERT_EQ(zero.nand, 0);
  EXPECT_LT(zero.rows[0].abs_T, 8.0 * std::sqrt(2.0) * 0.01);
  EXPECT_EQ(zero.violations(), 0u);
}

TEST(ScanBounds, NoViolationsUpToDepthTen) {
  for (int depth = 1; depth <= 10; ++depth) {
    const std::size_t leaves = std::size_t{1} << depth;
    const auto grid = log_grid(1e-8, bound_window(leaves), 64);
    for (int k = 0; k < 32; ++k) {
      const auto in = random_instance(depth, derive_seed(100 + depth, static_cast<std::uint64_t>(k)));
      const auto rep = scan_bounds(in, grid, k);
      ASSERT_EQ(rep.violations(), 0u) << in.to_string();
      ASSERT_GT(rep.worst_margin(), 1.0);
    }
  }
}

TEST(ScanBounds, RejectsEnergiesOutsideWindow) {
  const auto in = parse_input("0110");
  const double bad[] = {bound_window(4)};
  EXPECT_THROW(scan_bounds(in, bad), std::domain_error);
  const double neg[] = {-1e-3};
  EXPECT_THROW(scan_bounds(in, neg), std::domain_error);
}

TEST(LogGrid, OpenAtBothEnds) {
  const auto g = log_grid(1e-8, 1e-2, 64);
  ASSERT_EQ(g.size(), 64u);
  EXPECT_GT(g.front(), 1e-8);
  EXPECT_LT(g.back(), 1e-2);
  for (std::size_t i = 1; i < g.size(); ++i) EXPECT_NEAR(g[i] / g[i - 1], g[1] / g[0], 1e-12);
}

TEST(ScanBounds, CsvShape) {
  const auto grid = log_grid(1e-6, bound_window(2), 4);
  const auto rep = scan_bounds(parse_input("10"), grid, 3);
  std::ostringstream os;
  write_csv_header(os, rep);
  write_csv_rows(os, rep);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "N,instance_id,E,nand,abs_y,abs_T,bound_y,bound_T,pass");
  int rows = 0;
  while (std::getline(is, line)) {
    ++rows;
    EXPECT_EQ(line.rfind("2,3,", 0), 0u);
  }
  EXPECT_EQ(rows, 4);
}
