#include "nandwalk/lattice.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

#include "nandwalk/errors.hpp"

namespace nandwalk {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_depth(int depth) {
  if (depth < 1 || depth > 30) throw std::invalid_argument("tree depth out of range");
}

void check_half_runway(int m) {
  if (m < 1) throw std::invalid_argument("runway half-length M must be >= 1");
}

void add_tree_edges(const IndexMap& map, std::vector<HamiltonianGraph::Edge>& edges) {
  for (int level = 0; level < map.depth(); ++level) {
    for (std::size_t p = 0; p < (std::size_t{1} << level); ++p) {
      const std::size_t parent = map.flat(TreeNode{level, p});
      edges.emplace_back(parent, map.flat(TreeNode{level + 1, 2 * p}));
      edges.emplace_back(parent, map.flat(TreeNode{level + 1, 2 * p + 1}));
    }
  }
}

void add_runway_edges(const IndexMap& map, std::vector<HamiltonianGraph::Edge>& edges) {
  const int m = map.half_runway();
  for (int r = -m; r < m; ++r) edges.emplace_back(map.runway_index(r), map.runway_index(r + 1));
}

void add_oracle_edges(const TreeInput& input, const IndexMap& map,
                      std::vector<HamiltonianGraph::Edge>& edges) {
  for (std::size_t i = 0; i < input.size(); ++i) {
    if (input[i]) edges.emplace_back(map.flat(TreeNode{input.depth(), i}), map.flat(ExtraNode{i}));
  }
}

}  // namespace

IndexMap IndexMap::full(int depth, int half_runway) {
  check_depth(depth);
  check_half_runway(half_runway);
  return IndexMap(depth, half_runway, 0, true);
}

IndexMap IndexMap::driver(int depth, int half_runway) {
  check_depth(depth);
  check_half_runway(half_runway);
  return IndexMap(depth, half_runway, 0, false);
}

IndexMap IndexMap::oracle(int depth) {
  check_depth(depth);
  return IndexMap(depth, -1, depth, true);
}

IndexMap IndexMap::runway(int half_runway) {
  check_half_runway(half_runway);
  return IndexMap(0, half_runway, 1, false);
}

std::optional<std::size_t> IndexMap::find(const NodeId& node) const noexcept {
  return std::visit(
      overloaded{
          [&](const RunwayNode& n) -> std::optional<std::size_t> {
            if (!has_runway() || n.r < -half_runway_ || n.r > half_runway_) return std::nullopt;
            return static_cast<std::size_t>(n.r + half_runway_);
          },
          [&](const TreeNode& n) -> std::optional<std::size_t> {
            if (!has_tree() || n.level < first_level_ || n.level > depth_ ||
                n.pos >= (std::size_t{1} << n.level)) {
              return std::nullopt;
            }
            return runway_size() + level_offset(n.level) + n.pos;
          },
          [&](const ExtraNode& n) -> std::optional<std::size_t> {
            if (!extras_ || n.leaf >= leaves()) return std::nullopt;
            return runway_size() + tree_size() + n.leaf;
          },
      },
      node);
}

std::size_t IndexMap::flat(const NodeId& node) const {
  if (auto idx = find(node)) return *idx;
  throw std::out_of_range("node not present in this index map");
}

NodeId IndexMap::node(std::size_t index) const {
  if (index < runway_size()) return RunwayNode{static_cast<int>(index) - half_runway_};
  index -= runway_size();
  if (index < tree_size()) {
    int level = first_level_;
    while (index >= level_offset(level + 1)) ++level;
    return TreeNode{level, index - level_offset(level)};
  }
  index -= tree_size();
  if (index < extras_size()) return ExtraNode{index};
  throw std::out_of_range("flat index " + std::to_string(index) + " beyond dimension");
}

HamiltonianGraph::HamiltonianGraph(IndexMap map, const std::vector<Edge>& edges)
    : map_(std::move(map)) {
  const std::size_t n = map_.dim();
  std::vector<std::vector<std::size_t>> adj(n);
  for (auto [u, v] : edges) {
    if (u >= n || v >= n) throw std::out_of_range("edge endpoint beyond dimension");
    if (u == v) throw std::invalid_argument("self-loop in graph");
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  row_ptr_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    auto& row = adj[i];
    std::sort(row.begin(), row.end());
    if (std::adjacent_find(row.begin(), row.end()) != row.end()) {
      throw std::invalid_argument("duplicate edge in graph");
    }
    row_ptr_[i + 1] = row_ptr_[i] + row.size();
    cols_.insert(cols_.end(), row.begin(), row.end());
  }
  values_.assign(cols_.size(), -1.0);
}

std::size_t HamiltonianGraph::max_degree() const noexcept {
  std::size_t d = 0;
  for (std::size_t i = 0; i < dim(); ++i) d = std::max(d, degree(i));
  return d;
}

double HamiltonianGraph::entry(std::size_t row, std::size_t col) const {
  const auto first = cols_.begin() + static_cast<std::ptrdiff_t>(row_ptr_.at(row));
  const auto last = cols_.begin() + static_cast<std::ptrdiff_t>(row_ptr_.at(row + 1));
  const auto it = std::lower_bound(first, last, col);
  if (it == last || *it != col) return 0.0;
  return values_[static_cast<std::size_t>(it - cols_.begin())];
}

std::vector<HamiltonianGraph::Edge> HamiltonianGraph::edges() const {
  std::vector<Edge> out;
  out.reserve(nnz() / 2);
  for (std::size_t i = 0; i < dim(); ++i) {
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      if (i < cols_[k]) out.emplace_back(i, cols_[k]);
    }
  }
  return out;
}

Eigen::MatrixXd HamiltonianGraph::to_dense() const {
  const auto n = static_cast<Eigen::Index>(dim());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < dim(); ++i) {
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(cols_[k])) = values_[k];
    }
  }
  return m;
}

void HamiltonianGraph::write_edge_list(std::ostream& os) const {
  for (auto [u, v] : edges()) os << u << ' ' << v << '\n';
}

HamiltonianGraph build_oracle(const TreeInput& input) {
  IndexMap map = IndexMap::oracle(input.depth());
  std::vector<HamiltonianGraph::Edge> edges;
  add_oracle_edges(input, map, edges);
  return HamiltonianGraph(std::move(map), edges);
}

HamiltonianGraph build_driver(int depth, int half_runway) {
  IndexMap map = IndexMap::driver(depth, half_runway);
  std::vector<HamiltonianGraph::Edge> edges;
  add_runway_edges(map, edges);
  edges.emplace_back(map.runway_index(0), map.flat(TreeNode{0, 0}));
  add_tree_edges(map, edges);
  return HamiltonianGraph(std::move(map), edges);
}

HamiltonianGraph build_full(const TreeInput& input, int half_runway) {
  IndexMap map = IndexMap::full(input.depth(), half_runway);
  std::vector<HamiltonianGraph::Edge> edges;
  add_runway_edges(map, edges);
  edges.emplace_back(map.runway_index(0), map.flat(TreeNode{0, 0}));
  add_tree_edges(map, edges);
  add_oracle_edges(input, map, edges);
  return HamiltonianGraph(std::move(map), edges);
}

HamiltonianGraph build_runway(int half_runway) {
  IndexMap map = IndexMap::runway(half_runway);
  std::vector<HamiltonianGraph::Edge> edges;
  add_runway_edges(map, edges);
  return HamiltonianGraph(std::move(map), edges);
}

HamiltonianGraph embed_sum(const HamiltonianGraph& a, const HamiltonianGraph& b,
                           const IndexMap& target) {
  std::vector<HamiltonianGraph::Edge> edges;
  for (const auto* g : {&a, &b}) {
    const auto& src = g->index_map();
    for (auto [u, v] : g->edges()) {
      edges.emplace_back(target.flat(src.node(u)), target.flat(src.node(v)));
    }
  }
  return HamiltonianGraph(target, edges);
}

void apply_h(const HamiltonianGraph& h, const Eigen::VectorXcd& in, Eigen::VectorXcd& out) {
  if (static_cast<std::size_t>(in.size()) != h.dim()) {
    throw std::invalid_argument("state dimension " + std::to_string(in.size()) +
                                " does not match Hamiltonian dimension " + std::to_string(h.dim()));
  }
  out.resize(in.size());
  const auto& rp = h.row_ptr();
  const auto& cols = h.cols();
  const auto& vals = h.values();
  for (std::size_t i = 0; i < h.dim(); ++i) {
    std::complex<double> acc = 0.0;
    for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) {
      acc += vals[k] * in[static_cast<Eigen::Index>(cols[k])];
    }
    out[static_cast<Eigen::Index>(i)] = acc;
  }
}

Eigen::VectorXcd apply_h(const HamiltonianGraph& h, const Eigen::VectorXcd& in) {
  Eigen::VectorXcd out;
  apply_h(h, in, out);
  return out;
}

Eigensystem dense_eig(const HamiltonianGraph& h, std::size_t cap) {
  if (h.dim() > cap) {
    throw CapExceeded("dense eigensolver cap " + std::to_string(cap) + " < dimension " +
                      std::to_string(h.dim()));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h.to_dense());
  if (solver.info() != Eigen::Success) throw std::runtime_error("dense eigensolver failed");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

}  // namespace nandwalk
