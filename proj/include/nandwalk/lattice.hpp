#pragma once

// Tree + runway graphs as sparse minus-adjacency matrices with a canonical
// node numbering.
//
// Flat layout, each section present only when the graph has it:
//   runway   r = -M..M        -> r + M
//   tree     (level, pos)     -> runway_size + (2^level - 2^first_level) + pos
//   extras   leaf i           -> runway_size + tree_size + i
// Tree levels run from the root (level 0) to the leaves (level n); leaves
// and extra nodes are numbered left to right.

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "nandwalk/nand_core.hpp"

namespace nandwalk {

struct RunwayNode {
  int r;
  friend bool operator==(const RunwayNode&, const RunwayNode&) = default;
};
struct TreeNode {
  int level;
  std::size_t pos;
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};
struct ExtraNode {
  std::size_t leaf;
  friend bool operator==(const ExtraNode&, const ExtraNode&) = default;
};
using NodeId = std::variant<RunwayNode, TreeNode, ExtraNode>;

class IndexMap {
 public:
  /// Runway -M..M, tree levels 0..depth and N extra nodes.
  static IndexMap full(int depth, int half_runway);
  /// Runway and tree, no extra nodes.
  static IndexMap driver(int depth, int half_runway);
  /// Leaves and extra nodes only.
  static IndexMap oracle(int depth);
  /// A bare path -M..M.
  static IndexMap runway(int half_runway);

  std::size_t dim() const noexcept { return runway_size() + tree_size() + extras_size(); }
  int depth() const noexcept { return depth_; }
  std::size_t leaves() const noexcept { return std::size_t{1} << depth_; }
  int half_runway() const noexcept { return half_runway_; }
  bool has_runway() const noexcept { return half_runway_ >= 0; }
  bool has_tree() const noexcept { return first_level_ <= depth_; }
  bool has_extras() const noexcept { return extras_; }

  std::optional<std::size_t> find(const NodeId& node) const noexcept;
  /// Throws std::out_of_range for nodes outside this layout.
  std::size_t flat(const NodeId& node) const;
  NodeId node(std::size_t index) const;

  std::size_t runway_index(int r) const { return flat(RunwayNode{r}); }

  friend bool operator==(const IndexMap&, const IndexMap&) = default;

 private:
  IndexMap(int depth, int half_runway, int first_level, bool extras)
      : depth_(depth), half_runway_(half_runway), first_level_(first_level), extras_(extras) {}

  std::size_t runway_size() const noexcept {
    return has_runway() ? static_cast<std::size_t>(2 * half_runway_ + 1) : 0;
  }
  std::size_t level_offset(int level) const noexcept {
    return (std::size_t{1} << level) - (std::size_t{1} << first_level_);
  }
  std::size_t tree_size() const noexcept { return has_tree() ? level_offset(depth_ + 1) : 0; }
  std::size_t extras_size() const noexcept { return extras_ ? leaves() : 0; }

  int depth_;
  int half_runway_;  // -1: no runway
  int first_level_;  // depth_ + 1: no tree
  bool extras_;
};

/// Minus the adjacency matrix of a graph, stored as CSR with sorted columns.
/// Every stored entry is exactly -1; the diagonal is empty.
class HamiltonianGraph {
 public:
  using Edge = std::pair<std::size_t, std::size_t>;

  /// Edges are undirected; duplicates and self-loops are rejected.
  HamiltonianGraph(IndexMap map, const std::vector<Edge>& edges);

  const IndexMap& index_map() const noexcept { return map_; }
  std::size_t dim() const noexcept { return map_.dim(); }
  std::size_t nnz() const noexcept { return cols_.size(); }
  std::size_t degree(std::size_t row) const { return row_ptr_[row + 1] - row_ptr_[row]; }
  std::size_t max_degree() const noexcept;
  double entry(std::size_t row, std::size_t col) const;

  const std::vector<std::size_t>& row_ptr() const noexcept { return row_ptr_; }
  const std::vector<std::size_t>& cols() const noexcept { return cols_; }
  const std::vector<double>& values() const noexcept { return values_; }

  /// Undirected edges with u < v, sorted.
  std::vector<Edge> edges() const;

  Eigen::MatrixXd to_dense() const;

  /// "u v" per line, flat indices, u < v.
  void write_edge_list(std::ostream& os) const;

 private:
  IndexMap map_;
  std::vector<std::size_t> row_ptr_;
  std::vector<std::size_t> cols_;
  std::vector<double> values_;
};

/// Oracle part: leaf i -- extra i for every bits[i] == 1, over IndexMap::oracle.
HamiltonianGraph build_oracle(const TreeInput& input);

/// Driver part: the depth-n binary tree with its root hung below runway node
/// r = 0 of the path -M..M. Requires M >= 1.
HamiltonianGraph build_driver(int depth, int half_runway);

/// Oracle plus driver on IndexMap::full.
HamiltonianGraph build_full(const TreeInput& input, int half_runway);

/// Tree-free path -M..M.
HamiltonianGraph build_runway(int half_runway);

/// Entrywise sum of two graphs re-indexed by NodeId into `target`.
HamiltonianGraph embed_sum(const HamiltonianGraph& a, const HamiltonianGraph& b,
                           const IndexMap& target);

/// out = H * in. Throws std::invalid_argument on a dimension mismatch.
void apply_h(const HamiltonianGraph& h, const Eigen::VectorXcd& in, Eigen::VectorXcd& out);
Eigen::VectorXcd apply_h(const HamiltonianGraph& h, const Eigen::VectorXcd& in);

struct Eigensystem {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // orthonormal columns
};

inline constexpr std::size_t kDenseEigCap = 4000;

/// Full symmetric eigendecomposition. Throws CapExceeded when dim > cap.
Eigensystem dense_eig(const HamiltonianGraph& h, std::size_t cap = kDenseEigCap);

}  // namespace nandwalk
