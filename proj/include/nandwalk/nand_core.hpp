#pragma once

// Classical NAND-tree semantics: instances, exact and randomized evaluation,
// and the parity -> NAND-tree embedding.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace nandwalk {

using Bit = std::uint8_t;

/// Leaf assignment of a perfect binary NAND tree with N = 2^depth leaves.
/// bits[i] == 1 means the oracle edge between leaf i and its extra node is
/// present. Leaves are indexed left to right.
class TreeInput {
 public:
  /// Throws ParseError unless bits.size() is a power of two >= 2 and every
  /// entry is 0 or 1.
  static TreeInput from_bits(std::vector<Bit> bits);

  int depth() const noexcept { return depth_; }
  std::size_t size() const noexcept { return bits_.size(); }
  std::span<const Bit> bits() const noexcept { return bits_; }
  Bit operator[](std::size_t i) const { return bits_[i]; }

  std::string to_string() const;

  /// {"n": depth, "bits": "0101..."}
  nlohmann::json to_json() const;
  static TreeInput from_json(const nlohmann::json& j);

  friend bool operator==(const TreeInput&, const TreeInput&) = default;

 private:
  TreeInput(int depth, std::vector<Bit> bits) : depth_(depth), bits_(std::move(bits)) {}

  int depth_;
  std::vector<Bit> bits_;
};

/// Parses a '0'/'1' string. Errors: empty, illegal character, length not a
/// power of two, or a single leaf (depth 0).
TreeInput parse_input(std::string_view text);

/// Root value of the NAND tree.
int eval_nand(const TreeInput& input);

struct EvalTrace {
  int value = 0;
  std::size_t queries = 0;
};

/// Randomized short-circuit evaluation: at each NAND node a uniformly random
/// child is evaluated first; a 0 there returns 1 without touching the
/// sibling. Zero-error; `queries` counts leaves read.
EvalTrace randomized_eval(const TreeInput& input, std::uint64_t seed);

/// Derives an independent 64-bit seed for stream `stream` of `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

/// Uniformly random leaf bits.
TreeInput random_instance(int depth, std::uint64_t seed);

/// Draw from the reluctant (worst-case) distribution: a node of value 0 has
/// children (1, 1); a node of value 1 has one 0-child and one 1-child in
/// random order. `root_value` fixes the root.
TreeInput hard_instance(int depth, int root_value, std::uint64_t seed);

/// NAND tree on k^2 leaves evaluating to (1 + sum(parity_bits)) mod 2, built
/// from 4-leaf gadgets: XNOR over (a, b, !a, !b) and XOR over (a, !b, !a, b).
/// k must be a power of two, k >= 2.
TreeInput embed_parity(std::span<const Bit> parity_bits);

/// For each leaf of embed_parity(k bits), the index of the parity variable
/// it reads. Leaves sharing an owner form that variable's oracle block.
std::vector<std::size_t> parity_blocks(std::size_t k);

}  // namespace nandwalk
