#include "nandwalk/nand_core.hpp"

#include <bit>
#include <random>
#include <utility>

#include "nandwalk/errors.hpp"

namespace nandwalk {

namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && std::has_single_bit(n); }

int log2_exact(std::size_t n) { return std::countr_zero(n); }

struct LeafSpec {
  std::size_t owner;
  bool negated;
};

// Appends the leaves of a tree computing parity(vars) (or its complement when
// complement is set) over variables [lo, hi).
void build_parity(std::size_t lo, std::size_t hi, bool complement, std::vector<LeafSpec>& out) {
  if (hi - lo == 1) {
    out.push_back({lo, complement});
    return;
  }
  const std::size_t mid = lo + (hi - lo) / 2;
  if (complement) {
    // XNOR gadget: (u, v, !u, !v)
    build_parity(lo, mid, false, out);
    build_parity(mid, hi, false, out);
    build_parity(lo, mid, true, out);
    build_parity(mid, hi, true, out);
  } else {
    // XOR gadget: (u, !v, !u, v)
    build_parity(lo, mid, false, out);
    build_parity(mid, hi, true, out);
    build_parity(lo, mid, true, out);
    build_parity(mid, hi, false, out);
  }
}

std::vector<LeafSpec> parity_layout(std::size_t k) {
  if (k < 2 || !is_power_of_two(k)) {
    throw std::invalid_argument("parity embedding needs k = 2^m >= 2, got " + std::to_string(k));
  }
  std::vector<LeafSpec> out;
  out.reserve(k * k);
  build_parity(0, k, true, out);
  return out;
}

struct RandomizedEvaluator {
  std::span<const Bit> bits;
  std::mt19937_64 rng;
  std::size_t queries = 0;

  int eval(std::size_t lo, std::size_t len) {
    if (len == 1) {
      ++queries;
      return bits[lo];
    }
    const std::size_t half = len / 2;
    const bool left_first = (rng() & 1U) == 0;
    const std::size_t first = left_first ? lo : lo + half;
    const std::size_t second = left_first ? lo + half : lo;
    if (eval(first, half) == 0) return 1;
    return 1 - eval(second, half);
  }
};

}  // namespace

TreeInput TreeInput::from_bits(std::vector<Bit> bits) {
  if (bits.empty()) throw ParseError(ParseError::Kind::Empty, "empty leaf string");
  for (Bit b : bits) {
    if (b > 1) throw ParseError(ParseError::Kind::IllegalCharacter, "leaf bits must be 0 or 1");
  }
  if (!is_power_of_two(bits.size())) {
    throw ParseError(ParseError::Kind::NonPowerOfTwo,
                     "leaf count " + std::to_string(bits.size()) + " is not a power of two");
  }
  if (bits.size() < 2) {
    throw ParseError(ParseError::Kind::TooShallow, "a NAND tree needs at least two leaves");
  }
  const int depth = log2_exact(bits.size());
  return TreeInput(depth, std::move(bits));
}

std::string TreeInput::to_string() const {
  std::string s;
  s.reserve(bits_.size());
  for (Bit b : bits_) s.push_back(b ? '1' : '0');
  return s;
}

nlohmann::json TreeInput::to_json() const { return {{"n", depth_}, {"bits", to_string()}}; }

TreeInput TreeInput::from_json(const nlohmann::json& j) {
  TreeInput t = parse_input(j.at("bits").get<std::string>());
  if (j.at("n").get<int>() != t.depth()) {
    throw ParseError(ParseError::Kind::NonPowerOfTwo, "depth field disagrees with bit count");
  }
  return t;
}

TreeInput parse_input(std::string_view text) {
  if (text.empty()) throw ParseError(ParseError::Kind::Empty, "empty leaf string");
  std::vector<Bit> bits;
  bits.reserve(text.size());
  for (char c : text) {
    if (c != '0' && c != '1') {
      throw ParseError(ParseError::Kind::IllegalCharacter,
                       std::string("illegal character '") + c + "' in leaf string");
    }
    bits.push_back(static_cast<Bit>(c - '0'));
  }
  return TreeInput::from_bits(std::move(bits));
}

int eval_nand(const TreeInput& input) {
  std::vector<Bit> level(input.bits().begin(), input.bits().end());
  while (level.size() > 1) {
    for (std::size_t i = 0; i < level.size() / 2; ++i) {
      level[i] = static_cast<Bit>(1 - (level[2 * i] & level[2 * i + 1]));
    }
    level.resize(level.size() / 2);
  }
  return level.front();
}

EvalTrace randomized_eval(const TreeInput& input, std::uint64_t seed) {
  RandomizedEvaluator ev{input.bits(), std::mt19937_64(derive_seed(seed, 0))};
  const int value = ev.eval(0, input.size());
  return {value, ev.queries};
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  // splitmix64 finalizer over (seed, stream)
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

TreeInput random_instance(int depth, std::uint64_t seed) {
  std::mt19937_64 rng(derive_seed(seed, 1));
  std::vector<Bit> bits(std::size_t{1} << depth);
  for (auto& b : bits) b = static_cast<Bit>(rng() & 1U);
  return TreeInput::from_bits(std::move(bits));
}

TreeInput hard_instance(int depth, int root_value, std::uint64_t seed) {
  if (root_value != 0 && root_value != 1) throw std::invalid_argument("root value must be 0 or 1");
  std::mt19937_64 rng(derive_seed(seed, 2));
  std::vector<Bit> level{static_cast<Bit>(root_value)};
  for (int d = 0; d < depth; ++d) {
    std::vector<Bit> next;
    next.reserve(level.size() * 2);
    for (Bit v : level) {
      if (v == 0) {
        next.insert(next.end(), {1, 1});
      } else if ((rng() & 1U) == 0) {
        next.insert(next.end(), {0, 1});
      } else {
        next.insert(next.end(), {1, 0});
      }
    }
    level = std::move(next);
  }
  return TreeInput::from_bits(std::move(level));
}

TreeInput embed_parity(std::span<const Bit> parity_bits) {
  const auto layout = parity_layout(parity_bits.size());
  std::vector<Bit> leaves;
  leaves.reserve(layout.size());
  for (const auto& spec : layout) {
    const Bit x = parity_bits[spec.owner];
    if (x > 1) throw std::invalid_argument("parity bits must be 0 or 1");
    leaves.push_back(spec.negated ? static_cast<Bit>(1 - x) : x);
  }
  return TreeInput::from_bits(std::move(leaves));
}

std::vector<std::size_t> parity_blocks(std::size_t k) {
  const auto layout = parity_layout(k);
  std::vector<std::size_t> owners;
  owners.reserve(layout.size());
  for (const auto& spec : layout) owners.push_back(spec.owner);
  return owners;
}

}  // namespace nandwalk
