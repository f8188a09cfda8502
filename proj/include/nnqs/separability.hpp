#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nnqs/common.hpp"

namespace nnqs {

// K disjoint, nonempty qubit-index blocks covering {1..N}. Indices are
// 1-based externally ("1,2|3") and 0-based in `blocks`. Canonical order:
// indices sorted within each block, blocks sorted by smallest element.
class PartitionSpec {
 public:
  PartitionSpec() = default;
  // Blocks given with 0-based qubit indices; canonicalized and validated.
  PartitionSpec(int n, std::vector<std::vector<int>> blocks);

  static PartitionSpec free_learner(int n);
  // Text syntax: "1,2|3|4,5,6" (1-based indices) or "free".
  static PartitionSpec parse(const std::string& text, int n);

  int n() const { return n_; }
  int num_blocks() const { return static_cast<int>(blocks_.size()); }
  bool is_free() const { return blocks_.size() == 1; }
  const std::vector<std::vector<int>>& blocks() const { return blocks_; }

  // True if every block of *this is contained in some block of `coarser`.
  bool refines(const PartitionSpec& coarser) const;

  std::string to_string() const;  // "free" or "1,2|3"
  bool operator==(const PartitionSpec& other) const {
    return n_ == other.n_ && blocks_ == other.blocks_;
  }

 private:
  int n_ = 0;
  std::vector<std::vector<int>> blocks_;
};

// Which visible-hidden connections a K_j-separable network may use:
// allowed(i, j) is true iff hidden neuron j belongs to the block of qubit i.
struct SegmentationMask {
  int n = 0;
  int h_total = 0;
  std::vector<std::vector<int>> allocation;  // hidden indices per block
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> allowed;  // n x h_total

  bool is_allowed(int i, int j) const { return allowed(i, j); }
};

// Hidden neurons per block proportional to block size: |H_m| = rho*|S_m|.
SegmentationMask make_mask(const PartitionSpec& spec, int neurons_per_qubit);

// N + H + sum_m |H_m||S_m|: biases plus unmasked weights.
std::int64_t count_free_params(const SegmentationMask& mask);

// Multiset of block sizes {m_j}; canonical order is non-increasing.
struct PartitionShape {
  std::vector<int> sizes;
};

// All set partitions of {1..n}, optionally restricted to exactly k blocks,
// in canonical order (restricted-growth-string enumeration). Cap n <= 10.
std::vector<PartitionSpec> enumerate_set_partitions(int n, std::optional<int> k = std::nullopt);

// n! / prod m_j!; exact, throws on Sum(m_j) != n or overflow.
std::uint64_t multinomial(int n, const PartitionShape& shape);

// Number of set partitions with the given block-size multiset:
// multinomial reduced by prod_l g(l)! where g(l) counts blocks of size l.
std::uint64_t shape_degeneracy(int n, const PartitionShape& shape);

// All integer partitions of n into exactly k parts, parts non-increasing.
std::vector<PartitionShape> partitions_exactly_k(int n, int k);

// Number of ways to arrange n qubits into k entangled collections:
// sum of shape_degeneracy over partitions_exactly_k(n, k). k = 1 gives 1.
std::uint64_t count_GK(int n, int k);

// Bell number via the Bell-triangle recurrence; exact for n <= 25
// (B_25 = 4638590332229999353 still fits in 64 bits).
std::uint64_t bell_number(int n);

inline constexpr int kSetPartitionCap = 10;
inline constexpr int kBellCap = 25;

}  // namespace nnqs
