#include "nnqs/separability.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace nnqs {

PartitionSpec::PartitionSpec(int n, std::vector<std::vector<int>> blocks)
    : n_(n), blocks_(std::move(blocks)) {
  if (n_ < 1) {
    throw std::invalid_argument("PartitionSpec: n must be >= 1");
  }
  std::vector<bool> seen(n_, false);
  for (auto& block : blocks_) {
    if (block.empty()) {
      throw std::invalid_argument("PartitionSpec: empty block");
    }
    std::sort(block.begin(), block.end());
    for (int q : block) {
      if (q < 0 || q >= n_) {
        throw std::invalid_argument("PartitionSpec: qubit index out of range");
      }
      if (seen[q]) {
        throw std::invalid_argument("PartitionSpec: blocks are not disjoint");
      }
      seen[q] = true;
    }
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
    throw std::invalid_argument("PartitionSpec: blocks must cover all qubits");
  }
  std::sort(blocks_.begin(), blocks_.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
}

PartitionSpec PartitionSpec::free_learner(int n) {
  std::vector<int> all(n);
  std::iota(all.begin(), all.end(), 0);
  return PartitionSpec(n, {all});
}

PartitionSpec PartitionSpec::parse(const std::string& text, int n) {
  if (text == "free") {
    return free_learner(n);
  }
  std::vector<std::vector<int>> blocks;
  std::stringstream blocks_in(text);
  std::string block_text;
  while (std::getline(blocks_in, block_text, '|')) {
    std::vector<int> block;
    std::stringstream idx_in(block_text);
    std::string tok;
    while (std::getline(idx_in, tok, ',')) {
      size_t pos = 0;
      int q = 0;
      try {
        q = std::stoi(tok, &pos);
      } catch (const std::exception&) {
        throw std::invalid_argument("PartitionSpec: bad index '" + tok + "' in '" + text + "'");
      }
      if (pos != tok.size()) {
        throw std::invalid_argument("PartitionSpec: bad index '" + tok + "' in '" + text + "'");
      }
      block.push_back(q - 1);  // 1-based in text
    }
    if (block.empty()) {
      throw std::invalid_argument("PartitionSpec: empty block in '" + text + "'");
    }
    blocks.push_back(std::move(block));
  }
  return PartitionSpec(n, std::move(blocks));
}

bool PartitionSpec::refines(const PartitionSpec& coarser) const {
  if (n_ != coarser.n_) {
    return false;
  }
  std::vector<int> block_of(n_, -1);
  for (int m = 0; m < coarser.num_blocks(); ++m) {
    for (int q : coarser.blocks()[m]) {
      block_of[q] = m;
    }
  }
  for (const auto& block : blocks_) {
    const int home = block_of[block.front()];
    for (int q : block) {
      if (block_of[q] != home) {
        return false;
      }
    }
  }
  return true;
}

std::string PartitionSpec::to_string() const {
  if (is_free()) {
    return "free";
  }
  std::ostringstream out;
  for (size_t m = 0; m < blocks_.size(); ++m) {
    if (m > 0) {
      out << '|';
    }
    for (size_t i = 0; i < blocks_[m].size(); ++i) {
      if (i > 0) {
        out << ',';
      }
      out << blocks_[m][i] + 1;
    }
  }
  return out.str();
}

SegmentationMask make_mask(const PartitionSpec& spec, int neurons_per_qubit) {
  if (neurons_per_qubit < 1) {
    throw std::invalid_argument("make_mask: neurons_per_qubit must be >= 1");
  }
  SegmentationMask mask;
  mask.n = spec.n();
  mask.h_total = neurons_per_qubit * spec.n();
  mask.allowed.setConstant(mask.n, mask.h_total, false);
  int next_hidden = 0;
  for (const auto& block : spec.blocks()) {
    std::vector<int> hidden(neurons_per_qubit * block.size());
    std::iota(hidden.begin(), hidden.end(), next_hidden);
    next_hidden += static_cast<int>(hidden.size());
    for (int q : block) {
      for (int j : hidden) {
        mask.allowed(q, j) = true;
      }
    }
    mask.allocation.push_back(std::move(hidden));
  }
  return mask;
}

std::int64_t count_free_params(const SegmentationMask& mask) {
  std::int64_t weights = 0;
  for (int i = 0; i < mask.n; ++i) {
    for (int j = 0; j < mask.h_total; ++j) {
      weights += mask.allowed(i, j) ? 1 : 0;
    }
  }
  return mask.n + mask.h_total + weights;
}

namespace {

// Restricted growth strings a[0]=0, a[i] <= 1+max(a[0..i-1]) enumerate set
// partitions in canonical order.
void rgs_recurse(int n, int pos, int max_label, std::vector<int>& labels,
                 std::optional<int> k, std::vector<PartitionSpec>& out) {
  if (pos == n) {
    const int num_blocks = max_label + 1;
    if (k && *k != num_blocks) {
      return;
    }
    std::vector<std::vector<int>> blocks(num_blocks);
    for (int q = 0; q < n; ++q) {
      blocks[labels[q]].push_back(q);
    }
    out.emplace_back(n, std::move(blocks));
    return;
  }
  for (int label = 0; label <= max_label + 1; ++label) {
    labels[pos] = label;
    rgs_recurse(n, pos + 1, std::max(max_label, label), labels, k, out);
  }
}

std::uint64_t checked_u64(unsigned __int128 v, const char* what) {
  if (v > static_cast<unsigned __int128>(UINT64_MAX)) {
    throw std::overflow_error(std::string(what) + ": result exceeds 64 bits");
  }
  return static_cast<std::uint64_t>(v);
}

}  // namespace

std::vector<PartitionSpec> enumerate_set_partitions(int n, std::optional<int> k) {
  if (n < 1 || n > kSetPartitionCap) {
    throw std::invalid_argument("enumerate_set_partitions: n must be in [1, " +
                                std::to_string(kSetPartitionCap) + "]");
  }
  if (k && (*k < 1 || *k > n)) {
    throw std::invalid_argument("enumerate_set_partitions: k out of range");
  }
  std::vector<PartitionSpec> out;
  std::vector<int> labels(n, 0);
  rgs_recurse(n, 1, 0, labels, k, out);
  return out;
}

std::uint64_t multinomial(int n, const PartitionShape& shape) {
  int total = 0;
  for (int m : shape.sizes) {
    if (m < 1) {
      throw std::invalid_argument("multinomial: block sizes must be >= 1");
    }
    total += m;
  }
  if (total != n) {
    throw std::invalid_argument("multinomial: block sizes must sum to n");
  }
  // Product of binomials C(remaining, m_i) stays integral at every step.
  unsigned __int128 result = 1;
  int remaining = n;
  for (int m : shape.sizes) {
    for (int i = 1; i <= m; ++i) {
      result = result * static_cast<unsigned>(remaining - m + i);
      result /= static_cast<unsigned>(i);
    }
    remaining -= m;
  }
  return checked_u64(result, "multinomial");
}

std::uint64_t shape_degeneracy(int n, const PartitionShape& shape) {
  unsigned __int128 result = multinomial(n, shape);
  std::vector<int> size_count(n + 1, 0);
  for (int m : shape.sizes) {
    ++size_count[m];
  }
  for (int l = 1; l <= n; ++l) {
    for (int i = 2; i <= size_count[l]; ++i) {
      result /= static_cast<unsigned>(i);
    }
  }
  return checked_u64(result, "shape_degeneracy");
}

std::vector<PartitionShape> partitions_exactly_k(int n, int k) {
  if (k < 1 || k > n) {
    throw std::invalid_argument("partitions_exactly_k: need 1 <= k <= n");
  }
  std::vector<PartitionShape> out;
  std::vector<int> parts;
  // Non-increasing parts; `cap` bounds the next part.
  auto recurse = [&](auto&& self, int remaining, int parts_left, int cap) -> void {
    if (parts_left == 0) {
      if (remaining == 0) {
        out.push_back(PartitionShape{parts});
      }
      return;
    }
    const int lo = (remaining + parts_left - 1) / parts_left;  // ceil average
    for (int part = std::min(cap, remaining - (parts_left - 1)); part >= lo; --part) {
      parts.push_back(part);
      self(self, remaining - part, parts_left - 1, part);
      parts.pop_back();
    }
  };
  recurse(recurse, n, k, n);
  return out;
}

std::uint64_t count_GK(int n, int k) {
  if (n < 1 || k < 1 || k > n) {
    throw std::invalid_argument("count_GK: need 1 <= k <= n");
  }
  if (k == 1) {
    return 1;  // single block; the paper's sum starts at K=2
  }
  std::uint64_t total = 0;
  for (const auto& shape : partitions_exactly_k(n, k)) {
    total += shape_degeneracy(n, shape);
  }
  return total;
}

std::uint64_t bell_number(int n) {
  if (n < 0 || n > kBellCap) {
    throw std::invalid_argument("bell_number: n must be in [0, " + std::to_string(kBellCap) + "]");
  }
  if (n == 0) {
    return 1;
  }
  std::vector<std::uint64_t> row{1};  // Bell triangle, row 1
  for (int r = 2; r <= n; ++r) {
    std::vector<std::uint64_t> next;
    next.reserve(r);
    next.push_back(row.back());
    for (std::uint64_t x : row) {
      next.push_back(next.back() + x);
    }
    row = std::move(next);
  }
  return row.back();
}

}  // namespace nnqs
