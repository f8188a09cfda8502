#pragma once

#include <cstdint>
#include <vector>

#include "nnqs/common.hpp"

namespace nnqs {

// One computational-basis label: N spins, each -1 or +1.
// Convention: spin -1 <-> bit 0, spin +1 <-> bit 1, and qubit 1 (values[0])
// is the most significant bit of the basis index.
struct SpinConfiguration {
  std::vector<int> values;

  SpinConfiguration() = default;
  explicit SpinConfiguration(std::vector<int> v);

  int size() const { return static_cast<int>(values.size()); }
  int operator[](int i) const { return values[i]; }
};

std::uint64_t basis_index(const SpinConfiguration& s);
SpinConfiguration spin_of_index(std::uint64_t index, int n);

// All 2^n configurations in basis_index order. Hard cap n <= 20.
std::vector<SpinConfiguration> enumerate_configs(int n);

inline constexpr int kEnumerationCap = 20;

}  // namespace nnqs
