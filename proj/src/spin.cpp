#include "nnqs/spin.hpp"

#include <stdexcept>
#include <string>

namespace nnqs {

SpinConfiguration::SpinConfiguration(std::vector<int> v) : values(std::move(v)) {
  for (int x : values) {
    if (x != -1 && x != 1) {
      throw std::invalid_argument("SpinConfiguration: entries must be -1 or +1");
    }
  }
}

std::uint64_t basis_index(const SpinConfiguration& s) {
  std::uint64_t idx = 0;
  for (int i = 0; i < s.size(); ++i) {
    idx = (idx << 1) | (s[i] > 0 ? 1u : 0u);
  }
  return idx;
}

SpinConfiguration spin_of_index(std::uint64_t index, int n) {
  if (n < 0 || (n < 64 && index >= (std::uint64_t{1} << n))) {
    throw std::invalid_argument("spin_of_index: index out of range for n=" + std::to_string(n));
  }
  SpinConfiguration s;
  s.values.resize(n);
  for (int i = 0; i < n; ++i) {
    s.values[i] = ((index >> (n - 1 - i)) & 1u) ? 1 : -1;
  }
  return s;
}

std::vector<SpinConfiguration> enumerate_configs(int n) {
  if (n < 1 || n > kEnumerationCap) {
    throw std::invalid_argument("enumerate_configs: n must be in [1, " +
                                std::to_string(kEnumerationCap) + "]");
  }
  const std::uint64_t total = std::uint64_t{1} << n;
  std::vector<SpinConfiguration> out;
  out.reserve(total);
  for (std::uint64_t idx = 0; idx < total; ++idx) {
    out.push_back(spin_of_index(idx, n));
  }
  return out;
}

}  // namespace nnqs
