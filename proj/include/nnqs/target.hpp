#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "nnqs/common.hpp"
#include "nnqs/spin.hpp"

namespace nnqs {

// Dense amplitude vector over the 2^N basis states, unit norm after
// construction. sigma2 = 0 keeps the declared Kronecker entries; sigma2 > 0
// smears each entry as a Gaussian in basis-index distance before normalizing.
struct TargetState {
  int n_visible = 0;
  CVector amplitudes;
  double sigma2 = 0.0;
  // Declared (index, amplitude) entries, kept for exact serialization.
  std::vector<std::pair<std::uint64_t, Complex>> entries;

  Complex amplitude(const SpinConfiguration& s) const {
    return amplitudes[static_cast<Eigen::Index>(basis_index(s))];
  }
  std::uint64_t dim() const { return std::uint64_t{1} << n_visible; }
};

TargetState build_target(const std::vector<std::pair<std::uint64_t, Complex>>& amplitude_map,
                         int n, double sigma2);

// JSON document {n, entries: [[index, re, im], ...], sigma2}; the layout is
// normative for the CLI.
std::string target_to_json(const TargetState& target);
TargetState target_from_json(const std::string& json_text);

}  // namespace nnqs
