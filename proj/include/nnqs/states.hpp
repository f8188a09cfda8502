#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nnqs/separability.hpp"
#include "nnqs/target.hpp"

namespace nnqs {

struct NamedTarget {
  std::string name;
  TargetState state;
};

enum class BellKind { PhiPlus, PhiMinus, PsiPlus, PsiMinus };

NamedTarget bell(BellKind which);
NamedTarget ghz(int n);                       // (|0..0> + |1..1>)/sqrt(2), n >= 2
NamedTarget w_state(int n);                   // single-excitation superposition, n >= 3
NamedTarget wbar_state(int n);                // bit-flipped W
NamedTarget plus_state();                     // sigma_x |+> = |+>
NamedTarget basis_state(const std::string& bits);  // e.g. "0", "01"

// Kronecker product of the factors placed on the assignment's blocks, in
// canonical block order; non-contiguous blocks are handled by qubit-index
// permutation.
NamedTarget tensor(const std::vector<NamedTarget>& factors, const PartitionSpec& assignment);

NamedTarget variable_bell(double p);  // sqrt(p)|00> + sqrt(1-p)|11>
NamedTarget variable_w(double p);     // p|W> + sqrt(1-p)|Wbar>, renormalized

// Controlled-phase gates diag(1,1,1,-1) along the 1-D chain applied to
// |+>^n; all 2^n amplitudes have magnitude 2^(-n/2) with signs +-1.
NamedTarget cluster_1d(int n);

// Haar-like random state per contiguous block (complex Gaussian amplitudes,
// normalized), tensored; reproducible from the seed.
NamedTarget random_biseparable(const std::vector<int>& block_sizes, std::uint64_t seed);

// Descriptor grammar used by configs: one atom "name[:args]" or a product
// "atom@1,2 * atom@3" with explicit 1-based qubit blocks. Examples:
// "bell:phi+", "ghz:3", "cluster_1d:4", "variable_bell:0.3",
// "random_biseparable:3,3:7", "file:target.json",
// "bell:phi+@1,3 * plus@2".
NamedTarget parse_target(const std::string& descriptor);

}  // namespace nnqs
