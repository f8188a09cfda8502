#pragma once

#include <cstdint>
#include <optional>

#include "nnqs/common.hpp"
#include "nnqs/separability.hpp"
#include "nnqs/spin.hpp"

namespace nnqs {

// Amplitude-layer weights and biases. W is n_visible x n_hidden.
struct NetworkParams {
  CVector visible_bias;  // a, length N
  CVector hidden_bias;   // b, length H
  CMatrix weights;       // W, N x H

  int n_visible() const { return static_cast<int>(visible_bias.size()); }
  int n_hidden() const { return static_cast<int>(hidden_bias.size()); }
};

// Dedicated phase-layer weights and biases. U is n_visible x n_phase.
struct PhaseParams {
  CVector visible_bias;  // c, length N
  CVector hidden_bias;   // d, length M
  CMatrix weights;       // U, N x M

  int n_visible() const { return static_cast<int>(visible_bias.size()); }
  int n_hidden() const { return static_cast<int>(hidden_bias.size()); }
};

// RBM wavefunction, optionally with the phase layer and segmentation masks.
// Masked weights are exactly zero and stay zero through every update.
struct NeuralState {
  int n_visible = 0;
  NetworkParams amplitude_params;
  std::optional<PhaseParams> phase_params;
  std::optional<SegmentationMask> mask;        // amplitude-layer weights
  std::optional<SegmentationMask> phase_mask;  // phase-layer weights

  bool has_phase_layer() const { return phase_params.has_value(); }
};

// exp(sum_i s_i a_i) * prod_j 2cosh(sum_i W_ij s_i + b_j); unnormalized.
// Evaluated in the log domain so large weights do not overflow.
Complex amplitude(const NetworkParams& params, const SpinConfiguration& s);
Complex log_amplitude(const NetworkParams& params, const SpinConfiguration& s);

// Phase angle t(s): real part of the phase layer's free energy
// sum_i s_i c_i + sum_k log 2cosh(sum_i U_ik s_i + d_k). The angle is
// additive over segmentation blocks, so masked phase layers can only
// produce product-form phase structure.
double phase_angle(const PhaseParams& params, const SpinConfiguration& s);

// Phase map in [0, 1): t(s) / 2pi modulo one full turn.
double phase_fraction(const PhaseParams& params, const SpinConfiguration& s);

// Full ansatz exp(2*pi*i*Phi(s)) * Psi(s); reduces to amplitude() when the
// phase layer is absent.
Complex global_amplitude(const NeuralState& state, const SpinConfiguration& s);
Complex global_log_amplitude(const NeuralState& state, const SpinConfiguration& s);

// Uniform [-scale, scale] real and imaginary parts, reproducible from seed.
// m = 0 omits the phase layer.
NeuralState init_random(int n, int h, int m, double scale, std::uint64_t seed);

// Attaches segmentation masks and zeroes the disallowed weights. The phase
// mask applies to the phase layer and may differ in hidden width.
void apply_mask(NeuralState& state, const SegmentationMask& mask,
                const std::optional<SegmentationMask>& phase_mask = std::nullopt);

// Dense (unnormalized) vector of global amplitudes over all 2^N basis
// states, in basis_index order. Requires n_visible <= kEnumerationCap.
CVector state_vector(const NeuralState& state);

}  // namespace nnqs
