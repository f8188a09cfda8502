#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nnqs/common.hpp"
#include "nnqs/neural_state.hpp"
#include "nnqs/sampling.hpp"
#include "nnqs/target.hpp"

namespace nnqs {

struct LearningConfig {
  enum class Optimizer { Sgd, Natural };

  Optimizer optimizer = Optimizer::Sgd;
  double learning_rate = 0.05;
  int max_iters = 2000;
  double convergence_tol = 1e-7;
  double sr_shift = 1e-3;      // ridge added to the covariance before inverting
  double pinv_cutoff = 1e-10;  // relative singular-value cutoff

  void validate() const;
};

// Thrown when <phi/Psi> vanishes and the loss gradient is undefined.
struct ZeroOverlapError : std::runtime_error {
  ZeroOverlapError() : std::runtime_error("zero overlap, gradient undefined") {}
};

// Maps the unmasked network parameters onto a flat real vector. Each complex
// parameter occupies two consecutive slots (real part, imaginary part);
// masked weights are excluded entirely, so updates can never touch them.
class ParamLayout {
 public:
  explicit ParamLayout(const NeuralState& state);

  int n_complex() const { return static_cast<int>(entries_.size()); }
  int n_real() const { return 2 * n_complex(); }

  RVector pack(const NeuralState& state) const;
  void set(NeuralState& state, const RVector& values) const;
  void apply_step(NeuralState& state, const RVector& delta) const;  // params -= delta

  // d ln Psi / d alpha_j at configuration s, one complex value per real
  // coordinate. Amplitude-layer parameters are holomorphic so the imaginary
  // slot carries i times the real slot; the phase layer is handled by the
  // chain rule through the logistic phase map.
  CVector log_derivatives(const NeuralState& state, const SpinConfiguration& s) const;

 private:
  enum class Slot { AmpVis, AmpHid, AmpWeight, PhaseVis, PhaseHid, PhaseWeight };
  struct Entry {
    Slot slot;
    int i;
    int j;
  };
  static Complex& param_ref(NeuralState& state, const Entry& e);
  static Complex param_value(const NeuralState& state, const Entry& e);

  std::vector<Entry> entries_;
};

// Free-function form of ParamLayout::log_derivatives.
CVector log_derivatives(const NeuralState& state, const SpinConfiguration& s);

// sqrt(<phi/Psi>_{|Psi|^2} * conj(<Psi/phi>_{|phi|^2})). Exact backend equals
// |<Psi|phi>| / (||Psi|| ||phi||); mcmc estimates each factor on its own
// chain. Ratios are only evaluated where the denominator wavefunction is
// nonzero. A target orthogonal to the state's support gives 0, not an error.
ExpectationEstimate fidelity(const NeuralState& state, const TargetState& target,
                             const SamplerConfig& sampler);

struct LossGradient {
  double loss = 0.0;           // -log F
  RVector gradient;            // d loss / d alpha over the flat layout
  ExpectationEstimate fidelity_estimate;
};

LossGradient loss_and_gradient(const NeuralState& state, const TargetState& target,
                               const SamplerConfig& sampler);

void sgd_step(NeuralState& state, const RVector& gradient, double learning_rate);

// S_kl = Re<O_k* O_l>, f_k = Re<O_k* F> with the diagonal force operator
// F(s) = (Psi(s) - phi(s)) Psi*(s) / |Psi(s)|^2 = 1 - phi(s)/Psi(s). This
// pairing makes (S, f) the normal equations of the linearized distance
// minimization, and the force is a plain expectation under both backends.
struct NaturalGradientSystem {
  RMatrix S;
  RVector f;
};

NaturalGradientSystem build_sr_system(const NeuralState& state, const TargetState& target,
                                      const SamplerConfig& sampler, bool centered = false);

// delta = pinv(S + shift*I) f with eigenvalues below cutoff*max discarded;
// parameters then move by -learning_rate * delta.
void natural_gradient_step(NeuralState& state, const NaturalGradientSystem& system,
                           const LearningConfig& config);

struct FidelityTrace {
  std::vector<double> fidelity;   // one entry per recorded iteration
  std::vector<double> std_error;  // zeros under the exact backend
  NeuralState final_state;
  int iterations = 0;  // optimizer steps taken
  bool reinitialized = false;

  double final_fidelity() const { return fidelity.empty() ? 0.0 : fidelity.back(); }
};

// Iterates the configured optimizer until max_iters or until |F - F_prev|
// stays below convergence_tol for 50 consecutive iterations. A zero-overlap
// failure triggers one random re-initialization before giving up.
FidelityTrace train(NeuralState& state, const TargetState& target, const LearningConfig& learn_cfg,
                    const SamplerConfig& sampler_cfg, std::uint64_t trial_seed);

// CSV rows "iteration,fidelity,std_error", values clipped to [0, 1].
std::string trace_to_csv(const FidelityTrace& trace);

}  // namespace nnqs
