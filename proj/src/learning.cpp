#include "nnqs/learning.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace nnqs {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kConvergenceStreak = 50;
constexpr double kReinitScale = 0.05;

struct EvalCache {
  Complex log_psi;
  CVector tanh_theta;
  CVector tanh_rho;     // empty without a phase layer
  Complex phase_pref;   // 2*pi*i * sigma'(t)
};

EvalCache compute_eval(const NeuralState& state, const SpinConfiguration& s) {
  const NetworkParams& amp = state.amplitude_params;
  if (amp.n_visible() != s.size()) {
    throw std::invalid_argument("learning: state and configuration dimensions differ");
  }
  EvalCache cache;
  Complex log_psi = 0.0;
  for (int i = 0; i < s.size(); ++i) {
    log_psi += static_cast<double>(s[i]) * amp.visible_bias[i];
  }
  cache.tanh_theta.resize(amp.n_hidden());
  for (int j = 0; j < amp.n_hidden(); ++j) {
    Complex theta = amp.hidden_bias[j];
    for (int i = 0; i < s.size(); ++i) {
      theta += amp.weights(i, j) * static_cast<double>(s[i]);
    }
    log_psi += log2cosh(theta);
    cache.tanh_theta[j] = std::tanh(theta);
  }
  if (state.phase_params) {
    const PhaseParams& ph = *state.phase_params;
    Complex free_energy = 0.0;
    for (int i = 0; i < s.size(); ++i) {
      free_energy += static_cast<double>(s[i]) * ph.visible_bias[i];
    }
    cache.tanh_rho.resize(ph.n_hidden());
    for (int k = 0; k < ph.n_hidden(); ++k) {
      Complex rho = ph.hidden_bias[k];
      for (int i = 0; i < s.size(); ++i) {
        rho += ph.weights(i, k) * static_cast<double>(s[i]);
      }
      free_energy += log2cosh(rho);
      cache.tanh_rho[k] = std::tanh(rho);
    }
    const double sig = logistic(free_energy.real());
    log_psi += Complex{0.0, kTwoPi * sig};
    cache.phase_pref = Complex{0.0, kTwoPi * sig * (1.0 - sig)};
  }
  cache.log_psi = log_psi;
  return cache;
}

}  // namespace

void LearningConfig::validate() const {
  if (learning_rate <= 0.0) {
    throw std::invalid_argument("LearningConfig: learning_rate must be > 0");
  }
  if (max_iters < 1) {
    throw std::invalid_argument("LearningConfig: max_iters must be >= 1");
  }
  if (convergence_tol < 0.0 || sr_shift < 0.0 || pinv_cutoff < 0.0) {
    throw std::invalid_argument("LearningConfig: tolerances must be >= 0");
  }
}

ParamLayout::ParamLayout(const NeuralState& state) {
  const NetworkParams& amp = state.amplitude_params;
  entries_.reserve(
      static_cast<size_t>(amp.n_visible() + amp.n_hidden() + amp.n_visible() * amp.n_hidden()));
  for (int i = 0; i < amp.n_visible(); ++i) {
    entries_.push_back({Slot::AmpVis, i, 0});
  }
  for (int j = 0; j < amp.n_hidden(); ++j) {
    entries_.push_back({Slot::AmpHid, 0, j});
  }
  for (int i = 0; i < amp.n_visible(); ++i) {
    for (int j = 0; j < amp.n_hidden(); ++j) {
      if (!state.mask || state.mask->allowed(i, j)) {
        entries_.push_back({Slot::AmpWeight, i, j});
      }
    }
  }
  if (state.phase_params) {
    const PhaseParams& ph = *state.phase_params;
    for (int i = 0; i < ph.n_visible(); ++i) {
      entries_.push_back({Slot::PhaseVis, i, 0});
    }
    for (int k = 0; k < ph.n_hidden(); ++k) {
      entries_.push_back({Slot::PhaseHid, 0, k});
    }
    for (int i = 0; i < ph.n_visible(); ++i) {
      for (int k = 0; k < ph.n_hidden(); ++k) {
        if (!state.phase_mask || state.phase_mask->allowed(i, k)) {
          entries_.push_back({Slot::PhaseWeight, i, k});
        }
      }
    }
  }
}

Complex& ParamLayout::param_ref(NeuralState& state, const Entry& e) {
  switch (e.slot) {
    case Slot::AmpVis:
      return state.amplitude_params.visible_bias[e.i];
    case Slot::AmpHid:
      return state.amplitude_params.hidden_bias[e.j];
    case Slot::AmpWeight:
      return state.amplitude_params.weights(e.i, e.j);
    case Slot::PhaseVis:
      return state.phase_params->visible_bias[e.i];
    case Slot::PhaseHid:
      return state.phase_params->hidden_bias[e.j];
    case Slot::PhaseWeight:
    default:
      return state.phase_params->weights(e.i, e.j);
  }
}

Complex ParamLayout::param_value(const NeuralState& state, const Entry& e) {
  return param_ref(const_cast<NeuralState&>(state), e);
}

RVector ParamLayout::pack(const NeuralState& state) const {
  RVector out(n_real());
  for (int k = 0; k < n_complex(); ++k) {
    const Complex v = param_value(state, entries_[k]);
    out[2 * k] = v.real();
    out[2 * k + 1] = v.imag();
  }
  return out;
}

void ParamLayout::set(NeuralState& state, const RVector& values) const {
  if (values.size() != n_real()) {
    throw std::invalid_argument("ParamLayout::set: wrong vector length");
  }
  for (int k = 0; k < n_complex(); ++k) {
    param_ref(state, entries_[k]) = Complex{values[2 * k], values[2 * k + 1]};
  }
}

void ParamLayout::apply_step(NeuralState& state, const RVector& delta) const {
  if (delta.size() != n_real()) {
    throw std::invalid_argument("ParamLayout::apply_step: wrong vector length");
  }
  for (int k = 0; k < n_complex(); ++k) {
    param_ref(state, entries_[k]) -= Complex{delta[2 * k], delta[2 * k + 1]};
  }
}

CVector ParamLayout::log_derivatives(const NeuralState& state, const SpinConfiguration& s) const {
  const EvalCache cache = compute_eval(state, s);
  CVector out(n_real());
  for (int k = 0; k < n_complex(); ++k) {
    const Entry& e = entries_[k];
    switch (e.slot) {
      case Slot::AmpVis:
      case Slot::AmpHid:
      case Slot::AmpWeight: {
        // The amplitude layer is holomorphic in its parameters.
        Complex d;
        if (e.slot == Slot::AmpVis) {
          d = static_cast<double>(s[e.i]);
        } else if (e.slot == Slot::AmpHid) {
          d = cache.tanh_theta[e.j];
        } else {
          d = static_cast<double>(s[e.i]) * cache.tanh_theta[e.j];
        }
        out[2 * k] = d;
        out[2 * k + 1] = Complex{0.0, 1.0} * d;
        break;
      }
      case Slot::PhaseVis: {
        out[2 * k] = cache.phase_pref * static_cast<double>(s[e.i]);
        out[2 * k + 1] = 0.0;  // Im(c_i) never enters Re of the free energy
        break;
      }
      case Slot::PhaseHid: {
        const Complex th = cache.tanh_rho[e.j];
        out[2 * k] = cache.phase_pref * th.real();
        out[2 * k + 1] = cache.phase_pref * (-th.imag());
        break;
      }
      case Slot::PhaseWeight: {
        const Complex th = cache.tanh_rho[e.j];
        const double si = static_cast<double>(s[e.i]);
        out[2 * k] = cache.phase_pref * si * th.real();
        out[2 * k + 1] = cache.phase_pref * si * (-th.imag());
        break;
      }
    }
  }
  return out;
}

CVector log_derivatives(const NeuralState& state, const SpinConfiguration& s) {
  return ParamLayout(state).log_derivatives(state, s);
}

namespace {

// Exact-backend evaluation over all 2^N configurations. Amplitudes are
// stored relative to exp(shift) so the table never overflows; every formula
// below uses shift-invariant combinations unless noted.
struct ExactTable {
  std::vector<SpinConfiguration> configs;
  CVector log_psi;  // raw log amplitudes
  CVector psi;      // exp(log_psi - shift)
  RVector weight;   // |psi|^2
  double shift = 0.0;
  double total_weight = 0.0;
  CMatrix O;        // n_real x C, empty unless requested
};

ExactTable build_exact_table(const NeuralState& state, const ParamLayout* layout) {
  ExactTable table;
  table.configs = enumerate_configs(state.n_visible);
  const auto C = static_cast<Eigen::Index>(table.configs.size());
  table.log_psi.resize(C);
  if (layout != nullptr) {
    table.O.resize(layout->n_real(), C);
  }
  for (Eigen::Index c = 0; c < C; ++c) {
    if (layout != nullptr) {
      table.O.col(c) = layout->log_derivatives(state, table.configs[c]);
    }
    table.log_psi[c] = global_log_amplitude(state, table.configs[c]);
    if (!std::isfinite(table.log_psi[c].real()) || !std::isfinite(table.log_psi[c].imag())) {
      throw std::runtime_error("learning: non-finite log amplitude at configuration index " +
                               std::to_string(c));
    }
  }
  table.shift = table.log_psi.real().maxCoeff();
  table.psi.resize(C);
  table.weight.resize(C);
  for (Eigen::Index c = 0; c < C; ++c) {
    table.psi[c] = std::exp(table.log_psi[c] - table.shift);
    table.weight[c] = std::norm(table.psi[c]);
  }
  table.total_weight = table.weight.sum();
  if (table.total_weight == 0.0) {
    throw std::runtime_error("learning: state has zero total weight");
  }
  return table;
}

// <phi/Psi>_{|Psi|^2} and <Psi/phi>_{|phi|^2} as plain sums; the shift
// cancels in their product, which is all fidelity needs.
void exact_fidelity_factors(const ExactTable& table, const TargetState& target, Complex& f1,
                            Complex& f2) {
  Complex overlap1 = 0.0;  // sum phi conj(psi)
  Complex overlap2 = 0.0;  // sum psi conj(phi)
  double norm_phi = 0.0;
  for (Eigen::Index c = 0; c < table.psi.size(); ++c) {
    const Complex phi = target.amplitudes[c];
    overlap1 += phi * std::conj(table.psi[c]);
    overlap2 += table.psi[c] * std::conj(phi);
    norm_phi += std::norm(phi);
  }
  f1 = overlap1 / table.total_weight;
  f2 = overlap2 / norm_phi;
}

ExpectationEstimate fidelity_exact(const NeuralState& state, const TargetState& target) {
  const ExactTable table = build_exact_table(state, nullptr);
  Complex f1, f2;
  exact_fidelity_factors(table, target, f1, f2);
  return {Complex{std::sqrt(std::abs(f1 * std::conj(f2))), 0.0}, 0.0};
}

ExpectationEstimate fidelity_mcmc(const NeuralState& state, const TargetState& target,
                                  const SamplerConfig& cfg) {
  SamplerConfig cfg1 = cfg;
  SamplerConfig cfg2 = cfg;
  cfg2.seed = mix_seed(cfg.seed, 0xF2);
  auto log_w_psi = [&](const SpinConfiguration& s) {
    return 2.0 * global_log_amplitude(state, s).real();
  };
  auto log_w_phi = [&](const SpinConfiguration& s) {
    const double m = std::abs(target.amplitude(s));
    return m > 0.0 ? 2.0 * std::log(m) : -std::numeric_limits<double>::infinity();
  };
  auto ratio_phi_psi = [&](const SpinConfiguration& s) {
    return target.amplitude(s) * std::exp(-global_log_amplitude(state, s));
  };
  auto ratio_psi_phi = [&](const SpinConfiguration& s) {
    return std::exp(global_log_amplitude(state, s)) / target.amplitude(s);
  };
  const ExpectationEstimate f1 = expectation_logw(ratio_phi_psi, log_w_psi, cfg1, state.n_visible);
  const ExpectationEstimate f2 = expectation_logw(ratio_psi_phi, log_w_phi, cfg2, state.n_visible);
  const double value = std::sqrt(std::abs(f1.value * std::conj(f2.value)));
  const double tiny = std::numeric_limits<double>::min();
  const double rel1 = f1.std_error / std::max(std::abs(f1.value), tiny);
  const double rel2 = f2.std_error / std::max(std::abs(f2.value), tiny);
  const double std_error = 0.5 * value * std::sqrt(rel1 * rel1 + rel2 * rel2);
  return {Complex{value, 0.0}, std_error};
}

}  // namespace

ExpectationEstimate fidelity(const NeuralState& state, const TargetState& target,
                             const SamplerConfig& sampler) {
  if (state.n_visible != target.n_visible) {
    throw std::invalid_argument("fidelity: state and target dimensions differ");
  }
  return sampler.backend == Backend::Exact ? fidelity_exact(state, target)
                                           : fidelity_mcmc(state, target, sampler);
}

LossGradient loss_and_gradient(const NeuralState& state, const TargetState& target,
                               const SamplerConfig& sampler) {
  if (state.n_visible != target.n_visible) {
    throw std::invalid_argument("loss_and_gradient: state and target dimensions differ");
  }
  const ParamLayout layout(state);
  LossGradient result;

  if (sampler.backend == Backend::Exact) {
    const ExactTable table = build_exact_table(state, &layout);
    const auto C = table.psi.size();
    // r = phi/Psi on the support of |Psi|^2; zero-weight configurations drop
    // out of every sum on their own.
    Complex mean_r = 0.0;
    CVector mean_O = CVector::Zero(layout.n_real());
    CVector mean_rO = CVector::Zero(layout.n_real());
    for (Eigen::Index c = 0; c < C; ++c) {
      const double w = table.weight[c];
      if (w == 0.0) {
        continue;
      }
      const Complex r = target.amplitudes[c] / table.psi[c];
      const CVector conj_O = table.O.col(c).conjugate();
      mean_r += w * r;
      mean_O += w * conj_O;
      mean_rO += (w * r) * conj_O;
    }
    mean_r /= table.total_weight;
    mean_O /= table.total_weight;
    mean_rO /= table.total_weight;
    if (mean_r == Complex{0.0, 0.0}) {
      throw ZeroOverlapError();
    }
    result.gradient = (mean_O - mean_rO / mean_r).real();

    Complex f1, f2;
    exact_fidelity_factors(table, target, f1, f2);
    const double fv = std::sqrt(std::abs(f1 * std::conj(f2)));
    result.fidelity_estimate = {Complex{fv, 0.0}, 0.0};
    result.loss = -std::log(fv);
    return result;
  }

  auto log_w_psi = [&](const SpinConfiguration& s) {
    return 2.0 * global_log_amplitude(state, s).real();
  };
  const auto samples = metropolis_chain(log_w_psi, state.n_visible, sampler);
  Complex mean_r = 0.0;
  CVector mean_O = CVector::Zero(layout.n_real());
  CVector mean_rO = CVector::Zero(layout.n_real());
  for (const auto& s : samples) {
    const Complex r = target.amplitude(s) * std::exp(-global_log_amplitude(state, s));
    const CVector conj_O = layout.log_derivatives(state, s).conjugate();
    mean_r += r;
    mean_O += conj_O;
    mean_rO += r * conj_O;
  }
  const double inv = 1.0 / static_cast<double>(samples.size());
  mean_r *= inv;
  mean_O *= inv;
  mean_rO *= inv;
  if (std::abs(mean_r) < std::numeric_limits<double>::min()) {
    throw ZeroOverlapError();
  }
  result.gradient = (mean_O - mean_rO / mean_r).real();
  result.fidelity_estimate = fidelity_mcmc(state, target, sampler);
  const double fv = result.fidelity_estimate.value.real();
  result.loss = fv > 0.0 ? -std::log(fv) : std::numeric_limits<double>::infinity();
  return result;
}

void sgd_step(NeuralState& state, const RVector& gradient, double learning_rate) {
  if (!gradient.allFinite()) {
    throw std::invalid_argument("sgd_step: gradient has non-finite entries");
  }
  const ParamLayout layout(state);
  layout.apply_step(state, learning_rate * gradient);
}

NaturalGradientSystem build_sr_system(const NeuralState& state, const TargetState& target,
                                      const SamplerConfig& sampler, bool centered) {
  if (state.n_visible != target.n_visible) {
    throw std::invalid_argument("build_sr_system: state and target dimensions differ");
  }
  const ParamLayout layout(state);
  NaturalGradientSystem system;

  if (sampler.backend == Backend::Exact) {
    const ExactTable table = build_exact_table(state, &layout);
    const auto C = table.psi.size();
    // Diagonal force (Psi(s) - phi(s)) Psi*(s) / |Psi(s)|^2 = 1 - phi/Psi,
    // the reading of the force operator that pairs with S as the normal
    // equations of the linearized distance minimization. Zero-weight
    // configurations drop out of the weighted sums below.
    CVector force_vals = CVector::Zero(C);
    for (Eigen::Index c = 0; c < C; ++c) {
      if (table.weight[c] > 0.0) {
        force_vals[c] = 1.0 - target.amplitudes[c] * std::exp(-table.log_psi[c]);
      }
    }
    CMatrix weighted = table.O.conjugate();
    for (Eigen::Index c = 0; c < C; ++c) {
      weighted.col(c) *= table.weight[c];
    }
    system.S = (weighted * table.O.transpose()).real() / table.total_weight;
    system.f = (weighted * force_vals).real() / table.total_weight;
    if (centered) {
      const CVector mean_conj_O = weighted.rowwise().sum() / table.total_weight;
      system.S -= (mean_conj_O * mean_conj_O.adjoint()).real();
    }
    return system;
  }

  auto log_w_psi = [&](const SpinConfiguration& s) {
    return 2.0 * global_log_amplitude(state, s).real();
  };
  const auto samples = metropolis_chain(log_w_psi, state.n_visible, sampler);
  const int P = layout.n_real();
  CMatrix O(P, static_cast<Eigen::Index>(samples.size()));
  // Same force as the exact backend, estimated over the chain:
  // f_k = Re< O_k* (1 - phi/Psi) >.
  CVector mean_force_O = CVector::Zero(P);
  for (size_t i = 0; i < samples.size(); ++i) {
    O.col(static_cast<Eigen::Index>(i)) = layout.log_derivatives(state, samples[i]);
    const Complex force = 1.0 - target.amplitude(samples[i]) *
                                    std::exp(-global_log_amplitude(state, samples[i]));
    mean_force_O += force * O.col(static_cast<Eigen::Index>(i)).conjugate();
  }
  const double inv = 1.0 / static_cast<double>(samples.size());
  system.S = (O.conjugate() * O.transpose()).real() * inv;
  if (centered) {
    const CVector mean_conj_O = O.conjugate().rowwise().sum() * inv;
    system.S -= (mean_conj_O * mean_conj_O.adjoint()).real();
  }
  system.f = (mean_force_O * inv).real();
  return system;
}

void natural_gradient_step(NeuralState& state, const NaturalGradientSystem& system,
                           const LearningConfig& config) {
  config.validate();
  if (!system.f.allFinite() || !system.S.allFinite()) {
    throw std::invalid_argument("natural_gradient_step: non-finite SR system");
  }
  const Eigen::Index P = system.f.size();
  RMatrix M = 0.5 * (system.S + system.S.transpose());
  M.diagonal().array() += config.sr_shift;
  const Eigen::SelfAdjointEigenSolver<RMatrix> eigen(M);
  if (eigen.info() != Eigen::Success) {
    throw std::runtime_error("natural_gradient_step: eigendecomposition failed");
  }
  const RVector& eigenvalues = eigen.eigenvalues();
  const double max_abs = eigenvalues.cwiseAbs().maxCoeff();
  const double cutoff = config.pinv_cutoff * max_abs;
  RVector inv_eig = RVector::Zero(P);
  int kept = 0;
  for (Eigen::Index i = 0; i < P; ++i) {
    if (std::abs(eigenvalues[i]) > cutoff && eigenvalues[i] != 0.0) {
      inv_eig[i] = 1.0 / eigenvalues[i];
      ++kept;
    }
  }
  if (kept == 0) {
    throw std::runtime_error("degenerate SR system");
  }
  const RVector delta =
      eigen.eigenvectors() * (inv_eig.asDiagonal() * (eigen.eigenvectors().transpose() * system.f));
  const ParamLayout layout(state);
  layout.apply_step(state, config.learning_rate * delta);
}

FidelityTrace train(NeuralState& state, const TargetState& target, const LearningConfig& learn_cfg,
                    const SamplerConfig& sampler_cfg, std::uint64_t trial_seed) {
  learn_cfg.validate();
  FidelityTrace trace;
  double prev_fidelity = std::numeric_limits<double>::quiet_NaN();
  int streak = 0;
  bool stepped_since_record = false;

  SamplerConfig sampler = sampler_cfg;
  const ParamLayout layout(state);

  auto reinitialize = [&]() {
    const int h = state.amplitude_params.n_hidden();
    const int m = state.phase_params ? state.phase_params->n_hidden() : 0;
    const auto mask = state.mask;
    const auto phase_mask = state.phase_mask;
    state = init_random(state.n_visible, h, m, kReinitScale, mix_seed(trial_seed, 0x5EED));
    if (mask) {
      apply_mask(state, *mask, phase_mask);
    }
    trace.reinitialized = true;
    prev_fidelity = std::numeric_limits<double>::quiet_NaN();
    streak = 0;
    stepped_since_record = true;
  };

  for (int iter = 0; iter < learn_cfg.max_iters; ++iter) {
    sampler.seed = mix_seed(trial_seed, static_cast<std::uint64_t>(iter));
    try {
      ExpectationEstimate estimate;
      RVector gradient;
      NaturalGradientSystem system;
      if (learn_cfg.optimizer == LearningConfig::Optimizer::Sgd) {
        LossGradient lg = loss_and_gradient(state, target, sampler);
        estimate = lg.fidelity_estimate;
        gradient = std::move(lg.gradient);
      } else {
        estimate = fidelity(state, target, sampler);
        system = build_sr_system(state, target, sampler);
      }
      const double f = estimate.value.real();
      trace.fidelity.push_back(f);
      trace.std_error.push_back(estimate.std_error);
      stepped_since_record = false;
      if (!std::isnan(prev_fidelity) && std::abs(f - prev_fidelity) < learn_cfg.convergence_tol) {
        if (++streak >= kConvergenceStreak) {
          prev_fidelity = f;
          break;
        }
      } else {
        streak = 0;
      }
      prev_fidelity = f;

      if (learn_cfg.optimizer == LearningConfig::Optimizer::Sgd) {
        if (!gradient.allFinite()) {
          throw std::runtime_error("train: non-finite gradient");
        }
        layout.apply_step(state, learn_cfg.learning_rate * gradient);
      } else {
        natural_gradient_step(state, system, learn_cfg);
      }
      ++trace.iterations;
      stepped_since_record = true;
    } catch (const ZeroOverlapError&) {
      if (trace.reinitialized) {
        throw;
      }
      reinitialize();
    }
  }

  if (stepped_since_record || trace.fidelity.empty()) {
    sampler.seed = mix_seed(trial_seed, static_cast<std::uint64_t>(learn_cfg.max_iters));
    const ExpectationEstimate final_estimate = fidelity(state, target, sampler);
    trace.fidelity.push_back(final_estimate.value.real());
    trace.std_error.push_back(final_estimate.std_error);
  }
  trace.final_state = state;
  return trace;
}

std::string trace_to_csv(const FidelityTrace& trace) {
  std::string out = "iteration,fidelity,std_error\n";
  char line[96];
  for (size_t i = 0; i < trace.fidelity.size(); ++i) {
    const double f = std::clamp(trace.fidelity[i], 0.0, 1.0);
    std::snprintf(line, sizeof(line), "%zu,%.17g,%.17g\n", i, f, trace.std_error[i]);
    out += line;
  }
  return out;
}

}  // namespace nnqs
