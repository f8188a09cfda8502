#include "nnqs/neural_state.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace nnqs {

namespace {

void check_dims(int n_params, int n_spins, const char* where) {
  if (n_params != n_spins) {
    throw std::invalid_argument(std::string(where) + ": dimension mismatch (params " +
                                std::to_string(n_params) + ", configuration " +
                                std::to_string(n_spins) + ")");
  }
}

}  // namespace

Complex log_amplitude(const NetworkParams& params, const SpinConfiguration& s) {
  check_dims(params.n_visible(), s.size(), "log_amplitude");
  Complex result = 0.0;
  for (int i = 0; i < s.size(); ++i) {
    result += static_cast<double>(s[i]) * params.visible_bias[i];
  }
  for (int j = 0; j < params.n_hidden(); ++j) {
    Complex theta = params.hidden_bias[j];
    for (int i = 0; i < s.size(); ++i) {
      theta += params.weights(i, j) * static_cast<double>(s[i]);
    }
    result += log2cosh(theta);
  }
  return result;
}

Complex amplitude(const NetworkParams& params, const SpinConfiguration& s) {
  return std::exp(log_amplitude(params, s));
}

double phase_angle(const PhaseParams& params, const SpinConfiguration& s) {
  check_dims(params.n_visible(), s.size(), "phase_angle");
  Complex free_energy = 0.0;
  for (int i = 0; i < s.size(); ++i) {
    free_energy += static_cast<double>(s[i]) * params.visible_bias[i];
  }
  for (int k = 0; k < params.n_hidden(); ++k) {
    Complex rho = params.hidden_bias[k];
    for (int i = 0; i < s.size(); ++i) {
      rho += params.weights(i, k) * static_cast<double>(s[i]);
    }
    free_energy += log2cosh(rho);
  }
  return free_energy.real();
}

double phase_fraction(const PhaseParams& params, const SpinConfiguration& s) {
  const double turns = phase_angle(params, s) / (2.0 * std::numbers::pi);
  return turns - std::floor(turns);
}

Complex global_log_amplitude(const NeuralState& state, const SpinConfiguration& s) {
  check_dims(state.n_visible, s.size(), "global_log_amplitude");
  Complex log_psi = log_amplitude(state.amplitude_params, s);
  if (state.phase_params) {
    log_psi += Complex{0.0, phase_angle(*state.phase_params, s)};
  }
  return log_psi;
}

Complex global_amplitude(const NeuralState& state, const SpinConfiguration& s) {
  return std::exp(global_log_amplitude(state, s));
}

NeuralState init_random(int n, int h, int m, double scale, std::uint64_t seed) {
  if (n < 1 || h < 1) {
    throw std::invalid_argument("init_random: n and h must be >= 1");
  }
  if (m < 0) {
    throw std::invalid_argument("init_random: m must be >= 0");
  }
  if (scale <= 0.0) {
    throw std::invalid_argument("init_random: scale must be > 0");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(-scale, scale);
  auto draw = [&]() { return Complex{uniform(rng), uniform(rng)}; };

  NeuralState state;
  state.n_visible = n;
  state.amplitude_params.visible_bias = CVector::NullaryExpr(n, [&](Eigen::Index) { return draw(); });
  state.amplitude_params.hidden_bias = CVector::NullaryExpr(h, [&](Eigen::Index) { return draw(); });
  state.amplitude_params.weights = CMatrix(n, h);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < h; ++j) {
      state.amplitude_params.weights(i, j) = draw();
    }
  }
  if (m > 0) {
    PhaseParams phase;
    phase.visible_bias = CVector::NullaryExpr(n, [&](Eigen::Index) { return draw(); });
    phase.hidden_bias = CVector::NullaryExpr(m, [&](Eigen::Index) { return draw(); });
    phase.weights = CMatrix(n, m);
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < m; ++k) {
        phase.weights(i, k) = draw();
      }
    }
    state.phase_params = std::move(phase);
  }
  return state;
}

void apply_mask(NeuralState& state, const SegmentationMask& mask,
                const std::optional<SegmentationMask>& phase_mask) {
  if (mask.n != state.n_visible || mask.h_total != state.amplitude_params.n_hidden()) {
    throw std::invalid_argument("apply_mask: mask shape does not match amplitude layer");
  }
  state.mask = mask;
  for (int i = 0; i < mask.n; ++i) {
    for (int j = 0; j < mask.h_total; ++j) {
      if (!mask.allowed(i, j)) {
        state.amplitude_params.weights(i, j) = Complex{0.0, 0.0};
      }
    }
  }
  if (phase_mask) {
    if (!state.phase_params) {
      throw std::invalid_argument("apply_mask: phase mask given but no phase layer");
    }
    if (phase_mask->n != state.n_visible ||
        phase_mask->h_total != state.phase_params->n_hidden()) {
      throw std::invalid_argument("apply_mask: phase mask shape does not match phase layer");
    }
    state.phase_mask = *phase_mask;
    for (int i = 0; i < phase_mask->n; ++i) {
      for (int k = 0; k < phase_mask->h_total; ++k) {
        if (!phase_mask->allowed(i, k)) {
          state.phase_params->weights(i, k) = Complex{0.0, 0.0};
        }
      }
    }
  }
}

CVector state_vector(const NeuralState& state) {
  const auto configs = enumerate_configs(state.n_visible);
  CVector psi(static_cast<Eigen::Index>(configs.size()));
  for (size_t c = 0; c < configs.size(); ++c) {
    psi[static_cast<Eigen::Index>(c)] = global_amplitude(state, configs[c]);
  }
  return psi;
}

}  // namespace nnqs
