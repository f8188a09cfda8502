#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "nnqs/common.hpp"
#include "nnqs/spin.hpp"

namespace nnqs {

enum class Backend { Exact, Mcmc };

// Paper experiments stay at desk scale; exact sums are noise-free there.
inline Backend default_backend(int n) { return n <= 12 ? Backend::Exact : Backend::Mcmc; }

struct SamplerConfig {
  Backend backend = Backend::Exact;
  int n_samples = 5000;
  int burn_in = 1000;
  int thinning = 0;  // 0 = auto (one sweep: N proposals per kept sample)
  std::uint64_t seed = 0;

  int resolved_thinning(int n) const { return thinning > 0 ? thinning : n; }
};

struct ExpectationEstimate {
  Complex value;
  double std_error = 0.0;  // 0 for the exact backend
};

// Single-spin-flip Metropolis chain sampling from the (unnormalized)
// distribution exp(logweight). Emits n_samples configurations after burn-in,
// keeping every thinning-th state; reproducible from cfg.seed.
std::vector<SpinConfiguration> metropolis_chain(
    const std::function<double(const SpinConfiguration&)>& logweight, int n,
    const SamplerConfig& cfg);

// <f>_w: exact backend sums f*w over all 2^n configurations; the mcmc
// backend averages f over a Metropolis chain drawn from w, with a
// batch-means standard error. Zero-weight configurations are skipped before
// f is evaluated.
ExpectationEstimate expectation(const std::function<Complex(const SpinConfiguration&)>& f,
                                const std::function<double(const SpinConfiguration&)>& weight,
                                const SamplerConfig& cfg, int n);

// Log-domain companion of expectation(); weight = exp(logweight). Used where
// |Psi|^2 would overflow as a plain double.
ExpectationEstimate expectation_logw(const std::function<Complex(const SpinConfiguration&)>& f,
                                     const std::function<double(const SpinConfiguration&)>& logweight,
                                     const SamplerConfig& cfg, int n);

}  // namespace nnqs
