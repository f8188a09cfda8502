#include "nnqs/sampling.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace nnqs {

namespace {

void check_finite_f(Complex fv, const SpinConfiguration& s) {
  if (!std::isfinite(fv.real()) || !std::isfinite(fv.imag())) {
    throw std::runtime_error("expectation: non-finite f at configuration index " +
                             std::to_string(basis_index(s)));
  }
}

void check_weight(double logw, const SpinConfiguration& s) {
  // -inf (zero weight) is fine; +inf or NaN is not.
  if (std::isnan(logw) || logw == std::numeric_limits<double>::infinity()) {
    throw std::runtime_error("expectation: non-finite weight at configuration index " +
                             std::to_string(basis_index(s)));
  }
}

}  // namespace

std::vector<SpinConfiguration> metropolis_chain(
    const std::function<double(const SpinConfiguration&)>& logweight, int n,
    const SamplerConfig& cfg) {
  if (cfg.backend != Backend::Mcmc) {
    throw std::invalid_argument("metropolis_chain: config backend must be mcmc");
  }
  if (n < 1) {
    throw std::invalid_argument("metropolis_chain: n must be >= 1");
  }
  if (cfg.n_samples < 1) {
    throw std::invalid_argument("metropolis_chain: n_samples must be >= 1");
  }
  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<int> pick_site(0, n - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::uint64_t dim = std::uint64_t{1} << std::min(n, 62);
  std::uniform_int_distribution<std::uint64_t> pick_index(0, dim - 1);

  // Start from a configuration with nonzero weight.
  SpinConfiguration current = spin_of_index(pick_index(rng), n);
  double current_lw = logweight(current);
  check_weight(current_lw, current);
  std::uint64_t tries = 1;
  while (!std::isfinite(current_lw)) {
    if (tries++ >= dim) {
      throw std::runtime_error(
          "metropolis_chain: could not find a configuration with nonzero weight");
    }
    current = spin_of_index(pick_index(rng), n);
    current_lw = logweight(current);
    check_weight(current_lw, current);
  }

  const int thin = cfg.resolved_thinning(n);
  std::vector<SpinConfiguration> samples;
  samples.reserve(cfg.n_samples);
  const std::int64_t total_steps =
      static_cast<std::int64_t>(cfg.burn_in) + static_cast<std::int64_t>(cfg.n_samples) * thin;
  for (std::int64_t step = 1; step <= total_steps; ++step) {
    const int site = pick_site(rng);
    SpinConfiguration proposal = current;
    proposal.values[site] = -proposal.values[site];
    const double proposal_lw = logweight(proposal);
    check_weight(proposal_lw, proposal);
    const double u = unit(rng);
    if (std::isfinite(proposal_lw) &&
        (proposal_lw >= current_lw || u < std::exp(proposal_lw - current_lw))) {
      current = std::move(proposal);
      current_lw = proposal_lw;
    }
    if (step > cfg.burn_in && (step - cfg.burn_in) % thin == 0) {
      samples.push_back(current);
    }
  }
  return samples;
}

ExpectationEstimate expectation_logw(
    const std::function<Complex(const SpinConfiguration&)>& f,
    const std::function<double(const SpinConfiguration&)>& logweight, const SamplerConfig& cfg,
    int n) {
  if (cfg.backend == Backend::Exact) {
    const auto configs = enumerate_configs(n);
    std::vector<double> logw(configs.size());
    double max_logw = -std::numeric_limits<double>::infinity();
    for (size_t c = 0; c < configs.size(); ++c) {
      logw[c] = logweight(configs[c]);
      check_weight(logw[c], configs[c]);
      max_logw = std::max(max_logw, logw[c]);
    }
    if (!std::isfinite(max_logw)) {
      throw std::runtime_error("expectation: total weight is zero");
    }
    Complex num = 0.0;
    double den = 0.0;
    for (size_t c = 0; c < configs.size(); ++c) {
      if (!std::isfinite(logw[c])) {
        continue;  // zero weight: skipped before f is touched
      }
      const double w = std::exp(logw[c] - max_logw);
      if (w == 0.0) {
        continue;
      }
      const Complex fv = f(configs[c]);
      check_finite_f(fv, configs[c]);
      num += fv * w;
      den += w;
    }
    if (den == 0.0) {
      throw std::runtime_error("expectation: total weight is zero");
    }
    return {num / den, 0.0};
  }

  const auto samples = metropolis_chain(logweight, n, cfg);
  std::vector<Complex> values(samples.size());
  Complex sum = 0.0;
  for (size_t i = 0; i < samples.size(); ++i) {
    values[i] = f(samples[i]);
    check_finite_f(values[i], samples[i]);
    sum += values[i];
  }
  const Complex mean = sum / static_cast<double>(samples.size());

  // Batch means absorb residual autocorrelation between kept samples.
  const int n_batches = static_cast<int>(std::min<std::size_t>(32, samples.size()));
  const std::size_t batch_len = samples.size() / n_batches;
  double var_re = 0.0;
  double var_im = 0.0;
  if (batch_len >= 1 && n_batches >= 2) {
    for (int b = 0; b < n_batches; ++b) {
      Complex batch_sum = 0.0;
      for (std::size_t i = b * batch_len; i < (b + 1) * batch_len; ++i) {
        batch_sum += values[i];
      }
      const Complex dev = batch_sum / static_cast<double>(batch_len) - mean;
      var_re += dev.real() * dev.real();
      var_im += dev.imag() * dev.imag();
    }
    var_re /= static_cast<double>(n_batches) * (n_batches - 1);
    var_im /= static_cast<double>(n_batches) * (n_batches - 1);
  }
  return {mean, std::sqrt(var_re + var_im)};
}

ExpectationEstimate expectation(const std::function<Complex(const SpinConfiguration&)>& f,
                                const std::function<double(const SpinConfiguration&)>& weight,
                                const SamplerConfig& cfg, int n) {
  auto logweight = [&weight](const SpinConfiguration& s) {
    const double w = weight(s);
    if (w < 0.0 || !std::isfinite(w)) {
      if (std::isnan(w) || w == std::numeric_limits<double>::infinity()) {
        return std::numeric_limits<double>::infinity();  // flagged by check_weight
      }
      return std::numeric_limits<double>::quiet_NaN();
    }
    return w > 0.0 ? std::log(w) : -std::numeric_limits<double>::infinity();
  };
  return expectation_logw(f, logweight, cfg, n);
}

}  // namespace nnqs
