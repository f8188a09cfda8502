#include "nnqs/classify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <future>
#include <iomanip>
#include <ostream>
#include <random>
#include <stdexcept>

#include <json.hpp>

namespace nnqs {

namespace {

int env_thread_count() {
  const char* raw = std::getenv("NNQS_THREADS");
  if (raw == nullptr) {
    return 1;
  }
  const int n = std::atoi(raw);
  return n > 1 ? n : 1;
}

}  // namespace

NeuralState make_learner(const PartitionSpec& spec, const LearnerOptions& options,
                         std::uint64_t seed) {
  if (options.rho < 1 || (options.phase_layer && options.phase_rho < 1)) {
    throw std::invalid_argument("make_learner: rho must be >= 1");
  }
  const int n = spec.n();
  const int h = options.rho * n;
  const int m = options.phase_layer ? options.phase_rho * n : 0;
  NeuralState state = init_random(n, h, m, options.init_scale, seed);
  if (!spec.is_free()) {
    const SegmentationMask mask = make_mask(spec, options.rho);
    if (options.phase_layer) {
      apply_mask(state, mask, make_mask(spec, options.phase_rho));
    } else {
      apply_mask(state, mask);
    }
  }
  return state;
}

double PerformanceSet::window_lo() const { return std::clamp(mean - spread, 0.0, 1.0); }
double PerformanceSet::window_hi() const { return std::clamp(mean + spread, 0.0, 1.0); }

TrialsResult run_trials_detailed(const TargetState& target, const PartitionSpec& spec, int trials,
                                 const LearningConfig& learn_cfg, const SamplerConfig& sampler_cfg,
                                 std::uint64_t base_seed, const LearnerOptions& options) {
  if (trials < 2) {
    throw std::invalid_argument("run_trials: need at least 2 trials");
  }
  if (spec.n() != target.n_visible) {
    throw std::invalid_argument("run_trials: partition size does not match target");
  }

  auto one_trial = [&](int t) -> FidelityTrace {
    const std::uint64_t trial_seed = base_seed + static_cast<std::uint64_t>(t);
    NeuralState state = make_learner(spec, options, trial_seed);
    return train(state, target, learn_cfg, sampler_cfg, trial_seed);
  };

  TrialsResult result;
  std::vector<double> finals;
  const int threads = env_thread_count();
  std::vector<std::optional<FidelityTrace>> slots(trials);
  if (threads > 1) {
    std::vector<std::future<FidelityTrace>> futures;
    futures.reserve(trials);
    for (int t = 0; t < trials; ++t) {
      futures.push_back(std::async(std::launch::async, one_trial, t));
    }
    for (int t = 0; t < trials; ++t) {
      try {
        slots[t] = futures[t].get();
      } catch (const std::exception&) {
        slots[t].reset();  // failed trial: recorded below as excluded
      }
    }
  } else {
    for (int t = 0; t < trials; ++t) {
      try {
        slots[t] = one_trial(t);
      } catch (const std::exception&) {
        slots[t].reset();
      }
    }
  }
  for (int t = 0; t < trials; ++t) {
    if (!slots[t]) {
      continue;
    }
    finals.push_back(slots[t]->final_fidelity());
    result.traces.push_back(std::move(*slots[t]));
    result.seeds.push_back(base_seed + static_cast<std::uint64_t>(t));
  }
  if (finals.size() < 2) {
    throw std::runtime_error("run_trials: fewer than 2 trials survived for learner " +
                             spec.to_string());
  }

  double mean = 0.0;
  double mean_sq = 0.0;
  for (double f : finals) {
    mean += f;
    mean_sq += f * f;
  }
  mean /= static_cast<double>(finals.size());
  mean_sq /= static_cast<double>(finals.size());
  result.set.learner = spec;
  result.set.mean = mean;
  result.set.spread = std::sqrt(std::max(0.0, mean_sq - mean * mean));
  result.set.trials = static_cast<int>(finals.size());
  return result;
}

PerformanceSet run_trials(const TargetState& target, const PartitionSpec& spec, int trials,
                          const LearningConfig& learn_cfg, const SamplerConfig& sampler_cfg,
                          std::uint64_t base_seed, const LearnerOptions& options) {
  return run_trials_detailed(target, spec, trials, learn_cfg, sampler_cfg, base_seed, options).set;
}

Verdict witness_decision(const PerformanceSet& free_set, const PerformanceSet& restricted) {
  const bool intersect = restricted.window_lo() <= free_set.window_hi() &&
                         free_set.window_lo() <= restricted.window_hi();
  return intersect ? Verdict::WitnessedSeparable : Verdict::EntangledAcrossPartition;
}

double relative_fidelity(const PerformanceSet& free_set, const PerformanceSet& restricted) {
  if (free_set.mean <= 0.0) {
    throw std::runtime_error("relative_fidelity: free learner failed");
  }
  return std::clamp(restricted.mean / free_set.mean, 0.0, 1.0);
}

double gme(double relative_fidelity) {
  if (relative_fidelity < 0.0 || relative_fidelity > 1.0) {
    throw std::invalid_argument("gme: relative fidelity must be in [0, 1]");
  }
  return 1.0 - relative_fidelity * relative_fidelity;
}

namespace {

// Sub-index of `index` on the block's qubits, block order, MSB first.
std::uint64_t block_sub_index(std::uint64_t index, const std::vector<int>& block, int n) {
  std::uint64_t sub = 0;
  for (int q : block) {
    sub = (sub << 1) | ((index >> (n - 1 - q)) & 1u);
  }
  return sub;
}

}  // namespace

CriticalFidelityResult critical_fidelity_oracle(const TargetState& target,
                                                const PartitionSpec& spec, int restarts) {
  if (spec.n() != target.n_visible) {
    throw std::invalid_argument("critical_fidelity_oracle: partition does not match target");
  }
  if (target.n_visible > 10) {
    throw std::invalid_argument("critical_fidelity_oracle: supported up to 10 qubits");
  }
  if (restarts < 1) {
    throw std::invalid_argument("critical_fidelity_oracle: restarts must be >= 1");
  }
  constexpr int kMaxSweeps = 500;
  constexpr double kTol = 1e-10;

  const int n = target.n_visible;
  const int K = spec.num_blocks();
  const std::uint64_t dim = target.dim();
  // Per-configuration block sub-indices, computed once.
  std::vector<std::vector<std::uint64_t>> sub(K, std::vector<std::uint64_t>(dim));
  for (int m = 0; m < K; ++m) {
    for (std::uint64_t j = 0; j < dim; ++j) {
      sub[m][j] = block_sub_index(j, spec.blocks()[m], n);
    }
  }

  CriticalFidelityResult best;
  for (int restart = 0; restart < restarts; ++restart) {
    std::mt19937_64 rng(mix_seed(0xA15C0DE, static_cast<std::uint64_t>(restart)));
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<CVector> blocks(K);
    for (int m = 0; m < K; ++m) {
      CVector v(Eigen::Index{1} << spec.blocks()[m].size());
      for (Eigen::Index i = 0; i < v.size(); ++i) {
        v[i] = Complex{gauss(rng), gauss(rng)};
      }
      blocks[m] = v / v.norm();
    }

    double value = 0.0;
    bool converged = false;
    for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
      const double previous = value;
      for (int m = 0; m < K; ++m) {
        // Optimal block state is the normalized partial contraction of the
        // target against all other blocks.
        CVector g = CVector::Zero(blocks[m].size());
        for (std::uint64_t j = 0; j < dim; ++j) {
          Complex prod = std::conj(target.amplitudes[static_cast<Eigen::Index>(j)]);
          for (int mm = 0; mm < K; ++mm) {
            if (mm != m) {
              prod *= blocks[mm][static_cast<Eigen::Index>(sub[mm][j])];
            }
          }
          g[static_cast<Eigen::Index>(sub[m][j])] += prod;
        }
        const double g_norm = g.norm();
        if (g_norm == 0.0) {
          break;  // orthogonal corner; restart carries on from elsewhere
        }
        blocks[m] = g.conjugate() / g_norm;
        value = g_norm;
      }
      converged = std::abs(value - previous) < kTol;
    }
    if (value > best.value) {
      best.value = value;
      best.block_states = blocks;
      best.converged = converged;
    }
  }
  best.value = std::min(best.value, 1.0);
  return best;
}

ClassificationReport classify(const TargetState& target, const std::string& target_name,
                              const std::vector<PartitionSpec>& candidate_specs, int trials,
                              const LearningConfig& learn_cfg, const SamplerConfig& sampler_cfg,
                              std::uint64_t base_seed, const LearnerOptions& options) {
  if (candidate_specs.empty()) {
    throw std::invalid_argument("classify: candidate list is empty");
  }
  ClassificationReport report;
  report.target_name = target_name;
  report.free_set = run_trials(target, PartitionSpec::free_learner(target.n_visible), trials,
                               learn_cfg, sampler_cfg, base_seed, options);
  for (size_t i = 0; i < candidate_specs.size(); ++i) {
    const std::uint64_t learner_seed = base_seed + 1000 * (static_cast<std::uint64_t>(i) + 1);
    LearnerReport entry;
    entry.spec = candidate_specs[i];
    entry.performance = run_trials(target, candidate_specs[i], trials, learn_cfg, sampler_cfg,
                                   learner_seed, options);
    entry.verdict = witness_decision(report.free_set, entry.performance);
    entry.relative_fidelity = relative_fidelity(report.free_set, entry.performance);
    entry.gme = gme(entry.relative_fidelity);
    entry.alpha_oracle = critical_fidelity_oracle(target, candidate_specs[i]).value;
    report.learners.push_back(std::move(entry));
  }
  return report;
}

std::string report_to_json(const ClassificationReport& report) {
  nlohmann::json doc;
  doc["target"] = report.target_name;
  doc["free"] = {{"spec", "free"},
                 {"mean", report.free_set.mean},
                 {"spread", report.free_set.spread},
                 {"trials", report.free_set.trials}};
  nlohmann::json learners = nlohmann::json::array();
  for (const auto& entry : report.learners) {
    learners.push_back(
        {{"spec", entry.spec.to_string()},
         {"mean", entry.performance.mean},
         {"spread", entry.performance.spread},
         {"trials", entry.performance.trials},
         {"verdict", entry.verdict == Verdict::WitnessedSeparable ? "witnessed-separable"
                                                                  : "entangled-across-partition"},
         {"R", entry.relative_fidelity},
         {"E", entry.gme},
         {"alpha_oracle", entry.alpha_oracle}});
  }
  doc["learners"] = learners;
  return doc.dump(2);
}

void print_report_table(const ClassificationReport& report, std::ostream& out) {
  out << "target: " << report.target_name << "\n";
  out << "free learner: mean " << std::fixed << std::setprecision(5) << report.free_set.mean
      << "  spread " << report.free_set.spread << "\n";
  out << std::left << std::setw(18) << "learner" << std::setw(10) << "mean" << std::setw(10)
      << "spread" << std::setw(10) << "R" << std::setw(10) << "E" << std::setw(10) << "alpha"
      << "verdict\n";
  for (const auto& entry : report.learners) {
    out << std::left << std::setw(18) << entry.spec.to_string() << std::setw(10)
        << entry.performance.mean << std::setw(10) << entry.performance.spread << std::setw(10)
        << entry.relative_fidelity << std::setw(10) << entry.gme << std::setw(10)
        << entry.alpha_oracle
        << (entry.verdict == Verdict::WitnessedSeparable ? "witnessed-separable"
                                                         : "entangled-across-partition")
        << "\n";
  }
  for (const auto& entry : report.learners) {
    if (entry.verdict == Verdict::EntangledAcrossPartition) {
      out << "note: " << entry.spec.to_string()
          << " not witnessed; the target holds entanglement across at least one of its blocks\n";
    }
  }
  out.unsetf(std::ios::floatfield);
}

}  // namespace nnqs
