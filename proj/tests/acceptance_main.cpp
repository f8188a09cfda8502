// Acceptance suite: runs every protocol-level check at its stated tolerance
// and prints one PASS/FAIL line per criterion. Exits nonzero on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "nnqs/classify.hpp"
#include "nnqs/experiment.hpp"
#include "nnqs/states.hpp"

using namespace nnqs;

namespace {

struct Checker {
  std::ostringstream notes;
  bool ok = true;

  void require(bool condition, const std::string& what) {
    if (!condition) {
      ok = false;
      notes << "    FAILED: " << what << "\n";
    }
  }
  template <typename T>
  void require_close(T actual, T expected, T tol, const std::string& what) {
    std::ostringstream msg;
    msg << what << " (actual " << actual << ", expected " << expected << " +- " << tol << ")";
    require(std::abs(actual - expected) <= tol, msg.str());
  }
};

int g_failures = 0;

void run_criterion(int number, const std::string& title,
                   const std::function<void(Checker&)>& body) {
  Checker check;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(check);
  } catch (const std::exception& e) {
    check.ok = false;
    check.notes << "    exception: " << e.what() << "\n";
  }
  const auto seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("[%s] criterion %2d: %s (%.1fs)\n", check.ok ? "PASS" : "FAIL", number,
              title.c_str(), seconds);
  if (!check.ok) {
    ++g_failures;
    std::cout << check.notes.str();
  }
  std::cout.flush();
}

LearningConfig sgd_config() { return LearningConfig{}; }

LearningConfig natural_config() {
  LearningConfig cfg;
  cfg.optimizer = LearningConfig::Optimizer::Natural;
  cfg.learning_rate = 0.1;
  return cfg;
}

const SamplerConfig kExact{};

double oracle_value(const TargetState& target, const std::string& spec_text) {
  return critical_fidelity_oracle(target, PartitionSpec::parse(spec_text, target.n_visible)).value;
}

// Collected (R, alpha) pairs from converged benchmark runs, re-checked by
// criterion 10.
struct OracleSample {
  std::string label;
  double relative_fidelity;
  double alpha;
};
std::vector<OracleSample> g_oracle_samples;

void record_oracle_sample(const std::string& label, const PerformanceSet& free_set,
                          const PerformanceSet& restricted, const TargetState& target) {
  if (free_set.mean < 0.995) {
    return;
  }
  const double r = relative_fidelity(free_set, restricted);
  const double alpha = critical_fidelity_oracle(target, restricted.learner).value;
  g_oracle_samples.push_back({label, r, alpha});
}

void criterion_1_bell_witness(Checker& check) {
  const auto target = bell(BellKind::PhiPlus);
  const auto free_set = run_trials(target.state, PartitionSpec::free_learner(2), 5, sgd_config(),
                                   kExact, 100);
  const auto restricted = run_trials(target.state, PartitionSpec::parse("1|2", 2), 5, sgd_config(),
                                     kExact, 200);
  check.require(free_set.mean >= 0.99, "free learner mean >= 0.99");
  check.require(restricted.mean >= 0.687 && restricted.mean <= 0.727,
                "separable learner mean in [0.687, 0.727], got " +
                    std::to_string(restricted.mean));
  check.require(witness_decision(free_set, restricted) == Verdict::EntangledAcrossPartition,
                "windows must be disjoint for the Bell pair");
  record_oracle_sample("bell/1|2", free_set, restricted, target.state);
}

void criterion_2_separable_sanity(Checker& check) {
  const auto target = parse_target("plus@1 * basis:0@2");
  const auto free_set = run_trials(target.state, PartitionSpec::free_learner(2), 5, sgd_config(),
                                   kExact, 300);
  const auto restricted = run_trials(target.state, PartitionSpec::parse("1|2", 2), 5, sgd_config(),
                                     kExact, 400);
  check.require(free_set.mean >= 0.99, "free learner mean >= 0.99");
  check.require(restricted.mean >= 0.99, "separable learner mean >= 0.99");
  check.require(witness_decision(free_set, restricted) == Verdict::WitnessedSeparable,
                "separable state must be witnessed");
  record_oracle_sample("plus0/1|2", free_set, restricted, target.state);
}

void criterion_3_kj_discrimination(Checker& check) {
  const std::vector<std::string> targets = {
      "bell:phi+@1,2 * plus@3",
      "bell:phi+@1,3 * plus@2",
      "plus@1 * bell:phi+@2,3",
  };
  const std::vector<std::string> specs = {"1,2|3", "1,3|2", "1|2,3"};
  for (size_t panel = 0; panel < targets.size(); ++panel) {
    const auto target = parse_target(targets[panel]);
    const auto report =
        classify(target.state, target.name,
                 {PartitionSpec::parse(specs[0], 3), PartitionSpec::parse(specs[1], 3),
                  PartitionSpec::parse(specs[2], 3)},
                 5, sgd_config(), kExact, 500 + 40 * panel);
    check.require(report.free_set.mean >= 0.99, targets[panel] + ": free learner converged");
    for (size_t i = 0; i < specs.size(); ++i) {
      const auto& learner = report.learners[i];
      if (i == panel) {
        check.require(learner.verdict == Verdict::WitnessedSeparable,
                      targets[panel] + ": " + specs[i] + " witnessed");
      } else {
        check.require(learner.verdict == Verdict::EntangledAcrossPartition,
                      targets[panel] + ": " + specs[i] + " not witnessed");
        check.require(learner.performance.mean <= 0.95,
                      targets[panel] + ": " + specs[i] + " mean <= 0.95, got " +
                          std::to_string(learner.performance.mean));
      }
      record_oracle_sample(targets[panel] + "/" + specs[i], report.free_set, learner.performance,
                           target.state);
    }
  }
}

void criterion_4_four_and_six_qubits(Checker& check) {
  {
    const auto target = parse_target("bell:phi+@1,2 * bell:phi+@3,4");
    const auto report = classify(
        target.state, target.name,
        {PartitionSpec::parse("1,2|3,4", 4), PartitionSpec::parse("1,2|3|4", 4),
         PartitionSpec::parse("1|2|3,4", 4), PartitionSpec::parse("1|2|3|4", 4)},
        5, sgd_config(), kExact, 900);
    check.require(report.free_set.mean >= 0.99, "double Bell: free learner converged");
    check.require(report.learners[0].verdict == Verdict::WitnessedSeparable,
                  "double Bell: 12|34 witnessed");
    for (size_t i = 1; i < report.learners.size(); ++i) {
      check.require(report.learners[i].verdict == Verdict::EntangledAcrossPartition,
                    "double Bell: " + report.learners[i].spec.to_string() + " not witnessed");
    }
    for (const auto& learner : report.learners) {
      record_oracle_sample("doubleBell/" + learner.spec.to_string(), report.free_set,
                           learner.performance, target.state);
    }
  }
  {
    const auto target = parse_target("ghz:3@1,2,3 * plus@4");
    const auto report = classify(
        target.state, target.name,
        {PartitionSpec::parse("1,2,3|4", 4), PartitionSpec::parse("1,2|3,4", 4),
         PartitionSpec::parse("1|2|3,4", 4), PartitionSpec::parse("1,2|3|4", 4)},
        5, sgd_config(), kExact, 1300);
    check.require(report.free_set.mean >= 0.99, "GHZ3 x plus: free learner converged");
    check.require(report.learners[0].verdict == Verdict::WitnessedSeparable,
                  "GHZ3 x plus: 123|4 witnessed");
    for (size_t i = 1; i < report.learners.size(); ++i) {
      check.require(report.learners[i].verdict == Verdict::EntangledAcrossPartition,
                    "GHZ3 x plus: " + report.learners[i].spec.to_string() + " not witnessed");
    }
    for (const auto& learner : report.learners) {
      record_oracle_sample("ghz3plus/" + learner.spec.to_string(), report.free_set,
                           learner.performance, target.state);
    }
  }
  {
    const auto target = random_biseparable({3, 3}, 2718);  // pinned seed
    LearningConfig cfg = natural_config();
    const auto report = classify(
        target.state, target.name,
        {PartitionSpec::parse("1,2,3|4,5,6", 6), PartitionSpec::parse("1|3|2,4,5,6", 6),
         PartitionSpec::parse("1|2|3|4|5|6", 6)},
        5, cfg, kExact, 1700);
    check.require(report.free_set.mean >= 0.99, "random biseparable: free learner converged");
    check.require(report.learners[0].verdict == Verdict::WitnessedSeparable,
                  "random biseparable: 123|456 witnessed");
    check.require(report.learners[1].verdict == Verdict::EntangledAcrossPartition,
                  "random biseparable: 1|3|2456 not witnessed");
    check.require(report.learners[2].verdict == Verdict::EntangledAcrossPartition,
                  "random biseparable: fully separable not witnessed");
    for (const auto& learner : report.learners) {
      record_oracle_sample("rand6/" + learner.spec.to_string(), report.free_set,
                           learner.performance, target.state);
    }
  }
}

void criterion_5_cluster_state(Checker& check) {
  const auto target = cluster_1d(4);
  LearnerOptions options;
  options.phase_layer = true;
  LearningConfig cfg = natural_config();
  const auto free_set = run_trials(target.state, PartitionSpec::free_learner(4), 5, cfg, kExact,
                                   2100, options);
  const auto restricted = run_trials(target.state, PartitionSpec::parse("1,2|3,4", 4), 5, cfg,
                                     kExact, 2200, options);
  check.require(free_set.mean >= 0.98, "free learner with phase layer reaches 0.98, got " +
                                           std::to_string(free_set.mean));
  check.require(restricted.mean >= 0.687 && restricted.mean <= 0.727,
                "12|34 learner mean in [0.687, 0.727], got " + std::to_string(restricted.mean));
  record_oracle_sample("cluster4/1,2|3,4", free_set, restricted, target.state);
}

void criterion_6_gme_curves(Checker& check) {
  // variable Bell family against the fully separable learner
  for (int step = 0; step <= 10; ++step) {
    const double p = 0.1 * step;
    const auto target = variable_bell(p);
    const auto free_set = run_trials(target.state, PartitionSpec::free_learner(2), 5, sgd_config(),
                                     kExact, 2500 + 20 * step);
    const auto restricted = run_trials(target.state, PartitionSpec::parse("1|2", 2), 5,
                                       sgd_config(), kExact, 2510 + 20 * step);
    const double R = relative_fidelity(free_set, restricted);
    const double E = gme(R);
    const double alpha = oracle_value(target.state, "1|2");
    const double alpha_analytic = std::max(std::sqrt(p), std::sqrt(1.0 - p));
    check.require_close(alpha, alpha_analytic, 1e-6,
                        "oracle equals the largest Schmidt coefficient at p=" + std::to_string(p));
    check.require_close(E, 1.0 - alpha * alpha, 0.05,
                        "E within 0.05 of the oracle curve at p=" + std::to_string(p));
    if (step == 0 || step == 10) {
      check.require(E <= 0.03, "E at the product endpoints <= 0.03, got " + std::to_string(E));
    }
  }
  // variable W family against full separability: never fully separable
  for (int step = 0; step <= 10; step += 1) {
    const double p = 0.1 * step;
    const auto target = variable_w(p);
    const auto free_set = run_trials(target.state, PartitionSpec::free_learner(3), 5, sgd_config(),
                                     kExact, 3000 + 20 * step);
    const auto restricted = run_trials(target.state, PartitionSpec::parse("1|2|3", 3), 5,
                                       sgd_config(), kExact, 3010 + 20 * step);
    const double E = gme(relative_fidelity(free_set, restricted));
    check.require(E > 0.0, "W family E > 0 at p=" + std::to_string(p));
    if (step == 0 || step == 5 || step == 10) {
      check.require(E >= 0.05,
                    "W family E >= 0.05 at p=" + std::to_string(p) + ", got " + std::to_string(E));
    }
  }
}

void criterion_7_combinatorics(Checker& check) {
  const std::vector<std::uint64_t> bells = {1, 2, 5, 15, 52};
  for (size_t n = 1; n <= bells.size(); ++n) {
    check.require(bell_number(static_cast<int>(n)) == bells[n - 1],
                  "Bell number B_" + std::to_string(n));
  }
  for (int n = 1; n <= 8; ++n) {
    std::uint64_t total = 1;  // the K = 1 class
    for (int k = 2; k <= n; ++k) {
      const auto by_formula = count_GK(n, k);
      const auto by_enumeration = enumerate_set_partitions(n, k).size();
      check.require(by_formula == by_enumeration,
                    "G_K formula matches enumeration at n=" + std::to_string(n) +
                        ", k=" + std::to_string(k));
      total += by_formula;
    }
    check.require(total == bell_number(n), "sum G_K + 1 = B_n at n=" + std::to_string(n));
  }
}

void criterion_8_gradient_suite(Checker& check) {
  std::mt19937_64 rng(8080);
  std::normal_distribution<double> gauss(0.0, 1.0);
  int cases = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + trial % 3;
    const auto state = init_random(n, 2 * n, (trial % 5 == 4) ? n : 0, 0.3, 7000 + trial);
    std::vector<std::pair<std::uint64_t, Complex>> entries;
    for (std::uint64_t j = 0; j < (std::uint64_t{1} << n); ++j) {
      entries.emplace_back(j, Complex{gauss(rng), gauss(rng)});
    }
    const auto target = build_target(entries, n, 0.0);
    const ParamLayout layout(state);
    const RVector params = layout.pack(state);
    const auto lg = loss_and_gradient(state, target, kExact);

    auto loss_at = [&](const RVector& values) {
      NeuralState probe = state;
      layout.set(probe, values);
      return -std::log(fidelity(probe, target, kExact).value.real());
    };
    const double h = 1e-5;
    for (int j = 0; j < layout.n_real(); ++j) {
      RVector up = params;
      RVector down = params;
      up[j] += h;
      down[j] -= h;
      const double fd = (loss_at(up) - loss_at(down)) / (2.0 * h);
      check.require(std::abs(lg.gradient[j] - fd) <= 1e-5 * std::max(1.0, std::abs(fd)),
                    "gradient component " + std::to_string(j) + " in case " +
                        std::to_string(trial));
    }
    ++cases;
  }
  check.require(cases == 20, "ran 20 random gradient cases");
}

void criterion_9_backend_equivalence(Checker& check) {
  std::mt19937_64 rng(909);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int pair = 0; pair < 10; ++pair) {
    const int n = 2 + pair % 3;  // N <= 4
    const auto state = init_random(n, 2 * n, 0, 0.3, 500 + pair);
    std::vector<std::pair<std::uint64_t, Complex>> entries;
    for (std::uint64_t j = 0; j < (std::uint64_t{1} << n); ++j) {
      entries.emplace_back(j, Complex{gauss(rng), gauss(rng)});
    }
    const auto target = build_target(entries, n, 0.1);  // smoothed for mcmc support
    const double exact = fidelity(state, target, kExact).value.real();

    SamplerConfig mcmc;
    mcmc.backend = Backend::Mcmc;
    mcmc.n_samples = 20000;
    mcmc.seed = 4242 + pair;
    const auto estimate = fidelity(state, target, mcmc);
    check.require(estimate.std_error > 0.0, "mcmc reports a standard error");
    check.require(std::abs(estimate.value.real() - exact) <= 5.0 * estimate.std_error,
                  "pair " + std::to_string(pair) + ": |mcmc - exact| <= 5 sigma (exact " +
                      std::to_string(exact) + ", mcmc " + std::to_string(estimate.value.real()) +
                      " +- " + std::to_string(estimate.std_error) + ")");
  }
}

void criterion_10_oracle_consistency(Checker& check) {
  check.require(!g_oracle_samples.empty(), "benchmark runs contributed oracle samples");
  for (const auto& sample : g_oracle_samples) {
    check.require(std::abs(sample.relative_fidelity - sample.alpha) <= 0.03,
                  sample.label + ": |R - alpha| <= 0.03 (R " +
                      std::to_string(sample.relative_fidelity) + ", alpha " +
                      std::to_string(sample.alpha) + ")");
  }
}

void criterion_11_mask_integrity(Checker& check) {
  std::mt19937_64 rng(1111);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_int_distribution<int> pick_optimizer(0, 1);
  int steps_taken = 0;
  int violations = 0;
  for (int round = 0; round < 10; ++round) {
    const int n = 3;
    const auto partitions = enumerate_set_partitions(n);
    const auto& spec = partitions[1 + round % (partitions.size() - 1)];  // skip the free one
    LearnerOptions options;
    options.phase_layer = round % 2 == 1;
    auto state = make_learner(spec, options, 9000 + round);
    std::vector<std::pair<std::uint64_t, Complex>> entries;
    for (std::uint64_t j = 0; j < (std::uint64_t{1} << n); ++j) {
      entries.emplace_back(j, Complex{gauss(rng), gauss(rng)});
    }
    const auto target = build_target(entries, n, 0.0);
    LearningConfig sgd = sgd_config();
    LearningConfig natural = natural_config();
    for (int step = 0; step < 100; ++step) {
      if (pick_optimizer(rng) == 0) {
        const auto lg = loss_and_gradient(state, target, kExact);
        sgd_step(state, lg.gradient, sgd.learning_rate);
      } else {
        const auto system = build_sr_system(state, target, kExact);
        natural_gradient_step(state, system, natural);
      }
      ++steps_taken;
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < state.amplitude_params.n_hidden(); ++j) {
          if (!state.mask->allowed(i, j) &&
              state.amplitude_params.weights(i, j) != Complex{0.0, 0.0}) {
            ++violations;
          }
        }
        if (state.phase_mask) {
          for (int k = 0; k < state.phase_params->n_hidden(); ++k) {
            if (!state.phase_mask->allowed(i, k) &&
                state.phase_params->weights(i, k) != Complex{0.0, 0.0}) {
              ++violations;
            }
          }
        }
      }
    }
  }
  check.require(steps_taken == 1000, "fuzzed 1000 optimizer steps");
  check.require(violations == 0,
                "masked weights stayed exactly zero (" + std::to_string(violations) +
                    " violations)");
}

}  // namespace

int main() {
  run_criterion(1, "Bell witness: free vs 1|2 on Phi+", criterion_1_bell_witness);
  run_criterion(2, "separable sanity on |+>|0>", criterion_2_separable_sanity);
  run_criterion(3, "K_j discrimination across the three-qubit panels", criterion_3_kj_discrimination);
  run_criterion(4, "four-qubit hierarchy and six-qubit biseparable", criterion_4_four_and_six_qubits);
  run_criterion(5, "cluster state with phase layer and natural gradient", criterion_5_cluster_state);
  run_criterion(6, "GME curves for variable Bell and W families", criterion_6_gme_curves);
  run_criterion(7, "separability combinatorics", criterion_7_combinatorics);
  run_criterion(8, "analytic gradient vs finite differences", criterion_8_gradient_suite);
  run_criterion(9, "mcmc fidelity within 5 sigma of exact", criterion_9_backend_equivalence);
  run_criterion(10, "relative fidelity recovers the critical fidelity", criterion_10_oracle_consistency);
  run_criterion(11, "mask integrity under optimizer fuzzing", criterion_11_mask_integrity);

  if (g_failures != 0) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all acceptance criteria passed\n");
  return 0;
}
