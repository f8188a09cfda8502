#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "nnqs/learning.hpp"
#include "nnqs/separability.hpp"
#include "nnqs/target.hpp"

namespace nnqs {

// Architecture knobs shared by every learner in a protocol run.
struct LearnerOptions {
  int rho = 2;             // hidden neurons per visible neuron (amplitude layer)
  bool phase_layer = false;
  int phase_rho = 2;       // phase-layer hidden neurons per visible neuron
  double init_scale = 0.05;
};

// Fresh randomized learner for the given partition; non-free specs get
// segmentation masks on both layers.
NeuralState make_learner(const PartitionSpec& spec, const LearnerOptions& options,
                         std::uint64_t seed);

// Mean and spread of final fidelities over M repeated trials of one learner.
struct PerformanceSet {
  PartitionSpec learner;
  double mean = 0.0;
  double spread = 0.0;  // population std dev, as in the protocol definition
  int trials = 0;

  double window_lo() const;  // clipped to [0, 1]
  double window_hi() const;
};

enum class Verdict { WitnessedSeparable, EntangledAcrossPartition };

struct TrialsResult {
  PerformanceSet set;
  std::vector<FidelityTrace> traces;
  std::vector<std::uint64_t> seeds;
};

// M independent train() runs with seeds base_seed .. base_seed+M-1. Failed
// trials are excluded; fewer than 2 survivors is an error.
PerformanceSet run_trials(const TargetState& target, const PartitionSpec& spec, int trials,
                          const LearningConfig& learn_cfg, const SamplerConfig& sampler_cfg,
                          std::uint64_t base_seed, const LearnerOptions& options = {});
TrialsResult run_trials_detailed(const TargetState& target, const PartitionSpec& spec, int trials,
                                 const LearningConfig& learn_cfg, const SamplerConfig& sampler_cfg,
                                 std::uint64_t base_seed, const LearnerOptions& options = {});

// Closed-interval intersection of the performance windows; touching windows
// count as witnessed.
Verdict witness_decision(const PerformanceSet& free_set, const PerformanceSet& restricted);

// R = <F_restricted> / <F_free>, clipped to [0, 1].
double relative_fidelity(const PerformanceSet& free_set, const PerformanceSet& restricted);

// E = 1 - R^2.
double gme(double relative_fidelity);

// Best product-state overlap max |<phi | psi_1 x ... x psi_K>| found by
// alternating least squares with random restarts; independent of any neural
// network.
struct CriticalFidelityResult {
  double value = 0.0;
  std::vector<CVector> block_states;
  bool converged = false;
};

CriticalFidelityResult critical_fidelity_oracle(const TargetState& target,
                                                const PartitionSpec& spec, int restarts = 20);

struct LearnerReport {
  PartitionSpec spec;
  PerformanceSet performance;
  Verdict verdict = Verdict::EntangledAcrossPartition;
  double relative_fidelity = 0.0;
  double gme = 0.0;
  double alpha_oracle = 0.0;
};

struct ClassificationReport {
  std::string target_name;
  PerformanceSet free_set;
  std::vector<LearnerReport> learners;
};

// Runs the free learner plus every candidate and attaches verdicts, relative
// fidelities, GME values and the independent oracle overlap.
ClassificationReport classify(const TargetState& target, const std::string& target_name,
                              const std::vector<PartitionSpec>& candidate_specs, int trials,
                              const LearningConfig& learn_cfg, const SamplerConfig& sampler_cfg,
                              std::uint64_t base_seed, const LearnerOptions& options = {});

std::string report_to_json(const ClassificationReport& report);
void print_report_table(const ClassificationReport& report, std::ostream& out);

}  // namespace nnqs
