#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nnqs/classify.hpp"
#include "nnqs/states.hpp"

namespace nnqs {

struct SweepConfig {
  std::string family;  // "variable_bell" or "variable_w"
  std::vector<double> grid;
  PartitionSpec spec;
};

// One JSON document drives an experiment; CLI flags override single fields.
struct ExperimentConfig {
  NamedTarget target;
  std::vector<PartitionSpec> learners;
  LearningConfig learning;
  SamplerConfig sampler;
  LearnerOptions options;
  double target_sigma2 = -1.0;  // <0 = default: 0 for exact, 0.1 for mcmc
  int trials = 5;
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  std::optional<SweepConfig> sweep;
};

struct ConfigOverrides {
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<Backend> backend;
  std::optional<int> trials;
};

// Throws std::invalid_argument on malformed input (exit code 2 territory).
ExperimentConfig load_config(const std::string& path, const ConfigOverrides& overrides);

int cmd_learn(const ExperimentConfig& config);
int cmd_classify(const ExperimentConfig& config);
int cmd_measure(const ExperimentConfig& config);
int cmd_count(int n, std::optional<int> k);

}  // namespace nnqs
