#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "nnqs/experiment.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  std::string backend;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "experiment config (JSON)")->required();
  cmd->add_option("--out", flags.out_dir, "output directory (overrides config)");
  cmd->add_option("--seed", [&flags](const std::vector<std::string>& v) {
        flags.seed = std::stoull(v[0]);
        return true;
      },
      "master seed (overrides config)");
  cmd->add_option("--backend", flags.backend, "exact or mcmc (overrides config)")
      ->check(CLI::IsMember({"exact", "mcmc"}));
  cmd->add_option("--trials", [&flags](const std::vector<std::string>& v) {
        flags.trials = std::stoi(v[0]);
        return true;
      },
      "trials per learner (overrides config)");
}

nnqs::ExperimentConfig resolve(const CommonFlags& flags) {
  nnqs::ConfigOverrides overrides;
  if (!flags.out_dir.empty()) {
    overrides.out_dir = flags.out_dir;
  }
  overrides.seed = flags.seed;
  overrides.trials = flags.trials;
  if (flags.backend == "exact") {
    overrides.backend = nnqs::Backend::Exact;
  } else if (flags.backend == "mcmc") {
    overrides.backend = nnqs::Backend::Mcmc;
  }
  return nnqs::load_config(flags.config_path, overrides);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Neural-network quantum state reconstruction and entanglement classification"};
  app.require_subcommand(1);

  CommonFlags learn_flags, classify_flags, measure_flags;
  CLI::App* learn = app.add_subcommand("learn", "train learners and write fidelity traces");
  add_common(learn, learn_flags);
  CLI::App* classify = app.add_subcommand("classify", "run the witness protocol");
  add_common(classify, classify_flags);
  CLI::App* measure = app.add_subcommand("measure", "sweep a state family and report R, E");
  add_common(measure, measure_flags);

  int count_n = 0;
  int count_k = -1;
  CLI::App* count = app.add_subcommand("count", "separability counting tables");
  count->add_option("n", count_n, "number of parties")->required();
  count->add_option("k", count_k, "restrict to exactly k blocks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (learn->parsed()) {
      return nnqs::cmd_learn(resolve(learn_flags));
    }
    if (classify->parsed()) {
      return nnqs::cmd_classify(resolve(classify_flags));
    }
    if (measure->parsed()) {
      return nnqs::cmd_measure(resolve(measure_flags));
    }
    if (count->parsed()) {
      return nnqs::cmd_count(count_n,
                             count_k >= 0 ? std::optional<int>(count_k) : std::nullopt);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
