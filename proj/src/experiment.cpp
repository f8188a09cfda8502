#include "nnqs/experiment.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

namespace nnqs {

namespace {

namespace fs = std::filesystem;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot open config file '" + path + "'");
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// temp + rename keeps partially written files out of the output directory
void write_file_atomic(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw std::runtime_error("cannot write '" + tmp.string() + "'");
    }
    out << content;
  }
  fs::rename(tmp, path);
}

std::string sanitize(const std::string& spec_text) {
  std::string out = spec_text;
  for (char& c : out) {
    if (c == ',') c = '-';
    if (c == '|') c = '_';
  }
  return out;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

LearningConfig parse_learning(const nlohmann::json& doc) {
  LearningConfig cfg;
  if (doc.contains("optimizer")) {
    const std::string name = doc["optimizer"].get<std::string>();
    if (name == "sgd") {
      cfg.optimizer = LearningConfig::Optimizer::Sgd;
    } else if (name == "natural") {
      cfg.optimizer = LearningConfig::Optimizer::Natural;
      cfg.learning_rate = 0.1;
    } else {
      throw std::invalid_argument("config: unknown optimizer '" + name + "'");
    }
  }
  cfg.learning_rate = doc.value("learning_rate", cfg.learning_rate);
  cfg.max_iters = doc.value("max_iters", cfg.max_iters);
  cfg.convergence_tol = doc.value("convergence_tol", cfg.convergence_tol);
  cfg.sr_shift = doc.value("sr_shift", cfg.sr_shift);
  cfg.pinv_cutoff = doc.value("pinv_cutoff", cfg.pinv_cutoff);
  cfg.validate();
  return cfg;
}

SamplerConfig parse_sampler(const nlohmann::json& doc, int n) {
  SamplerConfig cfg;
  cfg.backend = default_backend(n);
  if (doc.contains("backend")) {
    const std::string name = doc["backend"].get<std::string>();
    if (name == "exact") {
      cfg.backend = Backend::Exact;
    } else if (name == "mcmc") {
      cfg.backend = Backend::Mcmc;
    } else {
      throw std::invalid_argument("config: unknown backend '" + name + "'");
    }
  }
  cfg.n_samples = doc.value("n_samples", cfg.n_samples);
  cfg.burn_in = doc.value("burn_in", cfg.burn_in);
  cfg.thinning = doc.value("thinning", cfg.thinning);
  cfg.seed = doc.value("seed", cfg.seed);
  if (cfg.n_samples < 1 || cfg.burn_in < 0 || cfg.thinning < 0) {
    throw std::invalid_argument("config: bad sampler settings");
  }
  return cfg;
}

LearnerOptions parse_options(const nlohmann::json& doc) {
  LearnerOptions opts;
  opts.rho = doc.value("rho", opts.rho);
  opts.phase_layer = doc.value("phase_layer", opts.phase_layer);
  opts.phase_rho = doc.value("phase_rho", opts.phase_rho);
  opts.init_scale = doc.value("init_scale", opts.init_scale);
  if (opts.rho < 1 || opts.phase_rho < 1 || opts.init_scale <= 0.0) {
    throw std::invalid_argument("config: bad learner options");
  }
  return opts;
}

}  // namespace

ExperimentConfig load_config(const std::string& path, const ConfigOverrides& overrides) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }

  ExperimentConfig config;
  if (doc.contains("target") && doc["target"].is_object()) {
    config.target = parse_target("file:" + doc["target"].value("file", ""));
  } else if (doc.contains("target")) {
    config.target = parse_target(doc["target"].get<std::string>());
  } else if (!doc.contains("sweep")) {
    throw std::invalid_argument("config: missing 'target'");
  }

  config.learning = parse_learning(doc.value("learning", nlohmann::json::object()));
  config.options = parse_options(doc.value("options", nlohmann::json::object()));
  config.trials = doc.value("trials", config.trials);
  config.seed = doc.value("seed", config.seed);
  config.out_dir = doc.value("out", config.out_dir);
  config.target_sigma2 = doc.value("sigma2", config.target_sigma2);

  if (doc.contains("sweep")) {
    const auto& sw = doc["sweep"];
    SweepConfig sweep;
    sweep.family = sw.value("family", "");
    if (sweep.family != "variable_bell" && sweep.family != "variable_w") {
      throw std::invalid_argument("config: sweep family must be variable_bell or variable_w");
    }
    const int family_n = sweep.family == "variable_bell" ? 2 : 3;
    if (sw.contains("grid")) {
      sweep.grid = sw["grid"].get<std::vector<double>>();
    } else {
      const double from = sw.value("from", 0.0);
      const double to = sw.value("to", 1.0);
      const double step = sw.value("step", 0.1);
      if (step <= 0.0) {
        throw std::invalid_argument("config: sweep step must be > 0");
      }
      for (double p = from; p <= to + 1e-12; p += step) {
        sweep.grid.push_back(std::min(p, to));
      }
    }
    if (sweep.grid.empty()) {
      throw std::invalid_argument("config: sweep grid is empty");
    }
    if (!sw.contains("spec")) {
      throw std::invalid_argument("config: sweep needs a learner 'spec'");
    }
    sweep.spec = PartitionSpec::parse(sw["spec"].get<std::string>(), family_n);
    config.sweep = std::move(sweep);
    if (config.target.state.n_visible == 0) {
      // target used only for N-dependent defaults below
      config.target = sweep.family == "variable_bell" ? variable_bell(0.5) : variable_w(0.5);
    }
  }

  const int n = config.target.state.n_visible;
  config.sampler = parse_sampler(doc.value("sampler", nlohmann::json::object()), n);

  if (doc.contains("learners")) {
    for (const auto& text : doc["learners"]) {
      config.learners.push_back(PartitionSpec::parse(text.get<std::string>(), n));
    }
  }

  if (overrides.out_dir) config.out_dir = *overrides.out_dir;
  if (overrides.seed) config.seed = *overrides.seed;
  if (overrides.backend) config.sampler.backend = *overrides.backend;
  if (overrides.trials) config.trials = *overrides.trials;
  if (config.trials < 2) {
    throw std::invalid_argument("config: trials must be >= 2");
  }

  // Kronecker targets suit the exact backend; mcmc gets Gaussian smoothing.
  const double sigma2 = config.target_sigma2 >= 0.0
                            ? config.target_sigma2
                            : (config.sampler.backend == Backend::Exact ? 0.0 : 0.1);
  if (sigma2 != config.target.state.sigma2 && config.target.state.n_visible > 0) {
    config.target.state = build_target(config.target.state.entries, n, sigma2);
  }
  return config;
}

int cmd_learn(const ExperimentConfig& config) {
  if (config.learners.empty()) {
    throw std::invalid_argument("learn: config lists no learners");
  }
  nlohmann::json summary;
  summary["target"] = config.target.name;
  nlohmann::json learners = nlohmann::json::array();
  for (size_t i = 0; i < config.learners.size(); ++i) {
    const PartitionSpec& spec = config.learners[i];
    const std::uint64_t base_seed = config.seed + 1000 * static_cast<std::uint64_t>(i);
    const TrialsResult result = run_trials_detailed(config.target.state, spec, config.trials,
                                                    config.learning, config.sampler, base_seed,
                                                    config.options);
    nlohmann::json trials = nlohmann::json::array();
    for (size_t t = 0; t < result.traces.size(); ++t) {
      const fs::path trace_path = fs::path(config.out_dir) /
                                  ("trace_" + sanitize(spec.to_string()) + "_t" +
                                   std::to_string(t) + ".csv");
      write_file_atomic(trace_path, trace_to_csv(result.traces[t]));
      trials.push_back({{"seed", result.seeds[t]},
                        {"final_fidelity", result.traces[t].final_fidelity()},
                        {"iterations", result.traces[t].iterations},
                        {"trace", trace_path.filename().string()}});
    }
    learners.push_back({{"spec", spec.to_string()},
                        {"mean", result.set.mean},
                        {"spread", result.set.spread},
                        {"trials", trials}});
    std::cout << "learner " << spec.to_string() << ": mean " << result.set.mean << " spread "
              << result.set.spread << "\n";
  }
  summary["learners"] = learners;
  write_file_atomic(fs::path(config.out_dir) / "summary.json", summary.dump(2) + "\n");
  return 0;
}

int cmd_classify(const ExperimentConfig& config) {
  if (config.learners.empty()) {
    throw std::invalid_argument("classify: config lists no learners");
  }
  const ClassificationReport report =
      classify(config.target.state, config.target.name, config.learners, config.trials,
               config.learning, config.sampler, config.seed, config.options);
  write_file_atomic(fs::path(config.out_dir) / "report.json", report_to_json(report) + "\n");
  print_report_table(report, std::cout);
  return 0;
}

int cmd_measure(const ExperimentConfig& config) {
  if (!config.sweep) {
    throw std::invalid_argument("measure: config has no 'sweep' section");
  }
  const SweepConfig& sweep = *config.sweep;
  std::string csv = "p,R,E,alpha_oracle\n";
  for (size_t i = 0; i < sweep.grid.size(); ++i) {
    const double p = sweep.grid[i];
    const NamedTarget point =
        sweep.family == "variable_bell" ? variable_bell(p) : variable_w(p);
    const std::uint64_t seed = config.seed + 10000 * static_cast<std::uint64_t>(i);
    const PerformanceSet free_set =
        run_trials(point.state, PartitionSpec::free_learner(point.state.n_visible), config.trials,
                   config.learning, config.sampler, seed, config.options);
    const PerformanceSet restricted =
        run_trials(point.state, sweep.spec, config.trials, config.learning, config.sampler,
                   seed + 500, config.options);
    const double R = relative_fidelity(free_set, restricted);
    const double E = gme(R);
    const double alpha = critical_fidelity_oracle(point.state, sweep.spec).value;
    csv += format_double(p) + "," + format_double(R) + "," + format_double(E) + "," +
           format_double(alpha) + "\n";
    std::cout << "p=" << p << "  R=" << R << "  E=" << E << "  alpha=" << alpha << "\n";
  }
  write_file_atomic(fs::path(config.out_dir) / ("sweep_" + sweep.family + ".csv"), csv);
  return 0;
}

int cmd_count(int n, std::optional<int> k) {
  if (n < 1 || n > kBellCap) {
    throw std::invalid_argument("count: n must be in [1, " + std::to_string(kBellCap) + "]");
  }
  if (k && (*k < 1 || *k > n)) {
    throw std::invalid_argument("count: k must be in [1, n]");
  }
  std::cout << "N = " << n << "\n";
  if (k) {
    std::cout << "G_" << *k << " = " << count_GK(n, *k) << "\n";
  } else {
    for (int kk = 2; kk <= n; ++kk) {
      std::cout << "G_" << kk << " = " << count_GK(n, kk) << "\n";
    }
  }
  std::cout << "B_" << n << " = " << bell_number(n) << "\n";
  if (n <= 8) {
    const auto partitions = enumerate_set_partitions(n, k);
    std::cout << "partitions (" << partitions.size() << "):\n";
    for (const auto& spec : partitions) {
      std::cout << "  " << spec.to_string() << "\n";
    }
  }
  return 0;
}

}  // namespace nnqs
