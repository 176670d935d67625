// klab: command-line front end for the experiment harness.
//
//   klab <experiment> [--config PATH] [--seed N] [--trials N] [--s N[,N...]] ...
//   klab run --config PATH
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "klab/config.hpp"
#include "klab/experiments.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<long long> trials;
  std::vector<long long> s;
  std::optional<int> m, m_max, n, N;
  std::vector<int> degrees;
  bool degrees_set = false;
  std::optional<double> rho, eps;
  std::optional<long long> samples;
  std::optional<std::string> out, format;
  std::optional<unsigned> threads;
};

void add_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "JSON config file")->check(CLI::ExistingFile);
  cmd->add_option("--seed", f.seed, "master seed");
  cmd->add_option("--trials", f.trials, "number of trials (runs, pairs)");
  cmd->add_option("--s", f.s, "vertex count, or a comma-separated sweep")->delimiter(',');
  cmd->add_option("--m", f.m, "matrix dimension (first m for sweeps)");
  cmd->add_option("--m-max", f.m_max, "last matrix dimension for sweeps");
  cmd->add_option("--n", f.n, "projective dimension of the variety space");
  cmd->add_option("--N", f.N, "ambient projective dimension of cap experiments");
  cmd->add_option("--degrees", f.degrees, "comma-separated degrees")->delimiter(',');
  cmd->add_option("--rho", f.rho, "cap angular radius in (0, pi/2)");
  cmd->add_option("--eps", f.eps, "dilation radius");
  cmd->add_option("--samples", f.samples, "Monte Carlo samples / test-set size");
  cmd->add_option("--out", f.out, "output file");
  cmd->add_option("--format", f.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--threads", f.threads, "worker threads (does not affect output)");
}

klab::ExperimentConfig merge(const Flags& f, std::optional<klab::Experiment> experiment,
                             bool degrees_given) {
  klab::ExperimentConfig cfg;
  if (!f.config.empty()) {
    cfg = klab::load_config(f.config);
    if (experiment && cfg.experiment != *experiment) {
      throw klab::ConfigError("config file names a different experiment");
    }
  } else if (!experiment) {
    throw klab::ConfigError("'run' requires --config");
  }
  if (experiment) cfg.experiment = *experiment;
  if (f.seed) cfg.seed = *f.seed;
  if (f.trials) cfg.trials = *f.trials;
  if (f.s.size() == 1) cfg.s = f.s.front(), cfg.s_sweep.clear();
  else if (f.s.size() > 1) cfg.s_sweep = f.s;
  if (f.m) cfg.m = *f.m;
  if (f.m_max) cfg.m_max = *f.m_max;
  if (f.n) cfg.n = *f.n;
  if (f.N) cfg.N = *f.N;
  if (degrees_given) cfg.degrees = f.degrees;
  if (f.rho) cfg.rho = *f.rho;
  if (f.eps) cfg.eps = *f.eps;
  if (f.samples) cfg.samples = *f.samples;
  if (f.out) cfg.out = *f.out;
  if (f.format) cfg.format = *f.format == "json" ? klab::OutputFormat::Json : klab::OutputFormat::Csv;
  if (f.threads) cfg.threads = *f.threads;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo laboratory for random hypersurface arrangements and obstacle random graphs"};
  app.require_subcommand(1);
  Flags flags;
  std::vector<std::pair<CLI::App*, std::optional<klab::Experiment>>> commands;
  auto* run = app.add_subcommand("run", "run the experiment named in --config");
  add_flags(run, flags);
  commands.emplace_back(run, std::nullopt);
  for (const auto& [kind, name] : klab::kExperimentNames) {
    auto* cmd = app.add_subcommand(name, std::string("run the ") + name + " experiment");
    add_flags(cmd, flags);
    commands.emplace_back(cmd, kind);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  klab::ResolvedConfig cfg;
  try {
    for (const auto& [cmd, kind] : commands) {
      if (!cmd->parsed()) continue;
      const bool degrees_given = cmd->get_option("--degrees")->count() > 0;
      cfg = klab::resolve(merge(flags, kind, degrees_given));
    }
  } catch (const klab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    const auto result = klab::run_experiment(cfg);
    klab::write_outputs(cfg, result);
    klab::print_summary(std::cout, cfg, result);
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
  return 0;
}
