#ifndef KLAB_CONFIG_HPP
#define KLAB_CONFIG_HPP

// Experiment configuration. The JSON form uses exactly the field names below.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "klab/errors.hpp"

namespace klab {

enum class Experiment {
  EkssRp1,
  Conics,
  ObstacleGraph,
  QuadricsGraph,
  PdVolume,
  GoodCone,
  Coverage,
  CalabiAudit,
  RegionCounts,
};

inline constexpr std::pair<Experiment, const char*> kExperimentNames[] = {
    {Experiment::EkssRp1, "ekss-rp1"},         {Experiment::Conics, "conics"},
    {Experiment::ObstacleGraph, "obstacle-graph"}, {Experiment::QuadricsGraph, "quadrics-graph"},
    {Experiment::PdVolume, "pd-volume"},       {Experiment::GoodCone, "good-cone"},
    {Experiment::Coverage, "coverage"},        {Experiment::CalabiAudit, "calabi-audit"},
    {Experiment::RegionCounts, "region-counts"},
};

inline const char* to_string(Experiment e) {
  for (const auto& [k, name] : kExperimentNames)
    if (k == e) return name;
  return "unknown";
}

inline std::optional<Experiment> parse_experiment(const std::string& name) {
  for (const auto& [k, n] : kExperimentNames)
    if (name == n) return k;
  return std::nullopt;
}

enum class OutputFormat { Csv, Json };

/// Raised for invalid or incomplete configurations (CLI exit code 2).
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorKind::InvalidInput, what) {}
};

struct ExperimentConfig {
  Experiment experiment = Experiment::EkssRp1;
  std::uint64_t seed = 1;
  std::optional<long long> trials;
  std::optional<long long> s;
  std::vector<long long> s_sweep;
  std::optional<int> n;
  std::optional<int> N;
  std::optional<int> m;
  std::optional<int> m_max;
  std::optional<std::vector<int>> degrees;
  std::optional<double> rho;
  std::optional<double> eps;
  std::optional<long long> samples;
  std::string out;
  OutputFormat format = OutputFormat::Csv;
  unsigned threads = 1;
};

/// Parameters after defaults are applied and validated.
struct ResolvedConfig {
  Experiment experiment = Experiment::EkssRp1;
  std::uint64_t seed = 1;
  std::size_t trials = 0;
  std::vector<std::size_t> s_sweep;
  int N = 2;
  int m = 3;
  int m_max = 5;
  std::vector<int> degrees;
  double rho = 0.0;
  double eps = 0.0;
  std::size_t samples = 0;
  std::string out;
  OutputFormat format = OutputFormat::Csv;
  unsigned threads = 1;

  std::size_t s() const { return s_sweep.empty() ? 0 : s_sweep.front(); }
};

/// Default cap radius: volume fraction 0.2 in RP^2.
inline double default_cap_radius() { return std::acos(0.8); }

inline ResolvedConfig resolve(const ExperimentConfig& cfg) {
  ResolvedConfig r;
  r.experiment = cfg.experiment;
  r.seed = cfg.seed;
  r.out = cfg.out;
  r.format = cfg.format;
  r.threads = cfg.threads == 0 ? 1 : cfg.threads;

  auto positive = [](const char* field, long long v) {
    if (v <= 0) throw ConfigError(std::string(field) + " must be positive");
    return static_cast<std::size_t>(v);
  };
  auto default_trials = [&](long long d) { r.trials = positive("trials", cfg.trials.value_or(d)); };
  auto sweep = [&](std::vector<long long> fallback) {
    std::vector<long long> raw = !cfg.s_sweep.empty() ? cfg.s_sweep
                                 : cfg.s            ? std::vector<long long>{*cfg.s}
                                                    : fallback;
    for (long long v : raw) r.s_sweep.push_back(positive("s", v));
  };
  auto cap = [&]() {
    r.N = cfg.N.value_or(cfg.n.value_or(2));
    if (r.N < 1) throw ConfigError("N must be >= 1");
    r.rho = cfg.rho.value_or(default_cap_radius());
    if (!(r.rho > 0.0 && r.rho < std::numbers::pi / 2)) throw ConfigError("rho must lie in (0, pi/2)");
    r.eps = cfg.eps.value_or(0.0);
    if (!(r.eps >= 0.0) || !std::isfinite(r.eps)) throw ConfigError("eps must be >= 0");
  };
  auto matrix_dim = [&](int minimum) {
    r.m = cfg.m.value_or(cfg.n ? *cfg.n + 1 : 3);
    if (r.m < minimum) throw ConfigError("m must be >= " + std::to_string(minimum));
  };

  switch (cfg.experiment) {
    case Experiment::EkssRp1:
      if (cfg.n && *cfg.n != 1) throw ConfigError("ekss-rp1 works on RP^1: n must be 1");
      default_trials(10000);
      r.degrees = cfg.degrees.value_or(std::vector<int>{4});
      for (int d : r.degrees)
        if (d < 1) throw ConfigError("degrees must be >= 1");
      break;
    case Experiment::Conics:
      if (cfg.n && *cfg.n != 2) throw ConfigError("conics live in RP^2: n must be 2");
      default_trials(10000);
      break;
    case Experiment::ObstacleGraph:
      default_trials(20);
      cap();
      sweep({250, 1000, 4000});
      break;
    case Experiment::QuadricsGraph:
      default_trials(20);
      matrix_dim(3);
      sweep({100, 400, 1600});
      break;
    case Experiment::PdVolume:
      r.m = cfg.m.value_or(2);
      if (r.m < 2) throw ConfigError("m must be >= 2");
      r.m_max = cfg.m_max.value_or(std::max(r.m, 5));
      if (r.m_max < r.m) throw ConfigError("m_max must be >= m");
      r.samples = positive("samples", cfg.samples.value_or(1000000));
      r.trials = 1;
      break;
    case Experiment::GoodCone:
      default_trials(10);
      cap();
      r.samples = positive("samples", cfg.samples.value_or(100000));
      break;
    case Experiment::Coverage:
      default_trials(100);
      cap();
      r.samples = positive("samples", cfg.samples.value_or(500));
      break;
    case Experiment::CalabiAudit:
      default_trials(500);
      matrix_dim(3);
      r.m_max = cfg.m_max.value_or(r.m);
      if (r.m_max < r.m) throw ConfigError("m_max must be >= m");
      break;
    case Experiment::RegionCounts:
      default_trials(500);
      cap();
      sweep({10000});
      break;
  }
  return r;
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  static const char* known[] = {"experiment", "seed", "trials", "s",   "s_sweep", "n",
                                "N",          "m",    "m_max",  "degrees", "rho", "eps",
                                "samples",    "out",  "format", "threads"};
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw ConfigError("unknown config key '" + key + "'");
  }
  ExperimentConfig cfg;
  try {
    const auto name = j.at("experiment").get<std::string>();
    const auto e = parse_experiment(name);
    if (!e) throw ConfigError("unknown experiment '" + name + "'");
    cfg.experiment = *e;
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("trials")) cfg.trials = j["trials"].get<long long>();
    if (j.contains("s")) cfg.s = j["s"].get<long long>();
    if (j.contains("s_sweep")) cfg.s_sweep = j["s_sweep"].get<std::vector<long long>>();
    if (j.contains("n")) cfg.n = j["n"].get<int>();
    if (j.contains("N")) cfg.N = j["N"].get<int>();
    if (j.contains("m")) cfg.m = j["m"].get<int>();
    if (j.contains("m_max")) cfg.m_max = j["m_max"].get<int>();
    if (j.contains("degrees")) cfg.degrees = j["degrees"].get<std::vector<int>>();
    if (j.contains("rho")) cfg.rho = j["rho"].get<double>();
    if (j.contains("eps")) cfg.eps = j["eps"].get<double>();
    if (j.contains("samples")) cfg.samples = j["samples"].get<long long>();
    if (j.contains("out")) cfg.out = j["out"].get<std::string>();
    if (j.contains("format")) {
      const auto f = j["format"].get<std::string>();
      if (f == "csv") cfg.format = OutputFormat::Csv;
      else if (f == "json") cfg.format = OutputFormat::Json;
      else throw ConfigError("format must be csv or json");
    }
    if (j.contains("threads")) cfg.threads = j["threads"].get<unsigned>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return config_from_json(j);
}

inline nlohmann::ordered_json to_json(const ResolvedConfig& r) {
  nlohmann::ordered_json j;
  j["experiment"] = to_string(r.experiment);
  j["seed"] = r.seed;
  j["trials"] = r.trials;
  j["s_sweep"] = r.s_sweep;
  j["N"] = r.N;
  j["m"] = r.m;
  j["m_max"] = r.m_max;
  j["degrees"] = r.degrees;
  j["rho"] = r.rho;
  j["eps"] = r.eps;
  j["samples"] = r.samples;
  j["out"] = r.out;
  j["format"] = r.format == OutputFormat::Csv ? "csv" : "json";
  j["threads"] = r.threads;
  return j;
}

}  // namespace klab

#endif  // KLAB_CONFIG_HPP
