#ifndef KLAB_EXPERIMENTS_HPP
#define KLAB_EXPERIMENTS_HPP

// Seeded Monte Carlo experiments.
//
// Trial i draws from Rng(mix(seed, i)). A trial hitting a degenerate or
// flagged event is excluded and rerun from Rng(mix(trial_seed, r)) for
// r = 1..10; every such event is added to flagged_count. Rows are emitted in
// trial order, so output bytes do not depend on the thread count.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "klab/config.hpp"
#include "klab/errors.hpp"
#include "klab/geometry.hpp"
#include "klab/graphs.hpp"
#include "klab/linalg.hpp"
#include "klab/parallel.hpp"
#include "klab/pencil.hpp"
#include "klab/sampling.hpp"
#include "klab/stats.hpp"
#include "klab/table.hpp"
#include "klab/varieties.hpp"
#include "klab/version.hpp"

namespace klab {

inline constexpr int kMaxRetries = 10;

struct ExperimentResult {
  Table table;
  std::vector<Summary> summaries;
  nlohmann::ordered_json details = nlohmann::ordered_json::object();
  std::size_t flagged_count = 0;
  double wall_time = 0.0;

  const Summary& summary(const std::string& name) const {
    for (const auto& s : summaries)
      if (s.name == name) return s;
    throw Error(ErrorKind::InvalidInput, "no summary named " + name);
  }
};

template <typename T>
struct TrialOutcome {
  std::optional<T> value;  ///< empty when every attempt was flagged
  std::uint64_t seed = 0;  ///< seed of the accepted attempt
  int flagged = 0;         ///< flagged attempts
};

/// Runs `attempt(rng)` (returning std::optional<T>, empty when flagged) with
/// the retry policy above. DegeneratePairError also counts as flagged.
template <typename T, typename Fn>
TrialOutcome<T> run_trial(std::uint64_t trial_seed, Fn&& attempt) {
  TrialOutcome<T> out;
  for (int r = 0; r <= kMaxRetries; ++r) {
    const std::uint64_t seed = r == 0 ? trial_seed : mix(trial_seed, static_cast<std::uint64_t>(r));
    Rng rng(seed);
    std::optional<T> v;
    try {
      v = attempt(rng);
    } catch (const DegeneratePairError&) {
      v.reset();
    }
    if (v) {
      out.value = std::move(v);
      out.seed = seed;
      return out;
    }
    ++out.flagged;
  }
  return out;
}

template <typename T, typename Fn>
std::vector<TrialOutcome<T>> run_trials(std::uint64_t master_seed, std::size_t trials,
                                        unsigned threads, Fn&& attempt) {
  std::vector<TrialOutcome<T>> results(trials);
  parallel_for(trials, threads, [&](std::size_t i) {
    results[i] = run_trial<T>(mix(master_seed, i), attempt);
  });
  return results;
}

// ---------------------------------------------------------------------------
// ekss-rp1

struct Rp1Trial {
  int zeros = 0;
  int b0 = 1;
};

inline Rp1Trial rp1_arrangement_trial(Rng& rng, std::span<const int> degrees, bool& flagged) {
  std::vector<BinaryForm> forms;
  forms.reserve(degrees.size());
  for (int d : degrees) forms.push_back(sample_binary_form(rng, d));
  const auto a = arrangement_b0_rp1(forms);
  flagged = a.degenerate;
  return {a.points, a.b0};
}

/// Zeros and components of RP^1 minus an arrangement of Kostlan binary forms.
inline ExperimentResult run_ekss_rp1(const ResolvedConfig& cfg) {
  const auto trials = run_trials<Rp1Trial>(cfg.seed, cfg.trials, cfg.threads, [&](Rng& rng) {
    bool flagged = false;
    const auto t = rp1_arrangement_trial(rng, cfg.degrees, flagged);
    return flagged ? std::nullopt : std::optional<Rp1Trial>(t);
  });
  ExperimentResult res;
  res.table = Table({"trial", "seed", "zeros", "b0", "flagged"});
  RunningStats zeros, b0;
  for (std::size_t i = 0; i < trials.size(); ++i) {
    const auto& t = trials[i];
    res.flagged_count += t.flagged;
    if (!t.value) continue;
    zeros.add(t.value->zeros);
    b0.add(t.value->b0);
    res.table.add_row({static_cast<std::int64_t>(i), std::to_string(t.seed),
                       static_cast<std::int64_t>(t.value->zeros), static_cast<std::int64_t>(t.value->b0),
                       static_cast<std::int64_t>(t.flagged)});
  }
  const double target = cfg.degrees.empty() ? 0.0 : ekss_leading_term(cfg.degrees, 1);
  res.summaries.push_back(summarize("zeros", zeros, res.flagged_count, target));
  // the leading term describes b0 only asymptotically; for a single even-degree
  // form b0 = max(zeros, 1) sits above it
  res.summaries.push_back(summarize("b0", b0, res.flagged_count, cfg.degrees.empty() ? 1.0 : target));
  res.details["leading_term"] = target;
  return res;
}

// ---------------------------------------------------------------------------
// conics

inline ExperimentResult run_conics(const ResolvedConfig& cfg) {
  const auto trials = run_trials<int>(cfg.seed, cfg.trials, cfg.threads, [](Rng& rng) {
    const SymMatrix A = sample_kostlan(rng, 2, 2).to_sym_matrix();
    const SymMatrix B = sample_kostlan(rng, 2, 2).to_sym_matrix();
    const auto z = conic_intersection_count(A, B);
    return z.degenerate ? std::nullopt : std::optional<int>(z.count);
  });
  ExperimentResult res;
  res.table = Table({"trial", "seed", "count", "flagged"});
  RunningStats counts;
  std::size_t parity_violations = 0;
  std::size_t attempts = 0;
  for (std::size_t i = 0; i < trials.size(); ++i) {
    const auto& t = trials[i];
    res.flagged_count += t.flagged;
    attempts += static_cast<std::size_t>(t.flagged) + (t.value ? 1 : 0);
    if (!t.value) continue;
    counts.add(*t.value);
    if (*t.value != 0 && *t.value != 2 && *t.value != 4) ++parity_violations;
    res.table.add_row({static_cast<std::int64_t>(i), std::to_string(t.seed),
                       static_cast<std::int64_t>(*t.value), static_cast<std::int64_t>(t.flagged)});
  }
  res.summaries.push_back(summarize("count", counts, res.flagged_count, 2.0));
  res.details["parity_violations"] = parity_violations;
  res.details["attempts"] = attempts;
  res.details["flagged_fraction"] =
      attempts ? static_cast<double>(res.flagged_count) / static_cast<double>(attempts) : 0.0;
  return res;
}

// ---------------------------------------------------------------------------
// obstacle-graph

struct ObstacleTrial {
  std::size_t b0 = 0;
  std::size_t isolated = 0;
  std::size_t s_p = 0;
};

inline Vec axis_vector(int N, int axis) {
  Vec c(static_cast<std::size_t>(N) + 1, 0.0);
  c[static_cast<std::size_t>(axis)] = 1.0;
  return c;
}

inline ObstacleTrial obstacle_graph_trial(const CapObstacle& cap, std::size_t s, Rng& rng,
                                          unsigned threads) {
  std::vector<Vec> points;
  points.reserve(s);
  for (std::size_t k = 0; k < s; ++k) points.push_back(sample_sphere_point(rng, cap.ambient_dim()));
  const auto g = build_obstacle_graph(cap, std::move(points), threads);
  return {connected_components(g), isolated_count(g), g.obstacle_count()};
}

/// Components of the cap-obstacle random graph over a sweep of vertex counts.
/// Trial i uses the same seed for every s.
inline ExperimentResult run_obstacle_graph(const ResolvedConfig& cfg) {
  const CapObstacle cap(axis_vector(cfg.N, cfg.N), cfg.rho);
  const double fraction = cap.volume_fraction();
  ExperimentResult res;
  res.table = Table({"s", "trials", "volume_fraction", "b0_over_s", "b0_over_s_stderr",
                     "isolated_over_s", "isolated_over_s_stderr", "sp_over_s", "sp_over_s_stderr",
                     "excess_isolated_over_s", "excess_isolated_over_s_stderr", "flagged"});
  for (std::size_t s : cfg.s_sweep) {
    RunningStats b0, iso, sp, excess;
    std::size_t flagged = 0;
    for (std::size_t i = 0; i < cfg.trials; ++i) {
      const auto t = run_trial<ObstacleTrial>(mix(cfg.seed, i), [&](Rng& rng) {
        return std::optional<ObstacleTrial>(obstacle_graph_trial(cap, s, rng, cfg.threads));
      });
      flagged += t.flagged;
      if (!t.value) continue;
      const double ds = static_cast<double>(s);
      b0.add(static_cast<double>(t.value->b0) / ds);
      iso.add(static_cast<double>(t.value->isolated) / ds);
      sp.add(static_cast<double>(t.value->s_p) / ds);
      excess.add((static_cast<double>(t.value->isolated) - static_cast<double>(t.value->s_p)) / ds);
    }
    res.flagged_count += flagged;
    res.table.add_row({static_cast<std::int64_t>(s), static_cast<std::int64_t>(b0.count()), fraction,
                       b0.mean(), b0.standard_error(), iso.mean(), iso.standard_error(), sp.mean(),
                       sp.standard_error(), excess.mean(), excess.standard_error(),
                       static_cast<std::int64_t>(flagged)});
    res.summaries.push_back(summarize("b0_over_s@" + std::to_string(s), b0, flagged, fraction));
    res.summaries.push_back(summarize("excess_isolated_over_s@" + std::to_string(s), excess, flagged));
  }
  res.details["volume_fraction"] = fraction;
  return res;
}

// ---------------------------------------------------------------------------
// quadrics-graph

struct QuadricTrial {
  std::size_t b0_graph = 0;
  std::size_t definite = 0;
  std::size_t borderline = 0;
};

inline QuadricTrial quadric_trial(std::vector<SymMatrix> matrices, unsigned threads) {
  const auto g = quadric_intersection_graph(std::move(matrices), threads);
  return {connected_components(g), g.obstacle_count(), g.meta.borderline};
}

/// Components of the union of the zero sets of s GOE quadrics, via the
/// intersection graph: b0(zero sets) = b0(graph) - #definite.
inline ExperimentResult run_quadrics_graph(const ResolvedConfig& cfg) {
  ExperimentResult res;
  res.table = Table({"s", "m", "trials", "b0_graph_over_s", "b0_graph_over_s_stderr",
                     "definite_fraction", "definite_fraction_stderr", "b0_zero_sets_over_s",
                     "b0_zero_sets_over_s_stderr", "borderline"});
  for (std::size_t s : cfg.s_sweep) {
    RunningStats graph, definite, gamma;
    std::size_t borderline = 0;
    for (std::size_t i = 0; i < cfg.trials; ++i) {
      Rng rng(mix(cfg.seed, i));
      std::vector<SymMatrix> mats;
      mats.reserve(s);
      for (std::size_t k = 0; k < s; ++k) mats.push_back(sample_goe(rng, cfg.m));
      const auto t = quadric_trial(std::move(mats), cfg.threads);
      const double ds = static_cast<double>(s);
      graph.add(static_cast<double>(t.b0_graph) / ds);
      definite.add(static_cast<double>(t.definite) / ds);
      gamma.add(static_cast<double>(t.b0_graph - t.definite) / ds);
      borderline += t.borderline;
    }
    res.flagged_count += borderline;
    res.table.add_row({static_cast<std::int64_t>(s), static_cast<std::int64_t>(cfg.m),
                       static_cast<std::int64_t>(cfg.trials), graph.mean(), graph.standard_error(),
                       definite.mean(), definite.standard_error(), gamma.mean(),
                       gamma.standard_error(), static_cast<std::int64_t>(borderline)});
    res.summaries.push_back(summarize("b0_zero_sets_over_s@" + std::to_string(s), gamma, borderline));
    res.summaries.push_back(summarize("definite_fraction@" + std::to_string(s), definite));
  }
  return res;
}

// ---------------------------------------------------------------------------
// pd-volume

struct DefiniteCounts {
  std::size_t positive = 0;
  std::size_t negative = 0;
};

inline constexpr std::size_t kPdChunk = 10000;

/// Counts positive and negative definite GOE matrices among `samples` draws.
/// Chunk c of kPdChunk draws uses Rng(mix(seed, c)).
inline DefiniteCounts count_definite_goe(int m, std::size_t samples, std::uint64_t seed,
                                         unsigned threads) {
  const std::size_t chunks = (samples + kPdChunk - 1) / kPdChunk;
  std::vector<DefiniteCounts> partial(chunks);
  parallel_for(chunks, threads, [&](std::size_t c) {
    Rng rng(mix(seed, c));
    const std::size_t n = std::min(kPdChunk, samples - c * kPdChunk);
    std::vector<double> ev(static_cast<std::size_t>(m));
    for (std::size_t k = 0; k < n; ++k) {
      const SymMatrix Q = sample_goe(rng, m);
      detail::eigenvalues_packed(Q.packed(), m, ev);
      if (ev.front() > 0.0) ++partial[c].positive;
      else if (ev.back() < 0.0) ++partial[c].negative;
    }
  });
  DefiniteCounts total;
  for (const auto& p : partial) {
    total.positive += p.positive;
    total.negative += p.negative;
  }
  return total;
}

inline constexpr double kPdLogRateLimit = -0.27465307216702745;  // -log(3)/4

inline ExperimentResult run_pd_volume(const ResolvedConfig& cfg) {
  ExperimentResult res;
  res.table = Table({"m", "n", "N", "samples", "p_positive", "p_positive_stderr", "p_definite",
                     "p_definite_stderr", "log_rate", "log_rate_reference"});
  for (int m = cfg.m; m <= cfg.m_max; ++m) {
    const auto counts = count_definite_goe(m, cfg.samples, mix(cfg.seed, static_cast<std::uint64_t>(m)),
                                           cfg.threads);
    const double ns = static_cast<double>(cfg.samples);
    const double pp = static_cast<double>(counts.positive) / ns;
    const double pd = static_cast<double>(counts.positive + counts.negative) / ns;
    const int n = m - 1;
    const double rate = std::log(pd) / static_cast<double>(n * n);
    res.table.add_row({static_cast<std::int64_t>(m), static_cast<std::int64_t>(n),
                       static_cast<std::int64_t>(m * (m + 1) / 2 - 1),
                       static_cast<std::int64_t>(cfg.samples), pp, std::sqrt(pp * (1 - pp) / ns), pd,
                       std::sqrt(pd * (1 - pd) / ns), rate, kPdLogRateLimit});
    Summary s;
    s.name = "p_definite@m=" + std::to_string(m);
    s.estimate = pd;
    s.standard_error = std::sqrt(pd * (1 - pd) / ns);
    s.ci95_lo = pd - 1.96 * s.standard_error;
    s.ci95_hi = pd + 1.96 * s.standard_error;
    s.trials = cfg.samples;
    res.summaries.push_back(s);
  }
  return res;
}

// ---------------------------------------------------------------------------
// good-cone, coverage, region-counts, calabi-audit

inline Vec sample_outside(const CapObstacle& cap, double eps, Rng& rng) {
  for (;;) {
    Vec x = cap.sample_uniform(rng);
    if (!cap.contains_eps(x, eps)) return x;
  }
}

struct GoodConeTrial {
  double distance = 0.0;
  FractionEstimate estimate;
};

inline ExperimentResult run_good_cone(const ResolvedConfig& cfg) {
  const CapObstacle cap(axis_vector(cfg.N, cfg.N), cfg.rho);
  const auto trials = run_trials<GoodConeTrial>(cfg.seed, cfg.trials, cfg.threads, [&](Rng& rng) {
    GoodConeTrial t;
    const Vec p = sample_outside(cap, 0.0, rng);
    t.distance = projective_distance(p, cap.center());
    t.estimate = good_cone_fraction(cap, p, cfg.samples, rng);
    return std::optional<GoodConeTrial>(t);
  });
  ExperimentResult res;
  res.table = Table({"trial", "seed", "distance_to_center", "good_cone_fraction", "stderr"});
  RunningStats frac;
  for (std::size_t i = 0; i < trials.size(); ++i) {
    const auto& t = trials[i];
    res.flagged_count += t.flagged;
    if (!t.value) continue;
    frac.add(t.value->estimate.fraction);
    res.table.add_row({static_cast<std::int64_t>(i), std::to_string(t.seed), t.value->distance,
                       t.value->estimate.fraction, t.value->estimate.standard_error});
  }
  res.summaries.push_back(summarize("good_cone_fraction", frac, res.flagged_count));
  return res;
}

inline constexpr std::size_t kCoverageMaxDraws = 1000000;

inline ExperimentResult run_coverage(const ResolvedConfig& cfg) {
  const CapObstacle cap(axis_vector(cfg.N, cfg.N), cfg.rho);
  const auto trials = run_trials<CoverageResult>(cfg.seed, cfg.trials, cfg.threads, [&](Rng& rng) {
    return std::optional<CoverageResult>(coverage_count(cap, cfg.eps, cfg.samples, kCoverageMaxDraws, rng));
  });
  ExperimentResult res;
  res.table = Table({"trial", "seed", "draws", "timeout"});
  RunningStats draws;
  std::size_t timeouts = 0;
  for (std::size_t i = 0; i < trials.size(); ++i) {
    const auto& t = trials[i];
    if (!t.value) continue;
    if (t.value->timeout) ++timeouts;
    else draws.add(static_cast<double>(t.value->draws));
    res.table.add_row({static_cast<std::int64_t>(i), std::to_string(t.seed),
                       static_cast<std::int64_t>(t.value->draws),
                       static_cast<std::int64_t>(t.value->timeout ? 1 : 0)});
  }
  res.flagged_count = timeouts;
  res.summaries.push_back(summarize("draws", draws, timeouts));
  res.details["test_grid_size"] = cfg.samples;
  res.details["max_draws"] = kCoverageMaxDraws;
  res.details["coverage_certified_on"] = "finite uniform test set outside the eps-dilated obstacle";
  res.details["timeouts"] = timeouts;
  return res;
}

struct RegionAudit {
  double expected_sp = 0.0;
  double expected_sa = 0.0;
  double expected_se = 0.0;
  double t = 0.0;
  double hoeffding_bound = 0.0;
  double sp_deviation_frequency = 0.0;
  double sa_deviation_frequency = 0.0;
  double se_deviation_frequency = 0.0;
};

inline constexpr double kRegionDelta = 0.01;

inline ExperimentResult run_region_counts(const ResolvedConfig& cfg) {
  const CapObstacle cap(axis_vector(cfg.N, cfg.N), cfg.rho);
  const std::size_t s = cfg.s();
  const auto trials = run_trials<RegionCounts>(cfg.seed, cfg.trials, cfg.threads, [&](Rng& rng) {
    RegionCounts rc;
    for (std::size_t k = 0; k < s; ++k) {
      const Vec p = sample_sphere_point(rng, cfg.N);
      if (cap.contains(p)) ++rc.s_p;
      else if (cap.contains_eps(p, cfg.eps)) ++rc.s_a;
      else ++rc.s_e;
    }
    return std::optional<RegionCounts>(rc);
  });
  const double ds = static_cast<double>(s);
  const double f = cap.volume_fraction();
  const double fe = cfg.eps > 0.0 ? cap.dilated_volume_fraction(cfg.eps) : f;
  RegionAudit audit;
  audit.expected_sp = ds * f;
  audit.expected_sa = ds * (fe - f);
  audit.expected_se = ds * (1.0 - fe);
  audit.t = std::sqrt(ds * std::log(6.0 / kRegionDelta) / 2.0);
  audit.hoeffding_bound = std::exp(-2.0 * audit.t * audit.t / ds);

  ExperimentResult res;
  res.table = Table({"run", "seed", "s_e", "s_a", "s_p"});
  RunningStats sp;
  std::size_t dev_p = 0, dev_a = 0, dev_e = 0;
  for (std::size_t i = 0; i < trials.size(); ++i) {
    const auto& rc = *trials[i].value;
    sp.add(static_cast<double>(rc.s_p) / ds);
    dev_p += std::abs(static_cast<double>(rc.s_p) - audit.expected_sp) > audit.t ? 1 : 0;
    dev_a += std::abs(static_cast<double>(rc.s_a) - audit.expected_sa) > audit.t ? 1 : 0;
    dev_e += std::abs(static_cast<double>(rc.s_e) - audit.expected_se) > audit.t ? 1 : 0;
    res.table.add_row({static_cast<std::int64_t>(i), std::to_string(trials[i].seed),
                       static_cast<std::int64_t>(rc.s_e), static_cast<std::int64_t>(rc.s_a),
                       static_cast<std::int64_t>(rc.s_p)});
  }
  const double runs = static_cast<double>(trials.size());
  audit.sp_deviation_frequency = static_cast<double>(dev_p) / runs;
  audit.sa_deviation_frequency = static_cast<double>(dev_a) / runs;
  audit.se_deviation_frequency = static_cast<double>(dev_e) / runs;
  res.summaries.push_back(summarize("sp_over_s", sp, 0, f));
  res.details["volume_fraction"] = f;
  res.details["dilated_volume_fraction"] = fe;
  res.details["t"] = audit.t;
  res.details["hoeffding_bound"] = audit.hoeffding_bound;
  res.details["sp_deviation_frequency"] = audit.sp_deviation_frequency;
  res.details["sa_deviation_frequency"] = audit.sa_deviation_frequency;
  res.details["se_deviation_frequency"] = audit.se_deviation_frequency;
  return res;
}

struct CalabiTrial {
  int m = 3;
  CalabiReport report;
};

inline ExperimentResult run_calabi_audit(const ResolvedConfig& cfg) {
  ExperimentResult res;
  res.table = Table({"m", "pair", "seed", "pencil", "pencil_value", "oracle_found", "oracle_best",
                     "verdict"});
  std::size_t inconsistent = 0, borderline = 0, total = 0;
  for (int m = cfg.m; m <= cfg.m_max; ++m) {
    const std::uint64_t seed_m = mix(cfg.seed, static_cast<std::uint64_t>(m));
    std::vector<CalabiReport> reports(cfg.trials);
    parallel_for(cfg.trials, cfg.threads, [&](std::size_t i) {
      Rng rng(mix(seed_m, i));
      const SymMatrix A = sample_goe(rng, m), B = sample_goe(rng, m);
      reports[i] = calabi_check(A, B, rng);
    });
    for (std::size_t i = 0; i < reports.size(); ++i) {
      const auto& r = reports[i];
      ++total;
      if (r.verdict == CalabiVerdict::Inconsistent) ++inconsistent;
      if (r.verdict == CalabiVerdict::Borderline) ++borderline;
      res.table.add_row({static_cast<std::int64_t>(m), static_cast<std::int64_t>(i),
                         std::to_string(mix(seed_m, i)), std::string(to_string(r.pencil.outcome)),
                         r.pencil.value, static_cast<std::int64_t>(r.oracle.found ? 1 : 0),
                         r.oracle.best, std::string(to_string(r.verdict))});
    }
  }
  res.flagged_count = borderline;
  res.details["pairs"] = total;
  res.details["inconsistent"] = inconsistent;
  res.details["borderline"] = borderline;
  return res;
}

// ---------------------------------------------------------------------------

inline ExperimentResult run_experiment(const ResolvedConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentResult res;
  switch (cfg.experiment) {
    case Experiment::EkssRp1: res = run_ekss_rp1(cfg); break;
    case Experiment::Conics: res = run_conics(cfg); break;
    case Experiment::ObstacleGraph: res = run_obstacle_graph(cfg); break;
    case Experiment::QuadricsGraph: res = run_quadrics_graph(cfg); break;
    case Experiment::PdVolume: res = run_pd_volume(cfg); break;
    case Experiment::GoodCone: res = run_good_cone(cfg); break;
    case Experiment::Coverage: res = run_coverage(cfg); break;
    case Experiment::CalabiAudit: res = run_calabi_audit(cfg); break;
    case Experiment::RegionCounts: res = run_region_counts(cfg); break;
  }
  res.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

inline nlohmann::ordered_json to_json(const Summary& s) {
  nlohmann::ordered_json j;
  j["name"] = s.name;
  j["estimate"] = s.estimate;
  j["stderr"] = s.standard_error;
  j["ci95_lo"] = s.ci95_lo;
  j["ci95_hi"] = s.ci95_hi;
  j["trials"] = s.trials;
  j["flagged_count"] = s.flagged_count;
  if (s.target) j["target"] = *s.target;
  return j;
}

/// Rendered main output (CSV text, or the JSON array of row objects).
inline std::string render_table(const ExperimentResult& res, OutputFormat format) {
  if (format == OutputFormat::Csv) return res.table.csv();
  return res.table.to_json().dump(2) + "\n";
}

/// Writes the main output to cfg.out and a `<out>.meta.json` sidecar holding
/// the resolved config, summaries, details and environment.
inline void write_outputs(const ResolvedConfig& cfg, const ExperimentResult& res) {
  if (cfg.out.empty()) return;
  const std::filesystem::path out(cfg.out);
  if (out.has_parent_path()) std::filesystem::create_directories(out.parent_path());
  {
    std::ofstream os(out, std::ios::binary);
    if (!os) throw Error(ErrorKind::InvalidInput, "cannot write " + cfg.out);
    os << render_table(res, cfg.format);
  }
  nlohmann::ordered_json meta;
  meta["config"] = to_json(cfg);
  meta["version"] = KLAB_VERSION;
  meta["wall_time_seconds"] = res.wall_time;
  meta["flagged_count"] = res.flagged_count;
  auto sums = nlohmann::ordered_json::array();
  for (const auto& s : res.summaries) sums.push_back(to_json(s));
  meta["summaries"] = sums;
  meta["details"] = res.details;
  meta["environment"] = {{"compiler", __VERSION__}, {"cplusplus", __cplusplus}};
  std::ofstream ms(cfg.out + ".meta.json", std::ios::binary);
  ms << meta.dump(2) << "\n";
}

inline void print_summary(std::ostream& os, const ResolvedConfig& cfg, const ExperimentResult& res) {
  os << "experiment " << to_string(cfg.experiment) << " seed=" << cfg.seed
     << " wall_time=" << format_double(res.wall_time) << "s flagged=" << res.flagged_count << "\n";
  for (const auto& s : res.summaries) {
    os << "  " << s.name << ": " << format_double(s.estimate) << " +- "
       << format_double(s.standard_error) << " (95% CI [" << format_double(s.ci95_lo) << ", "
       << format_double(s.ci95_hi) << "], n=" << s.trials << ")";
    if (s.target) os << " target=" << format_double(*s.target);
    os << "\n";
  }
  for (const auto& [k, v] : res.details.items()) os << "  " << k << ": " << v.dump() << "\n";
}

}  // namespace klab

#endif  // KLAB_EXPERIMENTS_HPP
