#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "klab/config.hpp"
#include "klab/experiments.hpp"
#include "klab/parallel.hpp"
#include "klab/stats.hpp"
#include "klab/table.hpp"
#include "oracles.hpp"

using namespace klab;

namespace {

ResolvedConfig make(Experiment e, auto&& tweak) {
  ExperimentConfig c;
  c.experiment = e;
  tweak(c);
  return resolve(c);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(KLAB_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::filesystem::path scratch_dir() {
  auto dir = std::filesystem::temp_directory_path() / ("klab_test_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  return dir;
}

// Small configurations of every experiment.
std::vector<ResolvedConfig> small_configs() {
  std::vector<ResolvedConfig> out;
  out.push_back(make(Experiment::EkssRp1, [](auto& c) { c.trials = 300, c.degrees = std::vector<int>{3, 4}; }));
  out.push_back(make(Experiment::Conics, [](auto& c) { c.trials = 300; }));
  out.push_back(make(Experiment::ObstacleGraph, [](auto& c) { c.trials = 3, c.s_sweep = {50, 120}; }));
  out.push_back(make(Experiment::QuadricsGraph, [](auto& c) { c.trials = 3, c.s_sweep = {20, 40}; }));
  out.push_back(make(Experiment::PdVolume, [](auto& c) { c.samples = 25000, c.m_max = 4; }));
  out.push_back(make(Experiment::GoodCone, [](auto& c) { c.trials = 4, c.samples = 3000; }));
  out.push_back(make(Experiment::Coverage, [](auto& c) { c.trials = 4, c.samples = 60, c.eps = 0.05; }));
  out.push_back(make(Experiment::CalabiAudit, [](auto& c) { c.trials = 30, c.m_max = 4; }));
  out.push_back(make(Experiment::RegionCounts, [](auto& c) { c.trials = 20, c.s = 500, c.eps = 0.1; }));
  return out;
}

}  // namespace

TEST(Stats, WelfordMatchesTwoPass) {
  Rng rng(91);
  std::vector<double> xs;
  RunningStats rs;
  for (int k = 0; k < 5000; ++k) {
    const double x = 1e3 + rng.gaussian() * 3.0;
    xs.push_back(x);
    rs.add(x);
  }
  const auto [mean, var] = oracle::two_pass_mean_variance(xs);
  EXPECT_NEAR(rs.mean(), mean, 1e-12 * std::abs(mean));
  EXPECT_NEAR(rs.variance(), var, 1e-12 * var);
  EXPECT_NEAR(rs.standard_error(), std::sqrt(var / 5000), 1e-12 * std::sqrt(var / 5000));
  const Summary s = summarize("x", rs, 3, 1000.0);
  EXPECT_NEAR(s.ci95_lo, s.estimate - 1.96 * s.standard_error, 1e-12);
  EXPECT_NEAR(s.ci95_hi, s.estimate + 1.96 * s.standard_error, 1e-12);
  EXPECT_EQ(s.trials, 5000u);
  EXPECT_EQ(s.flagged_count, 3u);
  RunningStats one;
  one.add(4.0);
  EXPECT_EQ(one.variance(), 0.0);
}

TEST(Table, CsvFormatting) {
  Table t({"a", "b", "c"});
  t.add_row({std::int64_t{3}, 0.1, std::string("x")});
  t.add_row({std::int64_t{-1}, std::nan(""), std::string("y")});
  EXPECT_EQ(t.csv(), "a,b,c\n3,0.10000000000000001,x\n-1,nan,y\n");
  EXPECT_THROW(t.add_row({std::int64_t{1}}), Error);
  const auto j = t.to_json();
  EXPECT_EQ(j[0]["b"].get<double>(), 0.1);
  EXPECT_EQ(j[1]["b"].get<std::string>(), "nan");
}

TEST(Parallel, CoversEveryIndexAndRethrows) {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) EXPECT_EQ(h, 1);
  EXPECT_THROW(parallel_for(100, 3, [](std::size_t i) {
                 if (i == 57) throw Error(ErrorKind::ConvergenceFailure, "boom");
               }),
               Error);
}

TEST(Config, ParsesEveryKey) {
  const auto j = nlohmann::json::parse(R"({
    "experiment": "obstacle-graph", "seed": 7, "trials": 4, "s_sweep": [10, 20],
    "N": 3, "rho": 0.4, "eps": 0.05, "out": "x.csv", "format": "json", "threads": 2
  })");
  const auto r = resolve(config_from_json(j));
  EXPECT_EQ(r.experiment, Experiment::ObstacleGraph);
  EXPECT_EQ(r.seed, 7u);
  EXPECT_EQ(r.trials, 4u);
  EXPECT_EQ(r.s_sweep, (std::vector<std::size_t>{10, 20}));
  EXPECT_EQ(r.N, 3);
  EXPECT_DOUBLE_EQ(r.rho, 0.4);
  EXPECT_DOUBLE_EQ(r.eps, 0.05);
  EXPECT_EQ(r.out, "x.csv");
  EXPECT_EQ(r.format, OutputFormat::Json);
  EXPECT_EQ(r.threads, 2u);
  const auto q = resolve(config_from_json(nlohmann::json::parse(
      R"({"experiment": "quadrics-graph", "n": 3, "s": 12, "degrees": [1]})")));
  EXPECT_EQ(q.m, 4);
  EXPECT_EQ(q.s_sweep, (std::vector<std::size_t>{12}));
}

TEST(Config, Defaults) {
  const auto o = make(Experiment::ObstacleGraph, [](auto&) {});
  EXPECT_EQ(o.s_sweep, (std::vector<std::size_t>{250, 1000, 4000}));
  EXPECT_NEAR(cap_volume_fraction(o.N, o.rho), 0.2, 1e-12);
  const auto p = make(Experiment::PdVolume, [](auto&) {});
  EXPECT_EQ(p.m, 2);
  EXPECT_EQ(p.m_max, 5);
  EXPECT_EQ(p.samples, 1000000u);
  EXPECT_EQ(make(Experiment::EkssRp1, [](auto&) {}).degrees, (std::vector<int>{4}));
}

TEST(Config, Rejections) {
  auto bad = [](const char* text) {
    EXPECT_THROW(resolve(config_from_json(nlohmann::json::parse(text))), ConfigError) << text;
  };
  bad(R"({"experiment": "obstacle-graph", "rho": 2.0})");
  bad(R"({"experiment": "obstacle-graph", "rho": 0})");
  bad(R"({"experiment": "obstacle-graph", "eps": -0.1})");
  bad(R"({"experiment": "ekss-rp1", "trials": 0})");
  bad(R"({"experiment": "ekss-rp1", "degrees": [2, 0]})");
  bad(R"({"experiment": "ekss-rp1", "n": 2})");
  bad(R"({"experiment": "quadrics-graph", "m": 2})");
  bad(R"({"experiment": "calabi-audit", "m": 4, "m_max": 3})");
  bad(R"({"experiment": "nope"})");
  bad(R"({"experiment": "conics", "colour": 1})");
  bad(R"({"experiment": "conics", "trials": "many"})");
  bad(R"({"experiment": "conics", "format": "xml"})");
  bad(R"({"trials": 3})");
  bad(R"([1, 2])");
}

TEST(Experiments, EkssDegenerateDegreeLists) {
  const auto none = run_ekss_rp1(make(Experiment::EkssRp1, [](auto& c) { c.trials = 50, c.degrees = std::vector<int>{}; }));
  EXPECT_EQ(none.summary("b0").estimate, 1.0);
  EXPECT_EQ(none.summary("b0").standard_error, 0.0);
  const auto lin = run_ekss_rp1(make(Experiment::EkssRp1, [](auto& c) { c.trials = 50, c.degrees = std::vector<int>{1}; }));
  EXPECT_EQ(lin.summary("zeros").estimate, 1.0);
  EXPECT_EQ(lin.summary("b0").estimate, 1.0);
}

TEST(Experiments, ConicsFixedPairCount) {
  const double a[] = {1, 0, -1}, b[] = {0, 1, -1};
  for (int k = 0; k < 10; ++k)
    EXPECT_EQ(conic_intersection_count(SymMatrix::diagonal(a), SymMatrix::diagonal(b)).count, 4);
  const auto r = run_conics(make(Experiment::Conics, [](auto& c) { c.trials = 2000; }));
  EXPECT_EQ(r.details["parity_violations"].get<std::size_t>(), 0u);
  EXPECT_TRUE(r.summary("count").within(4.0));
}

TEST(Experiments, QuadricsSyntheticCases) {
  std::vector<SymMatrix> definite{SymMatrix::identity(3), SymMatrix::identity(3).scaled(-2.0),
                                  SymMatrix::identity(3).scaled(0.5)};
  const auto t = quadric_trial(definite, 1);
  EXPECT_EQ(t.b0_graph - t.definite, 0u);
  const double a[] = {1, 1, -1}, b[] = {1, -1, 1};
  const auto pair = quadric_trial({SymMatrix::diagonal(a), SymMatrix::diagonal(b)}, 1);
  EXPECT_EQ(pair.b0_graph - pair.definite, 1u);
}

TEST(Experiments, PdVolumeTwoByTwo) {
  const auto r = run_pd_volume(make(Experiment::PdVolume, [](auto& c) { c.m = 2, c.m_max = 2, c.samples = 200000; }));
  const auto& row = r.table.rows().front();
  const double pp = std::get<double>(row[4]), pd = std::get<double>(row[6]);
  const double se = std::get<double>(row[7]);
  // by symmetry P(definite) = 2 P(positive definite)
  EXPECT_NEAR(pd, 2 * pp, 3 * se);
  // independent estimate: positive definite iff det > 0 and trace > 0
  Rng rng(92);
  std::size_t hits = 0;
  const std::size_t n = 200000;
  for (std::size_t k = 0; k < n; ++k) {
    const double x = rng.gaussian(), z = rng.gaussian(), y = rng.gaussian() * std::sqrt(0.5);
    hits += (x * z - y * y > 0 && x + z > 0) ? 1 : 0;
  }
  const double p2 = static_cast<double>(hits) / n;
  const double se2 = std::sqrt(p2 * (1 - p2) / n) + std::get<double>(row[5]);
  EXPECT_NEAR(pp, p2, 3 * se2);
}

TEST(Experiments, PdVolumeDecreasesWithM) {
  const auto r = run_pd_volume(make(Experiment::PdVolume, [](auto& c) { c.m = 2, c.m_max = 4, c.samples = 100000; }));
  double prev = 1.0;
  for (const auto& row : r.table.rows()) {
    const double pd = std::get<double>(row[6]);
    EXPECT_LT(pd, prev);
    prev = pd;
  }
}

TEST(Experiments, ObstacleTinyCap) {
  const CapObstacle cap(axis_vector(2, 2), 0.01);
  int exact = 0;
  for (std::uint64_t i = 0; i < 20; ++i) {
    Rng rng(mix(93, i));
    const auto t = obstacle_graph_trial(cap, 100, rng, 1);
    exact += t.b0 == 1 + t.s_p ? 1 : 0;
  }
  EXPECT_GE(exact, 19);
}

TEST(Experiments, RegionCountsWithoutDilation) {
  const auto r = run_region_counts(make(Experiment::RegionCounts, [](auto& c) { c.trials = 20, c.s = 1000; }));
  for (const auto& row : r.table.rows()) EXPECT_EQ(std::get<std::int64_t>(row[3]), 0);
  EXPECT_DOUBLE_EQ(r.details["hoeffding_bound"].get<double>(), 1.0 / 600.0);
}

TEST(Experiments, CalabiSmallAudit) {
  const auto r = run_calabi_audit(make(Experiment::CalabiAudit, [](auto& c) { c.trials = 100, c.m_max = 4; }));
  EXPECT_EQ(r.details["pairs"].get<std::size_t>(), 200u);
  EXPECT_EQ(r.details["inconsistent"].get<std::size_t>(), 0u);
}

TEST(Experiments, CoverageAndGoodCone) {
  const auto c = run_coverage(make(Experiment::Coverage, [](auto& c) { c.trials = 5, c.samples = 50, c.eps = 0.05; }));
  EXPECT_EQ(c.flagged_count, 0u);
  EXPECT_GE(c.summary("draws").estimate, 1.0);
  const auto g = run_good_cone(make(Experiment::GoodCone, [](auto& c) { c.trials = 5, c.samples = 2000; }));
  const double f = g.summary("good_cone_fraction").estimate;
  EXPECT_GT(f, 0.0);
  EXPECT_LT(f, 1.0);
}

TEST(Determinism, OutputIndependentOfThreadCount) {
  for (auto cfg : small_configs()) {
    cfg.threads = 1;
    const auto a = run_experiment(cfg);
    cfg.threads = 3;
    const auto b = run_experiment(cfg);
    EXPECT_EQ(render_table(a, OutputFormat::Csv), render_table(b, OutputFormat::Csv)) << to_string(cfg.experiment);
    EXPECT_EQ(render_table(a, OutputFormat::Json), render_table(b, OutputFormat::Json));
    cfg.seed += 1;
    const auto c = run_experiment(cfg);
    EXPECT_NE(render_table(a, OutputFormat::Csv), render_table(c, OutputFormat::Csv)) << to_string(cfg.experiment);
  }
}

TEST(Output, WritesMainFileAndSidecar) {
  const auto dir = scratch_dir();
  auto cfg = make(Experiment::Conics, [&](auto& c) { c.trials = 20, c.out = (dir / "sub" / "c.csv").string(); });
  const auto res = run_experiment(cfg);
  write_outputs(cfg, res);
  const std::string csv = slurp(dir / "sub" / "c.csv");
  EXPECT_EQ(csv.rfind("trial,seed,count,flagged\n", 0), 0u);
  EXPECT_EQ(csv.find('\r'), std::string::npos);
  const auto meta = nlohmann::json::parse(slurp(dir / "sub" / "c.csv.meta.json"));
  EXPECT_EQ(meta["config"]["experiment"], "conics");
  EXPECT_TRUE(meta.contains("wall_time_seconds"));
  EXPECT_EQ(meta["summaries"][0]["name"], "count");
  std::filesystem::remove_all(dir);
}

TEST(Cli, ExitCodesAndOutputs) {
  const auto dir = scratch_dir();
  EXPECT_EQ(run_cli("--help"), 0);
  EXPECT_EQ(run_cli("conics --help"), 0);
  EXPECT_EQ(run_cli(""), 2);
  EXPECT_EQ(run_cli("conics --no-such-flag"), 2);
  EXPECT_EQ(run_cli("obstacle-graph --rho 2.0"), 2);
  EXPECT_EQ(run_cli("ekss-rp1 --trials 0"), 2);
  EXPECT_EQ(run_cli("run"), 2);
  // failures after a valid config exit with 3
  EXPECT_EQ(run_cli("conics --trials 5 --out /proc/klab-no-such-dir/x.csv"), 3);

  const auto a = dir / "a.csv", b = dir / "b.csv";
  EXPECT_EQ(run_cli("ekss-rp1 --seed 5 --trials 200 --degrees 2,3 --threads 1 --out " + a.string()), 0);
  EXPECT_EQ(run_cli("ekss-rp1 --seed 5 --trials 200 --degrees 2,3 --threads 4 --out " + b.string()), 0);
  EXPECT_FALSE(slurp(a).empty());
  EXPECT_EQ(slurp(a), slurp(b));

  const auto cfg = dir / "cfg.json";
  std::ofstream(cfg) << R"({"experiment": "ekss-rp1", "seed": 5, "trials": 200, "degrees": [2, 3]})";
  const auto c = dir / "c.csv";
  EXPECT_EQ(run_cli("run --config " + cfg.string() + " --out " + c.string()), 0);
  EXPECT_EQ(slurp(a), slurp(c));
  // inline flags override the file
  const auto d = dir / "d.csv";
  EXPECT_EQ(run_cli("ekss-rp1 --config " + cfg.string() + " --trials 10 --out " + d.string()), 0);
  EXPECT_NE(slurp(a), slurp(d));

  const auto bad = dir / "bad.json";
  std::ofstream(bad) << R"({"experiment": "conics", "bogus": 1})";
  EXPECT_EQ(run_cli("run --config " + bad.string()), 2);
  std::ofstream(dir / "broken.json") << "{not json";
  EXPECT_EQ(run_cli("run --config " + (dir / "broken.json").string()), 2);

  const auto j = dir / "q.json";
  EXPECT_EQ(run_cli("quadrics-graph --trials 2 --s 10,20 --format json --out " + j.string()), 0);
  const auto rows = nlohmann::json::parse(slurp(j));
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0]["s"], 10);
  std::filesystem::remove_all(dir);
}
