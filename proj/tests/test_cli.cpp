#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "asd/errors.hpp"
#include "asd/graph.hpp"
#include "compare.hpp"
#include "config.hpp"

using namespace asdkit;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("asdkit_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream f(p);
  f << text;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args, const std::string& env = "") {
  std::string cmd = env + (env.empty() ? "" : " ") + ASDKIT_PATH + " " + args + " >/dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::size_t count_lines(const fs::path& p) {
  std::ifstream f(p);
  std::string line;
  std::size_t n = 0;
  while (std::getline(f, line)) ++n;
  return n;
}

SeriesTable table(const std::string& csv) {
  std::istringstream in(csv);
  return read_series(in);
}

}  // namespace

TEST(Config, MalformedJsonReportsLineAndColumn) {
  try {
    parse_config_text("{\n  \"seed\": 1,\n  \"graph\": {,}\n}", "cfg.json");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("cfg.json:3:"), std::string::npos) << e.what();
  }
}

TEST(Config, UnknownKeysRejectedAtEveryLevel) {
  EXPECT_THROW(resolve(json{{"sed", 1}}), ConfigError);
  EXPECT_THROW(resolve(json{{"ode", {{"step", 0.1}}}}), ConfigError);
  EXPECT_THROW(resolve(json{{"graph", {{"generator", "regular"}, {"community_sizes", {1}}}}}), ConfigError);
  EXPECT_THROW(resolve(json{{"dynamics", {{"kernel", "erg"}, {"a_plus", 2}}}}), ConfigError);
  EXPECT_THROW(resolve(json{{"initial", {{"distrib", {1}}}}}), ConfigError);
  EXPECT_THROW(resolve(json{{"graph", {{"generator", "lattice"}}}}), ConfigError);
}

TEST(Config, RequiredKeysAndExclusiveInitialForms) {
  EXPECT_THROW(resolve(json{{"graph", {{"generator", "cbm"}, {"n", 10}, {"community_sizes", {5, 5}}}}}),
               ConfigError);
  EXPECT_THROW(resolve(json{{"initial", {{"distribution", {1, 0}}, {"fraction_per_class", {{1, 0}}}}}}),
               ConfigError);
  EXPECT_THROW(resolve(json{{"initial", {{"counts", {{1, 0}}}}}}), ConfigError);
}

TEST(Config, DefaultsAreFilledIn) {
  auto cfg = resolve(json::object());
  EXPECT_EQ(cfg["graph"]["generator"], "regular");
  EXPECT_EQ(cfg["dynamics"]["kernel"], "tltm");
  EXPECT_EQ(cfg["simulate"]["runs"], 1);
  EXPECT_DOUBLE_EQ(cfg["ode"]["h"].get<double>(), 0.01);
}

TEST(Config, FlagsBeatEnvironmentBeatsFile) {
  auto cfg = resolve(json{{"threads", 3}, {"seed", 9}});
  auto c1 = cfg;
  apply_overrides(c1, {}, nullptr);
  EXPECT_EQ(c1["threads"], 3);
  EXPECT_EQ(c1["seed"], 9);
  auto c2 = cfg;
  apply_overrides(c2, {}, "5");
  EXPECT_EQ(c2["threads"], 5);
  auto c3 = cfg;
  apply_overrides(c3, {std::uint64_t{4}, std::string("o"), 2}, "5");
  EXPECT_EQ(c3["threads"], 2);
  EXPECT_EQ(c3["seed"], 4);
  EXPECT_EQ(c3["out"], "o");
  auto c4 = cfg;
  EXPECT_THROW(apply_overrides(c4, {}, "many"), ConfigError);
}

TEST(Config, CountsBecomeClassFractions) {
  auto cfg = resolve(json{{"graph", {{"generator", "regular"}, {"k", 2}, {"n", 1000}, {"labels", {"a", "b"}},
                                      {"label_fractions", {0.5, 0.5}}}},
                          {"initial", {{"counts", {{0, 0, 10}, {50, 0, 0}}}, {"fill_state", "0"}}}});
  auto stats = build_statistics(cfg);
  auto f = initial_fractions(cfg, stats, build_kernel(cfg)->states());
  EXPECT_NEAR(f[0][2], 10.0 / 500, 1e-15);
  EXPECT_NEAR(f[0][1], 490.0 / 500, 1e-15);
  EXPECT_NEAR(f[1][0], 50.0 / 500, 1e-15);
}

TEST(Compare, FileAgainstItselfHasZeroGaps) {
  auto t = table("t,class,state,fraction\n0,all,a,0.2\n0,all,b,0.8\n1,all,a,0.5\n1,all,b,0.5\n");
  auto r = compare_series(t, t);
  EXPECT_EQ(r.entries.size(), 2u);
  EXPECT_EQ(r.sup, 0.0);
}

TEST(Compare, ShiftedCopyHasSupGapOfTheShift) {
  auto a = table("t,class,state,mean\n0,all,a,0.2\n1,all,a,0.5\n2,all,a,0.4\n");
  auto b = table("t,class,state,mean\n0,all,a,0.3\n1,all,a,0.6\n2,all,a,0.5\n");
  auto ab = compare_series(a, b), ba = compare_series(b, a);
  EXPECT_NEAR(ab.sup, 0.1, 1e-12);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(ab.entries[0].gaps[i], -ba.entries[0].gaps[i]);
}

TEST(Compare, LinearInterpolationOntoTheFirstGrid) {
  auto a = table("t,class,state,fraction\n0,x,s,0\n0.25,x,s,0\n1,x,s,0\n");
  auto b = table("t,class,state,fraction\n0,x,s,0\n1,x,s,1\n");
  auto r = compare_series(a, b);
  EXPECT_NEAR(r.entries[0].gaps[1], -0.25, 1e-15);
  EXPECT_NEAR(r.sup, 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(r.entries[0].at, 1.0);
}

TEST(Compare, GridMismatchBeyondRangeOrWithoutSharedSeries) {
  auto a = table("t,class,state,fraction\n0,x,s,0\n2,x,s,0\n");
  auto b = table("t,class,state,fraction\n0,x,s,0\n1,x,s,1\n");
  EXPECT_THROW(compare_series(a, b), asd::GridMismatch);
  auto c = table("t,class,state,fraction\n0,y,s,0\n");
  EXPECT_THROW(compare_series(c, b), asd::GridMismatch);
}

TEST(Compare, OdeLongFormatUsesRootMarginals) {
  auto ode = table("t,kind,state,label,parent,value\n0,zeta,a,x,x,0.9\n0,y,a,x,,0.4\n1,zeta,a,x,x,0.9\n1,y,a,x,,0.6\n");
  ASSERT_EQ(ode.series.size(), 1u);
  const auto& s = ode.series.at({"x", "a"});
  EXPECT_DOUBLE_EQ(s[0].second, 0.4);
  EXPECT_DOUBLE_EQ(s[1].second, 0.6);
  EXPECT_THROW(table("t,class,value\n0,x,1\n"), asd::MalformedRow);
  EXPECT_THROW(table("run_id,t,class,state,fraction\n0,0,x,a,1\n1,0,x,a,1\n"), asd::MalformedRow);
}

TEST(Cli, GenerateRegularWritesEdgeList) {
  auto d = scratch("gen");
  write(d / "c.json", R"({"graph": {"generator": "regular", "k": 2, "n": 4}})");
  ASSERT_EQ(run_cli("generate --config " + (d / "c.json").string() + " --out " + (d / "o").string()), 0);
  EXPECT_EQ(count_lines(d / "o" / "graph.edges"), 8u);
  EXPECT_EQ(count_lines(d / "o" / "labels.txt"), 4u);
  auto m = json::parse(slurp(d / "o" / "manifest.json"));
  EXPECT_EQ(m["command"], "generate");
  EXPECT_EQ(m["config"]["graph"]["k"], 2);
  EXPECT_EQ(m["results"]["edges"], 8);
}

TEST(Cli, ExitCodes) {
  auto d = scratch("codes");
  write(d / "bad.json", "{\"graph\": {\"k\": 2,,}}");
  write(d / "unknown.json", R"({"graph": {"generator": "regular", "kk": 2}})");
  write(d / "shape.json", R"({"graph": {"generator": "cbm", "n": 10, "community_sizes": [5, 5],
                              "edge_means": [[1, 1, 1]]}})");
  const auto out = " --out " + (d / "o").string();
  EXPECT_EQ(run_cli("generate --config " + (d / "bad.json").string() + out), 2);
  EXPECT_EQ(run_cli("generate --config " + (d / "unknown.json").string() + out), 2);
  EXPECT_EQ(run_cli("generate --config " + (d / "shape.json").string() + out), 3);
  EXPECT_EQ(run_cli("frobnicate" + out), 2);
  EXPECT_EQ(run_cli("generate --threads x" + out), 2);
  EXPECT_EQ(run_cli("simulate" + out, "ASDKIT_THREADS=lots"), 2);
}

TEST(Cli, SimulateIsDeterministicGivenSeed) {
  auto d = scratch("det");
  write(d / "c.json", R"({"graph": {"generator": "regular", "k": 4, "n": 2000},
    "dynamics": {"kernel": "erg"}, "simulate": {"horizon": 2.0, "dt": 0.1, "runs": 1}})");
  const auto cfg = "simulate --config " + (d / "c.json").string() + " --seed 17";
  ASSERT_EQ(run_cli(cfg + " --out " + (d / "a").string()), 0);
  ASSERT_EQ(run_cli(cfg + " --out " + (d / "b").string()), 0);
  ASSERT_EQ(run_cli("simulate --config " + (d / "c.json").string() + " --seed 18 --out " + (d / "c").string()), 0);
  EXPECT_EQ(slurp(d / "a" / "trajectory.csv"), slurp(d / "b" / "trajectory.csv"));
  EXPECT_NE(slurp(d / "a" / "trajectory.csv"), slurp(d / "c" / "trajectory.csv"));
  EXPECT_EQ(json::parse(slurp(d / "a" / "manifest.json"))["config"]["seed"], 17);
}

TEST(Cli, EnsembleDoesNotDependOnThreadCount) {
  auto d = scratch("threads");
  write(d / "c.json", R"({"graph": {"generator": "regular", "k": 3, "n": 500},
    "dynamics": {"kernel": "tltm", "a_plus": 1, "a_minus": 2},
    "simulate": {"horizon": 1.0, "dt": 0.25, "runs": 6, "fresh_graph": true}})");
  const auto cfg = "simulate --config " + (d / "c.json").string();
  ASSERT_EQ(run_cli(cfg + " --out " + (d / "one").string(), "ASDKIT_THREADS=1"), 0);
  ASSERT_EQ(run_cli(cfg + " --threads 3 --out " + (d / "three").string()), 0);
  EXPECT_EQ(slurp(d / "one" / "ensemble.csv"), slurp(d / "three" / "ensemble.csv"));
  EXPECT_EQ(json::parse(slurp(d / "one" / "manifest.json"))["config"]["threads"], 1);
  EXPECT_EQ(json::parse(slurp(d / "three" / "manifest.json"))["config"]["threads"], 3);
}

TEST(Cli, CbmStatisticsMatchEdgeMeans) {
  auto d = scratch("cbm");
  ASSERT_EQ(run_cli("generate --config " ASD_CONFIG_DIR "/cbm_cascade.json --out " + (d / "o").string()), 0);
  auto stats = asd::NodeStatistics::from_json(slurp(d / "o" / "statistics.json"));
  const double n = 100000;
  // Recount edges per community pair from the written files.
  std::map<long, int> label;
  {
    std::ifstream f(d / "o" / "labels.txt");
    long v;
    std::string name;
    while (f >> v >> name) label[v] = name == "community1" ? 0 : 1;
  }
  double counted[2][2] = {{0, 0}, {0, 0}};
  {
    std::ifstream f(d / "o" / "graph.edges");
    long u, v;
    while (f >> u >> v) counted[label.at(u)][label.at(v)] += 1;
  }
  const double means[2][2] = {{20, 6}, {5, 20}};
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t b = 0; b < 2; ++b) {
      const double l = stats.edge_count(a, b, n);
      EXPECT_NEAR(l, counted[a][b], 1e-6 * counted[a][b]);
      const double expected = 50000 * means[a][b];
      EXPECT_LE(std::abs(l - expected), 5 * std::sqrt(expected)) << a << "," << b;
    }
}

TEST(Cli, EdgeListRoundTripKeepsClassEdgeCounts) {
  auto d = scratch("roundtrip");
  write(d / "c.json", R"({"graph": {"generator": "regular", "k": 3, "n": 300, "labels": ["a", "b"],
    "label_fractions": [0.5, 0.5]}})");
  ASSERT_EQ(run_cli("generate --config " + (d / "c.json").string() + " --out " + (d / "o").string()), 0);
  write(d / "e.json", "{\"graph\": {\"generator\": \"edge_list\", \"path\": \"" + (d / "o" / "graph.edges").string() +
                          "\", \"label_map\": \"" + (d / "o" / "labels.txt").string() + "\"}}");
  ASSERT_EQ(run_cli("generate --config " + (d / "e.json").string() + " --out " + (d / "r").string()), 0);
  auto m1 = json::parse(slurp(d / "o" / "manifest.json")), m2 = json::parse(slurp(d / "r" / "manifest.json"));
  EXPECT_EQ(m1["results"]["class_edge_counts"], m2["results"]["class_edge_counts"]);
  EXPECT_EQ(m2["results"]["nodes"], 300);
}

TEST(Cli, ErgSimulationMatchesOdeAndEquilibrium) {
  auto d = scratch("erg");
  const std::string cfg = "--config " ASD_CONFIG_DIR "/erg_regular.json --out " + d.string();
  ASSERT_EQ(run_cli("simulate " + cfg), 0);
  ASSERT_EQ(run_cli("ode " + cfg), 0);
  auto sim = read_series_file((d / "trajectory.csv").string());
  for (const char* s : {"R", "P", "S"}) EXPECT_NEAR(sim.series.at({"all", s}).back().second, 1.0 / 3, 0.02) << s;
  EXPECT_EQ(run_cli("compare " + (d / "trajectory.csv").string() + " " + (d / "fractions.csv").string() +
                   " --assert 0.03 --out " + d.string()),
            0);
  auto m = json::parse(slurp(d / "manifest.json"));
  EXPECT_LE(m["results"]["sup_gap"].get<double>(), 0.03);
}

TEST(Cli, CompareAssertFailureExitsFour) {
  auto d = scratch("assert");
  write(d / "a.csv", "t,class,state,fraction\n0,all,x,0.2\n1,all,x,0.3\n");
  write(d / "b.csv", "t,class,state,fraction\n0,all,x,0.3\n1,all,x,0.4\n");
  write(d / "c.csv", "t,class,state,fraction\n5,all,x,0.3\n6,all,x,0.4\n");
  const auto out = " --out " + d.string();
  EXPECT_EQ(run_cli("compare " + (d / "a.csv").string() + " " + (d / "b.csv").string() + " --assert 0.05" + out), 4);
  EXPECT_EQ(run_cli("compare " + (d / "a.csv").string() + " " + (d / "b.csv").string() + " --assert 0.2" + out), 0);
  EXPECT_EQ(run_cli("compare " + (d / "a.csv").string() + " " + (d / "c.csv").string() + out), 3);
  EXPECT_EQ(run_cli("compare" + out), 2);
}

TEST(Cli, StationaryAndBasinsForBrca) {
  auto d = scratch("brca");
  write(d / "c.json", R"({"graph": {"generator": "regular", "k": 21, "labels": ["coordinating", "anti"],
      "label_fractions": [0.7, 0.3]},
    "dynamics": {"kernel": "brca", "coordinating": [true, false]},
    "stationary": {"grid": 4},
    "basins": {"resolution": 11, "axis_x": 1, "horizon": 60}})");
  const auto cfg = "--config " + (d / "c.json").string() + " --out " + d.string();
  ASSERT_EQ(run_cli("stationary " + cfg), 0);
  EXPECT_EQ(count_lines(d / "stationary.csv"), 4u);
  EXPECT_EQ(json::parse(slurp(d / "manifest.json"))["results"]["points"], 3);
  ASSERT_EQ(run_cli("basins " + cfg), 0);
  EXPECT_EQ(count_lines(d / "basins.csv"), 12u);
  EXPECT_EQ(count_lines(d / "attractors.csv"), 3u);
}

TEST(Cli, BoundsAndCouplingOutputs) {
  auto d = scratch("bounds");
  write(d / "c.json", R"({"graph": {"generator": "regular", "k": 3},
    "bounds": {"n": [1000, 100000], "trials": 20000, "moment_trials": 2000},
    "couple": {"n": [1000, 10000], "trials": 3000, "bound_trials": 20000}})");
  const auto cfg = "--config " + (d / "c.json").string() + " --out " + d.string();
  ASSERT_EQ(run_cli("bounds " + cfg), 0);
  EXPECT_EQ(slurp(d / "topological_n1000.csv").substr(0, 11), "term,value\n");
  EXPECT_TRUE(fs::exists(d / "concentration_n100000.csv"));
  ASSERT_EQ(run_cli("couple " + cfg), 0);
  std::ifstream f(d / "couple.csv");
  std::string header, row;
  std::getline(f, header);
  EXPECT_EQ(header, "n,trials,unequal,rate,ci_lo,ci_hi,b1b2,violations,bound");
  while (std::getline(f, row)) {
    std::vector<double> v;
    std::stringstream ss(row);
    std::string cell;
    while (std::getline(ss, cell, ',')) v.push_back(std::stod(cell));
    ASSERT_EQ(v.size(), 9u);
    EXPECT_EQ(v[7], 0.0);
    EXPECT_LE(v[4], v[8]);
  }
}
