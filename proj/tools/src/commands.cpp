#include "commands.hpp"

#include <fstream>
#include <iostream>

#include "asd/bounds.hpp"
#include "asd/csv.hpp"
#include "asd/errors.hpp"
#include "compare.hpp"

namespace asdkit {

namespace fs = std::filesystem;

fs::path Run::file(const std::string& name) {
  outputs.push_back(name);
  return out / name;
}

namespace {

std::ofstream open_out(const fs::path& p) {
  std::ofstream f(p);
  if (!f) throw asd::Error("cannot write '" + p.string() + "'");
  return f;
}

asd::Rng initial_rng(const json& cfg) { return asd::Rng(cfg["seed"].get<std::uint64_t>()).split(0x696e6974); }

struct MeanFieldSetup {
  asd::NodeStatistics stats;
  asd::KernelPtr kernel;
  std::unique_ptr<asd::MeanField> mf;
  asd::MeanFieldState init;
};

MeanFieldSetup mean_field(const json& cfg) {
  MeanFieldSetup s;
  s.kernel = build_kernel(cfg);
  auto base = build_statistics(cfg);
  const auto& states = s.kernel->states();
  s.stats = base.with_initial_states(states.names(), initial_fractions(cfg, base, states));
  s.mf = std::make_unique<asd::MeanField>(s.stats, s.kernel, phi_options(cfg), cfg["ode"]["truncation"].get<double>());
  s.init = asd::MeanFieldState::from_initial_states(s.stats);
  return s;
}

void write_class_fractions(const asd::OdeTrajectory& tr, const MeanFieldSetup& s, std::ostream& out) {
  const auto& labels = s.stats.labels().names();
  const auto& states = s.kernel->states().names();
  out.precision(12);
  out << "t,class,state,fraction\n";
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    const auto& st = tr.states[i];
    for (std::size_t a = 0; a < labels.size(); ++a) {
      if (!s.mf->label_present(a)) continue;
      for (std::size_t w = 0; w < states.size(); ++w)
        out << tr.times[i] << ',' << labels[a] << ',' << states[w] << ',' << st.y(w, a) << '\n';
    }
    auto all = asd::aggregate_y(st, s.stats);
    for (std::size_t w = 0; w < states.size(); ++w)
      out << tr.times[i] << ",all," << states[w] << ',' << all[w] << '\n';
  }
}

std::vector<asd::NodeId> sizes(const json& list) {
  auto v = list.get<std::vector<double>>();
  std::vector<asd::NodeId> out;
  for (double n : v) {
    if (n < 1 || n != std::floor(n)) throw ConfigError("graph sizes must be positive integers");
    out.push_back(static_cast<asd::NodeId>(n));
  }
  return out;
}

}  // namespace

int cmd_generate(Run& run) {
  auto g = build_graph(run.cfg);
  {
    auto f = open_out(run.file("graph.edges"));
    asd::write_edge_list(g, f);
  }
  {
    auto f = open_out(run.file("labels.txt"));
    for (asd::NodeId v = 0; v < g.n(); ++v) f << v << ' ' << g.labels().name(g.label_of(v)) << '\n';
  }
  auto stats = asd::extract_statistics(g);
  {
    auto f = open_out(run.file("statistics.json"));
    f << stats.to_json() << '\n';
  }
  run.results["nodes"] = g.n();
  run.results["edges"] = g.edge_count();
  run.results["labels"] = g.labels().names();
  run.results["class_edge_counts"] = g.class_edge_counts();
  return kOk;
}

int cmd_simulate(Run& run) {
  const auto kernel = build_kernel(run.cfg);
  const auto sc = sim_config(run.cfg);
  const auto init = build_initial(run.cfg, kernel->states());
  if (sc.runs == 1) {
    auto g = build_graph(run.cfg);
    auto rng = initial_rng(run.cfg);
    auto tr = asd::run_asd(g, *kernel, init(g, rng), sc, 0);
    auto f = open_out(run.file("trajectory.csv"));
    asd::write_trajectory_csv(tr, f);
    run.results["updates"] = tr.updates;
    return kOk;
  }
  asd::RunEnsembleSummary sum;
  if (run.cfg["simulate"]["fresh_graph"].get<bool>()) {
    const json cfg = run.cfg;
    sum = asd::run_ensemble(
        [cfg](asd::Rng& rng) {
          json c = cfg;
          c["seed"] = rng();
          return build_graph(c);
        },
        *kernel, init, sc);
  } else {
    sum = asd::run_ensemble(build_graph(run.cfg), *kernel, init, sc);
  }
  auto f = open_out(run.file("ensemble.csv"));
  asd::write_summary_csv(sum, f);
  run.results["runs"] = sum.runs;
  run.results["updates"] = sum.updates;
  return kOk;
}

int cmd_ode(Run& run) {
  auto s = mean_field(run.cfg);
  auto tr = asd::integrate(s.init, *s.mf, ode_config(run.cfg));
  {
    auto f = open_out(run.file("ode.csv"));
    asd::write_ode_csv(tr, *s.mf, f);
  }
  {
    auto f = open_out(run.file("fractions.csv"));
    write_class_fractions(tr, s, f);
  }
  run.results["steps"] = tr.steps;
  run.results["renormalizations"] = tr.renormalizations;
  run.results["exact_phi"] = s.mf->all_exact();
  return kOk;
}

int cmd_stationary(Run& run) {
  auto s = mean_field(run.cfg);
  auto rep = asd::find_stationary(*s.mf, stationary_config(run.cfg));
  auto f = open_out(run.file("stationary.csv"));
  asd::write_stationary_csv(rep, *s.mf, f);
  run.results["points"] = rep.points.size();
  run.results["seeds"] = rep.seeds;
  run.results["failed_seeds"] = rep.failed_seeds;
  return kOk;
}

int cmd_basins(Run& run) {
  auto s = mean_field(run.cfg);
  auto rep = asd::find_stationary(*s.mf, stationary_config(run.cfg));
  auto map = asd::map_basins(*s.mf, rep, basin_config(run.cfg));
  {
    auto f = open_out(run.file("basins.csv"));
    asd::write_basins_csv(map, f);
  }
  asd::StationaryReport attractors;
  attractors.points = map.attractors;
  auto f = open_out(run.file("attractors.csv"));
  asd::write_stationary_csv(attractors, *s.mf, f);
  run.results["attractors"] = map.attractors.size();
  return kOk;
}

int cmd_bounds(Run& run) {
  const auto& b = run.cfg["bounds"];
  const auto stats = build_statistics(run.cfg);
  const double t = b["t"].get<double>();
  const auto seed = run.cfg["seed"].get<std::uint64_t>();
  const auto form = b["form"].get<std::string>();
  if (form != "general" && form != "classical") throw ConfigError("bounds.form must be general or classical");
  const auto tails = asd::estimate_tails(stats, t, b["trials"].get<std::size_t>(), seed, b["z"].get<double>());
  const auto moment = asd::tree_size_moment(stats, t, 3.0, b["moment_trials"].get<std::size_t>(), asd::hash_combine(seed, 3));

  auto summary = open_out(run.file("bounds.csv"));
  summary.precision(12);
  summary << "n,topological,topological_point,concentration,dominant_term\n";
  for (auto n : sizes(b["n"])) {
    const double nn = n;
    auto topo = form == "general" ? asd::topological_bound(stats, nn, tails)
                                  : asd::topological_bound_classical(stats, nn, tails);
    auto conc = asd::concentration_bound(asd::corollary_parameters(nn, t, b["eta"].get<double>(),
                                                                   b["eps"].get<double>(), stats.mean_degree(),
                                                                   moment.mean));
    {
      auto f = open_out(run.file("topological_n" + std::to_string(n) + ".csv"));
      asd::write_terms_csv(topo.terms, f);
    }
    {
      auto f = open_out(run.file("concentration_n" + std::to_string(n) + ".csv"));
      asd::write_terms_csv(conc.terms, f);
    }
    summary << n << ',' << topo.value << ',' << topo.value_point << ',' << conc.value << ','
            << conc.terms[conc.dominant].name << '\n';
  }
  run.results["third_moment"] = moment.mean;
  run.results["third_moment_se"] = moment.std_error;
  return kOk;
}

int cmd_couple(Run& run) {
  const auto& c = run.cfg["couple"];
  const double t = c["t"].get<double>();
  const auto seed = run.cfg["seed"].get<std::uint64_t>();
  const auto bound_trials = c["bound_trials"].get<std::size_t>();
  std::optional<asd::NodeStatistics> stats;
  std::optional<asd::TailEstimate> tails;
  if (bound_trials > 0) {
    stats = build_statistics(run.cfg);
    tails = asd::estimate_tails(*stats, t, bound_trials, seed, c["z"].get<double>());
  }
  auto f = open_out(run.file("couple.csv"));
  f.precision(12);
  f << "n,trials,unequal,rate,ci_lo,ci_hi,b1b2,violations,bound\n";
  std::uint64_t salt = 0;
  std::size_t violations = 0;
  for (auto n : sizes(c["n"])) {
    auto g = build_graph(run.cfg, n, ++salt);
    auto s = asd::run_coupling_batch(g, t, c["trials"].get<std::size_t>(), asd::hash_combine(seed, salt),
                                     c["z"].get<double>());
    violations += s.violations;
    f << n << ',' << s.trials << ',' << s.unequal << ',' << s.rate << ',' << s.ci.lo << ',' << s.ci.hi << ','
      << s.b1b2 << ',' << s.violations << ',';
    if (tails) f << asd::topological_bound(*stats, n, *tails).value;
    f << '\n';
  }
  run.results["violations"] = violations;
  return kOk;
}

int cmd_compare(Run& run, const CompareArgs& args) {
  const auto& c = run.cfg["compare"];
  auto pick = [&](const std::optional<std::string>& flag, const char* key) {
    if (flag) return *flag;
    if (c[key].is_null()) throw ConfigError(std::string("compare needs two inputs (compare.") + key + ")");
    return c[key].get<std::string>();
  };
  const auto a = pick(args.a, "simulation"), b = pick(args.b, "ode");
  std::optional<double> tol = args.tolerance;
  if (!tol && !c["tolerance"].is_null()) tol = c["tolerance"].get<double>();

  auto report = compare_series(read_series_file(a), read_series_file(b));
  {
    auto f = open_out(run.file("compare.csv"));
    write_gap_summary(report, f);
  }
  {
    auto f = open_out(run.file("compare_gaps.csv"));
    write_gap_series(report, f);
  }
  run.results["sup_gap"] = report.sup;
  std::cout << "sup gap " << report.sup << " over " << report.entries.size() << " series\n";
  if (tol) {
    run.results["tolerance"] = *tol;
    run.results["passed"] = report.sup <= *tol;
    if (report.sup > *tol) {
      std::cerr << "sup gap " << report.sup << " exceeds tolerance " << *tol << '\n';
      return kCheckFailed;
    }
  }
  return kOk;
}

void write_manifest(const Run& run, const std::string& command) {
  json m;
  m["command"] = command;
  m["config"] = run.cfg;
  m["outputs"] = run.outputs;
  m["results"] = run.results;
  auto f = open_out(run.out / "manifest.json");
  f << m.dump(2) << '\n';
}

}  // namespace asdkit
