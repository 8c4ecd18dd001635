#include <cstdlib>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "asd/errors.hpp"
#include "commands.hpp"

using namespace asdkit;

int main(int argc, char** argv) {
  CLI::App app{"asdkit: asynchronous dynamics on labeled configuration-model graphs"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  Overrides ov;
  std::uint64_t seed = 0;
  std::string out;
  int threads = 0;
  app.add_option("--config", config_path, "JSON experiment config")->check(CLI::ExistingFile);
  auto* seed_opt = app.add_option("--seed", seed, "RNG seed (overrides the config)");
  auto* out_opt = app.add_option("--out", out, "output directory (overrides the config)");
  auto* threads_opt = app.add_option("--threads", threads, "worker threads, 0 for all cores (env ASDKIT_THREADS)");

  CompareArgs cmp;
  std::string cmp_a, cmp_b;
  double cmp_tol = 0.0;
  app.add_subcommand("generate", "sample a graph; write its edge list and statistics");
  app.add_subcommand("simulate", "run the asynchronous dynamics; one trajectory or an ensemble summary");
  app.add_subcommand("ode", "integrate the mean-field equations");
  app.add_subcommand("stationary", "find and classify mean-field fixed points");
  app.add_subcommand("basins", "map basins of attraction over a grid of initial states");
  app.add_subcommand("bounds", "topological and concentration bound breakdowns");
  app.add_subcommand("couple", "graph/tree coupling mismatch rate against n");
  auto* compare = app.add_subcommand("compare", "sup-norm gaps between two long-format CSVs");
  auto* a_opt = compare->add_option("first", cmp_a, "simulation CSV");
  auto* b_opt = compare->add_option("second", cmp_b, "ODE or second simulation CSV");
  auto* tol_opt = compare->add_option("--assert", cmp_tol, "exit 4 when the sup gap exceeds this tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  Run run;
  try {
    json user = config_path.empty() ? json::object() : load_config(config_path);
    run.cfg = resolve(user);
    if (*seed_opt) ov.seed = seed;
    if (*out_opt) ov.out = out;
    if (*threads_opt) ov.threads = threads;
    apply_overrides(run.cfg, ov, std::getenv("ASDKIT_THREADS"));
    if (*a_opt) cmp.a = cmp_a;
    if (*b_opt) cmp.b = cmp_b;
    if (*tol_opt) cmp.tolerance = cmp_tol;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  }

  try {
    run.out = run.cfg["out"].get<std::string>();
    std::filesystem::create_directories(run.out);
    int code = kOk;
    if (command == "generate") code = cmd_generate(run);
    else if (command == "simulate") code = cmd_simulate(run);
    else if (command == "ode") code = cmd_ode(run);
    else if (command == "stationary") code = cmd_stationary(run);
    else if (command == "basins") code = cmd_basins(run);
    else if (command == "bounds") code = cmd_bounds(run);
    else if (command == "couple") code = cmd_couple(run);
    else code = cmd_compare(run, cmp);
    write_manifest(run, command);
    return code;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << command << " failed: " << e.what() << '\n';
    return kRuntimeError;
  }
}
