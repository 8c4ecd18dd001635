#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"

namespace asdkit {

enum ExitCode : int { kOk = 0, kConfigError = 2, kRuntimeError = 3, kCheckFailed = 4 };

struct Run {
  json cfg;                  // resolved
  std::filesystem::path out;
  std::vector<std::string> outputs;
  json results = json::object();

  std::filesystem::path file(const std::string& name);
};

struct CompareArgs {
  std::optional<std::string> a, b;
  std::optional<double> tolerance;
};

int cmd_generate(Run& run);
int cmd_simulate(Run& run);
int cmd_ode(Run& run);
int cmd_stationary(Run& run);
int cmd_basins(Run& run);
int cmd_bounds(Run& run);
int cmd_couple(Run& run);
int cmd_compare(Run& run, const CompareArgs& args);

// Echoes the resolved config, the outputs and per-command results.
void write_manifest(const Run& run, const std::string& command);

}  // namespace asdkit
