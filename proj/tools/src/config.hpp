#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "asd/dynamics.hpp"
#include "asd/graph.hpp"
#include "asd/meanfield.hpp"
#include "asd/simulate.hpp"

namespace asdkit {

using nlohmann::json;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Parses a config document; syntax errors carry line and column.
json parse_config_text(const std::string& text, const std::string& origin = "<config>");
json load_config(const std::string& path);

// Fills defaults for every section and rejects unknown keys.
json resolve(const json& user);

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> threads;
};
// Flags win over the environment, the environment over the file.
void apply_overrides(json& cfg, const Overrides& o, const char* env_threads);

std::uint64_t graph_seed(const json& cfg, std::uint64_t salt = 0);

asd::KernelPtr build_kernel(const json& cfg);
// graph.n replaced by n when given.
asd::LabeledGraph build_graph(const json& cfg, std::optional<asd::NodeId> n = {}, std::uint64_t salt = 0);
// Exact statistics where the generator defines them, otherwise those of one sampled graph.
asd::NodeStatistics build_statistics(const json& cfg);

// Per-class initial laws over the kernel states for the mean-field side.
std::vector<std::vector<double>> initial_fractions(const json& cfg, const asd::NodeStatistics& stats,
                                                   const asd::StateSet& states);
asd::InitialFactory build_initial(const json& cfg, const asd::StateSet& states);

asd::SimConfig sim_config(const json& cfg);
asd::OdeConfig ode_config(const json& cfg);
asd::PhiOptions phi_options(const json& cfg);
asd::StationaryConfig stationary_config(const json& cfg);
asd::BasinConfig basin_config(const json& cfg);

}  // namespace asdkit
