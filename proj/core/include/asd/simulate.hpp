#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "asd/dynamics.hpp"
#include "asd/graph.hpp"
#include "asd/rng.hpp"

namespace asd {

// global: the "all" class only; per_class: every label plus "all";
// per_class_and_state: per_class plus in-degree-weighted zeta fractions.
enum class Granularity { global, per_class, per_class_and_state };

struct SimConfig {
  double horizon = 1.0;
  double dt = 0.01;
  int runs = 1;
  std::uint64_t seed = 0;
  Granularity record = Granularity::per_class;
  double gamma = 1.0;
  int threads = 0;  // 0: hardware concurrency
};

struct SimState {
  std::vector<std::uint8_t> state;
  double time = 0.0;
  std::int64_t updates = 0;
};

struct TrajectorySample {
  std::uint64_t run_id = 0;
  std::vector<double> times;
  std::vector<std::string> classes;  // labels in order, then "all" (or just "all")
  std::vector<std::string> states;
  std::vector<double> fraction;      // [time][class][state]
  std::vector<double> zeta;          // same layout; empty unless recorded
  std::int64_t updates = 0;          // iota(T)

  double at(std::size_t t, std::size_t cls, std::size_t s) const {
    return fraction[(t * classes.size() + cls) * states.size() + s];
  }
  std::size_t class_index(const std::string& name) const;
};

struct RunEnsembleSummary {
  std::vector<double> times;
  std::vector<std::string> classes;
  std::vector<std::string> states;
  std::vector<double> mean, min, max;  // [time][class][state]
  std::vector<std::int64_t> updates;   // per run
  int runs = 0;

  std::size_t index(std::size_t t, std::size_t cls, std::size_t s) const {
    return (t * classes.size() + cls) * states.size() + s;
  }
  std::size_t class_index(const std::string& name) const;
};

std::vector<double> time_grid(double horizon, double dt);

// Runs one realization using substream (cfg.seed, run_id).
TrajectorySample run_asd(const LabeledGraph& g, const UpdateKernel& kernel, const std::vector<int>& initial,
                         const SimConfig& cfg, std::uint64_t run_id = 0, SimState* final_state = nullptr);

using GraphFactory = std::function<LabeledGraph(Rng&)>;
using InitialFactory = std::function<std::vector<int>(const LabeledGraph&, Rng&)>;

RunEnsembleSummary run_ensemble(const LabeledGraph& g, const UpdateKernel& kernel, const InitialFactory& initial,
                                const SimConfig& cfg);
RunEnsembleSummary run_ensemble(const GraphFactory& graphs, const UpdateKernel& kernel,
                                const InitialFactory& initial, const SimConfig& cfg);

struct TransientResult {
  std::vector<double> marginals;            // [node][state]
  std::vector<double> expected_fraction;    // [state], over all nodes
  std::vector<double> expected_class_fraction;  // [class][state]
  double truncation_error = 0.0;
  int terms = 0;
};

// Exact transient law at time t by uniformization; initial states independent
// across nodes with per-node distributions initial[v][s].
TransientResult exact_transient(const LabeledGraph& g, const UpdateKernel& kernel,
                                const std::vector<std::vector<double>>& initial, double t, double gamma = 1.0,
                                double tolerance = 1e-10);

struct ExplorationRecord {
  NodeId root = 0;
  std::vector<NodeId> nodes;          // in order of first appearance
  std::vector<bool> explored;         // parallel to nodes
  std::vector<double> explored_at;    // parallel to nodes; +inf when unexplored
  std::vector<std::pair<NodeId, NodeId>> edges;  // out-edges of explored nodes
  std::vector<std::int64_t> class_edge_counts;   // [a*|A|+a']
  std::size_t node_count() const { return nodes.size(); }
};

ExplorationRecord explore_relevant_neighborhood(const LabeledGraph& g, NodeId v, double t, std::uint64_t seed,
                                                std::optional<double> root_timer = {});
ExplorationRecord explore_relevant_neighborhood(const LabeledGraph& g, NodeId v, double t, Rng& rng,
                                                std::optional<double> root_timer = {});

void write_trajectory_csv(const TrajectorySample& s, std::ostream& out, bool header = true);
void write_summary_csv(const RunEnsembleSummary& s, std::ostream& out);

}  // namespace asd
