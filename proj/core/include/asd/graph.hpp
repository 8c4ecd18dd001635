#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "asd/rng.hpp"
#include "asd/types.hpp"

namespace asd {

// Immutable directed multigraph with node labels. Out-edges are stored in CSR
// form; per-node degree vectors (indexed by the label of the other endpoint)
// are cached.
class LabeledGraph {
 public:
  LabeledGraph() = default;
  LabeledGraph(LabelSet labels, std::vector<std::uint16_t> label_of,
               const std::vector<NodeId>& tails, const std::vector<NodeId>& heads);

  NodeId n() const { return static_cast<NodeId>(label_.size()); }
  std::int64_t edge_count() const { return static_cast<std::int64_t>(heads_.size()); }
  const LabelSet& labels() const { return labels_; }
  std::size_t num_labels() const { return labels_.size(); }

  std::size_t label_of(NodeId v) const { return label_[static_cast<std::size_t>(v)]; }
  std::span<const std::uint16_t> label_array() const { return label_; }

  std::span<const NodeId> out_edges(NodeId v) const {
    auto b = offsets_[static_cast<std::size_t>(v)];
    auto e = offsets_[static_cast<std::size_t>(v) + 1];
    return {heads_.data() + b, static_cast<std::size_t>(e - b)};
  }
  std::int32_t out_total(NodeId v) const {
    return static_cast<std::int32_t>(offsets_[static_cast<std::size_t>(v) + 1] -
                                     offsets_[static_cast<std::size_t>(v)]);
  }
  std::int32_t in_total(NodeId v) const { return in_total_[static_cast<std::size_t>(v)]; }

  // Entry a of out_degree(v): out-neighbors with label a; of in_degree(v):
  // in-neighbors with label a.
  std::span<const std::int32_t> out_degree(NodeId v) const {
    return {out_deg_.data() + static_cast<std::size_t>(v) * labels_.size(), labels_.size()};
  }
  std::span<const std::int32_t> in_degree(NodeId v) const {
    return {in_deg_.data() + static_cast<std::size_t>(v) * labels_.size(), labels_.size()};
  }
  DegreeVector out_degree_vec(NodeId v) const;
  DegreeVector in_degree_vec(NodeId v) const;

  // Flattened |A|x|A| matrix; entry [a*|A|+a'] counts edges from class a to class a'.
  std::vector<std::int64_t> class_edge_counts() const;
  std::vector<std::int64_t> class_sizes() const;

 private:
  LabelSet labels_;
  std::vector<std::uint16_t> label_;
  std::vector<std::int64_t> offsets_{0};
  std::vector<NodeId> heads_;
  std::vector<std::int32_t> out_deg_;
  std::vector<std::int32_t> in_deg_;
  std::vector<std::int32_t> in_total_;
};

struct StatCell {
  DegreeVector d;
  DegreeVector k;
  std::size_t label = 0;
  double prob = 0.0;
};

struct WeightedDegree {
  DegreeVector k;
  double prob = 0.0;
};

// Ensemble description p_{d,k,a} with initial-state conditionals p_{s|a}.
class NodeStatistics {
 public:
  NodeStatistics() = default;
  NodeStatistics(LabelSet labels, std::vector<StatCell> cells,
                 std::vector<std::string> states = {},
                 std::vector<std::vector<double>> p_s_given_a = {});

  const LabelSet& labels() const { return labels_; }
  std::size_t num_labels() const { return labels_.size(); }
  const std::vector<StatCell>& cells() const { return cells_; }
  const std::vector<std::string>& states() const { return states_; }
  const std::vector<std::vector<double>>& p_s_given_a() const { return p_s_given_a_; }

  double p_label(std::size_t a) const { return p_label_.at(a); }
  // l_{a,a'}/n: expected number of edges from class a to class a' per node.
  double edge_density(std::size_t a, std::size_t a2) const {
    return edge_density_.at(a * labels_.size() + a2);
  }
  double edge_count(std::size_t a, std::size_t a2, double n) const { return n * edge_density(a, a2); }
  double mean_degree() const;

  // p_{k|a}, aggregated over d; support sorted by (total degree, lexicographic).
  std::vector<WeightedDegree> k_given_a(std::size_t a) const;
  // q^{parent}_{k|child}: out-degree law of a child-labelled node reached from a parent-labelled one.
  std::vector<WeightedDegree> q_k(std::size_t parent, std::size_t child) const;
  // q^{parent}_{d,k|child} over the cells of class child; probabilities in cell.prob.
  std::vector<StatCell> q_dk(std::size_t parent, std::size_t child) const;
  bool has_q(std::size_t parent, std::size_t child) const { return edge_density(parent, child) > 0.0; }

  NodeStatistics with_initial_states(std::vector<std::string> states,
                                     std::vector<std::vector<double>> p_s_given_a) const;

  std::string to_json() const;
  static NodeStatistics from_json(const std::string& text);

 private:
  LabelSet labels_;
  std::vector<StatCell> cells_;
  std::vector<std::string> states_;
  std::vector<std::vector<double>> p_s_given_a_;
  std::vector<double> p_label_;
  std::vector<double> edge_density_;
};

// Statistics of a regular out/in-degree k graph whose labels are assigned
// independently of degrees with the given fractions.
NodeStatistics regular_statistics(int k, const std::vector<double>& label_fractions,
                                  LabelSet labels = {});

struct PowerLawSpec {
  double beta = 2.5;
  int k_max = 100;
  std::optional<double> delta;
  std::optional<double> zeta;
};

struct PowerLawSequence {
  std::vector<std::int32_t> out_degree;
  std::vector<std::int32_t> in_degree;
  bool regime_checked = false;
  bool regime_ok = false;
};

double powerlaw_mean(const PowerLawSpec& spec);

struct InitialStateRule {
  std::vector<std::string> states;
  std::vector<std::vector<double>> fraction_per_class;
  std::vector<int> per_node;
};

LabeledGraph sample_configuration_model(const NodeStatistics& stats, NodeId n, std::uint64_t seed);

// Uniform matching within every (a,a') stub class for explicit per-node degree
// vectors (flattened n x |A|). Stub totals must balance.
LabeledGraph match_degree_sequence(const LabelSet& labels, std::vector<std::uint16_t> label_of,
                                   const std::vector<std::int32_t>& in_deg,
                                   const std::vector<std::int32_t>& out_deg, Rng& rng);

LabeledGraph sample_cbm(const std::vector<NodeId>& community_sizes,
                        const std::vector<std::vector<double>>& edge_means, NodeId n,
                        std::uint64_t seed, std::vector<std::string> names = {});
LabeledGraph sample_regular(int k, NodeId n, std::uint64_t seed);
PowerLawSequence sample_powerlaw_sequence(const PowerLawSpec& spec, NodeId n, std::uint64_t seed);
LabeledGraph graph_from_sequence(const PowerLawSequence& seq, std::uint64_t seed);

struct LoadedGraph {
  LabeledGraph graph;
  std::vector<std::int64_t> original_ids;
};

LoadedGraph load_edge_list(std::istream& edges, const std::map<std::int64_t, std::string>* label_map = nullptr);
LoadedGraph load_edge_list(const std::string& path, const std::optional<std::string>& label_map_path = {});
std::map<std::int64_t, std::string> load_label_map(std::istream& in);
void write_edge_list(const LabeledGraph& g, std::ostream& out);
void write_id_mapping(const LoadedGraph& g, std::ostream& out);

NodeStatistics extract_statistics(const LabeledGraph& g, const InitialStateRule& rule = {});

// I.i.d. initial states from p_{s|a}.
std::vector<int> draw_initial_states(const LabeledGraph& g,
                                     const std::vector<std::vector<double>>& p_s_given_a, Rng& rng);
// Exactly counts[a][s] nodes of class a in state s, placed uniformly at random;
// the remaining nodes of the class get state fill_state.
std::vector<int> place_initial_states(const LabeledGraph& g,
                                      const std::vector<std::vector<std::int64_t>>& counts,
                                      int fill_state, Rng& rng);

}  // namespace asd
