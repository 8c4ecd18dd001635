#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "asd/graph.hpp"
#include "asd/meanfield.hpp"
#include "asd/rng.hpp"

namespace asd {

// Time-t truncation of the labeled branching process. Node 0 is the root.
struct TruncatedTree {
  std::vector<std::uint16_t> label;
  std::vector<std::int64_t> parent;   // -1 for the root
  std::vector<double> explored_at;    // +inf when unexplored
  std::vector<std::int64_t> edge_counts;  // W[b*|A|+a]: edges from label b to label a
  std::size_t labels = 1;

  std::size_t node_count() const { return label.size(); }
  std::int64_t edges() const { return static_cast<std::int64_t>(label.size()) - 1; }
};

enum class RootLaw {
  uniform,      // root label from p_a, out-degree from p_{k|a}
  edge_biased,  // root reached along a uniform edge: (b,a) by edge density, out-degree from q^b_{k|a}
};

class TreeSampler {
 public:
  explicit TreeSampler(const NodeStatistics& stats, std::size_t node_budget = 10'000'000);

  TruncatedTree sample(double t, Rng& rng, std::optional<double> root_timer = {},
                       RootLaw root = RootLaw::uniform) const;
  std::size_t labels() const { return A_; }

 private:
  struct Law {
    std::vector<DegreeVector> k;
    std::vector<double> cum;
    bool empty() const { return k.empty(); }
    const DegreeVector& draw(Rng& rng) const;
  };
  static Law make_law(const std::vector<WeightedDegree>& w);
  std::size_t A_;
  std::size_t budget_;
  std::vector<double> label_cum_;
  std::vector<double> pair_cum_;  // over b*A+a by edge density
  std::vector<Law> p_;             // per label
  std::vector<Law> q_;             // per (b*A+a): parent b, child a
};

TruncatedTree sample_truncated_tree(const NodeStatistics& stats, double t, std::uint64_t seed,
                                    std::optional<double> root_timer = {});

// Parent-array text dump: one line per node, "id parent label explored_at".
void write_tree(const TruncatedTree& tree, std::ostream& out);

// Wilson score interval for a binomial proportion.
struct Interval {
  double lo = 0.0, hi = 1.0;
};
Interval wilson_interval(std::size_t successes, std::size_t trials, double z = 3.0);

// Monte Carlo tail estimates of W^{b,a}_t and of the tree node count.
struct TailEstimate {
  std::size_t labels = 1;
  std::size_t trials = 0;
  double t = 0.0;
  double z = 3.0;
  std::vector<std::vector<std::int64_t>> edge_samples;  // per b*|A|+a, sorted
  std::vector<std::int64_t> node_samples;               // sorted

  // P(W^{b,a} > x): point estimate and Wilson upper confidence bound.
  double tail(std::size_t b, std::size_t a, double x) const;
  double tail_upper(std::size_t b, std::size_t a, double x) const;
  double node_tail(double x) const;
  double node_tail_upper(double x) const;
};

TailEstimate estimate_tails(const NodeStatistics& stats, double t, std::size_t trials, std::uint64_t seed,
                            double z = 3.0);

struct BoundTerm {
  std::string name;
  double value = 0.0;
};

struct TopologicalBound {
  std::string form;                 // general | classical
  double value = 0.0;               // tails at their Wilson upper bounds
  double value_point = 0.0;         // tails at their point estimates
  std::vector<double> cuts;         // x_{b,a} at [b*|A|+a]; one entry for the classical form
  std::vector<BoundTerm> terms;
};

// General form: sum over (a,b) with l_{b,a} > 0 of the tail, same-class pairing and
// cross-class pairing terms. Empty cuts: grid search over x_{b,a} in {2^j}.
TopologicalBound topological_bound(const NodeStatistics& stats, double n, const TailEstimate& tails,
                                   std::vector<double> cuts = {}, int max_power = 30);
// Single-class form: F_{nodes}(x) + sum_{d,k} d q_{d,k} x(x+1) / (2 n dbar).
TopologicalBound topological_bound_classical(const NodeStatistics& stats, double n, const TailEstimate& tails,
                                             std::optional<double> cut = {}, int max_power = 30);

struct ConcentrationInputs {
  double n = 0.0;
  double t = 0.0;
  double eta = 0.1;
  double eps = 1.0;
  double x = 1.0;
  double s = 1.0;
  double mean_degree = 1.0;
  double moment = 1.0;  // E_v |V_t^v|^s, v drawn proportionally to in-degree
};

struct ConcentrationBound {
  double value = 0.0;
  std::vector<BoundTerm> terms;  // six terms in display order
  std::size_t dominant = 0;
};

// sum_w |delta_w| E|V_t^w|^s is evaluated as n * dbar * moment.
ConcentrationBound concentration_bound(const ConcentrationInputs& in);

// x = n^{4/9}, s = 3.
ConcentrationInputs corollary_parameters(double n, double t, double eta, double eps, double mean_degree,
                                         double third_moment);

struct MomentEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t trials = 0;
};

// E|V_t|^s of the truncated tree node count.
MomentEstimate tree_size_moment(const NodeStatistics& stats, double t, double s, std::size_t trials,
                                std::uint64_t seed, RootLaw root = RootLaw::edge_biased);

struct OdeDistanceInputs {
  double zeta_gap0 = 0.0;
  double y_gap0 = 0.0;
  double L = 1.0;
  double M = 1.0;
  double delta = 0.1;
  int m = 10;
  double tv_q = 0.0;
  double tv_p = 0.0;
};

struct OdeDistanceBound {
  double zeta = 0.0;
  double y = 0.0;
  double horizon = 0.0;  // m * delta
};

// Throws InvalidStep when delta * L >= 1 or delta >= 1.
OdeDistanceBound ode_distance_bound(const OdeDistanceInputs& in);

// Total variation distance (half L1) between finite laws on degree vectors.
double tv_distance(const std::vector<WeightedDegree>& p, const std::vector<WeightedDegree>& q);
// Largest TV over labels of p_{k|a}, and over defined pairs of q^b_{k|a}.
double stats_tv_p(const NodeStatistics& x, const NodeStatistics& y);
double stats_tv_q(const NodeStatistics& x, const NodeStatistics& y);

struct LipschitzEstimate {
  double L = 0.0;  // for phi(z) - z
  double M = 0.0;  // for psi(z)
  std::string method;
};

LipschitzEstimate estimate_lipschitz(const MeanField& mf, std::size_t samples, std::uint64_t seed,
                                     double h = 1e-4);

// Galton-Watson total progeny up to generation h.
struct GwMoment {
  int h = 0;
  int s = 1;
  double mean = 0.0;
  double std_error = 0.0;
  double envelope = 0.0;  // mu_s * mu_1^{s(h-1)}
  double ratio = 0.0;
};

GwMoment gw_moment_probe(const std::vector<double>& offspring_pmf, int h, int s, std::size_t trials,
                         std::uint64_t seed);

// Coupled generation of the relevant neighborhood N_t in a fresh configuration-model
// draw with the degree sequence of g and of the truncated tree T_t.
struct CouplingTrace {
  NodeId root = 0;
  bool b1 = false;
  bool b2 = false;
  bool equal = false;
  std::size_t graph_nodes = 0;
  std::size_t tree_nodes = 0;
  std::vector<std::int64_t> graph_edges;  // per class a*|A|+a'
  std::vector<std::int64_t> tree_edges;
};

class CouplingRunner {
 public:
  explicit CouplingRunner(const LabeledGraph& g);
  CouplingTrace run(double t, Rng& rng) const;

 private:
  const LabeledGraph& g_;
  std::size_t A_;
  std::vector<std::vector<NodeId>> stub_owner_;  // per a*A+a': in-stub -> node
};

CouplingTrace run_coupling(const LabeledGraph& g, double t, std::uint64_t seed);

struct CouplingSummary {
  std::size_t trials = 0;
  std::size_t unequal = 0;
  std::size_t b1b2 = 0;
  std::size_t violations = 0;  // B1 and B2 but not equal
  double rate = 0.0;           // empirical P(N_t != T_t)
  Interval ci;
};

CouplingSummary run_coupling_batch(const LabeledGraph& g, double t, std::size_t trials, std::uint64_t seed,
                                   double z = 3.0);

void write_terms_csv(const std::vector<BoundTerm>& terms, std::ostream& out);

}  // namespace asd
