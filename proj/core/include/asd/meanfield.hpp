#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "asd/dynamics.hpp"
#include "asd/graph.hpp"

namespace asd {

// zeta(w|a,b): probability that a node with label a, reached from a parent with
// label b, is in state w. y(w|a): root marginal of a label-a node.
class MeanFieldState {
 public:
  MeanFieldState() = default;
  MeanFieldState(std::size_t labels, std::size_t states);

  std::size_t labels() const { return labels_; }
  std::size_t states() const { return states_; }
  double& zeta(std::size_t w, std::size_t a, std::size_t b) { return zeta_[(a * labels_ + b) * states_ + w]; }
  double zeta(std::size_t w, std::size_t a, std::size_t b) const { return zeta_[(a * labels_ + b) * states_ + w]; }
  double& y(std::size_t w, std::size_t a) { return y_[a * states_ + w]; }
  double y(std::size_t w, std::size_t a) const { return y_[a * states_ + w]; }
  std::vector<double>& zeta_data() { return zeta_; }
  const std::vector<double>& zeta_data() const { return zeta_; }
  std::vector<double>& y_data() { return y_; }
  const std::vector<double>& y_data() const { return y_; }

  // Every zeta block and every y row set to the same distribution.
  static MeanFieldState uniform_blocks(std::size_t labels, const std::vector<double>& dist);
  // zeta(.|a,b) = y(.|a) = p_{s|a} from the statistics.
  static MeanFieldState from_initial_states(const NodeStatistics& stats);

 private:
  std::size_t labels_ = 0;
  std::size_t states_ = 0;
  std::vector<double> zeta_;
  std::vector<double> y_;
};

enum class PhiMode { exact, monte_carlo, automatic };

struct PhiOptions {
  PhiMode mode = PhiMode::automatic;
  std::size_t mc_samples = 100000;
  double budget = 2e5;
  std::uint64_t seed = 0;
};

struct PhiResult {
  std::vector<double> prob;
  std::vector<double> std_error;  // Monte Carlo only
  bool exact = true;
  std::size_t samples = 0;
};

// phi^{(k,a)}: law of the state a label-a node with out-degree vector k adopts
// when its children are i.i.d. with laws zeta(.|c,a).
PhiResult phi_varphi(const DegreeVector& k, std::size_t a, const MeanFieldState& s, const UpdateKernel& kernel,
                     const PhiOptions& opt = {});

struct TruncationReport {
  std::vector<double> p_discarded;  // per label
  std::vector<double> q_discarded;  // per (a,b), child a, parent b
};

// Mixture evaluator over the (truncated, finite) degree laws of a statistics object.
class MeanField {
 public:
  MeanField(const NodeStatistics& stats, KernelPtr kernel, PhiOptions opt = {}, double truncation = 1e-8);

  std::size_t labels() const { return A_; }
  std::size_t states() const { return X_; }
  const UpdateKernel& kernel() const { return *kernel_; }
  const NodeStatistics& statistics() const { return stats_; }
  const TruncationReport& truncation() const { return trunc_; }

  // zeta(.|a,b) evolves iff q^b_{.|a} is defined; otherwise it is frozen.
  bool active(std::size_t a, std::size_t b) const { return active_[a * A_ + b]; }
  bool label_present(std::size_t a) const { return present_[a]; }

  // Fills phi (zeta layout) and psi (y layout) at state s.
  void evaluate(const MeanFieldState& s, MeanFieldState& phi_psi) const;
  // ODE right-hand side; frozen components have derivative 0.
  void rhs(const MeanFieldState& s, MeanFieldState& ds) const;

  std::vector<double> phi_bar(std::size_t a, std::size_t b, const MeanFieldState& s) const;
  std::vector<double> psi_bar(std::size_t a, const MeanFieldState& s) const;

  bool all_exact() const { return all_exact_; }

 private:
  struct Support {
    std::vector<DegreeVector> k;
    std::vector<double> p;               // p_{k|a}
    std::vector<std::vector<double>> q;  // q^b_{k|a} per parent b
  };
  void phi_table(std::size_t a, const MeanFieldState& s, std::vector<double>& out) const;

  NodeStatistics stats_;
  KernelPtr kernel_;
  PhiOptions opt_;
  std::size_t A_ = 0, X_ = 0;
  std::vector<Support> support_;
  std::vector<bool> active_;
  std::vector<bool> present_;
  TruncationReport trunc_;
  bool all_exact_ = true;
  struct Cache;
  std::shared_ptr<Cache> cache_;
};

std::vector<double> phi_bar(std::size_t a, std::size_t b, const MeanFieldState& s, const NodeStatistics& stats,
                            KernelPtr kernel);
std::vector<double> psi_bar(std::size_t a, const MeanFieldState& s, const NodeStatistics& stats, KernelPtr kernel);

struct OdeConfig {
  double h = 0.01;
  double horizon = 10.0;
  double record_dt = 0.0;  // 0: record every step
};

struct OdeTrajectory {
  std::vector<double> times;
  std::vector<MeanFieldState> states;
  std::size_t steps = 0;
  std::size_t renormalizations = 0;
};

OdeTrajectory integrate(const MeanFieldState& init, const MeanField& mf, const OdeConfig& cfg);
OdeTrajectory integrate(const MeanFieldState& init, const NodeStatistics& stats, KernelPtr kernel,
                        const OdeConfig& cfg, const PhiOptions& opt = {});

// Aggregate root marginal over labels: sum_a p_a y(w|a).
std::vector<double> aggregate_y(const MeanFieldState& s, const NodeStatistics& stats);

struct FixedPoint {
  MeanFieldState state;
  double residual = 0.0;
  double max_real_eigenvalue = 0.0;
  std::vector<std::complex<double>> eigenvalues;
  std::string classification;  // stable | unstable | marginal
};

struct StationaryConfig {
  int grid = 11;
  double tol = 1e-10;
  double damping = 0.5;
  int max_iterations = 2000;
  int newton_iterations = 60;
  double dedup = 1e-6;
  double eig_tol = 1e-8;
  double fd_h = 1e-6;
  std::size_t max_seeds = 4096;
  std::uint64_t seed = 0;
};

struct StationaryReport {
  std::vector<FixedPoint> points;
  std::size_t seeds = 0;
  std::size_t failed_seeds = 0;
};

StationaryReport find_stationary(const MeanField& mf, const StationaryConfig& cfg = {});

// Jacobian of the reduced ODE right-hand side (free coordinates: all states but
// the last in every active zeta block) by central differences with step h.
std::vector<std::vector<double>> reduced_jacobian(const MeanField& mf, const MeanFieldState& s, double h);
std::vector<double> reduce_state(const MeanField& mf, const MeanFieldState& s);
MeanFieldState expand_state(const MeanField& mf, const std::vector<double>& u, const MeanFieldState& base);

struct BasinConfig {
  int resolution = 101;
  std::size_t axis_x = 0;
  std::size_t axis_y = 1;
  double horizon = 100.0;
  double h = 0.01;
  double radius = 1e-4;
};

struct BasinMap {
  std::vector<double> xs, ys;  // cell coordinates (ys empty for two-state systems)
  std::vector<int> label;      // index into attractors; -1 undecided or stalled on an unstable point; -2 outside the simplex
  std::vector<FixedPoint> attractors;
};

MeanFieldState basin_seed(const MeanField& mf, const BasinConfig& cfg, double x, double y);
BasinMap map_basins(const MeanField& mf, const StationaryReport& report, const BasinConfig& cfg = {});

// Closed forms for regular out-degree k.
double tltm_phi_plus(int k, int r, double x, double z);
double brca_phi1(int k, double y1);
double brca_rhs(int k, double alpha, double y1);
double brca_alpha_th(int k);
// Fixed points of the BRCA scalar equation on [0,1], ascending.
std::vector<double> brca_fixed_points(int k, double alpha);
// (pi_R, pi_P, pi_S) for children i.i.d. with law y = (y_R, y_P, y_S), payoffs b = c/2.
std::array<double, 3> erg_pi(int k, const std::array<double, 3>& y);

}  // namespace asd
