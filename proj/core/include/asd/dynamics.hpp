#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "asd/types.hpp"

namespace asd {

// Matrix xi in Z_+^{A x X}: entry (a,x) counts out-neighbors with label a in state x.
class NeighborCounts {
 public:
  NeighborCounts() = default;
  NeighborCounts(std::size_t labels, std::size_t states) : labels_(labels), states_(states), data_(labels * states, 0) {}

  std::size_t labels() const { return labels_; }
  std::size_t states() const { return states_; }
  std::int32_t operator()(std::size_t a, std::size_t x) const { return data_[a * states_ + x]; }
  std::int32_t& operator()(std::size_t a, std::size_t x) { return data_[a * states_ + x]; }
  std::span<const std::int32_t> data() const { return data_; }
  std::span<std::int32_t> data() { return data_; }

  // Aggregated count of state x over all labels.
  std::int64_t column(std::size_t x) const;
  std::int64_t row_total(std::size_t a) const;
  std::int64_t total() const;
  void clear();

 private:
  std::size_t labels_ = 0;
  std::size_t states_ = 0;
  std::vector<std::int32_t> data_;
};

// Stochastic map Theta^(a): neighbor counts -> probability vector over states.
class UpdateKernel {
 public:
  virtual ~UpdateKernel() = default;

  virtual const StateSet& states() const = 0;
  virtual std::string name() const = 0;
  // Writes Theta^(label)(xi) into out (length |X|).
  virtual void evaluate(std::size_t label, const NeighborCounts& xi, std::span<double> out) const = 0;
  // True when Theta depends on xi only through its column sums.
  virtual bool label_aggregated() const { return false; }
  virtual bool deterministic_with_ties() const { return false; }

  void check_states(const StateSet& s) const;
};

using KernelPtr = std::shared_ptr<const UpdateKernel>;

std::vector<double> evaluate(const UpdateKernel& kernel, std::size_t label, const NeighborCounts& xi);

struct TltmThresholds {
  int a_plus = 1;
  int a_minus = 1;
};

// States {-1, 0, 1}.
KernelPtr tltm_kernel(int a_plus, int a_minus);
KernelPtr tltm_kernel(std::vector<TltmThresholds> per_label);

// States {-1, 1}.
KernelPtr brca_kernel(bool coordinating);
KernelPtr brca_kernel(std::vector<bool> coordinating_per_label);

// States {R, P, S}.
KernelPtr erg_kernel(double b = 1.0, double c = 2.0);

struct TableRow {
  std::vector<std::int32_t> xi;
  std::vector<double> prob;
};

// Per-label lookup on the flattened xi; unlisted xi fall back to the uniform vector.
KernelPtr table_kernel(StateSet states, std::vector<std::vector<TableRow>> per_label);
KernelPtr table_kernel_from_json(const std::string& text);

}  // namespace asd
