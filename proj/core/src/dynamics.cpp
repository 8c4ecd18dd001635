#include "asd/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "asd/errors.hpp"
#include "json.hpp"

namespace asd {

std::int64_t NeighborCounts::column(std::size_t x) const {
  std::int64_t s = 0;
  for (std::size_t a = 0; a < labels_; ++a) s += data_[a * states_ + x];
  return s;
}

std::int64_t NeighborCounts::row_total(std::size_t a) const {
  std::int64_t s = 0;
  for (std::size_t x = 0; x < states_; ++x) s += data_[a * states_ + x];
  return s;
}

std::int64_t NeighborCounts::total() const {
  std::int64_t s = 0;
  for (auto v : data_) s += v;
  return s;
}

void NeighborCounts::clear() { std::fill(data_.begin(), data_.end(), 0); }

void UpdateKernel::check_states(const StateSet& s) const {
  if (s.size() != states().size())
    throw StateMismatch(name() + " kernel needs " + std::to_string(states().size()) + " states, got " +
                        std::to_string(s.size()));
  if (s.names() != states().names()) throw StateMismatch(name() + " kernel state names differ from the state set");
}

std::vector<double> evaluate(const UpdateKernel& kernel, std::size_t label, const NeighborCounts& xi) {
  if (xi.states() != kernel.states().size())
    throw StateMismatch("neighbor counts have " + std::to_string(xi.states()) + " state columns, kernel " +
                        kernel.name() + " expects " + std::to_string(kernel.states().size()));
  std::vector<double> out(kernel.states().size());
  kernel.evaluate(label, xi, out);
  return out;
}

namespace {

template <class T>
const T& per_label(const std::vector<T>& v, std::size_t label) {
  if (v.size() == 1) return v[0];
  if (label >= v.size()) throw std::out_of_range("kernel has no parameters for label " + std::to_string(label));
  return v[label];
}

class TltmKernel final : public UpdateKernel {
 public:
  explicit TltmKernel(std::vector<TltmThresholds> t) : thresholds_(std::move(t)) {
    if (thresholds_.empty()) throw std::invalid_argument("TLTM needs thresholds");
    for (const auto& th : thresholds_)
      if (th.a_plus < 1 || th.a_minus < 1) throw std::invalid_argument("TLTM thresholds must be at least 1");
  }
  const StateSet& states() const override { return states_; }
  std::string name() const override { return "tltm"; }
  bool label_aggregated() const override { return true; }
  bool deterministic_with_ties() const override { return true; }
  void evaluate(std::size_t label, const NeighborCounts& xi, std::span<double> out) const override {
    const auto& th = per_label(thresholds_, label);
    auto s = xi.column(2) - xi.column(0);
    out[0] = out[1] = out[2] = 0.0;
    if (s >= th.a_plus)
      out[2] = 1.0;
    else if (s <= -th.a_minus)
      out[0] = 1.0;
    else
      out[1] = 1.0;
  }

 private:
  std::vector<TltmThresholds> thresholds_;
  StateSet states_{"-1", "0", "1"};
};

class BrcaKernel final : public UpdateKernel {
 public:
  explicit BrcaKernel(std::vector<bool> c) : coordinating_(std::move(c)) {
    if (coordinating_.empty()) throw std::invalid_argument("BRCA needs at least one flag");
  }
  const StateSet& states() const override { return states_; }
  std::string name() const override { return "brca"; }
  bool label_aggregated() const override { return true; }
  bool deterministic_with_ties() const override { return true; }
  void evaluate(std::size_t label, const NeighborCounts& xi, std::span<double> out) const override {
    bool coord = coordinating_.size() == 1 ? coordinating_[0] : per_label_flag(label);
    auto minus = xi.column(0), plus = xi.column(1);
    if (plus == minus) {
      out[0] = out[1] = 0.5;
      return;
    }
    bool plus_majority = plus > minus;
    bool pick_plus = coord ? plus_majority : !plus_majority;
    out[0] = pick_plus ? 0.0 : 1.0;
    out[1] = pick_plus ? 1.0 : 0.0;
  }

 private:
  bool per_label_flag(std::size_t label) const {
    if (label >= coordinating_.size()) throw std::out_of_range("kernel has no parameters for label " + std::to_string(label));
    return coordinating_[label];
  }
  std::vector<bool> coordinating_;
  StateSet states_{"-1", "1"};
};

class ErgKernel final : public UpdateKernel {
 public:
  ErgKernel(double b, double c) : b_(b), c_(c) {
    if (!(b >= 0.0) || !(c > b)) throw InvalidPayoff("ERG payoffs need c > b >= 0");
  }
  const StateSet& states() const override { return states_; }
  std::string name() const override { return "erg"; }
  bool label_aggregated() const override { return true; }
  bool deterministic_with_ties() const override { return true; }
  void evaluate(std::size_t, const NeighborCounts& xi, std::span<double> out) const override {
    double r = static_cast<double>(xi.column(0));
    double p = static_cast<double>(xi.column(1));
    double s = static_cast<double>(xi.column(2));
    double pay[3] = {b_ * r + c_ * s, c_ * r + b_ * p, c_ * p + b_ * s};
    double best = std::max({pay[0], pay[1], pay[2]});
    double tol = 1e-12 * std::max({std::abs(pay[0]), std::abs(pay[1]), std::abs(pay[2])});
    int winners = 0;
    for (double x : pay) winners += (best - x <= tol) ? 1 : 0;
    for (int i = 0; i < 3; ++i) out[i] = (best - pay[i] <= tol) ? 1.0 / winners : 0.0;
  }

 private:
  double b_, c_;
  StateSet states_{"R", "P", "S"};
};

class TableKernel final : public UpdateKernel {
 public:
  TableKernel(StateSet states, std::vector<std::vector<TableRow>> rows) : states_(std::move(states)) {
    for (const auto& label_rows : rows) {
      std::map<std::vector<std::int32_t>, std::vector<double>> table;
      for (const auto& row : label_rows) {
        if (row.prob.size() != states_.size()) throw MalformedRow("row probability vector has wrong length");
        double s = 0.0;
        for (double x : row.prob) {
          if (!(x >= 0.0 && x <= 1.0)) throw MalformedRow("row entry outside [0,1]");
          s += x;
        }
        if (std::abs(s - 1.0) > 1e-12) throw MalformedRow("row sums to " + std::to_string(s));
        if (!table.emplace(row.xi, row.prob).second) throw MalformedRow("duplicate xi row");
      }
      tables_.push_back(std::move(table));
    }
  }
  const StateSet& states() const override { return states_; }
  std::string name() const override { return "table"; }
  void evaluate(std::size_t label, const NeighborCounts& xi, std::span<double> out) const override {
    const std::map<std::vector<std::int32_t>, std::vector<double>>* table = nullptr;
    if (tables_.size() == 1)
      table = &tables_[0];
    else if (label < tables_.size())
      table = &tables_[label];
    if (table) {
      auto d = xi.data();
      auto it = table->find(std::vector<std::int32_t>(d.begin(), d.end()));
      if (it != table->end()) {
        std::copy(it->second.begin(), it->second.end(), out.begin());
        return;
      }
    }
    std::fill(out.begin(), out.end(), 1.0 / static_cast<double>(states_.size()));
  }

 private:
  StateSet states_;
  std::vector<std::map<std::vector<std::int32_t>, std::vector<double>>> tables_;
};

}  // namespace

KernelPtr tltm_kernel(int a_plus, int a_minus) { return tltm_kernel(std::vector<TltmThresholds>{{a_plus, a_minus}}); }
KernelPtr tltm_kernel(std::vector<TltmThresholds> per_label) { return std::make_shared<TltmKernel>(std::move(per_label)); }
KernelPtr brca_kernel(bool coordinating) { return std::make_shared<BrcaKernel>(std::vector<bool>{coordinating}); }
KernelPtr brca_kernel(std::vector<bool> per_label) { return std::make_shared<BrcaKernel>(std::move(per_label)); }
KernelPtr erg_kernel(double b, double c) { return std::make_shared<ErgKernel>(b, c); }

KernelPtr table_kernel(StateSet states, std::vector<std::vector<TableRow>> per_label) {
  return std::make_shared<TableKernel>(std::move(states), std::move(per_label));
}

KernelPtr table_kernel_from_json(const std::string& text) {
  try {
    auto j = nlohmann::json::parse(text);
    StateSet states(j.at("states").get<std::vector<std::string>>());
    std::vector<std::string> labels;
    if (j.contains("labels")) labels = j["labels"].get<std::vector<std::string>>();
    std::size_t count = labels.empty() ? 1 : labels.size();
    const auto& rows = j.at("rows");
    if (labels.empty() && rows.is_array()) {
      std::vector<TableRow> single;
      for (const auto& r : rows) single.push_back({r.at("xi").get<std::vector<std::int32_t>>(), r.at("p").get<std::vector<double>>()});
      return table_kernel(std::move(states), {std::move(single)});
    }
    std::vector<std::vector<TableRow>> per_label(count);
    for (const auto& [key, list] : rows.items()) {
      std::size_t idx = 0;
      if (labels.empty()) {
        idx = static_cast<std::size_t>(std::stoul(key));
        if (idx >= per_label.size()) per_label.resize(idx + 1);
      } else {
        auto it = std::find(labels.begin(), labels.end(), key);
        if (it == labels.end()) throw MalformedRow("table refers to unknown label '" + key + "'");
        idx = static_cast<std::size_t>(it - labels.begin());
      }
      for (const auto& r : list)
        per_label[idx].push_back({r.at("xi").get<std::vector<std::int32_t>>(), r.at("p").get<std::vector<double>>()});
    }
    return table_kernel(std::move(states), std::move(per_label));
  } catch (const nlohmann::json::exception& e) {
    throw MalformedRow(std::string("table kernel document: ") + e.what());
  }
}

}  // namespace asd
