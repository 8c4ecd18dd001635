#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "asd/errors.hpp"
#include "asd/graph.hpp"
#include "combinatorics.hpp"
#include "json.hpp"

namespace asd {

namespace {

constexpr double kSumTolerance = 1e-12;

bool degree_order(const DegreeVector& x, const DegreeVector& y) {
  auto tx = x.total(), ty = y.total();
  if (tx != ty) return tx < ty;
  return x < y;
}

std::vector<WeightedDegree> normalized(const std::map<DegreeVector, double>& acc) {
  double total = 0.0;
  for (const auto& [k, w] : acc) total += w;
  std::vector<WeightedDegree> out;
  if (total <= 0.0) return out;
  for (const auto& [k, w] : acc)
    if (w > 0.0) out.push_back({k, w / total});
  std::sort(out.begin(), out.end(),
            [](const WeightedDegree& x, const WeightedDegree& y) { return degree_order(x.k, y.k); });
  return out;
}

}  // namespace

NodeStatistics::NodeStatistics(LabelSet labels, std::vector<StatCell> cells, std::vector<std::string> states,
                               std::vector<std::vector<double>> p_s_given_a)
    : labels_(std::move(labels)),
      cells_(std::move(cells)),
      states_(std::move(states)),
      p_s_given_a_(std::move(p_s_given_a)) {
  const std::size_t A = labels_.size();
  double total = 0.0;
  p_label_.assign(A, 0.0);
  edge_density_.assign(A * A, 0.0);
  std::vector<double> in_density(A * A, 0.0);
  for (const auto& c : cells_) {
    if (c.d.size() != A || c.k.size() != A) throw std::invalid_argument("degree vector length differs from label count");
    if (c.label >= A) throw std::invalid_argument("cell label out of range");
    if (!(c.prob >= 0.0)) throw InvalidDistribution("negative or NaN cell probability");
    total += c.prob;
    p_label_[c.label] += c.prob;
    for (std::size_t b = 0; b < A; ++b) {
      edge_density_[c.label * A + b] += c.k[b] * c.prob;
      in_density[b * A + c.label] += c.d[b] * c.prob;
    }
  }
  if (std::abs(total - 1.0) > kSumTolerance)
    throw InvalidDistribution("cell probabilities sum to " + std::to_string(total));
  for (std::size_t i = 0; i < A * A; ++i) {
    double scale = std::max(1.0, std::abs(edge_density_[i]));
    if (std::abs(edge_density_[i] - in_density[i]) > 1e-9 * scale)
      throw UnbalancedStatistics("out-stub and in-stub densities differ for label pair " +
                                 labels_.name(i / A) + "->" + labels_.name(i % A));
  }
  if (!p_s_given_a_.empty()) {
    if (p_s_given_a_.size() != A) throw InvalidDistribution("p_s_given_a needs one row per label");
    for (const auto& row : p_s_given_a_) {
      if (row.size() != states_.size()) throw InvalidDistribution("p_s_given_a row length differs from state count");
      double s = 0.0;
      for (double x : row) {
        if (!(x >= 0.0)) throw InvalidDistribution("negative initial-state probability");
        s += x;
      }
      if (std::abs(s - 1.0) > kSumTolerance) throw InvalidDistribution("p_s_given_a row does not sum to 1");
    }
  }
}

double NodeStatistics::mean_degree() const {
  double s = 0.0;
  for (double x : edge_density_) s += x;
  return s;
}

std::vector<WeightedDegree> NodeStatistics::k_given_a(std::size_t a) const {
  std::map<DegreeVector, double> acc;
  for (const auto& c : cells_)
    if (c.label == a) acc[c.k] += c.prob;
  return normalized(acc);
}

std::vector<WeightedDegree> NodeStatistics::q_k(std::size_t parent, std::size_t child) const {
  std::map<DegreeVector, double> acc;
  for (const auto& c : cells_)
    if (c.label == child && c.d[parent] > 0) acc[c.k] += c.d[parent] * c.prob;
  return normalized(acc);
}

std::vector<StatCell> NodeStatistics::q_dk(std::size_t parent, std::size_t child) const {
  std::vector<StatCell> out;
  double total = 0.0;
  for (const auto& c : cells_)
    if (c.label == child && c.d[parent] > 0) {
      out.push_back(c);
      out.back().prob = c.d[parent] * c.prob;
      total += out.back().prob;
    }
  for (auto& c : out) c.prob /= total;
  return out;
}

NodeStatistics NodeStatistics::with_initial_states(std::vector<std::string> states,
                                                   std::vector<std::vector<double>> p_s_given_a) const {
  return NodeStatistics(labels_, cells_, std::move(states), std::move(p_s_given_a));
}

std::string NodeStatistics::to_json() const {
  nlohmann::json j;
  j["labels"] = labels_.names();
  j["states"] = states_;
  auto cells = nlohmann::json::array();
  for (const auto& c : cells_)
    cells.push_back({{"d", c.d.counts}, {"k", c.k.counts}, {"a", labels_.name(c.label)}, {"p", c.prob}});
  j["cells"] = std::move(cells);
  auto ps = nlohmann::json::object();
  for (std::size_t a = 0; a < p_s_given_a_.size(); ++a) ps[labels_.name(a)] = p_s_given_a_[a];
  j["p_s_given_a"] = std::move(ps);
  return j.dump(2);
}

NodeStatistics NodeStatistics::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(e.what(), 0);
  }
  try {
    LabelSet labels(j.at("labels").get<std::vector<std::string>>());
    std::vector<StatCell> cells;
    for (const auto& c : j.at("cells")) {
      StatCell cell;
      cell.d = DegreeVector(c.at("d").get<std::vector<std::int32_t>>());
      cell.k = DegreeVector(c.at("k").get<std::vector<std::int32_t>>());
      cell.label = labels.index(c.at("a").get<std::string>());
      cell.prob = c.at("p").get<double>();
      cells.push_back(std::move(cell));
    }
    std::vector<std::string> states;
    if (j.contains("states")) states = j["states"].get<std::vector<std::string>>();
    std::vector<std::vector<double>> ps;
    if (j.contains("p_s_given_a") && !j["p_s_given_a"].empty()) {
      ps.resize(labels.size());
      for (std::size_t a = 0; a < labels.size(); ++a)
        ps[a] = j["p_s_given_a"].at(labels.name(a)).get<std::vector<double>>();
    }
    return NodeStatistics(std::move(labels), std::move(cells), std::move(states), std::move(ps));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("statistics document: ") + e.what(), 0);
  }
}

NodeStatistics regular_statistics(int k, const std::vector<double>& label_fractions, LabelSet labels) {
  const std::size_t A = label_fractions.size();
  if (A == 0) throw std::invalid_argument("need at least one label fraction");
  if (k < 0) throw std::invalid_argument("negative degree");
  if (labels.size() != A) {
    std::vector<std::string> names;
    for (std::size_t a = 0; a < A; ++a) names.push_back("L" + std::to_string(a));
    labels = LabelSet(names);
  }
  std::vector<std::pair<DegreeVector, double>> vectors;
  detail::for_each_composition(k, A, [&](const std::vector<int>& x) {
    double w = detail::multinomial_pmf(x, label_fractions);
    if (w > 0.0) vectors.push_back({DegreeVector(std::vector<std::int32_t>(x.begin(), x.end())), w});
  });
  std::vector<StatCell> cells;
  double total = 0.0;
  for (std::size_t a = 0; a < A; ++a) {
    if (label_fractions[a] <= 0.0) continue;
    for (const auto& [d, wd] : vectors)
      for (const auto& [kv, wk] : vectors) {
        cells.push_back({d, kv, a, label_fractions[a] * wd * wk});
        total += cells.back().prob;
      }
  }
  for (auto& c : cells) c.prob /= total;
  return NodeStatistics(std::move(labels), std::move(cells));
}

NodeStatistics extract_statistics(const LabeledGraph& g, const InitialStateRule& rule) {
  if (g.n() == 0) throw std::invalid_argument("cannot extract statistics of an empty node set");
  const std::size_t A = g.num_labels();
  std::map<std::tuple<std::size_t, DegreeVector, DegreeVector>, std::int64_t> hist;
  for (NodeId v = 0; v < g.n(); ++v) ++hist[{g.label_of(v), g.in_degree_vec(v), g.out_degree_vec(v)}];
  std::vector<StatCell> cells;
  cells.reserve(hist.size());
  const double n = g.n();
  for (const auto& [key, count] : hist)
    cells.push_back({std::get<1>(key), std::get<2>(key), std::get<0>(key), static_cast<double>(count) / n});

  std::vector<std::vector<double>> ps;
  if (!rule.per_node.empty()) {
    if (rule.per_node.size() != static_cast<std::size_t>(g.n()))
      throw std::invalid_argument("per-node initial states must cover every node");
    ps.assign(A, std::vector<double>(rule.states.size(), 0.0));
    auto sizes = g.class_sizes();
    for (NodeId v = 0; v < g.n(); ++v) {
      auto s = rule.per_node[static_cast<std::size_t>(v)];
      if (s < 0 || static_cast<std::size_t>(s) >= rule.states.size()) throw std::invalid_argument("initial state out of range");
      ps[g.label_of(v)][static_cast<std::size_t>(s)] += 1.0;
    }
    for (std::size_t a = 0; a < A; ++a)
      for (auto& x : ps[a]) x = sizes[a] > 0 ? x / static_cast<double>(sizes[a]) : 1.0 / rule.states.size();
  } else if (!rule.fraction_per_class.empty()) {
    ps = rule.fraction_per_class;
  }
  return NodeStatistics(g.labels(), std::move(cells), rule.states, std::move(ps));
}

std::vector<int> draw_initial_states(const LabeledGraph& g, const std::vector<std::vector<double>>& p_s_given_a,
                                     Rng& rng) {
  if (p_s_given_a.size() != g.num_labels()) throw std::invalid_argument("p_s_given_a needs one row per label");
  std::vector<int> z(static_cast<std::size_t>(g.n()));
  for (NodeId v = 0; v < g.n(); ++v) {
    const auto& row = p_s_given_a[g.label_of(v)];
    double u = rng.uniform();
    std::size_t s = 0;
    double acc = row[0];
    while (u >= acc && s + 1 < row.size()) acc += row[++s];
    z[static_cast<std::size_t>(v)] = static_cast<int>(s);
  }
  return z;
}

std::vector<int> place_initial_states(const LabeledGraph& g, const std::vector<std::vector<std::int64_t>>& counts,
                                      int fill_state, Rng& rng) {
  const std::size_t A = g.num_labels();
  if (counts.size() != A) throw std::invalid_argument("counts need one row per label");
  std::vector<std::vector<NodeId>> members(A);
  for (NodeId v = 0; v < g.n(); ++v) members[g.label_of(v)].push_back(v);
  std::vector<int> z(static_cast<std::size_t>(g.n()), fill_state);
  for (std::size_t a = 0; a < A; ++a) {
    auto& m = members[a];
    shuffle(m.begin(), m.end(), rng);
    std::size_t pos = 0;
    for (std::size_t s = 0; s < counts[a].size(); ++s) {
      if (counts[a][s] < 0) throw std::invalid_argument("negative state count");
      for (std::int64_t i = 0; i < counts[a][s]; ++i) {
        if (pos >= m.size()) throw std::invalid_argument("state counts exceed class size");
        z[static_cast<std::size_t>(m[pos++])] = static_cast<int>(s);
      }
    }
  }
  return z;
}

}  // namespace asd
