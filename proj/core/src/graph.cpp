#include "asd/graph.hpp"

#include <stdexcept>

namespace asd {

LabeledGraph::LabeledGraph(LabelSet labels, std::vector<std::uint16_t> label_of,
                           const std::vector<NodeId>& tails, const std::vector<NodeId>& heads)
    : labels_(std::move(labels)), label_(std::move(label_of)) {
  if (tails.size() != heads.size()) throw std::invalid_argument("tail/head arrays differ in length");
  const std::size_t n = label_.size();
  const std::size_t A = labels_.size();
  for (auto a : label_)
    if (a >= A) throw std::invalid_argument("node label out of range");

  offsets_.assign(n + 1, 0);
  for (auto v : tails) {
    if (v < 0 || static_cast<std::size_t>(v) >= n) throw std::invalid_argument("edge tail out of range");
    ++offsets_[static_cast<std::size_t>(v) + 1];
  }
  for (std::size_t v = 0; v < n; ++v) offsets_[v + 1] += offsets_[v];

  heads_.resize(heads.size());
  std::vector<std::int64_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (std::size_t e = 0; e < tails.size(); ++e) {
    auto h = heads[e];
    if (h < 0 || static_cast<std::size_t>(h) >= n) throw std::invalid_argument("edge head out of range");
    heads_[static_cast<std::size_t>(fill[static_cast<std::size_t>(tails[e])]++)] = h;
  }

  out_deg_.assign(n * A, 0);
  in_deg_.assign(n * A, 0);
  in_total_.assign(n, 0);
  for (std::size_t v = 0; v < n; ++v) {
    for (auto e = offsets_[v]; e < offsets_[v + 1]; ++e) {
      auto h = static_cast<std::size_t>(heads_[static_cast<std::size_t>(e)]);
      ++out_deg_[v * A + label_[h]];
      ++in_deg_[h * A + label_[v]];
      ++in_total_[h];
    }
  }
}

DegreeVector LabeledGraph::out_degree_vec(NodeId v) const {
  auto s = out_degree(v);
  return DegreeVector(std::vector<std::int32_t>(s.begin(), s.end()));
}

DegreeVector LabeledGraph::in_degree_vec(NodeId v) const {
  auto s = in_degree(v);
  return DegreeVector(std::vector<std::int32_t>(s.begin(), s.end()));
}

std::vector<std::int64_t> LabeledGraph::class_edge_counts() const {
  const std::size_t A = labels_.size();
  std::vector<std::int64_t> c(A * A, 0);
  for (NodeId v = 0; v < n(); ++v) {
    auto a = label_of(v);
    auto k = out_degree(v);
    for (std::size_t b = 0; b < A; ++b) c[a * A + b] += k[b];
  }
  return c;
}

std::vector<std::int64_t> LabeledGraph::class_sizes() const {
  std::vector<std::int64_t> c(labels_.size(), 0);
  for (auto a : label_) ++c[a];
  return c;
}

}  // namespace asd
