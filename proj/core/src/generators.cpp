#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "asd/errors.hpp"
#include "asd/graph.hpp"

namespace asd {

LabeledGraph match_degree_sequence(const LabelSet& labels, std::vector<std::uint16_t> label_of,
                                   const std::vector<std::int32_t>& in_deg, const std::vector<std::int32_t>& out_deg,
                                   Rng& rng) {
  const std::size_t A = labels.size();
  const std::size_t n = label_of.size();
  if (in_deg.size() != n * A || out_deg.size() != n * A)
    throw std::invalid_argument("degree arrays must have n*|A| entries");

  std::vector<std::vector<NodeId>> members(A);
  for (std::size_t v = 0; v < n; ++v) members[label_of[v]].push_back(static_cast<NodeId>(v));

  std::int64_t total = std::accumulate(out_deg.begin(), out_deg.end(), std::int64_t{0});
  std::vector<NodeId> tails, heads;
  tails.reserve(static_cast<std::size_t>(total));
  heads.reserve(static_cast<std::size_t>(total));
  std::vector<NodeId> stubs;
  for (std::size_t a = 0; a < A; ++a) {
    for (std::size_t b = 0; b < A; ++b) {
      auto first = tails.size();
      for (NodeId v : members[a])
        for (std::int32_t i = 0; i < out_deg[static_cast<std::size_t>(v) * A + b]; ++i) tails.push_back(v);
      stubs.clear();
      for (NodeId w : members[b])
        for (std::int32_t i = 0; i < in_deg[static_cast<std::size_t>(w) * A + a]; ++i) stubs.push_back(w);
      if (stubs.size() != tails.size() - first)
        throw UnbalancedStatistics("stub counts differ for label pair " + labels.name(a) + "->" + labels.name(b) +
                                   ": " + std::to_string(tails.size() - first) + " out vs " +
                                   std::to_string(stubs.size()) + " in");
      Rng pair_rng = rng.split(a * A + b);
      shuffle(stubs.begin(), stubs.end(), pair_rng);
      heads.insert(heads.end(), stubs.begin(), stubs.end());
    }
  }
  return LabeledGraph(labels, std::move(label_of), tails, heads);
}

LabeledGraph sample_configuration_model(const NodeStatistics& stats, NodeId n, std::uint64_t seed) {
  if (n < 0) throw std::invalid_argument("negative node count");
  const std::size_t A = stats.num_labels();
  const auto& cells = stats.cells();
  Rng root(seed);

  // Largest-remainder rounding of n*p per cell.
  std::vector<std::int64_t> count(cells.size());
  std::vector<double> frac(cells.size());
  std::int64_t assigned = 0;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    double target = cells[i].prob * n;
    count[i] = static_cast<std::int64_t>(std::floor(target));
    frac[i] = target - static_cast<double>(count[i]);
    assigned += count[i];
  }
  std::vector<std::size_t> order(cells.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return frac[x] > frac[y]; });
  for (std::size_t i = 0; assigned < n && i < order.size(); ++i, ++assigned) ++count[order[i]];

  std::vector<std::size_t> node_cell;
  node_cell.reserve(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < cells.size(); ++i)
    for (std::int64_t j = 0; j < count[i]; ++j) node_cell.push_back(i);
  Rng assign_rng = root.split(0);
  shuffle(node_cell.begin(), node_cell.end(), assign_rng);

  const auto nn = static_cast<std::size_t>(n);
  std::vector<std::uint16_t> label_of(nn);
  std::vector<std::int32_t> in_deg(nn * A), out_deg(nn * A);
  std::vector<std::vector<NodeId>> members(A);
  for (std::size_t v = 0; v < nn; ++v) {
    const auto& c = cells[node_cell[v]];
    label_of[v] = static_cast<std::uint16_t>(c.label);
    members[c.label].push_back(static_cast<NodeId>(v));
    for (std::size_t b = 0; b < A; ++b) {
      in_deg[v * A + b] = c.d[b];
      out_deg[v * A + b] = c.k[b];
    }
  }

  // Repair residual stub imbalance per (a,b) by incrementing uniformly chosen nodes.
  Rng repair_rng = root.split(1);
  const double budget = std::sqrt(static_cast<double>(n));
  for (std::size_t a = 0; a < A; ++a) {
    for (std::size_t b = 0; b < A; ++b) {
      std::int64_t out = 0, in = 0;
      for (NodeId v : members[a]) out += out_deg[static_cast<std::size_t>(v) * A + b];
      for (NodeId w : members[b]) in += in_deg[static_cast<std::size_t>(w) * A + a];
      std::int64_t diff = out - in;
      if (diff == 0) continue;
      if (static_cast<double>(std::llabs(diff)) > budget)
        throw UnbalancedStatistics("stub imbalance " + std::to_string(diff) + " for label pair " +
                                   stats.labels().name(a) + "->" + stats.labels().name(b) + " exceeds repair budget");
      const auto& side = diff < 0 ? members[a] : members[b];
      if (side.empty())
        throw UnbalancedStatistics("no node available to repair label pair " + stats.labels().name(a) + "->" +
                                   stats.labels().name(b));
      for (std::int64_t i = 0; i < std::llabs(diff); ++i) {
        auto v = static_cast<std::size_t>(side[repair_rng.below(side.size())]);
        if (diff < 0)
          ++out_deg[v * A + b];
        else
          ++in_deg[v * A + a];
      }
    }
  }
  Rng match_rng = root.split(2);
  return match_degree_sequence(stats.labels(), std::move(label_of), in_deg, out_deg, match_rng);
}

LabeledGraph sample_cbm(const std::vector<NodeId>& community_sizes, const std::vector<std::vector<double>>& edge_means,
                        NodeId n, std::uint64_t seed, std::vector<std::string> names) {
  const std::size_t K = community_sizes.size();
  if (K == 0) throw std::invalid_argument("need at least one community");
  if (edge_means.size() != K) throw std::invalid_argument("edge mean matrix must be K x K");
  std::int64_t total = 0;
  for (auto s : community_sizes) {
    if (s < 0) throw std::invalid_argument("negative community size");
    total += s;
  }
  if (total != n) throw std::invalid_argument("community sizes must sum to n");
  if (names.empty())
    for (std::size_t i = 0; i < K; ++i) names.push_back("c" + std::to_string(i));
  LabelSet labels(std::move(names));
  if (labels.size() != K) throw std::invalid_argument("one name per community required");

  const auto nn = static_cast<std::size_t>(n);
  std::vector<std::uint16_t> label_of(nn);
  std::vector<std::vector<NodeId>> members(K);
  {
    std::size_t v = 0;
    for (std::size_t i = 0; i < K; ++i)
      for (NodeId j = 0; j < community_sizes[i]; ++j, ++v) {
        label_of[v] = static_cast<std::uint16_t>(i);
        members[i].push_back(static_cast<NodeId>(v));
      }
  }

  Rng root(seed);
  Rng degree_rng = root.split(0);
  Rng place_rng = root.split(1);
  std::vector<std::int32_t> in_deg(nn * K, 0), out_deg(nn * K, 0);
  for (std::size_t i = 0; i < K; ++i) {
    if (edge_means[i].size() != K) throw std::invalid_argument("edge mean matrix must be K x K");
    for (std::size_t j = 0; j < K; ++j) {
      double mean = edge_means[i][j];
      if (!(mean >= 0.0)) throw std::invalid_argument("edge means must be nonnegative");
      if (mean == 0.0 || members[i].empty()) continue;
      std::int64_t trials = community_sizes[j] - (i == j ? 1 : 0);
      if (trials <= 0 || mean > static_cast<double>(trials))
        throw std::invalid_argument("edge mean exceeds the number of possible targets");
      std::binomial_distribution<std::int32_t> dist(static_cast<std::int32_t>(trials), mean / static_cast<double>(trials));
      std::int64_t stubs = 0;
      for (NodeId v : members[i]) {
        auto k = dist(degree_rng);
        out_deg[static_cast<std::size_t>(v) * K + j] = k;
        stubs += k;
      }
      // In-stubs of the pair land on uniformly chosen members of the target class.
      for (std::int64_t s = 0; s < stubs; ++s) {
        auto w = static_cast<std::size_t>(members[j][place_rng.below(members[j].size())]);
        ++in_deg[w * K + i];
      }
    }
  }
  Rng match_rng = root.split(2);
  return match_degree_sequence(labels, std::move(label_of), in_deg, out_deg, match_rng);
}

LabeledGraph sample_regular(int k, NodeId n, std::uint64_t seed) {
  if (k < 0 || n < 0) throw std::invalid_argument("degree and node count must be nonnegative");
  const auto nn = static_cast<std::size_t>(n);
  std::vector<std::int32_t> deg(nn, k);
  Rng rng = Rng(seed).split(2);
  return match_degree_sequence(LabelSet{}, std::vector<std::uint16_t>(nn, 0), deg, deg, rng);
}

double powerlaw_mean(const PowerLawSpec& spec) {
  double num = 0.0, den = 0.0;
  for (int k = 1; k <= spec.k_max; ++k) {
    double w = std::pow(static_cast<double>(k), -spec.beta);
    num += k * w;
    den += w;
  }
  return num / den;
}

PowerLawSequence sample_powerlaw_sequence(const PowerLawSpec& spec, NodeId n, std::uint64_t seed) {
  if (!(spec.beta > 2.0)) throw InvalidSpec("power-law exponent must exceed 2");
  if (spec.k_max < 1) throw InvalidSpec("k_max must be at least 1");
  if (n < 0) throw std::invalid_argument("negative node count");
  std::vector<double> cdf(static_cast<std::size_t>(spec.k_max));
  double acc = 0.0;
  for (int k = 1; k <= spec.k_max; ++k) cdf[static_cast<std::size_t>(k - 1)] = acc += std::pow(k, -spec.beta);
  for (auto& c : cdf) c /= acc;

  Rng root(seed);
  Rng draw_rng = root.split(0);
  PowerLawSequence seq;
  seq.out_degree.resize(static_cast<std::size_t>(n));
  for (auto& k : seq.out_degree) {
    double u = draw_rng.uniform();
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) --it;
    k = static_cast<std::int32_t>(it - cdf.begin()) + 1;
  }
  // The in-sequence is a uniform permutation of the out-sequence, so the stub sums agree exactly.
  seq.in_degree = seq.out_degree;
  Rng perm_rng = root.split(1);
  shuffle(seq.in_degree.begin(), seq.in_degree.end(), perm_rng);

  if (spec.delta && spec.zeta) {
    seq.regime_checked = true;
    seq.regime_ok = *spec.zeta < std::min((1.0 - *spec.delta) / 2.0, 1.0 / (spec.beta - 1.0));
  }
  return seq;
}

LabeledGraph graph_from_sequence(const PowerLawSequence& seq, std::uint64_t seed) {
  Rng rng = Rng(seed).split(2);
  return match_degree_sequence(LabelSet{}, std::vector<std::uint16_t>(seq.out_degree.size(), 0), seq.in_degree,
                               seq.out_degree, rng);
}

}  // namespace asd
