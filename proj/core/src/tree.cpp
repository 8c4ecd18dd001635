#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "asd/bounds.hpp"
#include "asd/errors.hpp"

namespace asd {

namespace {

std::size_t draw_index(const std::vector<double>& cum, Rng& rng) {
  double u = rng.uniform() * cum.back();
  auto it = std::upper_bound(cum.begin(), cum.end(), u);
  auto i = static_cast<std::size_t>(it - cum.begin());
  return std::min(i, cum.size() - 1);
}

}  // namespace

const DegreeVector& TreeSampler::Law::draw(Rng& rng) const { return k[draw_index(cum, rng)]; }

TreeSampler::Law TreeSampler::make_law(const std::vector<WeightedDegree>& w) {
  Law law;
  double acc = 0.0;
  for (const auto& x : w) {
    if (x.prob <= 0.0) continue;
    acc += x.prob;
    law.k.push_back(x.k);
    law.cum.push_back(acc);
  }
  return law;
}

TreeSampler::TreeSampler(const NodeStatistics& stats, std::size_t node_budget)
    : A_(stats.num_labels()), budget_(node_budget) {
  double acc = 0.0;
  for (std::size_t a = 0; a < A_; ++a) {
    acc += stats.p_label(a);
    label_cum_.push_back(acc);
    p_.push_back(stats.p_label(a) > 0.0 ? make_law(stats.k_given_a(a)) : Law{});
  }
  acc = 0.0;
  q_.resize(A_ * A_);
  for (std::size_t b = 0; b < A_; ++b)
    for (std::size_t a = 0; a < A_; ++a) {
      acc += stats.edge_density(b, a);
      pair_cum_.push_back(acc);
      if (stats.has_q(b, a)) q_[b * A_ + a] = make_law(stats.q_k(b, a));
    }
}

TruncatedTree TreeSampler::sample(double t, Rng& rng, std::optional<double> root_timer, RootLaw root) const {
  if (t < 0.0) throw std::invalid_argument("tree horizon must be nonnegative");
  TruncatedTree tr;
  tr.labels = A_;
  tr.edge_counts.assign(A_ * A_, 0);
  std::vector<const Law*> law;

  std::size_t a0;
  if (root == RootLaw::uniform) {
    a0 = draw_index(label_cum_, rng);
    law.push_back(&p_[a0]);
  } else {
    if (pair_cum_.empty() || pair_cum_.back() <= 0.0) throw std::invalid_argument("statistics have no edges");
    auto pair = draw_index(pair_cum_, rng);
    a0 = pair % A_;
    law.push_back(&q_[pair]);
  }
  tr.label.push_back(static_cast<std::uint16_t>(a0));
  tr.parent.push_back(-1);
  tr.explored_at.push_back(std::numeric_limits<double>::infinity());

  std::vector<std::size_t> unexplored;
  auto explore = [&](std::size_t v, double when) {
    tr.explored_at[v] = when;
    const Law& l = *law[v];
    if (l.empty()) return;
    const auto& k = l.draw(rng);
    const std::size_t a = tr.label[v];
    for (std::size_t c = 0; c < A_; ++c) {
      for (int j = 0; j < k[c]; ++j) {
        if (tr.label.size() >= budget_)
          throw TreeBudgetExceeded("truncated tree exceeded " + std::to_string(budget_) + " nodes", tr.label.size());
        unexplored.push_back(tr.label.size());
        tr.label.push_back(static_cast<std::uint16_t>(c));
        tr.parent.push_back(static_cast<std::int64_t>(v));
        tr.explored_at.push_back(std::numeric_limits<double>::infinity());
        law.push_back(&q_[a * A_ + c]);
        ++tr.edge_counts[a * A_ + c];
      }
    }
  };

  double T = root_timer ? *root_timer : rng.exponential(1.0);
  if (T > t) return tr;
  explore(0, T);
  while (!unexplored.empty()) {
    T += rng.exponential(static_cast<double>(unexplored.size()));
    if (T > t) break;
    auto i = static_cast<std::size_t>(rng.below(unexplored.size()));
    auto v = unexplored[i];
    unexplored[i] = unexplored.back();
    unexplored.pop_back();
    explore(v, T);
  }
  return tr;
}

TruncatedTree sample_truncated_tree(const NodeStatistics& stats, double t, std::uint64_t seed,
                                    std::optional<double> root_timer) {
  TreeSampler sampler(stats);
  Rng rng(seed);
  return sampler.sample(t, rng, root_timer);
}

void write_tree(const TruncatedTree& tree, std::ostream& out) {
  out << "# id parent label explored_at\n";
  for (std::size_t v = 0; v < tree.node_count(); ++v) {
    out << v << ' ' << tree.parent[v] << ' ' << tree.label[v] << ' ';
    if (std::isinf(tree.explored_at[v]))
      out << "inf";
    else
      out << tree.explored_at[v];
    out << '\n';
  }
}

Interval wilson_interval(std::size_t successes, std::size_t trials, double z) {
  if (trials == 0) return {0.0, 1.0};
  const double N = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / N;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / N;
  const double centre = (p + z2 / (2 * N)) / denom;
  const double half = z * std::sqrt(p * (1 - p) / N + z2 / (4 * N * N)) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

namespace {

std::size_t count_above(const std::vector<std::int64_t>& sorted, double x) {
  auto it = std::upper_bound(sorted.begin(), sorted.end(), x,
                             [](double v, std::int64_t s) { return v < static_cast<double>(s); });
  return static_cast<std::size_t>(sorted.end() - it);
}

}  // namespace

double TailEstimate::tail(std::size_t b, std::size_t a, double x) const {
  if (trials == 0) return 1.0;
  return static_cast<double>(count_above(edge_samples.at(b * labels + a), x)) / static_cast<double>(trials);
}

double TailEstimate::tail_upper(std::size_t b, std::size_t a, double x) const {
  return wilson_interval(count_above(edge_samples.at(b * labels + a), x), trials, z).hi;
}

double TailEstimate::node_tail(double x) const {
  if (trials == 0) return 1.0;
  return static_cast<double>(count_above(node_samples, x)) / static_cast<double>(trials);
}

double TailEstimate::node_tail_upper(double x) const { return wilson_interval(count_above(node_samples, x), trials, z).hi; }

TailEstimate estimate_tails(const NodeStatistics& stats, double t, std::size_t trials, std::uint64_t seed, double z) {
  TreeSampler sampler(stats);
  const std::size_t A = stats.num_labels();
  TailEstimate est;
  est.labels = A;
  est.trials = trials;
  est.t = t;
  est.z = z;
  est.edge_samples.assign(A * A, {});
  Rng base(seed);
  for (std::size_t i = 0; i < trials; ++i) {
    Rng rng = base.split(i);
    auto tree = sampler.sample(t, rng);
    for (std::size_t c = 0; c < A * A; ++c) est.edge_samples[c].push_back(tree.edge_counts[c]);
    est.node_samples.push_back(static_cast<std::int64_t>(tree.node_count()));
  }
  for (auto& s : est.edge_samples) std::sort(s.begin(), s.end());
  std::sort(est.node_samples.begin(), est.node_samples.end());
  return est;
}

MomentEstimate tree_size_moment(const NodeStatistics& stats, double t, double s, std::size_t trials,
                                std::uint64_t seed, RootLaw root) {
  TreeSampler sampler(stats);
  Rng base(seed);
  double sum = 0.0, sq = 0.0;
  for (std::size_t i = 0; i < trials; ++i) {
    Rng rng = base.split(i);
    double v = std::pow(static_cast<double>(sampler.sample(t, rng, {}, root).node_count()), s);
    sum += v;
    sq += v * v;
  }
  MomentEstimate m;
  m.trials = trials;
  if (trials == 0) return m;
  const double N = static_cast<double>(trials);
  m.mean = sum / N;
  m.std_error = std::sqrt(std::max(0.0, sq / N - m.mean * m.mean) / N);
  return m;
}

GwMoment gw_moment_probe(const std::vector<double>& offspring_pmf, int h, int s, std::size_t trials,
                         std::uint64_t seed) {
  if (s < 1 || s > 3) throw std::invalid_argument("moment order must be 1, 2 or 3");
  if (h < 0 || h > 12) throw std::invalid_argument("generation count must lie in [0, 12]");
  if (offspring_pmf.empty()) throw std::invalid_argument("empty offspring law");
  std::vector<double> cum;
  double acc = 0.0, mu1 = 0.0, mus = 0.0;
  for (std::size_t k = 0; k < offspring_pmf.size(); ++k) {
    if (offspring_pmf[k] < 0.0) throw InvalidDistribution("negative offspring probability");
    acc += offspring_pmf[k];
    cum.push_back(acc);
    mu1 += static_cast<double>(k) * offspring_pmf[k];
    mus += std::pow(static_cast<double>(k), s) * offspring_pmf[k];
  }
  if (std::abs(acc - 1.0) > 1e-9) throw InvalidDistribution("offspring law must sum to 1");
  Rng base(seed);
  double sum = 0.0, sq = 0.0;
  for (std::size_t i = 0; i < trials; ++i) {
    Rng rng = base.split(i);
    std::int64_t z = 1, total = 1;
    for (int g = 0; g < h && z > 0; ++g) {
      std::int64_t next = 0;
      for (std::int64_t j = 0; j < z; ++j) next += static_cast<std::int64_t>(draw_index(cum, rng));
      z = next;
      total += z;
    }
    double v = std::pow(static_cast<double>(total), s);
    sum += v;
    sq += v * v;
  }
  GwMoment r;
  r.h = h;
  r.s = s;
  if (trials > 0) {
    const double N = static_cast<double>(trials);
    r.mean = sum / N;
    r.std_error = std::sqrt(std::max(0.0, sq / N - r.mean * r.mean) / N);
  }
  r.envelope = mus * std::pow(mu1, static_cast<double>(s) * (h - 1));
  r.ratio = r.envelope > 0.0 ? r.mean / r.envelope : std::numeric_limits<double>::quiet_NaN();
  return r;
}

}  // namespace asd
