#include <cmath>
#include <stdexcept>

#include "asd/errors.hpp"
#include "asd/simulate.hpp"

namespace asd {

TransientResult exact_transient(const LabeledGraph& g, const UpdateKernel& kernel,
                                const std::vector<std::vector<double>>& initial, double t, double gamma,
                                double tolerance) {
  const auto n = static_cast<std::size_t>(g.n());
  const std::size_t A = g.num_labels();
  const std::size_t X = kernel.states().size();
  if (initial.size() != n) throw std::invalid_argument("initial distribution must cover every node");
  if (t < 0.0) throw std::invalid_argument("time must be nonnegative");
  double log_size = static_cast<double>(n) * std::log2(static_cast<double>(X));
  if (log_size > 20.0 + 1e-12) throw StateSpaceTooLarge("state space |X|^n exceeds 2^20");

  std::size_t S = 1;
  std::vector<std::size_t> place(n);
  for (std::size_t v = 0; v < n; ++v) {
    place[v] = S;
    S *= X;
  }
  auto digit = [&](std::size_t z, std::size_t v) { return (z / place[v]) % X; };

  std::vector<double> pi(S, 1.0);
  for (std::size_t z = 0; z < S; ++z)
    for (std::size_t v = 0; v < n; ++v) {
      if (initial[v].size() != X) throw std::invalid_argument("initial distribution row has wrong length");
      pi[z] *= initial[v][digit(z, v)];
    }

  TransientResult res;
  if (n > 0 && t > 0.0) {
    // Uniformized jump kernel: pick a node uniformly, resample its state from Theta.
    const double q = gamma * static_cast<double>(n);
    const int pieces = std::max(1, static_cast<int>(std::ceil(q * t / 100.0)));
    const double qt = q * t / pieces;
    NeighborCounts xi(A, X);
    std::vector<double> prob(X);
    std::vector<double> cur(S), next(S), acc(S);
    auto apply = [&](const std::vector<double>& in, std::vector<double>& out) {
      std::fill(out.begin(), out.end(), 0.0);
      for (std::size_t z = 0; z < S; ++z) {
        if (in[z] == 0.0) continue;
        for (std::size_t v = 0; v < n; ++v) {
          xi.clear();
          for (NodeId w : g.out_edges(static_cast<NodeId>(v))) ++xi(g.label_of(w), digit(z, static_cast<std::size_t>(w)));
          kernel.evaluate(g.label_of(static_cast<NodeId>(v)), xi, prob);
          auto base = z - digit(z, v) * place[v];
          for (std::size_t s = 0; s < X; ++s)
            if (prob[s] != 0.0) out[base + s * place[v]] += in[z] * prob[s] / static_cast<double>(n);
        }
      }
    };
    for (int p = 0; p < pieces; ++p) {
      cur = pi;
      double w = std::exp(-qt);
      double mass = w;
      for (std::size_t z = 0; z < S; ++z) acc[z] = w * cur[z];
      int k = 0;
      while (1.0 - mass > tolerance / pieces && k < 100000) {
        ++k;
        apply(cur, next);
        std::swap(cur, next);
        w *= qt / k;
        mass += w;
        for (std::size_t z = 0; z < S; ++z) acc[z] += w * cur[z];
      }
      res.terms += k + 1;
      res.truncation_error += std::max(0.0, 1.0 - mass);
      pi = acc;
    }
  }

  res.marginals.assign(n * X, 0.0);
  for (std::size_t z = 0; z < S; ++z)
    for (std::size_t v = 0; v < n; ++v) res.marginals[v * X + digit(z, v)] += pi[z];
  res.expected_fraction.assign(X, 0.0);
  res.expected_class_fraction.assign(A * X, 0.0);
  auto sizes = g.class_sizes();
  for (std::size_t v = 0; v < n; ++v) {
    auto a = g.label_of(static_cast<NodeId>(v));
    for (std::size_t s = 0; s < X; ++s) {
      res.expected_fraction[s] += res.marginals[v * X + s] / static_cast<double>(n);
      res.expected_class_fraction[a * X + s] += res.marginals[v * X + s] / static_cast<double>(sizes[a]);
    }
  }
  return res;
}

}  // namespace asd
