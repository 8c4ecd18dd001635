#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "asd/bounds.hpp"

namespace asd {

CouplingRunner::CouplingRunner(const LabeledGraph& g) : g_(g), A_(g.num_labels()) {
  stub_owner_.assign(A_ * A_, {});
  for (NodeId v = 0; v < g.n(); ++v) {
    auto a2 = g.label_of(v);
    auto in = g.in_degree(v);
    for (std::size_t a = 0; a < A_; ++a)
      for (std::int32_t j = 0; j < in[a]; ++j) stub_owner_[a * A_ + a2].push_back(v);
  }
}

namespace {

// Unexplored set with O(1) uniform draw and removal.
template <class T>
struct Pool {
  std::vector<T> items;
  std::unordered_map<T, std::size_t> pos;
  void add(T x) {
    pos.emplace(x, items.size());
    items.push_back(x);
  }
  void remove(T x) {
    auto it = pos.find(x);
    auto i = it->second;
    pos.erase(it);
    if (i + 1 != items.size()) {
      items[i] = items.back();
      pos[items[i]] = i;
    }
    items.pop_back();
  }
  bool contains(T x) const { return pos.count(x) != 0; }
  std::size_t size() const { return items.size(); }
};

struct StubSequences {
  std::vector<std::int64_t> L, M;
  std::unordered_set<std::int64_t> used;
  std::int64_t l = 0;

  void extend_L(std::size_t h, Rng& rng) {
    while (L.size() < h) L.push_back(static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(l))));
  }
  // M_h = L_h unless L_h was already drawn by M, in which case a uniform unused stub.
  void extend_M(std::size_t h, Rng& rng) {
    h = std::min<std::size_t>(h, static_cast<std::size_t>(l));
    extend_L(h, rng);
    while (M.size() < h) {
      std::int64_t x = L[M.size()];
      if (used.count(x)) {
        do x = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(l)));
        while (used.count(x));
      }
      used.insert(x);
      M.push_back(x);
    }
  }
};

}  // namespace

CouplingTrace CouplingRunner::run(double t, Rng& rng) const {
  const std::size_t A = A_;
  CouplingTrace tr;
  tr.graph_edges.assign(A * A, 0);
  tr.tree_edges.assign(A * A, 0);
  if (g_.n() == 0) return tr;

  std::vector<StubSequences> seq(A * A);
  for (std::size_t c = 0; c < A * A; ++c) seq[c].l = static_cast<std::int64_t>(stub_owner_[c].size());

  const NodeId v0 = static_cast<NodeId>(rng.below(static_cast<std::uint64_t>(g_.n())));
  tr.root = v0;

  // N_t
  std::unordered_set<NodeId> in_n{v0};
  std::unordered_set<NodeId> explored_n;
  Pool<NodeId> open_n;
  std::vector<std::pair<NodeId, NodeId>> edges_n;
  std::vector<std::int64_t>& h = tr.graph_edges;

  // T_t
  std::vector<NodeId> W{v0};
  std::vector<bool> explored_t{false};
  Pool<std::size_t> open_t;
  std::vector<std::pair<std::size_t, std::size_t>> edges_t;
  std::vector<std::int64_t>& ht = tr.tree_edges;

  auto explore_graph = [&](NodeId v) {
    explored_n.insert(v);
    if (open_n.contains(v)) open_n.remove(v);
    const std::size_t a = g_.label_of(v);
    auto k = g_.out_degree(v);
    for (std::size_t a2 = 0; a2 < A; ++a2) {
      const auto c = a * A + a2;
      auto& s = seq[c];
      s.extend_M(static_cast<std::size_t>(h[c] + k[a2]), rng);
      for (std::int32_t j = 0; j < k[a2]; ++j) {
        NodeId head = stub_owner_[c][static_cast<std::size_t>(s.M[static_cast<std::size_t>(h[c] + j)])];
        edges_n.emplace_back(v, head);
        if (in_n.insert(head).second) open_n.add(head);
      }
      h[c] += k[a2];
    }
  };

  auto explore_tree = [&](std::size_t u) {
    explored_t[u] = true;
    if (open_t.contains(u)) open_t.remove(u);
    const NodeId w = W[u];
    const std::size_t a = g_.label_of(w);
    auto k = g_.out_degree(w);
    for (std::size_t a2 = 0; a2 < A; ++a2) {
      const auto c = a * A + a2;
      auto& s = seq[c];
      s.extend_L(static_cast<std::size_t>(ht[c] + k[a2]), rng);
      for (std::int32_t j = 0; j < k[a2]; ++j) {
        NodeId head = stub_owner_[c][static_cast<std::size_t>(s.L[static_cast<std::size_t>(ht[c] + j)])];
        auto child = W.size();
        W.push_back(head);
        explored_t.push_back(false);
        edges_t.emplace_back(u, child);
        open_t.add(child);
      }
      ht[c] += k[a2];
    }
  };

  // W restricted to the tree's unexplored set is a bijection onto the graph's.
  auto correspond = [&]() {
    if (open_t.size() != open_n.size()) return false;
    std::unordered_set<NodeId> seen;
    for (auto u : open_t.items) {
      if (!open_n.contains(W[u]) || !seen.insert(W[u]).second) return false;
    }
    return true;
  };

  double T = rng.exponential(1.0);
  double Tt = T;
  bool run_n = T <= t, run_t = Tt <= t;
  if (run_n) explore_graph(v0);
  if (run_t) explore_tree(0);

  while (run_n || run_t) {
    bool drew = false;
    double gamma = 0.0;
    NodeId V = -1;
    if (run_n) {
      if (open_n.size() == 0) {
        run_n = false;
      } else {
        gamma = rng.exponential(static_cast<double>(open_n.size()));
        V = open_n.items[static_cast<std::size_t>(rng.below(open_n.size()))];
        drew = true;
        T += gamma;
      }
    }
    std::size_t Vt = 0;
    if (run_t) {
      if (open_t.size() == 0) {
        run_t = false;
      } else {
        double gt = (drew && open_t.size() == open_n.size())
                        ? gamma
                        : rng.exponential(static_cast<double>(open_t.size()));
        Tt += gt;
        if (drew && correspond()) {
          for (auto u : open_t.items)
            if (W[u] == V) {
              Vt = u;
              break;
            }
        } else {
          Vt = open_t.items[static_cast<std::size_t>(rng.below(open_t.size()))];
        }
      }
    }
    if (run_n) {
      if (T <= t)
        explore_graph(V);
      else
        run_n = false;
    }
    if (run_t) {
      if (Tt <= t)
        explore_tree(Vt);
      else
        run_t = false;
    }
  }

  tr.graph_nodes = in_n.size();
  tr.tree_nodes = W.size();

  tr.b1 = true;
  for (std::size_t c = 0; c < A * A && tr.b1; ++c) {
    auto need = static_cast<std::size_t>(ht[c]);
    auto& s = seq[c];
    if (need > static_cast<std::size_t>(s.l)) {
      tr.b1 = false;
      break;
    }
    s.extend_M(need, rng);
    for (std::size_t j = 0; j < need; ++j)
      if (s.L[j] != s.M[j]) {
        tr.b1 = false;
        break;
      }
  }

  tr.b2 = true;
  {
    std::unordered_set<NodeId> heads;
    for (std::size_t u = 1; u < W.size() && tr.b2; ++u)
      if (W[u] == v0 || !heads.insert(W[u]).second) tr.b2 = false;
  }

  bool eq = tr.tree_nodes == tr.graph_nodes;
  if (eq) {
    std::unordered_set<NodeId> image;
    for (std::size_t u = 0; u < W.size() && eq; ++u) {
      if (!in_n.count(W[u]) || !image.insert(W[u]).second) eq = false;
      if (eq && explored_t[u] != (explored_n.count(W[u]) != 0)) eq = false;
    }
  }
  if (eq) {
    std::vector<std::pair<NodeId, NodeId>> mapped;
    mapped.reserve(edges_t.size());
    for (auto [p, c] : edges_t) mapped.emplace_back(W[p], W[c]);
    auto en = edges_n;
    std::sort(mapped.begin(), mapped.end());
    std::sort(en.begin(), en.end());
    eq = mapped == en;
  }
  tr.equal = eq;
  return tr;
}

CouplingTrace run_coupling(const LabeledGraph& g, double t, std::uint64_t seed) {
  CouplingRunner runner(g);
  Rng rng(seed);
  return runner.run(t, rng);
}

CouplingSummary run_coupling_batch(const LabeledGraph& g, double t, std::size_t trials, std::uint64_t seed, double z) {
  CouplingRunner runner(g);
  Rng base(seed);
  CouplingSummary s;
  s.trials = trials;
  for (std::size_t i = 0; i < trials; ++i) {
    Rng rng = base.split(i);
    auto tr = runner.run(t, rng);
    if (!tr.equal) ++s.unequal;
    if (tr.b1 && tr.b2) {
      ++s.b1b2;
      if (!tr.equal) ++s.violations;
    }
  }
  s.rate = trials ? static_cast<double>(s.unequal) / static_cast<double>(trials) : 0.0;
  s.ci = wilson_interval(s.unequal, trials, z);
  return s;
}

}  // namespace asd
