#include "asd/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>
#include <unordered_map>

#include "asd/errors.hpp"

namespace asd {

namespace {

constexpr std::int32_t kHeavyDegree = 64;

std::size_t find_class(const std::vector<std::string>& classes, const std::string& name) {
  auto it = std::find(classes.begin(), classes.end(), name);
  if (it == classes.end()) throw std::out_of_range("unknown class '" + name + "'");
  return static_cast<std::size_t>(it - classes.begin());
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  auto hw = static_cast<int>(std::thread::hardware_concurrency());
  return std::max(1, hw);
}

}  // namespace

std::size_t TrajectorySample::class_index(const std::string& name) const { return find_class(classes, name); }
std::size_t RunEnsembleSummary::class_index(const std::string& name) const { return find_class(classes, name); }

std::vector<double> time_grid(double horizon, double dt) {
  if (!(horizon > 0.0) || !(dt > 0.0)) throw std::invalid_argument("horizon and dt must be positive");
  auto steps = static_cast<std::size_t>(std::floor(horizon / dt + 1e-9));
  std::vector<double> g(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i) g[i] = static_cast<double>(i) * dt;
  return g;
}

TrajectorySample run_asd(const LabeledGraph& g, const UpdateKernel& kernel, const std::vector<int>& initial,
                         const SimConfig& cfg, std::uint64_t run_id, SimState* final_state) {
  const auto n = static_cast<std::size_t>(g.n());
  const std::size_t A = g.num_labels();
  const std::size_t X = kernel.states().size();
  if (initial.size() != n) throw std::invalid_argument("initial state vector must cover every node");
  if (X > 255) throw std::invalid_argument("at most 255 states supported");
  if (!(cfg.gamma > 0.0)) throw std::invalid_argument("clock rate must be positive");

  std::vector<std::uint8_t> z(n);
  for (std::size_t v = 0; v < n; ++v) {
    if (initial[v] < 0 || static_cast<std::size_t>(initial[v]) >= X) throw std::invalid_argument("initial state out of range");
    z[v] = static_cast<std::uint8_t>(initial[v]);
  }

  TrajectorySample out;
  out.run_id = run_id;
  out.times = time_grid(cfg.horizon, cfg.dt);
  out.states = kernel.states().names();
  const bool per_class = cfg.record != Granularity::global;
  const bool want_zeta = cfg.record == Granularity::per_class_and_state;
  if (per_class) out.classes = g.labels().names();
  out.classes.push_back("all");
  const std::size_t C = out.classes.size();
  out.fraction.assign(out.times.size() * C * X, 0.0);
  if (want_zeta) out.zeta.assign(out.times.size() * C * X, 0.0);

  // counts[a][s] and in-degree-weighted counts, with the "all" row last.
  std::vector<std::int64_t> count((A + 1) * X, 0), weight((A + 1) * X, 0);
  std::vector<std::int64_t> size(A + 1, 0), indeg(A + 1, 0);
  for (std::size_t v = 0; v < n; ++v) {
    auto a = g.label_of(static_cast<NodeId>(v));
    auto d = g.in_total(static_cast<NodeId>(v));
    ++count[a * X + z[v]];
    ++count[A * X + z[v]];
    weight[a * X + z[v]] += d;
    weight[A * X + z[v]] += d;
    ++size[a];
    ++size[A];
    indeg[a] += d;
    indeg[A] += d;
  }

  auto record = [&](std::size_t gi) {
    for (std::size_t c = 0; c < C; ++c) {
      std::size_t row = per_class ? (c < A ? c : A) : A;
      for (std::size_t s = 0; s < X; ++s) {
        auto idx = (gi * C + c) * X + s;
        out.fraction[idx] = size[row] > 0 ? static_cast<double>(count[row * X + s]) / static_cast<double>(size[row]) : 0.0;
        if (want_zeta)
          out.zeta[idx] = indeg[row] > 0 ? static_cast<double>(weight[row * X + s]) / static_cast<double>(indeg[row])
                                         : out.fraction[idx];
      }
    }
  };

  // Nodes with large out-degree keep their neighbor counts up to date incrementally.
  std::vector<std::int32_t> heavy_id(n, -1);
  std::vector<std::int32_t> heavy_counts;
  std::vector<std::int64_t> rev_offsets;
  std::vector<NodeId> rev_tails;
  {
    std::int32_t nh = 0;
    for (std::size_t v = 0; v < n; ++v)
      if (g.out_total(static_cast<NodeId>(v)) >= kHeavyDegree) heavy_id[v] = nh++;
    if (nh > 0) {
      heavy_counts.assign(static_cast<std::size_t>(nh) * A * X, 0);
      rev_offsets.assign(n + 1, 0);
      for (std::size_t v = 0; v < n; ++v) {
        if (heavy_id[v] < 0) continue;
        for (NodeId w : g.out_edges(static_cast<NodeId>(v))) {
          ++rev_offsets[static_cast<std::size_t>(w) + 1];
          heavy_counts[(static_cast<std::size_t>(heavy_id[v]) * A + g.label_of(w)) * X + z[static_cast<std::size_t>(w)]]++;
        }
      }
      for (std::size_t v = 0; v < n; ++v) rev_offsets[v + 1] += rev_offsets[v];
      rev_tails.resize(static_cast<std::size_t>(rev_offsets[n]));
      std::vector<std::int64_t> fill(rev_offsets.begin(), rev_offsets.end() - 1);
      for (std::size_t v = 0; v < n; ++v) {
        if (heavy_id[v] < 0) continue;
        for (NodeId w : g.out_edges(static_cast<NodeId>(v)))
          rev_tails[static_cast<std::size_t>(fill[static_cast<std::size_t>(w)]++)] = static_cast<NodeId>(v);
      }
    }
  }

  Rng rng = Rng(cfg.seed).split(run_id).split(0);
  NeighborCounts xi(A, X);
  std::vector<double> prob(X);
  const double rate = cfg.gamma * static_cast<double>(n);
  std::size_t gi = 0;
  double t = 0.0;
  std::int64_t updates = 0;
  auto labels = g.label_array();

  if (n == 0) {
    for (; gi < out.times.size(); ++gi) record(gi);
  }
  while (n > 0) {
    t += rng.exponential(rate);
    while (gi < out.times.size() && out.times[gi] <= t) record(gi++);
    if (t > cfg.horizon) break;
    auto v = static_cast<std::size_t>(rng.below(n));
    if (heavy_id[v] >= 0) {
      auto src = heavy_counts.data() + static_cast<std::size_t>(heavy_id[v]) * A * X;
      std::copy(src, src + A * X, xi.data().begin());
    } else {
      xi.clear();
      auto d = xi.data();
      for (NodeId w : g.out_edges(static_cast<NodeId>(v)))
        ++d[static_cast<std::size_t>(labels[static_cast<std::size_t>(w)]) * X + z[static_cast<std::size_t>(w)]];
    }
    kernel.evaluate(labels[v], xi, prob);
    double u = rng.uniform();
    std::size_t s = 0;
    double acc = prob[0];
    while (u >= acc && s + 1 < X) acc += prob[++s];
    // Skip zero-probability states reached through rounding at the end of the scan.
    while (prob[s] == 0.0 && s > 0) --s;
    ++updates;
    auto old = z[v];
    if (old == s) continue;
    z[v] = static_cast<std::uint8_t>(s);
    auto a = labels[v];
    auto d = g.in_total(static_cast<NodeId>(v));
    --count[a * X + old];
    --count[A * X + old];
    ++count[a * X + s];
    ++count[A * X + s];
    weight[a * X + old] -= d;
    weight[A * X + old] -= d;
    weight[a * X + s] += d;
    weight[A * X + s] += d;
    if (!rev_offsets.empty()) {
      for (auto e = rev_offsets[v]; e < rev_offsets[v + 1]; ++e) {
        auto h = static_cast<std::size_t>(heavy_id[static_cast<std::size_t>(rev_tails[static_cast<std::size_t>(e)])]);
        --heavy_counts[(h * A + a) * X + old];
        ++heavy_counts[(h * A + a) * X + s];
      }
    }
  }
  out.updates = updates;
  if (final_state) {
    final_state->state = std::move(z);
    final_state->time = cfg.horizon;
    final_state->updates = updates;
  }
  return out;
}

namespace {

template <class GetGraph>
RunEnsembleSummary ensemble_impl(GetGraph&& get_graph, const UpdateKernel& kernel, const InitialFactory& initial,
                                 const SimConfig& cfg) {
  if (cfg.runs < 1) throw std::invalid_argument("run count must be at least 1");
  RunEnsembleSummary sum;
  sum.runs = cfg.runs;
  sum.updates.assign(static_cast<std::size_t>(cfg.runs), 0);
  std::mutex mu;
  std::map<int, TrajectorySample> pending;
  int next_reduce = 0;
  std::atomic<int> next_run{0};
  std::exception_ptr failure;

  auto reduce = [&](TrajectorySample&& s) {
    if (sum.times.empty()) {
      sum.times = s.times;
      sum.classes = s.classes;
      sum.states = s.states;
      sum.mean.assign(s.fraction.size(), 0.0);
      sum.min = s.fraction;
      sum.max = s.fraction;
    }
    if (s.fraction.size() != sum.mean.size()) throw std::runtime_error("runs produced different grid layouts");
    for (std::size_t i = 0; i < s.fraction.size(); ++i) {
      sum.mean[i] += s.fraction[i];
      sum.min[i] = std::min(sum.min[i], s.fraction[i]);
      sum.max[i] = std::max(sum.max[i], s.fraction[i]);
    }
    sum.updates[s.run_id] = s.updates;
  };

  auto worker = [&]() {
    LabeledGraph storage;
    while (true) {
      int r = next_run.fetch_add(1);
      if (r >= cfg.runs) return;
      try {
        Rng run_rng = Rng(cfg.seed).split(static_cast<std::uint64_t>(r));
        Rng graph_rng = run_rng.split(1);
        Rng init_rng = run_rng.split(2);
        const LabeledGraph& g = get_graph(graph_rng, storage);
        auto z0 = initial(g, init_rng);
        auto traj = run_asd(g, kernel, z0, cfg, static_cast<std::uint64_t>(r));
        std::lock_guard<std::mutex> lock(mu);
        pending.emplace(r, std::move(traj));
        // Reduce strictly in run order so the floating-point sums do not depend on scheduling.
        while (!pending.empty() && pending.begin()->first == next_reduce) {
          reduce(std::move(pending.begin()->second));
          pending.erase(pending.begin());
          ++next_reduce;
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!failure) failure = std::current_exception();
        next_run.store(cfg.runs);
        return;
      }
    }
  };

  int threads = std::min(resolve_threads(cfg.threads), cfg.runs);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  for (auto& m : sum.mean) m /= static_cast<double>(cfg.runs);
  for (std::size_t i = 0; i < sum.mean.size(); ++i) sum.mean[i] = std::clamp(sum.mean[i], sum.min[i], sum.max[i]);
  return sum;
}

}  // namespace

RunEnsembleSummary run_ensemble(const LabeledGraph& g, const UpdateKernel& kernel, const InitialFactory& initial,
                                const SimConfig& cfg) {
  return ensemble_impl([&](Rng&, LabeledGraph&) -> const LabeledGraph& { return g; }, kernel, initial, cfg);
}

RunEnsembleSummary run_ensemble(const GraphFactory& graphs, const UpdateKernel& kernel,
                                const InitialFactory& initial, const SimConfig& cfg) {
  return ensemble_impl(
      [&](Rng& rng, LabeledGraph& storage) -> const LabeledGraph& {
        storage = graphs(rng);
        return storage;
      },
      kernel, initial, cfg);
}

ExplorationRecord explore_relevant_neighborhood(const LabeledGraph& g, NodeId v, double t, std::uint64_t seed,
                                                std::optional<double> root_timer) {
  Rng rng(seed);
  return explore_relevant_neighborhood(g, v, t, rng, root_timer);
}

ExplorationRecord explore_relevant_neighborhood(const LabeledGraph& g, NodeId v, double t, Rng& rng,
                                                std::optional<double> root_timer) {
  if (v < 0 || v >= g.n()) throw std::invalid_argument("root node out of range");
  const std::size_t A = g.num_labels();
  ExplorationRecord rec;
  rec.root = v;
  rec.class_edge_counts.assign(A * A, 0);
  std::unordered_map<NodeId, std::size_t> index;
  auto add = [&](NodeId w) {
    auto [it, fresh] = index.emplace(w, rec.nodes.size());
    if (fresh) {
      rec.nodes.push_back(w);
      rec.explored.push_back(false);
      rec.explored_at.push_back(std::numeric_limits<double>::infinity());
    }
    return fresh;
  };
  add(v);
  std::vector<std::size_t> unexplored;
  auto explore = [&](std::size_t i, double when) {
    rec.explored[i] = true;
    rec.explored_at[i] = when;
    NodeId u = rec.nodes[i];
    for (NodeId w : g.out_edges(u)) {
      rec.edges.emplace_back(u, w);
      ++rec.class_edge_counts[g.label_of(u) * A + g.label_of(w)];
      if (add(w)) unexplored.push_back(rec.nodes.size() - 1);
    }
  };

  double clock = root_timer ? *root_timer : rng.exponential(1.0);
  if (clock > t) return rec;
  explore(0, clock);
  while (!unexplored.empty()) {
    clock += rng.exponential(static_cast<double>(unexplored.size()));
    if (clock > t) break;
    auto pick = static_cast<std::size_t>(rng.below(unexplored.size()));
    auto i = unexplored[pick];
    unexplored[pick] = unexplored.back();
    unexplored.pop_back();
    explore(i, clock);
  }
  return rec;
}

void write_trajectory_csv(const TrajectorySample& s, std::ostream& out, bool header) {
  if (header) out << "run_id,t,class,state,fraction,zeta_fraction\n";
  const std::size_t C = s.classes.size(), X = s.states.size();
  for (std::size_t ti = 0; ti < s.times.size(); ++ti)
    for (std::size_t c = 0; c < C; ++c)
      for (std::size_t x = 0; x < X; ++x) {
        auto idx = (ti * C + c) * X + x;
        out << s.run_id << ',' << s.times[ti] << ',' << s.classes[c] << ',' << s.states[x] << ','
            << s.fraction[idx] << ',';
        if (!s.zeta.empty()) out << s.zeta[idx];
        out << '\n';
      }
}

void write_summary_csv(const RunEnsembleSummary& s, std::ostream& out) {
  out << "t,class,state,mean,min,max\n";
  const std::size_t C = s.classes.size(), X = s.states.size();
  for (std::size_t ti = 0; ti < s.times.size(); ++ti)
    for (std::size_t c = 0; c < C; ++c)
      for (std::size_t x = 0; x < X; ++x) {
        auto idx = s.index(ti, c, x);
        out << s.times[ti] << ',' << s.classes[c] << ',' << s.states[x] << ',' << s.mean[idx] << ','
            << s.min[idx] << ',' << s.max[idx] << '\n';
      }
}

}  // namespace asd
