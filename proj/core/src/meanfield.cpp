#include "asd/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <stdexcept>

#include "asd/errors.hpp"
#include "asd/rng.hpp"
#include "combinatorics.hpp"

namespace asd {

MeanFieldState::MeanFieldState(std::size_t labels, std::size_t states)
    : labels_(labels), states_(states), zeta_(labels * labels * states, 0.0), y_(labels * states, 0.0) {}

MeanFieldState MeanFieldState::uniform_blocks(std::size_t labels, const std::vector<double>& dist) {
  MeanFieldState s(labels, dist.size());
  for (std::size_t a = 0; a < labels; ++a) {
    for (std::size_t w = 0; w < dist.size(); ++w) {
      s.y(w, a) = dist[w];
      for (std::size_t b = 0; b < labels; ++b) s.zeta(w, a, b) = dist[w];
    }
  }
  return s;
}

MeanFieldState MeanFieldState::from_initial_states(const NodeStatistics& stats) {
  const auto& ps = stats.p_s_given_a();
  if (ps.empty()) throw std::invalid_argument("statistics carry no initial-state conditionals");
  const std::size_t A = stats.num_labels(), X = stats.states().size();
  MeanFieldState s(A, X);
  for (std::size_t a = 0; a < A; ++a)
    for (std::size_t w = 0; w < X; ++w) {
      s.y(w, a) = ps[a][w];
      for (std::size_t b = 0; b < A; ++b) s.zeta(w, a, b) = ps[a][w];
    }
  return s;
}

namespace {

constexpr std::size_t kThetaTableCap = 1u << 16;

struct RowComps {
  int k = 0;
  std::size_t count = 0;
  std::vector<int> xi;       // count x X
  std::vector<double> coef;  // multinomial coefficients
};

RowComps make_row(int k, std::size_t X) {
  RowComps r;
  r.k = k;
  detail::for_each_composition(k, X, [&](const std::vector<int>& x) {
    r.xi.insert(r.xi.end(), x.begin(), x.end());
    double c = 1.0;
    int rem = k;
    for (std::size_t g = 0; g < X; ++g) {
      c *= detail::binom(rem, x[g]);
      rem -= x[g];
    }
    r.coef.push_back(c);
  });
  r.count = r.coef.size();
  return r;
}

struct Plan {
  std::size_t a = 0;
  DegreeVector k;
  bool exact = true;
  bool aggregated = false;
  int K = 0;
  std::size_t dense = 0;
  std::size_t radix = 1;
  std::vector<std::size_t> rows;
  std::vector<std::shared_ptr<const RowComps>> comps;
  std::vector<std::vector<std::size_t>> offsets;
  std::shared_ptr<const std::vector<double>> theta;  // dense x X, aggregated only
  std::uint64_t stream = 0;
};

class PhiEngine {
 public:
  PhiEngine(const UpdateKernel& kernel, std::size_t labels, PhiOptions opt)
      : kernel_(kernel), A_(labels), X_(kernel.states().size()), opt_(opt) {}

  Plan plan(std::size_t a, const DegreeVector& k) {
    if (k.size() != A_) throw std::invalid_argument("degree vector length differs from label count");
    Plan p;
    p.a = a;
    p.k = k;
    p.K = static_cast<int>(k.total());
    double work = 1.0;
    for (std::size_t c = 0; c < A_; ++c) work *= detail::composition_count(k[c], X_);
    switch (opt_.mode) {
      case PhiMode::exact:
        if (work > opt_.budget)
          throw BudgetExceeded("exact phi needs " + std::to_string(work) + " compositions, budget " +
                               std::to_string(opt_.budget));
        p.exact = true;
        break;
      case PhiMode::monte_carlo:
        p.exact = false;
        break;
      case PhiMode::automatic:
        p.exact = work <= opt_.budget;
        break;
    }
    std::uint64_t h = hash_combine(a, k.size());
    for (auto x : k.counts) h = hash_combine(h, static_cast<std::uint64_t>(x));
    p.stream = h;
    if (!p.exact) return p;
    p.aggregated = kernel_.label_aggregated();
    p.radix = static_cast<std::size_t>(p.K) + 1;
    for (std::size_t c = 0; c < A_; ++c) {
      if (k[c] == 0) continue;
      p.rows.push_back(c);
      p.comps.push_back(row(k[c]));
    }
    if (p.aggregated) {
      p.dense = 1;
      for (std::size_t g = 0; g + 1 < X_; ++g) p.dense *= p.radix;
      for (const auto& rc : p.comps) {
        std::vector<std::size_t> off(rc->count);
        for (std::size_t i = 0; i < rc->count; ++i) off[i] = dense_index(&rc->xi[i * X_], p.radix);
        p.offsets.push_back(std::move(off));
      }
      if (p.dense <= kThetaTableCap) p.theta = theta_table(a, p.K, p.radix, p.dense);
    }
    return p;
  }

  void eval(const Plan& p, const MeanFieldState& s, std::vector<double>& out, std::vector<double>* se = nullptr) const {
    out.assign(X_, 0.0);
    if (se) se->assign(X_, 0.0);
    if (!p.exact) {
      monte_carlo(p, s, out, se);
      return;
    }
    if (p.aggregated)
      eval_aggregated(p, s, out);
    else
      eval_full(p, s, out);
  }

 private:
  std::size_t dense_index(const int* x, std::size_t radix) const {
    std::size_t idx = 0, mul = 1;
    for (std::size_t g = 0; g + 1 < X_; ++g) {
      idx += static_cast<std::size_t>(x[g]) * mul;
      mul *= radix;
    }
    return idx;
  }

  std::shared_ptr<const RowComps> row(int k) {
    auto it = rows_.find(k);
    if (it != rows_.end()) return it->second;
    auto r = std::make_shared<const RowComps>(make_row(k, X_));
    rows_.emplace(k, r);
    return r;
  }

  std::shared_ptr<const std::vector<double>> theta_table(std::size_t a, int K, std::size_t radix, std::size_t dense) {
    auto key = std::make_pair(a, K);
    auto it = thetas_.find(key);
    if (it != thetas_.end()) return it->second;
    auto table = std::make_shared<std::vector<double>>(dense * X_, 0.0);
    NeighborCounts xi(A_, X_);
    std::vector<double> prob(X_);
    detail::for_each_composition(K, X_, [&](const std::vector<int>& x) {
      xi.clear();
      for (std::size_t g = 0; g < X_; ++g) xi(0, g) = x[g];
      kernel_.evaluate(a, xi, prob);
      auto idx = dense_index(x.data(), radix);
      std::copy(prob.begin(), prob.end(), table->begin() + static_cast<std::ptrdiff_t>(idx * X_));
    });
    thetas_.emplace(key, table);
    return table;
  }

  // Row weights: coef * prod_g zeta(g|c,a)^xi_g.
  void row_weights(const RowComps& rc, std::size_t c, std::size_t a, const MeanFieldState& s,
                   std::vector<double>& w) const {
    std::vector<std::vector<double>> pw(X_);
    for (std::size_t g = 0; g < X_; ++g) {
      pw[g].assign(static_cast<std::size_t>(rc.k) + 1, 1.0);
      double z = s.zeta(g, c, a);
      for (int e = 1; e <= rc.k; ++e) pw[g][e] = pw[g][e - 1] * z;
    }
    w.resize(rc.count);
    for (std::size_t i = 0; i < rc.count; ++i) {
      double v = rc.coef[i];
      const int* x = &rc.xi[i * X_];
      for (std::size_t g = 0; g < X_ && v != 0.0; ++g) v *= pw[g][static_cast<std::size_t>(x[g])];
      w[i] = v;
    }
  }

  void eval_aggregated(const Plan& p, const MeanFieldState& s, std::vector<double>& out) const {
    std::vector<double> dist(p.dense, 0.0), next(p.dense, 0.0), w;
    std::vector<std::size_t> nz{0}, nz_next;
    dist[0] = 1.0;
    for (std::size_t r = 0; r < p.rows.size(); ++r) {
      const auto& rc = *p.comps[r];
      row_weights(rc, p.rows[r], p.a, s, w);
      const auto& off = p.offsets[r];
      nz_next.clear();
      for (std::size_t i : nz) {
        double di = dist[i];
        for (std::size_t j = 0; j < rc.count; ++j) {
          if (w[j] == 0.0) continue;
          auto t = i + off[j];
          if (next[t] == 0.0) nz_next.push_back(t);
          next[t] += di * w[j];
        }
      }
      for (std::size_t i : nz) dist[i] = 0.0;
      std::swap(dist, next);
      std::swap(nz, nz_next);
    }
    if (p.theta) {
      const auto& th = *p.theta;
      for (std::size_t i : nz)
        for (std::size_t g = 0; g < X_; ++g) out[g] += dist[i] * th[i * X_ + g];
      return;
    }
    NeighborCounts xi(A_, X_);
    std::vector<double> prob(X_);
    for (std::size_t i : nz) {
      xi.clear();
      std::size_t rest = i;
      std::int64_t used = 0;
      for (std::size_t g = 0; g + 1 < X_; ++g) {
        xi(0, g) = static_cast<std::int32_t>(rest % p.radix);
        used += xi(0, g);
        rest /= p.radix;
      }
      xi(0, X_ - 1) = static_cast<std::int32_t>(p.K - used);
      kernel_.evaluate(p.a, xi, prob);
      for (std::size_t g = 0; g < X_; ++g) out[g] += dist[i] * prob[g];
    }
  }

  void eval_full(const Plan& p, const MeanFieldState& s, std::vector<double>& out) const {
    std::vector<std::vector<double>> weights(p.rows.size());
    for (std::size_t r = 0; r < p.rows.size(); ++r) row_weights(*p.comps[r], p.rows[r], p.a, s, weights[r]);
    NeighborCounts xi(A_, X_);
    std::vector<double> prob(X_);
    std::function<void(std::size_t, double)> rec = [&](std::size_t r, double w) {
      if (r == p.rows.size()) {
        kernel_.evaluate(p.a, xi, prob);
        for (std::size_t g = 0; g < X_; ++g) out[g] += w * prob[g];
        return;
      }
      const auto& rc = *p.comps[r];
      auto c = p.rows[r];
      for (std::size_t i = 0; i < rc.count; ++i) {
        if (weights[r][i] == 0.0) continue;
        for (std::size_t g = 0; g < X_; ++g) xi(c, g) = rc.xi[i * X_ + g];
        rec(r + 1, w * weights[r][i]);
      }
      for (std::size_t g = 0; g < X_; ++g) xi(c, g) = 0;
    };
    rec(0, 1.0);
  }

  void monte_carlo(const Plan& p, const MeanFieldState& s, std::vector<double>& out, std::vector<double>* se) const {
    Rng rng = Rng(opt_.seed).split(p.stream);
    NeighborCounts xi(A_, X_);
    std::vector<double> prob(X_), sum(X_, 0.0), sq(X_, 0.0);
    const std::size_t M = std::max<std::size_t>(1, opt_.mc_samples);
    for (std::size_t m = 0; m < M; ++m) {
      xi.clear();
      for (std::size_t c = 0; c < A_; ++c) {
        int remaining = p.k[c];
        double mass = 1.0;
        for (std::size_t g = 0; g + 1 < X_ && remaining > 0; ++g) {
          double z = s.zeta(g, c, p.a);
          double pr = mass > 0.0 ? std::clamp(z / mass, 0.0, 1.0) : 0.0;
          std::binomial_distribution<int> bin(remaining, pr);
          int x = bin(rng);
          xi(c, g) = x;
          remaining -= x;
          mass -= z;
        }
        xi(c, X_ - 1) += remaining;
      }
      kernel_.evaluate(p.a, xi, prob);
      for (std::size_t g = 0; g < X_; ++g) {
        sum[g] += prob[g];
        sq[g] += prob[g] * prob[g];
      }
    }
    for (std::size_t g = 0; g < X_; ++g) {
      out[g] = sum[g] / static_cast<double>(M);
      if (se) {
        double var = std::max(0.0, sq[g] / static_cast<double>(M) - out[g] * out[g]);
        (*se)[g] = std::sqrt(var / static_cast<double>(M));
      }
    }
  }

  const UpdateKernel& kernel_;
  std::size_t A_, X_;
  PhiOptions opt_;
  std::map<int, std::shared_ptr<const RowComps>> rows_;
  std::map<std::pair<std::size_t, int>, std::shared_ptr<const std::vector<double>>> thetas_;
};

double truncate(std::vector<WeightedDegree>& law, double truncation) {
  double cum = 0.0;
  std::size_t keep = law.size();
  for (std::size_t i = 0; i < law.size(); ++i) {
    cum += law[i].prob;
    if (cum >= 1.0 - truncation) {
      keep = i + 1;
      break;
    }
  }
  double kept = 0.0;
  for (std::size_t i = 0; i < keep; ++i) kept += law[i].prob;
  law.resize(keep);
  for (auto& w : law) w.prob /= kept;
  return std::max(0.0, 1.0 - kept);
}

}  // namespace

PhiResult phi_varphi(const DegreeVector& k, std::size_t a, const MeanFieldState& s, const UpdateKernel& kernel,
                     const PhiOptions& opt) {
  if (s.states() != kernel.states().size()) throw StateMismatch("mean-field state and kernel differ in state count");
  PhiEngine engine(kernel, s.labels(), opt);
  auto plan = engine.plan(a, k);
  PhiResult r;
  r.exact = plan.exact;
  r.samples = plan.exact ? 0 : std::max<std::size_t>(1, opt.mc_samples);
  engine.eval(plan, s, r.prob, plan.exact ? nullptr : &r.std_error);
  return r;
}

struct MeanField::Cache {
  std::unique_ptr<PhiEngine> engine;
  std::vector<std::vector<Plan>> plans;  // per label, parallel to support_[a].k
};

MeanField::MeanField(const NodeStatistics& stats, KernelPtr kernel, PhiOptions opt, double truncation)
    : stats_(stats), kernel_(std::move(kernel)), opt_(opt) {
  if (!kernel_) throw std::invalid_argument("null kernel");
  A_ = stats_.num_labels();
  X_ = kernel_->states().size();
  if (!stats_.states().empty() && stats_.states().size() != X_)
    throw StateMismatch("statistics and kernel differ in state count");
  support_.resize(A_);
  active_.assign(A_ * A_, false);
  present_.assign(A_, false);
  trunc_.p_discarded.assign(A_, 0.0);
  trunc_.q_discarded.assign(A_ * A_, 0.0);
  cache_ = std::make_shared<Cache>();
  cache_->engine = std::make_unique<PhiEngine>(*kernel_, A_, opt_);
  cache_->plans.resize(A_);

  for (std::size_t a = 0; a < A_; ++a) {
    std::map<DegreeVector, std::size_t> index;
    auto& sup = support_[a];
    sup.q.assign(A_, {});
    auto slot = [&](const DegreeVector& k) {
      auto [it, fresh] = index.emplace(k, sup.k.size());
      if (fresh) {
        sup.k.push_back(k);
        sup.p.push_back(0.0);
        for (auto& q : sup.q) q.push_back(0.0);
      }
      return it->second;
    };
    present_[a] = stats_.p_label(a) > 0.0;
    if (present_[a]) {
      auto law = stats_.k_given_a(a);
      trunc_.p_discarded[a] = truncate(law, truncation);
      for (const auto& w : law) sup.p[slot(w.k)] += w.prob;
    }
    for (std::size_t b = 0; b < A_; ++b) {
      if (!stats_.has_q(b, a)) continue;
      active_[a * A_ + b] = true;
      auto law = stats_.q_k(b, a);
      trunc_.q_discarded[a * A_ + b] = truncate(law, truncation);
      for (const auto& w : law) sup.q[b][slot(w.k)] += w.prob;
    }
    for (const auto& k : sup.k) {
      cache_->plans[a].push_back(cache_->engine->plan(a, k));
      all_exact_ = all_exact_ && cache_->plans[a].back().exact;
    }
  }
}

void MeanField::phi_table(std::size_t a, const MeanFieldState& s, std::vector<double>& out) const {
  const auto& plans = cache_->plans[a];
  out.assign(plans.size() * X_, 0.0);
  std::vector<double> v;
  for (std::size_t i = 0; i < plans.size(); ++i) {
    cache_->engine->eval(plans[i], s, v);
    std::copy(v.begin(), v.end(), out.begin() + static_cast<std::ptrdiff_t>(i * X_));
  }
}

void MeanField::evaluate(const MeanFieldState& s, MeanFieldState& out) const {
  if (s.labels() != A_ || s.states() != X_) throw std::invalid_argument("mean-field state has wrong shape");
  out = s;
  std::vector<double> table;
  for (std::size_t a = 0; a < A_; ++a) {
    bool any = present_[a];
    for (std::size_t b = 0; b < A_; ++b) any = any || active(a, b);
    if (!any) continue;
    phi_table(a, s, table);
    const auto& sup = support_[a];
    for (std::size_t b = 0; b < A_; ++b) {
      if (!active(a, b)) continue;
      for (std::size_t w = 0; w < X_; ++w) {
        double acc = 0.0;
        for (std::size_t i = 0; i < sup.k.size(); ++i) acc += sup.q[b][i] * table[i * X_ + w];
        out.zeta(w, a, b) = acc;
      }
    }
    if (present_[a]) {
      for (std::size_t w = 0; w < X_; ++w) {
        double acc = 0.0;
        for (std::size_t i = 0; i < sup.k.size(); ++i) acc += sup.p[i] * table[i * X_ + w];
        out.y(w, a) = acc;
      }
    }
  }
}

void MeanField::rhs(const MeanFieldState& s, MeanFieldState& ds) const {
  evaluate(s, ds);
  auto& dz = ds.zeta_data();
  const auto& z = s.zeta_data();
  for (std::size_t i = 0; i < dz.size(); ++i) dz[i] -= z[i];
  auto& dy = ds.y_data();
  const auto& y = s.y_data();
  for (std::size_t i = 0; i < dy.size(); ++i) dy[i] -= y[i];
}

std::vector<double> MeanField::phi_bar(std::size_t a, std::size_t b, const MeanFieldState& s) const {
  if (!active(a, b)) throw std::invalid_argument("q^b_{.|a} undefined for this label pair");
  MeanFieldState out;
  evaluate(s, out);
  std::vector<double> r(X_);
  for (std::size_t w = 0; w < X_; ++w) r[w] = out.zeta(w, a, b);
  return r;
}

std::vector<double> MeanField::psi_bar(std::size_t a, const MeanFieldState& s) const {
  MeanFieldState out;
  evaluate(s, out);
  std::vector<double> r(X_);
  for (std::size_t w = 0; w < X_; ++w) r[w] = out.y(w, a);
  return r;
}

std::vector<double> phi_bar(std::size_t a, std::size_t b, const MeanFieldState& s, const NodeStatistics& stats,
                            KernelPtr kernel) {
  return MeanField(stats, std::move(kernel)).phi_bar(a, b, s);
}

std::vector<double> psi_bar(std::size_t a, const MeanFieldState& s, const NodeStatistics& stats, KernelPtr kernel) {
  return MeanField(stats, std::move(kernel)).psi_bar(a, s);
}

namespace {

void axpy(MeanFieldState& out, const MeanFieldState& x, double h, const MeanFieldState& d) {
  auto& oz = out.zeta_data();
  const auto& xz = x.zeta_data();
  const auto& dz = d.zeta_data();
  for (std::size_t i = 0; i < oz.size(); ++i) oz[i] = xz[i] + h * dz[i];
  auto& oy = out.y_data();
  const auto& xy = x.y_data();
  const auto& dy = d.y_data();
  for (std::size_t i = 0; i < oy.size(); ++i) oy[i] = xy[i] + h * dy[i];
}

bool repair_block(double* p, std::size_t X) {
  double sum = 0.0;
  bool fix = false;
  for (std::size_t w = 0; w < X; ++w) {
    if (p[w] < -1e-12 || p[w] > 1.0 + 1e-12) fix = true;
    p[w] = std::clamp(p[w], 0.0, 1.0);
    sum += p[w];
  }
  if (std::abs(sum - 1.0) > 1e-12) fix = true;
  // Roundoff-level sum drift is projected away every step; only larger corrections count.
  if (sum > 0.0)
    for (std::size_t w = 0; w < X; ++w) p[w] /= sum;
  return fix;
}

}  // namespace

OdeTrajectory integrate(const MeanFieldState& init, const MeanField& mf, const OdeConfig& cfg) {
  if (!(cfg.h > 0.0)) throw std::invalid_argument("step size must be positive");
  if (!(cfg.horizon >= 0.0)) throw std::invalid_argument("horizon must be nonnegative");
  const std::size_t A = mf.labels(), X = mf.states();
  if (init.labels() != A || init.states() != X) throw std::invalid_argument("initial state has wrong shape");

  OdeTrajectory tr;
  const auto steps = static_cast<std::size_t>(std::llround(cfg.horizon / cfg.h));
  std::size_t every = 1;
  if (cfg.record_dt > 0.0) every = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(cfg.record_dt / cfg.h)));
  MeanFieldState s = init, tmp = init, k1, k2, k3, k4;
  tr.times.push_back(0.0);
  tr.states.push_back(s);
  for (std::size_t i = 1; i <= steps; ++i) {
    mf.rhs(s, k1);
    axpy(tmp, s, cfg.h / 2, k1);
    mf.rhs(tmp, k2);
    axpy(tmp, s, cfg.h / 2, k2);
    mf.rhs(tmp, k3);
    axpy(tmp, s, cfg.h, k3);
    mf.rhs(tmp, k4);
    auto& z = s.zeta_data();
    auto& y = s.y_data();
    for (std::size_t j = 0; j < z.size(); ++j)
      z[j] += cfg.h / 6 * (k1.zeta_data()[j] + 2 * k2.zeta_data()[j] + 2 * k3.zeta_data()[j] + k4.zeta_data()[j]);
    for (std::size_t j = 0; j < y.size(); ++j)
      y[j] += cfg.h / 6 * (k1.y_data()[j] + 2 * k2.y_data()[j] + 2 * k3.y_data()[j] + k4.y_data()[j]);
    bool fixed = false;
    for (std::size_t a = 0; a < A; ++a) {
      for (std::size_t b = 0; b < A; ++b)
        if (mf.active(a, b)) fixed = repair_block(&z[(a * A + b) * X], X) || fixed;
      if (mf.label_present(a)) fixed = repair_block(&y[a * X], X) || fixed;
    }
    if (fixed) ++tr.renormalizations;
    if (i % every == 0 || i == steps) {
      tr.times.push_back(static_cast<double>(i) * cfg.h);
      tr.states.push_back(s);
    }
  }
  tr.steps = steps;
  if (steps > 0 && static_cast<double>(tr.renormalizations) > 0.001 * static_cast<double>(steps))
    throw StepTooLarge("simplex renormalization fired on " + std::to_string(tr.renormalizations) + " of " +
                       std::to_string(steps) + " steps");
  return tr;
}

OdeTrajectory integrate(const MeanFieldState& init, const NodeStatistics& stats, KernelPtr kernel,
                        const OdeConfig& cfg, const PhiOptions& opt) {
  MeanField mf(stats, std::move(kernel), opt);
  return integrate(init, mf, cfg);
}

std::vector<double> aggregate_y(const MeanFieldState& s, const NodeStatistics& stats) {
  std::vector<double> out(s.states(), 0.0);
  for (std::size_t a = 0; a < s.labels(); ++a)
    for (std::size_t w = 0; w < s.states(); ++w) out[w] += stats.p_label(a) * s.y(w, a);
  return out;
}

}  // namespace asd
