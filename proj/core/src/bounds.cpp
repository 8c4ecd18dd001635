#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <stdexcept>

#include "asd/bounds.hpp"
#include "asd/errors.hpp"

namespace asd {

namespace {

// sum_{d,k} d_b q^{parent}_{d,k|a}
double in_mass(const NodeStatistics& stats, std::size_t b, std::size_t parent, std::size_t a) {
  double acc = 0.0;
  for (const auto& cell : stats.q_dk(parent, a)) acc += cell.d[b] * cell.prob;
  return acc;
}

struct GeneralModel {
  std::size_t A = 0;
  std::vector<std::size_t> blocks;     // b*A+a with l_{b,a} > 0
  std::vector<double> l;               // per b*A+a
  std::vector<double> same;            // per b*A+a
  std::vector<double> cross;           // per (b*A+a)*A+b'
};

GeneralModel general_model(const NodeStatistics& stats, double n) {
  GeneralModel m;
  const std::size_t A = stats.num_labels();
  m.A = A;
  m.l.assign(A * A, 0.0);
  m.same.assign(A * A, 0.0);
  m.cross.assign(A * A * A, 0.0);
  for (std::size_t b = 0; b < A; ++b)
    for (std::size_t a = 0; a < A; ++a) {
      if (!stats.has_q(b, a)) continue;
      const auto c = b * A + a;
      m.blocks.push_back(c);
      m.l[c] = stats.edge_count(b, a, n);
      m.same[c] = in_mass(stats, b, b, a);
      for (std::size_t b2 = 0; b2 < A; ++b2)
        if (b2 != b && stats.has_q(b2, a)) m.cross[c * A + b2] = in_mass(stats, b, b2, a);
    }
  return m;
}

struct Evaluation {
  double value = 0.0, point = 0.0;
  std::vector<BoundTerm> terms;
};

Evaluation evaluate_general(const GeneralModel& m, const TailEstimate& tails, const std::vector<double>& x,
                            bool with_terms) {
  Evaluation e;
  const std::size_t A = m.A;
  for (auto c : m.blocks) {
    const std::size_t b = c / A, a = c % A;
    const double xc = x[c];
    const double tail_hi = tails.tail_upper(b, a, xc);
    const double tail_pt = tails.tail(b, a, xc);
    const double pair = xc * (xc + 1.0) / 2.0 * m.same[c] / m.l[c];
    double cross = 0.0;
    for (std::size_t b2 = 0; b2 < A; ++b2) {
      if (b2 == b || m.l[b2 * A + a] <= 0.0) continue;
      cross += xc * x[b2 * A + a] * m.cross[c * A + b2] / m.l[c];
    }
    e.value += tail_hi + pair + cross;
    e.point += tail_pt + pair + cross;
    if (with_terms) {
      const std::string tag = "[" + std::to_string(b) + "->" + std::to_string(a) + "]";
      e.terms.push_back({"tail" + tag, tail_hi});
      e.terms.push_back({"pairing" + tag, pair});
      e.terms.push_back({"cross" + tag, cross});
    }
  }
  return e;
}

}  // namespace

TopologicalBound topological_bound(const NodeStatistics& stats, double n, const TailEstimate& tails,
                                   std::vector<double> cuts, int max_power) {
  if (!(n > 0.0)) throw std::invalid_argument("graph size must be positive");
  const std::size_t A = stats.num_labels();
  if (tails.labels != A) throw std::invalid_argument("tail estimate and statistics differ in label count");
  auto model = general_model(stats, n);
  if (cuts.empty()) {
    cuts.assign(A * A, 1.0);
    double best = std::numeric_limits<double>::infinity();
    int best_j = 0;
    for (int j = 0; j <= max_power; ++j) {
      std::vector<double> x(A * A, std::ldexp(1.0, j));
      double v = evaluate_general(model, tails, x, false).value;
      if (v < best) {
        best = v;
        best_j = j;
      }
    }
    cuts.assign(A * A, std::ldexp(1.0, best_j));
    for (int pass = 0; pass < 20 && model.blocks.size() > 1; ++pass) {
      bool improved = false;
      for (auto c : model.blocks) {
        for (int j = 0; j <= max_power; ++j) {
          auto x = cuts;
          x[c] = std::ldexp(1.0, j);
          double v = evaluate_general(model, tails, x, false).value;
          if (v < best - 1e-15) {
            best = v;
            cuts = std::move(x);
            improved = true;
          }
        }
      }
      if (!improved) break;
    }
  }
  if (cuts.size() != A * A) throw std::invalid_argument("cut points must cover every label pair");
  auto e = evaluate_general(model, tails, cuts, true);
  TopologicalBound r;
  r.form = "general";
  r.value = e.value;
  r.value_point = e.point;
  r.cuts = std::move(cuts);
  r.terms = std::move(e.terms);
  return r;
}

TopologicalBound topological_bound_classical(const NodeStatistics& stats, double n, const TailEstimate& tails,
                                             std::optional<double> cut, int max_power) {
  if (stats.num_labels() != 1) throw std::invalid_argument("classical form needs a single label");
  if (!(n > 0.0)) throw std::invalid_argument("graph size must be positive");
  const double dq = in_mass(stats, 0, 0, 0);
  const double dbar = stats.mean_degree();
  auto pairing = [&](double x) { return dq * x * (x + 1.0) / (2.0 * n * dbar); };
  double x;
  if (cut) {
    x = *cut;
  } else {
    double best = std::numeric_limits<double>::infinity();
    x = 1.0;
    for (int j = 0; j <= max_power; ++j) {
      double xj = std::ldexp(1.0, j);
      double v = tails.node_tail_upper(xj) + pairing(xj);
      if (v < best) {
        best = v;
        x = xj;
      }
    }
  }
  TopologicalBound r;
  r.form = "classical";
  r.cuts = {x};
  const double tail_hi = tails.node_tail_upper(x);
  r.value = tail_hi + pairing(x);
  r.value_point = tails.node_tail(x) + pairing(x);
  r.terms = {{"tail", tail_hi}, {"pairing", pairing(x)}};
  return r;
}

ConcentrationBound concentration_bound(const ConcentrationInputs& in) {
  if (!(in.eta > 0.0) || !(in.eps > 0.0) || !(in.x > 0.0) || !(in.s >= 1.0))
    throw std::invalid_argument("concentration bound needs eta, eps, x > 0 and s >= 1");
  const double n = in.n, t = in.t, eta = in.eta, eps = in.eps, x = in.x, s = in.s;
  const double xs = std::pow(2.0 / x, s);
  ConcentrationBound r;
  r.terms = {
      {"exp_x", 4.0 * std::exp(-eta * eta * n / (1152.0 * (1.0 + eps) * t * x * x))},
      {"moment_time", (1.0 + 12.0 / eta) * (1.0 + eps) * t * n * xs * in.moment},
      {"exp_eps", 2.0 * std::exp(-n * t * eps * eps / (2.0 * (1.0 + eps)))},
      {"exp_eta", 2.0 * std::exp(-eta * eta * n / (288.0 * (t + eta / 12.0)))},
      {"moment_degree", (1.0 + 4.0 / eta) * xs * n * in.mean_degree * in.moment},
      {"exp_degree", 2.0 * std::exp(-eta * eta * n / (128.0 * in.mean_degree * x * x))},
  };
  for (std::size_t i = 0; i < r.terms.size(); ++i) {
    if (std::isnan(r.terms[i].value)) r.terms[i].value = 0.0;
    r.value += r.terms[i].value;
    if (r.terms[i].value > r.terms[r.dominant].value) r.dominant = i;
  }
  return r;
}

ConcentrationInputs corollary_parameters(double n, double t, double eta, double eps, double mean_degree,
                                         double third_moment) {
  ConcentrationInputs in;
  in.n = n;
  in.t = t;
  in.eta = eta;
  in.eps = eps;
  in.x = std::pow(n, 4.0 / 9.0);
  in.s = 3.0;
  in.mean_degree = mean_degree;
  in.moment = third_moment;
  return in;
}

OdeDistanceBound ode_distance_bound(const OdeDistanceInputs& in) {
  if (!(in.L > 0.0)) throw std::invalid_argument("Lipschitz constant L must be positive");
  if (!(in.delta > 0.0)) throw InvalidStep("step delta must be positive");
  if (in.delta * in.L >= 1.0) throw InvalidStep("step delta must satisfy delta < 1/L");
  if (in.delta >= 1.0) throw InvalidStep("step delta must be below 1");
  if (in.m < 0) throw std::invalid_argument("step count must be nonnegative");
  const double gz = std::pow(1.0 - in.delta * in.L, -in.m);
  const double gy = std::pow(1.0 - in.delta, -in.m);
  OdeDistanceBound r;
  r.horizon = in.m * in.delta;
  r.zeta = in.zeta_gap0 * gz + (gz - 1.0) / in.L * in.tv_q;
  r.y = in.y_gap0 * gy + (gy - 1.0) * (in.M * r.zeta + in.tv_p);
  return r;
}

double tv_distance(const std::vector<WeightedDegree>& p, const std::vector<WeightedDegree>& q) {
  std::map<DegreeVector, double> diff;
  for (const auto& w : p) diff[w.k] += w.prob;
  for (const auto& w : q) diff[w.k] -= w.prob;
  double acc = 0.0;
  for (const auto& [k, v] : diff) acc += std::abs(v);
  return 0.5 * acc;
}

double stats_tv_p(const NodeStatistics& x, const NodeStatistics& y) {
  if (x.num_labels() != y.num_labels()) throw std::invalid_argument("statistics differ in label count");
  double best = 0.0;
  for (std::size_t a = 0; a < x.num_labels(); ++a) {
    bool px = x.p_label(a) > 0.0, py = y.p_label(a) > 0.0;
    if (!px && !py) continue;
    if (px != py) return 1.0;
    best = std::max(best, tv_distance(x.k_given_a(a), y.k_given_a(a)));
  }
  return best;
}

double stats_tv_q(const NodeStatistics& x, const NodeStatistics& y) {
  if (x.num_labels() != y.num_labels()) throw std::invalid_argument("statistics differ in label count");
  double best = 0.0;
  const std::size_t A = x.num_labels();
  for (std::size_t b = 0; b < A; ++b)
    for (std::size_t a = 0; a < A; ++a) {
      bool hx = x.has_q(b, a), hy = y.has_q(b, a);
      if (!hx && !hy) continue;
      if (hx != hy) return 1.0;
      best = std::max(best, tv_distance(x.q_k(b, a), y.q_k(b, a)));
    }
  return best;
}

namespace {

MeanFieldState random_state(std::size_t A, std::size_t X, Rng& rng) {
  MeanFieldState s(A, X);
  auto fill = [&](double* p) {
    double sum = 0.0;
    for (std::size_t w = 0; w < X; ++w) sum += (p[w] = rng.exponential(1.0));
    for (std::size_t w = 0; w < X; ++w) p[w] /= sum;
  };
  for (std::size_t i = 0; i < A * A; ++i) fill(&s.zeta_data()[i * X]);
  for (std::size_t a = 0; a < A; ++a) fill(&s.y_data()[a * X]);
  return s;
}

}  // namespace

LipschitzEstimate estimate_lipschitz(const MeanField& mf, std::size_t samples, std::uint64_t seed, double h) {
  const std::size_t A = mf.labels(), X = mf.states();
  Rng base(seed);
  LipschitzEstimate est;
  MeanFieldState e1, e2;
  for (std::size_t i = 0; i < samples; ++i) {
    Rng rng = base.split(i);
    auto z1 = random_state(A, X, rng);
    auto z3 = random_state(A, X, rng);
    // Alternate local secants (mixing weight h) with global ones.
    const double lambda = (i % 2 == 0) ? h : 1.0;
    MeanFieldState z2 = z1;
    for (std::size_t j = 0; j < z2.zeta_data().size(); ++j)
      z2.zeta_data()[j] = (1 - lambda) * z1.zeta_data()[j] + lambda * z3.zeta_data()[j];
    mf.evaluate(z1, e1);
    mf.evaluate(z2, e2);
    double dz = 0.0, df = 0.0, dpsi = 0.0;
    for (std::size_t a = 0; a < A; ++a)
      for (std::size_t b = 0; b < A; ++b) {
        if (!mf.active(a, b)) continue;
        for (std::size_t w = 0; w < X; ++w) {
          double d = z1.zeta(w, a, b) - z2.zeta(w, a, b);
          dz = std::max(dz, std::abs(d));
          df = std::max(df, std::abs((e1.zeta(w, a, b) - z1.zeta(w, a, b)) - (e2.zeta(w, a, b) - z2.zeta(w, a, b))));
        }
      }
    for (std::size_t a = 0; a < A; ++a)
      if (mf.label_present(a))
        for (std::size_t w = 0; w < X; ++w) dpsi = std::max(dpsi, std::abs(e1.y(w, a) - e2.y(w, a)));
    if (dz > 0.0) {
      est.L = std::max(est.L, df / dz);
      est.M = std::max(est.M, dpsi / dz);
    }
  }
  est.method = "sampled secants over " + std::to_string(samples) + " random simplex pairs (half local, step " +
               std::to_string(h) + ")";
  return est;
}

void write_terms_csv(const std::vector<BoundTerm>& terms, std::ostream& out) {
  out << "term,value\n";
  out.precision(17);
  for (const auto& t : terms) out << t.name << ',' << t.value << '\n';
}

}  // namespace asd
