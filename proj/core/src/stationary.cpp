#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "asd/meanfield.hpp"
#include "asd/rng.hpp"
#include "combinatorics.hpp"

namespace asd {

namespace {

struct Block {
  std::size_t a, b;
};

std::vector<Block> active_blocks(const MeanField& mf) {
  std::vector<Block> out;
  for (std::size_t a = 0; a < mf.labels(); ++a)
    for (std::size_t b = 0; b < mf.labels(); ++b)
      if (mf.active(a, b)) out.push_back({a, b});
  return out;
}

// Reduced residual F(u) = reduce(phi(expand(u))) - u.
std::vector<double> residual(const MeanField& mf, const std::vector<double>& u, const MeanFieldState& base) {
  auto s = expand_state(mf, u, base);
  MeanFieldState phi;
  mf.evaluate(s, phi);
  auto r = reduce_state(mf, phi);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= u[i];
  return r;
}

double inf_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

Eigen::MatrixXd to_matrix(const std::vector<std::vector<double>>& J) {
  const auto D = J.size();
  Eigen::MatrixXd M(D, D);
  for (std::size_t i = 0; i < D; ++i)
    for (std::size_t j = 0; j < D; ++j) M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = J[i][j];
  return M;
}

bool newton(const MeanField& mf, std::vector<double>& u, const MeanFieldState& base, const StationaryConfig& cfg) {
  auto F = residual(mf, u, base);
  double norm = inf_norm(F);
  for (int it = 0; it < cfg.newton_iterations && norm > cfg.tol; ++it) {
    auto J = reduced_jacobian(mf, expand_state(mf, u, base), cfg.fd_h);
    Eigen::MatrixXd M = to_matrix(J);
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(u.size()));
    for (std::size_t i = 0; i < u.size(); ++i) rhs(static_cast<Eigen::Index>(i)) = -F[i];
    Eigen::VectorXd step = M.colPivHouseholderQr().solve(rhs);
    if (!step.allFinite()) return false;
    double lambda = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 30; ++ls) {
      std::vector<double> trial(u);
      for (std::size_t i = 0; i < u.size(); ++i) trial[i] += lambda * step(static_cast<Eigen::Index>(i));
      auto Ft = residual(mf, trial, base);
      double nt = inf_norm(Ft);
      if (std::isfinite(nt) && nt < norm) {
        u = std::move(trial);
        F = std::move(Ft);
        norm = nt;
        accepted = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!accepted) break;
  }
  return norm <= cfg.tol;
}

void damped(const MeanField& mf, std::vector<double>& u, const MeanFieldState& base, const StationaryConfig& cfg) {
  for (int it = 0; it < cfg.max_iterations; ++it) {
    auto F = residual(mf, u, base);
    for (std::size_t i = 0; i < u.size(); ++i) u[i] += cfg.damping * F[i];
    if (inf_norm(F) <= cfg.tol) break;
  }
}

bool inside_simplex(const MeanField& mf, const std::vector<double>& u, double slack) {
  const std::size_t X = mf.states();
  const std::size_t F = X - 1;
  for (std::size_t blk = 0; blk * F < u.size(); ++blk) {
    double sum = 0.0;
    for (std::size_t g = 0; g < F; ++g) {
      double v = u[blk * F + g];
      if (v < -slack || v > 1.0 + slack) return false;
      sum += v;
    }
    if (sum > 1.0 + slack) return false;
  }
  return true;
}

std::vector<std::vector<double>> simplex_grid(std::size_t X, int grid) {
  std::vector<std::vector<double>> pts;
  const int m = std::max(1, grid - 1);
  detail::for_each_composition(m, X, [&](const std::vector<int>& x) {
    std::vector<double> p(X);
    for (std::size_t g = 0; g < X; ++g) p[g] = static_cast<double>(x[g]) / m;
    pts.push_back(std::move(p));
  });
  return pts;
}

std::vector<std::vector<double>> seeds(const MeanField& mf, std::size_t blocks, const StationaryConfig& cfg) {
  const std::size_t X = mf.states();
  auto pts = simplex_grid(X, cfg.grid);
  std::vector<std::vector<double>> out;
  auto push = [&](const std::vector<std::size_t>& choice) {
    std::vector<double> u;
    for (auto c : choice) u.insert(u.end(), pts[c].begin(), pts[c].end() - 1);
    out.push_back(std::move(u));
  };
  double total = std::pow(static_cast<double>(pts.size()), static_cast<double>(blocks));
  if (total <= static_cast<double>(cfg.max_seeds)) {
    std::vector<std::size_t> idx(blocks, 0);
    while (true) {
      push(idx);
      std::size_t j = 0;
      while (j < blocks && ++idx[j] == pts.size()) idx[j++] = 0;
      if (j == blocks) break;
    }
    return out;
  }
  for (std::size_t c = 0; c < pts.size(); ++c) push(std::vector<std::size_t>(blocks, c));
  Rng rng = Rng(cfg.seed).split(0x5eed);
  while (out.size() < cfg.max_seeds) {
    std::vector<std::size_t> idx(blocks);
    for (auto& i : idx) i = static_cast<std::size_t>(rng.below(pts.size()));
    push(idx);
  }
  return out;
}

}  // namespace

std::vector<double> reduce_state(const MeanField& mf, const MeanFieldState& s) {
  std::vector<double> u;
  const std::size_t X = mf.states();
  for (const auto& blk : active_blocks(mf))
    for (std::size_t g = 0; g + 1 < X; ++g) u.push_back(s.zeta(g, blk.a, blk.b));
  return u;
}

MeanFieldState expand_state(const MeanField& mf, const std::vector<double>& u, const MeanFieldState& base) {
  MeanFieldState s = base;
  const std::size_t X = mf.states();
  std::size_t i = 0;
  for (const auto& blk : active_blocks(mf)) {
    double sum = 0.0;
    for (std::size_t g = 0; g + 1 < X; ++g) {
      s.zeta(g, blk.a, blk.b) = u.at(i++);
      sum += s.zeta(g, blk.a, blk.b);
    }
    s.zeta(X - 1, blk.a, blk.b) = 1.0 - sum;
  }
  if (i != u.size()) throw std::invalid_argument("reduced vector has wrong length");
  return s;
}

std::vector<std::vector<double>> reduced_jacobian(const MeanField& mf, const MeanFieldState& s, double h) {
  auto u = reduce_state(mf, s);
  const auto D = u.size();
  std::vector<std::vector<double>> J(D, std::vector<double>(D, 0.0));
  for (std::size_t j = 0; j < D; ++j) {
    auto up = u, dn = u;
    up[j] += h;
    dn[j] -= h;
    auto Fp = residual(mf, up, s), Fm = residual(mf, dn, s);
    for (std::size_t i = 0; i < D; ++i) J[i][j] = (Fp[i] - Fm[i]) / (2 * h);
  }
  return J;
}

StationaryReport find_stationary(const MeanField& mf, const StationaryConfig& cfg) {
  if (cfg.grid < 2) throw std::invalid_argument("stationary grid needs at least 2 points per dimension");
  const std::size_t X = mf.states();
  const auto blocks = active_blocks(mf).size();
  std::vector<double> uniform(X, 1.0 / static_cast<double>(X));
  const MeanFieldState base = MeanFieldState::uniform_blocks(mf.labels(), uniform);

  StationaryReport rep;
  std::vector<std::vector<double>> found;
  auto consider = [&](std::vector<double> u) {
    if (!inside_simplex(mf, u, 1e-7)) return false;
    for (const auto& f : found) {
      double d = 0.0;
      for (std::size_t i = 0; i < u.size(); ++i) d = std::max(d, std::abs(u[i] - f[i]));
      if (d <= cfg.dedup) return true;
    }
    found.push_back(std::move(u));
    return true;
  };

  auto start = seeds(mf, blocks, cfg);
  rep.seeds = start.size();
  for (const auto& s0 : start) {
    bool ok = false;
    auto u = s0;
    if (newton(mf, u, base, cfg)) ok = consider(u) || ok;
    u = s0;
    damped(mf, u, base, cfg);
    if (newton(mf, u, base, cfg)) ok = consider(u) || ok;
    if (!ok) ++rep.failed_seeds;
  }

  for (const auto& u : found) {
    FixedPoint fp;
    fp.state = expand_state(mf, u, base);
    MeanFieldState phi;
    mf.evaluate(fp.state, phi);
    for (std::size_t a = 0; a < mf.labels(); ++a)
      if (mf.label_present(a))
        for (std::size_t w = 0; w < X; ++w) fp.state.y(w, a) = phi.y(w, a);
    double res = 0.0;
    for (std::size_t a = 0; a < mf.labels(); ++a)
      for (std::size_t b = 0; b < mf.labels(); ++b)
        if (mf.active(a, b))
          for (std::size_t w = 0; w < X; ++w) res = std::max(res, std::abs(phi.zeta(w, a, b) - fp.state.zeta(w, a, b)));
    fp.residual = res;
    if (!u.empty()) {
      Eigen::EigenSolver<Eigen::MatrixXd> es(to_matrix(reduced_jacobian(mf, fp.state, cfg.fd_h)), false);
      fp.max_real_eigenvalue = -std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        fp.eigenvalues.push_back(es.eigenvalues()(i));
        fp.max_real_eigenvalue = std::max(fp.max_real_eigenvalue, es.eigenvalues()(i).real());
      }
    } else {
      fp.max_real_eigenvalue = -1.0;
    }
    if (fp.max_real_eigenvalue < -cfg.eig_tol)
      fp.classification = "stable";
    else if (fp.max_real_eigenvalue > cfg.eig_tol)
      fp.classification = "unstable";
    else
      fp.classification = "marginal";
    rep.points.push_back(std::move(fp));
  }
  std::sort(rep.points.begin(), rep.points.end(), [&](const FixedPoint& l, const FixedPoint& r) {
    return reduce_state(mf, l.state) < reduce_state(mf, r.state);
  });
  return rep;
}

MeanFieldState basin_seed(const MeanField& mf, const BasinConfig& cfg, double x, double y) {
  const std::size_t X = mf.states();
  if (cfg.axis_x >= X || (X > 2 && (cfg.axis_y >= X || cfg.axis_y == cfg.axis_x)))
    throw std::invalid_argument("basin axes must name distinct states");
  std::vector<double> dist(X, 0.0);
  if (X == 2) {
    dist[cfg.axis_x] = x;
    dist[1 - cfg.axis_x] = 1.0 - x;
  } else {
    dist[cfg.axis_x] = x;
    dist[cfg.axis_y] = y;
    double rest = (1.0 - x - y) / static_cast<double>(X - 2);
    for (std::size_t g = 0; g < X; ++g)
      if (g != cfg.axis_x && g != cfg.axis_y) dist[g] = rest;
  }
  return MeanFieldState::uniform_blocks(mf.labels(), dist);
}

namespace {

void rk4_step(const MeanField& mf, MeanFieldState& s, double h) {
  MeanFieldState k1, k2, k3, k4, tmp = s;
  auto add = [](MeanFieldState& out, const MeanFieldState& x, double c, const MeanFieldState& d) {
    for (std::size_t i = 0; i < out.zeta_data().size(); ++i) out.zeta_data()[i] = x.zeta_data()[i] + c * d.zeta_data()[i];
    for (std::size_t i = 0; i < out.y_data().size(); ++i) out.y_data()[i] = x.y_data()[i] + c * d.y_data()[i];
  };
  mf.rhs(s, k1);
  add(tmp, s, h / 2, k1);
  mf.rhs(tmp, k2);
  add(tmp, s, h / 2, k2);
  mf.rhs(tmp, k3);
  add(tmp, s, h, k3);
  mf.rhs(tmp, k4);
  for (std::size_t i = 0; i < s.zeta_data().size(); ++i)
    s.zeta_data()[i] += h / 6 * (k1.zeta_data()[i] + 2 * k2.zeta_data()[i] + 2 * k3.zeta_data()[i] + k4.zeta_data()[i]);
  for (std::size_t i = 0; i < s.y_data().size(); ++i)
    s.y_data()[i] += h / 6 * (k1.y_data()[i] + 2 * k2.y_data()[i] + 2 * k3.y_data()[i] + k4.y_data()[i]);
  const std::size_t X = s.states();
  for (auto* data : {&s.zeta_data(), &s.y_data()})
    for (std::size_t b = 0; b + X <= data->size(); b += X) {
      double sum = 0.0;
      for (std::size_t w = b; w < b + X; ++w) sum += (*data)[w] = std::clamp((*data)[w], 0.0, 1.0);
      if (sum > 0.0)
        for (std::size_t w = b; w < b + X; ++w) (*data)[w] /= sum;
    }
}

}  // namespace

BasinMap map_basins(const MeanField& mf, const StationaryReport& report, const BasinConfig& cfg) {
  if (cfg.resolution < 2) throw std::invalid_argument("basin resolution must be at least 2");
  BasinMap map;
  for (const auto& p : report.points)
    if (p.classification == "stable") map.attractors.push_back(p);
  std::vector<std::vector<double>> targets;
  for (const auto& p : map.attractors) targets.push_back(reduce_state(mf, p.state));
  std::vector<std::vector<double>> saddles;
  for (const auto& p : report.points)
    if (p.classification != "stable") saddles.push_back(reduce_state(mf, p.state));

  const int R = cfg.resolution;
  for (int i = 0; i < R; ++i) map.xs.push_back(static_cast<double>(i) / (R - 1));
  const bool planar = mf.states() > 2;
  if (planar) map.ys = map.xs;
  const int rows = planar ? R : 1;
  const auto steps = static_cast<long long>(std::llround(cfg.horizon / cfg.h));

  auto within = [&](const std::vector<double>& u, const std::vector<double>& v) {
    double d = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) d = std::max(d, std::abs(u[i] - v[i]));
    return d <= cfg.radius;
  };
  // -1 also when the trajectory has landed on a non-attracting point: from there only roundoff moves it.
  auto nearest = [&](const MeanFieldState& s, bool& stuck) {
    auto u = reduce_state(mf, s);
    for (std::size_t t = 0; t < targets.size(); ++t)
      if (within(u, targets[t])) return static_cast<int>(t);
    for (const auto& v : saddles) stuck = stuck || within(u, v);
    return -1;
  };

  for (int j = 0; j < rows; ++j) {
    for (int i = 0; i < R; ++i) {
      double x = map.xs[static_cast<std::size_t>(i)];
      double y = planar ? map.ys[static_cast<std::size_t>(j)] : 0.0;
      if (planar && x + y > 1.0 + 1e-12) {
        map.label.push_back(-2);
        continue;
      }
      auto s = basin_seed(mf, cfg, x, std::min(y, 1.0 - x));
      bool stuck = false;
      int lab = nearest(s, stuck);
      for (long long st = 0; st < steps && lab < 0 && !stuck; ++st) {
        rk4_step(mf, s, cfg.h);
        lab = nearest(s, stuck);
      }
      map.label.push_back(lab);
    }
  }
  return map;
}

}  // namespace asd
