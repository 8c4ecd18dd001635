#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <sstream>

#include "asd/csv.hpp"
#include "asd/errors.hpp"
#include "asd/meanfield.hpp"

using namespace asd;

namespace {

std::vector<double> random_simplex(Rng& rng, std::size_t X) {
  std::vector<double> p(X);
  double s = 0;
  for (auto& x : p) s += x = rng.exponential(1.0);
  for (auto& x : p) x /= s;
  return p;
}

MeanFieldState random_state(Rng& rng, std::size_t A, std::size_t X) {
  MeanFieldState s(A, X);
  for (std::size_t a = 0; a < A; ++a) {
    for (std::size_t b = 0; b < A; ++b) {
      auto p = random_simplex(rng, X);
      for (std::size_t w = 0; w < X; ++w) s.zeta(w, a, b) = p[w];
    }
    auto p = random_simplex(rng, X);
    for (std::size_t w = 0; w < X; ++w) s.y(w, a) = p[w];
  }
  return s;
}

// Brute force over every assignment of states to the individual children.
std::vector<double> brute_phi(const DegreeVector& k, std::size_t a, const MeanFieldState& s, const UpdateKernel& kernel) {
  const std::size_t A = k.size(), X = kernel.states().size();
  std::vector<std::size_t> child_label;
  for (std::size_t c = 0; c < A; ++c)
    for (int j = 0; j < k[c]; ++j) child_label.push_back(c);
  std::vector<double> out(X, 0.0), theta(X);
  std::vector<std::size_t> st(child_label.size(), 0);
  std::function<void(std::size_t, double)> rec = [&](std::size_t i, double w) {
    if (i == st.size()) {
      NeighborCounts xi(A, X);
      for (std::size_t j = 0; j < st.size(); ++j) ++xi(child_label[j], st[j]);
      kernel.evaluate(a, xi, theta);
      for (std::size_t x = 0; x < X; ++x) out[x] += w * theta[x];
      return;
    }
    for (std::size_t x = 0; x < X; ++x) {
      st[i] = x;
      rec(i + 1, w * s.zeta(x, child_label[i], a));
    }
  };
  rec(0, 1.0);
  return out;
}

void for_each_k(std::size_t A, int max_total, const std::function<void(const DegreeVector&)>& f) {
  DegreeVector k(A);
  std::function<void(std::size_t, int)> rec = [&](std::size_t i, int left) {
    if (i == A) {
      f(k);
      return;
    }
    for (int v = 0; v <= left; ++v) {
      k[i] = v;
      rec(i + 1, left - v);
    }
  };
  rec(0, max_total);
}

double max_abs_diff(const std::vector<double>& x, const std::vector<double>& y) {
  double m = 0;
  for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x[i] - y[i]));
  return m;
}

}  // namespace

TEST(PhiVarphi, ZeroDegreeIsKernelAtZero) {
  MeanFieldState s = MeanFieldState::uniform_blocks(1, {0.2, 0.3, 0.5});
  auto r = phi_varphi(DegreeVector{0}, 0, s, *erg_kernel());
  for (double x : r.prob) EXPECT_NEAR(x, 1.0 / 3, 1e-15);
  auto t = phi_varphi(DegreeVector{0}, 0, s, *tltm_kernel(1, 1));
  EXPECT_EQ(t.prob, (std::vector<double>{0, 1, 0}));
  EXPECT_TRUE(t.exact);
}

TEST(PhiVarphi, DegenerateChildrenGiveForcedCounts) {
  // Label-0 children all in state 1, label-1 children all in state -1 (states -1,0,1).
  MeanFieldState s(2, 3);
  s.zeta(2, 0, 0) = 1;
  s.zeta(0, 1, 0) = 1;
  s.zeta(2, 0, 1) = 1;
  s.zeta(0, 1, 1) = 1;
  auto r = phi_varphi(DegreeVector{4, 1}, 0, s, *tltm_kernel(3, 3));
  EXPECT_EQ(r.prob, (std::vector<double>{0, 0, 1}));
  r = phi_varphi(DegreeVector{3, 1}, 0, s, *tltm_kernel(3, 3));
  EXPECT_EQ(r.prob, (std::vector<double>{0, 1, 0}));
}

TEST(PhiVarphi, TltmMatchesNeighborTupleBruteForce) {
  // (zeta_1, zeta_-1, zeta_0) = (0.5, 0.2, 0.3) in the state order -1, 0, 1.
  auto s = MeanFieldState::uniform_blocks(1, {0.2, 0.3, 0.5});
  auto k = tltm_kernel(2, 2);
  auto r = phi_varphi(DegreeVector{3}, 0, s, *k);
  auto b = brute_phi(DegreeVector{3}, 0, s, *k);
  EXPECT_LE(max_abs_diff(r.prob, b), 1e-15);
  // P(S >= 2) with three children: (1,1,1), (1,1,0) arrangements.
  double up = std::pow(0.5, 3) + 3 * 0.25 * 0.3;
  EXPECT_NEAR(r.prob[2], up, 1e-15);
}

TEST(PhiVarphi, GeneralKernelsMatchBruteForce) {
  Rng rng(31);
  auto table = table_kernel(StateSet{"a", "b", "c"},
                            {{{{1, 0, 0, 0, 1, 0}, {0.1, 0.2, 0.7}}, {{0, 0, 1, 1, 0, 0}, {1, 0, 0}}},
                             {{{0, 1, 0, 0, 0, 1}, {0.5, 0.5, 0}}}});
  std::vector<KernelPtr> kernels{tltm_kernel(std::vector<TltmThresholds>{{1, 2}, {2, 1}}), erg_kernel(1, 2),
                                 brca_kernel(std::vector<bool>{true, false}), table};
  for (const auto& kernel : kernels) {
    const std::size_t X = kernel->states().size();
    for (int trial = 0; trial < 3; ++trial) {
      auto s = random_state(rng, 2, X);
      for_each_k(2, 4, [&](const DegreeVector& k) {
        for (std::size_t a = 0; a < 2; ++a) {
          auto r = phi_varphi(k, a, s, *kernel);
          ASSERT_LE(max_abs_diff(r.prob, brute_phi(k, a, s, *kernel)), 1e-13) << kernel->name();
        }
      });
    }
  }
}

TEST(PhiVarphi, StochasticitySweep) {
  Rng rng(5);
  std::vector<KernelPtr> kernels{tltm_kernel(2, 2), brca_kernel(true), brca_kernel(false), erg_kernel(1, 2)};
  for (const auto& kernel : kernels) {
    const std::size_t X = kernel->states().size();
    for (std::size_t A : {std::size_t{1}, std::size_t{2}}) {
      auto s = random_state(rng, A, X);
      for_each_k(A, 8, [&](const DegreeVector& k) {
        auto r = phi_varphi(k, 0, s, *kernel);
        double sum = 0;
        for (double x : r.prob) {
          ASSERT_GE(x, -1e-15);
          sum += x;
        }
        ASSERT_NEAR(sum, 1.0, 1e-10);
      });
    }
  }
}

TEST(PhiVarphi, MonteCarloWithinFourStandardErrors) {
  Rng rng(8);
  auto s = random_state(rng, 1, 3);
  PhiOptions mc;
  mc.mode = PhiMode::monte_carlo;
  mc.mc_samples = 1000000;
  mc.seed = 12;
  for (const auto& kernel : {erg_kernel(1, 2), tltm_kernel(2, 3)}) {
    auto ex = phi_varphi(DegreeVector{10}, 0, s, *kernel);
    auto r = phi_varphi(DegreeVector{10}, 0, s, *kernel, mc);
    EXPECT_FALSE(r.exact);
    EXPECT_EQ(r.samples, mc.mc_samples);
    for (std::size_t w = 0; w < 3; ++w) EXPECT_LE(std::abs(r.prob[w] - ex.prob[w]), 4 * r.std_error[w] + 1e-12);
    auto again = phi_varphi(DegreeVector{10}, 0, s, *kernel, mc);
    EXPECT_EQ(again.prob, r.prob);
  }
}

TEST(PhiVarphi, BudgetSelectsMode) {
  auto s = MeanFieldState::uniform_blocks(1, {0.2, 0.3, 0.5});
  PhiOptions forced;
  forced.mode = PhiMode::exact;
  forced.budget = 10;
  EXPECT_THROW(phi_varphi(DegreeVector{10}, 0, s, *erg_kernel(), forced), BudgetExceeded);
  PhiOptions automatic;
  automatic.budget = 10;
  automatic.mc_samples = 1000;
  EXPECT_FALSE(phi_varphi(DegreeVector{10}, 0, s, *erg_kernel(), automatic).exact);
  EXPECT_TRUE(phi_varphi(DegreeVector{2}, 0, s, *erg_kernel(), automatic).exact);
}

TEST(Closed, TltmBoundaryValues) {
  for (int k : {1, 5, 10})
    for (int r = 0; r <= k; ++r) {
      EXPECT_NEAR(tltm_phi_plus(k, r, 1, 0), 1.0, 1e-12);
      if (r >= 1) {
        for (double z : {0.0, 0.3, 1.0}) EXPECT_EQ(tltm_phi_plus(k, r, 0, z), 0.0);
      }
    }
  EXPECT_THROW(tltm_phi_plus(3, 4, 0.1, 0.1), std::domain_error);
}

TEST(Closed, TltmMonotoneInXAndZ) {
  for (int r : {2, 3}) {
    const int N = 100;
    for (int i = 0; i <= N; ++i)
      for (int j = 0; i + j <= N; ++j) {
        double x = double(i) / N, z = double(j) / N;
        double f = tltm_phi_plus(10, r, x, z);
        if (i + j + 1 <= N) {
          ASSERT_GE(tltm_phi_plus(10, r, x + 1.0 / N, z), f - 1e-15);
          ASSERT_LE(tltm_phi_plus(10, r, x, z + 1.0 / N), f + 1e-15);
        }
      }
  }
}

TEST(Closed, TltmMatchesGeneralEvaluator) {
  auto stats = regular_statistics(10, {1.0});
  for (int r : {1, 2, 3, 5}) {
    auto kernel = tltm_kernel(r, r);
    MeanField mf(stats, kernel);
    for (double x : {0.0, 0.05, 0.3, 0.6}) {
      for (double z : {0.0, 0.1, 0.35}) {
        if (x + z > 1) continue;
        auto s = MeanFieldState::uniform_blocks(1, {z, 1 - x - z, x});
        EXPECT_NEAR(mf.phi_bar(0, 0, s)[2], tltm_phi_plus(10, r, x, z), 1e-12);
        // Symmetry of the rule: the -1 component is the mirrored closed form.
        EXPECT_NEAR(mf.phi_bar(0, 0, s)[0], tltm_phi_plus(10, r, z, x), 1e-12);
      }
    }
  }
}

TEST(Closed, BrcaThresholdFromDerivativeAtHalf) {
  for (int k : {3, 5, 11, 21}) {
    // (2 alpha - 1) phi1'(1/2) = 1 at the threshold.
    const double h = 1e-5;
    double d = (brca_phi1(k, 0.5 + h) - brca_phi1(k, 0.5 - h)) / (2 * h);
    EXPECT_NEAR(brca_alpha_th(k), 0.5 * (1 + 1 / d), 1e-8) << k;
  }
  EXPECT_NEAR(brca_alpha_th(21), 0.6351, 5e-5);
  EXPECT_NEAR(brca_phi1(21, 0.5), 0.5, 1e-15);
  EXPECT_NEAR(brca_phi1(4, 0.5), 0.5, 1e-15);
}

TEST(Closed, BrcaFixedPointRegimes) {
  auto hi = brca_fixed_points(21, 0.7);
  ASSERT_EQ(hi.size(), 3u);
  EXPECT_NEAR(hi[1], 0.5, 1e-15);
  EXPECT_NEAR(hi[0] + hi[2], 1.0, 1e-12);
  for (double y : hi) EXPECT_NEAR(brca_rhs(21, 0.7, y), 0.0, 1e-12);
  auto lo = brca_fixed_points(21, 0.6);
  ASSERT_EQ(lo.size(), 1u);
  EXPECT_NEAR(lo[0], 0.5, 1e-15);
}

TEST(Closed, BrcaQuadraticLocatesDerivativeZeros) {
  // y(1-y) = ((2 alpha - 1) k C(k-1, k/2))^{-1/floor(k/2)} gives the critical points of the RHS.
  const int k = 21;
  const double alpha = 0.7;
  double c = 1;
  for (int i = 0; i < 10; ++i) c = c * (20 - i) / (i + 1);
  double prod = std::pow((2 * alpha - 1) * k * c, -1.0 / 10);
  double y = 0.5 - std::sqrt(0.25 - prod);
  const double h = 1e-6;
  double d = (brca_rhs(k, alpha, y + h) - brca_rhs(k, alpha, y - h)) / (2 * h);
  EXPECT_NEAR(d, 0.0, 1e-6);
  auto fp = brca_fixed_points(k, alpha);
  EXPECT_LT(fp[0], y);
  EXPECT_GT(fp[2], 1 - y);
}

TEST(Closed, ErgPiMatchesGeneralEvaluator) {
  Rng rng(2);
  for (int k : {1, 3, 6, 7}) {
    MeanField mf(regular_statistics(k, {1.0}), erg_kernel(1, 2));
    for (int i = 0; i < 5; ++i) {
      auto p = random_simplex(rng, 3);
      auto s = MeanFieldState::uniform_blocks(1, p);
      auto pi = erg_pi(k, {p[0], p[1], p[2]});
      auto g = mf.phi_bar(0, 0, s);
      for (std::size_t w = 0; w < 3; ++w) EXPECT_NEAR(pi[w], g[w], 1e-12) << "k=" << k;
    }
  }
}

TEST(MeanField, PhiBarPointMassEqualsPhiVarphi) {
  auto stats = regular_statistics(4, {1.0});
  auto kernel = brca_kernel(false);
  MeanField mf(stats, kernel);
  auto s = MeanFieldState::uniform_blocks(1, {0.3, 0.7});
  EXPECT_LE(max_abs_diff(mf.phi_bar(0, 0, s), phi_varphi(DegreeVector{4}, 0, s, *kernel).prob), 1e-15);
  EXPECT_LE(max_abs_diff(mf.psi_bar(0, s), phi_varphi(DegreeVector{4}, 0, s, *kernel).prob), 1e-15);
  EXPECT_LE(max_abs_diff(phi_bar(0, 0, s, stats, kernel), mf.phi_bar(0, 0, s)), 0.0);
}

TEST(MeanField, TwoPointMixtures) {
  // p_{k} = (w, 1-w) on k=1,3; q weights by in-degree d=k: (w, 3(1-w)) normalized.
  const double w = 0.3;
  NodeStatistics stats(LabelSet{}, {{DegreeVector{1}, DegreeVector{1}, 0, w}, {DegreeVector{3}, DegreeVector{3}, 0, 1 - w}});
  auto kernel = erg_kernel();
  MeanField mf(stats, kernel);
  auto s = MeanFieldState::uniform_blocks(1, {0.5, 0.3, 0.2});
  auto f1 = phi_varphi(DegreeVector{1}, 0, s, *kernel).prob;
  auto f3 = phi_varphi(DegreeVector{3}, 0, s, *kernel).prob;
  const double q1 = w / (w + 3 * (1 - w));
  auto psi = mf.psi_bar(0, s), phi = mf.phi_bar(0, 0, s);
  for (std::size_t x = 0; x < 3; ++x) {
    EXPECT_NEAR(psi[x], w * f1[x] + (1 - w) * f3[x], 1e-15);
    EXPECT_NEAR(phi[x], q1 * f1[x] + (1 - q1) * f3[x], 1e-15);
  }
}

TEST(MeanField, InactiveBlocksAreFrozen) {
  // No edges from label 1 into label 0: zeta(.|0,1) has no parent law.
  auto g = sample_cbm({50, 50}, {{3, 2}, {0, 3}}, 100, 4);
  auto stats = extract_statistics(g);
  MeanField mf(stats, brca_kernel(true));
  EXPECT_TRUE(mf.active(0, 0));
  EXPECT_FALSE(mf.active(0, 1));
  EXPECT_TRUE(mf.active(1, 0));
  Rng rng(1);
  auto s = random_state(rng, 2, 2);
  MeanFieldState ds;
  mf.rhs(s, ds);
  EXPECT_EQ(ds.zeta(0, 0, 1), 0.0);
  EXPECT_EQ(ds.zeta(1, 0, 1), 0.0);
}

TEST(MeanField, TruncationDiscardsAtMostTheTolerance) {
  std::vector<StatCell> cells;
  double z = 0;
  for (int k = 1; k <= 400; ++k) z += std::pow(k, -2.5);
  for (int k = 1; k <= 400; ++k) cells.push_back({DegreeVector{k}, DegreeVector{k}, 0, std::pow(k, -2.5) / z});
  NodeStatistics stats(LabelSet{}, cells);
  MeanField mf(stats, brca_kernel(true), {}, 1e-3);
  EXPECT_GT(mf.truncation().p_discarded[0], 0.0);
  EXPECT_LE(mf.truncation().p_discarded[0], 1e-3);
  EXPECT_LE(mf.truncation().q_discarded[0], 1e-3);
}

TEST(Integrate, FixedPointStaysPut) {
  MeanField mf(regular_statistics(6, {1.0}), erg_kernel());
  auto s = MeanFieldState::uniform_blocks(1, {1.0 / 3, 1.0 / 3, 1.0 / 3});
  auto tr = integrate(s, mf, {0.01, 5.0, 1.0});
  ASSERT_EQ(tr.times.size(), 6u);
  for (const auto& st : tr.states)
    for (double v : st.zeta_data()) EXPECT_NEAR(v, 1.0 / 3, 1e-10);
}

TEST(Integrate, BrcaMatchesScalarClosedForm) {
  const int k = 7;
  const double alpha = 0.8;
  auto stats = regular_statistics(k, {alpha, 1 - alpha});
  MeanField mf(stats, brca_kernel(std::vector<bool>{true, false}));
  const double y0 = 0.3;
  auto s = MeanFieldState::uniform_blocks(2, {1 - y0, y0});
  OdeConfig cfg{0.01, 5.0, 0.0};
  auto tr = integrate(s, mf, cfg);
  double y = y0, sup = 0;
  auto f = [&](double v) { return brca_rhs(k, alpha, v); };
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    const auto& st = tr.states[i];
    double agg = alpha * st.zeta(1, 0, 0) + (1 - alpha) * st.zeta(1, 1, 0);
    sup = std::max(sup, std::abs(agg - y));
    sup = std::max(sup, std::abs(aggregate_y(st, stats)[1] - y));
    double h = cfg.h, k1 = f(y), k2 = f(y + h / 2 * k1), k3 = f(y + h / 2 * k2), k4 = f(y + h * k3);
    y += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  EXPECT_LE(sup, 1e-8);
}

TEST(Integrate, SimplexForwardInvariance) {
  MeanField mf(regular_statistics(10, {1.0}), tltm_kernel(2, 2));
  Rng rng(17);
  for (int i = 0; i < 100; ++i) {
    auto s = random_state(rng, 1, 3);
    auto tr = integrate(s, mf, {0.01, 50.0, 1.0});
    EXPECT_LE(tr.renormalizations, tr.steps / 1000);
    for (const auto& st : tr.states) {
      double sz = 0, sy = 0;
      for (double v : st.zeta_data()) {
        ASSERT_GE(v, -1e-9);
        ASSERT_LE(v, 1 + 1e-9);
        sz += v;
      }
      for (double v : st.y_data()) {
        ASSERT_GE(v, -1e-9);
        ASSERT_LE(v, 1 + 1e-9);
        sy += v;
      }
      ASSERT_NEAR(sz, 1.0, 1e-9);
      ASSERT_NEAR(sy, 1.0, 1e-9);
    }
  }
}

TEST(Integrate, OversizedStepIsRejected) {
  MeanField mf(regular_statistics(10, {1.0}), tltm_kernel(1, 1));
  auto s = MeanFieldState::uniform_blocks(1, {0.05, 0.9, 0.05});
  EXPECT_THROW(integrate(s, mf, {2.5, 50.0, 0.0}), StepTooLarge);
}

TEST(Jacobian, HalfStepAgreement) {
  auto stats = regular_statistics(5, {0.6, 0.4});
  MeanField mf(stats, tltm_kernel(std::vector<TltmThresholds>{{1, 1}, {2, 2}}));
  Rng rng(4);
  for (int i = 0; i < 20; ++i) {
    auto s = random_state(rng, 2, 3);
    auto j1 = reduced_jacobian(mf, s, 1e-4), j2 = reduced_jacobian(mf, s, 5e-5);
    double scale = 0, diff = 0;
    for (std::size_t r = 0; r < j1.size(); ++r)
      for (std::size_t c = 0; c < j1[r].size(); ++c) {
        scale = std::max(scale, std::abs(j1[r][c]));
        diff = std::max(diff, std::abs(j1[r][c] - j2[r][c]));
      }
    EXPECT_LE(diff, 1e-4 * std::max(scale, 1.0));
  }
}

TEST(Jacobian, ReduceExpandRoundTrip) {
  MeanField mf(regular_statistics(3, {0.5, 0.5}), erg_kernel());
  Rng rng(9);
  auto s = random_state(rng, 2, 3);
  auto u = reduce_state(mf, s);
  EXPECT_EQ(u.size(), 4u * 2);
  auto back = expand_state(mf, u, s);
  EXPECT_LE(max_abs_diff(back.zeta_data(), s.zeta_data()), 1e-15);
}

TEST(Stationary, TltmBoundaryPointsAndStability) {
  MeanField mf(regular_statistics(10, {1.0}), tltm_kernel(3, 3));
  auto rep = find_stationary(mf);
  auto find = [&](double x, double z) -> const FixedPoint* {
    for (const auto& p : rep.points)
      if (std::abs(p.state.zeta(2, 0, 0) - x) < 1e-6 && std::abs(p.state.zeta(0, 0, 0) - z) < 1e-6) return &p;
    return nullptr;
  };
  // Root of the closed form on the z=0 axis, located by bisection.
  double lo = 0.05, hi = 0.5;
  for (int i = 0; i < 200; ++i) {
    double m = 0.5 * (lo + hi);
    (tltm_phi_plus(10, 3, m, 0) - m < 0 ? lo : hi) = m;
  }
  const double xs = 0.5 * (lo + hi);
  for (auto [x, z, cls] : std::vector<std::tuple<double, double, std::string>>{
           {0, 0, "stable"}, {1, 0, "stable"}, {0, 1, "stable"}, {xs, 0, "unstable"}, {0, xs, "unstable"}}) {
    auto p = find(x, z);
    ASSERT_NE(p, nullptr) << x << "," << z;
    EXPECT_EQ(p->classification, cls);
    EXPECT_LE(p->residual, 1e-8);
  }
  for (const auto& p : rep.points) EXPECT_LE(p.residual, 1e-8);
}

TEST(Stationary, ErgUniqueInteriorPoint) {
  MeanField mf(regular_statistics(6, {1.0}), erg_kernel());
  auto rep = find_stationary(mf);
  ASSERT_EQ(rep.points.size(), 1u);
  for (std::size_t w = 0; w < 3; ++w) EXPECT_NEAR(rep.points[0].state.zeta(w, 0, 0), 1.0 / 3, 1e-8);
  EXPECT_NEAR(rep.points[0].state.y(0, 0), 1.0 / 3, 1e-8);
}

TEST(Stationary, BrcaThreePointsAboveThreshold) {
  auto stats = regular_statistics(21, {0.7, 0.3});
  MeanField mf(stats, brca_kernel(std::vector<bool>{true, false}));
  StationaryConfig cfg;
  cfg.grid = 4;
  auto rep = find_stationary(mf, cfg);
  auto fp = brca_fixed_points(21, 0.7);
  std::vector<std::pair<double, std::string>> got;
  for (const auto& p : rep.points) got.emplace_back(aggregate_y(p.state, stats)[1], p.classification);
  std::sort(got.begin(), got.end());
  ASSERT_EQ(got.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(got[i].first, fp[i], 1e-7);
  EXPECT_EQ(got[0].second, "stable");
  EXPECT_EQ(got[1].second, "unstable");
  EXPECT_EQ(got[2].second, "stable");
}

TEST(Basins, BrcaBelowThresholdHasSingleBasin) {
  MeanField mf(regular_statistics(21, {0.6, 0.4}), brca_kernel(std::vector<bool>{true, false}));
  StationaryConfig sc;
  sc.grid = 3;
  auto rep = find_stationary(mf, sc);
  ASSERT_EQ(rep.points.size(), 1u);
  BasinConfig bc;
  bc.resolution = 11;
  bc.axis_x = 1;
  bc.horizon = 60;
  auto map = map_basins(mf, rep, bc);
  EXPECT_TRUE(map.ys.empty());
  for (int l : map.label) EXPECT_EQ(l, 0);
}

TEST(Basins, TltmDiagonalSymmetry) {
  MeanField mf(regular_statistics(10, {1.0}), tltm_kernel(2, 2));
  auto rep = find_stationary(mf);
  BasinConfig bc;
  bc.resolution = 11;
  bc.axis_x = 2;
  bc.axis_y = 0;
  bc.horizon = 40;
  auto map = map_basins(mf, rep, bc);
  const std::size_t n = map.xs.size();
  auto at = [&](std::size_t ix, std::size_t iy) { return map.label[iy * n + ix]; };
  auto is = [&](int l, double x, double z) {
    return l >= 0 && std::abs(map.attractors[static_cast<std::size_t>(l)].state.zeta(2, 0, 0) - x) < 1e-3 &&
           std::abs(map.attractors[static_cast<std::size_t>(l)].state.zeta(0, 0, 0) - z) < 1e-3;
  };
  for (std::size_t ix = 0; ix < n; ++ix)
    for (std::size_t iy = 0; iy < n; ++iy) {
      int l = at(ix, iy), m = at(iy, ix);
      if (ix + iy > n - 1) {
        EXPECT_EQ(l, -2);
        continue;
      }
      if (ix == iy) {
        // The diagonal is invariant: it cannot reach (1,0) or (0,1).
        EXPECT_FALSE(is(l, 1, 0));
        EXPECT_FALSE(is(l, 0, 1));
        continue;
      }
      if (is(l, 1, 0)) EXPECT_TRUE(is(m, 0, 1));
      if (is(l, 0, 0)) EXPECT_TRUE(is(m, 0, 0));
    }
  // (1,0) is itself a stable cell.
  EXPECT_TRUE(is(at(n - 1, 0), 1, 0));
}

TEST(Csv, OdeHeader) {
  MeanField mf(regular_statistics(2, {1.0}), brca_kernel(true));
  auto tr = integrate(MeanFieldState::uniform_blocks(1, {0.4, 0.6}), mf, {0.1, 0.2, 0.0});
  std::ostringstream out;
  write_ode_csv(tr, mf, out);
  EXPECT_EQ(out.str().rfind("t,kind,state,label,parent,value\n", 0), 0u);
}
