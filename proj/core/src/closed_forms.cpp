#include <cmath>
#include <stdexcept>

#include "asd/meanfield.hpp"
#include "combinatorics.hpp"

namespace asd {

double tltm_phi_plus(int k, int r, double x, double z) {
  if (k < 0 || r < 0 || r > k) throw std::domain_error("tltm_phi_plus needs 0 <= r <= k");
  const double w = 1.0 - x - z;
  double acc = 0.0;
  for (int u = r; u <= k; ++u) {
    const int vmax = std::min(k - u, u - r);
    for (int v = 0; v <= vmax; ++v)
      acc += detail::binom(k, u) * detail::binom(k - u, v) * std::pow(x, u) * std::pow(z, v) * std::pow(w, k - u - v);
  }
  return acc;
}

double brca_phi1(int k, double y1) {
  if (k < 1) throw std::domain_error("brca_phi1 needs k >= 1");
  double acc = 0.0;
  for (int k1 = (k + 1) / 2; k1 <= k; ++k1) {
    double term = detail::binom(k, k1) * std::pow(y1, k1) * std::pow(1.0 - y1, k - k1);
    if (2 * k1 == k) term *= 0.5;
    acc += term;
  }
  return acc;
}

double brca_rhs(int k, double alpha, double y1) {
  const double p = brca_phi1(k, y1);
  return alpha * p + (1.0 - alpha) * (1.0 - p) - y1;
}

double brca_alpha_th(int k) {
  if (k < 1) throw std::domain_error("brca_alpha_th needs k >= 1");
  const double c = detail::binom(k - 1, k / 2);
  const double ratio = std::exp((k - 1) * std::log(2.0) - std::log(static_cast<double>(k)) - std::log(c));
  return 0.5 * (1.0 + ratio);
}

std::vector<double> brca_fixed_points(int k, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::domain_error("alpha must lie in [0,1]");
  auto f = [&](double y) { return brca_rhs(k, alpha, y); };
  std::vector<double> low;
  const int cells = 4000;
  const double top = 0.5 - 1e-9;
  double x0 = 0.0, f0 = f(x0);
  if (f0 == 0.0) low.push_back(0.0);
  for (int i = 1; i <= cells; ++i) {
    double x1 = top * i / cells, f1 = f(x1);
    if ((f0 < 0.0 && f1 > 0.0) || (f0 > 0.0 && f1 < 0.0)) {
      double a = x0, b = x1, fa = f0;
      for (int it = 0; it < 200 && b - a > 1e-16; ++it) {
        double m = 0.5 * (a + b), fm = f(m);
        if ((fm < 0.0) == (fa < 0.0)) {
          a = m;
          fa = fm;
        } else {
          b = m;
        }
      }
      low.push_back(0.5 * (a + b));
    } else if (f1 == 0.0) {
      low.push_back(x1);
    }
    x0 = x1;
    f0 = f1;
  }
  std::vector<double> out = low;
  out.push_back(0.5);
  for (auto it = low.rbegin(); it != low.rend(); ++it) out.push_back(1.0 - *it);
  return out;
}

std::array<double, 3> erg_pi(int k, const std::array<double, 3>& y) {
  if (k < 0) throw std::domain_error("erg_pi needs k >= 0");
  std::array<double, 3> pi{0.0, 0.0, 0.0};
  // Winner of state w when (more, less) are the counts compared to k/3.
  auto weight = [&](int more, int less) {
    int a = 3 * more - k, b = 3 * less - k;
    if (a < 0 || b > 0) return 0.0;
    if (a > 0 && b < 0) return 1.0;
    if (a == 0 && b == 0) return 1.0 / 3.0;
    return 0.5;
  };
  for (int r = 0; r <= k; ++r)
    for (int p = 0; p + r <= k; ++p) {
      int s = k - r - p;
      double pmf = detail::multinomial_pmf({r, p, s}, {y[0], y[1], y[2]});
      pi[0] += pmf * weight(s, p);
      pi[1] += pmf * weight(r, s);
      pi[2] += pmf * weight(p, r);
    }
  return pi;
}

}  // namespace asd
