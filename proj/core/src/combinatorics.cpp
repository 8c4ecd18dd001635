#include "combinatorics.hpp"

#include <cmath>

namespace asd::detail {

namespace {

const std::vector<std::vector<double>>& pascal() {
  static const std::vector<std::vector<double>> rows = [] {
    std::vector<std::vector<double>> r(kBinomialTableMax + 1);
    for (int n = 0; n <= kBinomialTableMax; ++n) {
      r[n].assign(static_cast<std::size_t>(n) + 1, 1.0);
      for (int k = 1; k < n; ++k) r[n][k] = r[n - 1][k - 1] + r[n - 1][k];
    }
    return r;
  }();
  return rows;
}

void compose(int remaining, std::size_t pos, std::vector<int>& x,
             const std::function<void(const std::vector<int>&)>& f) {
  if (pos + 1 == x.size()) {
    x[pos] = remaining;
    f(x);
    return;
  }
  for (int v = remaining; v >= 0; --v) {
    x[pos] = remaining - v;
    compose(v, pos + 1, x, f);
  }
}

}  // namespace

double binom(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0.0;
  if (n <= kBinomialTableMax) return pascal()[n][k];
  return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0));
}

double composition_count(std::int64_t k, std::size_t parts) {
  if (parts == 0) return k == 0 ? 1.0 : 0.0;
  double c = 1.0;
  // C(k+parts-1, parts-1) as a running product.
  for (std::size_t i = 1; i < parts; ++i)
    c = c * static_cast<double>(k + static_cast<std::int64_t>(i)) / static_cast<double>(i);
  return std::round(c);
}

void for_each_composition(int k, std::size_t parts, const std::function<void(const std::vector<int>&)>& f) {
  if (parts == 0) {
    if (k == 0) f({});
    return;
  }
  std::vector<int> x(parts, 0);
  compose(k, 0, x, f);
}

double multinomial_pmf(const std::vector<int>& x, const std::vector<double>& p) {
  int remaining = 0;
  for (int v : x) remaining += v;
  double w = 1.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == 0) {
      continue;
    }
    if (p[i] <= 0.0) return 0.0;
    w *= binom(remaining, x[i]) * std::pow(p[i], x[i]);
    remaining -= x[i];
  }
  return w;
}

}  // namespace asd::detail
