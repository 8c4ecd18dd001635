#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace asd::detail {

inline constexpr int kBinomialTableMax = 512;

// C(n,k) in double precision: Pascal triangle up to kBinomialTableMax, lgamma beyond.
double binom(int n, int k);

// Number of compositions of k into `parts` nonnegative parts: C(k+parts-1, parts-1).
double composition_count(std::int64_t k, std::size_t parts);

// Calls f(x) for every composition x of k into `parts` nonnegative parts, in
// lexicographic order of x.
void for_each_composition(int k, std::size_t parts, const std::function<void(const std::vector<int>&)>& f);

// Multinomial probability of counts x given cell probabilities p.
double multinomial_pmf(const std::vector<int>& x, const std::vector<double>& p);

}  // namespace asd::detail
