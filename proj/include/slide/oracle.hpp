#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "slide/dataset.hpp"
#include "slide/errors.hpp"
#include "slide/pseudo_likelihood.hpp"

namespace slide {

inline constexpr long long kSubsetBudget = 1000000;

namespace detail {

inline long long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  long long acc = 1;
  for (int t = 1; t <= k; ++t) {
    acc = acc * (n - k + t) / t;
    if (acc > 4 * kSubsetBudget) return acc;  // enough to fail the budget check
  }
  return acc;
}

}  // namespace detail

struct BestSubset {
  std::vector<int> support;
  double pl = 0.0;
};

// Brute-force reference for the size-d support search: maximize the node
// objective on every candidate support and keep the best. Enumeration is
// lexicographic, so on exact ties the smallest support wins.
inline BestSubset exhaustive_best_subset(const Dataset& data, int i, int d,
                                         const NewtonOptions& opt = {}) {
  const int p = data.p();
  if (i < 0 || i >= p) throw ValidationError("exhaustive_best_subset: node out of range");
  if (d < 0 || d > p - 1)
    throw ValidationError("exhaustive_best_subset: need 0 <= d <= p-1");
  if (detail::binomial(p - 1, d) > kSubsetBudget)
    throw BudgetError("exhaustive_best_subset: C(" + std::to_string(p - 1) + "," +
                      std::to_string(d) + ") exceeds the enumeration budget");

  std::vector<int> candidates;
  for (int j = 0; j < p; ++j)
    if (j != i) candidates.push_back(j);

  BestSubset best;
  bool have_best = false;
  std::vector<int> pick(d);
  // Odometer over d indices into candidates, lexicographic order.
  std::vector<int> idx(d);
  for (int t = 0; t < d; ++t) idx[t] = t;
  while (true) {
    for (int t = 0; t < d; ++t) pick[t] = candidates[idx[t]];
    const auto sol = maximize_on_support(data, i, pick, std::nullopt, opt);
    if (!have_best || sol.pl > best.pl) {
      best.support = sol.support;
      best.pl = sol.pl;
      have_best = true;
    }
    if (d == 0) break;
    int t = d - 1;
    while (t >= 0 && idx[t] == static_cast<int>(candidates.size()) - d + t) --t;
    if (t < 0) break;
    ++idx[t];
    for (int u = t + 1; u < d; ++u) idx[u] = idx[u - 1] + 1;
  }
  return best;
}

}  // namespace slide
