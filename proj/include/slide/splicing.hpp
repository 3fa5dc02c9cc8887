#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "slide/dataset.hpp"
#include "slide/errors.hpp"
#include "slide/pseudo_likelihood.hpp"

namespace slide {

// All knobs of the reconstruction algorithm. Negative sentinel values mean
// "resolve from the data dimensions" so a default-constructed config works on
// any dataset.
struct SlideConfig {
  int d_max = -1;             // -1: ceil(n / (ln p ln ln n)); always capped at min(p-1, n/2)
  double sigma_const = 0.01;  // splicing acceptance threshold scale
  double tau = -1.0;          // symmetrization threshold; -1: lambda/2 if lambda known, else 0
  double lambda = 0.0;        // known minimum signal, 0 if unknown
  double gamma = 0.0;         // known neighborhood weight bound, 0 if unknown
  int threads = 1;
  NewtonOptions newton;

  int resolved_d_max(int n, int p) const {
    const int hard = std::min(p - 1, n / 2);
    if (d_max >= 0) return std::min(d_max, hard);
    const double denom = std::log(p) * std::log(std::log(n));
    const int from_n = static_cast<int>(std::ceil(n / denom));
    return std::max(0, std::min(from_n, hard));
  }

  // Minimum mean-objective gain for a splice at neighborhood size d.
  double sigma(int d, int n, int p) const {
    return sigma_const * d * std::log(p) * std::log(std::log(n)) / n;
  }

  // Model-size penalty per unit d in the information criterion.
  double gic_penalty(int d, int n, int p) const {
    return d * std::log(p) * std::log(std::log(n)) / n;
  }

  double resolved_tau() const {
    if (tau >= 0.0) return tau;
    return lambda > 0.0 ? lambda / 2.0 : 0.0;
  }

  // Coefficient cap: a multiple of gamma when the family bound is known.
  NewtonOptions resolved_newton() const {
    NewtonOptions opt = newton;
    if (gamma > 0.0) opt.cap = 2.0 * gamma;
    return opt;
  }

  void validate(int n, int p) const {
    if (n < 3) throw ValidationError("reconstruction needs n >= 3 samples");
    if (p < 2) throw ValidationError("reconstruction needs p >= 2 variables");
    if (sigma_const <= 0.0) throw ValidationError("sigma_const must be > 0");
    if (tau >= 0.0 && !(tau == tau)) throw ValidationError("tau must be finite");
    if (lambda < 0.0) throw ValidationError("lambda must be >= 0");
    if (gamma < 0.0) throw ValidationError("gamma must be >= 0");
    if (threads < 1) throw ValidationError("threads must be >= 1");
  }
};

// One inner-loop state for node i: the active set with its restricted
// maximizer, and how many splices have been accepted.
struct SplicingState {
  int node = 0;
  std::vector<int> active;
  RestrictedSolution solution;
  int iterations = 0;
};

namespace detail {

// Rank candidates by squared score, largest first, ties to the smaller index.
inline std::vector<int> top_by_square(const std::vector<int>& members,
                                      const std::vector<double>& score, int s) {
  std::vector<int> order = members;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const double sa = score[a] * score[a], sb = score[b] * score[b];
    if (sa != sb) return sa > sb;
    return a < b;
  });
  order.resize(std::min<std::size_t>(order.size(), s));
  std::sort(order.begin(), order.end());
  return order;
}

}  // namespace detail

// Backward set: the s active members whose coefficients are smallest in
// square (cheapest to delete). Forward set: the s inactive members with the
// largest squared gradient (most promising to add). Ties break to the
// smaller node index.
inline std::pair<std::vector<int>, std::vector<int>> importance_sets(const SplicingState& state,
                                                                     int s, int p) {
  const int d = static_cast<int>(state.active.size());
  if (s < 1 || s > d) throw ValidationError("importance_sets: need 1 <= s <= |active|");

  std::vector<double> coef_full(p, 0.0);
  for (std::size_t a = 0; a < state.active.size(); ++a)
    coef_full[state.active[a]] = state.solution.coef[a];
  std::vector<int> backward = state.active;
  std::stable_sort(backward.begin(), backward.end(), [&](int a, int b) {
    const double sa = coef_full[a] * coef_full[a], sb = coef_full[b] * coef_full[b];
    if (sa != sb) return sa < sb;
    return a < b;
  });
  backward.resize(s);
  std::sort(backward.begin(), backward.end());

  std::vector<int> complement;
  complement.reserve(p);
  for (int j = 0; j < p; ++j)
    if (j != state.node && !std::binary_search(state.active.begin(), state.active.end(), j))
      complement.push_back(j);
  std::vector<int> forward = detail::top_by_square(complement, state.solution.grad, s);
  return {std::move(backward), std::move(forward)};
}

// One splicing pass at fixed size d: try swap sizes s = 1..d in order and
// adopt the first candidate whose mean objective beats the current one by
// more than the acceptance threshold.
inline bool splice_once(SplicingState& state, int d, const SlideConfig& config,
                        const Dataset& data) {
  const int n = data.n(), p = data.p();
  const double threshold = config.sigma(d, n, p);
  const auto opt = config.resolved_newton();
  const auto warm = state.solution.dense(p);
  for (int s = 1; s <= d; ++s) {
    const auto [out_set, in_set] = importance_sets(state, s, p);
    if (static_cast<int>(in_set.size()) < s) break;  // complement exhausted
    std::vector<int> candidate;
    candidate.reserve(d);
    std::set_difference(state.active.begin(), state.active.end(), out_set.begin(),
                        out_set.end(), std::back_inserter(candidate));
    candidate.insert(candidate.end(), in_set.begin(), in_set.end());
    std::sort(candidate.begin(), candidate.end());
    auto solution = maximize_on_support(data, state.node, candidate, warm, opt);
    if (solution.pl > state.solution.pl + threshold) {
      state.active = std::move(candidate);
      state.solution = std::move(solution);
      ++state.iterations;
      return true;
    }
  }
  return false;
}

inline constexpr int kSpliceIterationCap = 10000;

// Warm start for size d from the size d-1 result: keep its support, add the
// best inactive member by squared gradient, then pad or trim to exactly d in
// squared-gradient order.
inline std::vector<int> warm_start_set(const RestrictedSolution& prev, int d, int node, int p) {
  std::vector<char> in_set(p, 0);
  std::vector<int> set = prev.support;
  for (int j : set) in_set[j] = 1;
  std::vector<int> complement;
  for (int j = 0; j < p; ++j)
    if (j != node && !in_set[j]) complement.push_back(j);
  std::vector<int> by_importance = complement;
  std::stable_sort(by_importance.begin(), by_importance.end(), [&](int a, int b) {
    const double sa = prev.grad[a] * prev.grad[a], sb = prev.grad[b] * prev.grad[b];
    if (sa != sb) return sa > sb;
    return a < b;
  });
  for (int j : by_importance) {
    if (static_cast<int>(set.size()) >= d) break;
    set.push_back(j);
  }
  if (static_cast<int>(set.size()) > d) {
    std::stable_sort(set.begin(), set.end(), [&](int a, int b) {
      const double sa = prev.grad[a] * prev.grad[a], sb = prev.grad[b] * prev.grad[b];
      if (sa != sb) return sa > sb;
      return a < b;
    });
    set.resize(d);
  }
  std::sort(set.begin(), set.end());
  return set;
}

// Splice to a fixpoint at fixed neighborhood size d, warm-started from the
// d-1 solution. Terminates because each accepted splice gains more than the
// positive threshold and the objective is bounded above by zero.
inline SplicingState solve_fixed_d(const Dataset& data, int i, int d,
                                   const RestrictedSolution& prev, const SlideConfig& config) {
  const int p = data.p();
  if (d < 1) throw ValidationError("solve_fixed_d: need d >= 1");
  SplicingState state;
  state.node = i;
  state.active = warm_start_set(prev, d, i, p);
  state.solution =
      maximize_on_support(data, i, state.active, prev.dense(p), config.resolved_newton());
  while (splice_once(state, d, config, data)) {
    if (state.iterations > kSpliceIterationCap)
      throw BudgetError("splicing did not reach a fixpoint in " +
                        std::to_string(kSpliceIterationCap) + " iterations");
  }
  return state;
}

// Information criterion: mean objective minus the size penalty. Larger is
// better; the penalty makes every extra neighbor cost log p log log n / n.
inline double gic(const RestrictedSolution& solution, int d, int n, int p,
                  const SlideConfig& config) {
  return solution.pl - config.gic_penalty(d, n, p);
}

// Full middle-loop record for one node.
struct NodeSolution {
  int node = 0;
  std::vector<RestrictedSolution> per_d;  // index d = 0..d_max
  std::vector<double> gic_values;
  std::vector<int> splice_counts;
  int chosen_d = 0;

  const RestrictedSolution& chosen() const { return per_d[chosen_d]; }
};

// Sweep d = 0..d_max, warm-starting each size from the previous one, and keep
// the first criterion maximizer (ties resolve to the smaller size).
inline NodeSolution solve_node(const Dataset& data, int i, const SlideConfig& config) {
  const int n = data.n(), p = data.p();
  const int d_max = config.resolved_d_max(n, p);
  NodeSolution node_sol;
  node_sol.node = i;
  node_sol.per_d.reserve(d_max + 1);
  node_sol.per_d.push_back(
      maximize_on_support(data, i, {}, std::nullopt, config.resolved_newton()));
  node_sol.splice_counts.assign(d_max + 1, 0);
  node_sol.gic_values.push_back(gic(node_sol.per_d[0], 0, n, p, config));
  for (int d = 1; d <= d_max; ++d) {
    auto state = solve_fixed_d(data, i, d, node_sol.per_d[d - 1], config);
    node_sol.splice_counts[d] = state.iterations;
    node_sol.gic_values.push_back(gic(state.solution, d, n, p, config));
    node_sol.per_d.push_back(std::move(state.solution));
  }
  node_sol.chosen_d = 0;
  for (int d = 1; d <= d_max; ++d)
    if (node_sol.gic_values[d] > node_sol.gic_values[node_sol.chosen_d]) node_sol.chosen_d = d;
  return node_sol;
}

}  // namespace slide
