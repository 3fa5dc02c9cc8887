#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <vector>

#include "slide/coupling_matrix.hpp"
#include "slide/dataset.hpp"
#include "slide/errors.hpp"
#include "slide/numeric.hpp"
#include "slide/rng.hpp"

namespace slide {

// Enumeration guard: a 2^20 probability table is ~8 MB, fine; beyond that
// exact work is refused and callers fall back to MCMC.
inline constexpr int kMaxExactNodes = 20;

// Full table over the 2^p configurations. State index m encodes spins as
// z_j = +1 iff bit j of m is set.
class ExactDistribution {
 public:
  explicit ExactDistribution(const CouplingMatrix& coupling)
      : p_(coupling.p()) {
    if (p_ > kMaxExactNodes)
      throw ValidationError("exact distribution needs p <= " +
                            std::to_string(kMaxExactNodes) + ", got " + std::to_string(p_));
    const std::size_t n_states = std::size_t{1} << p_;
    std::vector<double> energy(n_states);

    // Gray-code walk: consecutive states differ in one spin, so each energy
    // update costs O(p) instead of O(p^2).
    std::vector<double> z(p_, -1.0);
    double e = 0.0;
    for (int i = 0; i < p_; ++i)
      for (int j = i + 1; j < p_; ++j) e += coupling(i, j) * z[i] * z[j];
    std::size_t gray_prev = 0;
    energy[0] = e;
    for (std::size_t k = 1; k < n_states; ++k) {
      const std::size_t gray = k ^ (k >> 1);
      const int bit = std::countr_zero(gray ^ gray_prev);
      // Flipping z_bit changes each pair term (bit, j) by -2 J z_bit z_j.
      double delta = 0.0;
      for (int j = 0; j < p_; ++j)
        if (j != bit) delta += coupling(bit, j) * z[bit] * z[j];
      e -= 2.0 * delta;
      z[bit] = -z[bit];
      energy[gray] = e;
      gray_prev = gray;
    }

    log_partition_ = log_sum_exp(energy);
    prob_.resize(n_states);
    for (std::size_t m = 0; m < n_states; ++m)
      prob_[m] = std::exp(energy[m] - log_partition_);
  }

  int p() const { return p_; }
  double log_partition() const { return log_partition_; }

  double probability(std::size_t state) const { return prob_[state]; }

  double probability_of(const std::vector<int>& z) const {
    std::size_t m = 0;
    for (int j = 0; j < p_; ++j)
      if (z[j] > 0) m |= std::size_t{1} << j;
    return prob_[m];
  }

  std::size_t num_states() const { return prob_.size(); }

  // E[z_i z_j] under the table.
  double pair_moment(int i, int j) const {
    double s = 0.0;
    for (std::size_t m = 0; m < prob_.size(); ++m) {
      const double zi = (m >> i) & 1 ? 1.0 : -1.0;
      const double zj = (m >> j) & 1 ? 1.0 : -1.0;
      s += prob_[m] * zi * zj;
    }
    return s;
  }

  const std::vector<double>& cumulative() const {
    if (cdf_.empty()) {
      cdf_.resize(prob_.size());
      double acc = 0.0;
      for (std::size_t m = 0; m < prob_.size(); ++m) {
        acc += prob_[m];
        cdf_[m] = acc;
      }
      cdf_.back() = 1.0;
    }
    return cdf_;
  }

 private:
  int p_;
  double log_partition_ = 0.0;
  std::vector<double> prob_;
  mutable std::vector<double> cdf_;
};

inline ExactDistribution exact_distribution(const CouplingMatrix& coupling) {
  return ExactDistribution(coupling);
}

// n i.i.d. draws via inverse-CDF search over the state table.
inline Dataset sample_exact(const ExactDistribution& dist, int n, std::uint64_t seed) {
  if (n < 1) throw ValidationError("sample_exact: need n >= 1");
  const auto& cdf = dist.cumulative();
  Rng rng(seed);
  Dataset data(n, dist.p());
  for (int r = 0; r < n; ++r) {
    const double u = rng.uniform01();
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    const std::size_t m = static_cast<std::size_t>(it - cdf.begin());
    for (int j = 0; j < dist.p(); ++j)
      data.set(r, j, ((m >> j) & 1) ? std::int8_t{1} : std::int8_t{-1});
  }
  return data;
}

}  // namespace slide
