#pragma once

#include <cstdint>
#include <vector>

#include "slide/coupling_matrix.hpp"
#include "slide/dataset.hpp"
#include "slide/errors.hpp"
#include "slide/numeric.hpp"
#include "slide/rng.hpp"

namespace slide {

// P(z_i | z_{-i}) = sigma(2 z_i sum_j J_ij z_j). J_i must have a zero at i.
inline double conditional_prob(const std::vector<double>& coef, const std::int8_t* z, int i) {
  double field = 0.0;
  for (int j = 0; j < static_cast<int>(coef.size()); ++j)
    field += coef[j] * z[j];
  return sigmoid(2.0 * z[i] * field);
}

inline int default_burn_in(int p) { return 100 * p; }
inline constexpr int kDefaultThin = 10;

// Single-site sweeps in index order; records every `thin`-th sweep after
// burn_in. A chain is one seed; parallel callers run independent chains.
inline Dataset gibbs_sample(const CouplingMatrix& coupling, int n, int burn_in, int thin,
                            std::uint64_t seed) {
  if (n < 1) throw ValidationError("gibbs_sample: need n >= 1");
  if (burn_in < 0) throw ValidationError("gibbs_sample: need burn_in >= 0");
  if (thin < 1) throw ValidationError("gibbs_sample: need thin >= 1");
  const int p = coupling.p();
  Rng rng(seed);
  std::vector<std::int8_t> z(p);
  for (int j = 0; j < p; ++j) z[j] = rng.spin();

  // Cache local fields f_i = sum_j J_ij z_j and patch them on each flip.
  std::vector<double> field(p, 0.0);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) field[i] += coupling(i, j) * z[j];

  auto sweep = [&]() {
    for (int i = 0; i < p; ++i) {
      const double p_plus = sigmoid(2.0 * field[i]);
      const std::int8_t next = rng.uniform01() < p_plus ? std::int8_t{1} : std::int8_t{-1};
      if (next != z[i]) {
        const double dz = 2.0 * next;
        for (int j = 0; j < p; ++j) field[j] += coupling(j, i) * dz;
        z[i] = next;
      }
    }
  };

  for (int s = 0; s < burn_in; ++s) sweep();
  Dataset data(n, p);
  for (int r = 0; r < n; ++r) {
    for (int s = 0; s < thin; ++s) sweep();
    for (int j = 0; j < p; ++j) data.set(r, j, z[j]);
  }
  return data;
}

inline Dataset gibbs_sample(const CouplingMatrix& coupling, int n, std::uint64_t seed) {
  return gibbs_sample(coupling, n, default_burn_in(coupling.p()), kDefaultThin, seed);
}

}  // namespace slide
