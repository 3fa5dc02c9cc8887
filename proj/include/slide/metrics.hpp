#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "slide/coupling_matrix.hpp"
#include "slide/errors.hpp"

namespace slide {

// Edge-detection confusion table over unordered pairs i < j.
struct ConfusionCounts {
  std::int64_t tp = 0;
  std::int64_t tn = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
};

struct StructureMetrics {
  double tpr = 0.0;
  double fpr = 0.0;
  double mcc = 0.0;
  ConfusionCounts counts;
};

namespace detail {

inline void check_same_p(const CouplingMatrix& a, const CouplingMatrix& b) {
  if (a.p() != b.p())
    throw ValidationError("matrix size mismatch: p=" + std::to_string(a.p()) + " vs p=" +
                          std::to_string(b.p()));
}

}  // namespace detail

// Degenerate-table conventions: TPR = 1 with no true edges, FPR = 0 with no
// true non-edges, MCC = 0 whenever a factor of its denominator vanishes.
inline StructureMetrics structure_metrics(const CouplingMatrix& estimate,
                                          const CouplingMatrix& truth) {
  detail::check_same_p(estimate, truth);
  StructureMetrics out;
  auto& c = out.counts;
  const int p = truth.p();
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j) {
      const bool est = estimate(i, j) != 0.0;
      const bool real = truth(i, j) != 0.0;
      if (est && real)
        ++c.tp;
      else if (!est && !real)
        ++c.tn;
      else if (est)
        ++c.fp;
      else
        ++c.fn;
    }
  out.tpr = c.tp + c.fn == 0 ? 1.0 : static_cast<double>(c.tp) / (c.tp + c.fn);
  out.fpr = c.tn + c.fp == 0 ? 0.0 : static_cast<double>(c.fp) / (c.tn + c.fp);
  const double f1 = static_cast<double>(c.tp + c.fp);
  const double f2 = static_cast<double>(c.tp + c.fn);
  const double f3 = static_cast<double>(c.tn + c.fp);
  const double f4 = static_cast<double>(c.tn + c.fn);
  if (f1 == 0.0 || f2 == 0.0 || f3 == 0.0 || f4 == 0.0) {
    out.mcc = 0.0;
  } else {
    const double num =
        static_cast<double>(c.tp) * c.tn - static_cast<double>(c.fp) * c.fn;
    out.mcc = num / std::sqrt(f1 * f2 * f3 * f4);
  }
  return out;
}

// Mean squared coupling error over unordered pairs: (2/(p(p-1))) sum (diff)^2.
inline double mse(const CouplingMatrix& estimate, const CouplingMatrix& truth) {
  detail::check_same_p(estimate, truth);
  const int p = truth.p();
  double acc = 0.0;
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j) {
      const double diff = estimate(i, j) - truth(i, j);
      acc += diff * diff;
    }
  return 2.0 * acc / (static_cast<double>(p) * (p - 1));
}

inline bool exact_recovery(const CouplingMatrix& estimate, const CouplingMatrix& truth) {
  detail::check_same_p(estimate, truth);
  return estimate.support_equals(truth);
}

}  // namespace slide
