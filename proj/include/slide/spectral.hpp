#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "slide/coupling_matrix.hpp"

namespace slide {

namespace detail {

inline Eigen::MatrixXd to_eigen(const CouplingMatrix& coupling) {
  const int p = coupling.p();
  Eigen::MatrixXd m(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) m(i, j) = coupling(i, j);
  return m;
}

// Sign convention: first coordinate of magnitude > 1e-12 made positive.
inline void canonical_sign(Eigen::VectorXd& v) {
  for (int i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > 1e-12) {
      if (v[i] < 0.0) v = -v;
      return;
    }
  }
}

// Indices of the two largest-|eigenvalue| pairs; ties keep the smaller index
// so degenerate spectra stay deterministic.
inline std::pair<int, int> top_two_by_magnitude(const Eigen::VectorXd& values) {
  const int p = static_cast<int>(values.size());
  std::vector<int> order(p);
  for (int i = 0; i < p; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const double ma = std::abs(values[a]), mb = std::abs(values[b]);
    if (ma != mb) return ma > mb;
    return a < b;
  });
  return {order[0], p > 1 ? order[1] : order[0]};
}

}  // namespace detail

// Node coordinates from the two leading (largest-magnitude) eigenvectors of a
// symmetric coupling estimate, each unit length with a fixed sign convention.
// The all-zero matrix maps to the canonical basis pair e1, e2.
inline std::vector<std::array<double, 2>> spectral_layout(const CouplingMatrix& coupling) {
  const int p = coupling.p();
  std::vector<std::array<double, 2>> coords(p, {0.0, 0.0});
  if (coupling.num_edges() == 0) {
    if (p >= 1) coords[0][0] = 1.0;
    if (p >= 2) coords[1][1] = 1.0;
    return coords;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(detail::to_eigen(coupling));
  const auto [first, second] = detail::top_two_by_magnitude(solver.eigenvalues());
  Eigen::VectorXd v1 = solver.eigenvectors().col(first);
  Eigen::VectorXd v2 = solver.eigenvectors().col(second);
  detail::canonical_sign(v1);
  detail::canonical_sign(v2);
  for (int i = 0; i < p; ++i) coords[i] = {v1[i], v2[i]};
  return coords;
}

// Two-way split by the sign of the leading eigenvector (largest eigenvalue,
// canonical sign); entries at numerical zero land in label 0.
inline std::vector<int> spectral_bipartition(const CouplingMatrix& coupling) {
  const int p = coupling.p();
  std::vector<int> labels(p, 0);
  if (coupling.num_edges() == 0) return labels;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(detail::to_eigen(coupling));
  Eigen::VectorXd v = solver.eigenvectors().col(p - 1);  // eigenvalues ascend
  detail::canonical_sign(v);
  for (int i = 0; i < p; ++i) labels[i] = v[i] > 1e-12 ? 1 : 0;
  return labels;
}

}  // namespace slide
