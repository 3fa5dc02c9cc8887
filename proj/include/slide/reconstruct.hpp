#pragma once

#include <cmath>
#include <vector>

#include "slide/coupling_matrix.hpp"
#include "slide/dataset.hpp"
#include "slide/parallel.hpp"
#include "slide/splicing.hpp"

namespace slide {

// Assembles nodewise estimates into one symmetric matrix: average the two
// directed estimates and keep the edge only if the average clears tau.
inline CouplingMatrix symmetrize_threshold(const std::vector<NodeSolution>& nodes, int p,
                                           double tau) {
  CouplingMatrix coupling(p);
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j) {
      const double v = 0.5 * (nodes[i].chosen().coef_at(j) + nodes[j].chosen().coef_at(i));
      if (v != 0.0 && std::abs(v) >= tau) coupling.set(i, j, v);
    }
  return coupling;
}

struct ReconstructionResult {
  CouplingMatrix coupling;
  std::vector<NodeSolution> nodes;
};

// The full pipeline: solve every node independently (parallel map), then
// symmetrize and threshold. Output is identical for any thread count.
inline ReconstructionResult reconstruct_full(const Dataset& data, const SlideConfig& config) {
  const int p = data.p();
  config.validate(data.n(), p);
  std::vector<NodeSolution> nodes(p);
  parallel_for(0, p, config.threads,
               [&](int i) { nodes[i] = solve_node(data, i, config); });
  CouplingMatrix coupling = symmetrize_threshold(nodes, p, config.resolved_tau());
  return {std::move(coupling), std::move(nodes)};
}

inline CouplingMatrix reconstruct(const Dataset& data, const SlideConfig& config) {
  return reconstruct_full(data, config).coupling;
}

}  // namespace slide
