#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "slide/coupling_matrix.hpp"
#include "slide/errors.hpp"
#include "slide/rng.hpp"

namespace slide {

// Interaction patterns laid over a generated topology:
//   DegreeDisentangled     every node has exactly one lambda-neighbor (a
//                          perfect matching), all other edges beta
//   FerroOneWeak           all edges beta except one uniformly chosen edge
//                          set to lambda
//   MixedTwoWeak           i.i.d. uniform +-beta signs, then one edge forced
//                          to +lambda and a second one to -lambda
//   FerroOneWeakNegative   all edges beta except one edge set to -lambda
enum class Pattern {
  DegreeDisentangled,
  FerroOneWeak,
  MixedTwoWeak,
  FerroOneWeakNegative,
};

inline std::string pattern_name(Pattern pat) {
  switch (pat) {
    case Pattern::DegreeDisentangled: return "degree-disentangled";
    case Pattern::FerroOneWeak: return "ferro-one-weak";
    case Pattern::MixedTwoWeak: return "mixed-two-weak";
    case Pattern::FerroOneWeakNegative: return "ferro-one-weak-negative";
  }
  return "?";
}

inline Pattern parse_pattern(const std::string& name) {
  if (name == "degree-disentangled") return Pattern::DegreeDisentangled;
  if (name == "ferro-one-weak") return Pattern::FerroOneWeak;
  if (name == "mixed-two-weak") return Pattern::MixedTwoWeak;
  if (name == "ferro-one-weak-negative") return Pattern::FerroOneWeakNegative;
  throw ValidationError("unknown pattern '" + name + "'");
}

inline constexpr int kGraphRetryCap = 1000;

namespace detail {

using EdgeList = std::vector<std::pair<int, int>>;

inline bool has_edge(const std::vector<char>& adj, int p, int a, int b) {
  return adj[static_cast<std::size_t>(a) * p + b] != 0;
}

inline void add_edge(std::vector<char>& adj, EdgeList& edges, int p, int a, int b) {
  adj[static_cast<std::size_t>(a) * p + b] = 1;
  adj[static_cast<std::size_t>(b) * p + a] = 1;
  edges.emplace_back(std::min(a, b), std::max(a, b));
}

// Pairing model: one attempt shuffles d stubs per node and pairs them up;
// rejected wholesale on any self-loop, repeated edge, or forbidden edge.
inline EdgeList random_regular_edges(int p, int d, const std::vector<char>& forbidden,
                                     Rng& rng) {
  std::vector<int> stubs;
  stubs.reserve(static_cast<std::size_t>(p) * d);
  for (int attempt = 0; attempt < kGraphRetryCap; ++attempt) {
    stubs.clear();
    for (int i = 0; i < p; ++i)
      for (int k = 0; k < d; ++k) stubs.push_back(i);
    rng.shuffle(stubs);
    std::vector<char> adj(static_cast<std::size_t>(p) * p, 0);
    EdgeList edges;
    bool ok = true;
    for (std::size_t k = 0; k + 1 < stubs.size(); k += 2) {
      const int a = stubs[k], b = stubs[k + 1];
      if (a == b || has_edge(adj, p, a, b) ||
          (!forbidden.empty() && has_edge(forbidden, p, a, b))) {
        ok = false;
        break;
      }
      add_edge(adj, edges, p, a, b);
    }
    if (ok) return edges;
  }
  throw BudgetError("regular graph sampling: no simple pairing found in " +
                    std::to_string(kGraphRetryCap) + " attempts (p=" + std::to_string(p) +
                    ", d=" + std::to_string(d) + ")");
}

inline EdgeList random_perfect_matching(int p, Rng& rng) {
  std::vector<int> perm(p);
  for (int i = 0; i < p; ++i) perm[i] = i;
  rng.shuffle(perm);
  EdgeList edges;
  for (int k = 0; k + 1 < p; k += 2)
    edges.emplace_back(std::min(perm[k], perm[k + 1]), std::max(perm[k], perm[k + 1]));
  return edges;
}

// Applies a non-matching pattern to a fixed edge list. The special weak
// edge(s) are redrawn while any endpoint's weight sum would exceed the
// declared neighborhood bound.
inline CouplingMatrix apply_pattern(int p, const EdgeList& edges, Pattern pat, double beta,
                                    double lambda, double gamma_bound, Rng& rng) {
  CouplingMatrix coupling(p);
  const auto row_ok = [&](int node) { return coupling.row_abs_sum(node) <= gamma_bound + 1e-12; };
  switch (pat) {
    case Pattern::FerroOneWeak:
    case Pattern::FerroOneWeakNegative: {
      for (const auto& [a, b] : edges) coupling.set(a, b, beta);
      const double weak = pat == Pattern::FerroOneWeak ? lambda : -lambda;
      for (int attempt = 0; attempt < kGraphRetryCap; ++attempt) {
        const auto& [a, b] = edges[rng.uniform_below(edges.size())];
        coupling.set(a, b, weak);
        if (row_ok(a) && row_ok(b)) return coupling;
        coupling.set(a, b, beta);
      }
      break;
    }
    case Pattern::MixedTwoWeak: {
      for (const auto& [a, b] : edges) coupling.set(a, b, rng.spin() * beta);
      for (int attempt = 0; attempt < kGraphRetryCap; ++attempt) {
        const std::size_t e1 = rng.uniform_below(edges.size());
        std::size_t e2 = rng.uniform_below(edges.size() - 1);
        if (e2 >= e1) ++e2;
        const auto& [a1, b1] = edges[e1];
        const auto& [a2, b2] = edges[e2];
        const double old1 = coupling(a1, b1), old2 = coupling(a2, b2);
        coupling.set(a1, b1, lambda);
        coupling.set(a2, b2, -lambda);
        if (row_ok(a1) && row_ok(b1) && row_ok(a2) && row_ok(b2)) return coupling;
        coupling.set(a1, b1, old1);
        coupling.set(a2, b2, old2);
      }
      break;
    }
    case Pattern::DegreeDisentangled:
      throw ValidationError("apply_pattern: matching pattern handled by caller");
  }
  throw BudgetError("weak-edge placement: no admissible position found in " +
                    std::to_string(kGraphRetryCap) + " attempts");
}

inline void validate_weights(double beta, double lambda) {
  if (beta <= 0.0) throw ValidationError("generator: need beta > 0");
  if (lambda <= 0.0) throw ValidationError("generator: need lambda > 0");
}

}  // namespace detail

// Random d-regular graph on p nodes with the given interaction pattern.
inline CouplingMatrix generate_rrg(int p, int d, double beta, double lambda, Pattern pat,
                                   std::uint64_t seed) {
  detail::validate_weights(beta, lambda);
  if (p < 2 || d < 1 || d >= p)
    throw ValidationError("generate_rrg: need 2 <= p and 1 <= d < p");
  if ((static_cast<long long>(p) * d) % 2 != 0)
    throw ValidationError("generate_rrg: p*d must be even for a d-regular graph");
  Rng rng(seed);
  if (pat == Pattern::DegreeDisentangled) {
    if (p % 2 != 0)
      throw ValidationError("generate_rrg: degree-disentangled needs even p for a perfect matching");
    const auto matching = detail::random_perfect_matching(p, rng);
    std::vector<char> forbidden(static_cast<std::size_t>(p) * p, 0);
    detail::EdgeList matched;
    for (const auto& [a, b] : matching) detail::add_edge(forbidden, matched, p, a, b);
    const auto rest = detail::random_regular_edges(p, d - 1, forbidden, rng);
    CouplingMatrix coupling(p);
    for (const auto& [a, b] : matching) coupling.set(a, b, lambda);
    for (const auto& [a, b] : rest) coupling.set(a, b, beta);
    return coupling;
  }
  const auto edges = detail::random_regular_edges(p, d, {}, rng);
  const double gamma_bound = std::max(d * beta, (d - 1) * beta + lambda);
  return detail::apply_pattern(p, edges, pat, beta, lambda, gamma_bound, rng);
}

// L x L periodic square lattice: p = L^2 nodes, 2p edges, every degree 4.
inline CouplingMatrix generate_pbsl(int L, double beta, double lambda, Pattern pat,
                                    std::uint64_t seed) {
  detail::validate_weights(beta, lambda);
  if (L < 3) throw ValidationError("generate_pbsl: need L >= 3");
  const int p = L * L;
  Rng rng(seed);
  const auto node = [L](int i, int j) { return ((i % L + L) % L) * L + ((j % L + L) % L); };
  detail::EdgeList edges;
  const auto push = [&edges](int a, int b) {
    edges.emplace_back(std::min(a, b), std::max(a, b));
  };
  for (int i = 0; i < L; ++i)
    for (int j = 0; j < L; ++j) {
      push(node(i, j), node(i + 1, j));
      push(node(i, j), node(i, j + 1));
    }
  if (pat == Pattern::DegreeDisentangled) {
    if (L % 2 != 0)
      throw ValidationError("generate_pbsl: degree-disentangled needs even L for a lattice matching");
    CouplingMatrix coupling(p);
    for (const auto& [a, b] : edges) coupling.set(a, b, beta);
    // Horizontal dominoes with a random per-row offset: one lambda-neighbor each.
    for (int i = 0; i < L; ++i) {
      const int off = static_cast<int>(rng.uniform_below(2));
      for (int j = off; j < off + L; j += 2)
        coupling.set(node(i, j), node(i, j + 1), lambda);
    }
    return coupling;
  }
  const double gamma_bound = std::max(4 * beta, 3 * beta + lambda);
  return detail::apply_pattern(p, edges, pat, beta, lambda, gamma_bound, rng);
}

// Generator recipe: topology + pattern + weights + seed. Declares the family
// bounds its output is guaranteed to satisfy.
struct BenchmarkModel {
  enum class Topology { RRG, PBSL };

  Topology topology = Topology::RRG;
  int p = 0;   // RRG node count
  int d = 0;   // RRG degree
  int L = 0;   // PBSL side length
  Pattern pattern = Pattern::FerroOneWeak;
  double beta = 0.0;
  double lambda = 0.0;
  std::uint64_t seed = 0;

  static BenchmarkModel rrg(int p, int d, double beta, double lambda, Pattern pat,
                            std::uint64_t seed) {
    BenchmarkModel m;
    m.topology = Topology::RRG;
    m.p = p;
    m.d = d;
    m.pattern = pat;
    m.beta = beta;
    m.lambda = lambda;
    m.seed = seed;
    return m;
  }

  static BenchmarkModel pbsl(int L, double beta, double lambda, Pattern pat,
                             std::uint64_t seed) {
    BenchmarkModel m;
    m.topology = Topology::PBSL;
    m.L = L;
    m.p = L * L;
    m.d = 4;
    m.pattern = pat;
    m.beta = beta;
    m.lambda = lambda;
    m.seed = seed;
    return m;
  }

  int num_nodes() const { return topology == Topology::RRG ? p : L * L; }

  CouplingMatrix build() const {
    return topology == Topology::RRG ? generate_rrg(p, d, beta, lambda, pattern, seed)
                                     : generate_pbsl(L, beta, lambda, pattern, seed);
  }

  FamilyParams family() const {
    const int deg = topology == Topology::RRG ? d : 4;
    FamilyParams fam;
    fam.lambda = std::min(beta, lambda);
    fam.gamma = pattern == Pattern::DegreeDisentangled
                    ? (deg - 1) * beta + lambda
                    : std::max(deg * beta, (deg - 1) * beta + lambda);
    fam.d = deg;
    return fam;
  }
};

}  // namespace slide
