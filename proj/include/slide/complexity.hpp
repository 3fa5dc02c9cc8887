#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "slide/coupling_matrix.hpp"
#include "slide/dataset.hpp"
#include "slide/errors.hpp"
#include "slide/exact.hpp"
#include "slide/generators.hpp"
#include "slide/gibbs.hpp"
#include "slide/metrics.hpp"
#include "slide/parallel.hpp"
#include "slide/reconstruct.hpp"
#include "slide/rng.hpp"

namespace slide {

// Empirical sample complexity: the smallest n at which reconstruction is
// exact in (essentially) every trial. We scan a geometric grid upward, then
// bisect between the last failing and first passing n.
struct ComplexityProtocol {
  int trials = 45;
  double success_threshold = 1.0;  // fraction of trials that must recover exactly
  int grid_start = 100;
  double grid_factor = 1.3;
  int max_n = 1000000;
  double refine_rel = 0.05;  // bisection stops once the bracket is this tight

  void validate() const {
    if (trials < 1) throw ValidationError("protocol: need trials >= 1");
    if (success_threshold < 0.0 || success_threshold > 1.0)
      throw ValidationError("protocol: success_threshold must be in [0,1]");
    if (grid_start < 3) throw ValidationError("protocol: grid_start must be >= 3");
    if (grid_factor <= 1.0) throw ValidationError("protocol: grid_factor must be > 1");
    if (max_n < grid_start) throw ValidationError("protocol: max_n must be >= grid_start");
    if (refine_rel <= 0.0 || refine_rel >= 1.0)
      throw ValidationError("protocol: refine_rel must be in (0,1)");
  }
};

struct TracePoint {
  int n = 0;
  double success_rate = 0.0;
  int trials = 0;
};

struct ComplexityResult {
  int n_emp = 0;
  std::vector<TracePoint> trace;
};

// Raised when the grid tops out without a passing n; carries the evidence.
class MaxSamplesExceeded : public BudgetError {
 public:
  MaxSamplesExceeded(std::string message, std::vector<TracePoint> trace)
      : BudgetError(std::move(message)), trace_(std::move(trace)) {}

  const std::vector<TracePoint>& trace() const { return trace_; }

 private:
  std::vector<TracePoint> trace_;
};

inline void write_trace_csv(std::ostream& out, const std::vector<TracePoint>& trace) {
  out << "n,success_rate,trials\n";
  for (const auto& pt : trace)
    out << pt.n << "," << pt.success_rate << "," << pt.trials << "\n";
}

namespace detail {

// One trial: fresh data of size n from the model, reconstruct, compare
// supports. Seeds derive from (seed, n, trial) so trials are order-free.
class RecoveryProbe {
 public:
  RecoveryProbe(const BenchmarkModel& model, const SlideConfig& config, std::uint64_t seed)
      : truth_(model.build()), config_(config), seed_(seed) {
    if (truth_.p() <= kMaxExactNodes)
      exact_ = std::make_unique<ExactDistribution>(truth_);
  }

  const CouplingMatrix& truth() const { return truth_; }

  bool run_trial(int n, int trial) const {
    const std::uint64_t s = derive_seed(seed_, static_cast<std::uint64_t>(n),
                                        static_cast<std::uint64_t>(trial));
    Dataset data = exact_ ? sample_exact(*exact_, n, s)
                          : gibbs_sample(truth_, n, default_burn_in(truth_.p()),
                                         kDefaultThin, s);
    SlideConfig node_config = config_;
    node_config.threads = 1;
    return exact_recovery(reconstruct(data, node_config), truth_);
  }

  double success_rate(int n, int trials, int threads) const {
    std::vector<char> ok(trials, 0);
    parallel_for(0, trials, threads, [&](int t) { ok[t] = run_trial(n, t) ? 1 : 0; });
    int hits = 0;
    for (char c : ok) hits += c;
    return static_cast<double>(hits) / trials;
  }

 private:
  CouplingMatrix truth_;
  std::unique_ptr<ExactDistribution> exact_;
  SlideConfig config_;
  std::uint64_t seed_;
};

}  // namespace detail

inline ComplexityResult empirical_sample_complexity(const BenchmarkModel& model,
                                                    const ComplexityProtocol& protocol,
                                                    const SlideConfig& config,
                                                    std::uint64_t seed) {
  protocol.validate();
  const detail::RecoveryProbe probe(model, config, seed);
  std::vector<TracePoint> trace;
  const auto passes = [&](int n) {
    const double rate = probe.success_rate(n, protocol.trials, config.threads);
    trace.push_back({n, rate, protocol.trials});
    return rate >= protocol.success_threshold - 1e-12;
  };

  // Upward geometric scan.
  int last_fail = 0;
  int first_pass = -1;
  int n = protocol.grid_start;
  while (true) {
    if (passes(n)) {
      first_pass = n;
      break;
    }
    last_fail = n;
    if (n >= protocol.max_n)
      throw MaxSamplesExceeded("sample complexity above max_n=" +
                                   std::to_string(protocol.max_n),
                               std::move(trace));
    n = std::min(protocol.max_n,
                 std::max(n + 1, static_cast<int>(std::ceil(n * protocol.grid_factor))));
  }
  if (last_fail == 0) return {first_pass, std::move(trace)};  // never saw a failure

  // Bisect (last_fail, first_pass] down to the requested relative width.
  int lo = last_fail, hi = first_pass;
  while (hi - lo > 1 &&
         static_cast<double>(hi - lo) > protocol.refine_rel * hi) {
    const int mid = lo + (hi - lo) / 2;
    if (passes(mid))
      hi = mid;
    else
      lo = mid;
  }
  return {hi, std::move(trace)};
}

}  // namespace slide
