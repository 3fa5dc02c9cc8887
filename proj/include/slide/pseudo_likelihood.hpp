#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "slide/dataset.hpp"
#include "slide/errors.hpp"
#include "slide/numeric.hpp"

namespace slide {

// Nodewise objective for node i: the mean over samples of the log conditional
// likelihood log P(z_i | z_{-i}) = -log(1 + exp(-2 z_i sum_j J_ij z_j)).
// Mean normalization (not sum) so that splicing thresholds and the model-size
// penalty are sample-size free.

namespace detail {

// m_r = z_i^{(r)} * sum_{j != i} coef_j z_j^{(r)} for every sample.
inline std::vector<double> margins(const std::vector<double>& coef, const Dataset& data,
                                   int i) {
  const int n = data.n(), p = data.p();
  std::vector<double> m(n, 0.0);
  for (int j = 0; j < p; ++j) {
    const double c = coef[j];
    if (j == i || c == 0.0) continue;
    for (int r = 0; r < n; ++r)
      m[r] += c * data(r, i) * data(r, j);
  }
  return m;
}

inline void check_node_vector(const std::vector<double>& coef, const Dataset& data, int i) {
  if (static_cast<int>(coef.size()) != data.p())
    throw ValidationError("node coefficient vector must have length p");
  if (i < 0 || i >= data.p()) throw ValidationError("node index out of range");
  if (coef[i] != 0.0)
    throw ValidationError("node coefficient vector must be zero at its own node");
}

}  // namespace detail

inline double pl_value(const std::vector<double>& coef, const Dataset& data, int i) {
  detail::check_node_vector(coef, data, i);
  const auto m = detail::margins(coef, data, i);
  double acc = 0.0;
  for (double mr : m) acc -= softplus(-2.0 * mr);
  return data.n() > 0 ? acc / data.n() : 0.0;
}

// Coordinate j: (2/n) sum_r z_i z_j sigma(-2 m_r); coordinate i fixed to 0.
// At coef = 0 this is the empirical covariance (1/n) sum_r z_i z_j.
inline std::vector<double> pl_gradient(const std::vector<double>& coef, const Dataset& data,
                                       int i) {
  detail::check_node_vector(coef, data, i);
  const int n = data.n(), p = data.p();
  const auto m = detail::margins(coef, data, i);
  std::vector<double> g(p, 0.0);
  for (int r = 0; r < n; ++r) {
    const double w = 2.0 * sigmoid(-2.0 * m[r]) / n * data(r, i);
    const std::int8_t* row = data.row(r);
    for (int j = 0; j < p; ++j) g[j] += w * row[j];
  }
  g[i] = 0.0;
  return g;
}

// Entry (a,b): -(1/n) sum_r h_r z_{A[a]} z_{A[b]} with h_r = 4 sigma(-2m) sigma(2m).
// Always negative semidefinite; at coef = 0 the diagonal is exactly -1.
inline Eigen::MatrixXd pl_hessian(const std::vector<double>& coef, const Dataset& data, int i,
                                  const std::vector<int>& support) {
  detail::check_node_vector(coef, data, i);
  const int n = data.n();
  const int k = static_cast<int>(support.size());
  const auto m = detail::margins(coef, data, i);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(k, k);
  Eigen::VectorXd u(k);
  for (int r = 0; r < n; ++r) {
    const double s = sigmoid(-2.0 * m[r]);
    const double hr = 4.0 * s * (1.0 - s);
    for (int a = 0; a < k; ++a) u[a] = data(r, support[a]);
    h.noalias() -= (hr / n) * u * u.transpose();
  }
  return h;
}

struct NewtonOptions {
  double grad_tol = 1e-8;
  double step_tol = 1e-6;
  int max_iter = 100;
  int max_halvings = 30;
  double cap = 15.0;
};

// Maximizer of the node objective restricted to a support set, plus the full
// gradient there (feeds the splicing importance scores).
struct RestrictedSolution {
  std::vector<int> support;       // sorted ascending, never contains the node
  std::vector<double> coef;       // parallel to support
  double pl = 0.0;
  std::vector<double> grad;       // full length p, entry at the node is 0
  bool converged = false;
  bool capped = false;

  std::vector<double> dense(int p) const {
    std::vector<double> full(p, 0.0);
    for (std::size_t a = 0; a < support.size(); ++a) full[support[a]] = coef[a];
    return full;
  }

  double coef_at(int j) const {
    const auto it = std::lower_bound(support.begin(), support.end(), j);
    if (it == support.end() || *it != j) return 0.0;
    return coef[static_cast<std::size_t>(it - support.begin())];
  }
};

// Damped Newton on the restricted concave problem. Stops when the support
// gradient is below grad_tol and the last step was small, or after max_iter
// iterations. Quasi-separated fits run away in norm; once any coefficient
// passes the cap the whole vector is clamped and the solve stops (capped).
// A singular or non-ascent Newton system falls back to a gradient step.
inline RestrictedSolution maximize_on_support(const Dataset& data, int i,
                                              std::vector<int> support,
                                              const std::optional<std::vector<double>>& warm,
                                              const NewtonOptions& opt = {}) {
  const int n = data.n(), p = data.p();
  if (i < 0 || i >= p) throw ValidationError("maximize_on_support: node index out of range");
  std::sort(support.begin(), support.end());
  support.erase(std::unique(support.begin(), support.end()), support.end());
  for (int j : support)
    if (j < 0 || j >= p || j == i)
      throw ValidationError("maximize_on_support: bad support member " + std::to_string(j));
  const int k = static_cast<int>(support.size());
  if (k > n)
    throw ValidationError("maximize_on_support: support larger than sample count");

  RestrictedSolution out;
  out.support = support;
  out.coef.assign(k, 0.0);

  Eigen::VectorXd x = Eigen::VectorXd::Zero(k);
  if (warm) {
    if (static_cast<int>(warm->size()) != p)
      throw ValidationError("maximize_on_support: warm start must have length p");
    for (int a = 0; a < k; ++a)
      x[a] = std::clamp((*warm)[support[a]], -opt.cap, opt.cap);
  }

  // U(r,a) = z_i^{(r)} z_{A[a]}^{(r)}; margins are U x, curvature U' diag(h) U.
  Eigen::MatrixXd u_mat(n, k);
  for (int r = 0; r < n; ++r)
    for (int a = 0; a < k; ++a)
      u_mat(r, a) = static_cast<double>(data(r, i)) * data(r, support[a]);

  const auto mean_pl = [&](const Eigen::VectorXd& m) {
    double acc = 0.0;
    for (int r = 0; r < n; ++r) acc -= softplus(-2.0 * m[r]);
    return acc / n;
  };

  Eigen::VectorXd m = u_mat * x;
  double pl = mean_pl(m);
  bool grad_ok = false;

  if (k > 0) {
    double last_step = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < opt.max_iter; ++iter) {
      Eigen::VectorXd w(n);
      for (int r = 0; r < n; ++r) w[r] = sigmoid(-2.0 * m[r]);
      Eigen::VectorXd g = (2.0 / n) * (u_mat.transpose() * w);
      grad_ok = g.lpNorm<Eigen::Infinity>() <= opt.grad_tol;
      if (grad_ok && last_step <= opt.step_tol) break;

      Eigen::VectorXd h(n);
      for (int r = 0; r < n; ++r) h[r] = 4.0 * w[r] * (1.0 - w[r]) / n;
      Eigen::MatrixXd neg_hess = u_mat.transpose() * h.asDiagonal() * u_mat;
      Eigen::VectorXd step;
      const auto ldlt = neg_hess.ldlt();
      bool newton_ok = ldlt.info() == Eigen::Success;
      if (newton_ok) {
        step = ldlt.solve(g);
        newton_ok = step.allFinite() && g.dot(step) > 0.0;
      }
      if (!newton_ok) step = g;

      const Eigen::VectorXd dm = u_mat * step;
      // Once the predicted ascent g'step drops under summation noise the line
      // search cannot resolve it; take the bare step (safe: concave, near the
      // optimum Newton is a contraction) so the gradient can keep shrinking.
      if (g.dot(step) <= 1e-13) {
        x += step;
        m += dm;
        pl = mean_pl(m);
        last_step = step.lpNorm<Eigen::Infinity>();
      } else {
        double t = 1.0;
        bool moved = false;
        for (int halv = 0; halv <= opt.max_halvings; ++halv) {
          const double trial = mean_pl(m + t * dm);
          if (trial >= pl) {
            x += t * step;
            m += t * dm;
            pl = trial;
            last_step = t * step.lpNorm<Eigen::Infinity>();
            moved = true;
            break;
          }
          t *= 0.5;
        }
        if (!moved) break;  // flat to machine precision along an ascent direction
      }

      if (x.lpNorm<Eigen::Infinity>() > opt.cap) {
        for (int a = 0; a < k; ++a) x[a] = std::clamp(x[a], -opt.cap, opt.cap);
        m = u_mat * x;
        pl = mean_pl(m);
        out.capped = true;
        break;
      }
    }
  }

  // Full gradient at the solution; also the final convergence verdict.
  out.grad.assign(p, 0.0);
  double grad_inf = 0.0;
  for (int r = 0; r < n; ++r) {
    const double wr = 2.0 * sigmoid(-2.0 * m[r]) / n * data(r, i);
    const std::int8_t* row = data.row(r);
    for (int j = 0; j < p; ++j) out.grad[j] += wr * row[j];
  }
  out.grad[i] = 0.0;
  for (int a = 0; a < k; ++a) grad_inf = std::max(grad_inf, std::abs(out.grad[support[a]]));
  out.converged = k == 0 || grad_inf <= opt.grad_tol;
  out.pl = pl;
  for (int a = 0; a < k; ++a) out.coef[a] = x[a];
  return out;
}

// Convenience wrapper housing (dataset, node) for the objective family.
struct NodeObjective {
  const Dataset* data;
  int node;

  double value(const std::vector<double>& coef) const { return pl_value(coef, *data, node); }
  std::vector<double> gradient(const std::vector<double>& coef) const {
    return pl_gradient(coef, *data, node);
  }
  Eigen::MatrixXd hessian(const std::vector<double>& coef,
                          const std::vector<int>& support) const {
    return pl_hessian(coef, *data, node, support);
  }
};

}  // namespace slide
