#include "relax.hpp"

#include "error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace espd {

namespace {

constexpr int kBisectionIters = 100;
constexpr double kArmijoSlope = 1e-4;
constexpr double kBacktrackFactor = 0.5;
constexpr double kMinStep = 1e-16;
constexpr double kMaxStep = 1e8;

double clamped_sum(const Vector& y, double mu) {
  return (y.array() - mu).cwiseMax(0.0).cwiseMin(1.0).sum();
}

double objective_or_inf(const DesignMatrix& X, const Vector& z, int order) {
  const auto f = detail::objective_from_gram(weighted_gram(X.rows(), z), order);
  return f ? *f : std::numeric_limits<double>::infinity();
}

// Start point for rank-degenerate uniform weights: full mass on m rows picked
// by column-pivoted QR of X^T, the remaining k - m spread over the rest.
Vector pivoted_start(const DesignMatrix& X, int k) {
  const Eigen::ColPivHouseholderQR<Matrix> qr(X.rows().transpose());
  const auto n = static_cast<Eigen::Index>(X.n());
  const auto m = static_cast<Eigen::Index>(X.m());
  const double rest = n > m ? static_cast<double>(k - m) / static_cast<double>(n - m) : 0.0;
  Vector z = Vector::Constant(n, rest);
  for (Eigen::Index j = 0; j < m; ++j) z(qr.colsPermutation().indices()(j)) = 1.0;
  return z;
}

}  // namespace

void SolverConfig::validate() const {
  if (max_iters < 1) fail(ErrorCode::kInput, "max_iters must be >= 1");
  if (!(step_init > 0.0)) fail(ErrorCode::kInput, "step_init must be positive");
  if (!(tol_obj > 0.0) || !(tol_grad > 0.0)) fail(ErrorCode::kInput, "tolerances must be positive");
}

Vector project_knapsack(const Vector& y, double k) {
  const auto n = static_cast<double>(y.size());
  if (!(k > 0.0) || k > n) {
    fail(ErrorCode::kInput, "project_knapsack: need 0 < k <= n (k=" + std::to_string(k) +
                                ", n=" + std::to_string(y.size()) + ")");
  }
  if (!y.allFinite()) fail(ErrorCode::kInput, "project_knapsack: non-finite input");

  // clamped_sum is non-increasing in mu: n at lo, 0 at hi.
  double lo = y.minCoeff() - 1.0;
  double hi = y.maxCoeff();
  for (int it = 0; it < kBisectionIters; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (clamped_sum(y, mid) > k) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  double mu = 0.5 * (lo + hi);

  // Exact pass: with the active sets fixed, sum is affine in mu.
  double free_sum = 0.0;
  double upper = 0.0;
  double free_count = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double v = y(i) - mu;
    if (v >= 1.0) {
      upper += 1.0;
    } else if (v > 0.0) {
      free_sum += y(i);
      free_count += 1.0;
    }
  }
  if (free_count > 0.0) {
    const double exact = (free_sum + upper - k) / free_count;
    if (std::abs(clamped_sum(y, exact) - k) <= std::abs(clamped_sum(y, mu) - k)) mu = exact;
  }
  return (y.array() - mu).cwiseMax(0.0).cwiseMin(1.0).matrix();
}

std::size_t support(const Vector& z, double eps) {
  if (eps < 0.0) fail(ErrorCode::kInput, "support: eps must be >= 0");
  return static_cast<std::size_t>((z.array() > eps).count());
}

SolverReport solve_relaxation(const DesignMatrix& X, int k, ObjectiveOrder l, const SolverConfig& cfg) {
  cfg.validate();
  l.require_within(X.m());
  if (k < static_cast<int>(X.m()) || k > static_cast<int>(X.n())) {
    fail(ErrorCode::kInput, "solve_relaxation: need m <= k <= n");
  }
  const auto n = static_cast<Eigen::Index>(X.n());

  Vector z = project_knapsack(Vector::Constant(n, static_cast<double>(k) / static_cast<double>(n)), k);
  double f = objective_or_inf(X, z, l.value);
  if (!std::isfinite(f)) {
    z = project_knapsack(pivoted_start(X, k), k);
    f = objective_or_inf(X, z, l.value);
    if (!std::isfinite(f)) fail(ErrorCode::kInfeasibleProblem, "no positive definite starting design");
  }

  SolverReport report;
  report.budget_k = k;
  report.objective_trace.push_back(f);

  // Each line search starts from twice the last accepted step, so the step
  // adapts to the curvature instead of restarting at step_init.
  double step = cfg.step_init;
  for (int it = 0; it < cfg.max_iters; ++it) {
    const Vector grad = grad_relaxed(X, z, l);
    const Vector projected_grad = z - project_knapsack(z - grad, k);
    if (projected_grad.norm() < cfg.tol_grad) {
      report.converged = true;
      break;
    }

    double t = step;
    Vector candidate;
    double f_candidate = std::numeric_limits<double>::infinity();
    bool accepted = false;
    while (t >= kMinStep) {
      candidate = project_knapsack(z - t * grad, k);
      f_candidate = objective_or_inf(X, candidate, l.value);
      if (f_candidate <= f + kArmijoSlope * grad.dot(candidate - z)) {
        accepted = true;
        break;
      }
      t *= kBacktrackFactor;
    }
    if (!accepted) {
      // No step of any size descends: stationary to working precision.
      report.converged = true;
      break;
    }

    const double decrease = f - f_candidate;
    z = std::move(candidate);
    f = f_candidate;
    report.objective_trace.push_back(f);
    report.iterations = it + 1;
    step = std::min(2.0 * t, kMaxStep);
    if (std::abs(decrease) < cfg.tol_obj) {
      report.converged = true;
      break;
    }
  }

  report.weights = std::move(z);
  report.support_size = support(report.weights);
  return report;
}

}  // namespace espd
