#pragma once

#include "objective.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace espd {

struct SolverConfig {
  int max_iters = 2000;
  double step_init = 1.0;
  double tol_obj = 1e-9;
  double tol_grad = 1e-7;
  std::uint64_t seed = 0;

  /// Throws kInput unless tolerances and step are positive and max_iters >= 1.
  void validate() const;
};

struct SolverReport {
  Vector weights;
  int budget_k = 0;
  /// f at the start point followed by f after every accepted step.
  std::vector<double> objective_trace;
  int iterations = 0;
  std::size_t support_size = 0;
  bool converged = false;

  double objective() const { return objective_trace.back(); }
};

/// Default threshold for counting an entry of z as selected.
inline constexpr double kSupportEps = 1e-6;

/// Euclidean projection onto {0 <= z <= 1, 1^T z = k}. Bisection on the
/// multiplier mu of z_i = clamp(y_i - mu, 0, 1), then an exact solve on the
/// free set. Throws kInput unless 0 < k <= n.
Vector project_knapsack(const Vector& y, double k);

/// Projected gradient descent with Armijo backtracking on the continuous
/// relaxation. Throws kInput if k < m or k > n; kInfeasibleProblem if no
/// positive definite start exists.
SolverReport solve_relaxation(const DesignMatrix& X, int k, ObjectiveOrder l, const SolverConfig& cfg);

/// Count of entries with z_i > eps.
std::size_t support(const Vector& z, double eps = kSupportEps);

}  // namespace espd
