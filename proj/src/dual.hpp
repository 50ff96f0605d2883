#pragma once

#include "linalg.hpp"
#include "objective.hpp"

namespace espd {

/// a(H) together with the residuals of the system it solves.
struct DualCertificate {
  Matrix H;
  Matrix a_of_H;
  /// max_i |lambda_i^2 e_{l-1}(lambda_(i)) - h_i e_l(lambda)| / (h_i e_l(lambda))
  double stationarity_residual = 0.0;
  /// |tr(H a(H)^{-1}) - l|
  double trace_residual = 0.0;
  int iterations = 0;
};

/// Solves lambda_i^2 e_{l-1}(lambda_(i)) = h_i e_l(lambda) for the spectrum
/// of A = V diag(lambda) V^T, where H = V diag(h) V^T. Newton iteration in
/// log-lambda coordinates, halving the step while the residual grows,
/// capped at 500 iterations. Throws kDomain unless H is positive definite;
/// NumericFailure if the residual stays above 1e-8.
DualCertificate solve_a_of_H(const Matrix& H, int order);

/// (1/l) log E_l(a(H)).
double dual_value(const Matrix& H, int order);

/// Weak-duality lower bound on the relaxed optimum with budget k, valid for
/// PSD H with x_i^T H x_i <= 1 on every row: dual_value(H, l) + log(l / k).
double dual_bound(const Matrix& H, int order, int k);

/// H scaled so that max_i x_i^T H x_i = 1.
Matrix scale_to_feasible(const DesignMatrix& X, const Matrix& H);

}  // namespace espd
