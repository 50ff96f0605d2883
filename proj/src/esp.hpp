#pragma once

#include "linalg.hpp"

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace espd {

/// Elementary symmetric polynomial value held as sign * exp(log_value).
/// Zero is represented by sign 0 and log_value -inf.
struct LogEsp {
  double log_value = -std::numeric_limits<double>::infinity();
  int sign = 0;
  int order = 0;

  double value() const;
  bool is_zero() const noexcept { return sign == 0; }

  static LogEsp zero(int order) { return LogEsp{-std::numeric_limits<double>::infinity(), 0, order}; }
};

namespace detail {

/// e_0..e_max_order of v (optionally skipping one index), using the algebraic
/// convention e_0 = 1. Truncated product recurrence over prefix polynomials,
/// O(size * max_order), with inputs divided by their geometric mean and the
/// running coefficient vector renormalized in log scale.
std::vector<LogEsp> esp_table(std::span<const double> v, int max_order,
                              std::ptrdiff_t skip = -1);

/// e_order(v) with e_0 = 1 and e_order = 0 for order > size.
LogEsp esp_algebraic(std::span<const double> v, int order, std::ptrdiff_t skip = -1);

}  // namespace detail

/// e_l(v). Follows the convention e_0 = 0 and e_l = 0 for l > size.
/// Throws kInput on non-finite input or negative order.
LogEsp esp_vector(std::span<const double> v, int order);

/// E_l(M) = e_l(lambda(M)) for symmetric M.
LogEsp esp_matrix(const Matrix& M, int order);

/// E_l(M^{-1}) = E_{m-l}(M) / det(M), evaluated without inverting M.
/// Requires 1 <= order <= m.
LogEsp esp_of_inverse(const PDMatrix& M, int order);

/// Same identity from a precomputed descending PD spectrum.
LogEsp esp_of_inverse_spectrum(const Vector& eigenvalues, int order);

/// Gradient of E_l at symmetric M: U diag(e_{l-1}(lambda_(i))) U^T, where
/// lambda_(i) drops the i-th eigenvalue. Requires 1 <= order <= m.
Matrix esp_gradient(const Matrix& M, int order);

/// Point P #_t Q on the affine-invariant geodesic from P (t=0) to Q (t=1).
PDMatrix geodesic_point(const PDMatrix& P, const PDMatrix& Q, double t);

}  // namespace espd
