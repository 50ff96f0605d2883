#include "esp.hpp"

#include "error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>

namespace espd {

namespace {

void require_order(int order, int dim, const char* what) {
  if (order < 1 || order > dim) {
    fail(ErrorCode::kInput, std::string(what) + ": order must lie in [1, " +
                                std::to_string(dim) + "], got " + std::to_string(order));
  }
}

}  // namespace

double LogEsp::value() const {
  if (sign == 0) return 0.0;
  return sign * std::exp(log_value);
}

namespace detail {

std::vector<LogEsp> esp_table(std::span<const double> v, int max_order, std::ptrdiff_t skip) {
  const std::size_t top = static_cast<std::size_t>(std::max(max_order, 0));

  // Each coefficient is mant[j] * 2^expo[j] with its own exponent: the
  // entries of a wide spectrum can differ by thousands of decades.
  std::vector<double> mant(top + 1, 0.0);
  std::vector<std::int64_t> expo(top + 1, 0);
  mant[0] = 0.5;
  expo[0] = 1;
  std::size_t degree = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (static_cast<std::ptrdiff_t>(i) == skip) continue;
    degree = std::min(degree + 1, top);
    if (v[i] == 0.0) continue;
    int w_exp = 0;
    const double w_mant = std::frexp(v[i], &w_exp);
    for (std::size_t j = degree; j >= 1; --j) {
      if (mant[j - 1] == 0.0) continue;
      const double term = mant[j - 1] * w_mant;
      const std::int64_t term_exp = expo[j - 1] + w_exp;
      if (mant[j] == 0.0) {
        mant[j] = term;
        expo[j] = term_exp;
      } else {
        const std::int64_t e = std::max(expo[j], term_exp);
        mant[j] = std::ldexp(mant[j], static_cast<int>(std::max<std::int64_t>(expo[j] - e, -2000))) +
                  std::ldexp(term, static_cast<int>(std::max<std::int64_t>(term_exp - e, -2000)));
        expo[j] = e;
      }
      int k = 0;
      mant[j] = std::frexp(mant[j], &k);
      expo[j] = mant[j] == 0.0 ? 0 : expo[j] + k;
    }
  }

  std::vector<LogEsp> out(top + 1);
  for (std::size_t j = 0; j <= top; ++j) {
    out[j].order = static_cast<int>(j);
    if (mant[j] == 0.0) continue;
    out[j].sign = mant[j] > 0.0 ? 1 : -1;
    out[j].log_value = std::log(std::abs(mant[j])) + static_cast<double>(expo[j]) * std::numbers::ln2;
  }
  return out;
}

LogEsp esp_algebraic(std::span<const double> v, int order, std::ptrdiff_t skip) {
  const std::size_t count = v.size() - (skip >= 0 ? 1 : 0);
  if (order < 0 || static_cast<std::size_t>(order) > count) return LogEsp::zero(order);
  return esp_table(v, order, skip).back();
}

}  // namespace detail

LogEsp esp_vector(std::span<const double> v, int order) {
  if (order < 0) fail(ErrorCode::kInput, "esp_vector: negative order");
  for (double x : v) {
    if (!std::isfinite(x)) fail(ErrorCode::kInput, "esp_vector: non-finite input");
  }
  if (order == 0) return LogEsp::zero(0);
  return detail::esp_algebraic(v, order);
}

LogEsp esp_matrix(const Matrix& M, int order) {
  require_symmetric(M, "esp_matrix");
  if (order < 0) fail(ErrorCode::kInput, "esp_matrix: negative order");
  if (order == 0) return LogEsp::zero(0);
  const Vector eig = eigenvalues_desc(0.5 * (M + M.transpose()));
  return detail::esp_algebraic({eig.data(), static_cast<std::size_t>(eig.size())}, order);
}

LogEsp esp_of_inverse_spectrum(const Vector& eigenvalues, int order) {
  const int m = static_cast<int>(eigenvalues.size());
  require_order(order, m, "esp_of_inverse");
  if (!is_pd_spectrum(eigenvalues)) fail(ErrorCode::kDomain, "esp_of_inverse: matrix is not positive definite");
  const LogEsp complement =
      detail::esp_algebraic({eigenvalues.data(), static_cast<std::size_t>(m)}, m - order);
  const double log_det = eigenvalues.array().log().sum();
  return LogEsp{complement.log_value - log_det, 1, order};
}

LogEsp esp_of_inverse(const PDMatrix& M, int order) {
  return esp_of_inverse_spectrum(M.spectrum().eigenvalues, order);
}

Matrix esp_gradient(const Matrix& M, int order) {
  const SpectralDecomp d = spectral_decomp(M);
  const int m = static_cast<int>(d.eigenvalues.size());
  require_order(order, m, "esp_gradient");
  const std::span<const double> eig{d.eigenvalues.data(), static_cast<std::size_t>(m)};
  Vector partial(m);
  for (int i = 0; i < m; ++i) partial(i) = detail::esp_algebraic(eig, order - 1, i).value();
  Matrix grad = d.eigenvectors * partial.asDiagonal() * d.eigenvectors.transpose();
  return 0.5 * (grad + grad.transpose());
}

PDMatrix geodesic_point(const PDMatrix& P, const PDMatrix& Q, double t) {
  if (P.dim() != Q.dim()) fail(ErrorCode::kInput, "geodesic_point: dimension mismatch");
  if (!(t >= 0.0 && t <= 1.0)) fail(ErrorCode::kInput, "geodesic_point: t must lie in [0, 1]");
  const Matrix root = spectral_apply(P.spectrum(), [](double x) { return std::sqrt(x); });
  const Matrix inv_root = spectral_apply(P.spectrum(), [](double x) { return 1.0 / std::sqrt(x); });
  Matrix inner = inv_root * Q.matrix() * inv_root;
  inner = 0.5 * (inner + inner.transpose());
  const SpectralDecomp inner_d = spectral_decomp(inner);
  const Matrix powered = spectral_apply(inner_d, [t](double x) { return std::pow(std::max(x, 0.0), t); });
  Matrix out = root * powered * root;
  return PDMatrix(0.5 * (out + out.transpose()));
}

}  // namespace espd
