#include "dual.hpp"

#include "error.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace espd {

namespace {

constexpr int kMaxIters = 500;
constexpr double kResidualTol = 1e-8;

struct System {
  Vector residual;  // log of lambda_i^2 e_{l-1}(lambda_(i)) / (h_i e_l(lambda))
  Matrix jacobian;  // d residual / d log lambda
};

// With u = log lambda:
//   r_i(u) = 2 u_i + log e_{l-1}(lambda_(i)) - log h_i - log e_l(lambda)
//   dr_i/du_j = 2 delta_ij + q_ij - p_j
// where p_j = lambda_j e_{l-1}(lambda_(j)) / e_l(lambda) and
// q_ij = lambda_j e_{l-2}(lambda_(i,j)) / e_{l-1}(lambda_(i)) for j != i.
System evaluate(const Vector& u, const Vector& log_h, int order, bool with_jacobian) {
  const auto m = u.size();
  const Vector lambda = u.array().exp();
  const std::span<const double> eig{lambda.data(), static_cast<std::size_t>(m)};
  const double log_full = detail::esp_algebraic(eig, order).log_value;

  System s;
  s.residual.resize(m);
  std::vector<double> log_dropped(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) {
    log_dropped[i] = detail::esp_algebraic(eig, order - 1, i).log_value;
    s.residual(i) = 2.0 * u(i) + log_dropped[i] - log_h(i) - log_full;
  }
  if (!with_jacobian) return s;

  s.jacobian = 2.0 * Matrix::Identity(m, m);
  std::vector<double> reduced(static_cast<std::size_t>(m - 1));
  for (Eigen::Index j = 0; j < m; ++j) {
    const double p = std::exp(u(j) + log_dropped[j] - log_full);
    for (Eigen::Index i = 0; i < m; ++i) s.jacobian(i, j) -= p;
  }
  if (order >= 2) {
    for (Eigen::Index i = 0; i < m; ++i) {
      std::size_t w = 0;
      for (Eigen::Index t = 0; t < m; ++t) {
        if (t != i) reduced[w++] = lambda(t);
      }
      // reduced drops i; position of j inside it shifts by one past i.
      for (Eigen::Index j = 0; j < m; ++j) {
        if (j == i) continue;
        const std::ptrdiff_t pos = j < i ? j : j - 1;
        const LogEsp inner = detail::esp_algebraic(reduced, order - 2, pos);
        if (inner.is_zero()) continue;
        s.jacobian(i, j) += std::exp(u(j) + inner.log_value - log_dropped[i]);
      }
    }
  }
  return s;
}

}  // namespace

DualCertificate solve_a_of_H(const Matrix& H, int order) {
  const SpectralDecomp d = spectral_decomp(H);
  const auto m = d.eigenvalues.size();
  if (order < 1 || order > m) fail(ErrorCode::kInput, "solve_a_of_H: order must lie in [1, m]");
  if (!is_pd_spectrum(d.eigenvalues)) fail(ErrorCode::kDomain, "solve_a_of_H: H must be positive definite");

  const Vector h = d.eigenvalues;
  const Vector log_h = h.array().log();
  // lambda0 = s sqrt(h) with s chosen so that sum h_i / lambda_i = l.
  const double scale = h.cwiseSqrt().sum() / order;
  Vector u = 0.5 * log_h.array() + std::log(scale);

  System sys = evaluate(u, log_h, order, true);
  double norm = sys.residual.cwiseAbs().maxCoeff();
  int it = 0;
  for (; it < kMaxIters && norm > 1e-14; ++it) {
    Vector step = -sys.jacobian.fullPivLu().solve(sys.residual);
    if (!step.allFinite()) step = -0.5 * sys.residual;  // damped fixed-point fallback
    double damping = 1.0;
    Vector trial;
    double trial_norm = 0.0;
    for (int halvings = 0; halvings < 60; ++halvings) {
      trial = u + damping * step;
      trial_norm = evaluate(trial, log_h, order, false).residual.cwiseAbs().maxCoeff();
      if (trial_norm < norm) break;
      damping *= 0.5;
    }
    if (!(trial_norm < norm)) break;
    u = trial;
    sys = evaluate(u, log_h, order, true);
    norm = sys.residual.cwiseAbs().maxCoeff();
  }

  DualCertificate cert;
  cert.H = 0.5 * (H + H.transpose());
  cert.iterations = it;
  cert.stationarity_residual = sys.residual.array().expm1().abs().maxCoeff();
  const Vector lambda = u.array().exp();
  cert.a_of_H = spectral_apply(SpectralDecomp{lambda, d.eigenvectors}, [](double x) { return x; });
  cert.trace_residual = std::abs(h.cwiseQuotient(lambda).sum() - order);
  if (!(cert.stationarity_residual <= kResidualTol)) {
    throw NumericFailure(cert.stationarity_residual,
                         "solve_a_of_H: residual " + std::to_string(cert.stationarity_residual) +
                             " after " + std::to_string(it) + " iterations");
  }
  return cert;
}

double dual_value(const Matrix& H, int order) {
  const DualCertificate cert = solve_a_of_H(H, order);
  return esp_matrix(cert.a_of_H, order).log_value / order;
}

double dual_bound(const Matrix& H, int order, int k) {
  if (k < 1) fail(ErrorCode::kInput, "dual_bound: k must be positive");
  return dual_value(H, order) + std::log(static_cast<double>(order) / k);
}

Matrix scale_to_feasible(const DesignMatrix& X, const Matrix& H) {
  const double peak = (X.rows() * H).cwiseProduct(X.rows()).rowwise().sum().maxCoeff();
  if (!(peak > 0.0)) fail(ErrorCode::kDomain, "scale_to_feasible: x_i^T H x_i is never positive");
  return H / peak;
}

}  // namespace espd
