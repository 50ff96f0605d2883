#pragma once

#include "esp.hpp"
#include "linalg.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace espd {

/// n x m experiment matrix (one candidate experiment per row) with full
/// column rank and n >= m.
class DesignMatrix {
 public:
  /// Throws kInput on shape, non-finite entries or rank deficiency.
  explicit DesignMatrix(Matrix rows);

  const Matrix& rows() const noexcept { return rows_; }
  std::size_t n() const noexcept { return static_cast<std::size_t>(rows_.rows()); }
  std::size_t m() const noexcept { return static_cast<std::size_t>(rows_.cols()); }
  auto row(std::size_t i) const { return rows_.row(static_cast<Eigen::Index>(i)); }

 private:
  Matrix rows_;
};

/// Selected experiments: strictly increasing row indices.
class Subset {
 public:
  Subset() = default;
  /// Sorts; throws kInput on duplicates.
  explicit Subset(std::vector<std::size_t> indices);

  const std::vector<std::size_t>& indices() const noexcept { return indices_; }
  std::size_t size() const noexcept { return indices_.size(); }
  bool contains(std::size_t i) const;

  /// Throws kInput if any index is >= n.
  void require_within(std::size_t n) const;

  friend bool operator==(const Subset&, const Subset&) = default;

 private:
  std::vector<std::size_t> indices_;
};

/// Subset of every index i with z_i > eps.
Subset support_subset(const Vector& z, double eps);

/// |a intersect b|.
std::size_t intersection_size(const Subset& a, const Subset& b);

/// Indicator vector of S in R^n.
Vector indicator(const Subset& S, std::size_t n);

/// ESP order l, validated against m at each operation.
struct ObjectiveOrder {
  int value;

  explicit ObjectiveOrder(int l) : value(l) {}
  void require_within(std::size_t m) const;
};

/// f_l(S) = (1/l) log E_l((X_S^T X_S)^{-1}). Throws kInfeasibleDesign when the
/// Gram matrix is not positive definite.
double f_discrete(const DesignMatrix& X, const Subset& S, ObjectiveOrder l);

/// f_l(z) = (1/l) log E_l((X^T Diag(z) X)^{-1}) for 0 <= z <= 1.
double f_relaxed(const DesignMatrix& X, const Vector& z, ObjectiveOrder l);

/// d f_l / d z_i = -(1/l) x_i^T W x_i.
Vector grad_relaxed(const DesignMatrix& X, const Vector& z, ObjectiveOrder l);

/// W = U (Lambda^{-1} - Diag(e_{m-l-1}(Lambda_(i))) / e_{m-l}(Lambda)) U^T for
/// U Lambda U^T = X^T Diag(z) X.
PDMatrix w_matrix(const DesignMatrix& X, const Vector& z, ObjectiveOrder l);

namespace detail {

/// Cholesky success plus the kPdFloor eigenvalue rule.
bool gram_is_feasible(const Matrix& gram);

/// Objective from a Gram matrix using eigenvalues only; nullopt when the
/// Gram fails the kPdFloor rule. No argument validation.
std::optional<double> objective_from_gram(const Matrix& gram, int order);

/// Diagonal of W in the eigenbasis, computed as e_{m-l}(lambda_(i)) /
/// (lambda_i e_{m-l}(lambda)), which equals the defining difference without
/// cancellation.
Vector w_spectrum(const Vector& eigenvalues, int order);

}  // namespace detail

}  // namespace espd
