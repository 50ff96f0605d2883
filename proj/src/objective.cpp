#include "objective.hpp"

#include "error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace espd {

DesignMatrix::DesignMatrix(Matrix rows) : rows_(std::move(rows)) {
  if (rows_.cols() < 1) fail(ErrorCode::kInput, "design matrix needs at least one column");
  if (rows_.rows() < rows_.cols()) {
    fail(ErrorCode::kInput, "design matrix needs n >= m (got n=" + std::to_string(rows_.rows()) +
                                ", m=" + std::to_string(rows_.cols()) + ")");
  }
  if (!rows_.allFinite()) fail(ErrorCode::kInput, "design matrix has non-finite entries");
  const Eigen::BDCSVD<Matrix> svd(rows_);
  const Vector& sv = svd.singularValues();
  if (!(sv(0) > 0.0) || sv(sv.size() - 1) <= kPdFloor * sv(0)) {
    fail(ErrorCode::kInput, "design matrix is rank deficient");
  }
}

Subset::Subset(std::vector<std::size_t> indices) : indices_(std::move(indices)) {
  std::sort(indices_.begin(), indices_.end());
  if (std::adjacent_find(indices_.begin(), indices_.end()) != indices_.end()) {
    fail(ErrorCode::kInput, "subset indices must be distinct");
  }
}

bool Subset::contains(std::size_t i) const {
  return std::binary_search(indices_.begin(), indices_.end(), i);
}

void Subset::require_within(std::size_t n) const {
  if (!indices_.empty() && indices_.back() >= n) {
    fail(ErrorCode::kInput, "subset index " + std::to_string(indices_.back()) + " out of range for n=" +
                                std::to_string(n));
  }
}

Subset support_subset(const Vector& z, double eps) {
  std::vector<std::size_t> idx;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    if (z(i) > eps) idx.push_back(static_cast<std::size_t>(i));
  }
  return Subset(std::move(idx));
}

std::size_t intersection_size(const Subset& a, const Subset& b) {
  std::size_t count = 0;
  auto ia = a.indices().begin();
  auto ib = b.indices().begin();
  while (ia != a.indices().end() && ib != b.indices().end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++count, ++ia, ++ib;
    }
  }
  return count;
}

Vector indicator(const Subset& S, std::size_t n) {
  Vector z = Vector::Zero(static_cast<Eigen::Index>(n));
  for (std::size_t i : S.indices()) z(static_cast<Eigen::Index>(i)) = 1.0;
  return z;
}

void ObjectiveOrder::require_within(std::size_t m) const {
  if (value < 1 || static_cast<std::size_t>(value) > m) {
    fail(ErrorCode::kInput, "objective order l must lie in [1, " + std::to_string(m) + "], got " +
                                std::to_string(value));
  }
}

namespace detail {

bool gram_is_feasible(const Matrix& gram) {
  Eigen::LLT<Matrix> llt(gram);
  if (llt.info() != Eigen::Success) return false;
  return is_pd_spectrum(eigenvalues_desc(gram));
}

std::optional<double> objective_from_gram(const Matrix& gram, int order) {
  const Vector eig = eigenvalues_desc(gram);
  if (!is_pd_spectrum(eig)) return std::nullopt;
  return esp_of_inverse_spectrum(eig, order).log_value / order;
}

Vector w_spectrum(const Vector& eigenvalues, int order) {
  const auto m = static_cast<int>(eigenvalues.size());
  const std::span<const double> eig{eigenvalues.data(), static_cast<std::size_t>(m)};
  const LogEsp full = esp_algebraic(eig, m - order);
  Vector w(m);
  for (int i = 0; i < m; ++i) {
    const LogEsp dropped = esp_algebraic(eig, m - order, i);
    w(i) = std::exp(dropped.log_value - full.log_value - std::log(eigenvalues(i)));
  }
  return w;
}

}  // namespace detail

namespace {

void require_weights(const DesignMatrix& X, const Vector& z) {
  if (static_cast<std::size_t>(z.size()) != X.n()) {
    fail(ErrorCode::kInput, "weights length must equal n");
  }
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    if (!(z(i) >= 0.0 && z(i) <= 1.0 + 1e-12)) {
      fail(ErrorCode::kInput, "weights must lie in [0, 1] (index " + std::to_string(i) + ")");
    }
  }
}

Vector feasible_spectrum(const Matrix& gram, SpectralDecomp* decomp) {
  Eigen::LLT<Matrix> llt(gram);
  if (llt.info() != Eigen::Success) fail(ErrorCode::kInfeasibleDesign, "Gram matrix is not positive definite");
  Vector eig;
  if (decomp != nullptr) {
    *decomp = spectral_decomp(gram);
    eig = decomp->eigenvalues;
  } else {
    eig = eigenvalues_desc(gram);
  }
  if (!is_pd_spectrum(eig)) fail(ErrorCode::kInfeasibleDesign, "Gram matrix is not positive definite");
  return eig;
}

}  // namespace

double f_discrete(const DesignMatrix& X, const Subset& S, ObjectiveOrder l) {
  l.require_within(X.m());
  S.require_within(X.n());
  const Vector eig = feasible_spectrum(gram_of_rows(X.rows(), S.indices()), nullptr);
  return esp_of_inverse_spectrum(eig, l.value).log_value / l.value;
}

double f_relaxed(const DesignMatrix& X, const Vector& z, ObjectiveOrder l) {
  l.require_within(X.m());
  require_weights(X, z);
  const Vector eig = feasible_spectrum(weighted_gram(X.rows(), z.cwiseMax(0.0)), nullptr);
  return esp_of_inverse_spectrum(eig, l.value).log_value / l.value;
}

PDMatrix w_matrix(const DesignMatrix& X, const Vector& z, ObjectiveOrder l) {
  l.require_within(X.m());
  require_weights(X, z);
  SpectralDecomp d;
  feasible_spectrum(weighted_gram(X.rows(), z.cwiseMax(0.0)), &d);
  const Vector w = detail::w_spectrum(d.eigenvalues, l.value);
  return PDMatrix(d.eigenvectors * w.asDiagonal() * d.eigenvectors.transpose());
}

Vector grad_relaxed(const DesignMatrix& X, const Vector& z, ObjectiveOrder l) {
  l.require_within(X.m());
  require_weights(X, z);
  SpectralDecomp d;
  feasible_spectrum(weighted_gram(X.rows(), z.cwiseMax(0.0)), &d);
  const Vector w = detail::w_spectrum(d.eigenvalues, l.value);
  // x_i^T W x_i = || diag(sqrt w) U^T x_i ||^2
  const Matrix projected = X.rows() * d.eigenvectors * w.cwiseSqrt().asDiagonal();
  return -projected.rowwise().squaredNorm() / static_cast<double>(l.value);
}

}  // namespace espd
