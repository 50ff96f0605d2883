#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace espd {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Relative eigenvalue floor: a symmetric matrix counts as positive definite
/// only when its smallest eigenvalue exceeds kPdFloor times its largest.
inline constexpr double kPdFloor = 1e-10;

/// Relative asymmetry accepted on input, measured against the max entry.
inline constexpr double kSymmetryTol = 1e-12;

/// Eigenvalues sorted descending with matching orthonormal eigenvectors
/// (columns), so M = U diag(eigenvalues) U^T.
struct SpectralDecomp {
  Vector eigenvalues;
  Matrix eigenvectors;

  Matrix reconstruct() const;
};

/// Throws kInput when M is not square or asymmetric beyond kSymmetryTol.
void require_symmetric(const Matrix& M, const char* what);

/// Validates symmetry, symmetrizes and decomposes.
SpectralDecomp spectral_decomp(const Matrix& M);

/// Descending eigenvalues of an already-symmetric matrix; no validation.
Vector eigenvalues_desc(const Matrix& M);

/// True iff the descending spectrum satisfies the kPdFloor rule.
bool is_pd_spectrum(const Vector& eigenvalues_desc);

/// U diag(f(lambda)) U^T for a decomposition.
template <typename F>
Matrix spectral_apply(const SpectralDecomp& d, F&& f) {
  Vector mapped(d.eigenvalues.size());
  for (Eigen::Index i = 0; i < d.eigenvalues.size(); ++i) mapped(i) = f(d.eigenvalues(i));
  Matrix out = d.eigenvectors * mapped.asDiagonal() * d.eigenvectors.transpose();
  return 0.5 * (out + out.transpose());
}

/// Symmetric positive definite matrix, validated at construction.
class PDMatrix {
 public:
  /// Throws kInput if asymmetric, kDomain if not PD under kPdFloor.
  explicit PDMatrix(const Matrix& entries);

  const Matrix& matrix() const noexcept { return entries_; }
  const SpectralDecomp& spectrum() const noexcept { return spectrum_; }
  Eigen::Index dim() const noexcept { return entries_.rows(); }

 private:
  Matrix entries_;
  SpectralDecomp spectrum_;
};

/// X_S^T X_S for the listed rows.
Matrix gram_of_rows(const Matrix& X, std::span<const std::size_t> rows);

/// X^T Diag(z) X.
Matrix weighted_gram(const Matrix& X, const Vector& z);

}  // namespace espd
