#include "linalg.hpp"

#include "error.hpp"

#include <string>

namespace espd {

Matrix SpectralDecomp::reconstruct() const {
  return eigenvectors * eigenvalues.asDiagonal() * eigenvectors.transpose();
}

void require_symmetric(const Matrix& M, const char* what) {
  if (M.rows() != M.cols() || M.rows() == 0) {
    fail(ErrorCode::kInput, std::string(what) + ": matrix must be square and non-empty");
  }
  if (!M.allFinite()) fail(ErrorCode::kInput, std::string(what) + ": non-finite entry");
  const double scale = M.cwiseAbs().maxCoeff();
  const double asym = (M - M.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymmetryTol * scale) {
    fail(ErrorCode::kInput, std::string(what) + ": matrix is not symmetric");
  }
}

SpectralDecomp spectral_decomp(const Matrix& M) {
  require_symmetric(M, "spectral_decomp");
  const Matrix sym = 0.5 * (M + M.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    fail(ErrorCode::kNumericFailure, "symmetric eigensolver did not converge");
  }
  // Eigen returns ascending order.
  SpectralDecomp d;
  d.eigenvalues = solver.eigenvalues().reverse();
  d.eigenvectors = solver.eigenvectors().rowwise().reverse();
  return d;
}

Vector eigenvalues_desc(const Matrix& M) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(M, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().reverse();
}

bool is_pd_spectrum(const Vector& eigenvalues_desc) {
  if (eigenvalues_desc.size() == 0) return false;
  const double top = eigenvalues_desc(0);
  const double bottom = eigenvalues_desc(eigenvalues_desc.size() - 1);
  return top > 0.0 && bottom > kPdFloor * top;
}

PDMatrix::PDMatrix(const Matrix& entries) {
  spectrum_ = spectral_decomp(entries);
  if (!is_pd_spectrum(spectrum_.eigenvalues)) {
    fail(ErrorCode::kDomain, "matrix is not positive definite");
  }
  entries_ = 0.5 * (entries + entries.transpose());
}

Matrix gram_of_rows(const Matrix& X, std::span<const std::size_t> rows) {
  Matrix G = Matrix::Zero(X.cols(), X.cols());
  for (std::size_t r : rows) {
    G.selfadjointView<Eigen::Lower>().rankUpdate(X.row(static_cast<Eigen::Index>(r)).transpose());
  }
  G.triangularView<Eigen::StrictlyUpper>() = G.transpose();
  return G;
}

Matrix weighted_gram(const Matrix& X, const Vector& z) {
  Matrix G = Matrix::Zero(X.cols(), X.cols());
  G.selfadjointView<Eigen::Lower>().rankUpdate(X.transpose() * z.cwiseSqrt().asDiagonal());
  G.triangularView<Eigen::StrictlyUpper>() = G.transpose();
  return G;
}

}  // namespace espd
