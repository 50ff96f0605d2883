#pragma once

#include "linalg.hpp"
#include "objective.hpp"
#include "rng.hpp"

#include <cmath>

namespace espd::testing {

inline Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Matrix A(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) A(i, j) = rng.normal();
  }
  return A;
}

inline Matrix random_symmetric(Eigen::Index m, Rng& rng) {
  const Matrix A = random_matrix(m, m, rng);
  return 0.5 * (A + A.transpose());
}

/// Well-conditioned PD: A A^T / m + shift I.
inline Matrix random_pd(Eigen::Index m, Rng& rng, double shift = 0.1) {
  const Matrix A = random_matrix(m, m, rng);
  return A * A.transpose() / static_cast<double>(m) + shift * Matrix::Identity(m, m);
}

inline Matrix random_psd(Eigen::Index m, Eigen::Index rank, Rng& rng) {
  const Matrix A = random_matrix(m, rank, rng);
  return A * A.transpose();
}

inline DesignMatrix random_design(Eigen::Index n, Eigen::Index m, Rng& rng) {
  return DesignMatrix(random_matrix(n, m, rng));
}

/// Weights in [lo, hi] uniformly.
inline Vector random_weights(Eigen::Index n, Rng& rng, double lo = 0.2, double hi = 0.9) {
  Vector z(n);
  for (Eigen::Index i = 0; i < n; ++i) z(i) = rng.uniform(lo, hi);
  return z;
}

inline double rel_err(double got, double want) {
  const double scale = std::max(std::abs(want), 1e-300);
  return std::abs(got - want) / scale;
}

/// Concrete-like surrogate: nonnegative features with planted exact zeros
/// (each entry zero with probability zero_prob), a linear response with
/// 5% noise.
struct PlantedInstance {
  Matrix X;
  Vector y;
};

inline PlantedInstance planted_sparse_instance(Eigen::Index n, Eigen::Index m, double zero_prob, std::uint64_t seed) {
  Rng rng(seed);
  PlantedInstance inst;
  inst.X.resize(n, m);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      inst.X(i, j) = rng.bernoulli(zero_prob) ? 0.0 : rng.uniform(0.5, 1.5) * std::exp(0.5 * rng.normal());
    }
  }
  for (Eigen::Index j = 0; j < m; ++j) inst.X.col(j) /= inst.X.col(j).norm();
  Vector theta(m);
  for (Eigen::Index j = 0; j < m; ++j) theta(j) = rng.uniform(0.5, 2.0);
  inst.y = inst.X * theta;
  const double noise = 0.05 * inst.y.norm() / std::sqrt(static_cast<double>(n));
  for (Eigen::Index i = 0; i < n; ++i) inst.y(i) += noise * rng.normal();
  return inst;
}

}  // namespace espd::testing
