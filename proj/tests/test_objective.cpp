#include "error.hpp"
#include "esp.hpp"
#include "objective.hpp"
#include "oracles.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

namespace espd {
namespace {

using testing::random_design;
using testing::random_weights;

// Oracle: explicit inverse then principal-minor sum.
double explicit_objective(const Matrix& gram, int l) {
  const Matrix inv = gram.partialPivLu().inverse();
  return std::log(oracles::esp_minor_sum(0.5 * (inv + inv.transpose()), l)) / l;
}

Matrix weighted(const DesignMatrix& X, const Vector& z) {
  return X.rows().transpose() * z.asDiagonal() * X.rows();
}

Subset random_subset(std::size_t n, std::size_t k, Rng& rng) {
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), 0);
  for (std::size_t i = 0; i < k; ++i) std::swap(all[i], all[i + rng.below(n - i)]);
  all.resize(k);
  return Subset(all);
}

TEST(DesignMatrix, Validation) {
  EXPECT_THROW(DesignMatrix(Matrix::Ones(2, 3)), Error);
  EXPECT_THROW(DesignMatrix(Matrix::Ones(4, 2)), Error);
  Matrix bad = Matrix::Identity(3, 3);
  bad(1, 1) = std::nan("");
  EXPECT_THROW(DesignMatrix{bad}, Error);
  EXPECT_NO_THROW(DesignMatrix(Matrix::Identity(3, 3)));
}

TEST(Subset, SortsAndRejectsDuplicates) {
  const Subset S({4, 1, 2});
  EXPECT_EQ(S.indices(), (std::vector<std::size_t>{1, 2, 4}));
  EXPECT_TRUE(S.contains(2));
  EXPECT_FALSE(S.contains(3));
  EXPECT_THROW(Subset({1, 1}), Error);
  EXPECT_THROW(S.require_within(4), Error);
  EXPECT_EQ(intersection_size(S, Subset({0, 1, 4, 5})), 2u);
}

TEST(FDiscrete, ScalarExample) {
  const DesignMatrix X(Matrix(Eigen::Vector3d(1, 2, 3)));
  EXPECT_NEAR(f_discrete(X, Subset({2}), ObjectiveOrder(1)), std::log(1.0 / 9.0), 1e-14);
  EXPECT_NEAR(f_discrete(X, Subset({0, 1, 2}), ObjectiveOrder(1)), std::log(1.0 / 14.0), 1e-14);
}

TEST(FDiscrete, IdentityDesign) {
  const DesignMatrix X(Matrix::Identity(4, 4));
  // E_l(I) = C(4, l).
  for (int l = 1; l <= 4; ++l) {
    EXPECT_NEAR(f_discrete(X, Subset({0, 1, 2, 3}), ObjectiveOrder(l)),
                std::log(static_cast<double>(oracles::binomial(4, l))) / l, 1e-13);
  }
}

TEST(FDiscrete, InfeasibleAndOrderErrors) {
  Rng rng(1);
  const DesignMatrix X = random_design(10, 3, rng);
  EXPECT_THROW(f_discrete(X, Subset({0, 1}), ObjectiveOrder(1)), Error);
  try {
    f_discrete(X, Subset({0, 1}), ObjectiveOrder(1));
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInfeasibleDesign);
  }
  EXPECT_THROW(f_discrete(X, Subset({0, 1, 2}), ObjectiveOrder(0)), Error);
  EXPECT_THROW(f_discrete(X, Subset({0, 1, 2}), ObjectiveOrder(4)), Error);
  EXPECT_THROW(f_discrete(X, Subset({0, 1, 10}), ObjectiveOrder(1)), Error);
}

TEST(FDiscrete, MatchesExplicitInverse) {
  Rng rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const int m = 1 + static_cast<int>(rng.below(6));
    const int n = m + 2 + static_cast<int>(rng.below(20));
    const DesignMatrix X = random_design(n, m, rng);
    const Subset S = random_subset(n, m + rng.below(n - m + 1), rng);
    Matrix gram(m, m);
    gram.setZero();
    for (auto i : S.indices()) gram += X.row(i).transpose() * X.row(i);
    for (int l = 1; l <= m; ++l) {
      EXPECT_NEAR(f_discrete(X, S, ObjectiveOrder(l)), explicit_objective(gram, l), 1e-8);
    }
  }
}

TEST(FRelaxed, BinaryWeightsMatchDiscrete) {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const int m = 1 + static_cast<int>(rng.below(6));
    const int n = m + 1 + static_cast<int>(rng.below(20));
    const DesignMatrix X = random_design(n, m, rng);
    const Subset S = random_subset(n, m + rng.below(n - m + 1), rng);
    for (int l = 1; l <= m; ++l) {
      EXPECT_NEAR(f_relaxed(X, indicator(S, n), ObjectiveOrder(l)), f_discrete(X, S, ObjectiveOrder(l)), 1e-10);
    }
  }
}

TEST(FRelaxed, ScalarExampleAndValidation) {
  const DesignMatrix X(Matrix(Eigen::Vector3d(1, 2, 3)));
  EXPECT_NEAR(f_relaxed(X, Vector(Eigen::Vector3d(0, 0, 1)), ObjectiveOrder(1)), std::log(1.0 / 9.0), 1e-14);
  EXPECT_THROW(f_relaxed(X, Vector(Eigen::Vector3d(0, 0, 1.5)), ObjectiveOrder(1)), Error);
  EXPECT_THROW(f_relaxed(X, Vector(Eigen::Vector3d(0, -0.1, 1)), ObjectiveOrder(1)), Error);
  EXPECT_THROW(f_relaxed(X, Vector(Eigen::Vector2d(0, 1)), ObjectiveOrder(1)), Error);
  EXPECT_THROW(f_relaxed(X, Vector::Zero(3), ObjectiveOrder(1)), Error);
}

TEST(FRelaxed, MatchesExplicitInverse) {
  Rng rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const int m = 1 + static_cast<int>(rng.below(6));
    const int n = m + static_cast<int>(rng.below(20));
    const DesignMatrix X = random_design(n, m, rng);
    const Vector z = random_weights(n, rng);
    for (int l = 1; l <= m; ++l) {
      EXPECT_NEAR(f_relaxed(X, z, ObjectiveOrder(l)), explicit_objective(weighted(X, z), l), 1e-8);
    }
  }
}

Vector finite_difference(const DesignMatrix& X, const Vector& z, int l, double h) {
  Vector g(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    Vector up = z, down = z;
    up(i) += h;
    down(i) -= h;
    g(i) = (f_relaxed(X, up, ObjectiveOrder(l)) - f_relaxed(X, down, ObjectiveOrder(l))) / (2 * h);
  }
  return g;
}

TEST(GradRelaxed, MatchesFiniteDifferences) {
  Rng rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const int m = 1 + static_cast<int>(rng.below(8));
    const int n = m + static_cast<int>(rng.below(30));
    const DesignMatrix X = random_design(n, m, rng);
    const Vector z = random_weights(n, rng);
    for (int l = 1; l <= m; ++l) {
      const Vector g = grad_relaxed(X, z, ObjectiveOrder(l));
      const Vector fd = finite_difference(X, z, l, 1e-6);
      EXPECT_LE((g - fd).norm(), 1e-5 * g.norm()) << "m=" << m << " l=" << l;
      EXPECT_LT(g.maxCoeff(), 0.0);
    }
  }
}

TEST(GradRelaxed, AOptimalClosedForm) {
  Rng rng(6);
  const DesignMatrix X = random_design(15, 4, rng);
  const Vector z = random_weights(15, rng);
  const Matrix Minv = weighted(X, z).partialPivLu().inverse();
  const Matrix M2 = Minv * Minv;
  const Vector g = grad_relaxed(X, z, ObjectiveOrder(1));
  // f_1 = log tr(M^-1), so d/dz_i = -x_i^T M^-2 x_i / tr(M^-1).
  for (Eigen::Index i = 0; i < 15; ++i) {
    const double want = -(X.rows().row(i) * M2 * X.rows().row(i).transpose())(0) / Minv.trace();
    EXPECT_NEAR(g(i), want, 1e-10 * std::abs(want));
  }
}

TEST(GradRelaxed, DOptimalClosedForm) {
  Rng rng(7);
  const DesignMatrix X = random_design(12, 3, rng);
  const Vector z = random_weights(12, rng);
  const Matrix Minv = weighted(X, z).partialPivLu().inverse();
  const Vector g = grad_relaxed(X, z, ObjectiveOrder(3));
  for (Eigen::Index i = 0; i < 12; ++i) {
    const double want = -(X.rows().row(i) * Minv * X.rows().row(i).transpose())(0) / 3.0;
    EXPECT_NEAR(g(i), want, 1e-10 * std::abs(want));
  }
}

TEST(WMatrix, TopOrderIsInverseAndPd) {
  Rng rng(8);
  const DesignMatrix X = random_design(12, 4, rng);
  const Vector z = random_weights(12, rng);
  const Matrix Minv = weighted(X, z).partialPivLu().inverse();
  EXPECT_LT((w_matrix(X, z, ObjectiveOrder(4)).matrix() - Minv).cwiseAbs().maxCoeff(), 1e-10);
  for (int l = 1; l <= 4; ++l) {
    const PDMatrix W = w_matrix(X, z, ObjectiveOrder(l));
    EXPECT_GT(W.spectrum().eigenvalues.minCoeff(), 0.0);
    const Vector g = grad_relaxed(X, z, ObjectiveOrder(l));
    for (Eigen::Index i = 0; i < 12; ++i) {
      const double q = (X.rows().row(i) * W.matrix() * X.rows().row(i).transpose())(0);
      EXPECT_NEAR(g(i), -q / l, 1e-12 * std::abs(q));
    }
  }
}

TEST(WMatrix, SpectrumMatchesDefiningDifference) {
  Rng rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    const int m = 2 + static_cast<int>(rng.below(6));
    Vector eig(m);
    for (int i = 0; i < m; ++i) eig(i) = rng.uniform(0.1, 5.0);
    const std::span<const double> s{eig.data(), static_cast<std::size_t>(m)};
    for (int l = 1; l < m; ++l) {
      const Vector w = detail::w_spectrum(eig, l);
      const double denom = detail::esp_algebraic(s, m - l).value();
      for (int i = 0; i < m; ++i) {
        const double want = 1.0 / eig(i) - detail::esp_algebraic(s, m - l - 1, i).value() / denom;
        EXPECT_NEAR(w(i), want, 1e-10 * std::abs(want) + 1e-12);
      }
    }
  }
}

TEST(ObjectiveProperties, RelaxedSegmentConvexity) {
  Rng rng(10);
  for (int trial = 0; trial < 100; ++trial) {
    const int m = 1 + static_cast<int>(rng.below(5));
    const int n = m + 1 + static_cast<int>(rng.below(15));
    const DesignMatrix X = random_design(n, m, rng);
    const Vector z1 = random_weights(n, rng, 0.0, 1.0);
    const Vector z2 = random_weights(n, rng, 0.0, 1.0);
    const ObjectiveOrder l(1 + static_cast<int>(rng.below(m)));
    for (double t : {0.25, 0.5, 0.75}) {
      const double mid = f_relaxed(X, t * z1 + (1 - t) * z2, l);
      EXPECT_LE(mid, t * f_relaxed(X, z1, l) + (1 - t) * f_relaxed(X, z2, l) + 1e-9);
    }
  }
}

TEST(ObjectiveProperties, RegularizedDeterminantForm) {
  Rng rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const int m = 2 + static_cast<int>(rng.below(6));
    const int n = m + static_cast<int>(rng.below(10));
    const DesignMatrix X = random_design(n, m, rng);
    const Subset S = random_subset(n, n, rng);
    const Matrix gram = X.rows().transpose() * X.rows();
    const double want = (-std::log(gram.determinant()) + std::log(gram.trace())) / (m - 1);
    EXPECT_NEAR(f_discrete(X, S, ObjectiveOrder(m - 1)), want, 1e-8);
  }
}

TEST(ObjectiveProperties, AddingRowsNeverHurts) {
  Rng rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    const int m = 1 + static_cast<int>(rng.below(5));
    const int n = m + 2 + static_cast<int>(rng.below(15));
    const DesignMatrix X = random_design(n, m, rng);
    const Subset S = random_subset(n, m + rng.below(n - m), rng);
    std::size_t extra = 0;
    while (S.contains(extra)) ++extra;
    std::vector<std::size_t> grown = S.indices();
    grown.push_back(extra);
    for (int l = 1; l <= m; ++l) {
      EXPECT_LE(f_discrete(X, Subset(grown), ObjectiveOrder(l)), f_discrete(X, S, ObjectiveOrder(l)) + 1e-12);
    }
  }
}

}  // namespace
}  // namespace espd
