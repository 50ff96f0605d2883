#include "esp.hpp"
#include "error.hpp"
#include "oracles.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

namespace espd {
namespace {

using testing::random_pd;
using testing::random_psd;
using testing::random_symmetric;
using testing::rel_err;

double binom(int n, int k) { return static_cast<double>(oracles::binomial(n, k)); }

TEST(EspVector, SmallExampleMatchesEnumeration) {
  const std::vector<double> v{1, 2, 3};
  // 1*2 + 1*3 + 2*3
  EXPECT_DOUBLE_EQ(oracles::esp_bruteforce(v, 2), 11.0);
  EXPECT_NEAR(esp_vector(v, 2).value(), 11.0, 1e-12);
}

TEST(EspVector, ZeroConventions) {
  const std::vector<double> v{1.5, -2.0, 4.0};
  EXPECT_TRUE(esp_vector(v, 4).is_zero());
  EXPECT_TRUE(esp_vector(v, 0).is_zero());
  EXPECT_EQ(esp_vector(v, 0).log_value, -std::numeric_limits<double>::infinity());
  EXPECT_NEAR(detail::esp_algebraic(v, 0).value(), 1.0, 1e-15);
}

TEST(EspVector, ConstantVector) {
  for (int m = 1; m <= 9; ++m) {
    const std::vector<double> v(m, 1.7);
    for (int l = 1; l <= m; ++l) {
      EXPECT_LT(rel_err(esp_vector(v, l).value(), binom(m, l) * std::pow(1.7, l)), 1e-13);
    }
  }
}

TEST(EspVector, RejectsBadInput) {
  const std::vector<double> bad{1.0, std::nan("")};
  EXPECT_THROW(esp_vector(bad, 1), Error);
  const std::vector<double> ok{1.0};
  EXPECT_THROW(esp_vector(ok, -1), Error);
}

TEST(EspVector, MixedSignsAgreeWithEnumeration) {
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const int m = 1 + static_cast<int>(rng.below(10));
    std::vector<double> v(m);
    for (double& x : v) x = rng.normal();
    for (int l = 1; l <= m; ++l) {
      const double want = oracles::esp_bruteforce(v, l);
      const LogEsp got = esp_vector(v, l);
      EXPECT_NEAR(got.value(), want, 1e-10 * std::max(1.0, std::abs(want))) << "m=" << m << " l=" << l;
    }
  }
}

TEST(EspVector, LogDomainSurvivesExtremeSpectra) {
  // Product of 200 entries of 1e10 overflows double; the log form must not.
  const std::vector<double> big(200, 1e10);
  const LogEsp e = esp_vector(big, 200);
  EXPECT_EQ(e.sign, 1);
  EXPECT_NEAR(e.log_value, 200 * std::log(1e10), 1e-8);
  const std::vector<double> tiny(200, 1e-10);
  EXPECT_NEAR(esp_vector(tiny, 150).log_value,
              std::lgamma(201.0) - std::lgamma(151.0) - std::lgamma(51.0) + 150 * std::log(1e-10), 1e-8);

  std::vector<double> spread;
  for (int i = 0; i < 60; ++i) spread.push_back(std::pow(10.0, -150 + 5 * i));
  const LogEsp whole = esp_vector(spread, 60);
  double log_prod = 0.0;
  for (double x : spread) log_prod += std::log(x);
  EXPECT_NEAR(whole.log_value, log_prod, 1e-9 * std::abs(log_prod));
  // e_1 is dominated by the largest entry.
  EXPECT_NEAR(esp_vector(spread, 1).log_value, std::log(1e145), 1e-4);
}

TEST(EspVector, NonnegativeInputsGiveNonnegativeValues) {
  Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> v(8);
    for (double& x : v) x = rng.bernoulli(0.3) ? 0.0 : rng.uniform(0.0, 5.0);
    for (int l = 1; l <= 8; ++l) {
      const LogEsp e = esp_vector(v, l);
      EXPECT_GE(e.value(), 0.0);
      EXPECT_EQ(e.is_zero(), oracles::esp_bruteforce(v, l) == 0.0);
    }
  }
}

TEST(EspMatrix, IdentityGivesBinomial) {
  for (int m = 1; m <= 7; ++m) {
    for (int l = 1; l <= m; ++l) {
      EXPECT_LT(rel_err(esp_matrix(Matrix::Identity(m, m), l).value(), binom(m, l)), 1e-13);
    }
  }
}

TEST(EspMatrix, DiagonalMatchesMinorSum) {
  const Matrix D = Vector(Eigen::Vector3d(1, 2, 3)).asDiagonal();
  EXPECT_DOUBLE_EQ(oracles::esp_minor_sum(D, 2), 11.0);
  EXPECT_NEAR(esp_matrix(D, 2).value(), 11.0, 1e-12);
}

TEST(EspMatrix, SingularDeterminantIsZero) {
  const Matrix D = Vector(Eigen::Vector3d(1, 2, 0)).asDiagonal();
  EXPECT_TRUE(esp_matrix(D, 3).is_zero());
  Rng rng(3);
  const Matrix psd = random_psd(5, 3, rng);
  EXPECT_LT(std::abs(esp_matrix(psd, 5).value()), 1e-12 * std::pow(psd.norm(), 5));
}

TEST(EspMatrix, RejectsAsymmetric) {
  Matrix A = Matrix::Identity(3, 3);
  A(0, 1) = 0.5;
  EXPECT_THROW(esp_matrix(A, 1), Error);
}

TEST(EspMatrix, AgreesWithPrincipalMinors) {
  Rng rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const int m = 1 + static_cast<int>(rng.below(8));
    const Matrix M = random_symmetric(m, rng);
    for (int l = 1; l <= m; ++l) {
      const double want = oracles::esp_minor_sum(M, l);
      EXPECT_LE(std::abs(esp_matrix(M, l).value() - want), 1e-8 * std::max(std::abs(want), 1.0));
    }
  }
}

TEST(EspOfInverse, DiagonalExample) {
  const PDMatrix D(Vector(Eigen::Vector3d(1, 2, 3)).asDiagonal());
  EXPECT_NEAR(esp_of_inverse(D, 1).value(), 11.0 / 6.0, 1e-14);
  EXPECT_NEAR(esp_of_inverse(D, 3).value(), 1.0 / 6.0, 1e-15);
}

TEST(EspOfInverse, IdentityGivesBinomial) {
  const PDMatrix I(Matrix::Identity(6, 6));
  for (int l = 1; l <= 6; ++l) EXPECT_LT(rel_err(esp_of_inverse(I, l).value(), binom(6, l)), 1e-13);
}

TEST(EspOfInverse, MatchesExplicitInverse) {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const int m = 1 + static_cast<int>(rng.below(8));
    const Matrix M = random_pd(m, rng);
    const Matrix inv = M.inverse();
    const PDMatrix pd(M);
    for (int l = 1; l <= m; ++l) {
      const double want = esp_matrix(0.5 * (inv + inv.transpose()), l).value();
      EXPECT_LT(rel_err(esp_of_inverse(pd, l).value(), want), 1e-8);
    }
  }
}

TEST(EspOfInverse, DomainAndOrderErrors) {
  EXPECT_THROW(PDMatrix(Matrix(Vector(Eigen::Vector2d(1, -1)).asDiagonal())), Error);
  const PDMatrix I(Matrix::Identity(3, 3));
  EXPECT_THROW(esp_of_inverse(I, 0), Error);
  EXPECT_THROW(esp_of_inverse(I, 4), Error);
}

// Directional derivative of E_l along symmetric E_ij + E_ji equals 2 G_ij
// off the diagonal and G_ii on it.
Matrix finite_difference_gradient(const Matrix& M, int l, double h) {
  const auto m = M.rows();
  Matrix G(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i; j < m; ++j) {
      Matrix dir = Matrix::Zero(m, m);
      dir(i, j) = dir(j, i) = 1.0;
      const double up = esp_matrix(M + h * dir, l).value();
      const double down = esp_matrix(M - h * dir, l).value();
      const double deriv = (up - down) / (2 * h);
      G(i, j) = G(j, i) = i == j ? deriv : 0.5 * deriv;
    }
  }
  return G;
}

TEST(EspGradient, OrderOneIsIdentity) {
  Rng rng(8);
  const Matrix M = random_symmetric(5, rng);
  EXPECT_LT((esp_gradient(M, 1) - Matrix::Identity(5, 5)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(EspGradient, TopOrderIsCofactor) {
  Rng rng(9);
  const Matrix M = random_pd(4, rng);
  const Matrix want = M.determinant() * M.inverse();
  EXPECT_LT((esp_gradient(M, 4) - want).cwiseAbs().maxCoeff(), 1e-10 * want.cwiseAbs().maxCoeff());
  EXPECT_LT((finite_difference_gradient(M, 4, 1e-5) - want).cwiseAbs().maxCoeff(),
            1e-5 * want.cwiseAbs().maxCoeff());
}

TEST(EspGradient, MatchesFiniteDifferences) {
  Rng rng(10);
  for (int trial = 0; trial < 30; ++trial) {
    const int m = 2 + static_cast<int>(rng.below(6));
    const Matrix M = random_symmetric(m, rng);
    for (int l = 1; l <= m; ++l) {
      const Matrix G = esp_gradient(M, l);
      const Matrix fd = finite_difference_gradient(M, l, 1e-5);
      EXPECT_LE((G - fd).cwiseAbs().maxCoeff(), 1e-5 * std::max(1.0, G.cwiseAbs().maxCoeff()));
    }
  }
}

TEST(EspGradient, RepeatedEigenvalues) {
  Rng rng(12);
  const Matrix Q = random_symmetric(5, rng).householderQr().householderQ();
  const Vector spectrum = (Vector(5) << 2.0, 2.0, 2.0, -1.0, 0.0).finished();
  const Matrix M = Q * spectrum.asDiagonal() * Q.transpose();
  const Matrix sym = 0.5 * (M + M.transpose());
  for (int l = 1; l <= 5; ++l) {
    const Matrix G = esp_gradient(sym, l);
    const Matrix fd = finite_difference_gradient(sym, l, 1e-5);
    EXPECT_LE((G - fd).cwiseAbs().maxCoeff(), 1e-3 * std::max(1.0, G.cwiseAbs().maxCoeff()));
  }
}

TEST(Geodesic, EndpointsAndSelf) {
  Rng rng(13);
  const PDMatrix P(random_pd(4, rng));
  const PDMatrix Q(random_pd(4, rng));
  EXPECT_LT((geodesic_point(P, Q, 0.0).matrix() - P.matrix()).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT((geodesic_point(P, Q, 1.0).matrix() - Q.matrix()).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT((geodesic_point(P, P, 0.3).matrix() - P.matrix()).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Geodesic, CommutingDiagonalMidpoint) {
  const PDMatrix P(Vector(Eigen::Vector3d(1, 4, 9)).asDiagonal());
  const PDMatrix Q(Vector(Eigen::Vector3d(4, 1, 1)).asDiagonal());
  const Matrix G = geodesic_point(P, Q, 0.5).matrix();
  const Matrix want = Vector(Eigen::Vector3d(2, 2, 3)).asDiagonal();
  EXPECT_LT((G - want).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Geodesic, MidpointRiccatiIdentity) {
  Rng rng(14);
  for (int trial = 0; trial < 20; ++trial) {
    const int m = 2 + static_cast<int>(rng.below(5));
    const PDMatrix P(random_pd(m, rng));
    const PDMatrix Q(random_pd(m, rng));
    const Matrix G = geodesic_point(P, Q, 0.5).matrix();
    const Matrix lhs = G * Q.matrix().inverse() * G;
    EXPECT_LT((lhs - P.matrix()).cwiseAbs().maxCoeff(), 1e-8 * P.matrix().cwiseAbs().maxCoeff());
  }
}

TEST(Geodesic, RejectsBadInput) {
  const PDMatrix P(Matrix::Identity(2, 2));
  const PDMatrix Q(Matrix::Identity(3, 3));
  EXPECT_THROW(geodesic_point(P, Q, 0.5), Error);
  EXPECT_THROW(geodesic_point(P, P, 1.5), Error);
}

TEST(EspProperties, LoewnerMonotone) {
  Rng rng(15);
  for (int trial = 0; trial < 100; ++trial) {
    const int m = 1 + static_cast<int>(rng.below(7));
    const Matrix B = random_psd(m, 1 + static_cast<int>(rng.below(m)), rng);
    const Matrix A = B + random_psd(m, 1 + static_cast<int>(rng.below(m)), rng);
    for (int l = 1; l <= m; ++l) EXPECT_GE(esp_matrix(A, l).value(), esp_matrix(B, l).value() - 1e-10);
  }
}

TEST(EspProperties, InverseIdentityInLogDomain) {
  Rng rng(16);
  for (int trial = 0; trial < 50; ++trial) {
    const int m = 1 + static_cast<int>(rng.below(8));
    const Matrix M = random_pd(m, rng);
    const PDMatrix pd(M);
    const double log_det = std::log(M.determinant());
    for (int l = 1; l < m; ++l) {
      EXPECT_NEAR(esp_of_inverse(pd, l).log_value, esp_matrix(M, m - l).log_value - log_det, 1e-8);
    }
  }
}

TEST(EspProperties, GeodesicLogConvexity) {
  Rng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const int m = 1 + static_cast<int>(rng.below(6));
    const int l = 1 + static_cast<int>(rng.below(m));
    const PDMatrix P(random_pd(m, rng, 0.05));
    const PDMatrix Q(random_pd(m, rng, 0.05));
    const double mid = esp_matrix(geodesic_point(P, Q, 0.5).matrix(), l).log_value;
    const double chord = 0.5 * esp_matrix(P.matrix(), l).log_value + 0.5 * esp_matrix(Q.matrix(), l).log_value;
    EXPECT_LE(mid, chord + 1e-9);
  }
}

}  // namespace
}  // namespace espd
