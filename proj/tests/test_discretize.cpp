#include "discretize.hpp"
#include "error.hpp"
#include "objective.hpp"
#include "oracles.hpp"
#include "pipeline.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>

namespace espd {
namespace {

using testing::random_design;

/// (1/l) log prod_{j=1..l} (n0-m+j)/(k-m+j), the greedy removal factor.
double removal_factor(int n0, int k, int m, int l) {
  double s = 0.0;
  for (int j = 1; j <= l; ++j) s += std::log(static_cast<double>(n0 - m + j) / (k - m + j));
  return s / l;
}

std::vector<std::size_t> all_rows(std::size_t n) {
  std::vector<std::size_t> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = i;
  return v;
}

TEST(Methods, Spellings) {
  EXPECT_STREQ(method_tag(Method::kGreedyFdv), "GREEDY_FDV");
  EXPECT_STREQ(method_flag(Method::kUnifFdv), "unif-fdv");
  EXPECT_EQ(parse_method("GREEDY_FDV"), Method::kGreedyFdv);
  EXPECT_EQ(parse_method("unif-fdv"), Method::kUnifFdv);
  EXPECT_EQ(parse_method("Sample"), Method::kSample);
  EXPECT_FALSE(parse_method("bogus").has_value());
}

TEST(SampleRounding, BinaryWeightsReturnSupport) {
  const Vector z = (Vector(5) << 1, 0, 1, 0, 1).finished();
  const RoundingOutcome r = sample_rounding(z, 3, 42);
  EXPECT_EQ(r.subset, Subset({0, 2, 4}));
}

TEST(SampleRounding, SizeSupportAndDeterminism) {
  Rng rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 5 + static_cast<int>(rng.below(30));
    Vector z(n);
    for (int i = 0; i < n; ++i) z(i) = rng.bernoulli(0.3) ? 0.0 : rng.uniform(0.01, 1.0);
    const int positive = static_cast<int>((z.array() > 0).count());
    if (positive == 0) continue;
    const int k = 1 + static_cast<int>(rng.below(positive));
    const auto seed = rng.next_u64();
    const RoundingOutcome a = sample_rounding(z, k, seed);
    EXPECT_EQ(a.subset.size(), static_cast<std::size_t>(k));
    for (auto i : a.subset.indices()) EXPECT_GT(z(static_cast<Eigen::Index>(i)), 0.0);
    EXPECT_GE(a.draws, static_cast<std::uint64_t>(k));
    const RoundingOutcome b = sample_rounding(z, k, seed);
    EXPECT_EQ(a.subset, b.subset);
    EXPECT_EQ(a.draws, b.draws);
  }
}

TEST(SampleRounding, InclusionFrequency) {
  const Vector z = Vector::Constant(2, 0.5);
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 10000; ++seed) hits += sample_rounding(z, 1, seed).subset.contains(1);
  EXPECT_NEAR(hits / 10000.0, 0.5, 0.02);
}

TEST(SampleRounding, CannotRound) {
  const Vector z = (Vector(4) << 0.5, 0, 0, 0.5).finished();
  try {
    sample_rounding(z, 3, 0);
    FAIL() << "expected cannot-round";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCannotRound);
  }
}

TEST(RoundingDiagnostic, OrthonormalDesign) {
  const DesignMatrix X(Matrix::Identity(5, 5));
  EXPECT_NEAR(rounding_diagnostic(X, Vector::Ones(5)), std::log(5.0), 1e-12);
  Rng rng(2);
  const DesignMatrix Y = random_design(30, 4, rng);
  const double d = rounding_diagnostic(Y, Vector::Constant(30, 0.5));
  EXPECT_TRUE(std::isfinite(d));
  EXPECT_GT(d, 0.0);
}

TEST(GreedyRemoval, FullSizeInputUnchanged) {
  Rng rng(3);
  const DesignMatrix X = random_design(10, 3, rng);
  const Subset S0({1, 4, 5, 8});
  EXPECT_EQ(greedy_removal(X, 4, ObjectiveOrder(2), S0), S0);
}

TEST(GreedyRemoval, TiesGoToSmallestIndex) {
  // Rows 0..3 are identical copies of e1; dropping any of them scores the same.
  Matrix A(6, 2);
  A << 1, 0, 1, 0, 1, 0, 1, 0, 0, 1, 0, 1;
  const Subset out = greedy_removal(DesignMatrix(A), 5, ObjectiveOrder(1), Subset(all_rows(6)));
  EXPECT_EQ(out, Subset({1, 2, 3, 4, 5}));
}

TEST(GreedyRemoval, StuckReportsPartialSet) {
  // Jointly the two small rows clear the feasibility floor; alone they don't.
  const double c = std::sqrt(0.7e-10);
  Matrix A(3, 2);
  A << 1, 0, 0, c, 0, c;
  try {
    greedy_removal(DesignMatrix(A), 2, ObjectiveOrder(1), Subset({0, 1, 2}));
    FAIL() << "expected stuck-infeasible";
  } catch (const StuckInfeasibleError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kStuckInfeasible);
    EXPECT_EQ(e.partial(), (std::vector<std::size_t>{0, 1, 2}));
  }
}

TEST(GreedyRemoval, SmallExampleRemovalBound) {
  Rng rng(4);
  const DesignMatrix X = random_design(6, 2, rng);
  const Subset S0(all_rows(6));
  const Subset out = greedy_removal(X, 3, ObjectiveOrder(1), S0);
  EXPECT_EQ(out.size(), 3u);
  EXPECT_LE(f_discrete(X, out, ObjectiveOrder(1)),
            f_discrete(X, S0, ObjectiveOrder(1)) + removal_factor(6, 3, 2, 1) + 1e-12);
}

TEST(GreedyRemoval, RemovalBoundAndExhaustiveSanity) {
  Rng rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    const int m = 1 + static_cast<int>(rng.below(3));
    const int n = m + 2 + static_cast<int>(rng.below(12 - m - 1));
    const int k = m + static_cast<int>(rng.below(n - m));
    const int l = 1 + static_cast<int>(rng.below(m));
    const DesignMatrix X = random_design(n, m, rng);
    const Subset S0(all_rows(n));
    const Subset out = greedy_removal(X, k, ObjectiveOrder(l), S0);
    const double f = f_discrete(X, out, ObjectiveOrder(l));
    const auto best = oracles::exhaustive_optimum(X.rows(), k, l);
    EXPECT_GE(f, best.objective - 1e-10);
    EXPECT_LE(f, f_discrete(X, S0, ObjectiveOrder(l)) + removal_factor(n, k, m, l) + 1e-10);
    EXPECT_LE(f, best.objective + removal_factor(n, k, m, l) + 1e-10);
  }
}

TEST(GreedyFromRelaxation, AdditiveBoundOnTinyInstances) {
  Rng rng(6);
  for (int trial = 0; trial < 15; ++trial) {
    const int m = 2;
    const int n = 9 + static_cast<int>(rng.below(4));
    const int k = 3 + static_cast<int>(rng.below(4));
    const int l = 1 + static_cast<int>(rng.below(m));
    const DesignMatrix X = random_design(n, m, rng);
    const Subset S = greedy_from_relaxation(X, k, ObjectiveOrder(l), SolverConfig{});
    EXPECT_EQ(S.size(), static_cast<std::size_t>(k));
    const auto best = oracles::exhaustive_optimum(X.rows(), k, l);
    const double f = f_discrete(X, S, ObjectiveOrder(l));
    EXPECT_GE(f, best.objective - 1e-10);
    EXPECT_LE(f - best.objective, std::log((k + m * (m - 1) / 2.0 + l) / (k - m + 1)));
  }
}

TEST(RelaxationStart, PadsBySupportThenLeverage) {
  Rng rng(7);
  const DesignMatrix X = random_design(8, 2, rng);
  Vector z = Vector::Zero(8);
  z(3) = 1.0;
  z(5) = 0.5;
  z(6) = 0.25;
  EXPECT_EQ(relaxation_start(X, z, 2), Subset({3, 5, 6}));
  const Subset padded = relaxation_start(X, z, 5);
  EXPECT_EQ(padded.size(), 5u);
  EXPECT_TRUE(padded.contains(3) && padded.contains(5) && padded.contains(6));
}

TEST(Fedorov, DescendsAndKeepsSize) {
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const int m = 1 + static_cast<int>(rng.below(3));
    const int n = m + 3 + static_cast<int>(rng.below(6));
    const int k = m + static_cast<int>(rng.below(n - m));
    const int l = 1 + static_cast<int>(rng.below(m));
    const DesignMatrix X = random_design(n, m, rng);
    const Subset start = uniform_baseline(X, k, rng.next_u64());
    const Subset out = fedorov_exchange(X, k, ObjectiveOrder(l), start, 1000);
    EXPECT_EQ(out.size(), static_cast<std::size_t>(k));
    EXPECT_LE(f_discrete(X, out, ObjectiveOrder(l)), f_discrete(X, start, ObjectiveOrder(l)) + 1e-12);
    // A local optimum is a fixed point.
    EXPECT_EQ(fedorov_exchange(X, k, ObjectiveOrder(l), out, 1000), out);
    EXPECT_GE(f_discrete(X, out, ObjectiveOrder(l)),
              oracles::exhaustive_optimum(X.rows(), k, l).objective - 1e-10);
  }
}

TEST(Fedorov, SweepCapAndInfeasibleStart) {
  Rng rng(9);
  const DesignMatrix X = random_design(12, 2, rng);
  const Subset start({0, 1, 2, 3});
  const Subset one = fedorov_exchange(X, 4, ObjectiveOrder(1), start, 1);
  EXPECT_LE(intersection_size(one, start), 4u);
  EXPECT_GE(intersection_size(one, start), 3u);
  Matrix A = Matrix::Zero(4, 2);
  A << 1, 0, 2, 0, 0, 1, 0, 1;
  EXPECT_THROW(fedorov_exchange(DesignMatrix(A), 2, ObjectiveOrder(1), Subset({0, 1}), 10), Error);
}

TEST(UniformBaseline, SizeDeterminismAndUniformity) {
  Rng rng(10);
  const DesignMatrix X = random_design(6, 2, rng);
  EXPECT_EQ(uniform_baseline(X, 3, 5), uniform_baseline(X, 3, 5));
  std::map<std::vector<std::size_t>, int> counts;
  const int draws = 100000;
  for (int s = 0; s < draws; ++s) ++counts[uniform_baseline(X, 3, static_cast<std::uint64_t>(s)).indices()];
  ASSERT_EQ(counts.size(), 20u);
  double chi2 = 0.0;
  const double expected = draws / 20.0;
  for (const auto& [subset, c] : counts) chi2 += (c - expected) * (c - expected) / expected;
  // 19 degrees of freedom; the 0.999 quantile is 43.82.
  EXPECT_LT(chi2, 43.82);
}

TEST(Pipeline, EveryMethodProducesFeasibleSizeK) {
  Rng rng(11);
  const DesignMatrix X = random_design(80, 5, rng);
  const int k = 20;
  const ObjectiveOrder l(3);
  for (Method method : {Method::kUnif, Method::kUnifFdv, Method::kGreedy, Method::kGreedyFdv, Method::kSample,
                        Method::kRelax}) {
    const DesignRun run = run_method(X, method, k, l, 17, {});
    EXPECT_EQ(run.method, method);
    if (method == Method::kRelax) {
      ASSERT_TRUE(run.relaxation.has_value());
      EXPECT_NEAR(run.objective, run.relaxation->objective(), 1e-12);
      continue;
    }
    EXPECT_EQ(run.subset.size(), static_cast<std::size_t>(k));
    EXPECT_NEAR(run.objective, f_discrete(X, run.subset, l), 1e-12);
  }
  const DesignRun relax = run_method(X, Method::kRelax, k, l, 17, {});
  const DesignRun greedy = run_method(X, Method::kGreedy, k, l, 17, {});
  const DesignRun fdv = run_method(X, Method::kGreedyFdv, k, l, 17, {});
  EXPECT_LE(relax.objective, greedy.objective);
  EXPECT_LE(fdv.objective, greedy.objective + 1e-12);
}

TEST(Pipeline, SeedDeterminism) {
  Rng rng(12);
  const DesignMatrix X = random_design(50, 4, rng);
  for (Method method : {Method::kUnif, Method::kSample, Method::kUnifFdv}) {
    EXPECT_EQ(run_method(X, method, 10, ObjectiveOrder(2), 3, {}).subset,
              run_method(X, method, 10, ObjectiveOrder(2), 3, {}).subset);
  }
}

}  // namespace
}  // namespace espd
