#include "oracles.hpp"

#include "error.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace espd::oracles {

namespace {

// A Gram matrix counts as singular when its determinant is this small
// relative to the Hadamard bound (product of its diagonal).
constexpr double kSingularRatio = 1e-10;

double lu_det(const Matrix& A) {
  if (A.rows() == 0) return 1.0;
  return Eigen::PartialPivLU<Matrix>(A).determinant();
}

Matrix principal(const Matrix& M, std::span<const std::size_t> idx) {
  const auto s = static_cast<Eigen::Index>(idx.size());
  Matrix sub(s, s);
  for (Eigen::Index a = 0; a < s; ++a) {
    for (Eigen::Index b = 0; b < s; ++b) {
      sub(a, b) = M(static_cast<Eigen::Index>(idx[a]), static_cast<Eigen::Index>(idx[b]));
    }
  }
  return sub;
}

double minor_sum_unchecked(const Matrix& M, int order) {
  const auto m = static_cast<std::size_t>(M.rows());
  if (order == 0) return 1.0;
  double total = 0.0;
  for_each_subset(m, static_cast<std::size_t>(order),
                  [&](std::span<const std::size_t> idx) { total += lu_det(principal(M, idx)); });
  return total;
}

Matrix rows_gram(const Matrix& X, std::span<const std::size_t> rows) {
  Matrix sub(static_cast<Eigen::Index>(rows.size()), X.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) sub.row(static_cast<Eigen::Index>(r)) = X.row(static_cast<Eigen::Index>(rows[r]));
  return sub.transpose() * sub;
}

bool nearly_singular(const Matrix& gram, double det) {
  const double hadamard = gram.diagonal().prod();
  return !(hadamard > 0.0) || det <= kSingularRatio * hadamard;
}

void require_enumerable(std::size_t n, std::size_t m, std::size_t k, const EnumerationBudget& budget,
                        const char* what) {
  if (n > budget.max_n || m > budget.max_m || binomial(n, k) > budget.max_subsets) {
    fail(ErrorCode::kBudgetExceeded, std::string(what) + ": instance exceeds the enumeration budget");
  }
}

}  // namespace

std::size_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::size_t result = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    const std::size_t factor = n - k + i;
    if (result > std::numeric_limits<std::size_t>::max() / factor) return std::numeric_limits<std::size_t>::max();
    result = result * factor / i;
  }
  return result;
}

double esp_bruteforce(std::span<const double> v, int order) {
  if (v.size() > 20) fail(ErrorCode::kBudgetExceeded, "esp_bruteforce: at most 20 entries");
  if (order < 0) fail(ErrorCode::kInput, "esp_bruteforce: negative order");
  if (order == 0 || static_cast<std::size_t>(order) > v.size()) return 0.0;
  double total = 0.0;
  const std::uint32_t limit = 1u << v.size();
  for (std::uint32_t mask = 0; mask < limit; ++mask) {
    if (std::popcount(mask) != order) continue;
    double product = 1.0;
    for (std::size_t j = 0; j < v.size(); ++j) {
      if (mask & (1u << j)) product *= v[j];
    }
    total += product;
  }
  return total;
}

double esp_minor_sum(const Matrix& M, int order) {
  if (M.rows() != M.cols()) fail(ErrorCode::kInput, "esp_minor_sum: matrix must be square");
  if (M.rows() > 12) fail(ErrorCode::kBudgetExceeded, "esp_minor_sum: at most 12 x 12");
  if (order < 0) fail(ErrorCode::kInput, "esp_minor_sum: negative order");
  if (order == 0 || order > M.rows()) return 0.0;
  return minor_sum_unchecked(M, order);
}

bool cauchy_binet_check(const Matrix& X, const EnumerationBudget& budget) {
  const auto n = static_cast<std::size_t>(X.rows());
  const auto m = static_cast<std::size_t>(X.cols());
  if (n > budget.max_n || binomial(n, m) > budget.max_subsets) {
    fail(ErrorCode::kBudgetExceeded, "cauchy_binet_check: instance exceeds the enumeration budget");
  }
  const double lhs = lu_det(X.transpose() * X);
  double rhs = 0.0;
  for_each_subset(n, m, [&](std::span<const std::size_t> rows) { rhs += lu_det(rows_gram(X, rows)); });
  const double scale = std::max({std::abs(lhs), std::abs(rhs), std::numeric_limits<double>::min()});
  return std::abs(lhs - rhs) <= 1e-8 * scale;
}

ExhaustiveResult exhaustive_optimum(const Matrix& X, int k, int order, const EnumerationBudget& budget) {
  const auto n = static_cast<std::size_t>(X.rows());
  const auto m = static_cast<std::size_t>(X.cols());
  if (order < 1 || static_cast<std::size_t>(order) > m) fail(ErrorCode::kInput, "exhaustive_optimum: bad order");
  if (k < 0 || static_cast<std::size_t>(k) > n) fail(ErrorCode::kInput, "exhaustive_optimum: bad k");
  require_enumerable(n, m, static_cast<std::size_t>(k), budget, "exhaustive_optimum");

  ExhaustiveResult best;
  best.objective = std::numeric_limits<double>::infinity();
  for_each_subset(n, static_cast<std::size_t>(k), [&](std::span<const std::size_t> rows) {
    const Matrix gram = rows_gram(X, rows);
    const Eigen::PartialPivLU<Matrix> lu(gram);
    if (nearly_singular(gram, lu.determinant())) return;
    ++best.feasible_count;
    const double value = std::log(minor_sum_unchecked(lu.inverse(), order)) / order;
    if (value < best.objective) {
      best.objective = value;
      best.subset = Subset(std::vector<std::size_t>(rows.begin(), rows.end()));
    }
  });
  if (best.feasible_count == 0) fail(ErrorCode::kInfeasibleProblem, "exhaustive_optimum: no feasible subset");
  return best;
}

VolumeSamplingSides volume_sampling_expectation(const Matrix& X, int k, int order,
                                                const EnumerationBudget& budget) {
  const auto n = static_cast<std::size_t>(X.rows());
  const auto m = static_cast<std::size_t>(X.cols());
  if (order < 1 || static_cast<std::size_t>(order) > m) fail(ErrorCode::kInput, "volume_sampling: bad order");
  if (k < static_cast<int>(m) || static_cast<std::size_t>(k) > n) fail(ErrorCode::kInput, "volume_sampling: need m <= k <= n");
  require_enumerable(n, m, static_cast<std::size_t>(k), budget, "volume_sampling_expectation");

  const Matrix full = X.transpose() * X;
  const Eigen::PartialPivLU<Matrix> full_lu(full);
  if (nearly_singular(full, full_lu.determinant())) fail(ErrorCode::kDomain, "volume_sampling: X^T X is singular");

  VolumeSamplingSides sides;
  double weighted = 0.0;
  double normalizer = 0.0;
  for_each_subset(n, static_cast<std::size_t>(k), [&](std::span<const std::size_t> rows) {
    const Matrix gram = rows_gram(X, rows);
    const Eigen::PartialPivLU<Matrix> lu(gram);
    const double det = lu.determinant();
    if (nearly_singular(gram, det)) {
      sides.all_feasible = false;
      return;
    }
    normalizer += det;
    weighted += det * minor_sum_unchecked(lu.inverse(), order);
  });
  sides.lhs = weighted / normalizer;

  double factor = 1.0;
  for (int i = 1; i <= order; ++i) {
    factor *= static_cast<double>(static_cast<int>(n) - static_cast<int>(m) + i) /
              static_cast<double>(k - static_cast<int>(m) + i);
  }
  sides.rhs = factor * minor_sum_unchecked(full_lu.inverse(), order);
  return sides;
}

}  // namespace espd::oracles
