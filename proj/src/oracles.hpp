#pragma once

#include "linalg.hpp"
#include "objective.hpp"

#include <cstddef>
#include <span>

namespace espd::oracles {

/// Size limits for enumeration; instances beyond them are refused with
/// kBudgetExceeded.
struct EnumerationBudget {
  std::size_t max_n = 12;
  std::size_t max_m = 4;
  std::size_t max_subsets = 1'000'000;
};

/// Literal sum over size-l index sets of the product of entries. Uses the
/// public convention e_0 = 0. Refuses vectors longer than 20.
double esp_bruteforce(std::span<const double> v, int order);

/// Sum of l x l principal minors (LU determinants). Refuses m > 12.
double esp_minor_sum(const Matrix& M, int order);

/// det(X^T X) against the sum of det(X_S^T X_S) over |S| = m, to 1e-8
/// relative. Refuses n beyond the budget.
bool cauchy_binet_check(const Matrix& X, const EnumerationBudget& budget = {});

struct ExhaustiveResult {
  Subset subset;
  double objective = 0.0;
  std::size_t feasible_count = 0;
};

/// Global minimizer of f_l over feasible size-k subsets by full scan; the
/// lexicographically smallest wins ties. Objective is evaluated through an
/// explicit LU inverse and principal-minor sums.
ExhaustiveResult exhaustive_optimum(const Matrix& X, int k, int order, const EnumerationBudget& budget = {});

struct VolumeSamplingSides {
  double lhs = 0.0;
  double rhs = 0.0;
  /// True when every size-k subset had a nonsingular Gram.
  bool all_feasible = true;
};

/// lhs = sum_S P_S E_l((X_S^T X_S)^{-1}) with P_S proportional to
/// det(X_S^T X_S) (singular subsets weigh zero); rhs = prod_{i=1..l}
/// (n-m+i)/(k-m+i) E_l((X^T X)^{-1}).
VolumeSamplingSides volume_sampling_expectation(const Matrix& X, int k, int order,
                                                const EnumerationBudget& budget = {});

/// Number of size-k subsets of n items, saturating at SIZE_MAX.
std::size_t binomial(std::size_t n, std::size_t k);

/// Visits every size-k subset of [0, n) in lexicographic order.
template <typename F>
void for_each_subset(std::size_t n, std::size_t k, F&& visit) {
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  if (k > n) return;
  while (true) {
    visit(std::span<const std::size_t>(idx));
    std::size_t pos = k;
    while (pos > 0 && idx[pos - 1] == n - k + pos - 1) --pos;
    if (pos == 0) return;
    ++idx[pos - 1];
    for (std::size_t j = pos; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace espd::oracles
