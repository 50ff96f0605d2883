#pragma once

#include "objective.hpp"
#include "relax.hpp"

#include <cstdint>
#include <optional>
#include <string_view>

namespace espd {

enum class Method { kUnif, kUnifFdv, kGreedy, kGreedyFdv, kSample, kRelax };

/// Table tag: UNIF, UNIF_FDV, GREEDY, GREEDY_FDV, SAMPLE, RELAX.
const char* method_tag(Method method) noexcept;

/// CLI spelling: unif, unif-fdv, greedy, greedy-fdv, sample, relax.
const char* method_flag(Method method) noexcept;

/// Accepts either spelling, case-insensitive.
std::optional<Method> parse_method(std::string_view name);

struct RoundingOutcome {
  Subset subset;
  std::uint64_t draws = 0;
};

/// Bernoulli rounding: repeatedly pick i uniformly from the unselected rows
/// and keep it with probability z_i, until k rows are kept. Throws
/// kCannotRound when fewer than k entries of z are positive.
RoundingOutcome sample_rounding(const Vector& z, int k, std::uint64_t seed);

/// ||Sigma^{-1}||_2 kappa(Sigma) ||X||_inf^2 log m with Sigma = X^T Diag(z) X
/// and ||X||_inf the largest row norm. Advisory only.
double rounding_diagnostic(const DesignMatrix& X, const Vector& z);

/// Greedy removal from S0 down to k rows; each round drops the row whose
/// removal keeps the design feasible and minimizes f_l, smallest index on
/// ties. Throws StuckInfeasibleError if a round has no feasible removal.
Subset greedy_removal(const DesignMatrix& X, int k, ObjectiveOrder l, const Subset& S0);

/// Initial set for greedy_from_relaxation: support of z, padded to k rows
/// by decreasing z_i and then decreasing leverage x_i^T (X^T X)^{-1} x_i.
Subset relaxation_start(const DesignMatrix& X, const Vector& z, int k);

/// Solves the relaxation and runs greedy removal from its support.
Subset greedy_from_relaxation(const DesignMatrix& X, int k, ObjectiveOrder l, const SolverConfig& cfg);

/// Same, reusing an existing relaxation report.
Subset greedy_from_relaxation(const DesignMatrix& X, int k, ObjectiveOrder l, const SolverReport& relaxed);

/// Best-improvement Fedorov exchange: each sweep scans every swap
/// (i in S, j not in S) and applies the best one if it lowers f_l by more
/// than 1e-12. Stops at a local optimum or after max_sweeps swaps.
Subset fedorov_exchange(const DesignMatrix& X, int k, ObjectiveOrder l, const Subset& S_init, int max_sweeps);

/// Uniformly random feasible k-subset; up to 100 draws, then kInfeasibleProblem.
Subset uniform_baseline(const DesignMatrix& X, int k, std::uint64_t seed);

}  // namespace espd
