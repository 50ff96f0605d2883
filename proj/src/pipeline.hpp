#pragma once

#include "discretize.hpp"
#include "relax.hpp"

#include <cstdint>
#include <optional>

namespace espd {

struct RunOptions {
  SolverConfig solver;
  int max_sweeps = 1000;
};

/// Result of one design method on one instance.
struct DesignRun {
  Method method = Method::kGreedy;
  Subset subset;
  double objective = 0.0;
  /// Present for methods that solve the relaxation.
  std::optional<SolverReport> relaxation;
  /// Rounding draws (SAMPLE only).
  std::uint64_t draws = 0;
};

/// Runs a method end to end:
///   UNIF       uniform feasible k-subset
///   UNIF_FDV   UNIF then Fedorov exchange
///   GREEDY     relaxation, then greedy removal from its support
///   GREEDY_FDV GREEDY then Fedorov exchange
///   SAMPLE     relaxation, then Bernoulli rounding (redrawn with derived
///              seeds, up to 100 times, until the rounded design is feasible)
///   RELAX      relaxation only; objective is f_l(z*), subset its support
DesignRun run_method(const DesignMatrix& X, Method method, int k, ObjectiveOrder l, std::uint64_t seed,
                     const RunOptions& options);

}  // namespace espd
