#include "pipeline.hpp"

#include "error.hpp"
#include "rng.hpp"

namespace espd {

namespace {

constexpr int kSampleRetries = 100;

}  // namespace

DesignRun run_method(const DesignMatrix& X, Method method, int k, ObjectiveOrder l, std::uint64_t seed,
                     const RunOptions& options) {
  l.require_within(X.m());
  if (k < static_cast<int>(X.m()) || k > static_cast<int>(X.n())) {
    fail(ErrorCode::kInput, "budget k must satisfy m <= k <= n");
  }
  SolverConfig solver = options.solver;
  solver.seed = seed;

  DesignRun run;
  run.method = method;
  switch (method) {
    case Method::kUnif:
      run.subset = uniform_baseline(X, k, seed);
      break;
    case Method::kUnifFdv:
      run.subset = fedorov_exchange(X, k, l, uniform_baseline(X, k, seed), options.max_sweeps);
      break;
    case Method::kGreedy:
    case Method::kGreedyFdv: {
      run.relaxation = solve_relaxation(X, k, l, solver);
      run.subset = greedy_from_relaxation(X, k, l, *run.relaxation);
      if (method == Method::kGreedyFdv) run.subset = fedorov_exchange(X, k, l, run.subset, options.max_sweeps);
      break;
    }
    case Method::kSample: {
      run.relaxation = solve_relaxation(X, k, l, solver);
      bool feasible = false;
      for (int attempt = 0; attempt < kSampleRetries && !feasible; ++attempt) {
        const RoundingOutcome rounded =
            sample_rounding(run.relaxation->weights, k, attempt == 0 ? seed : derive_seed(seed, attempt));
        run.draws += rounded.draws;
        run.subset = rounded.subset;
        feasible = detail::gram_is_feasible(gram_of_rows(X.rows(), run.subset.indices()));
      }
      if (!feasible) fail(ErrorCode::kInfeasibleProblem, "sampling produced no feasible design");
      break;
    }
    case Method::kRelax:
      run.relaxation = solve_relaxation(X, k, l, solver);
      run.subset = support_subset(run.relaxation->weights, kSupportEps);
      run.objective = run.relaxation->objective();
      return run;
  }
  run.objective = f_discrete(X, run.subset, l);
  return run;
}

}  // namespace espd
