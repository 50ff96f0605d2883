#include "discretize.hpp"

#include "error.hpp"
#include "parallel.hpp"
#include "rng.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace espd {

namespace {

constexpr double kExchangeGain = 1e-12;
constexpr int kUniformTries = 100;
constexpr double kInf = std::numeric_limits<double>::infinity();

void require_budget(const DesignMatrix& X, int k, const char* what) {
  if (k < static_cast<int>(X.m()) || k > static_cast<int>(X.n())) {
    fail(ErrorCode::kInput, std::string(what) + ": need m <= k <= n (k=" + std::to_string(k) + ")");
  }
}

}  // namespace

const char* method_tag(Method method) noexcept {
  switch (method) {
    case Method::kUnif: return "UNIF";
    case Method::kUnifFdv: return "UNIF_FDV";
    case Method::kGreedy: return "GREEDY";
    case Method::kGreedyFdv: return "GREEDY_FDV";
    case Method::kSample: return "SAMPLE";
    case Method::kRelax: return "RELAX";
  }
  return "UNKNOWN";
}

const char* method_flag(Method method) noexcept {
  switch (method) {
    case Method::kUnif: return "unif";
    case Method::kUnifFdv: return "unif-fdv";
    case Method::kGreedy: return "greedy";
    case Method::kGreedyFdv: return "greedy-fdv";
    case Method::kSample: return "sample";
    case Method::kRelax: return "relax";
  }
  return "unknown";
}

std::optional<Method> parse_method(std::string_view name) {
  std::string lowered(name);
  for (char& c : lowered) c = c == '_' ? '-' : static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  for (Method m : {Method::kUnif, Method::kUnifFdv, Method::kGreedy, Method::kGreedyFdv, Method::kSample,
                   Method::kRelax}) {
    if (lowered == method_flag(m)) return m;
  }
  return std::nullopt;
}

RoundingOutcome sample_rounding(const Vector& z, int k, std::uint64_t seed) {
  if (k < 0) fail(ErrorCode::kInput, "sample_rounding: negative k");
  if ((z.array() > 0.0).count() < k) {
    fail(ErrorCode::kCannotRound, "sample_rounding: fewer than k positive weights");
  }
  Rng rng(seed);
  std::vector<std::size_t> pool(static_cast<std::size_t>(z.size()));
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  std::vector<std::size_t> chosen;
  RoundingOutcome out;
  while (chosen.size() < static_cast<std::size_t>(k)) {
    const auto slot = static_cast<std::size_t>(rng.below(pool.size()));
    const std::size_t i = pool[slot];
    ++out.draws;
    if (rng.bernoulli(z(static_cast<Eigen::Index>(i)))) {
      chosen.push_back(i);
      pool[slot] = pool.back();
      pool.pop_back();
    }
  }
  out.subset = Subset(std::move(chosen));
  return out;
}

double rounding_diagnostic(const DesignMatrix& X, const Vector& z) {
  if (static_cast<std::size_t>(z.size()) != X.n()) fail(ErrorCode::kInput, "weights length must equal n");
  const Vector eig = eigenvalues_desc(weighted_gram(X.rows(), z.cwiseMax(0.0)));
  if (!is_pd_spectrum(eig)) fail(ErrorCode::kInfeasibleDesign, "rounding_diagnostic: Gram not positive definite");
  const double smallest = eig(eig.size() - 1);
  const double inv_norm = 1.0 / smallest;
  const double condition = eig(0) / smallest;
  const double row_norm_sq = X.rows().rowwise().squaredNorm().maxCoeff();
  return inv_norm * condition * row_norm_sq * std::log(static_cast<double>(X.m()));
}

Subset greedy_removal(const DesignMatrix& X, int k, ObjectiveOrder l, const Subset& S0) {
  l.require_within(X.m());
  S0.require_within(X.n());
  if (k < static_cast<int>(X.m()) || static_cast<int>(S0.size()) < k) {
    fail(ErrorCode::kInput, "greedy_removal: need m <= k <= |S0|");
  }
  std::vector<std::size_t> current = S0.indices();
  if (!detail::gram_is_feasible(gram_of_rows(X.rows(), current))) {
    fail(ErrorCode::kInfeasibleDesign, "greedy_removal: S0 is infeasible");
  }

  std::vector<double> scores;
  while (current.size() > static_cast<std::size_t>(k)) {
    const Matrix gram = gram_of_rows(X.rows(), current);
    scores.assign(current.size(), kInf);
    parallel_for(current.size(), [&](std::size_t p) {
      Matrix reduced = gram;
      const Vector x = X.row(current[p]).transpose();
      reduced.noalias() -= x * x.transpose();
      if (auto f = detail::objective_from_gram(reduced, l.value)) scores[p] = *f;
    });
    // Strict < keeps the smallest index on ties; current is sorted.
    std::size_t best = current.size();
    for (std::size_t p = 0; p < current.size(); ++p) {
      if (std::isfinite(scores[p]) && (best == current.size() || scores[p] < scores[best])) best = p;
    }
    if (best == current.size()) {
      throw StuckInfeasibleError(current, "greedy_removal: no feasible removal at size " +
                                              std::to_string(current.size()));
    }
    current.erase(current.begin() + static_cast<std::ptrdiff_t>(best));
  }
  return Subset(std::move(current));
}

Subset relaxation_start(const DesignMatrix& X, const Vector& z, int k) {
  if (static_cast<std::size_t>(z.size()) != X.n()) fail(ErrorCode::kInput, "weights length must equal n");
  Subset start = support_subset(z, kSupportEps);
  if (start.size() >= static_cast<std::size_t>(k)) return start;

  const Matrix gram = X.rows().transpose() * X.rows();
  const Eigen::LLT<Matrix> llt(gram);
  const Vector leverage = llt.solve(X.rows().transpose()).cwiseProduct(X.rows().transpose()).colwise().sum();

  std::vector<std::size_t> rest;
  for (std::size_t i = 0; i < X.n(); ++i) {
    if (!start.contains(i)) rest.push_back(i);
  }
  std::stable_sort(rest.begin(), rest.end(), [&](std::size_t a, std::size_t b) {
    const auto ia = static_cast<Eigen::Index>(a);
    const auto ib = static_cast<Eigen::Index>(b);
    if (z(ia) != z(ib)) return z(ia) > z(ib);
    return leverage(ia) > leverage(ib);
  });
  std::vector<std::size_t> padded = start.indices();
  padded.insert(padded.end(), rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(k - start.size()));
  return Subset(std::move(padded));
}

Subset greedy_from_relaxation(const DesignMatrix& X, int k, ObjectiveOrder l, const SolverReport& relaxed) {
  require_budget(X, k, "greedy_from_relaxation");
  return greedy_removal(X, k, l, relaxation_start(X, relaxed.weights, k));
}

Subset greedy_from_relaxation(const DesignMatrix& X, int k, ObjectiveOrder l, const SolverConfig& cfg) {
  return greedy_from_relaxation(X, k, l, solve_relaxation(X, k, l, cfg));
}

Subset fedorov_exchange(const DesignMatrix& X, int k, ObjectiveOrder l, const Subset& S_init, int max_sweeps) {
  l.require_within(X.m());
  S_init.require_within(X.n());
  if (static_cast<int>(S_init.size()) != k) fail(ErrorCode::kInput, "fedorov_exchange: |S_init| must equal k");
  if (max_sweeps < 0) fail(ErrorCode::kInput, "fedorov_exchange: max_sweeps must be >= 0");

  std::vector<std::size_t> inside = S_init.indices();
  const auto f0 = detail::objective_from_gram(gram_of_rows(X.rows(), inside), l.value);
  if (!f0) fail(ErrorCode::kInput, "fedorov_exchange: S_init is infeasible");
  double current = *f0;

  struct Swap {
    double value = kInf;
    std::size_t out_pos = 0;
    std::size_t in_pos = 0;
  };

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    std::vector<std::size_t> outside;
    for (std::size_t i = 0, p = 0; i < X.n(); ++i) {
      if (p < inside.size() && inside[p] == i) {
        ++p;
      } else {
        outside.push_back(i);
      }
    }
    const Matrix gram = gram_of_rows(X.rows(), inside);
    std::vector<Swap> best_per_row(inside.size());
    parallel_for(inside.size(), [&](std::size_t p) {
      const Vector x_out = X.row(inside[p]).transpose();
      Matrix without = gram;
      without.noalias() -= x_out * x_out.transpose();
      Swap best;
      Matrix trial(gram.rows(), gram.cols());
      for (std::size_t q = 0; q < outside.size(); ++q) {
        const Vector x_in = X.row(outside[q]).transpose();
        trial = without;
        trial.noalias() += x_in * x_in.transpose();
        const auto f = detail::objective_from_gram(trial, l.value);
        if (f && *f < best.value) best = Swap{*f, p, q};
      }
      best_per_row[p] = best;
    });

    // Sequential reduction in (out, in) index order: smallest pair wins ties.
    Swap best;
    for (const Swap& s : best_per_row) {
      if (s.value < best.value) best = s;
    }
    if (!(best.value < current - kExchangeGain)) break;
    inside[best.out_pos] = outside[best.in_pos];
    std::sort(inside.begin(), inside.end());
    current = best.value;
  }
  return Subset(std::move(inside));
}

Subset uniform_baseline(const DesignMatrix& X, int k, std::uint64_t seed) {
  if (k < 0 || static_cast<std::size_t>(k) > X.n()) fail(ErrorCode::kInput, "uniform_baseline: need k <= n");
  Rng rng(seed);
  std::vector<std::size_t> perm(X.n());
  for (int attempt = 0; attempt < kUniformTries; ++attempt) {
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    // Partial Fisher-Yates: the first k slots are a uniform k-subset.
    for (std::size_t i = 0; i < static_cast<std::size_t>(k); ++i) {
      const auto j = i + static_cast<std::size_t>(rng.below(perm.size() - i));
      std::swap(perm[i], perm[j]);
    }
    std::vector<std::size_t> pick(perm.begin(), perm.begin() + k);
    if (detail::gram_is_feasible(gram_of_rows(X.rows(), pick))) return Subset(std::move(pick));
  }
  fail(ErrorCode::kInfeasibleProblem, "uniform_baseline: no feasible subset in 100 draws");
}

}  // namespace espd
