#include "verify.hpp"

#include "data.hpp"
#include "discretize.hpp"
#include "dual.hpp"
#include "error.hpp"
#include "esp.hpp"
#include "objective.hpp"
#include "oracles.hpp"
#include "relax.hpp"
#include "rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace espd {

namespace {

constexpr double kFaultShift = 1e-3;

/// Accumulates the worst residual over a property's samples.
class Probe {
 public:
  explicit Probe(bool faulty) : faulty_(faulty) {}

  /// |got - want| / max(|want|, floor).
  void equal(double got, double want, double floor = 1.0) {
    if (faulty_) got += kFaultShift * (1.0 + std::abs(want));
    record(std::abs(got - want) / std::max(std::abs(want), floor));
  }

  /// |got - want|.
  void absolute(double got, double want) {
    if (faulty_) got += kFaultShift * (1.0 + std::abs(want));
    record(std::abs(got - want));
  }

  /// Violation of got <= bound.
  void at_most(double got, double bound) {
    if (faulty_) got = std::max(got, bound) + kFaultShift * (1.0 + std::abs(bound));
    record(std::max(0.0, got - bound));
  }

  void at_least(double got, double bound) {
    if (faulty_) got = std::min(got, bound) - kFaultShift * (1.0 + std::abs(bound));
    record(std::max(0.0, bound - got));
  }

  double residual() const { return residual_; }
  int samples() const { return samples_; }

 private:
  void record(double r) {
    residual_ = std::isnan(r) ? std::numeric_limits<double>::infinity() : std::max(residual_, r);
    ++samples_;
  }

  bool faulty_;
  double residual_ = 0.0;
  int samples_ = 0;
};

struct Property {
  const char* group;
  const char* name;
  double tolerance;
  void (*run)(Probe&, Rng&);
};

Matrix gaussian(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Matrix A(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) A(i, j) = rng.normal();
  }
  return A;
}

Matrix symmetric(Eigen::Index m, Rng& rng) {
  const Matrix A = gaussian(m, m, rng);
  return 0.5 * (A + A.transpose());
}

Matrix positive_definite(Eigen::Index m, Rng& rng) {
  const Matrix A = gaussian(m, m, rng);
  return A * A.transpose() / static_cast<double>(m) + 0.1 * Matrix::Identity(m, m);
}

Vector weights(Eigen::Index n, Rng& rng, double lo, double hi) {
  Vector z(n);
  for (Eigen::Index i = 0; i < n; ++i) z(i) = rng.uniform(lo, hi);
  return z;
}

int pick(Rng& rng, int lo, int hi) { return lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(hi - lo + 1))); }

std::vector<std::size_t> iota_rows(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

Subset random_subset(std::size_t n, std::size_t k, Rng& rng) {
  auto all = iota_rows(n);
  for (std::size_t i = 0; i < k; ++i) std::swap(all[i], all[i + rng.below(n - i)]);
  all.resize(k);
  return Subset(all);
}

void all_entries(Probe& p, const Matrix& got, const Matrix& want) {
  const double floor = std::max(1e-300, want.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < got.rows(); ++i) {
    for (Eigen::Index j = 0; j < got.cols(); ++j) p.equal(got(i, j), want(i, j), floor);
  }
}

// esp

void esp_vector_vs_enumeration(Probe& p, Rng& rng) {
  for (int t = 0; t < 100; ++t) {
    std::vector<double> v(pick(rng, 1, 8));
    for (double& x : v) x = rng.normal();
    for (int l = 1; l <= static_cast<int>(v.size()); ++l) {
      p.equal(esp_vector(v, l).value(), oracles::esp_bruteforce(v, l));
    }
  }
}

void esp_matrix_vs_minors(Probe& p, Rng& rng) {
  for (int t = 0; t < 100; ++t) {
    const Matrix M = symmetric(pick(rng, 1, 8), rng);
    for (int l = 1; l <= M.rows(); ++l) p.equal(esp_matrix(M, l).value(), oracles::esp_minor_sum(M, l));
  }
}

void esp_inverse_identity(Probe& p, Rng& rng) {
  for (int t = 0; t < 50; ++t) {
    const Matrix M = positive_definite(pick(rng, 1, 8), rng);
    const int m = static_cast<int>(M.rows());
    const PDMatrix pd(M);
    const double log_det = std::log(M.partialPivLu().determinant());
    for (int l = 1; l <= m; ++l) {
      const double complement = l == m ? 0.0 : esp_matrix(M, m - l).log_value;
      p.equal(esp_of_inverse(pd, l).log_value, complement - log_det);
    }
  }
}

void esp_gradient_fd(Probe& p, Rng& rng) {
  const double h = 1e-5;
  for (int t = 0; t < 20; ++t) {
    const Matrix M = symmetric(pick(rng, 2, 6), rng);
    const auto m = M.rows();
    for (int l = 1; l <= m; ++l) {
      const Matrix G = esp_gradient(M, l);
      const double floor = std::max(1.0, G.cwiseAbs().maxCoeff());
      for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = i; j < m; ++j) {
          Matrix dir = Matrix::Zero(m, m);
          dir(i, j) = dir(j, i) = 1.0;
          const double fd = (esp_matrix(M + h * dir, l).value() - esp_matrix(M - h * dir, l).value()) / (2 * h);
          p.equal(i == j ? G(i, i) : 2 * G(i, j), fd, floor);
        }
      }
    }
  }
}

void esp_geodesic_log_convexity(Probe& p, Rng& rng) {
  for (int t = 0; t < 200; ++t) {
    const int m = pick(rng, 1, 6);
    const int l = pick(rng, 1, m);
    const PDMatrix P(positive_definite(m, rng));
    const PDMatrix Q(positive_definite(m, rng));
    const double mid = esp_matrix(geodesic_point(P, Q, 0.5).matrix(), l).log_value;
    p.at_most(mid, 0.5 * (esp_matrix(P.matrix(), l).log_value + esp_matrix(Q.matrix(), l).log_value));
  }
}

// objective

void objective_relaxed_matches_discrete(Probe& p, Rng& rng) {
  for (int t = 0; t < 40; ++t) {
    const int m = pick(rng, 1, 6);
    const int n = pick(rng, m + 1, m + 20);
    const DesignMatrix X(gaussian(n, m, rng));
    const Subset S = random_subset(n, pick(rng, m, n), rng);
    for (int l = 1; l <= m; ++l) {
      p.equal(f_relaxed(X, indicator(S, n), ObjectiveOrder(l)), f_discrete(X, S, ObjectiveOrder(l)));
    }
  }
}

void objective_explicit_inverse(Probe& p, Rng& rng) {
  for (int t = 0; t < 40; ++t) {
    const int m = pick(rng, 1, 6);
    const int n = pick(rng, m, m + 20);
    const DesignMatrix X(gaussian(n, m, rng));
    const Vector z = weights(n, rng, 0.2, 0.9);
    const Matrix inv = (X.rows().transpose() * z.asDiagonal() * X.rows()).partialPivLu().inverse();
    const Matrix sym = 0.5 * (inv + inv.transpose());
    for (int l = 1; l <= m; ++l) {
      p.equal(f_relaxed(X, z, ObjectiveOrder(l)), std::log(oracles::esp_minor_sum(sym, l)) / l);
    }
  }
}

void objective_gradient_fd(Probe& p, Rng& rng) {
  const double h = 1e-6;
  for (int t = 0; t < 15; ++t) {
    const int m = pick(rng, 1, 8);
    const int n = pick(rng, m, 40);
    const DesignMatrix X(gaussian(n, m, rng));
    const Vector z = weights(n, rng, 0.2, 0.9);
    const ObjectiveOrder l(pick(rng, 1, m));
    const Vector g = grad_relaxed(X, z, l);
    for (Eigen::Index i = 0; i < n; ++i) {
      Vector up = z, down = z;
      up(i) += h;
      down(i) -= h;
      p.equal(g(i), (f_relaxed(X, up, l) - f_relaxed(X, down, l)) / (2 * h), g.cwiseAbs().maxCoeff());
    }
  }
}

void objective_segment_convexity(Probe& p, Rng& rng) {
  for (int t = 0; t < 100; ++t) {
    const int m = pick(rng, 1, 5);
    const int n = pick(rng, m + 1, m + 15);
    const DesignMatrix X(gaussian(n, m, rng));
    const Vector z1 = weights(n, rng, 0.0, 1.0);
    const Vector z2 = weights(n, rng, 0.0, 1.0);
    const ObjectiveOrder l(pick(rng, 1, m));
    for (double s : {0.25, 0.5, 0.75}) {
      p.at_most(f_relaxed(X, s * z1 + (1 - s) * z2, l), s * f_relaxed(X, z1, l) + (1 - s) * f_relaxed(X, z2, l));
    }
  }
}

void objective_regularized_determinant(Probe& p, Rng& rng) {
  for (int t = 0; t < 30; ++t) {
    const int m = pick(rng, 2, 7);
    const int n = pick(rng, m, m + 10);
    const DesignMatrix X(gaussian(n, m, rng));
    const Matrix gram = X.rows().transpose() * X.rows();
    const double want = (std::log(gram.trace()) - std::log(gram.partialPivLu().determinant())) / (m - 1);
    p.equal(f_discrete(X, Subset(iota_rows(n)), ObjectiveOrder(m - 1)), want);
  }
}

// relax

void relax_knapsack_kkt(Probe& p, Rng& rng) {
  for (int t = 0; t < 200; ++t) {
    const int n = pick(rng, 1, 50);
    Vector y(n);
    for (int i = 0; i < n; ++i) y(i) = 3.0 * rng.normal();
    const double k = rng.uniform(0.01, static_cast<double>(n));
    const Vector z = project_knapsack(y, k);
    p.equal(z.sum(), k);
    double mu_sum = 0.0;
    int free = 0;
    for (int i = 0; i < n; ++i) {
      p.at_least(z(i), 0.0);
      p.at_most(z(i), 1.0);
      if (z(i) > 1e-12 && z(i) < 1 - 1e-12) {
        mu_sum += y(i) - z(i);
        ++free;
      }
    }
    if (free == 0) continue;
    const double mu = mu_sum / free;
    for (int i = 0; i < n; ++i) p.equal(z(i), std::clamp(y(i) - mu, 0.0, 1.0));
  }
}

void relax_knapsack_idempotent(Probe& p, Rng& rng) {
  for (int t = 0; t < 200; ++t) {
    const int n = pick(rng, 1, 50);
    Vector y(n);
    for (int i = 0; i < n; ++i) y(i) = 3.0 * rng.normal();
    const double k = rng.uniform(0.01, static_cast<double>(n));
    const Vector z = project_knapsack(y, k);
    const Vector zz = project_knapsack(z, k);
    for (int i = 0; i < n; ++i) p.equal(zz(i), z(i));
  }
}

struct SolvedInstance {
  SolverReport report;
  int k;
  int m;
};

std::vector<SolvedInstance> solved_instances(Rng& rng) {
  std::vector<SolvedInstance> out;
  for (int t = 0; t < 6; ++t) {
    const int m = pick(rng, 2, 8);
    const int n = pick(rng, 60, 120);
    const int k = pick(rng, m, n / 2);
    const DesignMatrix X(gaussian(n, m, rng));
    out.push_back({solve_relaxation(X, k, ObjectiveOrder(pick(rng, 1, m)), {}), k, m});
  }
  return out;
}

void relax_solver_budget(Probe& p, Rng& rng) {
  for (const auto& s : solved_instances(rng)) p.equal(s.report.weights.sum(), s.k);
}

void relax_solver_monotone(Probe& p, Rng& rng) {
  for (const auto& s : solved_instances(rng)) {
    const auto& trace = s.report.objective_trace;
    for (std::size_t i = 1; i < trace.size(); ++i) p.at_most(trace[i], trace[i - 1]);
  }
}

void relax_support_bound(Probe& p, Rng& rng) {
  for (const auto& s : solved_instances(rng)) {
    p.at_most(static_cast<double>(s.report.support_size), s.k + s.m * (s.m + 1) / 2.0);
  }
}

// discretize

double removal_factor(int n0, int k, int m, int l) {
  double s = 0.0;
  for (int j = 1; j <= l; ++j) s += std::log(static_cast<double>(n0 - m + j) / (k - m + j));
  return s / l;
}

void discretize_removal_bound(Probe& p, Rng& rng) {
  for (int t = 0; t < 20; ++t) {
    const int m = pick(rng, 1, 4);
    const int n = pick(rng, m + 2, 30);
    const int k = pick(rng, m, n - 1);
    const int l = pick(rng, 1, m);
    const DesignMatrix X(gaussian(n, m, rng));
    const Subset S0(iota_rows(n));
    const Subset out = greedy_removal(X, k, ObjectiveOrder(l), S0);
    p.at_most(f_discrete(X, out, ObjectiveOrder(l)), f_discrete(X, S0, ObjectiveOrder(l)) + removal_factor(n, k, m, l));
  }
}

void discretize_exhaustive_sanity(Probe& p, Rng& rng) {
  for (int t = 0; t < 20; ++t) {
    const int m = pick(rng, 1, 3);
    const int n = pick(rng, m + 2, 11);
    const int k = pick(rng, m, n - 1);
    const int l = pick(rng, 1, m);
    const DesignMatrix X(gaussian(n, m, rng));
    const Subset out = greedy_removal(X, k, ObjectiveOrder(l), Subset(iota_rows(n)));
    p.at_least(f_discrete(X, out, ObjectiveOrder(l)), oracles::exhaustive_optimum(X.rows(), k, l).objective);
  }
}

void discretize_fedorov_descent(Probe& p, Rng& rng) {
  for (int t = 0; t < 15; ++t) {
    const int m = pick(rng, 1, 4);
    const int n = pick(rng, m + 3, 25);
    const int k = pick(rng, m, n - 1);
    const ObjectiveOrder l(pick(rng, 1, m));
    const DesignMatrix X(gaussian(n, m, rng));
    const Subset start = uniform_baseline(X, k, rng.next_u64());
    p.at_most(f_discrete(X, fedorov_exchange(X, k, l, start, 1000), l), f_discrete(X, start, l));
  }
}

void discretize_sample_size(Probe& p, Rng& rng) {
  for (int t = 0; t < 100; ++t) {
    const int n = pick(rng, 2, 40);
    Vector z = weights(n, rng, 0.0, 1.0);
    const int k = pick(rng, 1, n);
    p.equal(static_cast<double>(sample_rounding(z, k, rng.next_u64()).subset.size()), k);
  }
}

// oracles

void oracles_cauchy_binet(Probe& p, Rng& rng) {
  for (int t = 0; t < 20; ++t) {
    const int m = pick(rng, 1, 4);
    p.equal(oracles::cauchy_binet_check(gaussian(pick(rng, m, 11), m, rng)) ? 1.0 : 0.0, 1.0);
  }
}

void oracles_volume_sampling_equality(Probe& p, Rng& rng) {
  for (int t = 0; t < 30; ++t) {
    const int m = pick(rng, 1, 3);
    const int n = pick(rng, m + 1, 10);
    const auto sides = oracles::volume_sampling_expectation(gaussian(n, m, rng), pick(rng, m, n), pick(rng, 1, m));
    p.equal(sides.lhs, sides.rhs, 0.0);
  }
}

void oracles_volume_sampling_degenerate(Probe& p, Rng& rng) {
  for (int t = 0; t < 10; ++t) {
    const int m = pick(rng, 2, 3);
    Matrix A = gaussian(8, m, rng);
    A.row(1) = 2.0 * A.row(0);
    A.row(2) = -A.row(0);
    const auto sides = oracles::volume_sampling_expectation(A, m + 1, m);
    p.at_most(sides.lhs, sides.rhs * (1 - 1e-9));
  }
}

// dual

void dual_closed_form_top(Probe& p, Rng& rng) {
  for (int t = 0; t < 30; ++t) {
    const Matrix H = positive_definite(pick(rng, 1, 8), rng);
    all_entries(p, solve_a_of_H(H, static_cast<int>(H.rows())).a_of_H, H);
  }
}

void dual_closed_form_one(Probe& p, Rng& rng) {
  for (int t = 0; t < 30; ++t) {
    const Matrix H = positive_definite(pick(rng, 1, 8), rng);
    const Matrix root = spectral_apply(spectral_decomp(H), [](double x) { return std::sqrt(x); });
    all_entries(p, solve_a_of_H(H, 1).a_of_H, root.trace() * root);
  }
}

void dual_trace_identity(Probe& p, Rng& rng) {
  for (int t = 0; t < 40; ++t) {
    const Matrix H = positive_definite(pick(rng, 1, 8), rng);
    for (int l = 1; l <= H.rows(); ++l) {
      const Matrix a = solve_a_of_H(H, l).a_of_H;
      p.absolute((H * a.partialPivLu().inverse()).trace(), l);
    }
  }
}

void dual_weak_duality(Probe& p, Rng& rng) {
  for (int t = 0; t < 5; ++t) {
    const int m = pick(rng, 2, 5);
    const int n = pick(rng, 20, 40);
    const int k = pick(rng, m, n - 1);
    const DesignMatrix X(gaussian(n, m, rng));
    for (int l = 1; l <= m; ++l) {
      const SolverReport r = solve_relaxation(X, k, ObjectiveOrder(l), {});
      const Matrix H = scale_to_feasible(X, w_matrix(X, r.weights, ObjectiveOrder(l)).matrix());
      p.at_most(dual_bound(H, l, k), r.objective());
    }
  }
}

// data

void data_csv_roundtrip(Probe& p, Rng& rng) {
  SyntheticSpec spec;
  spec.n = 40;
  spec.m = 5;
  spec.seed = rng.next_u64();
  Dataset d = generate(spec);
  d.y = d.X.rows().rowwise().sum();
  const Dataset back = parse_csv(to_csv(d), "y", false);
  all_entries(p, back.X.rows(), d.X.rows());
  for (Eigen::Index i = 0; i < d.y->size(); ++i) p.equal((*back.y)(i), (*d.y)(i), 1e-300);
}

void data_generator_determinism(Probe& p, Rng& rng) {
  for (auto kind : {SyntheticKind::kSparsePrecision, SyntheticKind::kSkewedCovariance}) {
    SyntheticSpec spec;
    spec.kind = kind;
    spec.n = 30;
    spec.m = 4;
    spec.alpha = 1.5;
    spec.seed = rng.next_u64();
    all_entries(p, generate(spec).X.rows(), generate(spec).X.rows());
  }
}

const std::vector<Property>& registry() {
  static const std::vector<Property> props{
      {"esp", "vector-vs-enumeration", 1e-8, esp_vector_vs_enumeration},
      {"esp", "matrix-vs-minors", 1e-8, esp_matrix_vs_minors},
      {"esp", "inverse-identity", 1e-8, esp_inverse_identity},
      {"esp", "gradient-fd", 1e-5, esp_gradient_fd},
      {"esp", "geodesic-log-convexity", 1e-9, esp_geodesic_log_convexity},
      {"objective", "relaxed-matches-discrete", 1e-10, objective_relaxed_matches_discrete},
      {"objective", "explicit-inverse", 1e-8, objective_explicit_inverse},
      {"objective", "gradient-fd", 1e-5, objective_gradient_fd},
      {"objective", "segment-convexity", 1e-9, objective_segment_convexity},
      {"objective", "regularized-determinant", 1e-8, objective_regularized_determinant},
      {"relax", "knapsack-kkt", 1e-10, relax_knapsack_kkt},
      {"relax", "knapsack-idempotent", 1e-10, relax_knapsack_idempotent},
      {"relax", "solver-budget", 1e-8, relax_solver_budget},
      {"relax", "solver-monotone", 1e-12, relax_solver_monotone},
      {"relax", "support-bound", 0.0, relax_support_bound},
      {"discretize", "removal-bound", 1e-10, discretize_removal_bound},
      {"discretize", "exhaustive-sanity", 1e-10, discretize_exhaustive_sanity},
      {"discretize", "fedorov-descent", 1e-12, discretize_fedorov_descent},
      {"discretize", "sample-size", 0.0, discretize_sample_size},
      {"oracles", "cauchy-binet", 0.0, oracles_cauchy_binet},
      {"oracles", "volume-sampling-equality", 1e-8, oracles_volume_sampling_equality},
      {"oracles", "volume-sampling-degenerate", 0.0, oracles_volume_sampling_degenerate},
      {"dual", "closed-form-top", 1e-8, dual_closed_form_top},
      {"dual", "closed-form-one", 1e-8, dual_closed_form_one},
      {"dual", "trace-identity", 1e-8, dual_trace_identity},
      {"dual", "weak-duality", 1e-9, dual_weak_duality},
      {"data", "csv-roundtrip", 0.0, data_csv_roundtrip},
      {"data", "generator-determinism", 0.0, data_generator_determinism},
  };
  return props;
}

}  // namespace

const std::vector<std::string>& verify_groups() {
  static const std::vector<std::string> groups{"esp", "objective", "relax", "discretize", "oracles", "dual", "data"};
  return groups;
}

std::vector<std::string> verify_property_names() {
  std::vector<std::string> names;
  for (const auto& prop : registry()) names.push_back(std::string(prop.group) + "." + prop.name);
  return names;
}

std::vector<PropertyCheck> run_verification(const VerifyOptions& options,
                                            const std::function<void(const PropertyCheck&)>& on_result) {
  const auto& groups = verify_groups();
  if (options.only && std::find(groups.begin(), groups.end(), *options.only) == groups.end()) {
    fail(ErrorCode::kInput, "unknown verification group '" + *options.only + "'");
  }
  if (options.inject_fault) {
    const auto names = verify_property_names();
    if (std::find(names.begin(), names.end(), *options.inject_fault) == names.end()) {
      fail(ErrorCode::kInput, "unknown property '" + *options.inject_fault + "'");
    }
  }

  std::vector<PropertyCheck> results;
  std::uint64_t stream = 0;
  for (const auto& prop : registry()) {
    ++stream;
    if (options.only && *options.only != prop.group) continue;
    PropertyCheck check;
    check.group = prop.group;
    check.name = prop.name;
    check.tolerance = prop.tolerance;
    Probe probe(options.inject_fault == check.qualified_name());
    Rng rng(derive_seed(options.seed, stream));
    try {
      prop.run(probe, rng);
      check.residual = probe.residual();
      check.passed = check.residual <= check.tolerance;
    } catch (const Error&) {
      check.residual = std::numeric_limits<double>::infinity();
      check.passed = false;
    }
    check.samples = probe.samples();
    if (on_result) on_result(check);
    results.push_back(std::move(check));
  }
  return results;
}

}  // namespace espd
