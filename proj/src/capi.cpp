#include "espdesign/espdesign.h"

#include "data.hpp"
#include "discretize.hpp"
#include "error.hpp"
#include "esp.hpp"
#include "objective.hpp"
#include "pipeline.hpp"
#include "verify.hpp"

#include <cstring>
#include <exception>
#include <new>
#include <optional>
#include <string>

struct espd_dataset {
  espd::Dataset data;
};

struct espd_result {
  espd::DesignRun run;
};

namespace {

thread_local std::string g_last_error;

espd_status to_status(espd::ErrorCode code) {
  switch (code) {
    case espd::ErrorCode::kInput: return ESPD_ERR_INPUT;
    case espd::ErrorCode::kDomain: return ESPD_ERR_DOMAIN;
    case espd::ErrorCode::kInfeasibleDesign: return ESPD_ERR_INFEASIBLE_DESIGN;
    case espd::ErrorCode::kInfeasibleProblem: return ESPD_ERR_INFEASIBLE_PROBLEM;
    case espd::ErrorCode::kStuckInfeasible: return ESPD_ERR_STUCK_INFEASIBLE;
    case espd::ErrorCode::kCannotRound: return ESPD_ERR_CANNOT_ROUND;
    case espd::ErrorCode::kNumericFailure: return ESPD_ERR_NUMERIC;
    case espd::ErrorCode::kBudgetExceeded: return ESPD_ERR_BUDGET;
    case espd::ErrorCode::kParse: return ESPD_ERR_PARSE;
    case espd::ErrorCode::kIo: return ESPD_ERR_IO;
  }
  return ESPD_ERR_INTERNAL;
}

template <typename F>
espd_status guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return ESPD_OK;
  } catch (const espd::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return ESPD_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return ESPD_ERR_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) espd::fail(espd::ErrorCode::kInput, what);
}

espd::Subset to_subset(const espd_dataset* data, const size_t* subset, size_t count) {
  require(data != nullptr, "dataset is NULL");
  require(subset != nullptr || count == 0, "subset is NULL");
  espd::Subset S(std::vector<std::size_t>(subset, subset + count));
  S.require_within(data->data.X.n());
  return S;
}

espd::Method to_method(espd_method method) {
  switch (method) {
    case ESPD_METHOD_UNIF: return espd::Method::kUnif;
    case ESPD_METHOD_UNIF_FDV: return espd::Method::kUnifFdv;
    case ESPD_METHOD_GREEDY: return espd::Method::kGreedy;
    case ESPD_METHOD_GREEDY_FDV: return espd::Method::kGreedyFdv;
    case ESPD_METHOD_SAMPLE: return espd::Method::kSample;
    case ESPD_METHOD_RELAX: return espd::Method::kRelax;
  }
  espd::fail(espd::ErrorCode::kInput, "unknown method");
}

espd_method from_method(espd::Method method) {
  switch (method) {
    case espd::Method::kUnif: return ESPD_METHOD_UNIF;
    case espd::Method::kUnifFdv: return ESPD_METHOD_UNIF_FDV;
    case espd::Method::kGreedy: return ESPD_METHOD_GREEDY;
    case espd::Method::kGreedyFdv: return ESPD_METHOD_GREEDY_FDV;
    case espd::Method::kSample: return ESPD_METHOD_SAMPLE;
    case espd::Method::kRelax: return ESPD_METHOD_RELAX;
  }
  return ESPD_METHOD_UNIF;
}

}  // namespace

extern "C" {

const char* espd_last_error(void) { return g_last_error.c_str(); }

const char* espd_status_name(espd_status status) {
  switch (status) {
    case ESPD_OK: return "ok";
    case ESPD_ERR_INPUT: return "input-error";
    case ESPD_ERR_DOMAIN: return "domain-error";
    case ESPD_ERR_INFEASIBLE_DESIGN: return "infeasible-design";
    case ESPD_ERR_INFEASIBLE_PROBLEM: return "infeasible-problem";
    case ESPD_ERR_STUCK_INFEASIBLE: return "stuck-infeasible";
    case ESPD_ERR_CANNOT_ROUND: return "cannot-round";
    case ESPD_ERR_NUMERIC: return "numeric-failure";
    case ESPD_ERR_BUDGET: return "budget-exceeded";
    case ESPD_ERR_PARSE: return "parse-error";
    case ESPD_ERR_IO: return "io-error";
    case ESPD_ERR_INTERNAL: return "internal-error";
  }
  return "unknown";
}

espd_status espd_dataset_generate(const espd_synthetic_spec* spec, espd_dataset** out) {
  return guarded([&] {
    require(spec != nullptr && out != nullptr, "NULL argument");
    espd::SyntheticSpec s;
    switch (spec->kind) {
      case ESPD_SYNTHETIC_SPARSE_PRECISION: s.kind = espd::SyntheticKind::kSparsePrecision; break;
      case ESPD_SYNTHETIC_SKEWED_COVARIANCE: s.kind = espd::SyntheticKind::kSkewedCovariance; break;
      default: espd::fail(espd::ErrorCode::kInput, "unknown synthetic kind");
    }
    s.n = spec->n;
    s.m = spec->m;
    s.density = spec->density;
    s.alpha = spec->alpha;
    s.seed = spec->seed;
    s.validate();
    *out = new espd_dataset{espd::generate(s)};
  });
}

espd_status espd_dataset_load_csv(const char* path, const char* response, int normalize, espd_dataset** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "NULL argument");
    std::optional<std::string> column;
    if (response) column = response;
    *out = new espd_dataset{espd::load_csv(path, column, normalize != 0)};
  });
}

espd_status espd_dataset_from_rows(const double* rows, size_t n, size_t m, const double* y, espd_dataset** out) {
  return guarded([&] {
    require(rows != nullptr && out != nullptr, "NULL argument");
    require(n > 0 && m > 0, "empty matrix");
    espd::Matrix X(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
    for (size_t i = 0; i < n; ++i) {
      for (size_t j = 0; j < m; ++j) X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i * m + j];
    }
    espd::Dataset data{espd::DesignMatrix(std::move(X)), std::nullopt, {}, "", {}};
    for (size_t j = 0; j < m; ++j) data.feature_names.push_back("x" + std::to_string(j + 1));
    data.column_stats.scales.assign(m, 1.0);
    if (y) {
      data.y = Eigen::Map<const espd::Vector>(y, static_cast<Eigen::Index>(n));
      require(data.y->allFinite(), "response contains non-finite values");
      data.response_name = "y";
    }
    *out = new espd_dataset{std::move(data)};
  });
}

espd_status espd_dataset_write_csv(const espd_dataset* data, const char* path) {
  return guarded([&] {
    require(data != nullptr && path != nullptr, "NULL argument");
    espd::write_csv(data->data, path);
  });
}

espd_status espd_dataset_shape(const espd_dataset* data, size_t* n, size_t* m, int* has_response) {
  return guarded([&] {
    require(data != nullptr, "dataset is NULL");
    if (n) *n = data->data.X.n();
    if (m) *m = data->data.X.m();
    if (has_response) *has_response = data->data.y.has_value() ? 1 : 0;
  });
}

espd_status espd_dataset_rows(const espd_dataset* data, double* out, size_t capacity) {
  return guarded([&] {
    require(data != nullptr && out != nullptr, "NULL argument");
    const auto& X = data->data.X.rows();
    require(capacity >= static_cast<size_t>(X.size()), "buffer too small");
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      for (Eigen::Index j = 0; j < X.cols(); ++j) *out++ = X(i, j);
    }
  });
}

void espd_dataset_free(espd_dataset* data) { delete data; }

void espd_solver_config_default(espd_solver_config* cfg) {
  if (!cfg) return;
  const espd::RunOptions defaults;
  cfg->max_iters = defaults.solver.max_iters;
  cfg->step_init = defaults.solver.step_init;
  cfg->tol_obj = defaults.solver.tol_obj;
  cfg->tol_grad = defaults.solver.tol_grad;
  cfg->max_sweeps = defaults.max_sweeps;
}

const char* espd_method_name(espd_method method) {
  try {
    return espd::method_tag(to_method(method));
  } catch (const espd::Error&) {
    return nullptr;
  }
}

espd_status espd_method_parse(const char* text, espd_method* out) {
  return guarded([&] {
    require(text != nullptr && out != nullptr, "NULL argument");
    const auto method = espd::parse_method(text);
    if (!method) espd::fail(espd::ErrorCode::kInput, std::string("unknown method '") + text + "'");
    *out = from_method(*method);
  });
}

espd_status espd_solve(const espd_dataset* data, espd_method method, int k, int order, uint64_t seed,
                       const espd_solver_config* cfg, espd_result** out) {
  return guarded([&] {
    require(data != nullptr && out != nullptr, "NULL argument");
    espd::RunOptions options;
    if (cfg) {
      options.solver.max_iters = cfg->max_iters;
      options.solver.step_init = cfg->step_init;
      options.solver.tol_obj = cfg->tol_obj;
      options.solver.tol_grad = cfg->tol_grad;
      options.max_sweeps = cfg->max_sweeps;
      require(options.max_sweeps >= 0, "max_sweeps must be >= 0");
    }
    options.solver.seed = seed;
    options.solver.validate();
    auto run = espd::run_method(data->data.X, to_method(method), k, espd::ObjectiveOrder(order), seed, options);
    *out = new espd_result{std::move(run)};
  });
}

espd_status espd_result_objective(const espd_result* result, double* out) {
  return guarded([&] {
    require(result != nullptr && out != nullptr, "NULL argument");
    *out = result->run.objective;
  });
}

espd_status espd_result_subset(const espd_result* result, size_t* out, size_t capacity, size_t* count) {
  return guarded([&] {
    require(result != nullptr, "result is NULL");
    const auto& idx = result->run.subset.indices();
    if (count) *count = idx.size();
    if (!out) return;
    require(capacity >= idx.size(), "buffer too small");
    std::copy(idx.begin(), idx.end(), out);
  });
}

espd_status espd_result_weights(const espd_result* result, double* out, size_t capacity, size_t* count) {
  return guarded([&] {
    require(result != nullptr, "result is NULL");
    require(result->run.relaxation.has_value(), "method did not solve the relaxation");
    const auto& z = result->run.relaxation->weights;
    if (count) *count = static_cast<size_t>(z.size());
    if (!out) return;
    require(capacity >= static_cast<size_t>(z.size()), "buffer too small");
    std::copy(z.data(), z.data() + z.size(), out);
  });
}

espd_status espd_result_relaxation(const espd_result* result, size_t* support, double* weight_sum, int* iterations,
                                   int* converged) {
  return guarded([&] {
    require(result != nullptr, "result is NULL");
    require(result->run.relaxation.has_value(), "method did not solve the relaxation");
    const auto& r = *result->run.relaxation;
    if (support) *support = r.support_size;
    if (weight_sum) *weight_sum = r.weights.sum();
    if (iterations) *iterations = r.iterations;
    if (converged) *converged = r.converged ? 1 : 0;
  });
}

espd_status espd_result_draws(const espd_result* result, uint64_t* out) {
  return guarded([&] {
    require(result != nullptr && out != nullptr, "NULL argument");
    *out = result->run.draws;
  });
}

void espd_result_free(espd_result* result) { delete result; }

espd_status espd_objective(const espd_dataset* data, const size_t* subset, size_t count, int order, double* out) {
  return guarded([&] {
    require(out != nullptr, "NULL argument");
    const espd::Subset S = to_subset(data, subset, count);
    *out = espd::f_discrete(data->data.X, S, espd::ObjectiveOrder(order));
  });
}

espd_status espd_predictive_error(const espd_dataset* data, const size_t* subset, size_t count, double* out) {
  return guarded([&] {
    require(out != nullptr, "NULL argument");
    const espd::Subset S = to_subset(data, subset, count);
    require(data->data.y.has_value(), "dataset has no response column");
    *out = espd::predictive_error(data->data.X.rows(), *data->data.y, S);
  });
}

espd_status espd_sparsity_fraction(const espd_dataset* data, const size_t* subset, size_t count, double* out) {
  return guarded([&] {
    require(out != nullptr, "NULL argument");
    const espd::Subset S = to_subset(data, subset, count);
    *out = espd::sparsity_fraction(espd::denormalized(data->data), S);
  });
}

espd_status espd_esp_vector(const double* values, size_t count, int order, double* log_value, int* sign) {
  return guarded([&] {
    require(values != nullptr || count == 0, "values is NULL");
    const espd::LogEsp e = espd::esp_vector({values, count}, order);
    if (log_value) *log_value = e.log_value;
    if (sign) *sign = e.sign;
  });
}

espd_status espd_verify_run(const char* only, const char* inject_fault, uint64_t seed, espd_property_callback callback,
                            void* user, int* all_passed) {
  return guarded([&] {
    espd::VerifyOptions options;
    if (only) options.only = only;
    if (inject_fault) options.inject_fault = inject_fault;
    options.seed = seed;
    bool ok = true;
    espd::run_verification(options, [&](const espd::PropertyCheck& c) {
      ok = ok && c.passed;
      if (!callback) return;
      const espd_property_report report{c.group.c_str(), c.name.c_str(), c.passed ? 1 : 0,
                                        c.residual,      c.tolerance,    c.samples};
      callback(&report, user);
    });
    if (all_passed) *all_passed = ok ? 1 : 0;
  });
}

}  // extern "C"
