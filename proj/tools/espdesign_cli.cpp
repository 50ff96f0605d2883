// espdesign command-line front end. Talks to the library only through the
// C interface.
#include "espdesign/espdesign.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace {

using json = nlohmann::json;

enum ExitCode { kExitOk = 0, kExitFailed = 1, kExitUsage = 2, kExitInfeasible = 3, kExitNumeric = 4 };

class CliError : public std::runtime_error {
 public:
  CliError(espd_status status, const std::string& what) : std::runtime_error(what), status_(status) {}
  espd_status status() const { return status_; }

 private:
  espd_status status_;
};

void check(espd_status status, const std::string& what) {
  if (status != ESPD_OK) throw CliError(status, what + ": " + espd_last_error());
}

int exit_code(espd_status status) {
  switch (status) {
    case ESPD_OK: return kExitOk;
    case ESPD_ERR_INPUT:
    case ESPD_ERR_DOMAIN:
    case ESPD_ERR_PARSE:
    case ESPD_ERR_IO:
    case ESPD_ERR_BUDGET: return kExitUsage;
    case ESPD_ERR_INFEASIBLE_DESIGN:
    case ESPD_ERR_INFEASIBLE_PROBLEM:
    case ESPD_ERR_STUCK_INFEASIBLE:
    case ESPD_ERR_CANNOT_ROUND: return kExitInfeasible;
    case ESPD_ERR_NUMERIC: return kExitNumeric;
    case ESPD_ERR_INTERNAL: return kExitFailed;
  }
  return kExitFailed;
}

struct DatasetDeleter {
  void operator()(espd_dataset* d) const { espd_dataset_free(d); }
};
struct ResultDeleter {
  void operator()(espd_result* r) const { espd_result_free(r); }
};
using DatasetPtr = std::unique_ptr<espd_dataset, DatasetDeleter>;
using ResultPtr = std::unique_ptr<espd_result, ResultDeleter>;

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string join_indices(const std::vector<size_t>& v, char sep) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += sep;
    out += std::to_string(v[i]);
  }
  return out;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CliError(ESPD_ERR_IO, "cannot write '" + path + "'");
  return out;
}

// Data source: --in CSV or synthetic generator flags.
struct DataFlags {
  std::string in;
  std::string response;
  bool normalize = false;
  std::string kind = "sparse";
  size_t n = 300;
  size_t m = 20;
  double density = 0.6;
  double alpha = 1.0;
  std::optional<uint64_t> data_seed;
};

void add_generator_flags(CLI::App* cmd, DataFlags& f) {
  cmd->add_option("--kind", f.kind, "Synthetic generator: sparse (sparse precision) or skewed")
      ->check(CLI::IsMember({"sparse", "skewed"}))
      ->capture_default_str();
  cmd->add_option("--n", f.n, "Candidate experiments (rows)")->capture_default_str();
  cmd->add_option("--m", f.m, "Features (columns)")->capture_default_str();
  cmd->add_option("--density", f.density, "Off-diagonal precision density, sparse only")->capture_default_str();
  cmd->add_option("--alpha", f.alpha, "Covariance decay exponent, skewed only")->capture_default_str();
}

void add_data_flags(CLI::App* cmd, DataFlags& f) {
  add_generator_flags(cmd, f);
  cmd->add_option("--data-seed", f.data_seed, "Generator seed (defaults to --seed)");
  auto* in = cmd->add_option("--in", f.in, "Input CSV with a header row");
  cmd->add_option("--response", f.response, "Response column of --in: header name or 0-based index")->needs(in);
  cmd->add_flag("--normalize", f.normalize, "Scale each feature column of --in to unit norm")->needs(in);
}

DatasetPtr load_data(const DataFlags& f, uint64_t seed) {
  espd_dataset* raw = nullptr;
  if (!f.in.empty()) {
    check(espd_dataset_load_csv(f.in.c_str(), f.response.empty() ? nullptr : f.response.c_str(), f.normalize ? 1 : 0,
                                &raw),
          "load '" + f.in + "'");
  } else {
    espd_synthetic_spec spec{};
    spec.kind = f.kind == "sparse" ? ESPD_SYNTHETIC_SPARSE_PRECISION : ESPD_SYNTHETIC_SKEWED_COVARIANCE;
    spec.n = f.n;
    spec.m = f.m;
    spec.density = f.density;
    spec.alpha = f.alpha;
    spec.seed = f.data_seed.value_or(seed);
    check(espd_dataset_generate(&spec, &raw), "generate");
  }
  return DatasetPtr(raw);
}

struct SolveFlags {
  int l = 1;
  std::vector<int> ks;
  std::vector<std::string> methods;
  uint64_t seed = 0;
  espd_solver_config cfg{};
};

void add_solve_flags(CLI::App* cmd, SolveFlags& f, const char* k_help) {
  espd_solver_config_default(&f.cfg);
  cmd->add_option("--l", f.l, "ESP order l, 1 <= l <= m")->required();
  cmd->add_option("--k", f.ks, k_help)->required();
  cmd->add_option("--method", f.methods, "unif, unif-fdv, greedy, greedy-fdv, sample or relax (repeatable)");
  cmd->add_option("--seed", f.seed, "Seed for every random choice")->capture_default_str();
  cmd->add_option("--max-iters", f.cfg.max_iters, "Relaxation iteration cap")->capture_default_str();
  cmd->add_option("--step-init", f.cfg.step_init, "Initial line-search step")->capture_default_str();
  cmd->add_option("--tol-obj", f.cfg.tol_obj, "Stop when the objective changes less than this")->capture_default_str();
  cmd->add_option("--tol-grad", f.cfg.tol_grad, "Stop when the projected gradient is smaller")->capture_default_str();
  cmd->add_option("--max-sweeps", f.cfg.max_sweeps, "Fedorov exchange swap cap")->capture_default_str();
}

std::vector<espd_method> parse_methods(const std::vector<std::string>& names, std::vector<espd_method> fallback) {
  if (names.empty()) return fallback;
  std::vector<espd_method> out;
  for (const auto& name : names) {
    espd_method m;
    check(espd_method_parse(name.c_str(), &m), "--method");
    out.push_back(m);
  }
  return out;
}

struct RunRecord {
  std::string method;
  int l = 0;
  int k = 0;
  size_t n = 0;
  size_t m = 0;
  double objective = 0.0;
  double wall_time_s = 0.0;
  std::vector<size_t> subset;
  uint64_t seed = 0;
  std::optional<size_t> support;
  std::optional<double> weight_sum;
  std::optional<int> iterations;
  std::optional<bool> converged;
  std::optional<uint64_t> draws;
  std::optional<double> predictive_error;
  std::optional<double> sparsity;
};

json to_json(const RunRecord& r) {
  json j{{"method", r.method}, {"l", r.l},           {"k", r.k},
         {"n", r.n},           {"m", r.m},           {"objective", r.objective},
         {"wall_time_s", r.wall_time_s},             {"seed", r.seed},
         {"subset_size", r.subset.size()},           {"subset", r.subset}};
  if (r.support) j["support"] = *r.support;
  if (r.weight_sum) j["weight_sum"] = *r.weight_sum;
  if (r.iterations) j["iterations"] = *r.iterations;
  if (r.converged) j["converged"] = *r.converged;
  if (r.draws) j["draws"] = *r.draws;
  if (r.predictive_error) j["predictive_error"] = *r.predictive_error;
  if (r.sparsity) j["sparsity_fraction"] = *r.sparsity;
  return j;
}

RunRecord run_one(const espd_dataset* data, espd_method method, int k, const SolveFlags& f) {
  RunRecord rec;
  rec.method = espd_method_name(method);
  rec.l = f.l;
  rec.k = k;
  rec.seed = f.seed;
  int has_response = 0;
  check(espd_dataset_shape(data, &rec.n, &rec.m, &has_response), "shape");

  espd_result* raw = nullptr;
  const auto start = std::chrono::steady_clock::now();
  check(espd_solve(data, method, k, f.l, f.seed, &f.cfg, &raw), rec.method);
  rec.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  ResultPtr result(raw);

  check(espd_result_objective(result.get(), &rec.objective), "objective");
  size_t count = 0;
  check(espd_result_subset(result.get(), nullptr, 0, &count), "subset");
  rec.subset.resize(count);
  check(espd_result_subset(result.get(), rec.subset.data(), count, &count), "subset");

  if (method == ESPD_METHOD_GREEDY || method == ESPD_METHOD_GREEDY_FDV || method == ESPD_METHOD_SAMPLE ||
      method == ESPD_METHOD_RELAX) {
    size_t support = 0;
    double mass = 0.0;
    int iterations = 0;
    int converged = 0;
    check(espd_result_relaxation(result.get(), &support, &mass, &iterations, &converged), "relaxation");
    rec.support = support;
    rec.weight_sum = mass;
    rec.iterations = iterations;
    rec.converged = converged != 0;
  }
  if (method == ESPD_METHOD_SAMPLE) {
    uint64_t draws = 0;
    check(espd_result_draws(result.get(), &draws), "draws");
    rec.draws = draws;
  }
  if (method != ESPD_METHOD_RELAX && !rec.subset.empty()) {
    double sparsity = 0.0;
    check(espd_sparsity_fraction(data, rec.subset.data(), rec.subset.size(), &sparsity), "sparsity");
    rec.sparsity = sparsity;
    if (has_response) {
      double err = 0.0;
      check(espd_predictive_error(data, rec.subset.data(), rec.subset.size(), &err), "predictive error");
      rec.predictive_error = err;
    }
  }
  return rec;
}

void emit(const RunRecord& r) { std::cout << to_json(r).dump() << '\n' << std::flush; }

// datagen

struct DatagenFlags {
  DataFlags data;
  uint64_t seed = 0;
  std::string out;
};

int cmd_datagen(const DatagenFlags& f) {
  const DatasetPtr data = load_data(f.data, f.seed);
  check(espd_dataset_write_csv(data.get(), f.out.c_str()), "write");
  size_t n = 0, m = 0;
  check(espd_dataset_shape(data.get(), &n, &m, nullptr), "shape");
  std::cout << json{{"out", f.out}, {"n", n}, {"m", m}, {"kind", f.data.kind}, {"seed", f.data.data_seed.value_or(f.seed)}}
                   .dump()
            << '\n';
  return kExitOk;
}

// solve

struct SolveCommand {
  DataFlags data;
  SolveFlags solve;
  std::string out;
};

const char* kRunCsvHeader = "method,l,k,n,m,objective,wall_time_s,seed,subset_size,subset\n";

std::string run_csv_row(const RunRecord& r) {
  return r.method + ',' + std::to_string(r.l) + ',' + std::to_string(r.k) + ',' + std::to_string(r.n) + ',' +
         std::to_string(r.m) + ',' + format_double(r.objective) + ',' + format_double(r.wall_time_s) + ',' +
         std::to_string(r.seed) + ',' + std::to_string(r.subset.size()) + ',' + join_indices(r.subset, ' ') + '\n';
}

int cmd_solve(const SolveCommand& c) {
  const DatasetPtr data = load_data(c.data, c.solve.seed);
  const auto methods = parse_methods(c.solve.methods, {ESPD_METHOD_GREEDY});
  std::optional<std::ofstream> csv;
  if (!c.out.empty()) {
    csv = open_output(c.out);
    *csv << kRunCsvHeader;
  }
  for (int k : c.solve.ks) {
    for (espd_method method : methods) {
      const RunRecord rec = run_one(data.get(), method, k, c.solve);
      emit(rec);
      if (csv) *csv << run_csv_row(rec);
    }
  }
  return kExitOk;
}

// compare

struct CompareCommand {
  DataFlags data;
  SolveFlags solve;
  std::string out_dir;
};

int cmd_compare(const CompareCommand& c) {
  const DatasetPtr data = load_data(c.data, c.solve.seed);
  const auto methods =
      parse_methods(c.solve.methods, {ESPD_METHOD_UNIF, ESPD_METHOD_UNIF_FDV, ESPD_METHOD_GREEDY,
                                      ESPD_METHOD_GREEDY_FDV, ESPD_METHOD_SAMPLE, ESPD_METHOD_RELAX});
  std::filesystem::create_directories(c.out_dir);
  const std::filesystem::path dir(c.out_dir);
  auto curves = open_output((dir / "curves.csv").string());
  auto intersections = open_output((dir / "intersections.csv").string());
  auto support = open_output((dir / "support.csv").string());
  auto runtimes = open_output((dir / "runtimes.csv").string());
  curves << "method,k,l,objective\n";
  intersections << "k,l,method_a,method_b,common\n";
  support << "k,l,m,support,weight_sum,support_bound\n";
  runtimes << "method,k,l,wall_time_s\n";

  for (int k : c.solve.ks) {
    std::vector<RunRecord> runs;
    for (espd_method method : methods) {
      runs.push_back(run_one(data.get(), method, k, c.solve));
      emit(runs.back());
      const RunRecord& r = runs.back();
      curves << r.method << ',' << k << ',' << r.l << ',' << format_double(r.objective) << '\n';
      runtimes << r.method << ',' << k << ',' << r.l << ',' << format_double(r.wall_time_s) << '\n';
    }
    for (const RunRecord& r : runs) {
      if (!r.support) continue;
      support << k << ',' << r.l << ',' << r.m << ',' << *r.support << ',' << format_double(*r.weight_sum) << ','
              << k + r.m * (r.m + 1) / 2 << '\n';
      break;
    }
    for (size_t a = 0; a < runs.size(); ++a) {
      if (runs[a].method == "RELAX") continue;
      for (size_t b = a; b < runs.size(); ++b) {
        if (runs[b].method == "RELAX") continue;
        size_t common = 0;
        for (size_t i : runs[a].subset) {
          common += std::binary_search(runs[b].subset.begin(), runs[b].subset.end(), i) ? 1 : 0;
        }
        intersections << k << ',' << runs[a].l << ',' << runs[a].method << ',' << runs[b].method << ',' << common
                      << '\n';
      }
    }
  }
  return kExitOk;
}

// verify

struct VerifyCommand {
  std::string only;
  std::string inject_fault;
  uint64_t seed = ESPD_VERIFY_DEFAULT_SEED;
  bool as_json = false;
};

struct VerifyTally {
  bool as_json = false;
  int passed = 0;
  int failed = 0;
};

void print_property(const espd_property_report* r, void* user) {
  auto* tally = static_cast<VerifyTally*>(user);
  (r->passed ? tally->passed : tally->failed)++;
  const std::string name = std::string(r->group) + "." + r->name;
  if (tally->as_json) {
    std::cout << json{{"property", name},         {"passed", r->passed != 0}, {"residual", r->residual},
                      {"tolerance", r->tolerance}, {"samples", r->samples}}
                     .dump()
              << '\n';
  } else {
    char line[256];
    std::snprintf(line, sizeof(line), "%s  %-40s residual=%.3e  tol=%.1e  samples=%d\n", r->passed ? "PASS" : "FAIL",
                  name.c_str(), r->residual, r->tolerance, r->samples);
    std::cout << line;
  }
  std::cout << std::flush;
}

int cmd_verify(const VerifyCommand& c) {
  VerifyTally tally;
  tally.as_json = c.as_json;
  int all = 0;
  check(espd_verify_run(c.only.empty() ? nullptr : c.only.c_str(),
                        c.inject_fault.empty() ? nullptr : c.inject_fault.c_str(), c.seed, print_property, &tally,
                        &all),
        "verify");
  if (!c.as_json) std::cout << tally.passed << " passed, " << tally.failed << " failed\n";
  return all ? kExitOk : kExitFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Experiment selection with elementary symmetric polynomial objectives"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "espdesign 1.0.0");

  DatagenFlags datagen;
  auto* gen_cmd = app.add_subcommand("datagen", "Write a synthetic dataset to CSV");
  add_generator_flags(gen_cmd, datagen.data);
  gen_cmd->add_option("--seed", datagen.seed, "Generator seed")->capture_default_str();
  gen_cmd->add_option("--out", datagen.out, "Output CSV path")->required();

  SolveCommand solve;
  auto* solve_cmd = app.add_subcommand("solve", "Select k experiments with one or more methods");
  add_data_flags(solve_cmd, solve.data);
  add_solve_flags(solve_cmd, solve.solve, "Budget (repeatable)");
  solve_cmd->add_option("--out", solve.out, "Also write the runs as CSV");

  CompareCommand compare;
  auto* compare_cmd = app.add_subcommand("compare", "Run several methods over several budgets and write tables");
  add_data_flags(compare_cmd, compare.data);
  add_solve_flags(compare_cmd, compare.solve, "Budgets (repeatable)");
  compare_cmd->add_option("--out-dir", compare.out_dir, "Directory for the CSV tables")->required();

  VerifyCommand verify;
  auto* verify_cmd = app.add_subcommand("verify", "Run the oracle and property checks");
  verify_cmd->add_option("--only", verify.only, "Run one group: esp, objective, relax, discretize, oracles, dual, data");
  verify_cmd->add_option("--inject-fault", verify.inject_fault, "Perturb the named property (group.name) so it fails");
  verify_cmd->add_option("--seed", verify.seed, "Seed for the random instances")->capture_default_str();
  verify_cmd->add_flag("--json", verify.as_json, "Print JSON lines instead of a table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen_cmd) return cmd_datagen(datagen);
    if (*solve_cmd) return cmd_solve(solve);
    if (*compare_cmd) return cmd_compare(compare);
    if (*verify_cmd) return cmd_verify(verify);
  } catch (const CliError& e) {
    std::cerr << "espdesign: " << espd_status_name(e.status()) << ": " << e.what() << '\n';
    return exit_code(e.status());
  } catch (const std::exception& e) {
    std::cerr << "espdesign: " << e.what() << '\n';
    return kExitFailed;
  }
  return kExitUsage;
}
