#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace espd {

enum class ErrorCode {
  kInput,
  kDomain,
  kInfeasibleDesign,
  kInfeasibleProblem,
  kStuckInfeasible,
  kCannotRound,
  kNumericFailure,
  kBudgetExceeded,
  kParse,
  kIo,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// CSV parse failure with a 1-based data-row locus (0 = header) and the
/// offending column name or index.
class ParseError : public Error {
 public:
  ParseError(std::size_t row, std::string column, const std::string& what)
      : Error(ErrorCode::kParse, what), row_(row), column_(std::move(column)) {}

  std::size_t row() const noexcept { return row_; }
  const std::string& column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::string column_;
};

/// Greedy removal reached a set from which no single removal is feasible.
class StuckInfeasibleError : public Error {
 public:
  StuckInfeasibleError(std::vector<std::size_t> partial, const std::string& what)
      : Error(ErrorCode::kStuckInfeasible, what), partial_(std::move(partial)) {}

  const std::vector<std::size_t>& partial() const noexcept { return partial_; }

 private:
  std::vector<std::size_t> partial_;
};

/// Fixed-point solve for a(H) did not reach tolerance.
class NumericFailure : public Error {
 public:
  NumericFailure(double residual, const std::string& what)
      : Error(ErrorCode::kNumericFailure, what), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace espd
