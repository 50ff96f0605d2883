#include "error.hpp"

namespace espd {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInput: return "input-error";
    case ErrorCode::kDomain: return "domain-error";
    case ErrorCode::kInfeasibleDesign: return "infeasible-design";
    case ErrorCode::kInfeasibleProblem: return "infeasible-problem";
    case ErrorCode::kStuckInfeasible: return "stuck-infeasible";
    case ErrorCode::kCannotRound: return "cannot-round";
    case ErrorCode::kNumericFailure: return "numeric-failure";
    case ErrorCode::kBudgetExceeded: return "budget-exceeded";
    case ErrorCode::kParse: return "parse-error";
    case ErrorCode::kIo: return "io-error";
  }
  return "unknown";
}

}  // namespace espd
