#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace espd {

/// Outcome of one named property; passes iff residual <= tolerance.
struct PropertyCheck {
  std::string group;
  std::string name;
  bool passed = false;
  double residual = 0.0;
  double tolerance = 0.0;
  int samples = 0;

  std::string qualified_name() const { return group + "." + name; }
};

struct VerifyOptions {
  /// Restrict to one group (esp, objective, relax, discretize, oracles, dual, data).
  std::optional<std::string> only;
  /// Qualified property name ("group.name") whose library-side value is
  /// shifted past its reference so that the property must fail.
  std::optional<std::string> inject_fault;
  std::uint64_t seed = 20240601;  // ESPD_VERIFY_DEFAULT_SEED
};

const std::vector<std::string>& verify_groups();

/// Every qualified property name, in run order.
std::vector<std::string> verify_property_names();

/// Runs the selected properties in order, reporting each through on_result
/// as it finishes. Throws kInput for an unknown group or fault name.
std::vector<PropertyCheck> run_verification(const VerifyOptions& options,
                                            const std::function<void(const PropertyCheck&)>& on_result = {});

}  // namespace espd
