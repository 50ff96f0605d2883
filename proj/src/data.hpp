#pragma once

#include "linalg.hpp"
#include "objective.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace espd {

enum class SyntheticKind { kSparsePrecision, kSkewedCovariance };

struct SyntheticSpec {
  SyntheticKind kind = SyntheticKind::kSparsePrecision;
  std::size_t n = 0;
  std::size_t m = 0;
  double density = 0.5;  // sparse precision only, in (0, 1]
  double alpha = 0.0;    // skewed covariance only, >= 0
  std::uint64_t seed = 0;

  void validate() const;
};

/// Per-column scale divided out by normalization (1 when not normalized).
struct ColumnStats {
  std::vector<double> scales;
  bool normalized = false;
};

struct Dataset {
  DesignMatrix X;
  std::optional<Vector> y;
  std::vector<std::string> feature_names;
  std::string response_name;
  ColumnStats column_stats;
};

/// Rows i.i.d. N(0, P^{-1}) for a random sparse precision P: symmetric
/// Bernoulli(density) off-diagonal mask with U(-1, 1) values, diagonal set to
/// the absolute off-diagonal row sum plus one.
Dataset gen_sparse_precision(const SyntheticSpec& spec);

/// The precision matrix gen_sparse_precision draws for the same spec.
Matrix sparse_precision_matrix(const SyntheticSpec& spec);

/// Rows i.i.d. N(0, Diag(1^-alpha, ..., m^-alpha)).
Dataset gen_skewed(const SyntheticSpec& spec);

/// Dispatches on spec.kind.
Dataset generate(const SyntheticSpec& spec);

/// Reads a header + numeric rows CSV (RFC 4180 quoting, '.' decimals).
/// response_column selects y by header name, or by 0-based index when no
/// header matches. With normalize, each feature column is divided by its
/// Euclidean norm. Throws ParseError (with data-row locus) on malformed
/// input, kIo if unreadable, kInput if the features are rank deficient.
Dataset load_csv(const std::string& path, const std::optional<std::string>& response_column, bool normalize);

/// Parses CSV text; same contract as load_csv.
Dataset parse_csv(const std::string& text, const std::optional<std::string>& response_column, bool normalize);

/// Features (and response, last) as CSV text with shortest round-trip
/// decimal formatting.
std::string to_csv(const Dataset& data);

/// Writes to_csv(data) to path; throws kIo on failure.
void write_csv(const Dataset& data, const std::string& path);

/// Raw feature values: X with the normalization scales multiplied back in.
Matrix denormalized(const Dataset& data);

/// ||X_H theta - y_H|| / ||y_H|| for theta fitted by least squares on rows S
/// and H = [n] \ S (H = S when S covers every row).
double predictive_error(const Matrix& X, const Vector& y, const Subset& S);

/// Fraction of entries of X_S with magnitude above 1e-12.
double sparsity_fraction(const Matrix& X, const Subset& S);

}  // namespace espd
