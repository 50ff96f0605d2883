#include "data.hpp"

#include "error.hpp"
#include "rng.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

namespace espd {

namespace {

std::vector<std::string> default_names(std::size_t m) {
  std::vector<std::string> names;
  for (std::size_t j = 0; j < m; ++j) names.push_back("x" + std::to_string(j + 1));
  return names;
}

Dataset make_dataset(Matrix X) {
  const auto m = static_cast<std::size_t>(X.cols());
  ColumnStats stats;
  stats.scales.assign(m, 1.0);
  return Dataset{DesignMatrix(std::move(X)), std::nullopt, default_names(m), "", std::move(stats)};
}

// Splits CSV text into records of fields; tracks quoting per RFC 4180.
std::vector<std::vector<std::string>> split_records(const std::string& text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      field_started = true;
    } else if (c == ',') {
      record.push_back(field);
      field.clear();
      field_started = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (field_started || !field.empty() || !record.empty()) {
        record.push_back(field);
        records.push_back(std::move(record));
      }
      record.clear();
      field.clear();
      field_started = false;
    } else {
      field += c;
      field_started = true;
    }
  }
  if (quoted) throw ParseError(records.size(), "", "unterminated quoted field");
  if (field_started || !field.empty() || !record.empty()) {
    record.push_back(field);
    records.push_back(std::move(record));
  }
  return records;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string quote_name(const std::string& name) {
  if (name.find_first_of(",\"\r\n") == std::string::npos && trim(name) == name) return name;
  std::string out = "\"";
  for (char c : name) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

}  // namespace

void SyntheticSpec::validate() const {
  if (m < 1 || n < m) fail(ErrorCode::kInput, "synthetic spec needs n >= m >= 1");
  if (kind == SyntheticKind::kSparsePrecision && !(density > 0.0 && density <= 1.0)) {
    fail(ErrorCode::kInput, "density must lie in (0, 1]");
  }
  if (kind == SyntheticKind::kSkewedCovariance && !(alpha >= 0.0 && std::isfinite(alpha))) {
    fail(ErrorCode::kInput, "alpha must be finite and >= 0");
  }
}

Matrix sparse_precision_matrix(const SyntheticSpec& spec) {
  spec.validate();
  Rng rng(derive_seed(spec.seed, 0));
  const auto m = static_cast<Eigen::Index>(spec.m);
  Matrix P = Matrix::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i + 1; j < m; ++j) {
      if (rng.bernoulli(spec.density)) P(i, j) = P(j, i) = rng.uniform(-1.0, 1.0);
    }
  }
  for (Eigen::Index i = 0; i < m; ++i) P(i, i) = P.row(i).cwiseAbs().sum() + 1.0;
  return P;
}

Dataset gen_sparse_precision(const SyntheticSpec& spec) {
  if (spec.kind != SyntheticKind::kSparsePrecision) fail(ErrorCode::kInput, "spec kind is not sparse precision");
  const Matrix P = sparse_precision_matrix(spec);
  // P = L L^T; x = L^{-T} xi has covariance P^{-1}.
  const Eigen::LLT<Matrix> llt(P);
  const auto n = static_cast<Eigen::Index>(spec.n);
  const auto m = static_cast<Eigen::Index>(spec.m);
  Rng rng(derive_seed(spec.seed, 1));
  Matrix xi(m, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index j = 0; j < m; ++j) xi(j, r) = rng.normal();
  }
  const Matrix samples = llt.matrixU().solve(xi);
  return make_dataset(samples.transpose());
}

Dataset gen_skewed(const SyntheticSpec& spec) {
  if (spec.kind != SyntheticKind::kSkewedCovariance) fail(ErrorCode::kInput, "spec kind is not skewed covariance");
  spec.validate();
  const auto n = static_cast<Eigen::Index>(spec.n);
  const auto m = static_cast<Eigen::Index>(spec.m);
  Rng rng(derive_seed(spec.seed, 1));
  Matrix X(n, m);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index j = 0; j < m; ++j) {
      X(r, j) = std::pow(static_cast<double>(j + 1), -0.5 * spec.alpha) * rng.normal();
    }
  }
  return make_dataset(std::move(X));
}

Dataset generate(const SyntheticSpec& spec) {
  return spec.kind == SyntheticKind::kSparsePrecision ? gen_sparse_precision(spec) : gen_skewed(spec);
}

Dataset parse_csv(const std::string& text, const std::optional<std::string>& response_column, bool normalize) {
  const auto records = split_records(text);
  if (records.empty()) throw ParseError(0, "", "missing header row");
  std::vector<std::string> header;
  for (const auto& h : records[0]) header.push_back(trim(h));
  const std::size_t width = header.size();

  std::optional<std::size_t> response;
  if (response_column) {
    for (std::size_t j = 0; j < width; ++j) {
      if (header[j] == *response_column) response = j;
    }
    if (!response) {
      std::size_t idx = 0;
      const auto& s = *response_column;
      const auto res = std::from_chars(s.data(), s.data() + s.size(), idx);
      if (res.ec != std::errc() || res.ptr != s.data() + s.size() || idx >= width) {
        throw ParseError(0, s, "response column '" + s + "' not found in header");
      }
      response = idx;
    }
  }
  const std::size_t m = width - (response ? 1 : 0);
  if (m == 0) throw ParseError(0, "", "no feature columns");

  const std::size_t n = records.size() - 1;
  Matrix X(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
  Vector y(static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < n; ++r) {
    const auto& rec = records[r + 1];
    const std::size_t row = r + 1;
    if (rec.size() != width) {
      const std::string col = rec.size() < width ? header[rec.size()] : std::to_string(rec.size());
      throw ParseError(row, col, "row " + std::to_string(row) + ": expected " + std::to_string(width) +
                                     " fields, got " + std::to_string(rec.size()));
    }
    std::size_t feature = 0;
    for (std::size_t j = 0; j < width; ++j) {
      const std::string cell = trim(rec[j]);
      if (cell.empty()) {
        throw ParseError(row, header[j], "row " + std::to_string(row) + ", column '" + header[j] + "': missing value");
      }
      double value = 0.0;
      const char* begin = cell.data();
      const char* end = begin + cell.size();
      if (*begin == '+') ++begin;
      const auto res = std::from_chars(begin, end, value);
      if (res.ec != std::errc() || res.ptr != end || !std::isfinite(value)) {
        throw ParseError(row, header[j], "row " + std::to_string(row) + ", column '" + header[j] +
                                             "': not a number: '" + cell + "'");
      }
      if (response && j == *response) {
        y(static_cast<Eigen::Index>(r)) = value;
      } else {
        X(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(feature++)) = value;
      }
    }
  }
  if (n < m + 1) {
    throw ParseError(n, "", "need at least m+1 = " + std::to_string(m + 1) + " data rows, got " + std::to_string(n));
  }

  ColumnStats stats;
  stats.scales.assign(m, 1.0);
  if (normalize) {
    stats.normalized = true;
    for (std::size_t j = 0; j < m; ++j) {
      const double norm = X.col(static_cast<Eigen::Index>(j)).norm();
      if (norm > 0.0) {
        X.col(static_cast<Eigen::Index>(j)) /= norm;
        stats.scales[j] = norm;
      }
    }
  }

  std::vector<std::string> names;
  for (std::size_t j = 0; j < width; ++j) {
    if (!response || j != *response) names.push_back(header[j]);
  }
  Dataset data{DesignMatrix(std::move(X)), std::nullopt, std::move(names), "", std::move(stats)};
  if (response) {
    data.y = std::move(y);
    data.response_name = header[*response];
  }
  return data;
}

Dataset load_csv(const std::string& path, const std::optional<std::string>& response_column, bool normalize) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_csv(buffer.str(), response_column, normalize);
}

std::string to_csv(const Dataset& data) {
  std::string out;
  const auto& names = data.feature_names;
  for (std::size_t j = 0; j < names.size(); ++j) {
    if (j) out += ',';
    out += quote_name(names[j]);
  }
  if (data.y) out += ',' + quote_name(data.response_name.empty() ? std::string("y") : data.response_name);
  out += '\n';
  const Matrix& X = data.X.rows();
  for (Eigen::Index r = 0; r < X.rows(); ++r) {
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
      if (j) out += ',';
      out += format_double(X(r, j));
    }
    if (data.y) out += ',' + format_double((*data.y)(r));
    out += '\n';
  }
  return out;
}

void write_csv(const Dataset& data, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIo, "cannot write '" + path + "'");
  out << to_csv(data);
  if (!out) fail(ErrorCode::kIo, "write to '" + path + "' failed");
}

Matrix denormalized(const Dataset& data) {
  Matrix raw = data.X.rows();
  for (Eigen::Index j = 0; j < raw.cols(); ++j) raw.col(j) *= data.column_stats.scales[static_cast<std::size_t>(j)];
  return raw;
}

double predictive_error(const Matrix& X, const Vector& y, const Subset& S) {
  if (y.size() != X.rows()) fail(ErrorCode::kInput, "predictive_error: y length must equal n");
  S.require_within(static_cast<std::size_t>(X.rows()));
  if (S.size() < static_cast<std::size_t>(X.cols())) fail(ErrorCode::kInfeasibleDesign, "predictive_error: |S| < m");

  const auto k = static_cast<Eigen::Index>(S.size());
  Matrix XS(k, X.cols());
  Vector yS(k);
  for (Eigen::Index r = 0; r < k; ++r) {
    XS.row(r) = X.row(static_cast<Eigen::Index>(S.indices()[r]));
    yS(r) = y(static_cast<Eigen::Index>(S.indices()[r]));
  }
  const Eigen::ColPivHouseholderQR<Matrix> qr(XS);
  if (qr.rank() < X.cols()) fail(ErrorCode::kInfeasibleDesign, "predictive_error: X_S is rank deficient");
  const Vector theta = qr.solve(yS);

  double residual_sq = 0.0;
  double target_sq = 0.0;
  const bool in_sample = S.size() == static_cast<std::size_t>(X.rows());
  for (Eigen::Index r = 0; r < X.rows(); ++r) {
    if (!in_sample && S.contains(static_cast<std::size_t>(r))) continue;
    const double diff = X.row(r).dot(theta) - y(r);
    residual_sq += diff * diff;
    target_sq += y(r) * y(r);
  }
  if (!(target_sq > 0.0)) fail(ErrorCode::kDomain, "predictive_error: holdout responses are all zero");
  return std::sqrt(residual_sq / target_sq);
}

double sparsity_fraction(const Matrix& X, const Subset& S) {
  S.require_within(static_cast<std::size_t>(X.rows()));
  if (S.size() == 0 || X.cols() == 0) fail(ErrorCode::kInput, "sparsity_fraction: empty design");
  std::size_t nonzero = 0;
  for (std::size_t i : S.indices()) {
    nonzero += static_cast<std::size_t>((X.row(static_cast<Eigen::Index>(i)).array().abs() > 1e-12).count());
  }
  return static_cast<double>(nonzero) / static_cast<double>(S.size() * static_cast<std::size_t>(X.cols()));
}

}  // namespace espd
