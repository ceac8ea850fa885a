#include "combmat/ensemble.hpp"

#include <algorithm>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "combmat/error.hpp"

namespace combmat {

EnsembleParams EnsembleParams::balanced(int n) {
  if (n < 2 || n % 2 != 0) {
    throw InvalidArgument("balanced ensemble needs an even n >= 2, got " + std::to_string(n));
  }
  return EnsembleParams{n, n / 2};
}

void EnsembleParams::validate() const {
  if (n < 1) throw InvalidArgument("n must be positive, got " + std::to_string(n));
  if (d < 1 || d > n) {
    throw InvalidArgument("d must satisfy 1 <= d <= n, got n=" + std::to_string(n) +
                          " d=" + std::to_string(d));
  }
}

std::uint64_t EnsembleParams::row_count() const {
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  __extension__ typedef unsigned __int128 u128;
  u128 c = 1;
  for (int k = 1; k <= d; ++k) {
    c = c * static_cast<unsigned>(n - d + k) / static_cast<unsigned>(k);
    if (c > kMax) return kMax;
  }
  for (int k = 0; k < d; ++k) {
    c *= 2;
    if (c > kMax) return kMax;
  }
  return static_cast<std::uint64_t>(c);
}

Vector RowSample::to_vector() const {
  Vector v(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) v[static_cast<Eigen::Index>(i)] = values[i];
  return v;
}

RowSample make_row(const std::vector<std::int8_t>& values) {
  RowSample row;
  row.values = values;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const int x = values[i];
    if (x < -1 || x > 1) throw InvalidArgument("row entry outside {-1,0,1}");
    if (x != 0) {
      row.support.push_back(static_cast<int>(i));
      row.signs.push_back(static_cast<std::int8_t>(x));
    }
  }
  return row;
}

SignedMatrix::SignedMatrix(EnsembleParams params, std::vector<RowSample> rows)
    : params_(params), rows_(std::move(rows)) {
  params_.validate();
  for (const auto& r : rows_) {
    if (r.n() != params_.n || r.weight() != params_.d) {
      throw InvalidArgument("row does not match ensemble (n=" + std::to_string(params_.n) +
                            ", d=" + std::to_string(params_.d) + ")");
    }
  }
}

SignedMatrix SignedMatrix::from_entries(EnsembleParams params, const IntMatrix& entries) {
  if (entries.cols() != params.n) throw InvalidArgument("column count does not match n");
  std::vector<RowSample> rows;
  rows.reserve(static_cast<std::size_t>(entries.rows()));
  for (Eigen::Index i = 0; i < entries.rows(); ++i) {
    std::vector<std::int8_t> values(static_cast<std::size_t>(entries.cols()));
    for (Eigen::Index j = 0; j < entries.cols(); ++j) {
      const auto x = entries(i, j);
      if (x < -1 || x > 1) throw InvalidArgument("entry outside {-1,0,1}");
      values[static_cast<std::size_t>(j)] = static_cast<std::int8_t>(x);
    }
    rows.push_back(make_row(values));
  }
  return SignedMatrix(params, std::move(rows));
}

Matrix SignedMatrix::to_real() const {
  Matrix a(rows(), cols());
  for (int i = 0; i < rows(); ++i)
    for (int j = 0; j < cols(); ++j) a(i, j) = (*this)(i, j);
  return a;
}

IntMatrix SignedMatrix::to_integer() const {
  IntMatrix a(rows(), cols());
  for (int i = 0; i < rows(); ++i)
    for (int j = 0; j < cols(); ++j) a(i, j) = (*this)(i, j);
  return a;
}

SignedMatrix SignedMatrix::top_rows(int k) const {
  if (k < 0 || k > rows()) throw InvalidArgument("top_rows: k out of range");
  return SignedMatrix(params_, std::vector<RowSample>(rows_.begin(), rows_.begin() + k));
}

std::int64_t SignedMatrix::squared_hs_norm() const {
  std::int64_t total = 0;
  for (const auto& r : rows_)
    for (auto x : r.values) total += x * x;
  return total;
}

bool operator==(const SignedMatrix& a, const SignedMatrix& b) {
  if (!(a.params_ == b.params_) || a.rows() != b.rows()) return false;
  for (int i = 0; i < a.rows(); ++i)
    if (a.rows_[static_cast<std::size_t>(i)].values != b.rows_[static_cast<std::size_t>(i)].values) return false;
  return true;
}

RowSample sample_row(const EnsembleParams& params, RngStream& rng) {
  params.validate();
  const int n = params.n;
  const int d = params.d;
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  for (int k = 0; k < d; ++k) {
    const auto j = k + static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(n - k)));
    std::swap(perm[static_cast<std::size_t>(k)], perm[static_cast<std::size_t>(j)]);
  }
  RowSample row;
  row.support.assign(perm.begin(), perm.begin() + d);
  std::sort(row.support.begin(), row.support.end());
  row.values.assign(static_cast<std::size_t>(n), 0);
  row.signs.resize(static_cast<std::size_t>(d));
  for (int k = 0; k < d; ++k) {
    const auto s = static_cast<std::int8_t>(rng.rademacher());
    row.signs[static_cast<std::size_t>(k)] = s;
    row.values[static_cast<std::size_t>(row.support[static_cast<std::size_t>(k)])] = s;
  }
  return row;
}

SignedMatrix sample_matrix(const EnsembleParams& params, int m, const RngStream& rng) {
  if (m < 1) throw InvalidArgument("sample_matrix: m must be >= 1");
  std::vector<RowSample> rows;
  rows.reserve(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    auto stream = rng.child(i);
    rows.push_back(sample_row(params, stream));
  }
  return SignedMatrix(params, std::move(rows));
}

Matrix empirical_covariance(const EnsembleParams& params, long reps, const RngStream& rng) {
  if (reps < 1) throw InvalidArgument("empirical_covariance: reps must be >= 1");
  params.validate();
  Matrix acc = Matrix::Zero(params.n, params.n);
  for (long r = 0; r < reps; ++r) {
    auto stream = rng.child(r);
    const auto row = sample_row(params, stream);
    for (std::size_t a = 0; a < row.support.size(); ++a) {
      for (std::size_t b = 0; b < row.support.size(); ++b) {
        acc(row.support[a], row.support[b]) += row.signs[a] * row.signs[b];
      }
    }
  }
  return acc / static_cast<double>(reps);
}

std::vector<RowSample> all_rows(const EnsembleParams& params) {
  params.validate();
  const int n = params.n;
  const int d = params.d;
  std::vector<RowSample> out;
  std::vector<int> subset(static_cast<std::size_t>(d));
  std::iota(subset.begin(), subset.end(), 0);
  while (true) {
    for (std::uint32_t mask = 0; mask < (1u << d); ++mask) {
      RowSample row;
      row.values.assign(static_cast<std::size_t>(n), 0);
      row.support = subset;
      row.signs.resize(static_cast<std::size_t>(d));
      for (int k = 0; k < d; ++k) {
        const std::int8_t s = (mask >> k) & 1u ? -1 : 1;
        row.signs[static_cast<std::size_t>(k)] = s;
        row.values[static_cast<std::size_t>(subset[static_cast<std::size_t>(k)])] = s;
      }
      out.push_back(std::move(row));
    }
    int k = d - 1;
    while (k >= 0 && subset[static_cast<std::size_t>(k)] == n - d + k) --k;
    if (k < 0) break;
    ++subset[static_cast<std::size_t>(k)];
    for (int j = k + 1; j < d; ++j) subset[static_cast<std::size_t>(j)] = subset[static_cast<std::size_t>(j - 1)] + 1;
  }
  return out;
}

void write_matrix_csv(std::ostream& out, const SignedMatrix& m) {
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << m(i, j);
    }
    out << '\n';
  }
}

IntMatrix read_matrix_csv(std::istream& in) {
  std::vector<std::vector<std::int64_t>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<std::int64_t> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stoll(cell, &used));
      } catch (const std::exception&) {
        throw InvalidArgument("matrix CSV: not an integer: '" + cell + "'");
      }
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw InvalidArgument("matrix CSV: ragged rows");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InvalidArgument("matrix CSV: no rows");
  IntMatrix a(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return a;
}

}  // namespace combmat
