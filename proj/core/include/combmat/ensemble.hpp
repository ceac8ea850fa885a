#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "combmat/rng.hpp"

namespace combmat {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using IntMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

/// Law of the signed combinatorial ensemble: rows are uniform over
/// {-1,0,1}^n vectors with exactly d nonzero entries.
struct EnsembleParams {
  int n = 2;
  int d = 1;

  /// d = n/2, the default row weight; n must be even.
  static EnsembleParams balanced(int n);

  /// Throws InvalidArgument unless 1 <= d <= n.
  void validate() const;

  /// Number of admissible rows, C(n,d) * 2^d, saturating at UINT64_MAX.
  std::uint64_t row_count() const;

  friend bool operator==(const EnsembleParams&, const EnsembleParams&) = default;
};

struct RowSample {
  std::vector<std::int8_t> values;  // length n
  std::vector<int> support;         // ascending indices of the nonzeros
  std::vector<std::int8_t> signs;   // signs[k] is the value at support[k]

  int n() const { return static_cast<int>(values.size()); }
  int weight() const { return static_cast<int>(support.size()); }
  Vector to_vector() const;
};

/// m x n matrix over {-1,0,1}, every row of weight d.
class SignedMatrix {
 public:
  SignedMatrix() = default;
  SignedMatrix(EnsembleParams params, std::vector<RowSample> rows);

  /// Validates every row against params; throws InvalidArgument otherwise.
  static SignedMatrix from_entries(EnsembleParams params, const IntMatrix& entries);

  int rows() const { return static_cast<int>(rows_.size()); }
  int cols() const { return params_.n; }
  const EnsembleParams& params() const { return params_; }

  const RowSample& row(int i) const { return rows_[static_cast<std::size_t>(i)]; }
  const std::vector<RowSample>& row_samples() const { return rows_; }
  int operator()(int i, int j) const { return rows_[static_cast<std::size_t>(i)].values[static_cast<std::size_t>(j)]; }

  Matrix to_real() const;
  IntMatrix to_integer() const;

  /// The first k rows (e.g. k = n-1 for the hyperplane basis).
  SignedMatrix top_rows(int k) const;

  /// Sum of squared entries; always m*d.
  std::int64_t squared_hs_norm() const;

  friend bool operator==(const SignedMatrix&, const SignedMatrix&);

 private:
  EnsembleParams params_;
  std::vector<RowSample> rows_;
};

/// Build a row from a value vector; throws if an entry is outside {-1,0,1}.
RowSample make_row(const std::vector<std::int8_t>& values);

/// Uniform admissible row: partial Fisher-Yates for the support, then
/// independent Rademacher signs.
RowSample sample_row(const EnsembleParams& params, RngStream& rng);

/// m i.i.d. rows; row i is drawn from rng.child(i) so rows are independent
/// of one another's consumption.
SignedMatrix sample_matrix(const EnsembleParams& params, int m, const RngStream& rng);

/// (1/reps) * sum of R^T R over reps sampled rows.
Matrix empirical_covariance(const EnsembleParams& params, long reps, const RngStream& rng);

/// Every admissible row, in lexicographic support order then sign order.
std::vector<RowSample> all_rows(const EnsembleParams& params);

/// Row-major CSV of integers, one matrix row per line.
void write_matrix_csv(std::ostream& out, const SignedMatrix& m);
IntMatrix read_matrix_csv(std::istream& in);

}  // namespace combmat
