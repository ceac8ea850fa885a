#include "combmat/linalg.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "combmat/error.hpp"

namespace combmat {

namespace {

constexpr double kRankTolerance = 1e-10;

void require_finite(const Matrix& a) {
  if (a.size() == 0) throw InvalidArgument("empty matrix");
  if (!a.allFinite()) throw InvalidArgument("matrix has non-finite entries");
}

}  // namespace

SpectralSummary singular_values(const Matrix& a) {
  require_finite(a);
  Eigen::JacobiSVD<Matrix, Eigen::ColPivHouseholderQRPreconditioner> solver(a);
  const Vector& s = solver.singularValues();
  SpectralSummary out;
  out.singular_values.assign(s.data(), s.data() + s.size());
  std::sort(out.singular_values.begin(), out.singular_values.end(), std::greater<>());
  out.largest = out.singular_values.front();
  out.smallest = out.singular_values.back();
  out.hs_norm = a.norm();
  return out;
}

SpectralSummary singular_values(const SignedMatrix& a) { return singular_values(a.to_real()); }

SvdFactors svd(const Matrix& a) {
  require_finite(a);
  Eigen::JacobiSVD<Matrix, Eigen::ColPivHouseholderQRPreconditioner> solver(
      a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {solver.matrixU(), solver.singularValues(), solver.matrixV()};
}

double distance_to_span(const Vector& r, const Matrix& basis_rows) {
  if (basis_rows.cols() != r.size()) throw InvalidArgument("distance_to_span: dimension mismatch");
  if (basis_rows.rows() == 0) return r.norm();
  Eigen::ColPivHouseholderQR<Matrix> qr(basis_rows.transpose());
  qr.setThreshold(kRankTolerance);
  const auto rank = qr.rank();
  if (rank == 0) return r.norm();
  const Matrix q = Matrix(qr.householderQ()).leftCols(rank);
  Vector residual = r - q * (q.transpose() * r);
  residual -= q * (q.transpose() * residual);
  return residual.norm();
}

Vector unit_normal(const Matrix& basis_rows) {
  const auto n = basis_rows.cols();
  if (n < 1) throw InvalidArgument("unit_normal: empty basis");
  if (basis_rows.rows() == 0) {
    if (n == 1) return Vector::Ones(1);
    throw CorankError(static_cast<int>(n));
  }
  Eigen::ColPivHouseholderQR<Matrix> qr(basis_rows.transpose());
  qr.setThreshold(kRankTolerance);
  const auto rank = qr.rank();
  if (rank < n - 1) throw CorankError(static_cast<int>(n - rank));
  if (rank > n - 1) throw InvalidArgument("unit_normal: rows span all of R^n");
  const Matrix q = qr.householderQ();
  Vector v = q.col(n - 1);
  const auto span = q.leftCols(n - 1);
  v -= span * (span.transpose() * v);
  v.normalize();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(v[i]) > 1e-12) {
      if (v[i] < 0) v = -v;
      break;
    }
  }
  return v;
}

bool is_singular(const SignedMatrix& a) {
  if (a.rows() != a.cols()) throw InvalidArgument("is_singular: matrix is not square");
  return exact_rank(a.to_integer()) < a.cols();
}

}  // namespace combmat
