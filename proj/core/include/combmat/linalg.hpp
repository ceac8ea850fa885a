#pragma once

#include <cstdint>
#include <vector>

#include "combmat/ensemble.hpp"

namespace combmat {

struct SpectralSummary {
  std::vector<double> singular_values;  // descending
  double smallest = 0.0;                // s_min(m,n)
  double largest = 0.0;                 // s_1 = operator norm
  double hs_norm = 0.0;                 // Frobenius / Hilbert-Schmidt norm
};

/// Full singular spectrum by one-sided Jacobi rotations (Eigen::JacobiSVD).
/// Throws InvalidArgument on non-finite entries or an empty matrix.
SpectralSummary singular_values(const Matrix& a);
SpectralSummary singular_values(const SignedMatrix& a);

struct SvdFactors {
  Matrix u;
  Vector s;
  Matrix v;
};

/// Thin SVD with both factors; used for residual checks.
SvdFactors svd(const Matrix& a);

/// Euclidean distance from r to span(rows of basis_rows). Rank-deficient
/// bases are fine; the projection is applied twice (classical
/// re-orthogonalization).
double distance_to_span(const Vector& r, const Matrix& basis_rows);

/// Unit vector orthogonal to the (n-1)-dimensional row span of basis_rows,
/// with its first nonzero coordinate positive.  Throws CorankError when the
/// span dimension is below n-1.
Vector unit_normal(const Matrix& basis_rows);

/// Rank over Q, decided exactly.  Modular elimination over two 62-bit primes
/// screens for full rank; anything that looks deficient is confirmed by
/// fraction-free (Bareiss) elimination over arbitrary-precision integers.
int exact_rank(const IntMatrix& a);

/// Rank over GF(p) for a prime p < 2^63.
int modular_rank(const IntMatrix& a, std::uint64_t p);

/// Rank over Q by Bareiss elimination with GMP integers.
int bareiss_rank(const IntMatrix& a);

/// The two primes used by exact_rank's prescreen.
const std::vector<std::uint64_t>& rank_primes();

/// Deterministic Miller-Rabin for 64-bit integers.
bool is_prime_u64(std::uint64_t n);

/// True iff exact_rank(a) < n.  Requires a square matrix.
bool is_singular(const SignedMatrix& a);

}  // namespace combmat
