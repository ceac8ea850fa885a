#include <algorithm>
#include <utility>

#include <gmpxx.h>

#include "combmat/error.hpp"
#include "combmat/linalg.hpp"

namespace combmat {

namespace {

using u64 = std::uint64_t;
__extension__ typedef unsigned __int128 u128;

u64 mul_mod(u64 a, u64 b, u64 m) { return static_cast<u64>(static_cast<u128>(a) * b % m); }

u64 pow_mod(u64 base, u64 exp, u64 m) {
  u64 result = 1 % m;
  base %= m;
  while (exp) {
    if (exp & 1) result = mul_mod(result, base, m);
    base = mul_mod(base, base, m);
    exp >>= 1;
  }
  return result;
}

u64 reduce(std::int64_t x, u64 p) {
  const auto r = x % static_cast<std::int64_t>(p);
  return static_cast<u64>(r < 0 ? r + static_cast<std::int64_t>(p) : r);
}

std::vector<u64> pick_primes() {
  RngStream rng(0x0DDC0FFEEULL, {"rank-primes"});
  std::vector<u64> primes;
  while (primes.size() < 2) {
    u64 candidate = (rng() >> 2) | (u64{1} << 61) | 1;  // 62-bit odd
    while (!is_prime_u64(candidate)) candidate += 2;
    if (std::find(primes.begin(), primes.end(), candidate) == primes.end()) primes.push_back(candidate);
  }
  return primes;
}

}  // namespace

bool is_prime_u64(u64 n) {
  if (n < 2) return false;
  for (u64 p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n % p == 0) return n == p;
  }
  u64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (u64 a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    u64 x = pow_mod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mul_mod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

const std::vector<u64>& rank_primes() {
  static const std::vector<u64> primes = pick_primes();
  return primes;
}

int modular_rank(const IntMatrix& a, u64 p) {
  const auto m = static_cast<std::size_t>(a.rows());
  const auto n = static_cast<std::size_t>(a.cols());
  std::vector<u64> w(m * n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j)
      w[i * n + j] = reduce(a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)), p);

  std::size_t rank = 0;
  for (std::size_t col = 0; col < n && rank < m; ++col) {
    std::size_t pivot = rank;
    while (pivot < m && w[pivot * n + col] == 0) ++pivot;
    if (pivot == m) continue;
    if (pivot != rank)
      for (std::size_t j = col; j < n; ++j) std::swap(w[pivot * n + j], w[rank * n + j]);
    const u64 inv = pow_mod(w[rank * n + col], p - 2, p);
    for (std::size_t i = rank + 1; i < m; ++i) {
      const u64 factor = mul_mod(w[i * n + col], inv, p);
      if (factor == 0) continue;
      for (std::size_t j = col; j < n; ++j) {
        const u64 sub = mul_mod(factor, w[rank * n + j], p);
        w[i * n + j] = w[i * n + j] >= sub ? w[i * n + j] - sub : w[i * n + j] + p - sub;
      }
    }
    ++rank;
  }
  return static_cast<int>(rank);
}

int bareiss_rank(const IntMatrix& a) {
  const auto m = static_cast<std::size_t>(a.rows());
  const auto n = static_cast<std::size_t>(a.cols());
  std::vector<mpz_class> w(m * n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j)
      w[i * n + j] = static_cast<long>(a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));

  mpz_class previous = 1;
  std::size_t rank = 0;
  mpz_class t1, t2;
  // Pivot on the first nonzero in column order; an all-zero column is skipped
  // and elimination continues on the remaining columns.
  for (std::size_t col = 0; col < n && rank < m; ++col) {
    std::size_t pivot = rank;
    while (pivot < m && w[pivot * n + col] == 0) ++pivot;
    if (pivot == m) continue;
    if (pivot != rank)
      for (std::size_t j = 0; j < n; ++j) std::swap(w[pivot * n + j], w[rank * n + j]);
    const mpz_class& piv = w[rank * n + col];
    for (std::size_t i = rank + 1; i < m; ++i) {
      for (std::size_t j = col + 1; j < n; ++j) {
        t1 = piv * w[i * n + j];
        t2 = w[i * n + col] * w[rank * n + j];
        t1 -= t2;
        mpz_divexact(w[i * n + j].get_mpz_t(), t1.get_mpz_t(), previous.get_mpz_t());
      }
      w[i * n + col] = 0;
    }
    previous = piv;
    ++rank;
  }
  return static_cast<int>(rank);
}

int exact_rank(const IntMatrix& a) {
  if (a.size() == 0) return 0;
  const int full = static_cast<int>(std::min(a.rows(), a.cols()));
  const auto& primes = rank_primes();
  const int r0 = modular_rank(a, primes[0]);
  const int r1 = modular_rank(a, primes[1]);
  // Rank mod p never exceeds the rational rank, so agreement at full rank is
  // conclusive.
  if (r0 == full && r1 == full) return full;
  return bareiss_rank(a);
}

}  // namespace combmat
