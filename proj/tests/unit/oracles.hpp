#pragma once

// Brute-force reference computations for the unit tests.  Nothing here
// calls into the library's sampling, enumeration, or elimination code.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

namespace oracle {

/// Every vector in {-1,0,1}^n with exactly d nonzeros, by filtering all 3^n.
inline std::vector<std::vector<int>> admissible_rows(int n, int d) {
  std::vector<std::vector<int>> out;
  long total = 1;
  for (int i = 0; i < n; ++i) total *= 3;
  for (long code = 0; code < total; ++code) {
    std::vector<int> row(static_cast<std::size_t>(n));
    long c = code;
    int weight = 0;
    for (int i = 0; i < n; ++i) {
      row[static_cast<std::size_t>(i)] = static_cast<int>(c % 3) - 1;
      c /= 3;
      weight += row[static_cast<std::size_t>(i)] != 0;
    }
    if (weight == d) out.push_back(row);
  }
  return out;
}

/// Integer determinant by cofactor expansion.
inline long long determinant(const std::vector<std::vector<long long>>& a) {
  const auto n = a.size();
  if (n == 1) return a[0][0];
  long long det = 0;
  for (std::size_t c = 0; c < n; ++c) {
    if (a[0][c] == 0) continue;
    std::vector<std::vector<long long>> minor;
    for (std::size_t r = 1; r < n; ++r) {
      std::vector<long long> row;
      for (std::size_t k = 0; k < n; ++k)
        if (k != c) row.push_back(a[r][k]);
      minor.push_back(row);
    }
    det += (c % 2 ? -1 : 1) * a[0][c] * determinant(minor);
  }
  return det;
}

/// Exact law of <xi, v> over the admissible rows, keyed by value rounded to
/// 1e-9 (counts, not probabilities).
inline std::map<long long, long> law_counts(const std::vector<double>& v, int d) {
  std::map<long long, long> counts;
  for (const auto& row : admissible_rows(static_cast<int>(v.size()), d)) {
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) s += row[i] * v[i];
    ++counts[std::llround(s * 1e9)];
  }
  return counts;
}

/// sup_lambda P(|W - lambda| <= eps) by trying every window whose left edge
/// is an atom, quadratic time.
inline double levy_bruteforce(const std::vector<std::pair<double, double>>& atoms, double eps) {
  double best = 0.0;
  for (const auto& [left, _] : atoms) {
    double mass = 0.0;
    for (const auto& [x, w] : atoms)
      if (x >= left - 1e-12 && x <= left + 2 * eps + 1e-12) mass += w;
    best = std::max(best, mass);
  }
  return best;
}

/// Euclidean distance from x to Z^N by checking floor and ceil per coordinate.
inline double lattice_distance(const std::vector<double>& x) {
  double s = 0.0;
  for (double xi : x) {
    const double a = xi - std::floor(xi);
    const double b = std::ceil(xi) - xi;
    const double m = std::min(a, b);
    s += m * m;
  }
  return std::sqrt(s);
}

}  // namespace oracle
