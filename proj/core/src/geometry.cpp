#include "combmat/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "combmat/error.hpp"

namespace combmat {

namespace {

void require_unit(const Vector& v) {
  if (v.size() == 0 || std::abs(v.norm() - 1.0) > 1e-9) {
    throw InvalidArgument("expected a unit vector");
  }
}

void require_taxonomy(TaxonomyParams p) {
  if (!(p.delta > 0 && p.delta < 1 && p.rho > 0 && p.rho < 1)) {
    throw InvalidArgument("delta and rho must lie in (0,1)");
  }
}

}  // namespace

std::size_t pair_index(int i, int j, int n) {
  // Pairs (0,1..n-1), (1,2..n-1), ... ; row i starts after i*n - i(i+1)/2 entries.
  const auto ii = static_cast<std::size_t>(i);
  const auto nn = static_cast<std::size_t>(n);
  return ii * nn - ii * (ii + 1) / 2 + static_cast<std::size_t>(j - i - 1);
}

double DifferenceVector::entry(int i, int j) const {
  if (i == j) return 0.0;
  if (i > j) return -entries[static_cast<Eigen::Index>(pair_index(j, i, source_dim))];
  return entries[static_cast<Eigen::Index>(pair_index(i, j, source_dim))];
}

DifferenceVector difference_vector(const Vector& v) {
  const auto n = static_cast<int>(v.size());
  if (n < 2) throw InvalidArgument("difference_vector needs n >= 2");
  DifferenceVector out;
  out.source_dim = n;
  out.entries.resize(static_cast<Eigen::Index>(n) * (n - 1) / 2);
  Eigen::Index k = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) out.entries[k++] = v[i] - v[j];
  return out;
}

const char* to_string(VectorKind kind) {
  switch (kind) {
    case VectorKind::sparse: return "sparse";
    case VectorKind::compressible: return "compressible";
    case VectorKind::incompressible: return "incompressible";
  }
  return "?";
}

std::pair<int, double> max_window_count(const Vector& v, double width) {
  std::vector<double> sorted(v.data(), v.data() + v.size());
  std::sort(sorted.begin(), sorted.end());
  int best = 0;
  double centre = sorted.empty() ? 0.0 : sorted.front();
  std::size_t hi = 0;
  for (std::size_t lo = 0; lo < sorted.size(); ++lo) {
    if (hi < lo) hi = lo;
    while (hi + 1 < sorted.size() && sorted[hi + 1] - sorted[lo] <= width) ++hi;
    const int count = static_cast<int>(hi - lo + 1);
    if (count > best) {
      best = count;
      centre = sorted[lo] + width / 2;
    }
  }
  return {best, centre};
}

TaxonomyVerdict classify_vector(const Vector& v, TaxonomyParams params) {
  require_unit(v);
  require_taxonomy(params);
  const auto n = static_cast<int>(v.size());
  const int keep = static_cast<int>(std::floor(params.delta * n));

  std::vector<double> mags(v.data(), v.data() + n);
  for (auto& x : mags) x = std::abs(x);
  std::sort(mags.begin(), mags.end(), std::greater<>());
  double tail = 0.0;
  for (int i = keep; i < n; ++i) tail += mags[static_cast<std::size_t>(i)] * mags[static_cast<std::size_t>(i)];

  TaxonomyVerdict out;
  out.params = params;
  out.sparse_distance = std::sqrt(tail);
  if (tail == 0.0) {
    out.kind = VectorKind::sparse;
  } else if (out.sparse_distance <= params.rho) {
    out.kind = VectorKind::compressible;
  } else {
    out.kind = VectorKind::incompressible;
  }

  const double width = 2.0 * params.rho / std::sqrt(static_cast<double>(n));
  const auto [count, centre] = max_window_count(v, width);
  if (count >= (1.0 - params.delta) * n - 1e-12) {
    out.almost_constant = true;
    out.witness_lambda = centre;
  }
  return out;
}

std::optional<SeparatedSubsets> separated_subsets(const Vector& v, TaxonomyParams params) {
  const auto verdict = classify_vector(v, params);
  if (verdict.almost_constant) {
    throw InvalidArgument("separated_subsets: vector is almost-constant");
  }
  const auto n = static_cast<int>(v.size());
  const double lo = params.rho / std::sqrt(2.0 * n);
  const double hi = 6.0 / std::sqrt(params.delta * n);
  const int k = std::max(1, static_cast<int>(std::ceil(params.delta * n / 8.0 - 1e-12)));
  if (2 * k > n) return std::nullopt;

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return v[a] < v[b]; });
  auto val = [&](int pos) { return v[order[static_cast<std::size_t>(pos)]]; };

  // Blocks [a, a+k) and [b, b+k) of the sorted order with a+k <= b: the
  // smallest cross gap is val(b) - val(a+k-1), the largest val(b+k-1) - val(a).
  for (int a = 0; a + 2 * k <= n; ++a) {
    for (int b = a + k; b + k <= n; ++b) {
      const double gap_min = val(b) - val(a + k - 1);
      if (gap_min < lo) continue;
      const double gap_max = val(b + k - 1) - val(a);
      if (gap_max > hi) break;
      int a_lo = a, a_hi = a + k - 1;
      int b_lo = b, b_hi = b + k - 1;
      while (a_hi + 1 < b_lo && val(b_lo) - val(a_hi + 1) >= lo) ++a_hi;
      while (b_lo - 1 > a_hi && val(b_lo - 1) - val(a_hi) >= lo) --b_lo;
      while (a_lo > 0 && val(b_hi) - val(a_lo - 1) <= hi) --a_lo;
      while (b_hi + 1 < n && val(b_hi + 1) - val(a_lo) <= hi) ++b_hi;
      SeparatedSubsets out;
      for (int i = a_lo; i <= a_hi; ++i) out.first.push_back(order[static_cast<std::size_t>(i)]);
      for (int i = b_lo; i <= b_hi; ++i) out.second.push_back(order[static_cast<std::size_t>(i)]);
      std::sort(out.first.begin(), out.first.end());
      std::sort(out.second.begin(), out.second.end());
      return out;
    }
  }
  return std::nullopt;
}

bool verify_separation(const Vector& v, const SeparatedSubsets& s, TaxonomyParams params) {
  const auto n = static_cast<double>(v.size());
  const double lo = params.rho / std::sqrt(2.0 * n);
  const double hi = 6.0 / std::sqrt(params.delta * n);
  const double min_size = params.delta * n / 8.0;
  if (static_cast<double>(s.first.size()) < min_size || static_cast<double>(s.second.size()) < min_size)
    return false;
  for (int i : s.first) {
    if (std::find(s.second.begin(), s.second.end(), i) != s.second.end()) return false;
    for (int j : s.second) {
      const double gap = std::abs(v[i] - v[j]);
      if (gap < lo || gap > hi) return false;
    }
  }
  return true;
}

Vector random_unit_vector(int n, RngStream& rng) {
  Vector x(n);
  do {
    for (int i = 0; i < n; ++i) x[i] = rng.normal();
  } while (x.norm() == 0.0);
  return x.normalized();
}

std::vector<Vector> volumetric_net(int n, double eps, const RngStream& rng, std::size_t cloud_size,
                                   std::size_t probe_count) {
  if (n < 1 || n > 8) throw InvalidArgument("volumetric_net: dimension must be in [1, 8]");
  if (!(eps > 0 && eps < 1)) throw InvalidArgument("volumetric_net: eps must lie in (0,1)");

  // A 2% tighter radius still keeps (1 + 2/r)^n <= (3/eps)^n for eps <= 0.95
  // and leaves slack for points outside the cloud.
  const double radius = eps <= 0.95 ? 0.98 * eps : eps;
  std::vector<Vector> net;
  auto offer = [&](const Vector& x) {
    for (const auto& y : net)
      if ((x - y).norm() <= radius) return;
    net.push_back(x);
  };
  auto cloud = rng.child("cloud");
  for (std::size_t i = 0; i < cloud_size; ++i) offer(random_unit_vector(n, cloud));
  auto probes = rng.child("probes");
  for (std::size_t i = 0; i < probe_count; ++i) offer(random_unit_vector(n, probes));
  return net;
}

double net_coverage_radius(const std::vector<Vector>& net, int n, const RngStream& rng,
                           std::size_t probes) {
  auto stream = rng;
  double worst = 0.0;
  for (std::size_t i = 0; i < probes; ++i) {
    const Vector x = random_unit_vector(n, stream);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& y : net) best = std::min(best, (x - y).norm());
    worst = std::max(worst, best);
  }
  return worst;
}

std::vector<int> sign_pattern(int p, int q) {
  if (p < 0 || q < 0 || p + q < 1) throw InvalidArgument("sign_pattern: need p, q >= 0 with p+q >= 1");
  std::vector<int> a;
  a.insert(a.end(), static_cast<std::size_t>(p), 1);
  a.insert(a.end(), static_cast<std::size_t>(p + q), 0);
  a.insert(a.end(), static_cast<std::size_t>(q), -1);
  return a;
}

PairCounts pair_counts(int p, int q) {
  const auto a = sign_pattern(p, q);
  PairCounts c;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      const int gap = std::abs(a[i] - a[j]);
      if (gap == 1) ++c.ones;
      if (gap == 2) ++c.twos;
    }
  return c;
}

double TensorNorm::relative_gap() const {
  const double scale = std::max(std::abs(closed_form), std::abs(direct));
  return scale == 0.0 ? 0.0 : std::abs(closed_form - direct) / scale;
}

TensorNorm tensor_pair_norm(int p, int q, const Vector& v) {
  const auto n = static_cast<int>(v.size());
  if (p < 0 || q < 0 || n < 2 || 2 * (p + q) != n) {
    throw InvalidArgument("tensor_pair_norm: need p + q = n/2 with n even");
  }
  const auto dv = difference_vector(v);
  const auto a = sign_pattern(p, q);
  Vector av(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) av[static_cast<Eigen::Index>(i)] = a[i];
  const auto da = difference_vector(av);

  TensorNorm out;
  out.closed_form = std::sqrt(n * n / 4.0 + 4.0 * p * q) * dv.norm();
  // Scaled sum of squares to keep the direct expansion accurate.
  double scale = 0.0, ssq = 1.0;
  for (Eigen::Index s = 0; s < da.entries.size(); ++s) {
    for (Eigen::Index t = 0; t < dv.entries.size(); ++t) {
      const double x = std::abs(da.entries[s] * dv.entries[t]);
      if (x == 0.0) continue;
      if (scale < x) {
        ssq = 1.0 + ssq * (scale / x) * (scale / x);
        scale = x;
      } else {
        ssq += (x / scale) * (x / scale);
      }
    }
  }
  out.direct = scale * std::sqrt(ssq);
  return out;
}

}  // namespace combmat
