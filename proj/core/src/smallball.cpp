#include "combmat/smallball.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include "combmat/error.hpp"
#include "combmat/geometry.hpp"

namespace combmat {

namespace {

void require_length(const Vector& v, const EnsembleParams& params) {
  params.validate();
  if (v.size() != params.n) throw InvalidArgument("vector length does not match n");
}

// Calls visit(subset) for every size-d subset of [n] in lexicographic order.
template <class Visit>
void for_each_subset(int n, int d, Visit&& visit) {
  std::vector<int> subset(static_cast<std::size_t>(d));
  std::iota(subset.begin(), subset.end(), 0);
  while (true) {
    visit(subset);
    int k = d - 1;
    while (k >= 0 && subset[static_cast<std::size_t>(k)] == n - d + k) --k;
    if (k < 0) return;
    ++subset[static_cast<std::size_t>(k)];
    for (int j = k + 1; j < d; ++j) subset[static_cast<std::size_t>(j)] = subset[static_cast<std::size_t>(j - 1)] + 1;
  }
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

// Sums in a fixed index order so that flipping every sign negates the sum
// exactly.
double signed_sum(const Vector& v, const std::vector<int>& subset, std::uint32_t minus_mask) {
  double s = 0.0;
  for (std::size_t k = 0; k < subset.size(); ++k) {
    const double x = v[subset[k]];
    s += (minus_mask >> k) & 1u ? -x : x;
  }
  return s;
}

}  // namespace

double AtomDistribution::total_weight() const {
  double t = 0.0;
  for (const auto& a : atoms) t += a.weight;
  return t;
}

double AtomDistribution::moment(int k) const {
  double m = 0.0;
  for (const auto& a : atoms) m += a.weight * std::pow(a.value, k);
  return m;
}

double AtomDistribution::absolute_moment(int k) const {
  double m = 0.0;
  for (const auto& a : atoms) m += a.weight * std::pow(std::abs(a.value), k);
  return m;
}

double AtomDistribution::max_weight() const {
  double best = 0.0;
  for (const auto& a : atoms) best = std::max(best, a.weight);
  return best;
}

double AtomDistribution::tail_above(double lambda) const {
  double t = 0.0;
  for (const auto& a : atoms)
    if (std::abs(a.value) > lambda) t += a.weight;
  return t;
}

AtomDistribution merge_atoms(std::vector<Atom> raw, EnsembleParams params, double tolerance) {
  std::sort(raw.begin(), raw.end(), [](const Atom& a, const Atom& b) { return a.value < b.value; });
  AtomDistribution out;
  out.params = params;
  std::size_t i = 0;
  while (i < raw.size()) {
    double weight = 0.0, moment = 0.0;
    std::size_t j = i;
    // Chain merge: consecutive values within tolerance share an atom.
    do {
      weight += raw[j].weight;
      moment += raw[j].weight * raw[j].value;
      ++j;
    } while (j < raw.size() && raw[j].value - raw[j - 1].value <= tolerance);
    if (weight > 0) out.atoms.push_back({moment / weight, weight});
    i = j;
  }
  return out;
}

double sample_Wv(const Vector& v, const EnsembleParams& params, RngStream& rng) {
  require_length(v, params);
  const auto row = sample_row(params, rng);
  double s = 0.0;
  for (std::size_t k = 0; k < row.support.size(); ++k) s += row.signs[k] * v[row.support[k]];
  return s;
}

namespace {

// Atoms carry outcome counts until merged, so each weight is one division.
AtomDistribution normalized(AtomDistribution dist, double count) {
  for (auto& a : dist.atoms) a.weight /= count;
  return dist;
}

}  // namespace

AtomDistribution enumerate_Wv(const Vector& v, const EnsembleParams& params, std::uint64_t guard) {
  require_length(v, params);
  const auto outcomes = params.row_count();
  if (outcomes > guard) {
    throw GuardExceeded("enumerate_Wv: " + std::to_string(outcomes) + " outcomes exceed the guard of " +
                        std::to_string(guard));
  }
  const int d = params.d;
  std::vector<Atom> raw;
  raw.reserve(static_cast<std::size_t>(outcomes));
  for_each_subset(params.n, d, [&](const std::vector<int>& subset) {
    for (std::uint32_t mask = 0; mask < (1u << d); ++mask) raw.push_back({signed_sum(v, subset, mask), 1.0});
  });
  return normalized(merge_atoms(std::move(raw), params), static_cast<double>(outcomes));
}

AtomDistribution enumerate_Wv_conditional(const Vector& v, const EnsembleParams& params, int plus,
                                          std::uint64_t guard) {
  require_length(v, params);
  const int d = params.d;
  if (plus < 0 || plus > d) throw InvalidArgument("enumerate_Wv_conditional: plus count out of range");
  if (params.row_count() > guard) throw GuardExceeded("enumerate_Wv_conditional: guard exceeded");
  std::vector<Atom> raw;
  for_each_subset(params.n, d, [&](const std::vector<int>& subset) {
    for (std::uint32_t mask = 0; mask < (1u << d); ++mask) {
      if (d - std::popcount(mask) != plus) continue;
      raw.push_back({signed_sum(v, subset, mask), 1.0});
    }
  });
  const auto count = static_cast<double>(raw.size());
  return normalized(merge_atoms(std::move(raw), params), count);
}

double plus_count_probability(int d, int plus) { return binomial(d, plus) / std::ldexp(1.0, d); }

LevyEstimate levy_exact(const AtomDistribution& dist, double epsilon) {
  if (!(epsilon >= 0)) throw InvalidArgument("levy_exact: epsilon must be >= 0");
  const auto& a = dist.atoms;
  const double width = 2.0 * epsilon;
  double best = 0.0, window = 0.0;
  std::size_t hi = 0;
  for (std::size_t lo = 0; lo < a.size(); ++lo) {
    if (hi < lo) {
      hi = lo;
      window = 0.0;
    }
    while (hi < a.size() && a[hi].value - a[lo].value <= width + kAtomMergeTolerance) window += a[hi++].weight;
    best = std::max(best, window);
    window -= a[lo].weight;
  }
  return {epsilon, std::min(best, 1.0), 0.0, a.size(), LevyMethod::exact};
}

double max_window_fraction(std::span<const double> sorted, double epsilon) {
  if (sorted.empty()) return 0.0;
  const double width = 2.0 * epsilon;
  std::size_t best = 0, hi = 0;
  for (std::size_t lo = 0; lo < sorted.size(); ++lo) {
    if (hi < lo) hi = lo;
    while (hi < sorted.size() && sorted[hi] - sorted[lo] <= width) ++hi;
    best = std::max(best, hi - lo);
  }
  return static_cast<double>(best) / static_cast<double>(sorted.size());
}

double dkw_halfwidth(std::size_t samples, double beta) {
  return 2.0 * std::sqrt(std::log(2.0 / beta) / (2.0 * static_cast<double>(samples)));
}

std::vector<LevyEstimate> levy_mc_grid(const Vector& v, const EnsembleParams& params,
                                       std::span<const double> eps_grid, std::size_t samples,
                                       const RngStream& rng) {
  require_length(v, params);
  if (samples < 100) throw InvalidArgument("levy_mc: need at least 100 samples");
  std::vector<double> draws(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    auto stream = rng.child(static_cast<std::int64_t>(i));
    draws[i] = sample_Wv(v, params, stream);
  }
  std::sort(draws.begin(), draws.end());
  const double ci = dkw_halfwidth(samples);
  std::vector<LevyEstimate> out;
  for (double eps : eps_grid) {
    if (!(eps >= 0)) throw InvalidArgument("levy_mc: epsilon must be >= 0");
    out.push_back({eps, max_window_fraction(draws, eps), ci, samples, LevyMethod::monte_carlo});
  }
  return out;
}

LevyEstimate levy_mc(const Vector& v, const EnsembleParams& params, double epsilon, std::size_t samples,
                     const RngStream& rng) {
  const double grid[] = {epsilon};
  return levy_mc_grid(v, params, grid, samples, rng).front();
}

LotReport lot_check(const Vector& v, const EnsembleParams& params, std::span<const double> eps_grid,
                    double alpha, double gamma, double clcd_lower, double b) {
  require_length(v, params);
  if (!(alpha > 0) || !(gamma > 0 && gamma < 1)) throw InvalidArgument("lot_check: need alpha > 0, gamma in (0,1)");
  if (!(clcd_lower > 0)) throw InvalidArgument("lot_check: CLCD lower bound must be positive");
  const double n = params.n;
  LotReport report;
  report.d_norm = difference_vector(v).norm();
  report.clcd_lower = clcd_lower;
  report.in_hypothesis = report.d_norm >= b * std::sqrt(n);

  const auto dist = enumerate_Wv(v, params);
  const double floor_term = 1.0 / clcd_lower + std::exp(-2.0 * alpha * alpha / n);
  for (double eps : eps_grid) {
    const double levy = levy_exact(dist, eps).estimate;
    const double reference = eps + floor_term;
    report.points.push_back({eps, levy, reference, levy / reference});
    report.c_hat = std::max(report.c_hat, levy / reference);
  }
  return report;
}

LotCorpusReport lot_corpus(const std::vector<Vector>& vectors, const EnsembleParams& params,
                           std::span<const double> eps_grid, const ClcdQuery& query, double b) {
  LotCorpusReport corpus;
  for (const auto& v : vectors) {
    const double lower = clcd_scan(v, query).certified_lower_bound();
    auto report = lot_check(v, params, eps_grid, query.alpha, query.gamma, lower, b);
    if (report.in_hypothesis) {
      corpus.max_c_hat = std::max(corpus.max_c_hat, report.c_hat);
    } else {
      ++corpus.out_of_hypothesis;
    }
    corpus.reports.push_back(std::move(report));
  }
  return corpus;
}

double conditional_nonzero_probability(int n, int d, int used, int column) {
  if (column < 0 || column >= n || used < 0 || used > d || used > column) {
    throw InvalidArgument("conditional_nonzero_probability: inconsistent history");
  }
  return static_cast<double>(d - used) / static_cast<double>(n - column);
}

ColumnMoments enumerate_column_moments(const Vector& x, std::span<const double> nonzero_prob) {
  const auto n = static_cast<std::size_t>(x.size());
  if (nonzero_prob.size() != n) throw InvalidArgument("enumerate_column_moments: size mismatch");
  if (n > 12) throw GuardExceeded("enumerate_column_moments: n > 12");
  std::size_t outcomes = 1;
  for (std::size_t i = 0; i < n; ++i) outcomes *= 3;
  ColumnMoments m;
  for (std::size_t code = 0; code < outcomes; ++code) {
    std::size_t c = code;
    double prob = 1.0, y = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const int g = static_cast<int>(c % 3) - 1;
      c /= 3;
      prob *= g == 0 ? 1.0 - nonzero_prob[i] : nonzero_prob[i] / 2.0;
      y += g * x[static_cast<Eigen::Index>(i)];
    }
    const double y2 = y * y;
    m.second += prob * y2;
    m.fourth += prob * y2 * y2;
  }
  return m;
}

void write_atoms_csv(std::ostream& out, const AtomDistribution& dist) {
  out << "value,weight\n";
  out.precision(17);
  for (const auto& a : dist.atoms) out << a.value << ',' << a.weight << '\n';
}

}  // namespace combmat
