#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "combmat/clcd.hpp"
#include "combmat/ensemble.hpp"
#include "combmat/rng.hpp"

namespace combmat {

struct Atom {
  double value = 0.0;
  double weight = 0.0;
};

/// Exact finite law of W_v = <xi, v>: strictly increasing values, positive
/// weights summing to one.
struct AtomDistribution {
  std::vector<Atom> atoms;
  EnsembleParams params;

  double total_weight() const;
  /// E[W^k].
  double moment(int k) const;
  /// E[|W|^k].
  double absolute_moment(int k) const;
  double max_weight() const;
  /// P(|W| > lambda).
  double tail_above(double lambda) const;
};

inline constexpr double kAtomMergeTolerance = 1e-12;
inline constexpr std::uint64_t kEnumerationGuard = 10'000'000;

/// Sort raw (value, weight) pairs and merge values closer than `tolerance`
/// into one atom (weight-averaged position).
AtomDistribution merge_atoms(std::vector<Atom> raw, EnsembleParams params,
                             double tolerance = kAtomMergeTolerance);

/// One draw of W_v by sampling a support and signs.
double sample_Wv(const Vector& v, const EnsembleParams& params, RngStream& rng);

/// Exact law of W_v over all C(n,d) * 2^d equally likely rows.  Throws
/// GuardExceeded above `guard` outcomes.
AtomDistribution enumerate_Wv(const Vector& v, const EnsembleParams& params,
                              std::uint64_t guard = kEnumerationGuard);

/// Exact law of W_v conditioned on exactly `plus` entries equal to +1 (and
/// d - plus equal to -1).
AtomDistribution enumerate_Wv_conditional(const Vector& v, const EnsembleParams& params, int plus,
                                          std::uint64_t guard = kEnumerationGuard);

/// P(exactly `plus` of the d nonzeros are +1) = C(d, plus) / 2^d.
double plus_count_probability(int d, int plus);

enum class LevyMethod { exact, monte_carlo };

struct LevyEstimate {
  double epsilon = 0.0;
  double estimate = 0.0;
  double ci_halfwidth = 0.0;
  std::size_t sample_count = 0;
  LevyMethod method = LevyMethod::exact;
};

/// sup over lambda of P(|W - lambda| <= eps), via a two-pointer sweep with
/// the window's left edge anchored at each atom.
LevyEstimate levy_exact(const AtomDistribution& dist, double epsilon);

/// Largest fraction of sorted samples inside any closed window of width 2*eps.
double max_window_fraction(std::span<const double> sorted, double epsilon);

/// 2 * sqrt(ln(2/beta) / (2N)): uniform (DKW) band for the window statistic.
double dkw_halfwidth(std::size_t samples, double beta = 0.01);

/// Monte Carlo Levy estimate from N draws of W_v (draw i uses rng.child(i)).
LevyEstimate levy_mc(const Vector& v, const EnsembleParams& params, double epsilon,
                     std::size_t samples, const RngStream& rng);

/// Same sample set evaluated at every epsilon in the grid.
std::vector<LevyEstimate> levy_mc_grid(const Vector& v, const EnsembleParams& params,
                                       std::span<const double> eps_grid, std::size_t samples,
                                       const RngStream& rng);

struct LotPoint {
  double epsilon = 0.0;
  double levy = 0.0;
  double reference = 0.0;  // eps + 1/clcd_lb + exp(-2 alpha^2 / n)
  double ratio = 0.0;      // levy / reference
};

struct LotReport {
  std::vector<LotPoint> points;
  double c_hat = 0.0;       // max ratio over the grid
  double d_norm = 0.0;      // ||D(v)||_2
  double clcd_lower = 0.0;
  bool in_hypothesis = true;  // ||D(v)|| >= b sqrt(n)
};

/// Fitted constant for L(W_v, eps) <= C (eps + 1/CLCD + e^{-2 alpha^2/n})
/// from the exact law.  An out-of-hypothesis vector is flagged, not rejected.
LotReport lot_check(const Vector& v, const EnsembleParams& params, std::span<const double> eps_grid,
                    double alpha, double gamma, double clcd_lower, double b);

struct LotCorpusReport {
  std::vector<LotReport> reports;
  double max_c_hat = 0.0;  // over in-hypothesis vectors
  int out_of_hypothesis = 0;
};

/// lot_check over a corpus, with each CLCD lower bound taken from clcd_scan.
LotCorpusReport lot_corpus(const std::vector<Vector>& vectors, const EnsembleParams& params,
                           std::span<const double> eps_grid, const ClcdQuery& query, double b);

/// Conditional law of a column entry given the earlier columns: nonzero with
/// probability (d - used) / (n - column), then a fair sign.
double conditional_nonzero_probability(int n, int d, int used, int column);

struct ColumnMoments {
  double second = 0.0;  // E[y^2]
  double fourth = 0.0;  // E[y^4]
};

/// Moments of y = sum_i x_i g_i with independent g_i in {-1,0,1},
/// P(g_i != 0) = p_i, by enumerating all 3^n outcomes (n <= 12).
ColumnMoments enumerate_column_moments(const Vector& x, std::span<const double> nonzero_prob);

/// CSV lines "value,weight" with a header.
void write_atoms_csv(std::ostream& out, const AtomDistribution& dist);

}  // namespace combmat
