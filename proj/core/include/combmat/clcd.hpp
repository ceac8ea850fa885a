#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "combmat/ensemble.hpp"

namespace combmat {

/// Scan parameters.  alpha/gamma are (L, u) in the pair form.  When `step`
/// is empty the scan uses 1e-4 / ||w||_2, so the certification margin is
/// dimensionless.
struct ClcdQuery {
  double alpha = 1.0;
  double gamma = 0.05;
  double theta_max = 1.0;
  std::optional<double> step;
};

/// The infimum lies in [lo, hi], hi - lo <= step, and hi satisfies the
/// defining inequality.
struct Bracket {
  double lo = 0.0;
  double hi = 0.0;
};

/// Certified: no theta in (0, theta] satisfies the defining inequality.
struct AtLeast {
  double theta = 0.0;
};

/// Certification failed.  (0, certified_below] is still certified clean.
struct Unresolved {
  double first_uncertified = 0.0;
  double certified_below = 0.0;
};

struct ClcdResult {
  std::variant<Bracket, AtLeast, Unresolved> outcome;
  double lipschitz_margin = 0.0;  // (1+gamma) * ||w|| * step
  double step = 0.0;
  double norm = 0.0;              // ||w||_2 of the scanned vector

  bool is_bracket() const { return std::holds_alternative<Bracket>(outcome); }
  bool is_at_least() const { return std::holds_alternative<AtLeast>(outcome); }
  bool is_unresolved() const { return std::holds_alternative<Unresolved>(outcome); }

  /// Largest theta certified to be <= the CLCD.
  double certified_lower_bound() const;
  /// Upper end of a Bracket, if any.
  std::optional<double> upper_bound() const;
};

/// Euclidean distance to the integer lattice, rounding half to even.
double lattice_distance(const Vector& x);

/// A vector made of weighted scaled copies of one base vector:
/// blocks (multiplicity m_b, scale s_b) stand for m_b copies of s_b * base.
struct LatticeForm {
  struct Block {
    double multiplicity = 1.0;
    double scale = 1.0;
  };
  Vector base;
  std::vector<Block> blocks{{1.0, 1.0}};

  double norm() const;
  /// dist(theta * form, Z^N).
  double distance(double theta) const;
  /// Every |coordinate| of theta*form is <= 1/2 for theta <= this value.
  double zero_rounding_limit() const;
};

/// Certified grid scan of F(theta) = dist(theta w, Z^N) - min(gamma*theta*||w||, alpha).
/// F is (1+gamma)||w||-Lipschitz, so a point with F > 0 is clean on a ball of
/// radius F / ((1+gamma)||w||).  Holes between consecutive grid points are
/// closed by bisection; a hole that cannot be closed within a fixed budget, or
/// a point with F == 0, gives Unresolved.
ClcdResult scan_form(const LatticeForm& form, const ClcdQuery& q);

/// CLCD_{alpha,gamma}(v) scan over w = D(v).  Throws InvalidArgument when
/// D(v) = 0 or the query is malformed.
ClcdResult clcd_scan(const Vector& v, const ClcdQuery& q);

/// Pair CLCD^{a^{(p,q)}}_{L,u}(v) with (L, u) = (q.alpha, q.gamma).  The
/// tensor D(a) (x) D(v) is represented by its counting decomposition:
/// n^2/4 copies of D(v) and pq copies of 2D(v).
ClcdResult pair_clcd_scan(int p, int q, const Vector& v, const ClcdQuery& query);

/// Same scan on the fully materialized C(n,2)^2 tensor; for cross-checks.
ClcdResult pair_clcd_scan_full(int p, int q, const Vector& v, const ClcdQuery& query);

/// Every coordinate (a_i - a_j)(v_k - v_l), i<j outer, k<l inner.
Vector tensor_vector(int p, int q, const Vector& v);

/// min{ lower bound of CLCD_{alpha,gamma}(v), alpha / (4 sqrt(n) ||v-w||) }.
/// This must lower-bound CLCD_{alpha/2, gamma/2}(w).  Throws
/// InvalidArgument unless ||v-w|| < gamma ||D(v)|| / (5 sqrt(n)).
double stability_lower_bound(const Vector& v, const Vector& w, const ClcdQuery& q);

/// Dyadic level k with value in [2^k H0, 2^{k+1} H0); -1 below H0.
int clcd_level(double value, double h0);

}  // namespace combmat
