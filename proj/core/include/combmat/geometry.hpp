#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "combmat/ensemble.hpp"
#include "combmat/rng.hpp"

namespace combmat {

/// D(v): coordinates v_i - v_j for i < j in lexicographic pair order.
struct DifferenceVector {
  Vector entries;
  int source_dim = 0;

  double entry(int i, int j) const;
  double norm() const { return entries.norm(); }
};

/// Position of the pair (i, j), i < j, inside D(v) for dimension n.
std::size_t pair_index(int i, int j, int n);

DifferenceVector difference_vector(const Vector& v);

enum class VectorKind { sparse, compressible, incompressible };

const char* to_string(VectorKind kind);

struct TaxonomyParams {
  double delta = 0.1;
  double rho = 0.1;
};

struct TaxonomyVerdict {
  VectorKind kind = VectorKind::incompressible;
  double sparse_distance = 0.0;        // l2 distance to the floor(delta*n)-sparse vectors
  bool almost_constant = false;
  std::optional<double> witness_lambda;  // set iff almost_constant
  TaxonomyParams params;
};

/// Classify a unit vector.  Sparse/compressible use the tail norm after a
/// magnitude sort; almost-constant uses an exact sliding window of width
/// 2*rho/sqrt(n) over the sorted coordinates.
TaxonomyVerdict classify_vector(const Vector& v, TaxonomyParams params);

/// Largest number of coordinates inside a closed window of width `width`,
/// and the window's centre.
std::pair<int, double> max_window_count(const Vector& v, double width);

struct SeparatedSubsets {
  std::vector<int> first;
  std::vector<int> second;
};

/// Disjoint index sets of size >= delta*n/8 whose cross differences all lie
/// in [rho/sqrt(2n), 6/sqrt(delta*n)].  Throws InvalidArgument when v is
/// almost-constant; returns nullopt if the exhaustive scan over sorted
/// contiguous blocks finds nothing.
std::optional<SeparatedSubsets> separated_subsets(const Vector& v, TaxonomyParams params);

/// True iff every cross pair of (first, second) respects the separation bounds.
bool verify_separation(const Vector& v, const SeparatedSubsets& s, TaxonomyParams params);

/// Greedy eps-separated net over a random cloud on S^{n-1}, topped up with
/// every probe it fails to cover; the result covers all probes within eps
/// and, being eps-separated, has at most (1 + 2/eps)^n <= (3/eps)^n points.
/// Throws InvalidArgument for n > 8 or eps outside (0, 1).
std::vector<Vector> volumetric_net(int n, double eps, const RngStream& rng,
                                   std::size_t cloud_size = 20000,
                                   std::size_t probe_count = 100000);

/// Largest distance from any of `probes` random unit vectors to the net.
double net_coverage_radius(const std::vector<Vector>& net, int n, const RngStream& rng,
                           std::size_t probes);

/// a^{(p,q)} = (1 x p, 0 x n/2, -1 x q) with n = 2(p+q).
std::vector<int> sign_pattern(int p, int q);

struct PairCounts {
  long ones = 0;  // #{i<j : |a_i - a_j| = 1}
  long twos = 0;  // #{i<j : |a_i - a_j| = 2}
};

PairCounts pair_counts(int p, int q);

struct TensorNorm {
  double closed_form = 0.0;  // sqrt(n^2/4 + 4pq) * ||D(v)||
  double direct = 0.0;       // from every (a_i-a_j)(v_k-v_l) coordinate
  double relative_gap() const;
};

/// ||D(a^{(p,q)}) (x) D(v)||_2 both ways.  Throws InvalidArgument if
/// 2(p+q) != length(v).
TensorNorm tensor_pair_norm(int p, int q, const Vector& v);

/// Uniform random unit vector (normalized Gaussian).
Vector random_unit_vector(int n, RngStream& rng);

}  // namespace combmat
