#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "combmat/ensemble.hpp"

namespace combmat {

enum class OutputFormat { csv, jsonl };

/// Settings shared by every Monte Carlo experiment.  Serialized as JSON with
/// these field names (see results_io.hpp).
struct ExperimentConfig {
  EnsembleParams params{2, 1};
  long reps = 1000;
  std::uint64_t seed = 0;
  std::vector<double> eps_grid;
  std::vector<double> t_grid;
  double delta = 0.1;
  double rho = 0.1;
  double gamma = 0.01;
  double mu = 0.1;
  std::optional<int> rows;  // matrix height where the experiment allows m <= n
  std::string output_path;
  OutputFormat format = OutputFormat::csv;
  bool append = false;
  int workers = 0;  // <= 0: default_worker_count()

  /// Throws InvalidArgument: reps >= 1, grids nonnegative and strictly increasing.
  void validate() const;
};

/// One point of an experiment curve.
struct ResultRow {
  std::string experiment;
  double x = 0.0;
  double estimate = 0.0;
  double std_error = 0.0;  // serialized as "stderr"
  long reps = 0;
  int n = 0;
  int d = 0;
  std::uint64_t seed = 0;

  friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

/// sqrt(p(1-p)/reps).
double binomial_stderr(double p, long reps);

/// P(s_n(M_n) <= eps / sqrt(n)) for each eps in cfg.eps_grid.  All grid
/// points share one replica set, so the curve is monotone.
std::vector<ResultRow> tail_curve(const ExperimentConfig& cfg);

enum class EnumerationPolicy {
  automatic,  // enumerate when the ensemble has <= kSingularityEnumerationLimit matrices
  never,
};

inline constexpr std::uint64_t kSingularityEnumerationLimit = 1'000'000;

/// P(M_n singular), decided by exact_rank.  Small ensembles are enumerated
/// exactly; then `reps` is the number of matrices enumerated.
ResultRow singularity_probability(const ExperimentConfig& cfg,
                                  EnumerationPolicy policy = EnumerationPolicy::automatic);

/// P(s_1(M) >= t sqrt(n)) for each t in cfg.t_grid, M of size rows x n.
std::vector<ResultRow> operator_norm_tail(const ExperimentConfig& cfg);

struct DistanceTailReport {
  std::vector<ResultRow> rows;   // "distance_tail" per eps, then one "distance_degenerate" row
  long corank_one = 0;
  long degenerate = 0;           // replicas whose first n-1 rows have rank < n-1
  std::vector<double> distances;       // per corank-1 replica
  std::vector<double> inner_products;  // <R_n, v_n> per corank-1 replica
  double max_identity_error = 0.0;     // max | dist - |<R_n, v_n>| |
};

/// dist(R_n, H_n) tail over corank-1 replicas; degenerate replicas are
/// counted separately.
DistanceTailReport distance_tail(const ExperimentConfig& cfg);

enum class SmallBallMode { right, left };

/// Frequency of ||M v|| <= threshold (right) or ||v^T M|| <= threshold
/// (left).  Default thresholds sqrt(n)/4 and sqrt(n)/36.
ResultRow fixed_vector_smallball(const ExperimentConfig& cfg, const Vector& v, SmallBallMode mode,
                                 std::optional<double> threshold = std::nullopt);

}  // namespace combmat
