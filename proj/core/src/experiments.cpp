#include "combmat/experiments.hpp"

#include <algorithm>
#include <cmath>

#include "combmat/error.hpp"
#include "combmat/linalg.hpp"
#include "combmat/parallel.hpp"

namespace combmat {

namespace {

void check_grid(const std::vector<double>& grid, const char* name) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= 0) || !std::isfinite(grid[i])) {
      throw InvalidArgument(std::string(name) + " entries must be finite and >= 0");
    }
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      throw InvalidArgument(std::string(name) + " must be strictly increasing");
    }
  }
}

ResultRow make_row(const std::string& name, double x, long hits, long reps, const ExperimentConfig& cfg) {
  const double p = reps > 0 ? static_cast<double>(hits) / static_cast<double>(reps) : 0.0;
  return {name, x, p, binomial_stderr(p, reps), reps, cfg.params.n, cfg.params.d, cfg.seed};
}

RngStream replica_stream(const ExperimentConfig& cfg, const char* experiment, std::size_t r) {
  return derive_stream(cfg.seed, {experiment, static_cast<std::int64_t>(r)});
}

// Runs one replica per index and returns their values in index order.
template <class Fn>
std::vector<double> replicate(const ExperimentConfig& cfg, Fn&& fn) {
  std::vector<double> values(static_cast<std::size_t>(cfg.reps));
  parallel_for(values.size(), cfg.workers, [&](std::size_t r) { values[r] = fn(r); });
  return values;
}

}  // namespace

void ExperimentConfig::validate() const {
  params.validate();
  if (reps < 1) throw InvalidArgument("reps must be >= 1");
  check_grid(eps_grid, "eps_grid");
  check_grid(t_grid, "t_grid");
  if (rows && (*rows < 1 || *rows > params.n)) throw InvalidArgument("rows must satisfy 1 <= rows <= n");
}

double binomial_stderr(double p, long reps) {
  if (reps <= 0) return 0.0;
  return std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(reps));
}

std::vector<ResultRow> tail_curve(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto& params = cfg.params;
  const auto smallest = replicate(cfg, [&](std::size_t r) {
    return singular_values(sample_matrix(params, params.n, replica_stream(cfg, "tail", r))).smallest;
  });
  const double scale = 1.0 / std::sqrt(static_cast<double>(params.n));
  std::vector<ResultRow> rows;
  for (double eps : cfg.eps_grid) {
    const auto hits = std::count_if(smallest.begin(), smallest.end(), [&](double s) { return s <= eps * scale; });
    rows.push_back(make_row("tail_curve", eps, hits, cfg.reps, cfg));
  }
  return rows;
}

ResultRow singularity_probability(const ExperimentConfig& cfg, EnumerationPolicy policy) {
  cfg.validate();
  const auto& params = cfg.params;
  const int n = params.n;

  const std::uint64_t per_row = params.row_count();
  std::uint64_t total = 1;
  bool small = true;
  for (int i = 0; i < n && small; ++i) {
    if (total > kSingularityEnumerationLimit / per_row) small = false;
    total *= per_row;
  }
  small = small && total <= kSingularityEnumerationLimit;

  if (policy == EnumerationPolicy::automatic && small) {
    const auto rows = all_rows(params);
    const std::size_t count = rows.size();
    // Split on the first row; each task walks the remaining n-1 rows as an odometer.
    std::vector<long> singular(count, 0);
    parallel_for(count, cfg.workers, [&](std::size_t first) {
      IntMatrix m(n, n);
      std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
      idx[0] = first;
      while (true) {
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) m(i, j) = rows[idx[static_cast<std::size_t>(i)]].values[static_cast<std::size_t>(j)];
        if (exact_rank(m) < n) ++singular[first];
        int k = n - 1;
        while (k >= 1 && ++idx[static_cast<std::size_t>(k)] == count) idx[static_cast<std::size_t>(k--)] = 0;
        if (k < 1) break;
      }
    });
    long hits = 0;
    for (auto s : singular) hits += s;
    return make_row("singularity_probability", 0.0, hits, static_cast<long>(total), cfg);
  }

  const auto flags = replicate(cfg, [&](std::size_t r) {
    return is_singular(sample_matrix(params, n, replica_stream(cfg, "singularity", r))) ? 1.0 : 0.0;
  });
  long hits = 0;
  for (double f : flags) hits += static_cast<long>(f);
  return make_row("singularity_probability", 0.0, hits, cfg.reps, cfg);
}

std::vector<ResultRow> operator_norm_tail(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto& params = cfg.params;
  const int m = cfg.rows.value_or(params.n);
  const auto largest = replicate(cfg, [&](std::size_t r) {
    return singular_values(sample_matrix(params, m, replica_stream(cfg, "operator_norm", r))).largest;
  });
  const double root_n = std::sqrt(static_cast<double>(params.n));
  std::vector<ResultRow> rows;
  for (double t : cfg.t_grid) {
    const auto hits = std::count_if(largest.begin(), largest.end(), [&](double s) { return s >= t * root_n; });
    rows.push_back(make_row("operator_norm_tail", t, hits, cfg.reps, cfg));
  }
  return rows;
}

DistanceTailReport distance_tail(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto& params = cfg.params;
  const int n = params.n;
  if (n < 2) throw InvalidArgument("distance_tail needs n >= 2");

  struct Replica {
    bool corank_one = false;
    double distance = 0.0;
    double inner = 0.0;
  };
  std::vector<Replica> replicas(static_cast<std::size_t>(cfg.reps));
  parallel_for(replicas.size(), cfg.workers, [&](std::size_t r) {
    const auto m = sample_matrix(params, n, replica_stream(cfg, "distance", r));
    const auto basis = m.top_rows(n - 1);
    auto& out = replicas[r];
    if (exact_rank(basis.to_integer()) != n - 1) return;
    const Matrix basis_real = basis.to_real();
    const Vector last = m.row(n - 1).to_vector();
    out.corank_one = true;
    out.distance = distance_to_span(last, basis_real);
    out.inner = last.dot(unit_normal(basis_real));
  });

  DistanceTailReport report;
  for (const auto& r : replicas) {
    if (!r.corank_one) {
      ++report.degenerate;
      continue;
    }
    ++report.corank_one;
    report.distances.push_back(r.distance);
    report.inner_products.push_back(r.inner);
    report.max_identity_error = std::max(report.max_identity_error, std::abs(r.distance - std::abs(r.inner)));
  }
  for (double eps : cfg.eps_grid) {
    const auto hits =
        std::count_if(report.distances.begin(), report.distances.end(), [&](double x) { return x <= eps; });
    report.rows.push_back(make_row("distance_tail", eps, hits, report.corank_one, cfg));
  }
  report.rows.push_back(make_row("distance_degenerate", 0.0, report.degenerate, cfg.reps, cfg));
  return report;
}

ResultRow fixed_vector_smallball(const ExperimentConfig& cfg, const Vector& v, SmallBallMode mode,
                                 std::optional<double> threshold) {
  cfg.validate();
  const auto& params = cfg.params;
  const int n = params.n;
  if (v.size() != n) throw InvalidArgument("fixed_vector_smallball: vector length must be n");
  if (std::abs(v.norm() - 1.0) > 1e-9) throw InvalidArgument("fixed_vector_smallball: vector must be unit");
  const double root_n = std::sqrt(static_cast<double>(n));
  const double limit = threshold.value_or(mode == SmallBallMode::right ? root_n / 4.0 : root_n / 36.0);
  const char* name = mode == SmallBallMode::right ? "smallball_right" : "smallball_left";
  const auto hits = replicate(cfg, [&](std::size_t r) {
    const Matrix m = sample_matrix(params, n, replica_stream(cfg, name, r)).to_real();
    const double norm = mode == SmallBallMode::right ? (m * v).norm() : (v.transpose() * m).norm();
    return norm <= limit ? 1.0 : 0.0;
  });
  long count = 0;
  for (double h : hits) count += static_cast<long>(h);
  return make_row(name, limit, count, cfg.reps, cfg);
}

}  // namespace combmat
