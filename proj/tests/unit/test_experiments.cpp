#include <doctest.h>

#include <cmath>

#include "combmat/error.hpp"
#include "combmat/experiments.hpp"
#include "combmat/geometry.hpp"
#include "combmat/linalg.hpp"

using namespace combmat;

namespace {

ExperimentConfig base_config(int n, int d, long reps, std::uint64_t seed) {
  ExperimentConfig cfg;
  cfg.params = {n, d};
  cfg.reps = reps;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_CASE("config validation") {
  auto cfg = base_config(4, 2, 10, 1);
  CHECK_NOTHROW(cfg.validate());
  cfg.reps = 0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg.reps = 10;
  cfg.eps_grid = {0.1, 0.1};
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg.eps_grid = {-0.1, 0.1};
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg.eps_grid = {0.0, 0.1};
  cfg.rows = 5;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
}

TEST_CASE("binomial stderr") {
  CHECK(binomial_stderr(0.5, 100) == doctest::Approx(0.05));
  CHECK(binomial_stderr(0.0, 100) == 0.0);
  CHECK(binomial_stderr(1.0, 7) == 0.0);
}

TEST_CASE("singularity: n=2, d=1 enumeration and simulation") {
  const auto cfg = base_config(2, 1, 20000, 11);
  const auto exact = singularity_probability(cfg);
  CHECK(exact.experiment == "singularity_probability");
  CHECK(exact.estimate == 0.5);
  CHECK(exact.reps == 16);
  CHECK(exact.std_error == doctest::Approx(std::sqrt(0.25 / 16)));

  const auto mc = singularity_probability(cfg, EnumerationPolicy::never);
  CHECK(mc.reps == 20000);
  CHECK(std::abs(mc.estimate - 0.5) <= 4 * mc.std_error);
  CHECK(mc.std_error == doctest::Approx(binomial_stderr(mc.estimate, 20000)));
}

TEST_CASE("singularity: n=3 enumeration matches a direct count") {
  const auto cfg = base_config(3, 2, 1, 0);
  const auto exact = singularity_probability(cfg);
  const auto rows = all_rows({3, 2});
  long singular = 0, total = 0;
  for (const auto& a : rows)
    for (const auto& b : rows)
      for (const auto& c : rows) {
        IntMatrix m(3, 3);
        for (int j = 0; j < 3; ++j) {
          m(0, j) = a.values[static_cast<std::size_t>(j)];
          m(1, j) = b.values[static_cast<std::size_t>(j)];
          m(2, j) = c.values[static_cast<std::size_t>(j)];
        }
        const long long det = m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
                              m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
                              m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
        singular += det == 0;
        ++total;
      }
  CHECK(exact.reps == total);
  CHECK(exact.estimate == doctest::Approx(double(singular) / double(total)).epsilon(1e-15));
}

TEST_CASE("singularity probability decreases with n") {
  std::vector<double> estimates;
  for (int n : {4, 6, 8}) estimates.push_back(singularity_probability(base_config(n, n / 2, 3000, 5)).estimate);
  CHECK(estimates[0] > estimates[1]);
  CHECK(estimates[1] > estimates[2]);
}

TEST_CASE("tail curve is monotone with binomial errors") {
  auto cfg = base_config(16, 8, 300, 7);
  cfg.eps_grid = {0.05, 0.1, 0.2, 0.4, 0.8};
  const auto rows = tail_curve(cfg);
  REQUIRE(rows.size() == 5);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    CHECK(rows[k].experiment == "tail_curve");
    CHECK(rows[k].x == cfg.eps_grid[k]);
    CHECK(rows[k].reps == 300);
    CHECK(rows[k].std_error == doctest::Approx(binomial_stderr(rows[k].estimate, 300)));
    if (k > 0) CHECK(rows[k].estimate >= rows[k - 1].estimate);
  }
  CHECK(rows.back().estimate > rows.front().estimate);
}

TEST_CASE("results do not depend on the worker count") {
  auto cfg = base_config(12, 6, 200, 9);
  cfg.eps_grid = {0.1, 0.3};
  cfg.workers = 1;
  const auto a = tail_curve(cfg);
  cfg.workers = 3;
  const auto b = tail_curve(cfg);
  CHECK(a == b);
  cfg.workers = 1;
  const auto d1 = distance_tail(cfg);
  cfg.workers = 4;
  const auto d4 = distance_tail(cfg);
  CHECK(d1.rows == d4.rows);
}

TEST_CASE("operator norm concentrates near sqrt(2n) for d = n/2") {
  auto cfg = base_config(128, 64, 20, 13);
  cfg.t_grid = {1.0, 1.3, 1.6, 2.0};
  const auto rows = operator_norm_tail(cfg);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].estimate == 1.0);
  CHECK(rows[1].estimate == 1.0);
  CHECK(rows[3].estimate == 0.0);
  for (std::size_t k = 1; k < rows.size(); ++k) CHECK(rows[k].estimate <= rows[k - 1].estimate);

  cfg.rows = 64;
  cfg.reps = 5;
  for (const auto& r : operator_norm_tail(cfg)) CHECK(r.experiment == "operator_norm_tail");
}

TEST_CASE("distance tail: identity with the unit normal") {
  auto cfg = base_config(12, 6, 300, 17);
  cfg.eps_grid = {0.05, 0.2, 0.5};
  const auto rep = distance_tail(cfg);
  REQUIRE(rep.rows.size() == 4);
  CHECK(rep.corank_one + rep.degenerate == 300);
  CHECK(rep.distances.size() == static_cast<std::size_t>(rep.corank_one));
  CHECK(rep.max_identity_error <= 1e-10);
  for (std::size_t k = 0; k < rep.distances.size(); ++k)
    CHECK(rep.distances[k] == doctest::Approx(std::abs(rep.inner_products[k])).epsilon(1e-10));
  for (int k = 0; k < 3; ++k) {
    CHECK(rep.rows[static_cast<std::size_t>(k)].experiment == "distance_tail");
    CHECK(rep.rows[static_cast<std::size_t>(k)].reps == rep.corank_one);
  }
  CHECK(rep.rows[1].estimate >= rep.rows[0].estimate);
  CHECK(rep.rows[2].estimate >= rep.rows[1].estimate);
  CHECK(rep.rows[3].experiment == "distance_degenerate");
  CHECK(rep.rows[3].estimate == doctest::Approx(double(rep.degenerate) / 300));
}

TEST_CASE("fixed-vector small ball") {
  auto cfg = base_config(16, 8, 400, 19);
  auto rng = derive_stream(19, {"vector"});
  const Vector v = random_unit_vector(16, rng);
  const auto right = fixed_vector_smallball(cfg, v, SmallBallMode::right);
  CHECK(right.experiment == "smallball_right");
  CHECK(right.x == doctest::Approx(1.0));
  CHECK(right.estimate <= 0.05);
  const auto left = fixed_vector_smallball(cfg, v, SmallBallMode::left);
  CHECK(left.experiment == "smallball_left");
  CHECK(left.x == doctest::Approx(4.0 / 36));
  CHECK(left.estimate <= 0.05);
  // a generous threshold catches everything: ||Mv|| <= ||M||_HS = sqrt(n d)
  CHECK(fixed_vector_smallball(cfg, v, SmallBallMode::right, std::sqrt(16.0 * 8.0)).estimate == 1.0);
  CHECK_THROWS_AS(fixed_vector_smallball(cfg, Vector::Ones(16), SmallBallMode::right), InvalidArgument);

  // the probability of a small image shrinks as n grows
  std::vector<double> trend;
  for (int n : {4, 8, 16}) {
    auto c = base_config(n, n / 2, 2000, 23);
    trend.push_back(fixed_vector_smallball(c, Vector::Unit(n, 0), SmallBallMode::right, 0.5).estimate);
  }
  CHECK(trend[0] > trend[1]);
  CHECK(trend[1] > trend[2]);
}
