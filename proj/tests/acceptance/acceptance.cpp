// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <unistd.h>

#include "combmat/clcd.hpp"
#include "combmat/ensemble.hpp"
#include "combmat/experiments.hpp"
#include "combmat/geometry.hpp"
#include "combmat/linalg.hpp"
#include "combmat/results_io.hpp"
#include "combmat/smallball.hpp"

using namespace combmat;

namespace {

namespace tol {
constexpr double kSingularitySigmas = 4.0;
constexpr double kSingularitySeconds = 5.0;
constexpr double kCovarianceMaxDeviation = 0.02;
constexpr double kTensorRelative = 1e-12;
constexpr double kTensorSeconds = 10.0;
constexpr int kLevyMinWithin = 147;
constexpr double kBracketWidthSlack = 1e-9;  // relative, for k*h - (k-1)*h rounding
constexpr double kLotStabilityFactor = 2.0;
constexpr double kTailMinR2 = 0.9;
constexpr double kTailSeconds = 300.0;
constexpr double kDistanceIdentity = 1e-10;
constexpr double kDistanceMinR2 = 0.85;
constexpr double kRankSingularThreshold = 1e-8;
}  // namespace tol

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(double x) { return format_double(x); }

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Least-squares line through the origin; centered coefficient of determination.
double origin_fit_r2(const std::vector<double>& x, const std::vector<double>& y, double* slope_out) {
  double sxy = 0.0, sxx = 0.0, mean = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += x[i] * y[i];
    sxx += x[i] * x[i];
    mean += y[i];
  }
  mean /= static_cast<double>(y.size());
  const double slope = sxy / sxx;
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    ss_res += (y[i] - slope * x[i]) * (y[i] - slope * x[i]);
    ss_tot += (y[i] - mean) * (y[i] - mean);
  }
  if (slope_out) *slope_out = slope;
  return ss_tot == 0.0 ? 0.0 : 1.0 - ss_res / ss_tot;
}

std::vector<double> linear_grid(double start, double stop, int count) {
  std::vector<double> g;
  for (int i = 0; i < count; ++i) g.push_back(i == count - 1 ? stop : start + (stop - start) * i / (count - 1));
  return g;
}

Verdict singularity_baseline() {
  const auto start = std::chrono::steady_clock::now();
  ExperimentConfig cfg;
  cfg.params = {2, 1};
  cfg.reps = 100000;
  cfg.seed = 1001;
  const auto exact = singularity_probability(cfg);
  const auto mc = singularity_probability(cfg, EnumerationPolicy::never);
  const double elapsed = seconds_since(start);
  const double z = std::abs(mc.estimate - 0.5) / mc.std_error;
  return {exact.estimate == 0.5 && exact.reps == 16 && z <= tol::kSingularitySigmas && elapsed < tol::kSingularitySeconds,
          "exact " + fmt(exact.estimate) + " over " + std::to_string(exact.reps) + " matrices; MC " + fmt(mc.estimate) +
              " (" + fmt(z) + " stderr); " + fmt(elapsed) + " s"};
}

Verdict hs_identity() {
  const auto rng = derive_stream(1002, {"acceptance", "hs"});
  long checked = 0, mismatches = 0;
  for (int n : {4, 8, 16})
    for (int d : {n / 4, n / 2})
      for (int m : {n - 1, n})
        for (int k = 0; k < 25; ++k) {
          const auto a = sample_matrix({n, d}, m, rng.child({n, d, m, k}));
          const auto entries = a.to_integer();
          std::int64_t sum = 0;
          for (Eigen::Index i = 0; i < entries.rows(); ++i)
            for (Eigen::Index j = 0; j < entries.cols(); ++j) sum += entries(i, j) * entries(i, j);
          mismatches += sum != static_cast<std::int64_t>(m) * d || a.squared_hs_norm() != sum;
          ++checked;
        }
  return {checked == 300 && mismatches == 0, std::to_string(checked) + " matrices, " + std::to_string(mismatches) + " mismatches"};
}

Verdict covariance() {
  const Matrix sigma = empirical_covariance({8, 4}, 100000, derive_stream(1003, {"acceptance", "covariance"}));
  const double dev = (sigma - 0.5 * Matrix::Identity(8, 8)).cwiseAbs().maxCoeff();
  return {dev <= tol::kCovarianceMaxDeviation, "max |cov - I/2| = " + fmt(dev)};
}

Verdict tensor_identity() {
  const auto start = std::chrono::steady_clock::now();
  auto rng = derive_stream(1004, {"acceptance", "tensor"});
  double worst = 0.0;
  bool counts = true;
  long cases = 0;
  for (int n : {4, 8, 12}) {
    for (int t = 0; t < 20; ++t) {
      const Vector v = random_unit_vector(n, rng);
      for (int p = 0; p <= n / 2; ++p) {
        const int q = n / 2 - p;
        const auto tn = tensor_pair_norm(p, q, v);
        const double expanded = tensor_vector(p, q, v).norm();
        worst = std::max({worst, tn.relative_gap(), std::abs(expanded - tn.closed_form) / tn.closed_form});
        const auto c = pair_counts(p, q);
        counts = counts && c.ones == static_cast<long>(n) * n / 4 && c.twos == static_cast<long>(p) * q;
        ++cases;
      }
    }
  }
  const double elapsed = seconds_since(start);
  return {worst <= tol::kTensorRelative && counts && elapsed < tol::kTensorSeconds,
          std::to_string(cases) + " (p,q,v) cases, max relative gap " + fmt(worst) + ", counts " +
              (counts ? "exact" : "WRONG") + "; " + fmt(elapsed) + " s"};
}

Verdict levy_agreement() {
  auto rng = derive_stream(1005, {"acceptance", "levy"});
  const std::vector<double> grid{0.0, 0.05, 0.2};
  int within = 0, total = 0;
  double halfwidth = 0.0;
  for (int t = 0; t < 50; ++t) {
    const int n = 8 + 2 * (t % 3);
    const EnsembleParams p = EnsembleParams::balanced(n);
    const Vector v = random_unit_vector(n, rng);
    const auto law = enumerate_Wv(v, p);
    const auto mc = levy_mc_grid(v, p, grid, 100000, rng.child({"mc", t}));
    for (std::size_t k = 0; k < grid.size(); ++k) {
      within += std::abs(mc[k].estimate - levy_exact(law, grid[k]).estimate) <= mc[k].ci_halfwidth;
      halfwidth = mc[k].ci_halfwidth;
      ++total;
    }
  }
  return {within >= tol::kLevyMinWithin,
          std::to_string(within) + "/" + std::to_string(total) + " within the band (half-width " + fmt(halfwidth) + ")"};
}

// First grid point of step `step` where F < 0, or 0 if none up to theta_max.
double first_crossing(const Vector& w, double alpha, double gamma, double step, double theta_max) {
  const double norm = w.norm();
  for (long k = 1; static_cast<double>(k) * step <= theta_max; ++k) {
    const double theta = static_cast<double>(k) * step;
    if (lattice_distance(Vector(theta * w)) < std::min(gamma * theta * norm, alpha)) return theta;
  }
  return 0.0;
}

struct ClcdCase {
  ClcdResult result;
  Vector w;
  ClcdQuery query;
};

ClcdCase clcd_example() {
  const double r = 1 / std::sqrt(2.0);
  Vector v(4);
  v << r, -r, 0, 0;
  ClcdQuery q{1.0, 0.05, 2.0, 1e-4};
  return {clcd_scan(v, q), difference_vector(v).entries, q};
}

Verdict clcd_certification() {
  const auto c = clcd_example();
  if (!c.result.is_bracket()) return {false, "no bracket"};
  const auto b = std::get<Bracket>(c.result.outcome);
  const double h = *c.query.step;
  const bool narrow = b.hi - b.lo <= h * (1 + tol::kBracketWidthSlack);
  const bool contains = b.lo <= std::sqrt(2.0) && std::sqrt(2.0) <= b.hi;
  const double fine = first_crossing(c.w, c.query.alpha, c.query.gamma, h / 10, c.query.theta_max);
  const bool sound = fine >= b.lo;
  return {narrow && contains && sound, "bracket [" + fmt(b.lo) + ", " + fmt(b.hi) + "], contains sqrt(2): " +
                                           (contains ? "yes" : "no") + ", tenfold refinement first crossing " + fmt(fine)};
}

Verdict clcd_certification_oracle() {
  const auto c = clcd_example();
  if (!c.result.is_bracket()) return {false, "no bracket"};
  const auto b = std::get<Bracket>(c.result.outcome);
  // Left of sqrt(2) the distance is 2(sqrt(2) - theta) and the threshold
  // 0.1 theta, so the infimum is 2 sqrt(2) / 2.1.
  const double infimum = 2 * std::sqrt(2.0) / 2.1;
  const double fine = first_crossing(c.w, c.query.alpha, c.query.gamma, *c.query.step / 10, c.query.theta_max);
  return {b.lo <= infimum && infimum <= b.hi && fine >= b.lo,
          "infimum 2*sqrt(2)/2.1 = " + fmt(infimum) + " inside [" + fmt(b.lo) + ", " + fmt(b.hi) + "]"};
}

Verdict large_clcd() {
  auto rng = derive_stream(1007, {"acceptance", "large"});
  const TaxonomyParams params{0.1, 0.1};
  const int n = 16;
  const double floor_value = std::sqrt(params.delta * n) / 7;
  int checked = 0, brackets = 0, unresolved = 0;
  while (checked < 100) {
    const Vector v = random_unit_vector(n, rng);
    if (classify_vector(v, params).almost_constant) continue;
    const auto res = clcd_scan(v, {1.0, params.delta * params.rho / 13, floor_value, {}});
    brackets += res.is_bracket();
    unresolved += res.is_unresolved();
    ++checked;
  }
  return {brackets == 0 && unresolved == 0, std::to_string(checked) + " vectors, " + std::to_string(brackets) +
                                                " brackets, " + std::to_string(unresolved) + " unresolved below " +
                                                fmt(floor_value)};
}

double lot_max_c_hat(int n, std::uint64_t seed, int* out_of_hypothesis) {
  auto rng = derive_stream(seed, {"acceptance", "lot", n});
  const TaxonomyParams params{0.1, 0.1};
  std::vector<Vector> corpus;
  while (corpus.size() < 30) {
    const Vector v = random_unit_vector(n, rng);
    if (classify_vector(v, params).kind == VectorKind::incompressible) corpus.push_back(v);
  }
  std::vector<double> grid;
  for (int k = 1; k <= 25; ++k) grid.push_back(0.02 * k);
  const ClcdQuery query{n / 2.0, 0.01, 50.0, {}};
  const auto report = lot_corpus(corpus, EnsembleParams::balanced(n), grid, query, params.delta * params.rho / 16);
  *out_of_hypothesis = report.out_of_hypothesis;
  return report.max_c_hat;
}

Verdict lot_constant() {
  int out10 = 0, out12 = 0;
  const double c10 = lot_max_c_hat(10, 1008, &out10);
  const double c12 = lot_max_c_hat(12, 1008, &out12);
  const double ratio = std::max(c10, c12) / std::min(c10, c12);
  return {std::isfinite(c10) && std::isfinite(c12) && c10 > 0 && c12 > 0 && ratio <= tol::kLotStabilityFactor,
          "max C-hat " + fmt(c10) + " (n=10), " + fmt(c12) + " (n=12), ratio " + fmt(ratio) + ", out of hypothesis " +
              std::to_string(out10 + out12)};
}

Verdict tail_linearity() {
  const auto start = std::chrono::steady_clock::now();
  ExperimentConfig cfg;
  cfg.params = {64, 32};
  cfg.reps = 2000;
  cfg.seed = 1009;
  cfg.workers = 1;
  cfg.eps_grid = linear_grid(0.05, 0.5, 10);
  const auto rows = tail_curve(cfg);
  const double elapsed = seconds_since(start);
  std::vector<double> y;
  for (const auto& r : rows) y.push_back(r.estimate);
  double slope = 0.0;
  const double r2 = origin_fit_r2(cfg.eps_grid, y, &slope);
  return {r2 >= tol::kTailMinR2 && elapsed <= tol::kTailSeconds,
          "slope " + fmt(slope) + ", R^2 " + fmt(r2) + ", single-threaded " + fmt(elapsed) + " s"};
}

Verdict distance_tail_check() {
  ExperimentConfig cfg;
  cfg.params = {32, 16};
  cfg.reps = 2000;
  cfg.seed = 1010;
  cfg.eps_grid = linear_grid(0.05, 0.5, 10);
  const auto rep = distance_tail(cfg);
  bool monotone = true;
  std::vector<double> y;
  for (std::size_t k = 0; k < cfg.eps_grid.size(); ++k) {
    y.push_back(rep.rows[k].estimate);
    if (k > 0) monotone = monotone && y[k] >= y[k - 1];
  }
  double worst = 0.0;
  for (std::size_t k = 0; k < rep.distances.size(); ++k)
    worst = std::max(worst, std::abs(rep.distances[k] - std::abs(rep.inner_products[k])));
  double slope = 0.0;
  const double r2 = origin_fit_r2(cfg.eps_grid, y, &slope);
  return {worst <= tol::kDistanceIdentity && rep.corank_one > 0 && monotone && r2 >= tol::kDistanceMinR2,
          std::to_string(rep.corank_one) + " corank-1 replicas (" + std::to_string(rep.degenerate) +
              " degenerate), identity error " + fmt(worst) + ", monotone " + (monotone ? "yes" : "no") + ", R^2 " +
              fmt(r2)};
}

Verdict rank_agreement() {
  const auto rng = derive_stream(1011, {"acceptance", "rank"});
  int agree = 0, deficient = 0;
  for (int k = 0; k < 1000; ++k) {
    const auto a = sample_matrix({8, 4}, 8, rng.child(k));
    const bool exact_deficient = exact_rank(a.to_integer()) < 8;
    const bool float_deficient = singular_values(a).smallest < tol::kRankSingularThreshold;
    agree += exact_deficient == float_deficient;
    deficient += exact_deficient;
  }
  return {agree == 1000, std::to_string(agree) + "/1000 agree (" + std::to_string(deficient) + " singular)"};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Verdict determinism() {
  namespace fs = std::filesystem;
  const auto dir = fs::temp_directory_path() / ("combmat_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  bool identical = true;
  int files = 0;
  auto twice = [&](const std::string& name, const std::function<std::vector<ResultRow>(const ExperimentConfig&)>& run,
                   ExperimentConfig cfg) {
    for (auto format : {OutputFormat::csv, OutputFormat::jsonl}) {
      cfg.format = format;
      std::string bytes[2];
      for (int pass = 0; pass < 2; ++pass) {
        cfg.workers = pass == 0 ? 1 : 3;
        cfg.output_path = (dir / (name + std::to_string(pass) + "." + to_string(format))).string();
        write_results(run(cfg), cfg);
        bytes[pass] = slurp(cfg.output_path);
      }
      identical = identical && !bytes[0].empty() && bytes[0] == bytes[1];
      ++files;
    }
  };
  ExperimentConfig cfg;
  cfg.params = {16, 8};
  cfg.reps = 300;
  cfg.seed = 1012;
  cfg.eps_grid = {0.05, 0.1, 0.2, 0.4};
  cfg.t_grid = {1.2, 1.4, 1.6};
  twice("tail", tail_curve, cfg);
  twice("distance", [](const ExperimentConfig& c) { return distance_tail(c).rows; }, cfg);
  twice("opnorm", operator_norm_tail, cfg);
  twice("singularity", [](const ExperimentConfig& c) {
    return std::vector<ResultRow>{singularity_probability(c, EnumerationPolicy::never)};
  }, cfg);
  fs::remove_all(dir);
  return {identical, std::to_string(files) + " output files reproduced byte for byte across reruns and worker counts"};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    Verdict (*run)();
  };
  const Criterion criteria[] = {
      {1, "exact singularity baseline", singularity_baseline},
      {2, "Hilbert-Schmidt identity", hs_identity},
      {3, "row covariance", covariance},
      {4, "tensor-norm identity", tensor_identity},
      {5, "Levy oracle agreement", levy_agreement},
      {6, "CLCD certification", clcd_certification},
      {7, "large-CLCD check", large_clcd},
      {8, "LOT empirical constant", lot_constant},
      {9, "tail linearity", tail_linearity},
      {10, "distance identity and tail", distance_tail_check},
      {11, "exact vs float rank", rank_agreement},
      {12, "determinism", determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failures += !v.pass;
    std::printf("%s [%d] %s: %s (%.1f s)\n", v.pass ? "PASS" : "FAIL", c.id, c.name, v.detail.c_str(),
                seconds_since(start));
    if (c.id == 6) {
      const auto info = clcd_certification_oracle();
      std::printf("     [6] note: analytic oracle %s: %s\n", info.pass ? "agrees" : "DISAGREES", info.detail.c_str());
    }
    std::fflush(stdout);
  }
  std::printf("%d/12 criteria passed\n", 12 - failures);
  return failures == 0 ? 0 : 1;
}
