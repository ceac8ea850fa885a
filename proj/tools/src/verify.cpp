#include <cmath>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>
#include <string>

#include "combmat/clcd.hpp"
#include "combmat/cli.hpp"
#include "combmat/ensemble.hpp"
#include "combmat/experiments.hpp"
#include "combmat/geometry.hpp"
#include "combmat/linalg.hpp"
#include "combmat/results_io.hpp"
#include "combmat/smallball.hpp"

namespace combmat::cli {

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Check = std::function<Outcome(std::uint64_t)>;

std::string fmt(double x) { return format_double(x); }

Outcome tensor_norm_identity(std::uint64_t seed) {
  auto rng = derive_stream(seed, {"verify", "tensor"});
  double worst = 0.0;
  bool counts = true;
  for (int n : {4, 8, 12}) {
    for (int t = 0; t < 5; ++t) {
      const Vector v = random_unit_vector(n, rng);
      for (int p = 0; p <= n / 2; ++p) {
        worst = std::max(worst, tensor_pair_norm(p, n / 2 - p, v).relative_gap());
        const auto c = pair_counts(p, n / 2 - p);
        counts = counts && c.ones == n * n / 4 && c.twos == static_cast<long>(p) * (n / 2 - p);
      }
    }
  }
  return {worst <= 1e-12 && counts, "max relative gap " + fmt(worst)};
}

Outcome hs_identity(std::uint64_t seed) {
  const auto rng = derive_stream(seed, {"verify", "hs"});
  long checked = 0, bad = 0;
  for (int n : {4, 8, 16}) {
    for (int d : {n / 4, n / 2}) {
      for (int m : {n - 1, n}) {
        for (int k = 0; k < 25; ++k) {
          const auto a = sample_matrix({n, d}, m, rng.child({n, d, m, k}));
          bad += a.squared_hs_norm() != static_cast<std::int64_t>(m) * d;
          ++checked;
        }
      }
    }
  }
  return {bad == 0, std::to_string(checked) + " matrices, " + std::to_string(bad) + " mismatches"};
}

Outcome covariance(std::uint64_t seed) {
  const EnsembleParams p{8, 4};
  const Matrix sigma = empirical_covariance(p, 20000, derive_stream(seed, {"verify", "covariance"}));
  const double dev = (sigma - 0.5 * Matrix::Identity(8, 8)).cwiseAbs().maxCoeff();
  return {dev <= 0.04, "max deviation " + fmt(dev)};
}

Outcome distance_identity(std::uint64_t seed) {
  ExperimentConfig cfg;
  cfg.params = {16, 8};
  cfg.reps = 200;
  cfg.seed = seed;
  cfg.eps_grid = {0.1};
  const auto rep = distance_tail(cfg);
  return {rep.max_identity_error <= 1e-10 && rep.corank_one > 0,
          std::to_string(rep.corank_one) + " replicas, max error " + fmt(rep.max_identity_error)};
}

Outcome row_enumeration(std::uint64_t) {
  for (int n = 1; n <= 8; ++n) {
    for (int d = 1; d <= n; ++d) {
      const EnsembleParams p{n, d};
      const auto rows = all_rows(p);
      if (rows.size() != p.row_count()) return {false, "row count mismatch at n=" + std::to_string(n)};
      for (const auto& r : rows) {
        int weight = 0;
        for (auto x : r.values) weight += x != 0;
        if (weight != d) return {false, "row weight mismatch"};
      }
    }
  }
  return {true, "n <= 8, every d"};
}

Outcome sampled_rows(std::uint64_t seed) {
  auto rng = derive_stream(seed, {"verify", "rows"});
  const EnsembleParams p{10, 5};
  long zeros = 0;
  const int draws = 20000;
  for (int i = 0; i < draws; ++i) {
    const auto row = sample_row(p, rng);
    int weight = 0;
    for (auto x : row.values) weight += x != 0;
    if (weight != p.d) return {false, "row with wrong weight"};
    zeros += row.values[0] == 0;
  }
  const double freq = static_cast<double>(zeros) / draws;
  return {std::abs(freq - 0.5) <= 5 * std::sqrt(0.25 / draws), "P(first entry = 0) " + fmt(freq)};
}

Outcome rank_agreement(std::uint64_t seed) {
  const auto rng = derive_stream(seed, {"verify", "rank"});
  int disagreements = 0;
  for (int k = 0; k < 200; ++k) {
    const auto a = sample_matrix({8, 4}, 8, rng.child(k));
    const bool deficient = exact_rank(a.to_integer()) < 8;
    const bool tiny = singular_values(a).smallest < 1e-8;
    disagreements += deficient != tiny;
  }
  return {disagreements == 0, std::to_string(disagreements) + " disagreements in 200"};
}

Outcome small_singularity(std::uint64_t) {
  ExperimentConfig cfg;
  cfg.params = {2, 1};
  const auto row = singularity_probability(cfg);
  return {row.estimate == 0.5 && row.reps == 16, "P(singular) " + fmt(row.estimate) + " over " + std::to_string(row.reps)};
}

Outcome clcd_example(std::uint64_t) {
  const double r = 1 / std::sqrt(2.0);
  Vector v(4);
  v << r, -r, 0, 0;
  const auto res = clcd_scan(v, {1.0, 0.05, 2.0, 1e-4});
  if (!res.is_bracket()) return {false, "no bracket"};
  const auto b = std::get<Bracket>(res.outcome);
  const double infimum = 2 * std::sqrt(2.0) / 2.1;
  return {b.lo <= infimum && infimum <= b.hi && b.hi - b.lo <= 1e-4 * (1 + 1e-9),
          "bracket [" + fmt(b.lo) + ", " + fmt(b.hi) + "]"};
}

Outcome pair_decomposition(std::uint64_t seed) {
  auto rng = derive_stream(seed, {"verify", "pair"});
  for (int t = 0; t < 6; ++t) {
    const int n = 4 + 2 * (t % 3);
    const Vector v = random_unit_vector(n, rng);
    const int p = t % (n / 2 + 1);
    const ClcdQuery q{2.0, 0.05, 1.0, 1e-3};
    const auto a = pair_clcd_scan(p, n / 2 - p, v, q);
    const auto b = pair_clcd_scan_full(p, n / 2 - p, v, q);
    if (a.outcome.index() != b.outcome.index() ||
        std::abs(a.certified_lower_bound() - b.certified_lower_bound()) > 1e-12 * std::max(1.0, b.certified_lower_bound()))
      return {false, "decomposition and full tensor disagree"};
  }
  return {true, "6 vectors"};
}

Outcome large_clcd(std::uint64_t seed) {
  auto rng = derive_stream(seed, {"verify", "large"});
  const TaxonomyParams params{0.1, 0.1};
  const double floor_value = std::sqrt(params.delta * 16) / 7;
  int checked = 0, brackets = 0;
  while (checked < 20) {
    const Vector v = random_unit_vector(16, rng);
    if (classify_vector(v, params).almost_constant) continue;
    brackets += clcd_scan(v, {1.0, params.delta * params.rho / 13, floor_value, {}}).is_bracket();
    ++checked;
  }
  return {brackets == 0, std::to_string(brackets) + " brackets below " + fmt(floor_value)};
}

Outcome enumerated_law(std::uint64_t) {
  const double r = 1 / std::sqrt(2.0);
  Vector v(4);
  v << r, r, 0, 0;
  const auto law = enumerate_Wv(v, {4, 2});
  const double expected[] = {1 / 24.0, 1 / 3.0, 1 / 4.0, 1 / 3.0, 1 / 24.0};
  bool ok = law.atoms.size() == 5;
  for (std::size_t i = 0; ok && i < 5; ++i) ok = std::abs(law.atoms[i].weight - expected[i]) <= 1e-12;
  ok = ok && std::abs(levy_exact(law, 0.0).estimate - 1 / 3.0) <= 1e-12;
  return {ok, "(1,1,0,0)/sqrt(2) law and L(W, 0) = 1/3"};
}

Outcome moments(std::uint64_t seed) {
  auto rng = derive_stream(seed, {"verify", "moments"});
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const int n = 4 + 2 * (t % 4);
    const auto law = enumerate_Wv(random_unit_vector(n, rng), EnsembleParams::balanced(n));
    worst = std::max({worst, std::abs(law.moment(1)), std::abs(law.moment(2) - 0.5), std::abs(law.total_weight() - 1)});
  }
  return {worst <= 1e-12, "max moment error " + fmt(worst)};
}

Outcome levy_mc_agreement(std::uint64_t seed) {
  auto rng = derive_stream(seed, {"verify", "levy"});
  int within = 0, total = 0;
  for (int t = 0; t < 10; ++t) {
    const Vector v = random_unit_vector(8, rng);
    const auto law = enumerate_Wv(v, {8, 4});
    const std::vector<double> grid{0.0, 0.05, 0.2};
    const auto mc = levy_mc_grid(v, {8, 4}, grid, 20000, rng.child(t));
    for (std::size_t k = 0; k < grid.size(); ++k) {
      within += std::abs(mc[k].estimate - levy_exact(law, grid[k]).estimate) <= mc[k].ci_halfwidth;
      ++total;
    }
  }
  return {within >= total - 1, std::to_string(within) + "/" + std::to_string(total) + " within the band"};
}

Outcome determinism(std::uint64_t seed) {
  ExperimentConfig cfg;
  cfg.params = {12, 6};
  cfg.reps = 100;
  cfg.seed = seed;
  cfg.eps_grid = {0.1, 0.3};
  const auto a = format_results(tail_curve(cfg), OutputFormat::csv);
  cfg.workers = 2;
  const auto b = format_results(tail_curve(cfg), OutputFormat::csv);
  return {a == b, "tail curve rerun is byte-identical"};
}

Outcome tail_monotone(std::uint64_t seed) {
  ExperimentConfig cfg;
  cfg.params = {16, 8};
  cfg.reps = 200;
  cfg.seed = seed;
  cfg.eps_grid = {0.05, 0.1, 0.2, 0.4};
  const auto rows = tail_curve(cfg);
  bool ok = true;
  for (std::size_t k = 1; k < rows.size(); ++k) ok = ok && rows[k].estimate >= rows[k - 1].estimate;
  return {ok, "P(s_n <= eps/sqrt(n)) nondecreasing in eps"};
}

const std::map<std::string, std::vector<std::pair<std::string, Check>>>& registry() {
  static const std::map<std::string, std::vector<std::pair<std::string, Check>>> suites{
      {"identities",
       {{"tensor norm identity", tensor_norm_identity},
        {"hilbert-schmidt identity", hs_identity},
        {"row covariance", covariance},
        {"distance identity", distance_identity}}},
      {"ensemble", {{"row enumeration", row_enumeration}, {"sampled rows", sampled_rows}}},
      {"linalg", {{"exact vs float rank", rank_agreement}, {"2x2 singularity", small_singularity}}},
      {"clcd",
       {{"(1,-1,0,0)/sqrt(2) bracket", clcd_example},
        {"pair decomposition", pair_decomposition},
        {"large clcd off almost-constant vectors", large_clcd}}},
      {"smallball",
       {{"enumerated law", enumerated_law}, {"moments", moments}, {"monte carlo vs exact", levy_mc_agreement}}},
      {"experiments", {{"determinism", determinism}, {"tail monotone", tail_monotone}}},
  };
  return suites;
}

}  // namespace

const std::vector<std::string>& verify_suites() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, _] : registry()) out.push_back(name);
    return out;
  }();
  return names;
}

bool run_verify_suite(const std::string& suite, std::uint64_t seed, std::ostream& out) {
  bool all = true;
  for (const auto& [name, checks] : registry()) {
    if (suite != "all" && suite != name) continue;
    for (const auto& [label, check] : checks) {
      Outcome o;
      try {
        o = check(seed);
      } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
      }
      out << (o.pass ? "PASS" : "FAIL") << "  " << name << ": " << label << " (" << o.detail << ")\n";
      all = all && o.pass;
    }
  }
  return all;
}

}  // namespace combmat::cli
