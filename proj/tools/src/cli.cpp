#include "combmat/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <random>
#include <sstream>

#include "combmat/clcd.hpp"
#include "combmat/ensemble.hpp"
#include "combmat/error.hpp"
#include "combmat/experiments.hpp"
#include "combmat/geometry.hpp"
#include "combmat/linalg.hpp"
#include "combmat/results_io.hpp"
#include "combmat/smallball.hpp"

namespace combmat::cli {

namespace {

struct Options {
  int n = 0;
  int d = 0;
  int m = 0;
  long reps = 0;
  std::uint64_t seed = 0;
  std::string eps_grid;
  std::string eps_list;
  std::string t_grid;
  double alpha = 1.0;
  double gamma = 0.05;
  double delta = 0.1;
  double rho = 0.1;
  double theta_max = 1.0;
  double grid_step = 0.0;
  std::string vector = "random";
  bool exact = false;
  bool no_normalize = false;
  std::string out;
  std::string format;
  int workers = 0;
  std::string config;
  std::string in;
  int pair = -1;
  std::string mode = "right";
  double threshold = 0.0;
  std::string suite = "all";
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

double parse_number(const std::string& text) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) throw UsageError("not a number: '" + text + "'");
  return value;
}

// "start:stop:count", endpoints included.
std::vector<double> parse_grid(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
  if (parts.size() != 3) throw UsageError("grid must be start:stop:count, got '" + spec + "'");
  const double start = parse_number(parts[0]);
  const double stop = parse_number(parts[1]);
  const double count = parse_number(parts[2]);
  if (count < 1 || count != std::floor(count)) throw UsageError("grid count must be a positive integer");
  const auto k = static_cast<int>(count);
  if (k == 1) return {start};
  std::vector<double> grid;
  for (int i = 0; i < k; ++i) grid.push_back(i == k - 1 ? stop : start + (stop - start) * i / (k - 1));
  return grid;
}

std::vector<double> parse_list(const std::string& spec) {
  std::vector<double> values;
  std::stringstream ss(spec);
  for (std::string part; std::getline(ss, part, ',');)
    if (!part.empty()) values.push_back(parse_number(part));
  if (values.empty()) throw UsageError("empty list '" + spec + "'");
  return values;
}

Vector read_vector_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path, "cannot open vector file");
  std::vector<double> values;
  for (std::string token; in >> token;) {
    std::replace(token.begin(), token.end(), ',', ' ');
    std::stringstream ss(token);
    for (std::string piece; ss >> piece;) values.push_back(parse_number(piece));
  }
  Vector v(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) v[static_cast<Eigen::Index>(i)] = values[i];
  return v;
}

class Command {
 public:
  Command(CLI::App& sub, Options& o) : sub_(sub), o_(o) {}

  Command& ensemble() {
    sub_.add_option("--n", o_.n, "dimension");
    sub_.add_option("--d", o_.d, "nonzeros per row (default n/2)");
    return *this;
  }
  Command& seed() {
    sub_.add_option("--seed", o_.seed, "random seed (generated and printed if omitted)");
    return *this;
  }
  Command& reps(const char* what = "replicas") {
    sub_.add_option("--reps", o_.reps, what);
    return *this;
  }
  Command& output() {
    sub_.add_option("--out", o_.out, "write results to this file");
    sub_.add_option("--format", o_.format, "csv or jsonl")->check(CLI::IsMember({"csv", "jsonl"}));
    sub_.add_option("--workers", o_.workers, "worker threads (default: $COMBMAT_WORKERS or all cores)");
    sub_.add_option("--config", o_.config, "JSON experiment config; flags override it");
    return *this;
  }
  Command& vector() {
    sub_.add_option("--vector", o_.vector, "random | basis:k | file:PATH");
    sub_.add_flag("--no-normalize", o_.no_normalize, "keep a file vector as given");
    return *this;
  }
  Command& eps_grid() {
    sub_.add_option("--eps-grid", o_.eps_grid, "start:stop:count");
    return *this;
  }

 private:
  CLI::App& sub_;
  Options& o_;
};

class Runner {
 public:
  Runner(const Options& o, const CLI::App& sub, std::ostream& out, std::ostream& err)
      : o_(o), sub_(sub), out_(out), err_(err) {}

  bool given(const std::string& flag) const {
    const auto* opt = sub_.get_option_no_throw(flag);
    return opt != nullptr && opt->count() > 0;
  }

  std::uint64_t seed() {
    if (given("--seed")) return o_.seed;
    if (!o_.config.empty()) return config().seed;
    if (!generated_) {
      std::random_device rd;
      generated_ = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
      err_ << "seed: " << *generated_ << '\n';
    }
    return *generated_;
  }

  EnsembleParams params() {
    EnsembleParams p;
    if (!o_.config.empty()) p = config().params;
    if (given("--n")) {
      p.n = o_.n;
      p.d = given("--d") ? o_.d : o_.n / 2;
    } else if (given("--d")) {
      p.d = o_.d;
    } else if (o_.config.empty()) {
      throw UsageError("--n is required");
    }
    p.validate();
    return p;
  }

  const ExperimentConfig& config() {
    if (!config_) config_ = o_.config.empty() ? ExperimentConfig{} : load_config(o_.config);
    return *config_;
  }

  ExperimentConfig experiment_config() {
    ExperimentConfig cfg = config();
    cfg.params = params();
    if (given("--reps")) cfg.reps = o_.reps;
    cfg.seed = seed();
    if (given("--eps-grid")) cfg.eps_grid = parse_grid(o_.eps_grid);
    if (given("--eps")) cfg.eps_grid = parse_list(o_.eps_list);
    if (given("--t-grid")) cfg.t_grid = parse_grid(o_.t_grid);
    if (given("--delta")) cfg.delta = o_.delta;
    if (given("--rho")) cfg.rho = o_.rho;
    if (given("--gamma")) cfg.gamma = o_.gamma;
    if (given("--m")) cfg.rows = o_.m;
    if (given("--out")) cfg.output_path = o_.out;
    if (given("--format")) cfg.format = parse_format(o_.format);
    if (given("--workers")) cfg.workers = o_.workers;
    cfg.validate();
    return cfg;
  }

  Vector vector(int n) {
    const std::string& spec = o_.vector;
    if (spec == "random") {
      auto rng = derive_stream(seed(), {"cli", "vector"});
      return random_unit_vector(n, rng);
    }
    if (spec.rfind("basis:", 0) == 0) {
      const double k = parse_number(spec.substr(6));
      if (k < 1 || k > n || k != std::floor(k)) throw UsageError("basis index must be in 1..n");
      return Vector::Unit(n, static_cast<Eigen::Index>(k) - 1);
    }
    if (spec.rfind("file:", 0) == 0) {
      Vector v = read_vector_file(spec.substr(5));
      if (v.size() != n) throw UsageError("vector file has " + std::to_string(v.size()) + " entries, expected " + std::to_string(n));
      if (!o_.no_normalize) {
        if (v.norm() == 0.0) throw UsageError("cannot normalize the zero vector");
        v.normalize();
      }
      return v;
    }
    throw UsageError("--vector must be random, basis:k or file:PATH");
  }

  void emit(const std::vector<ResultRow>& rows, const ExperimentConfig& cfg) {
    if (!cfg.output_path.empty()) {
      write_results(rows, cfg);
      err_ << "wrote " << rows.size() << " rows to " << cfg.output_path << '\n';
    }
    if (given("--format") && cfg.output_path.empty()) {
      out_ << format_results(rows, cfg.format);
      return;
    }
    std::vector<std::vector<std::string>> table;
    for (const auto& r : rows) {
      table.push_back({r.experiment, format_double(r.x), format_double(r.estimate), format_double(r.std_error),
                       std::to_string(r.reps), std::to_string(r.n), std::to_string(r.d), std::to_string(r.seed)});
    }
    print_table({"experiment", "x", "estimate", "stderr", "reps", "n", "d", "seed"}, table);
  }

  void print_table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> width(header.size());
    for (std::size_t c = 0; c < header.size(); ++c) width[c] = header[c].size();
    for (const auto& row : rows)
      for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
    auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t c = 0; c < cells.size(); ++c) {
        out_ << std::left << std::setw(static_cast<int>(width[c])) << cells[c];
        out_ << (c + 1 < cells.size() ? "  " : "\n");
      }
    };
    line(header);
    for (const auto& row : rows) line(row);
  }

  std::ostream& out() { return out_; }
  std::ostream& err() { return err_; }
  const Options& opts() const { return o_; }

 private:
  const Options& o_;
  const CLI::App& sub_;
  std::ostream& out_;
  std::ostream& err_;
  std::optional<ExperimentConfig> config_;
  std::optional<std::uint64_t> generated_;
};

void write_text_file(const std::string& path, const std::string& text) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError(path, "cannot open for writing");
    f << text;
    if (!f.flush()) throw IoError(path, "write failed");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError(path, "cannot move into place");
  }
}

SignedMatrix sampled_matrix(Runner& r) {
  const auto p = r.params();
  const int m = r.given("--m") ? r.opts().m : p.n;
  if (m < 1) throw UsageError("--m must be positive");
  return sample_matrix(p, m, derive_stream(r.seed(), {"cli", "sample"}));
}

int cmd_sample(Runner& r) {
  const auto m = sampled_matrix(r);
  std::ostringstream text;
  write_matrix_csv(text, m);
  if (!r.opts().out.empty()) {
    write_text_file(r.opts().out, text.str());
  } else {
    r.out() << text.str();
  }
  return kSuccess;
}

int cmd_spectrum(Runner& r) {
  Matrix real;
  IntMatrix integer;
  if (!r.opts().in.empty()) {
    std::ifstream in(r.opts().in);
    if (!in) throw IoError(r.opts().in, "cannot open matrix file");
    integer = read_matrix_csv(in);
    real = integer.cast<double>();
  } else {
    const auto m = sampled_matrix(r);
    integer = m.to_integer();
    real = m.to_real();
  }
  const auto s = singular_values(real);
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < s.singular_values.size(); ++i)
    rows.push_back({std::to_string(i + 1), format_double(s.singular_values[i])});
  r.print_table({"index", "singular_value"}, rows);
  r.out() << "largest " << format_double(s.largest) << "\nsmallest " << format_double(s.smallest) << "\nhs_norm "
          << format_double(s.hs_norm) << '\n';
  if (r.opts().exact) r.out() << "exact_rank " << exact_rank(integer) << '\n';
  return kSuccess;
}

int cmd_clcd(Runner& r) {
  const auto& o = r.opts();
  if (!r.given("--n")) throw UsageError("--n is required");
  const Vector v = r.vector(o.n);
  ClcdQuery q{o.alpha, o.gamma, o.theta_max, {}};
  if (r.given("--grid-step")) q.step = o.grid_step;
  ClcdResult res;
  if (o.pair >= 0) {
    if (o.n % 2 != 0 || o.pair > o.n / 2) throw UsageError("--pair needs even n and 0 <= p <= n/2");
    res = pair_clcd_scan(o.pair, o.n / 2 - o.pair, v, q);
  } else {
    res = clcd_scan(v, q);
  }
  std::vector<std::vector<std::string>> rows;
  if (const auto* b = std::get_if<Bracket>(&res.outcome)) {
    rows.push_back({"bracket", format_double(b->lo), format_double(b->hi)});
  } else if (const auto* a = std::get_if<AtLeast>(&res.outcome)) {
    rows.push_back({"at_least", format_double(a->theta), ""});
  } else {
    const auto& u = std::get<Unresolved>(res.outcome);
    rows.push_back({"unresolved", format_double(u.certified_below), format_double(u.first_uncertified)});
  }
  r.print_table({"outcome", "lower", "upper"}, rows);
  r.out() << "step " << format_double(res.step) << "\nlipschitz_margin " << format_double(res.lipschitz_margin)
          << "\nnorm " << format_double(res.norm) << '\n';
  if (std::abs(v.norm() - 1.0) < 1e-9) {
    const auto verdict = classify_vector(v, {o.delta, o.rho});
    r.out() << "kind " << to_string(verdict.kind) << "\nalmost_constant " << (verdict.almost_constant ? "yes" : "no")
            << '\n';
  }
  return kSuccess;
}

int cmd_levy(Runner& r) {
  const auto& o = r.opts();
  ExperimentConfig cfg = r.experiment_config();
  if (cfg.eps_grid.empty()) throw UsageError("levy needs --eps or --eps-grid");
  const auto p = cfg.params;
  const Vector v = r.vector(p.n);
  std::vector<LevyEstimate> estimates;
  long reps = 0;
  if (o.exact) {
    const auto law = enumerate_Wv(v, p);
    for (double eps : cfg.eps_grid) estimates.push_back(levy_exact(law, eps));
    reps = static_cast<long>(p.row_count());
  } else {
    const auto samples = static_cast<std::size_t>(r.given("--reps") ? o.reps : 100000);
    estimates = levy_mc_grid(v, p, cfg.eps_grid, samples, derive_stream(cfg.seed, {"levy"}));
    reps = static_cast<long>(samples);
  }
  std::vector<ResultRow> rows;
  std::vector<std::vector<std::string>> table;
  for (const auto& e : estimates) {
    const bool exact = e.method == LevyMethod::exact;
    rows.push_back({exact ? "levy_exact" : "levy_mc", e.epsilon, e.estimate,
                    exact ? 0.0 : binomial_stderr(e.estimate, reps), reps, p.n, p.d, cfg.seed});
    table.push_back({format_double(e.epsilon), format_double(e.estimate), format_double(e.ci_halfwidth),
                     std::to_string(exact ? 0 : e.sample_count), exact ? "exact" : "monte_carlo"});
  }
  if (!cfg.output_path.empty()) {
    write_results(rows, cfg);
    r.err() << "wrote " << rows.size() << " rows to " << cfg.output_path << '\n';
  }
  if (r.given("--format") && cfg.output_path.empty()) {
    r.out() << format_results(rows, cfg.format);
  } else {
    r.print_table({"epsilon", "estimate", "ci_halfwidth", "samples", "method"}, table);
  }
  return kSuccess;
}

int cmd_tail(Runner& r) {
  const auto cfg = r.experiment_config();
  if (cfg.eps_grid.empty()) throw UsageError("tail needs --eps-grid");
  r.emit(tail_curve(cfg), cfg);
  return kSuccess;
}

int cmd_singularity(Runner& r) {
  const auto cfg = r.experiment_config();
  if (r.opts().exact) {
    const double total = std::pow(static_cast<double>(cfg.params.row_count()), cfg.params.n);
    if (total > static_cast<double>(kSingularityEnumerationLimit))
      throw UsageError("--exact: ensemble too large to enumerate");
  }
  r.emit({singularity_probability(cfg)}, cfg);
  return kSuccess;
}

int cmd_distance(Runner& r) {
  const auto cfg = r.experiment_config();
  if (cfg.eps_grid.empty()) throw UsageError("distance needs --eps-grid");
  const auto report = distance_tail(cfg);
  r.emit(report.rows, cfg);
  r.err() << "corank_one " << report.corank_one << " degenerate " << report.degenerate << " max_identity_error "
          << format_double(report.max_identity_error) << '\n';
  return kSuccess;
}

int cmd_opnorm(Runner& r) {
  const auto cfg = r.experiment_config();
  if (cfg.t_grid.empty()) throw UsageError("opnorm needs --t-grid");
  r.emit(operator_norm_tail(cfg), cfg);
  return kSuccess;
}

int cmd_smallball(Runner& r) {
  const auto cfg = r.experiment_config();
  const Vector v = r.vector(cfg.params.n);
  const auto mode = r.opts().mode == "left" ? SmallBallMode::left : SmallBallMode::right;
  std::optional<double> threshold;
  if (r.given("--threshold")) threshold = r.opts().threshold;
  r.emit({fixed_vector_smallball(cfg, v, mode, threshold)}, cfg);
  return kSuccess;
}

int cmd_covariance(Runner& r) {
  const auto cfg = r.experiment_config();
  const auto p = cfg.params;
  const Matrix sigma = empirical_covariance(p, cfg.reps, derive_stream(cfg.seed, {"covariance"}));
  const double target = static_cast<double>(p.d) / p.n;
  const double deviation = (sigma - target * Matrix::Identity(p.n, p.n)).cwiseAbs().maxCoeff();
  std::vector<std::vector<std::string>> table;
  std::vector<std::string> header{"row"};
  for (int j = 0; j < p.n; ++j) header.push_back(std::to_string(j + 1));
  for (int i = 0; i < p.n; ++i) {
    std::vector<std::string> row{std::to_string(i + 1)};
    for (int j = 0; j < p.n; ++j) {
      std::ostringstream cell;
      cell << std::fixed << std::setprecision(4) << sigma(i, j);
      row.push_back(cell.str());
    }
    table.push_back(row);
  }
  r.print_table(header, table);
  r.out() << "target " << format_double(target) << "\nmax_deviation " << format_double(deviation) << '\n';
  if (!cfg.output_path.empty()) {
    write_results({{"covariance_max_deviation", target, deviation, 0.0, cfg.reps, p.n, p.d, cfg.seed}}, cfg);
  }
  return kSuccess;
}

int cmd_verify(Runner& r) {
  const auto& suites = verify_suites();
  const auto& suite = r.opts().suite;
  if (suite != "all" && std::find(suites.begin(), suites.end(), suite) == suites.end())
    throw UsageError("unknown suite '" + suite + "'");
  const std::uint64_t seed = r.given("--seed") ? r.opts().seed : 20240601;
  return run_verify_suite(suite, seed, r.out()) ? kSuccess : kVerifyFailed;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Experiments on sparse signed random matrices"};
  app.name("combmat");
  app.require_subcommand(1);
  Options o;

  struct Entry {
    CLI::App* app;
    int (*fn)(Runner&);
  };
  std::vector<Entry> entries;
  auto add = [&](const char* name, const char* help, int (*fn)(Runner&)) {
    auto* sub = app.add_subcommand(name, help);
    entries.push_back({sub, fn});
    return Command(*sub, o);
  };

  {
    auto c = add("sample", "print a sampled matrix as CSV", cmd_sample);
    c.ensemble().seed();
    auto* s = entries.back().app;
    s->add_option("--m", o.m, "rows (default n)");
    s->add_option("--out", o.out, "write the matrix here");
  }
  {
    auto c = add("spectrum", "singular values of a sampled or given matrix", cmd_spectrum);
    c.ensemble().seed();
    auto* s = entries.back().app;
    s->add_option("--m", o.m, "rows (default n)");
    s->add_option("--in", o.in, "matrix CSV instead of sampling");
    s->add_flag("--exact", o.exact, "also report the exact rank");
  }
  {
    auto c = add("clcd", "certified CLCD scan of a vector", cmd_clcd);
    c.seed().vector();
    auto* s = entries.back().app;
    s->add_option("--n", o.n, "dimension");
    s->add_option("--alpha", o.alpha, "alpha (L in the pair form)");
    s->add_option("--gamma", o.gamma, "gamma (u in the pair form)");
    s->add_option("--theta-max", o.theta_max, "scan ceiling");
    s->add_option("--grid-step", o.grid_step, "grid step (default 1e-4/||w||)");
    s->add_option("--delta", o.delta, "taxonomy delta");
    s->add_option("--rho", o.rho, "taxonomy rho");
    s->add_option("--pair", o.pair, "scan the pair form with sign pattern p (q = n/2 - p)");
  }
  {
    auto c = add("levy", "Levy concentration of <xi, v>", cmd_levy);
    c.ensemble().seed().reps("Monte Carlo samples (default 100000)").vector().eps_grid().output();
    auto* s = entries.back().app;
    s->add_option("--eps", o.eps_list, "comma-separated epsilons");
    s->add_flag("--exact", o.exact, "exact law by enumeration");
  }
  {
    auto c = add("tail", "smallest singular value tail curve", cmd_tail);
    c.ensemble().seed().reps().eps_grid().output();
  }
  {
    auto c = add("singularity", "probability of a singular matrix", cmd_singularity);
    c.ensemble().seed().reps().output();
    entries.back().app->add_flag("--exact", o.exact, "require exhaustive enumeration");
  }
  {
    auto c = add("distance", "distance from the last row to the span of the others", cmd_distance);
    c.ensemble().seed().reps().eps_grid().output();
  }
  {
    auto c = add("opnorm", "operator norm tail", cmd_opnorm);
    c.ensemble().seed().reps().output();
    auto* s = entries.back().app;
    s->add_option("--t-grid", o.t_grid, "start:stop:count");
    s->add_option("--m", o.m, "rows (default n)");
  }
  {
    auto c = add("smallball", "small-ball frequency of Mv or v^T M", cmd_smallball);
    c.ensemble().seed().reps().vector().output();
    auto* s = entries.back().app;
    s->add_option("--mode", o.mode, "right or left")->check(CLI::IsMember({"right", "left"}));
    s->add_option("--threshold", o.threshold, "override the default threshold");
  }
  {
    auto c = add("covariance", "empirical row covariance", cmd_covariance);
    c.ensemble().seed().reps().output();
  }
  {
    add("verify", "run the self-check suites", cmd_verify);
    auto* s = entries.back().app;
    s->add_option("--suite", o.suite, "identities, ensemble, linalg, clcd, smallball, experiments or all");
    s->add_option("--seed", o.seed, "seed for the randomized checks");
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kSuccess;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  }

  for (const auto& entry : entries) {
    if (!entry.app->parsed()) continue;
    Runner runner(o, *entry.app, out, err);
    try {
      return entry.fn(runner);
    } catch (const IoError& e) {
      err << "error: " << e.what() << '\n';
      return kIoFailure;
    } catch (const UsageError& e) {
      err << "usage error: " << e.what() << '\n' << entry.app->help();
      return kUsage;
    } catch (const std::invalid_argument& e) {
      err << "invalid argument: " << e.what() << '\n';
      return kUsage;
    } catch (const std::length_error& e) {
      err << "too large: " << e.what() << '\n';
      return kUsage;
    } catch (const std::exception& e) {
      err << "error: " << e.what() << '\n';
      return kUsage;
    }
  }
  return kUsage;
}

}  // namespace combmat::cli
