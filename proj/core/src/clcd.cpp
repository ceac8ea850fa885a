#include "combmat/clcd.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "combmat/error.hpp"
#include "combmat/geometry.hpp"

namespace combmat {

double ClcdResult::certified_lower_bound() const {
  if (const auto* b = std::get_if<Bracket>(&outcome)) return b->lo;
  if (const auto* a = std::get_if<AtLeast>(&outcome)) return a->theta;
  return std::get<Unresolved>(outcome).certified_below;
}

std::optional<double> ClcdResult::upper_bound() const {
  if (const auto* b = std::get_if<Bracket>(&outcome)) return b->hi;
  return std::nullopt;
}

double lattice_distance(const Vector& x) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double r = x[i] - std::nearbyint(x[i]);
    sum += r * r;
  }
  return std::sqrt(sum);
}

double LatticeForm::norm() const {
  double weight = 0.0;
  for (const auto& b : blocks) weight += b.multiplicity * b.scale * b.scale;
  return std::sqrt(weight) * base.norm();
}

double LatticeForm::distance(double theta) const {
  double sum = 0.0;
  for (const auto& b : blocks) {
    if (b.multiplicity == 0.0) continue;
    const double t = theta * b.scale;
    double block = 0.0;
    for (Eigen::Index i = 0; i < base.size(); ++i) {
      const double x = t * base[i];
      const double r = x - std::nearbyint(x);
      block += r * r;
    }
    sum += b.multiplicity * block;
  }
  return std::sqrt(sum);
}

double LatticeForm::zero_rounding_limit() const {
  double peak = 0.0;
  for (const auto& b : blocks)
    if (b.multiplicity != 0.0) peak = std::max(peak, std::abs(b.scale) * base.cwiseAbs().maxCoeff());
  return peak == 0.0 ? std::numeric_limits<double>::infinity() : 0.5 / peak;
}

namespace {

constexpr int kGapBudget = 4096;

struct GapFill {
  enum class Status { clean, crossing, exhausted } status = Status::clean;
  double crossing = 0.0;
};

// Certify (a, b] by bisection: a point with F > 0 is clean on a ball of
// radius F / lipschitz.  Stops at the first point with F < 0 (or F == 0,
// reported as exhausted since the strict inequality cannot be decided).
class GapFiller {
 public:
  GapFiller(const std::function<double(double)>& f, double lipschitz) : f_(f), lipschitz_(lipschitz) {}

  GapFill fill(double a, double b) {
    budget_ = kGapBudget;
    GapFill out;
    visit(a, b, out);
    return out;
  }

 private:
  void visit(double a, double b, GapFill& out) {
    if (out.status != GapFill::Status::clean || !(a < b)) return;
    if (budget_-- <= 0 || b - a <= 4 * std::numeric_limits<double>::epsilon() * b) {
      out.status = GapFill::Status::exhausted;
      return;
    }
    const double m = 0.5 * (a + b);
    const double value = f_(m);
    if (value < 0) {
      out = {GapFill::Status::crossing, m};
      return;
    }
    if (value == 0) {
      out.status = GapFill::Status::exhausted;
      return;
    }
    const double r = value / lipschitz_;
    visit(a, m - r, out);
    visit(m + r, b, out);
  }

  const std::function<double(double)>& f_;
  double lipschitz_;
  int budget_ = 0;
};

}  // namespace

ClcdResult scan_form(const LatticeForm& form, const ClcdQuery& q) {
  if (!(q.alpha > 0) || !(q.gamma > 0)) throw InvalidArgument("clcd: alpha and gamma must be positive");
  const double norm = form.norm();
  if (!(norm > 0)) throw InvalidArgument("clcd: zero difference vector");
  const double h = q.step.value_or(1e-4 / norm);
  if (!(h > 0) || !(q.theta_max >= h)) throw InvalidArgument("clcd: need step > 0 and theta_max >= step");

  ClcdResult result;
  result.step = h;
  result.norm = norm;
  const double lipschitz = (1.0 + q.gamma) * norm;
  result.lipschitz_margin = lipschitz * h;

  const std::function<double(double)> F = [&](double theta) {
    return form.distance(theta) - std::min(q.gamma * theta * norm, q.alpha);
  };
  GapFiller filler(F, lipschitz);

  // For theta below the first half-integer breakpoint nothing rounds away
  // from zero, so dist = theta*||w|| > gamma*theta*||w|| >= threshold.
  double covered = form.zero_rounding_limit();
  const auto steps = static_cast<long>(std::ceil(q.theta_max / h - 1e-9));
  for (long k = 1; k <= steps; ++k) {
    const double theta = static_cast<double>(k) * h;
    if (theta <= covered) continue;
    const double gap = F(theta);
    if (gap < 0) {
      // covered >= theta - h: the previous grid point was certified.
      result.outcome = Bracket{theta - h, theta};
      return result;
    }
    if (gap == 0) {
      result.outcome = Unresolved{theta, covered};
      return result;
    }
    const double r = gap / lipschitz;
    if (theta - r > covered) {
      const auto fill = filler.fill(covered, theta - r);
      if (fill.status == GapFill::Status::crossing) {
        result.outcome = Bracket{covered, fill.crossing};
        return result;
      }
      if (fill.status == GapFill::Status::exhausted) {
        result.outcome = Unresolved{theta, covered};
        return result;
      }
    }
    covered = theta + r;
  }
  result.outcome = AtLeast{q.theta_max};
  return result;
}

ClcdResult clcd_scan(const Vector& v, const ClcdQuery& q) {
  LatticeForm form;
  form.base = difference_vector(v).entries;
  return scan_form(form, q);
}

namespace {

void require_pair(int p, int q, const Vector& v) {
  const auto n = static_cast<int>(v.size());
  if (p < 0 || q < 0 || n < 2 || n % 2 != 0 || p + q != n / 2) {
    throw InvalidArgument("pair clcd: need n even and p + q = n/2");
  }
}

}  // namespace

ClcdResult pair_clcd_scan(int p, int q, const Vector& v, const ClcdQuery& query) {
  require_pair(p, q, v);
  const auto n = static_cast<double>(v.size());
  LatticeForm form;
  form.base = difference_vector(v).entries;
  form.blocks = {{n * n / 4.0, 1.0}, {static_cast<double>(p) * q, 2.0}};
  return scan_form(form, query);
}

Vector tensor_vector(int p, int q, const Vector& v) {
  require_pair(p, q, v);
  const auto a = sign_pattern(p, q);
  Vector av(static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) av[static_cast<Eigen::Index>(i)] = a[i];
  const auto da = difference_vector(av).entries;
  const auto dv = difference_vector(v).entries;
  Vector out(da.size() * dv.size());
  Eigen::Index k = 0;
  for (Eigen::Index s = 0; s < da.size(); ++s)
    for (Eigen::Index t = 0; t < dv.size(); ++t) out[k++] = da[s] * dv[t];
  return out;
}

ClcdResult pair_clcd_scan_full(int p, int q, const Vector& v, const ClcdQuery& query) {
  LatticeForm form;
  form.base = tensor_vector(p, q, v);
  return scan_form(form, query);
}

double stability_lower_bound(const Vector& v, const Vector& w, const ClcdQuery& q) {
  if (v.size() != w.size()) throw InvalidArgument("stability_lower_bound: dimension mismatch");
  const double n = static_cast<double>(v.size());
  const double gap = (v - w).norm();
  const double dnorm = difference_vector(v).norm();
  if (!(gap < q.gamma * dnorm / (5.0 * std::sqrt(n)))) {
    throw InvalidArgument("stability_lower_bound: ||v - w|| too large for the stability estimate");
  }
  const double base = clcd_scan(v, q).certified_lower_bound();
  if (gap == 0.0) return base;
  return std::min(base, q.alpha / (4.0 * std::sqrt(n) * gap));
}

int clcd_level(double value, double h0) {
  if (!(h0 > 0)) throw InvalidArgument("clcd_level: H0 must be positive");
  if (value < h0) return -1;
  return static_cast<int>(std::floor(std::log2(value / h0)));
}

}  // namespace combmat
