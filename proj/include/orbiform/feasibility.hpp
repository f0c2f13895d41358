#pragma once

// Pole transversality T(r), the normal determinant D(r, phi, theta) and the
// minimal feasible radius r0(a) by bisection on
//   min over the grid of D/sin(phi) >= 0  and  T(r) >= 0.
// D/sin(phi) = (r - a)(r + B) - h_phi^2 with B = (h_theta - Ic)/sin(phi), so
// the grid scan only needs a, B and h_phi once; every bisection step is then
// a quadratic in r per sample.

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "orbiform/afunc.hpp"
#include "orbiform/parallel.hpp"
#include "orbiform/quadrature.hpp"
#include "orbiform/shift.hpp"

namespace orbiform {

/// Slack for "nonnegative" in the feasibility predicate.
inline constexpr double kFeasibilitySlack = 1e-9;

inline double T_of_r(const AFunction& f, double r, ShiftMethod method = ShiftMethod::ClosedForm) {
  const double half_pi = 0.5 * kPi;
  return (r - f.value(0.0, 0.0)) * (r - f.value(0.0, half_pi)) +
         h_phi(f, 0.0, 0.0, method) * h_phi(f, 0.0, half_pi, method);
}

namespace detail {

/// Per-sample data of D/sin(phi); valid at every phi including the poles.
struct DetTerms {
  double a = 0.0;
  double b = 0.0;  // (h_theta - Ic) / sin(phi)
  double h_phi = 0.0;

  double ratio(double r) const { return (r - a) * (r + b) - h_phi * h_phi; }
};

inline DetTerms det_terms(const AFunction& f, double phi, double theta) {
  DetTerms d;
  for (const auto& t : f.terms()) {
    const double c = t.coefficient;
    d.a += c * t.weight.value(theta) * t.harmonic.value(phi);
    d.b -= c * t.weight.d2(theta) * t.harmonic.shift_kernel_over_sin(phi);
    d.b -= c * t.weight.value(theta) * t.harmonic.integral_cos_over_sin(phi);
    d.h_phi -= c * t.weight.d1(theta) * t.harmonic.shift_kernel_derivative(phi);
  }
  return d;
}

}  // namespace detail

/// D = (r - a)(int_0^phi (r - a(s,theta)) cos s ds + h_theta) - h_phi^2 sin(phi).
inline double D_of(const AFunction& f, double r, double phi, double theta,
                   ShiftMethod method = ShiftMethod::ClosedForm) {
  const double a = f.value(phi, theta);
  const double sp = std::sin(phi);
  double ic = 0.0;
  if (method == ShiftMethod::ClosedForm) {
    for (const auto& t : f.terms())
      ic += t.coefficient * t.weight.value(theta) * t.harmonic.integral_cos(phi);
  } else {
    ic = quadrature::adaptive([&](double s) { return f.value(s, theta) * std::cos(s); }, 0.0, phi);
  }
  const double hp = h_phi(f, phi, theta, method);
  return (r - a) * (r * sp - ic + h_theta(f, phi, theta, method)) - hp * hp * sp;
}

/// D / sin(phi) in the analytically cancelled form. Throws PoleArgument
/// within the pole threshold, where the transversality T(r) takes over.
inline double D_over_sin(const AFunction& f, double r, double phi, double theta) {
  if (std::abs(std::sin(phi)) < kPoleEpsilon)
    throw Error(ErrorCode::PoleArgument, "D/sin(phi) requested at a pole");
  return detail::det_terms(f, phi, theta).ratio(r);
}

struct FeasibilityOptions {
  int n_phi = 512;
  int n_theta = 512;
  double tol = 1e-5;
  int max_iterations = 40;
  /// Local refinement around the lowest grid minima: window of +-1 cell,
  /// 8x finer, repeated refine_levels times.
  int refine_levels = 1;
  int refine_candidates = 8;
};

struct FeasibilityReport {
  double r0 = 0.0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  double min_T = 0.0;
  double min_D_over_sin = 0.0;
  double argmin_phi = 0.0;
  double argmin_theta = 0.0;
  int n_phi = 0;
  int n_theta = 0;
  int iterations = 0;
  std::size_t samples = 0;
};

/// Sample set for the D/sin(phi) predicate. Covers phi in (0, 2pi) minus the
/// pole rows and theta in [0, pi), i.e. every normal direction once.
class DeterminantField {
 public:
  struct Sample {
    double phi, theta;
    detail::DetTerms terms;
  };

  DeterminantField(const AFunction& f, int n_phi, int n_theta) : f_(f), n_phi_(n_phi), n_theta_(n_theta) {
    std::vector<int> rows;
    for (int i = 1; i < n_phi; ++i)
      if (2 * i != n_phi) rows.push_back(i);
    samples_.resize(rows.size() * static_cast<std::size_t>(n_theta));
    parallel_for(static_cast<std::size_t>(n_theta), [&](std::size_t j) {
      const double th = kPi * static_cast<double>(j) / n_theta;
      for (std::size_t k = 0; k < rows.size(); ++k) {
        const double p = kTwoPi * rows[k] / n_phi;
        samples_[j * rows.size() + k] = {p, th, detail::det_terms(f_, p, th)};
      }
    });
  }

  std::size_t size() const { return samples_.size(); }

  /// Minimum of D/sin(phi) at radius r and its location.
  const Sample* argmin(double r, double* value) const {
    const Sample* best = nullptr;
    double lo = std::numeric_limits<double>::infinity();
    for (const auto& s : samples_) {
      const double v = s.terms.ratio(r);
      if (v < lo) { lo = v; best = &s; }
    }
    if (value) *value = lo;
    return best;
  }

  double min_ratio(double r) const {
    double v = std::numeric_limits<double>::infinity();
    for (const auto& s : samples_) v = std::min(v, s.terms.ratio(r));
    return v;
  }

  /// Adds a finer patch of samples around the lowest minima at radius r.
  void refine(double r, int candidates, double half_phi, double half_theta) {
    std::vector<const Sample*> order;
    order.reserve(samples_.size());
    for (const auto& s : samples_) order.push_back(&s);
    const std::size_t keep = std::min<std::size_t>(order.size(), static_cast<std::size_t>(candidates) * 16);
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep), order.end(),
                      [r](const Sample* x, const Sample* y) { return x->terms.ratio(r) < y->terms.ratio(r); });
    // distinct centres: skip minima inside an already chosen window
    std::vector<std::pair<double, double>> centres;
    for (std::size_t n = 0; n < keep && centres.size() < static_cast<std::size_t>(candidates); ++n) {
      const auto* s = order[n];
      bool near = false;
      for (const auto& c : centres)
        if (std::abs(c.first - s->phi) <= 2 * half_phi && std::abs(c.second - s->theta) <= 2 * half_theta)
          near = true;
      if (!near) centres.emplace_back(s->phi, s->theta);
    }
    for (const auto& [cp, ct] : centres) {
      for (int a = -8; a <= 8; ++a) {
        for (int b = -8; b <= 8; ++b) {
          const double p = cp + half_phi * a / 8.0, t = ct + half_theta * b / 8.0;
          if (std::abs(std::sin(p)) < kPoleEpsilon) continue;
          samples_.push_back({p, t, detail::det_terms(f_, p, t)});
        }
      }
    }
  }

 private:
  AFunction f_;
  int n_phi_, n_theta_;
  std::vector<Sample> samples_;
};

/// Smallest r in [||a||, ||a|| + ||a_theta|| + ||a_thetatheta||] with
/// T(r) >= 0 and D/sin(phi) >= 0 over the sample set, to opts.tol.
inline FeasibilityReport solve_r0(const AFunction& f, const FeasibilityOptions& opts = {}) {
  FeasibilityReport rep;
  rep.n_phi = opts.n_phi;
  rep.n_theta = opts.n_theta;
  const SupNorms& norms = f.norms();
  rep.bracket_lo = norms.a;
  rep.bracket_hi = norms.bracket_upper();

  DeterminantField field(f, opts.n_phi, opts.n_theta);
  auto feasible = [&](double r) {
    return T_of_r(f, r) >= -kFeasibilitySlack && field.min_ratio(r) >= -kFeasibilitySlack;
  };

  if (!feasible(rep.bracket_hi)) {
    std::ostringstream msg;
    msg << "predicate false at the upper bracket end r = " << rep.bracket_hi;
    throw Error(ErrorCode::BracketFailure, msg.str());
  }

  auto bisect = [&](double lo, double hi) {
    if (feasible(lo)) return lo;
    while (hi - lo > opts.tol && rep.iterations < opts.max_iterations) {
      const double mid = 0.5 * (lo + hi);
      ++rep.iterations;
      (feasible(mid) ? hi : lo) = mid;
    }
    return hi;
  };

  double r0 = bisect(rep.bracket_lo, rep.bracket_hi);
  double half_phi = kTwoPi / opts.n_phi, half_theta = kPi / opts.n_theta;
  for (int level = 0; level < opts.refine_levels; ++level) {
    field.refine(r0, opts.refine_candidates, half_phi, half_theta);
    half_phi /= 8.0;
    half_theta /= 8.0;
    // extra samples only tighten the predicate, so r0 can only move up
    if (!feasible(r0)) {
      rep.iterations = 0;
      r0 = bisect(r0, rep.bracket_hi);
    }
  }

  rep.r0 = r0;
  rep.samples = field.size();
  rep.min_T = T_of_r(f, r0);
  double m = 0.0;
  if (const auto* s = field.argmin(r0, &m)) {
    rep.min_D_over_sin = m;
    rep.argmin_phi = s->phi;
    rep.argmin_theta = s->theta;
  }
  return rep;
}

}  // namespace orbiform
