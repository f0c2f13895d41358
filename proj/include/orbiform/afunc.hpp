#pragma once

// The generating function a(phi, theta) as a finite sum of separable
// trigonometric terms  c * w(theta) * g(k phi),  with odd k >= 3 and a
// theta-weight whose pi-parity matches the harmonic (cos <-> pi-periodic,
// sin <-> pi-antiperiodic). Within this family the oddness a(phi+pi) = -a,
// the closure integrals over [0, pi] and both periodicity conditions hold
// term by term, so everything downstream can use closed forms.

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "orbiform/error.hpp"
#include "orbiform/parallel.hpp"
#include "orbiform/quadrature.hpp"

namespace orbiform {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// |sin(phi)| below this counts as a pole (phi in pi*Z).
inline constexpr double kPoleEpsilon = 1e-8;

namespace detail {

/// Chebyshev polynomial of the second kind, U_n(x); U_{-1} = 0.
inline double chebyshev_u(int n, double x) {
  if (n < 0) return 0.0;
  double prev = 1.0;
  if (n == 0) return prev;
  double cur = 2.0 * x;
  for (int i = 2; i <= n; ++i) {
    const double next = 2.0 * x * cur - prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

/// sin(n phi) / sin(phi), continuous across phi in pi*Z.
inline double sin_ratio(int n, double phi) { return chebyshev_u(n - 1, std::cos(phi)); }

/// (1 - cos(m phi)) / sin(phi) for even m >= 2, continuous across poles.
inline double one_minus_cos_ratio(int m, double phi) {
  const int n = m / 2;
  return 2.0 * std::sin(n * phi) * sin_ratio(n, phi);
}

inline bool on_pi_lattice(double theta) {
  return std::abs(std::remainder(theta, kPi)) <= 1e-14 * std::max(1.0, std::abs(theta));
}

}  // namespace detail

enum class HarmonicKind { Cos, Sin };

/// phi-dependence g(k phi) of one term, plus the closed-form integrals the
/// parametrization needs. k must be odd and >= 3.
struct PhiHarmonic {
  HarmonicKind kind = HarmonicKind::Cos;
  int k = 3;

  double value(double phi) const {
    return kind == HarmonicKind::Cos ? std::cos(k * phi) : std::sin(k * phi);
  }

  double derivative(double phi) const {
    return kind == HarmonicKind::Cos ? -k * std::sin(k * phi) : k * std::cos(k * phi);
  }

  /// int_0^phi g(s) cos(s) ds
  double integral_cos(double phi) const {
    const double km = k - 1.0, kp = k + 1.0;
    if (kind == HarmonicKind::Cos)
      return 0.5 * (std::sin(km * phi) / km + std::sin(kp * phi) / kp);
    return 0.5 * ((1.0 - std::cos(km * phi)) / km + (1.0 - std::cos(kp * phi)) / kp);
  }

  /// int_0^phi g(s) sin(s) ds
  double integral_sin(double phi) const {
    const double km = k - 1.0, kp = k + 1.0;
    if (kind == HarmonicKind::Cos)
      return 0.5 * ((1.0 - std::cos(kp * phi)) / kp - (1.0 - std::cos(km * phi)) / km);
    return 0.5 * (std::sin(km * phi) / km - std::sin(kp * phi) / kp);
  }

  /// integral_cos(phi) / sin(phi), continuous at the poles.
  double integral_cos_over_sin(double phi) const {
    const int km = k - 1, kp = k + 1;
    if (kind == HarmonicKind::Cos)
      return 0.5 * (detail::sin_ratio(km, phi) / km + detail::sin_ratio(kp, phi) / kp);
    return 0.5 * (detail::one_minus_cos_ratio(km, phi) / km +
                  detail::one_minus_cos_ratio(kp, phi) / kp);
  }

  /// int_0^phi sin(phi - s) g(s) ds  (the numerator of the shift).
  double sine_convolution(double phi) const {
    const double denom = k * k - 1.0;
    if (kind == HarmonicKind::Cos) return (std::cos(phi) - std::cos(k * phi)) / denom;
    return (k * std::sin(phi) - std::sin(k * phi)) / denom;
  }

  /// sine_convolution(phi) / sin(phi) as a finite trig sum over even j < k:
  ///   cos: 2 sum sin(j phi) / (k^2-1),   sin: (k-1 - 2 sum cos(j phi)) / (k^2-1).
  double shift_kernel(double phi) const {
    double sum = 0.0;
    if (kind == HarmonicKind::Cos) {
      for (int j = 2; j < k; j += 2) sum += std::sin(j * phi);
      return 2.0 * sum / (k * k - 1.0);
    }
    for (int j = 2; j < k; j += 2) sum += std::cos(j * phi);
    return (k - 1.0 - 2.0 * sum) / (k * k - 1.0);
  }

  double shift_kernel_derivative(double phi) const {
    double sum = 0.0;
    if (kind == HarmonicKind::Cos) {
      for (int j = 2; j < k; j += 2) sum += j * std::cos(j * phi);
    } else {
      for (int j = 2; j < k; j += 2) sum += j * std::sin(j * phi);
    }
    return 2.0 * sum / (k * k - 1.0);
  }

  /// shift_kernel(phi) / sin(phi), continuous at the poles.
  double shift_kernel_over_sin(double phi) const {
    double sum = 0.0;
    if (kind == HarmonicKind::Cos) {
      for (int j = 2; j < k; j += 2) sum += detail::sin_ratio(j, phi);
    } else {
      for (int j = 2; j < k; j += 2) sum += detail::one_minus_cos_ratio(j, phi);
    }
    return 2.0 * sum / (k * k - 1.0);
  }
};

enum class WeightKind { One, Cos2, Sin2, SignedSin2, CosEven, SinEven, CosOdd, SinOdd };

/// theta-dependence w(theta) of one term with analytic first and second
/// derivatives. SignedSin2 = |sin t| sin t is only C^{1,1}; its second
/// derivative is the piecewise formula with value 0 on pi*Z.
struct ThetaWeight {
  WeightKind kind = WeightKind::One;
  int m = 0;

  /// True for w(t + pi) = w(t), false for w(t + pi) = -w(t).
  bool pi_periodic() const {
    switch (kind) {
      case WeightKind::SignedSin2:
      case WeightKind::CosOdd:
      case WeightKind::SinOdd: return false;
      default: return true;
    }
  }

  bool has_parameter() const {
    return kind == WeightKind::CosEven || kind == WeightKind::SinEven ||
           kind == WeightKind::CosOdd || kind == WeightKind::SinOdd;
  }

  /// Angular frequency of the parametrized kinds.
  double frequency() const {
    switch (kind) {
      case WeightKind::CosEven:
      case WeightKind::SinEven: return 2.0 * m;
      case WeightKind::CosOdd:
      case WeightKind::SinOdd: return 2.0 * m - 1.0;
      default: return 0.0;
    }
  }

  double value(double t) const {
    const double n = frequency();
    switch (kind) {
      case WeightKind::One: return 1.0;
      case WeightKind::Cos2: { const double c = std::cos(t); return c * c; }
      case WeightKind::Sin2: { const double s = std::sin(t); return s * s; }
      case WeightKind::SignedSin2: { const double s = std::sin(t); return std::abs(s) * s; }
      case WeightKind::CosEven:
      case WeightKind::CosOdd: return std::cos(n * t);
      case WeightKind::SinEven:
      case WeightKind::SinOdd: return std::sin(n * t);
    }
    return 0.0;
  }

  double d1(double t) const {
    const double n = frequency();
    switch (kind) {
      case WeightKind::One: return 0.0;
      case WeightKind::Cos2: return -std::sin(2.0 * t);
      case WeightKind::Sin2: return std::sin(2.0 * t);
      case WeightKind::SignedSin2: return 2.0 * std::abs(std::sin(t)) * std::cos(t);
      case WeightKind::CosEven:
      case WeightKind::CosOdd: return -n * std::sin(n * t);
      case WeightKind::SinEven:
      case WeightKind::SinOdd: return n * std::cos(n * t);
    }
    return 0.0;
  }

  double d2(double t) const {
    const double n = frequency();
    switch (kind) {
      case WeightKind::One: return 0.0;
      case WeightKind::Cos2: return -2.0 * std::cos(2.0 * t);
      case WeightKind::Sin2: return 2.0 * std::cos(2.0 * t);
      case WeightKind::SignedSin2: {
        if (detail::on_pi_lattice(t)) return 0.0;
        return (std::sin(t) > 0.0 ? 2.0 : -2.0) * std::cos(2.0 * t);
      }
      case WeightKind::CosEven:
      case WeightKind::CosOdd: return -n * n * std::cos(n * t);
      case WeightKind::SinEven:
      case WeightKind::SinOdd: return -n * n * std::sin(n * t);
    }
    return 0.0;
  }
};

struct ATerm {
  double coefficient = 0.0;
  ThetaWeight weight;
  PhiHarmonic harmonic;
};

struct SupNorms {
  double a = 0.0;
  double a_theta = 0.0;
  double a_thetatheta = 0.0;

  /// Upper end of the admissible radius bracket.
  double bracket_upper() const { return a + a_theta + a_thetatheta; }
};

/// Throws InvalidTerm unless the term belongs to the admissible family.
inline void check_term(const ATerm& term, std::size_t index = 0) {
  std::ostringstream where;
  where << "terms[" << index << "]: ";
  if (!std::isfinite(term.coefficient))
    throw Error(ErrorCode::InvalidTerm, where.str() + "coefficient is not finite");
  if (term.harmonic.k < 3 || term.harmonic.k % 2 == 0)
    throw Error(ErrorCode::InvalidTerm,
                where.str() + "harmonic order k=" + std::to_string(term.harmonic.k) +
                    " must be odd and >= 3");
  if (term.weight.has_parameter() && term.weight.m < 1)
    throw Error(ErrorCode::InvalidTerm, where.str() + "weight parameter m must be >= 1");
  const bool wants_periodic = term.harmonic.kind == HarmonicKind::Cos;
  if (term.weight.pi_periodic() != wants_periodic)
    throw Error(ErrorCode::InvalidTerm,
                where.str() + (wants_periodic
                                   ? "cos harmonic needs a pi-periodic theta weight"
                                   : "sin harmonic needs a pi-antiperiodic theta weight"));
}

/// phi-only odd-harmonic series, the input of the planar construction.
struct OddHarmonicSeries {
  struct Term {
    double coefficient = 0.0;
    PhiHarmonic harmonic;
  };
  std::vector<Term> terms;

  double value(double phi) const {
    double s = 0.0;
    for (const auto& t : terms) s += t.coefficient * t.harmonic.value(phi);
    return s;
  }
  double integral_cos(double phi) const {
    double s = 0.0;
    for (const auto& t : terms) s += t.coefficient * t.harmonic.integral_cos(phi);
    return s;
  }
  double integral_sin(double phi) const {
    double s = 0.0;
    for (const auto& t : terms) s += t.coefficient * t.harmonic.integral_sin(phi);
    return s;
  }

  /// Sup norm over a period, grid maximum polished by local zoom.
  double sup_norm(int samples = 4096) const {
    if (terms.empty()) return 0.0;
    double best = 0.0;
    double best_phi = 0.0;
    const double step = kTwoPi / samples;
    for (int i = 0; i < samples; ++i) {
      const double v = std::abs(value(i * step));
      if (v > best) { best = v; best_phi = i * step; }
    }
    double half = step;
    for (int level = 0; level < 8; ++level) {
      double centre = best_phi;
      for (int i = -16; i <= 16; ++i) {
        const double p = centre + half * i / 16.0;
        const double v = std::abs(value(p));
        if (v > best) { best = v; best_phi = p; }
      }
      half /= 8.0;
    }
    return best;
  }
};

class AFunction;
struct NormOptions;
SupNorms sup_norms(const AFunction& f, const NormOptions& opts);

struct NormOptions {
  int n_phi = 1024;
  int n_theta = 1024;
  /// Local maxima of the base grid that get zoomed into.
  int zoom_candidates = 8;
  /// Each zoom level shrinks the window by 8x.
  int zoom_levels = 6;
};

/// a(phi, theta) = sum of admissible terms. Immutable; copies share the
/// lazily computed norm cache.
class AFunction {
 public:
  AFunction() : cache_(std::make_shared<Cache>()) {}

  explicit AFunction(std::vector<ATerm> terms)
      : terms_(std::move(terms)), cache_(std::make_shared<Cache>()) {
    for (std::size_t i = 0; i < terms_.size(); ++i) check_term(terms_[i], i);
  }

  std::span<const ATerm> terms() const { return terms_; }
  bool is_zero() const {
    return std::all_of(terms_.begin(), terms_.end(),
                       [](const ATerm& t) { return t.coefficient == 0.0; });
  }
  bool theta_independent() const {
    return std::all_of(terms_.begin(), terms_.end(), [](const ATerm& t) {
      return t.coefficient == 0.0 || t.weight.kind == WeightKind::One;
    });
  }

  double value(double phi, double theta) const {
    double s = 0.0;
    for (const auto& t : terms_) s += t.coefficient * t.weight.value(theta) * t.harmonic.value(phi);
    return s;
  }
  double d_theta(double phi, double theta) const {
    double s = 0.0;
    for (const auto& t : terms_) s += t.coefficient * t.weight.d1(theta) * t.harmonic.value(phi);
    return s;
  }
  double d_thetatheta(double phi, double theta) const {
    double s = 0.0;
    for (const auto& t : terms_) s += t.coefficient * t.weight.d2(theta) * t.harmonic.value(phi);
    return s;
  }

  /// phi -> a(phi, theta) as a planar series.
  OddHarmonicSeries slice(double theta) const {
    OddHarmonicSeries out;
    for (const auto& t : terms_)
      out.terms.push_back({t.coefficient * t.weight.value(theta), t.harmonic});
    return out;
  }

  /// Sup norms with default options, computed once per function.
  const SupNorms& norms() const {
    std::call_once(cache_->once, [this] { cache_->norms = sup_norms(*this, NormOptions{}); });
    return cache_->norms;
  }

 private:
  struct Cache {
    std::once_flag once;
    SupNorms norms;
  };
  std::vector<ATerm> terms_;
  std::shared_ptr<Cache> cache_;
};

/// eval_a and its theta-derivatives as free functions.
inline double eval_a(const AFunction& f, double phi, double theta) { return f.value(phi, theta); }
inline double eval_a_theta(const AFunction& f, double phi, double theta) {
  return f.d_theta(phi, theta);
}
inline double eval_a_thetatheta(const AFunction& f, double phi, double theta) {
  return f.d_thetatheta(phi, theta);
}

namespace detail {

enum class NormQuantity { Value, DTheta, DThetaTheta };

inline double evaluate(const AFunction& f, NormQuantity q, double phi, double theta) {
  switch (q) {
    case NormQuantity::Value: return f.value(phi, theta);
    case NormQuantity::DTheta: return f.d_theta(phi, theta);
    case NormQuantity::DThetaTheta: return f.d_thetatheta(phi, theta);
  }
  return 0.0;
}

// Grid maximum of |q| over phi in [0, 2pi), theta in [0, pi) (the other half
// of the theta period repeats through a(-phi, theta + pi) = a(phi, theta)),
// followed by zooming into the best local maxima.
inline double grid_sup(const AFunction& f, NormQuantity q, const NormOptions& opts) {
  const int np = opts.n_phi, nt = opts.n_theta;
  const double dp = kTwoPi / np, dt = kPi / nt;
  const auto terms = f.terms();

  std::vector<double> harm(terms.size() * np), weight(terms.size() * nt);
  for (std::size_t t = 0; t < terms.size(); ++t) {
    for (int i = 0; i < np; ++i) harm[t * np + i] = terms[t].harmonic.value(i * dp);
    for (int j = 0; j < nt; ++j) {
      const double th = j * dt;
      const auto& w = terms[t].weight;
      const double wv = q == NormQuantity::Value ? w.value(th)
                        : q == NormQuantity::DTheta ? w.d1(th) : w.d2(th);
      weight[t * nt + j] = terms[t].coefficient * wv;
    }
  }
  std::vector<double> grid(static_cast<std::size_t>(np) * nt, 0.0);
  parallel_for(static_cast<std::size_t>(nt), [&](std::size_t j) {
    for (std::size_t t = 0; t < terms.size(); ++t) {
      const double wj = weight[t * nt + j];
      if (wj == 0.0) continue;
      for (int i = 0; i < np; ++i) grid[j * np + i] += wj * harm[t * np + i];
    }
  });
  auto at = [&](int i, int j) {
    i = ((i % np) + np) % np;
    // theta wraps with the phi reflection
    if (j < 0) { j += nt; i = (np - i) % np; }
    if (j >= nt) { j -= nt; i = (np - i) % np; }
    return std::abs(grid[static_cast<std::size_t>(j) * np + i]);
  };

  struct Candidate { double value; int i, j; };
  std::vector<Candidate> maxima;
  double best = 0.0;
  for (int j = 0; j < nt; ++j) {
    for (int i = 0; i < np; ++i) {
      const double v = at(i, j);
      best = std::max(best, v);
      bool local = v > 0.0;
      for (int dj = -1; dj <= 1 && local; ++dj)
        for (int di = -1; di <= 1 && local; ++di)
          if ((di || dj) && at(i + di, j + dj) > v) local = false;
      if (local) maxima.push_back({v, i, j});
    }
  }
  std::sort(maxima.begin(), maxima.end(),
            [](const Candidate& a, const Candidate& b) { return a.value > b.value; });
  if (maxima.size() > static_cast<std::size_t>(opts.zoom_candidates))
    maxima.resize(static_cast<std::size_t>(opts.zoom_candidates));

  for (const auto& c : maxima) {
    double cp = c.i * dp, ct = c.j * dt;
    double hp = dp, ht = dt;
    for (int level = 0; level < opts.zoom_levels; ++level) {
      double bp = cp, bt = ct;
      for (int a = -8; a <= 8; ++a) {
        for (int b = -8; b <= 8; ++b) {
          const double p = cp + hp * a / 8.0, t = ct + ht * b / 8.0;
          const double v = std::abs(evaluate(f, q, p, t));
          if (v > best) best = v;
          if (v >= std::abs(evaluate(f, q, bp, bt))) { bp = p; bt = t; }
        }
      }
      cp = bp; ct = bt;
      hp /= 8.0; ht /= 8.0;
    }
  }
  return best;
}

}  // namespace detail

/// Sup norms (||a||, ||d_theta a||, ||d_theta^2 a||): grid maxima refined
/// locally around the largest grid maxima. Never decreases under refinement.
inline SupNorms sup_norms(const AFunction& f, const NormOptions& opts) {
  if (f.is_zero()) return {};
  return {detail::grid_sup(f, detail::NormQuantity::Value, opts),
          detail::grid_sup(f, detail::NormQuantity::DTheta, opts),
          detail::grid_sup(f, detail::NormQuantity::DThetaTheta, opts)};
}

struct ConditionResidual {
  std::string name;
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool pass = true;
};

struct ValidationReport {
  std::vector<ConditionResidual> conditions;

  bool valid() const {
    return std::all_of(conditions.begin(), conditions.end(),
                       [](const ConditionResidual& c) { return c.pass; });
  }
};

struct ValidateOptions {
  int n_phi = 256;
  int n_theta = 256;
  /// theta samples for the closure integrals.
  int quadrature_thetas = 64;
  double quadrature_tolerance = 1e-10;
  /// Sampled identities scale with the coefficient mass.
  double identity_tolerance = 1e-12;
  bool throw_on_violation = true;
};

/// Checks term shapes (InvalidTerm) and then measures the oddness, closure,
/// and periodicity residuals on a grid. Throws ConditionViolated on a
/// residual above tolerance unless opts.throw_on_violation is false.
inline ValidationReport validate(std::span<const ATerm> terms, const ValidateOptions& opts = {}) {
  for (std::size_t i = 0; i < terms.size(); ++i) check_term(terms[i], i);
  const AFunction f{std::vector<ATerm>(terms.begin(), terms.end())};

  double mass = 1.0;
  for (const auto& t : terms) mass += std::abs(t.coefficient);
  const double id_tol = opts.identity_tolerance * mass;

  double odd = 0.0, per1 = 0.0, per2 = 0.0;
  for (int j = 0; j < opts.n_theta; ++j) {
    const double th = kTwoPi * j / opts.n_theta;
    for (int i = 0; i < opts.n_phi; ++i) {
      const double ph = kTwoPi * i / opts.n_phi;
      const double v = f.value(ph, th);
      odd = std::max(odd, std::abs(f.value(ph + kPi, th) + v));
      per1 = std::max(per1, std::abs(f.value(ph + kTwoPi, th) - v));
      per1 = std::max(per1, std::abs(f.value(ph, th + kTwoPi) - v));
      per2 = std::max(per2, std::abs(f.value(-ph, th + kPi) - v));
    }
  }

  double closure_cos = 0.0, closure_sin = 0.0;
  for (int j = 0; j < opts.quadrature_thetas; ++j) {
    const double th = kPi * (j + 0.5) / opts.quadrature_thetas;
    closure_cos = std::max(closure_cos, std::abs(quadrature::adaptive(
        [&](double s) { return f.value(s, th) * std::cos(s); }, 0.0, kPi)));
    closure_sin = std::max(closure_sin, std::abs(quadrature::adaptive(
        [&](double s) { return f.value(s, th) * std::sin(s); }, 0.0, kPi)));
  }

  ValidationReport report;
  auto add = [&](std::string name, double residual, double tol) {
    report.conditions.push_back({std::move(name), residual, tol, residual <= tol});
  };
  add("oddness a(phi+pi,theta) = -a(phi,theta)", odd, id_tol);
  add("closure int_0^pi a(s,theta) cos(s) ds = 0", closure_cos, opts.quadrature_tolerance);
  add("closure int_0^pi a(s,theta) sin(s) ds = 0", closure_sin, opts.quadrature_tolerance);
  add("periodicity a(phi+2pi,theta) = a(phi,theta+2pi) = a(phi,theta)", per1, id_tol);
  add("periodicity a(-phi,theta+pi) = a(phi,theta)", per2, id_tol);

  if (opts.throw_on_violation && !report.valid()) {
    for (const auto& c : report.conditions) {
      if (!c.pass) {
        std::ostringstream msg;
        msg << c.name << " residual " << c.max_residual << " > " << c.tolerance;
        throw Error(ErrorCode::ConditionViolated, msg.str());
      }
    }
  }
  return report;
}

inline ValidationReport validate(const AFunction& f, const ValidateOptions& opts = {}) {
  return validate(f.terms(), opts);
}

}  // namespace orbiform
