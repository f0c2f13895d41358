#pragma once

// Shared fixtures and independent oracles for the unit tests.

#include <cmath>
#include <random>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "orbiform/afunc.hpp"

namespace orbiform::test {

inline ATerm term(double c, WeightKind w, HarmonicKind h, int k, int m = 0) {
  return {c, {w, m}, {h, k}};
}

/// cos^2(t)(-cos 3p) + |sin t| sin t sin 3p
inline AFunction combiaa() {
  return AFunction({term(-1, WeightKind::Cos2, HarmonicKind::Cos, 3),
                    term(1, WeightKind::SignedSin2, HarmonicKind::Sin, 3)});
}

/// -cos^2(t) cos 3p, the function with closed-form shift -(1/4) sin 2t sin 2p.
inline AFunction single_cos3() {
  return AFunction({term(-1, WeightKind::Cos2, HarmonicKind::Cos, 3)});
}

/// -cos 3p, independent of theta.
inline AFunction theta_free() {
  return AFunction({term(-1, WeightKind::One, HarmonicKind::Cos, 3)});
}

inline std::vector<std::vector<ATerm>> gallery_terms() {
  using W = WeightKind;
  const auto C = HarmonicKind::Cos, S = HarmonicKind::Sin;
  return {{term(-1, W::Cos2, C, 3)},
          {term(-1, W::Cos2, C, 3), term(1, W::Sin2, C, 3)},
          {term(-1, W::Cos2, C, 3), term(1, W::Sin2, C, 5)},
          {term(1, W::Cos2, C, 3), term(1, W::Sin2, C, 5)},
          {term(-1, W::Cos2, C, 5), term(1, W::Sin2, C, 5)},
          {term(-1, W::Cos2, C, 5), term(1, W::SignedSin2, S, 5)}};
}

/// Random admissible function with 1..4 terms drawn from the whole family.
inline AFunction random_function(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> nterms(1, 4), kind(0, 7), kk(1, 3), mm(1, 3);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::vector<ATerm> terms;
  const int n = nterms(rng);
  for (int i = 0; i < n; ++i) {
    ThetaWeight w{static_cast<WeightKind>(kind(rng)), 0};
    if (w.has_parameter()) w.m = mm(rng);
    const auto h = w.pi_periodic() ? HarmonicKind::Cos : HarmonicKind::Sin;
    terms.push_back({coef(rng), w, {h, 2 * kk(rng) + 1}});
  }
  return AFunction(terms);
}

inline bool has_signed_weight(const AFunction& f) {
  for (const auto& t : f.terms())
    if (t.weight.kind == WeightKind::SignedSin2) return true;
  return false;
}

/// Tanh-sinh quadrature, a different rule from the library's Gauss-Kronrod.
template <class F>
double oracle_integral(F&& f, double a, double b) {
  if (a == b) return 0.0;
  boost::math::quadrature::tanh_sinh<double> ts;
  return ts.integrate(f, a, b, 1e-14);
}

template <class F>
double central_difference(F&& f, double x, double step) {
  return (f(x + step) - f(x - step)) / (2.0 * step);
}

}  // namespace orbiform::test
