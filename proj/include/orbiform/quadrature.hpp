#pragma once

// Thin wrappers over Boost.Math quadrature with the library's error idiom.

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "orbiform/error.hpp"

namespace orbiform::quadrature {

struct Options {
  double abs_tol = 1e-11;
  unsigned max_depth = 20;
};

namespace detail {

struct Accumulator {
  double error = 0.0;
  double l1 = 0.0;
};

// Bisects until the local Kronrod-Gauss difference is below the local share
// of the absolute tolerance or below the roundoff floor of the panel.
template <typename F>
double adaptive_panel(F& f, double a, double b, double tol, unsigned depth, Accumulator& acc) {
  double error = 0.0, l1 = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, 0, 0.0, &error, &l1);
  const double floor = 64.0 * std::numeric_limits<double>::epsilon() * l1;
  if (depth == 0 || error <= std::max(tol, floor)) {
    acc.error += error;
    acc.l1 += l1;
    return value;
  }
  const double mid = 0.5 * (a + b);
  return adaptive_panel(f, a, mid, 0.5 * tol, depth - 1, acc) +
         adaptive_panel(f, mid, b, 0.5 * tol, depth - 1, acc);
}

}  // namespace detail

/// Adaptive Gauss-Kronrod (7/15) on [a, b] to an absolute tolerance. Accepts
/// a > b (sign flips). Throws QuadratureFailure when the accumulated error
/// estimate exceeds the tolerance plus the roundoff floor.
template <typename F>
double adaptive(F&& f, double a, double b, Options opts = {}) {
  if (a == b) return 0.0;
  detail::Accumulator acc;
  const double value = detail::adaptive_panel(f, std::min(a, b), std::max(a, b), opts.abs_tol,
                                              opts.max_depth, acc);
  const double allowed = opts.abs_tol + 64.0 * std::numeric_limits<double>::epsilon() * acc.l1;
  if (!std::isfinite(value) || !(acc.error <= allowed)) {
    std::ostringstream msg;
    msg << "adaptive Gauss-Kronrod on [" << a << ", " << b << "] reached error " << acc.error
        << " > " << allowed;
    throw Error(ErrorCode::QuadratureFailure, msg.str());
  }
  return a < b ? value : -value;
}

/// Fixed 8-point Gauss-Legendre rule on [a, b].
template <typename F>
double gauss_legendre8(F&& f, double a, double b) {
  return boost::math::quadrature::gauss<double, 8>::integrate(f, a, b);
}

}  // namespace orbiform::quadrature
