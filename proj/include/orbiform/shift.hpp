#pragma once

// Shift field h(phi, theta) = -int_0^phi sin(phi - s) a_theta(s, theta) ds / sin(phi)
// and its partials. The default route sums per-harmonic closed forms, which
// are finite trig sums and therefore continuous through the poles. The
// quadrature route integrates the defining expressions directly and is kept
// as an independent cross-check.

#include <array>
#include <cmath>

#include "orbiform/afunc.hpp"
#include "orbiform/quadrature.hpp"

namespace orbiform {

enum class ShiftMethod { ClosedForm, Quadrature };

struct ShiftSample {
  double h = 0.0;
  double h_phi = 0.0;
  double h_theta = 0.0;
  double phi = 0.0;
  double theta = 0.0;
};

namespace detail {

/// Reduces phi to [0, pi); h and its partials are pi-periodic in phi.
inline double reduce_to_half_period(double phi) {
  double r = std::fmod(phi, kPi);
  if (r < 0.0) r += kPi;
  return r;
}

// int_0^phi sin(phi - s) q(s) ds for a q with vanishing closure integrals
// over [0, pi]; past pi/2 the complementary integral over [phi, pi] avoids
// cancellation.
template <class Q>
double sine_convolution_quad(Q&& q, double phi) {
  if (phi <= 0.5 * kPi)
    return quadrature::adaptive([&](double s) { return std::sin(phi - s) * q(s); }, 0.0, phi);
  return -quadrature::adaptive([&](double s) { return std::sin(phi - s) * q(s); }, phi, kPi);
}

template <class Q>
double sine_moment_quad(Q&& q, double phi) {
  if (phi <= 0.5 * kPi)
    return quadrature::adaptive([&](double s) { return std::sin(s) * q(s); }, 0.0, phi);
  return -quadrature::adaptive([&](double s) { return std::sin(s) * q(s); }, phi, kPi);
}

inline double h_phi_quad_regular(const AFunction& f, double phi, double theta) {
  const double s = std::sin(phi);
  return -sine_moment_quad([&](double t) { return f.d_theta(t, theta); }, phi) / (s * s);
}

}  // namespace detail

inline double h_value(const AFunction& f, double phi, double theta,
                      ShiftMethod method = ShiftMethod::ClosedForm) {
  if (method == ShiftMethod::ClosedForm) {
    double s = 0.0;
    for (const auto& t : f.terms())
      s += t.coefficient * t.weight.d1(theta) * t.harmonic.shift_kernel(phi);
    return -s;
  }
  const double p = detail::reduce_to_half_period(phi);
  const double sp = std::sin(p);
  if (sp < kPoleEpsilon) return 0.0;
  return -detail::sine_convolution_quad([&](double t) { return f.d_theta(t, theta); }, p) / sp;
}

inline double h_theta(const AFunction& f, double phi, double theta,
                      ShiftMethod method = ShiftMethod::ClosedForm) {
  if (method == ShiftMethod::ClosedForm) {
    double s = 0.0;
    for (const auto& t : f.terms())
      s += t.coefficient * t.weight.d2(theta) * t.harmonic.shift_kernel(phi);
    return -s;
  }
  const double p = detail::reduce_to_half_period(phi);
  const double sp = std::sin(p);
  if (sp < kPoleEpsilon) return 0.0;
  return -detail::sine_convolution_quad([&](double t) { return f.d_thetatheta(t, theta); }, p) /
         sp;
}

/// h_phi = -int_0^phi sin(s) a_theta(s, theta) ds / sin^2(phi). On the
/// quadrature route, points within 1e-3 of a pole are extrapolated from
/// three regular samples on the same side (quadratic Lagrange).
inline double h_phi(const AFunction& f, double phi, double theta,
                    ShiftMethod method = ShiftMethod::ClosedForm) {
  if (method == ShiftMethod::ClosedForm) {
    double s = 0.0;
    for (const auto& t : f.terms())
      s += t.coefficient * t.weight.d1(theta) * t.harmonic.shift_kernel_derivative(phi);
    return -s;
  }
  const double p = detail::reduce_to_half_period(phi);
  constexpr double kNear = 1e-3;
  const double to_pole = p < 0.5 * kPi ? p : p - kPi;
  if (std::abs(to_pole) >= kNear) return detail::h_phi_quad_regular(f, p, theta);

  const double pole = p < 0.5 * kPi ? 0.0 : kPi;
  const double side = to_pole > 0.0 ? 1.0 : to_pole < 0.0 ? -1.0 : (pole == 0.0 ? 1.0 : -1.0);
  const std::array<double, 3> nodes{kNear, 2.0 * kNear, 3.0 * kNear};
  std::array<double, 3> values{};
  for (int i = 0; i < 3; ++i)
    values[i] = detail::h_phi_quad_regular(f, pole + side * nodes[i], theta);
  const double x = std::abs(to_pole);
  double result = 0.0;
  for (int i = 0; i < 3; ++i) {
    double basis = 1.0;
    for (int j = 0; j < 3; ++j)
      if (j != i) basis *= (x - nodes[j]) / (nodes[i] - nodes[j]);
    result += basis * values[i];
  }
  return result;
}

inline ShiftSample shift_sample(const AFunction& f, double phi, double theta,
                                ShiftMethod method = ShiftMethod::ClosedForm) {
  return {h_value(f, phi, theta, method), h_phi(f, phi, theta, method),
          h_theta(f, phi, theta, method), phi, theta};
}

/// |Q(eps) - h(phi, theta)| where Q(eps) is the quadrature of
/// int_0^phi (a(s,theta) - a(s,theta+eps))/eps * sin(phi - s) ds / sin(phi).
/// Tends to zero at rate O(eps); the rate is O(eps^2) wherever h_theta = 0.
inline double h_difference_quotient_check(const AFunction& f, double phi, double theta,
                                          double eps) {
  const double sp = std::sin(phi);
  if (std::abs(sp) < kPoleEpsilon)
    throw Error(ErrorCode::PoleArgument, "difference quotient needs |sin(phi)| >= 1e-8");
  // the quotient carries roundoff of order 1e-16 / eps, so the tolerance scales with it
  const quadrature::Options opts{1e-11 + 1e-14 / std::abs(eps)};
  const double integral = quadrature::adaptive(
      [&](double s) {
        return (f.value(s, theta) - f.value(s, theta + eps)) / eps * std::sin(phi - s);
      },
      0.0, phi, opts);
  return std::abs(integral / sp - h_value(f, phi, theta));
}

}  // namespace orbiform
