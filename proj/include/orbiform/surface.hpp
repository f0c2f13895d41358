#pragma once

// Frames, the planar constant-width curve, and the 3D boundary
//   X(phi, theta) = X0 + int_0^phi (r - a(s, theta)) V(s, theta) ds + h(phi, theta) W(theta)
// together with its shadow variant X_oh = X - h Psi and its partials.

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "orbiform/afunc.hpp"
#include "orbiform/parallel.hpp"
#include "orbiform/quadrature.hpp"
#include "orbiform/shift.hpp"

namespace orbiform {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

/// Moving basis (U, V, W) and the fixed-theta basis (Theta, Psi, Xi).
struct Frame {
  Vec3 U, V, W;
  Vec3 Theta, Psi, Xi;
};

inline Vec3 unit_direction(double phi, double theta) {
  return {std::sin(phi) * std::cos(theta), std::sin(phi) * std::sin(theta), std::cos(phi)};
}

inline Frame frame_at(double phi, double theta) {
  const double sp = std::sin(phi), cp = std::cos(phi);
  const double st = std::sin(theta), ct = std::cos(theta);
  Frame fr;
  fr.Theta = {ct, st, 0.0};
  fr.Psi = {-st, ct, 0.0};
  fr.Xi = {0.0, 0.0, 1.0};
  fr.U = sp * fr.Theta + cp * fr.Xi;
  fr.V = cp * fr.Theta - sp * fr.Xi;
  fr.W = fr.Psi;
  return fr;
}

enum class IntegrationMethod { ClosedForm, Quadrature };

// ---------------------------------------------------------------------------
// Planar curve  x(phi) = x0 + int_0^phi (r - a(s)) (-sin s, cos s) ds

struct Curve2D {
  std::vector<double> phi;
  std::vector<Vec2> points;
  double r = 0.0;
  Vec2 x0 = Vec2::Zero();
};

inline Vec2 curve2d_point(const OddHarmonicSeries& a, double r, const Vec2& x0, double phi,
                          IntegrationMethod method = IntegrationMethod::ClosedForm) {
  double is, ic;
  if (method == IntegrationMethod::ClosedForm) {
    is = a.integral_sin(phi);
    ic = a.integral_cos(phi);
  } else {
    is = quadrature::adaptive([&](double s) { return a.value(s) * std::sin(s); }, 0.0, phi);
    ic = quadrature::adaptive([&](double s) { return a.value(s) * std::cos(s); }, 0.0, phi);
  }
  return x0 + Vec2(r * (std::cos(phi) - 1.0) + is, r * std::sin(phi) - ic);
}

/// Samples n+1 points over [0, 2pi]. Throws RadiusTooSmall if r < ||a||.
inline Curve2D sample_curve(const OddHarmonicSeries& a, double r, const Vec2& x0, int n,
                            IntegrationMethod method = IntegrationMethod::ClosedForm) {
  const double norm = a.sup_norm();
  if (r < norm - 1e-12) {
    std::ostringstream msg;
    msg << "r = " << r << " is below ||a|| = " << norm;
    throw Error(ErrorCode::RadiusTooSmall, msg.str());
  }
  if (n < 1) throw Error(ErrorCode::Usage, "curve needs at least one segment");
  Curve2D c;
  c.r = r;
  c.x0 = x0;
  for (int i = 0; i <= n; ++i) {
    const double p = kTwoPi * i / n;
    c.phi.push_back(p);
    c.points.push_back(curve2d_point(a, r, x0, p, method));
  }
  return c;
}

// ---------------------------------------------------------------------------
// 3D surface

inline Vec3 default_anchor(double r) { return {0.0, 0.0, r}; }

namespace detail {

struct MomentPair {
  double ic = 0.0;  // int_0^phi a cos s ds
  double is = 0.0;  // int_0^phi a sin s ds
};

inline MomentPair a_moments(const AFunction& f, double phi, double theta,
                            IntegrationMethod method) {
  MomentPair m;
  if (method == IntegrationMethod::ClosedForm) {
    for (const auto& t : f.terms()) {
      const double cw = t.coefficient * t.weight.value(theta);
      m.ic += cw * t.harmonic.integral_cos(phi);
      m.is += cw * t.harmonic.integral_sin(phi);
    }
    return m;
  }
  m.ic = quadrature::adaptive([&](double s) { return f.value(s, theta) * std::cos(s); }, 0.0, phi);
  m.is = quadrature::adaptive([&](double s) { return f.value(s, theta) * std::sin(s); }, 0.0, phi);
  return m;
}

inline ShiftMethod shift_method(IntegrationMethod m) {
  return m == IntegrationMethod::ClosedForm ? ShiftMethod::ClosedForm : ShiftMethod::Quadrature;
}

inline Vec3 assemble(const Frame& fr, const Vec3& x0, double r, double phi, const MomentPair& m,
                     double h) {
  return x0 + (r * std::sin(phi) - m.ic) * fr.Theta - (r * (1.0 - std::cos(phi)) - m.is) * fr.Xi +
         h * fr.Psi;
}

}  // namespace detail

inline Vec3 surface_point(const AFunction& f, double r, const Vec3& x0, double phi, double theta,
                          IntegrationMethod method = IntegrationMethod::ClosedForm) {
  const Frame fr = frame_at(phi, theta);
  const auto m = detail::a_moments(f, phi, theta, method);
  return detail::assemble(fr, x0, r, phi, m, h_value(f, phi, theta, detail::shift_method(method)));
}

/// X without the shift: X_oh = X - h Psi.
inline Vec3 surface_point_oh(const AFunction& f, double r, const Vec3& x0, double phi,
                             double theta,
                             IntegrationMethod method = IntegrationMethod::ClosedForm) {
  const Frame fr = frame_at(phi, theta);
  const auto m = detail::a_moments(f, phi, theta, method);
  return detail::assemble(fr, x0, r, phi, m, 0.0);
}

struct SurfacePartials {
  Vec3 d_phi;
  Vec3 d_theta;
};

/// d_phi X = (r - a) V + h_phi Psi,  d_theta X = sin(phi) h_phi V + (r sin(phi) - Ic + h_theta) Psi.
/// Both are orthogonal to U.
inline SurfacePartials surface_partials(const AFunction& f, double r, double phi, double theta,
                                        IntegrationMethod method = IntegrationMethod::ClosedForm) {
  const Frame fr = frame_at(phi, theta);
  const auto sm = detail::shift_method(method);
  const double a = f.value(phi, theta);
  const double hp = h_phi(f, phi, theta, sm);
  const double ht = h_theta(f, phi, theta, sm);
  const auto m = detail::a_moments(f, phi, theta, method);
  const double sp = std::sin(phi);
  return {(r - a) * fr.V + hp * fr.Psi, sp * hp * fr.V + (r * sp - m.ic + ht) * fr.Psi};
}

/// Sampled boundary over S = [0, 2pi] x [0, pi] on an (nphi+1) x (ntheta+1)
/// grid, phi the fast axis. The seam phi = 2pi duplicates phi = 0, and the
/// row theta = pi duplicates theta = 0 through (phi, pi) ~ (2pi - phi, 0).
struct BodySurface {
  AFunction f;
  double r = 0.0;
  Vec3 x0 = Vec3::Zero();
  int nphi = 0;
  int ntheta = 0;
  bool shadow_variant = false;
  std::vector<Vec3> points;
  std::vector<std::string> warnings;

  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * (nphi + 1) + static_cast<std::size_t>(i);
  }
  const Vec3& at(int i, int j) const { return points[index(i, j)]; }
  double phi(int i) const { return kTwoPi * i / nphi; }
  double theta(int j) const { return kPi * j / ntheta; }
  Vec3 direction(int i, int j) const { return unit_direction(phi(i), theta(j)); }
};

struct SampleOptions {
  IntegrationMethod method = IntegrationMethod::ClosedForm;
  /// Sample X_oh instead of X.
  bool shadow_variant = false;
  /// If set, radii below it are flagged (or rejected when strict).
  std::optional<double> feasible_radius;
  bool strict = false;
};

namespace detail {

// One theta row by per-cell 8-point Gauss-Legendre, accumulating the moments
// of a and a_theta along phi so the row costs O(nphi).
inline void fill_row_incremental(BodySurface& body, int j) {
  const double th = body.theta(j);
  const AFunction& f = body.f;
  double ic = 0.0, is = 0.0, dc = 0.0, ds = 0.0;
  for (int i = 0; i <= body.nphi; ++i) {
    const double p = body.phi(i);
    if (i > 0) {
      const double lo = body.phi(i - 1);
      ic += quadrature::gauss_legendre8([&](double s) { return f.value(s, th) * std::cos(s); }, lo, p);
      is += quadrature::gauss_legendre8([&](double s) { return f.value(s, th) * std::sin(s); }, lo, p);
      dc += quadrature::gauss_legendre8([&](double s) { return f.d_theta(s, th) * std::cos(s); }, lo, p);
      ds += quadrature::gauss_legendre8([&](double s) { return f.d_theta(s, th) * std::sin(s); }, lo, p);
    }
    // h sin(phi) = -(sin(phi) dc - cos(phi) ds)
    const double sp = std::sin(p);
    const double h = std::abs(sp) < kPoleEpsilon || body.shadow_variant
                         ? 0.0
                         : -(dc - std::cos(p) * ds / sp);
    body.points[body.index(i, j)] = assemble(frame_at(p, th), body.x0, body.r, p, {ic, is}, h);
  }
}

}  // namespace detail

inline BodySurface sample_grid(const AFunction& f, double r, const Vec3& x0, int nphi, int ntheta,
                               const SampleOptions& opts = {}) {
  if (nphi < 8 || nphi % 2 != 0)
    throw Error(ErrorCode::Usage, "nphi must be even and >= 8");
  if (ntheta < 4) throw Error(ErrorCode::Usage, "ntheta must be >= 4");
  BodySurface body;
  body.f = f;
  body.r = r;
  body.x0 = x0;
  body.nphi = nphi;
  body.ntheta = ntheta;
  body.shadow_variant = opts.shadow_variant;
  body.points.resize(static_cast<std::size_t>(nphi + 1) * (ntheta + 1));

  if (opts.feasible_radius && r < *opts.feasible_radius - 1e-12) {
    std::ostringstream msg;
    msg << "r = " << r << " is below the feasible radius " << *opts.feasible_radius
        << "; the sampled surface is not a convex boundary";
    if (opts.strict) throw Error(ErrorCode::RadiusBelowFeasible, msg.str());
    body.warnings.push_back(msg.str());
  }

  parallel_for(static_cast<std::size_t>(ntheta + 1), [&](std::size_t jj) {
    const int j = static_cast<int>(jj);
    if (opts.method == IntegrationMethod::Quadrature) {
      detail::fill_row_incremental(body, j);
      return;
    }
    const double th = body.theta(j);
    for (int i = 0; i <= nphi; ++i) {
      const double p = body.phi(i);
      body.points[body.index(i, j)] = opts.shadow_variant
                                          ? surface_point_oh(f, r, x0, p, th)
                                          : surface_point(f, r, x0, p, th);
    }
  });
  return body;
}

}  // namespace orbiform
