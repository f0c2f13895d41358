#pragma once

// Checks on a sampled body: width constancy through the discrete support
// function, the median-surface conditions, the inverse-Gauss-map Lipschitz
// bound, sphere-distance equivalences, support-plane convexity, the radial
// bound and the Lipschitz bounds of X_oh.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "orbiform/parallel.hpp"
#include "orbiform/surface.hpp"

namespace orbiform {

struct CheckResult {
  std::string name;
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool pass = true;
  std::size_t samples = 0;
  std::string note;
};

struct VerificationReport {
  std::vector<CheckResult> checks;

  bool pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
  }
  const CheckResult* find(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }
};

inline CheckResult make_check(std::string name, double residual, double tol, std::size_t samples,
                              std::string note = {}) {
  return {std::move(name), residual, tol, residual <= tol, samples, std::move(note)};
}

// ---------------------------------------------------------------------------
// Directions

/// (phi, theta) in S with U(phi, theta) = omega.
inline std::pair<double, double> direction_coordinates(const Vec3& omega) {
  const double phi = std::acos(std::clamp(omega.z(), -1.0, 1.0));
  double theta = std::atan2(omega.y(), omega.x());
  if (theta < 0.0) return {kTwoPi - phi, theta + kPi};
  if (theta > kPi) theta = kPi;
  return {phi, theta};
}

/// n quasi-uniform unit vectors (golden-angle spiral).
inline std::vector<Vec3> fibonacci_directions(int n) {
  std::vector<Vec3> out;
  out.reserve(static_cast<std::size_t>(n));
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  for (int k = 0; k < n; ++k) {
    const double z = 1.0 - (2.0 * k + 1.0) / n;
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    out.emplace_back(rho * std::cos(golden * k), rho * std::sin(golden * k), z);
  }
  return out;
}

inline Vec3 random_direction(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Vec3 v;
  do v = Vec3(g(rng), g(rng), g(rng));
  while (v.norm() < 1e-12);
  return v.normalized();
}

/// Rotates omega by angle t towards a random tangent direction.
inline Vec3 nearby_direction(const Vec3& omega, double t, std::mt19937_64& rng) {
  Vec3 e = random_direction(rng);
  e -= e.dot(omega) * omega;
  if (e.norm() < 1e-9) e = omega.unitOrthogonal();
  e.normalize();
  return std::cos(t) * omega + std::sin(t) * e;
}

inline double sphere_distance(const Vec3& w1, const Vec3& w2) {
  return std::acos(std::clamp(w1.dot(w2), -1.0, 1.0));
}

/// Boundary point of the body's own parametrization (X or X_oh).
inline Vec3 body_point(const BodySurface& body, double phi, double theta) {
  return body.shadow_variant ? surface_point_oh(body.f, body.r, body.x0, phi, theta)
                             : surface_point(body.f, body.r, body.x0, phi, theta);
}

inline Vec3 body_point(const BodySurface& body, const Vec3& omega) {
  const auto [p, t] = direction_coordinates(omega);
  return body_point(body, p, t);
}

// ---------------------------------------------------------------------------
// Support function and width

/// max <omega, x> over the grid samples; under-approximates by O(spacing^2).
inline double support_function(const BodySurface& body, const Vec3& omega) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& x : body.points) best = std::max(best, omega.dot(x));
  return best;
}

inline std::vector<double> support_function(const std::vector<Vec3>& points, const std::vector<Vec3>& dirs) {
  std::vector<double> out(dirs.size());
  parallel_for(dirs.size(), [&](std::size_t k) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& x : points) best = std::max(best, dirs[k].dot(x));
    out[k] = best;
  });
  return out;
}

struct WidthReport {
  std::vector<Vec3> directions;
  std::vector<double> widths;
  double max_dev = 0.0;
  double expected = 0.0;
};

/// Width P(w) + P(-w) along n Fibonacci directions; both support values come
/// from one pass over the samples.
inline WidthReport width_check(const std::vector<Vec3>& points, double r, int n) {
  WidthReport rep;
  rep.directions = fibonacci_directions(n);
  rep.widths.resize(rep.directions.size());
  rep.expected = 2.0 * r;
  parallel_for(rep.directions.size(), [&](std::size_t k) {
    double hi = -std::numeric_limits<double>::infinity(), lo = -hi;
    const Vec3& w = rep.directions[k];
    for (const auto& x : points) {
      const double d = w.dot(x);
      hi = std::max(hi, d);
      lo = std::min(lo, d);
    }
    rep.widths[k] = hi - lo;
  });
  for (double w : rep.widths) rep.max_dev = std::max(rep.max_dev, std::abs(w - rep.expected));
  return rep;
}

inline WidthReport width_check(const BodySurface& body, int n) {
  return width_check(body.points, body.r, n);
}

/// max |X(phi, theta) - X(phi + pi, theta) - 2r U(phi, theta)| over grid pairs.
inline double antipodal_residual(const BodySurface& body) {
  const int half = body.nphi / 2;
  double worst = 0.0;
  for (int j = 0; j <= body.ntheta; ++j)
    for (int i = 0; i <= half; ++i)
      worst = std::max(worst, (body.at(i, j) - body.at(i + half, j) -
                               2.0 * body.r * body.direction(i, j)).norm());
  return worst;
}

// ---------------------------------------------------------------------------
// Median surface M(w) = X(w) - r w

struct MedianResiduals {
  /// max(0, (M(w') - M(w)).w - (r/2)|w' - w|^2)
  double mco1 = 0.0;
  /// |M(w) - M(-w)|
  double mco2 = 0.0;
  std::size_t pairs = 0;
};

/// Half the pairs are independent random directions, half are local pairs
/// at angular separation in [1e-3, 0.1] where non-convexity shows first.
inline MedianResiduals median_surface_check(const BodySurface& body, int npairs,
                                            std::uint64_t seed = 1) {
  auto median = [&](const Vec3& w) { return Vec3(body_point(body, w) - body.r * w); };
  std::vector<double> r1(static_cast<std::size_t>(npairs)), r2(static_cast<std::size_t>(npairs));
  parallel_for(static_cast<std::size_t>(npairs), [&](std::size_t k) {
    std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + k);
    const Vec3 w = random_direction(rng);
    Vec3 w2;
    if (k % 2 == 0) {
      w2 = random_direction(rng);
    } else {
      std::uniform_real_distribution<double> t(1e-3, 0.1);
      w2 = nearby_direction(w, t(rng), rng);
    }
    const Vec3 m = median(w), m2 = median(w2);
    const double bound = 0.5 * body.r * (w2 - w).squaredNorm();
    r1[k] = std::max(0.0, (m2 - m).dot(w) - bound);
    r2[k] = (m - median(-w)).norm();
  });
  MedianResiduals out;
  out.pairs = static_cast<std::size_t>(npairs);
  for (std::size_t k = 0; k < r1.size(); ++k) {
    out.mco1 = std::max(out.mco1, r1[k]);
    out.mco2 = std::max(out.mco2, r2[k]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Lipschitz bounds

/// max(0, |X1 - X2| - (pi/2)|w1 - w2| 2r) over random pairs of grid nodes.
inline double gauss_lipschitz_check(const BodySurface& body, int npairs, std::uint64_t seed = 2) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> di(0, body.nphi), dj(0, body.ntheta);
  double worst = 0.0;
  for (int k = 0; k < npairs; ++k) {
    const int i1 = di(rng), j1 = dj(rng), i2 = di(rng), j2 = dj(rng);
    const double lhs = (body.at(i1, j1) - body.at(i2, j2)).norm();
    const double rhs = 0.5 * kPi * (body.direction(i1, j1) - body.direction(i2, j2)).norm() * 2.0 * body.r;
    worst = std::max(worst, lhs - rhs);
  }
  return std::max(0.0, worst);
}

/// The equivalent distance on S between (phi, theta) and (phi0, theta0):
/// same-half pairs use |dphi| + |dtheta| min|sin|, cross-half pairs use
/// |2pi - phi - phi0| + (pi - |dtheta|) min|sin|.
inline double parameter_distance(double phi, double theta, double phi0, double theta0) {
  const double m = std::min(std::abs(std::sin(phi)), std::abs(std::sin(phi0)));
  const bool same = (phi <= kPi && phi0 <= kPi) || (phi >= kPi && phi0 >= kPi);
  if (same) return std::abs(phi - phi0) + std::abs(theta - theta0) * m;
  return std::abs(kTwoPi - phi - phi0) + (kPi - std::abs(theta - theta0)) * m;
}

struct EquivalenceResult {
  std::size_t violations = 0;
  /// max of |w - w0| - D and D - pi |w - w0|, clipped at 0
  double max_excess = 0.0;
  std::size_t pairs = 0;
};

inline EquivalenceResult distance_equivalence_check(
    const std::vector<std::pair<Vec2, Vec2>>& pairs, double tol = 1e-12) {
  EquivalenceResult out;
  out.pairs = pairs.size();
  for (const auto& [p, q] : pairs) {
    const double chord = (unit_direction(p.x(), p.y()) - unit_direction(q.x(), q.y())).norm();
    const double d = parameter_distance(p.x(), p.y(), q.x(), q.y());
    const double excess = std::max(chord - d, d - kPi * chord);
    if (excess > tol) ++out.violations;
    out.max_excess = std::max(out.max_excess, std::max(0.0, excess));
  }
  return out;
}

/// n random pairs in S = [0, 2pi] x [0, pi].
inline std::vector<std::pair<Vec2, Vec2>> random_parameter_pairs(int n, std::uint64_t seed = 3) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> up(0.0, kTwoPi), ut(0.0, kPi);
  std::vector<std::pair<Vec2, Vec2>> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double p = up(rng), t = ut(rng), p0 = up(rng), t0 = ut(rng);
    out.emplace_back(Vec2(p, t), Vec2(p0, t0));
  }
  return out;
}

struct ShadowLipschitzResult {
  /// max(0, |X_oh(phi,theta) - X_oh(phi,theta0)| - 2 d |theta - theta0| |sin phi|)
  double theta_excess = 0.0;
  /// max(0, |X_oh(phi,theta) - X_oh(phi0,theta)| - 2 d |phi - phi0|)
  double phi_excess = 0.0;
  std::size_t pairs = 0;
};

inline ShadowLipschitzResult xoh_lipschitz_check(const AFunction& f, double r, const Vec3& x0,
                                                 int npairs, std::uint64_t seed = 4) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> up(0.0, kTwoPi), ut(0.0, kPi);
  const double d = 2.0 * r;
  ShadowLipschitzResult out;
  out.pairs = static_cast<std::size_t>(npairs);
  for (int k = 0; k < npairs; ++k) {
    const double p = up(rng), t = ut(rng), p0 = up(rng), t0 = ut(rng);
    const Vec3 x = surface_point_oh(f, r, x0, p, t);
    const double et = (x - surface_point_oh(f, r, x0, p, t0)).norm() -
                      2.0 * d * std::abs(t - t0) * std::abs(std::sin(p));
    const double ep = (x - surface_point_oh(f, r, x0, p0, t)).norm() - 2.0 * d * std::abs(p - p0);
    out.theta_excess = std::max(out.theta_excess, et);
    out.phi_excess = std::max(out.phi_excess, ep);
  }
  return out;
}

/// max(0, |X - <X, Xi> Xi| - 2 (2r) |sin phi|) over the grid; assumes the
/// default anchor (0, 0, r).
inline double radial_bound_check(const BodySurface& body) {
  double worst = 0.0;
  for (int j = 0; j <= body.ntheta; ++j) {
    for (int i = 0; i <= body.nphi; ++i) {
      const Vec3& x = body.at(i, j);
      const double radial = std::hypot(x.x(), x.y());
      worst = std::max(worst, radial - 4.0 * body.r * std::abs(std::sin(body.phi(i))));
    }
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Convexity and the inverse Gauss map

/// max over chosen nodes X(w) and all samples x of <w, x - X(w)>.
/// Planes are spread over the grid by a fixed stride.
inline double convexity_check(const BodySurface& body, int nplanes) {
  const std::size_t total = body.points.size();
  const std::size_t count = std::min<std::size_t>(total, static_cast<std::size_t>(std::max(1, nplanes)));
  std::vector<double> worst(count, 0.0);
  parallel_for(count, [&](std::size_t k) {
    const std::size_t idx = (k * total) / count + (total / count) / 2;
    const int i = static_cast<int>(idx % (body.nphi + 1));
    const int j = static_cast<int>(idx / (body.nphi + 1));
    const Vec3 w = body.direction(i, j);
    const double base = w.dot(body.at(i, j));
    double m = 0.0;
    for (const auto& x : body.points) m = std::max(m, w.dot(x) - base);
    worst[k] = m;
  });
  return *std::max_element(worst.begin(), worst.end());
}

/// Compares X(w) with P(w) w + grad P(w), where P is the discrete support
/// function of the samples and the tangential gradient is a central
/// difference along great circles with angular step `step`.
inline double inverse_gauss_check(const BodySurface& body, int ndirs, double step) {
  const auto dirs = fibonacci_directions(ndirs);
  std::vector<Vec3> probes;
  std::vector<std::pair<Vec3, Vec3>> tangents;
  for (const auto& w : dirs) {
    const Vec3 e1 = w.unitOrthogonal();
    const Vec3 e2 = w.cross(e1);
    tangents.emplace_back(e1, e2);
    probes.push_back(w);
    for (const Vec3& e : {e1, e2}) {
      probes.push_back(std::cos(step) * w + std::sin(step) * e);
      probes.push_back(std::cos(step) * w - std::sin(step) * e);
    }
  }
  const auto p = support_function(body.points, probes);
  double worst = 0.0;
  for (std::size_t k = 0; k < dirs.size(); ++k) {
    const double* q = &p[5 * k];
    const auto& [e1, e2] = tangents[k];
    const Vec3 gamma = q[0] * dirs[k] + (q[1] - q[2]) / (2.0 * step) * e1 + (q[3] - q[4]) / (2.0 * step) * e2;
    worst = std::max(worst, (gamma - body_point(body, dirs[k])).norm());
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Full suite

struct VerifyOptions {
  int width_directions = 2000;
  int median_pairs = 10000;
  int lipschitz_pairs = 100000;
  int distance_pairs = 100000;
  int convexity_planes = 2000;
  int inverse_gauss_directions = 200;
  std::uint64_t seed = 1;
  /// Feasible radius when known; enables the inverse Gauss map check for r > r0 + 0.05.
  std::optional<double> r0;

  double width_tol = 5e-3;
  double antipodal_tol = 1e-9;
  double median_tol = 1e-6;
  double lipschitz_tol = 1e-8;
  double convexity_tol = 1e-6;
  double radial_tol = 1e-9;
  double inverse_gauss_tol = 5e-3;
};

inline VerificationReport verify_body(const BodySurface& body, const VerifyOptions& opts = {}) {
  VerificationReport rep;
  const auto width = width_check(body, opts.width_directions);
  rep.checks.push_back(make_check("width", width.max_dev, opts.width_tol, width.directions.size(),
                                  "max |P(w) + P(-w) - 2r| over the samples"));
  if (!body.shadow_variant)
    rep.checks.push_back(make_check("antipodal", antipodal_residual(body), opts.antipodal_tol,
                                    body.points.size() / 2, "max |X(p,t) - X(p+pi,t) - 2r U|"));
  const auto med = median_surface_check(body, opts.median_pairs, opts.seed);
  rep.checks.push_back(make_check("median_mco1", med.mco1, opts.median_tol, med.pairs,
                                  "(M(w') - M(w)).w <= (r/2)|w' - w|^2"));
  rep.checks.push_back(make_check("median_mco2", med.mco2, opts.median_tol, med.pairs,
                                  "M(w) = M(-w)"));
  rep.checks.push_back(make_check("gauss_lipschitz",
                                  gauss_lipschitz_check(body, opts.lipschitz_pairs, opts.seed + 1),
                                  opts.lipschitz_tol, static_cast<std::size_t>(opts.lipschitz_pairs),
                                  "|X1 - X2| <= (pi/2)|w1 - w2| 2r"));
  const auto eq = distance_equivalence_check(random_parameter_pairs(opts.distance_pairs, opts.seed + 2));
  rep.checks.push_back(make_check("distance_equivalence", eq.max_excess, 1e-12, eq.pairs,
                                  "|w - w0| <= D <= pi |w - w0|"));
  rep.checks.push_back(make_check("convexity", convexity_check(body, opts.convexity_planes),
                                  opts.convexity_tol, static_cast<std::size_t>(opts.convexity_planes),
                                  "max <U, x - X> over support planes"));
  if ((body.x0 - default_anchor(body.r)).norm() == 0.0) {
    rep.checks.push_back(make_check("radial_bound", radial_bound_check(body), opts.radial_tol,
                                    body.points.size(), "|X - <X,Xi>Xi| <= 2 (2r) |sin phi|"));
    const auto lip = xoh_lipschitz_check(body.f, body.r, body.x0,
                                          std::min(opts.lipschitz_pairs, 10000), opts.seed + 3);
    rep.checks.push_back(make_check("xoh_lipschitz_theta", std::max(0.0, lip.theta_excess),
                                    opts.radial_tol, lip.pairs,
                                    "|Xoh(p,t) - Xoh(p,t0)| <= 2 (2r)|t - t0||sin p|"));
    rep.checks.push_back(make_check("xoh_lipschitz_phi", std::max(0.0, lip.phi_excess),
                                    opts.radial_tol, lip.pairs,
                                    "|Xoh(p,t) - Xoh(p0,t)| <= 2 (2r)|p - p0|"));
  }
  if (opts.r0 && body.r > *opts.r0 + 0.05 && !body.shadow_variant) {
    const double step = kTwoPi / body.nphi;
    rep.checks.push_back(make_check("inverse_gauss", inverse_gauss_check(body, opts.inverse_gauss_directions, step),
                                    opts.inverse_gauss_tol,
                                    static_cast<std::size_t>(opts.inverse_gauss_directions),
                                    "|P w + grad P - X(w)| by finite differences"));
  }
  return rep;
}

}  // namespace orbiform
