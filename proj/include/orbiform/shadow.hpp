#pragma once

// Rotational shadow domains. For a planar set Omega containing the origin,
//   R(psi) = sup { x cos(psi) + y sin(psi) : (x, y) in Omega },
//   Sh(Omega) = { rho (cos psi, sin psi) : 0 <= rho < R(psi) },
// and the 3D shadow about the Xi-axis stacks the shadows of horizontal slices.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <boost/geometry.hpp>
#include <boost/geometry/geometries/point_xy.hpp>
#include <boost/geometry/geometries/polygon.hpp>
#include <boost/geometry/geometries/multi_point.hpp>

#include "orbiform/error.hpp"
#include "orbiform/parallel.hpp"
#include "orbiform/surface.hpp"
#include "orbiform/verify.hpp"

namespace orbiform {

/// Planar point set (polygon vertices or boundary samples) about the origin.
struct PlanarBody {
  std::vector<Vec2> points;
};

namespace detail {
namespace bg = boost::geometry;
using BgPoint = bg::model::d2::point_xy<double>;
using BgPolygon = bg::model::polygon<BgPoint>;

inline BgPolygon hull_polygon(const PlanarBody& body) {
  bg::model::multi_point<BgPoint> mp;
  for (const auto& p : body.points) mp.emplace_back(p.x(), p.y());
  BgPolygon hull;
  bg::convex_hull(mp, hull);
  return hull;
}
}  // namespace detail

/// Convex hull vertices, closed ring without the repeated endpoint.
inline PlanarBody convex_hull(const PlanarBody& body) {
  PlanarBody out;
  if (body.points.empty()) return out;
  const auto hull = detail::hull_polygon(body);
  const auto& ring = hull.outer();
  for (std::size_t k = 0; k + 1 < ring.size(); ++k) out.points.emplace_back(ring[k].x(), ring[k].y());
  if (out.points.empty()) out.points.push_back(body.points.front());
  return out;
}

/// True when the origin lies strictly inside the convex hull.
inline bool origin_interior(const PlanarBody& body) {
  if (body.points.size() < 3) return false;
  return detail::bg::within(detail::BgPoint(0.0, 0.0), detail::hull_polygon(body));
}

inline double radial_support(const PlanarBody& body, double psi) {
  if (body.points.empty()) throw Error(ErrorCode::EmptyBody, "radial support of an empty set");
  const Vec2 e(std::cos(psi), std::sin(psi));
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& p : body.points) best = std::max(best, e.dot(p));
  return best;
}

/// R sampled on a uniform psi grid over [0, 2pi) with linear interpolation.
struct ShadowDomain {
  std::vector<double> R;
  /// sup |x| over the body, the Lipschitz constant of R.
  double L = 0.0;

  int size() const { return static_cast<int>(R.size()); }
  double psi(int k) const { return kTwoPi * k / static_cast<double>(R.size()); }

  double R_at(double psi_value) const {
    const int n = size();
    double t = std::fmod(psi_value, kTwoPi);
    if (t < 0.0) t += kTwoPi;
    const double u = t / kTwoPi * n;
    const int k = static_cast<int>(std::floor(u)) % n;
    const double w = u - std::floor(u);
    return (1.0 - w) * R[static_cast<std::size_t>(k)] + w * R[static_cast<std::size_t>((k + 1) % n)];
  }

  bool contains(const Vec2& x) const {
    return x.norm() < R_at(std::atan2(x.y(), x.x()));
  }

  /// Area of Sh as (1/2) int R^2 dpsi by the periodic trapezoid rule.
  double area() const {
    double s = 0.0;
    for (double r : R) s += r * r;
    return 0.5 * s * kTwoPi / static_cast<double>(R.size());
  }

  /// max(0, |R(p1) - R(p2)| - L dist(p1, p2)) over adjacent samples.
  double lipschitz_excess() const {
    double worst = 0.0;
    const double step = kTwoPi / static_cast<double>(R.size());
    for (std::size_t k = 0; k < R.size(); ++k)
      worst = std::max(worst, std::abs(R[k] - R[(k + 1) % R.size()]) - L * step);
    return worst;
  }
};

inline ShadowDomain shadow2d(const PlanarBody& body, int npsi) {
  if (body.points.empty()) throw Error(ErrorCode::EmptyBody, "shadow of an empty set");
  if (!origin_interior(body))
    throw Error(ErrorCode::OriginOutside, "the origin is not interior to the planar body");
  if (npsi < 3) throw Error(ErrorCode::Usage, "npsi must be >= 3");
  ShadowDomain sh;
  sh.R.resize(static_cast<std::size_t>(npsi));
  for (const auto& p : body.points) sh.L = std::max(sh.L, p.norm());
  const auto hull = convex_hull(body);
  for (int k = 0; k < npsi; ++k) sh.R[static_cast<std::size_t>(k)] = radial_support(hull, sh.psi(k));
  return sh;
}

// ---------------------------------------------------------------------------
// 3D

/// Intersection of the sampled surface with the plane z = height, relative
/// to the body's axis point (x0.x, x0.y). Uses linear interpolation along
/// the phi and theta grid edges.
inline PlanarBody slice_body(const BodySurface& body, double height) {
  PlanarBody out;
  const Vec2 axis(body.x0.x(), body.x0.y());
  auto edge = [&](const Vec3& p, const Vec3& q) {
    const double dp = p.z() - height, dq = q.z() - height;
    if ((dp < 0.0) == (dq < 0.0) || dp == dq) return;
    const double t = dp / (dp - dq);
    const Vec3 x = p + t * (q - p);
    out.points.emplace_back(x.x() - axis.x(), x.y() - axis.y());
  };
  for (int j = 0; j <= body.ntheta; ++j) {
    for (int i = 0; i <= body.nphi; ++i) {
      if (i < body.nphi) edge(body.at(i, j), body.at(i + 1, j));
      if (j < body.ntheta) edge(body.at(i, j), body.at(i, j + 1));
    }
  }
  return out;
}

struct ShadowDomain3D {
  std::vector<double> heights;
  std::vector<ShadowDomain> slices;
  Vec2 axis = Vec2::Zero();
  std::vector<std::string> warnings;
};

inline ShadowDomain3D shadow3d(const BodySurface& body, const std::vector<double>& heights, int npsi) {
  ShadowDomain3D out;
  out.heights = heights;
  out.axis = Vec2(body.x0.x(), body.x0.y());
  const double violation = convexity_check(body, 200);
  if (violation > 1e-6)
    out.warnings.push_back("body fails the support-plane convexity spot check by " +
                           std::to_string(violation));
  out.slices.resize(heights.size());
  parallel_for(heights.size(), [&](std::size_t k) {
    out.slices[k] = shadow2d(slice_body(body, heights[k]), npsi);
  });
  return out;
}

/// nslices heights spaced evenly strictly between the two poles.
inline ShadowDomain3D shadow3d(const BodySurface& body, int nslices, int npsi) {
  const double top = body.at(0, 0).z(), bottom = body.at(body.nphi / 2, 0).z();
  std::vector<double> heights;
  for (int k = 0; k < nslices; ++k) heights.push_back(bottom + (k + 0.5) * (top - bottom) / nslices);
  return shadow3d(body, heights, npsi);
}

/// Projection along Psi(theta) onto the {Theta(theta), Xi} plane through the axis.
inline Vec3 psi_projection(const Vec3& x, double theta, const Vec3& axis_point = Vec3::Zero()) {
  const Vec3 psi(-std::sin(theta), std::cos(theta), 0.0);
  return x - (x - axis_point).dot(psi) * psi;
}

/// Distance from the axis of the X_oh boundary at height z in direction psi.
/// For psi in [0, pi) the boundary point has phi in (0, pi), otherwise
/// phi in (pi, 2pi) and theta = psi - pi. The height is monotone in phi on
/// each half, so the point is found by bisection.
inline double xoh_radius(const AFunction& f, double r, const Vec3& x0, double z, double psi) {
  double p = std::fmod(psi, kTwoPi);
  if (p < 0.0) p += kTwoPi;
  const bool upper = p < kPi;
  const double theta = upper ? p : p - kPi;
  double lo = upper ? 0.0 : kPi, hi = upper ? kPi : kTwoPi;
  auto height = [&](double phi) { return surface_point_oh(f, r, x0, phi, theta).z(); };
  // height decreases on (0, pi) and increases on (pi, 2pi)
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    const bool above = height(mid) > z;
    if (upper == above) lo = mid; else hi = mid;
  }
  const Vec3 x = surface_point_oh(f, r, x0, 0.5 * (lo + hi), theta);
  return Vec2(x.x() - x0.x(), x.y() - x0.y()).norm();
}

/// max over slices and psi samples of |R_slice(psi) - radius of X_oh|.
inline double shadow_boundary_residual(const ShadowDomain3D& sh, const BodySurface& body) {
  std::vector<double> worst(sh.slices.size(), 0.0);
  parallel_for(sh.slices.size(), [&](std::size_t k) {
    const auto& s = sh.slices[k];
    for (int i = 0; i < s.size(); ++i) {
      const double rho = xoh_radius(body.f, body.r, body.x0, sh.heights[k], s.psi(i));
      worst[k] = std::max(worst[k], std::abs(s.R[static_cast<std::size_t>(i)] - rho));
    }
  });
  return worst.empty() ? 0.0 : *std::max_element(worst.begin(), worst.end());
}

}  // namespace orbiform
