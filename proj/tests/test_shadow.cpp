#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "orbiform/feasibility.hpp"
#include "orbiform/shadow.hpp"
#include "support.hpp"

using namespace orbiform;

namespace {

PlanarBody disk(int n, double radius = 1.0) {
  PlanarBody b;
  for (int k = 0; k < n; ++k) b.points.emplace_back(radius * std::cos(kTwoPi * k / n), radius * std::sin(kTwoPi * k / n));
  return b;
}

PlanarBody square() { return {{Vec2(-1, -1), Vec2(1, -1), Vec2(1, 1), Vec2(-1, 1)}}; }

PlanarBody triangle() { return {{Vec2(1.0, 0.0), Vec2(-0.5, 0.8), Vec2(-0.4, -0.9)}}; }

/// Sh is the union of the disks with diameter [0, v] over the vertices v,
/// since |x| < <v, x/|x|> is |x - v/2| < |v|/2.
bool in_disk_union(const PlanarBody& body, const Vec2& x) {
  for (const auto& v : body.points)
    if ((x - 0.5 * v).norm() < 0.5 * v.norm()) return true;
  return false;
}

double angular_gap(double a, double b) {
  const double d = std::fmod(std::abs(a - b), kTwoPi);
  return std::min(d, kTwoPi - d);
}

PlanarBody random_polygon(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> count(3, 12);
  std::uniform_real_distribution<double> radius(0.2, 3.0), jitter(0.0, 1.0);
  const int n = count(rng);
  PlanarBody b;
  // sorted angles with gaps below pi keep the origin inside
  for (int k = 0; k < n; ++k) {
    const double t = kTwoPi * (k + 0.3 * jitter(rng)) / n;
    const double rho = radius(rng);
    b.points.emplace_back(rho * std::cos(t), rho * std::sin(t));
  }
  return b;
}

TEST(RadialSupport, Disk) {
  const auto d = disk(4096);
  for (double psi : {0.0, 0.3, 2.0, 5.0}) EXPECT_NEAR(radial_support(d, psi), 1.0, 1e-6);
}

TEST(RadialSupport, Square) {
  EXPECT_NEAR(radial_support(square(), 0.0), 1.0, 1e-15);
  EXPECT_NEAR(radial_support(square(), kPi / 4), std::sqrt(2.0), 1e-15);
}

TEST(RadialSupport, TriangleIsMaxOfThreeSinusoids) {
  const auto t = triangle();
  for (int k = 0; k < 360; ++k) {
    const double psi = kTwoPi * k / 360;
    double expected = -1e300;
    for (const auto& v : t.points) expected = std::max(expected, v.norm() * std::cos(psi - std::atan2(v.y(), v.x())));
    EXPECT_NEAR(radial_support(t, psi), expected, 1e-14);
  }
}

TEST(RadialSupport, EmptyBody) {
  try {
    radial_support(PlanarBody{}, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyBody);
  }
}

TEST(Shadow2D, DiskIsDisk) {
  const auto sh = shadow2d(disk(4096), 512);
  for (double r : sh.R) EXPECT_NEAR(r, 1.0, 1e-6);
  EXPECT_NEAR(sh.area(), kPi, 1e-5);
}

TEST(Shadow2D, OriginOutside) {
  PlanarBody shifted;
  for (const auto& p : square().points) shifted.points.push_back(p + Vec2(3.0, 0.0));
  try {
    shadow2d(shifted, 64);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OriginOutside);
  }
  try {
    shadow2d(PlanarBody{}, 64);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyBody);
  }
}

TEST(Shadow2D, TriangleAreaAndMembershipAgainstMonteCarlo) {
  const auto t = triangle();
  const auto sh = shadow2d(t, 4096);
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int n = 400000;
  int inside = 0, disagreements = 0;
  for (int k = 0; k < n; ++k) {
    const Vec2 x(u(rng), u(rng));
    const bool oracle = in_disk_union(t, x);
    inside += oracle ? 1 : 0;
    // skip a thin band around the boundary where linear interpolation of R matters
    const double rho = x.norm(), edge = radial_support(t, std::atan2(x.y(), x.x()));
    if (std::abs(rho - edge) > 1e-4 && sh.contains(x) != oracle) ++disagreements;
  }
  const double mc_area = 4.0 * inside / n;
  const double sigma = 4.0 * std::sqrt(mc_area / 4.0 * (1 - mc_area / 4.0) / n);
  EXPECT_NEAR(sh.area(), mc_area, 5 * sigma);
  EXPECT_EQ(disagreements, 0);
}

TEST(Shadow2D, LipschitzOnRandomPolygons) {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> up(0.0, kTwoPi);
  for (int trial = 0; trial < 20; ++trial) {
    const auto poly = random_polygon(rng);
    ASSERT_TRUE(origin_interior(poly));
    const auto sh = shadow2d(poly, 1024);
    EXPECT_LE(sh.lipschitz_excess(), 1e-12);
    for (int k = 0; k < 10000; ++k) {
      const double a = up(rng), b = up(rng);
      ASSERT_LE(std::abs(radial_support(poly, a) - radial_support(poly, b)), sh.L * angular_gap(a, b) + 1e-12);
    }
  }
}

TEST(Shadow2D, InvariantUnderConvexHull) {
  std::mt19937_64 rng(47);
  std::uniform_real_distribution<double> w(0.0, 1.0), up(0.0, kTwoPi);
  for (int trial = 0; trial < 20; ++trial) {
    auto poly = random_polygon(rng);
    const auto hull = convex_hull(poly);
    // add interior convex combinations of the vertices
    auto cloud = poly;
    for (int k = 0; k < 50; ++k) {
      const auto& a = poly.points[static_cast<std::size_t>(k) % poly.points.size()];
      const auto& b = poly.points[static_cast<std::size_t>(3 * k + 1) % poly.points.size()];
      cloud.points.push_back(w(rng) * (a + b) * 0.5);
    }
    for (int k = 0; k < 200; ++k) {
      const double psi = up(rng);
      EXPECT_NEAR(radial_support(cloud, psi), radial_support(hull, psi), 1e-14);
      EXPECT_NEAR(radial_support(poly, psi), radial_support(hull, psi), 1e-14);
    }
  }
}

TEST(Shadow3D, SphereSlicesAreCentredDisks) {
  const auto body = sample_grid(AFunction(), 1.0, default_anchor(1.0), 128, 64);
  const auto sh = shadow3d(body, 9, 128);
  ASSERT_EQ(sh.slices.size(), 9u);
  EXPECT_TRUE(sh.warnings.empty());
  for (std::size_t k = 0; k < sh.slices.size(); ++k) {
    const auto& s = sh.slices[k];
    const auto [lo, hi] = std::minmax_element(s.R.begin(), s.R.end());
    EXPECT_LT(*hi - *lo, 1e-9);
    const double z = sh.heights[k];
    EXPECT_NEAR(*hi, std::sqrt(1.0 - z * z), 2e-3);
  }
}

TEST(Shadow3D, CombiaaBoundaryMatchesShadowSurface) {
  const auto f = test::combiaa();
  const double r = solve_r0(f).r0;
  const auto body = sample_grid(f, r, default_anchor(r), 256, 256);
  const auto sh = shadow3d(body, 16, 256);
  EXPECT_TRUE(sh.warnings.empty());
  EXPECT_LT(shadow_boundary_residual(sh, body), 5e-3);
}

TEST(Shadow3D, ProjectionIdentity) {
  const auto f = test::combiaa();
  const double r = 1.26;
  const Vec3 x0 = default_anchor(r);
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> up(0.0, kTwoPi), ut(0.0, kPi);
  for (int k = 0; k < 10000; ++k) {
    const double p = up(rng), t = ut(rng);
    const Vec3 proj = psi_projection(surface_point(f, r, x0, p, t), t, x0);
    ASSERT_NEAR((proj - surface_point_oh(f, r, x0, p, t)).norm(), 0.0, 1e-9);
  }
}

TEST(Shadow3D, NonConvexInputWarns) {
  const auto body = sample_grid(test::combiaa(), 1.0, default_anchor(1.0), 128, 128);
  EXPECT_FALSE(shadow3d(body, 4, 64).warnings.empty());
}

}  // namespace
