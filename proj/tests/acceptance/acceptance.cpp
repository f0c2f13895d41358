// Acceptance checks. Run as `acceptance <n>` for criterion n; prints one
// PASS/FAIL line and exits nonzero on failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <random>
#include <string>

#include "../support.hpp"
#include "orbiform/feasibility.hpp"
#include "orbiform/io.hpp"
#include "orbiform/shadow.hpp"
#include "orbiform/shift.hpp"
#include "orbiform/verify.hpp"

using namespace orbiform;

namespace {

constexpr int kGrid = 512;

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

bool report(bool ok, const char* fmt, auto... args) {
  std::printf("  %s ", ok ? "ok  " : "FAIL");
  std::printf(fmt, args...);
  std::printf("\n");
  return ok;
}

std::vector<std::pair<std::string, AFunction>> bodies() {
  std::vector<std::pair<std::string, AFunction>> out{{"combiaa", test::combiaa()}};
  for (const auto& g : gallery()) out.emplace_back(g.name, AFunction(g.terms));
  return out;
}

// 1. combiaa r0 within 2e-3 of 1.25348 in under 60 s
bool r0_combiaa() {
  const auto start = std::chrono::steady_clock::now();
  const auto rep = solve_r0(test::combiaa(), {kGrid, kGrid});
  const double t = seconds_since(start);
  bool ok = report(std::abs(rep.r0 - 1.25348) <= 2e-3, "r0 = %.6f (target 1.25348 +- 2e-3)", rep.r0);
  ok &= report(t < 60.0, "runtime %.1f s (limit 60 s)", t);
  return ok;
}

// 2. gallery caption radii within 2e-3, total under 10 min
bool gallery_table() {
  const auto start = std::chrono::steady_clock::now();
  bool ok = true;
  for (const auto& g : gallery()) {
    const double r0 = solve_r0(AFunction(g.terms), {kGrid, kGrid}).r0;
    ok &= report(std::abs(r0 - g.caption_r0) <= 2e-3, "%s %s: r0 = %.6f, caption %.6g", g.name.c_str(),
                 g.formula.c_str(), r0, g.caption_r0);
  }
  const double t = seconds_since(start);
  ok &= report(t < 600.0, "runtime %.1f s (limit 600 s)", t);
  return ok;
}

// 3. combiaa sup norms (1, sqrt 2, 2 sqrt 2)
bool norms() {
  const auto& n = test::combiaa().norms();
  bool ok = report(std::abs(n.a - 1.0) <= 1e-6, "|a| = %.9f", n.a);
  ok &= report(std::abs(n.a_theta - std::sqrt(2.0)) <= 1e-6, "|a_t| = %.9f", n.a_theta);
  ok &= report(std::abs(n.a_thetatheta - 2.0 * std::sqrt(2.0)) <= 1e-6, "|a_tt| = %.9f", n.a_thetatheta);
  return ok;
}

// 4. shift of -cos^2(t) cos 3p against its closed form at 1e4 random points,
// on both the closed-form and the quadrature route
bool closed_form_shift() {
  const auto f = test::single_cos3();
  bool ok = true;
  for (const auto method : {ShiftMethod::ClosedForm, ShiftMethod::Quadrature}) {
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> up(0.0, kTwoPi), ut(0.0, kPi);
    double eh = 0.0, ep = 0.0, et = 0.0;
    for (int k = 0; k < 10000; ++k) {
      const double p = up(rng), t = ut(rng);
      eh = std::max(eh, std::abs(h_value(f, p, t, method) + 0.25 * std::sin(2 * t) * std::sin(2 * p)));
      ep = std::max(ep, std::abs(h_phi(f, p, t, method) + 0.5 * std::sin(2 * t) * std::cos(2 * p)));
      et = std::max(et, std::abs(h_theta(f, p, t, method) + 0.5 * std::cos(2 * t) * std::sin(2 * p)));
    }
    const char* route = method == ShiftMethod::ClosedForm ? "closed form" : "quadrature";
    ok &= report(eh <= 1e-9, "%s: max |h - h*| = %.3e (tol 1e-9)", route, eh);
    ok &= report(ep <= 1e-8, "%s: max |h_p - h_p*| = %.3e (tol 1e-8)", route, ep);
    ok &= report(et <= 1e-8, "%s: max |h_t - h_t*| = %.3e (tol 1e-8)", route, et);
  }
  return ok;
}

const std::map<std::string, double>& solved_gallery_r0() {
  static const std::map<std::string, double> r0 = [] {
    std::map<std::string, double> out;
    for (const auto& g : gallery()) out[g.name] = solve_r0(AFunction(g.terms), {kGrid, kGrid}).r0;
    return out;
  }();
  return r0;
}

BodySurface gallery_body(const GalleryEntry& g, int n) {
  const double r = solved_gallery_r0().at(g.name);
  return sample_grid(AFunction(g.terms), r, default_anchor(r), n, n);
}

// 5. antipodal identity on every gallery body at its r0
bool antipodal() {
  bool ok = true;
  for (const auto& g : gallery()) {
    const double res = antipodal_residual(gallery_body(g, kGrid));
    ok &= report(res < 1e-9, "%s: residual %.3e (tol 1e-9)", g.name.c_str(), res);
  }
  return ok;
}

// 6. support-function width at 512^2 and its convergence from 256^2
bool width() {
  bool ok = true;
  for (const auto& g : gallery()) {
    const double fine = width_check(gallery_body(g, kGrid), 2000).max_dev;
    const double coarse = width_check(gallery_body(g, kGrid / 2), 2000).max_dev;
    const double ratio = coarse / fine;
    ok &= report(fine < 5e-3, "%s: max_dev %.3e at 512^2 (tol 5e-3)", g.name.c_str(), fine);
    ok &= report(ratio >= 3.0 && ratio <= 5.0, "%s: 256^2 -> 512^2 ratio %.3f (want [3, 5])", g.name.c_str(), ratio);
  }
  return ok;
}

// 7. property suites
bool properties() {
  std::mt19937_64 rng(107);
  std::uniform_real_distribution<double> up(0.0, kTwoPi), ut(0.0, kPi);
  auto fs = bodies();
  for (int k = 0; k < 8; ++k) fs.emplace_back("random" + std::to_string(k), test::random_function(rng));
  bool ok = true;

  std::size_t bound_violations = 0, bound_samples = 0;
  for (const auto& [name, f] : fs) {
    const auto& n = f.norms();
    for (int k = 0; k < 10000; ++k) {
      const double p = up(rng), t = ut(rng), sp = std::abs(std::sin(p));
      const auto s = shift_sample(f, p, t);
      bound_violations += std::abs(s.h) > n.a_theta * sp + 1e-9;
      bound_violations += std::abs(s.h_phi) > n.a_theta + 1e-9;
      bound_violations += std::abs(s.h_theta) > n.a_thetatheta * sp + 1e-9;
      bound_samples += 3;
    }
  }
  ok &= report(bound_violations == 0, "shift bounds: %zu violations in %zu samples", bound_violations, bound_samples);

  // T(r) and D(r, p, t)/sin p nondecreasing on a radius ladder from |a| to the bracket top
  std::size_t t_violations = 0, d_violations = 0, d_violations_feasible = 0, d_samples = 0;
  for (const auto& [name, f] : fs) {
    const auto& n = f.norms();
    std::vector<double> radii;
    for (int k = 0; k <= 20; ++k) radii.push_back(n.a + (n.bracket_upper() - n.a) * k / 20.0);
    for (std::size_t k = 1; k < radii.size(); ++k) t_violations += T_of_r(f, radii[k]) < T_of_r(f, radii[k - 1]) - 1e-12;
    for (int s = 0; s < 2000; ++s) {
      const double p = up(rng), t = ut(rng);
      if (std::abs(std::sin(p)) < kPoleEpsilon) continue;
      for (std::size_t k = 1; k < radii.size(); ++k) {
        const double lo = D_over_sin(f, radii[k - 1], p, t);
        const bool down = D_over_sin(f, radii[k], p, t) < lo - 1e-12;
        d_violations += down;
        d_violations_feasible += down && lo >= 0.0;
        ++d_samples;
      }
    }
  }
  ok &= report(t_violations == 0, "T monotone in r: %zu violations", t_violations);
  ok &= report(d_violations == 0, "D/sin monotone in r: %zu violations in %zu steps", d_violations, d_samples);
  std::printf("  info D/sin monotone in r where D/sin >= 0: %zu violations\n", d_violations_feasible);

  std::size_t bracket_violations = 0;
  for (const auto& [name, f] : fs) {
    const auto& n = f.norms();
    const double r0 = solve_r0(f, {256, 256}).r0;
    const DeterminantField field(f, 256, 256);
    bracket_violations += r0 < n.a - 1e-12 || r0 > n.bracket_upper() + 1e-12;
    bracket_violations += field.min_ratio(n.bracket_upper()) < -kFeasibilitySlack;
    bracket_violations += T_of_r(f, n.bracket_upper()) < -kFeasibilitySlack;
  }
  ok &= report(bracket_violations == 0, "bracket containment: %zu violations", bracket_violations);

  VerifyOptions vo;
  for (const auto& [name, f] : bodies()) {
    const double r0 = solve_r0(f, {kGrid, kGrid}).r0;
    const auto body = sample_grid(f, r0, default_anchor(r0), 256, 256);
    const auto med = median_surface_check(body, vo.median_pairs, vo.seed);
    ok &= report(med.mco1 <= vo.median_tol && med.mco2 <= vo.median_tol, "%s median: mco1 %.3e, mco2 %.3e (tol %.0e)",
                 name.c_str(), med.mco1, med.mco2, vo.median_tol);
    const double gl = gauss_lipschitz_check(body, vo.lipschitz_pairs, vo.seed + 1);
    ok &= report(gl <= vo.lipschitz_tol, "%s Gauss Lipschitz: excess %.3e (tol %.0e)", name.c_str(), gl, vo.lipschitz_tol);
    const double rad = radial_bound_check(body);
    ok &= report(rad <= vo.radial_tol, "%s radial bound: excess %.3e (tol %.0e)", name.c_str(), rad, vo.radial_tol);
    const auto lip = xoh_lipschitz_check(f, r0, body.x0, 10000, vo.seed + 3);
    const double lip_excess = std::max({0.0, lip.theta_excess, lip.phi_excess});
    ok &= report(lip_excess <= vo.radial_tol, "%s shadow surface Lipschitz: excess %.3e", name.c_str(), lip_excess);
  }

  const auto eq = distance_equivalence_check(random_parameter_pairs(100000, 109));
  ok &= report(eq.violations == 0, "sphere distance equivalences: %zu violations in %zu pairs", eq.violations, eq.pairs);

  std::size_t shadow_violations = 0;
  for (int trial = 0; trial < 20; ++trial) {
    std::uniform_int_distribution<int> count(3, 12);
    std::uniform_real_distribution<double> radius(0.2, 3.0), jitter(0.0, 1.0);
    PlanarBody poly;
    const int n = count(rng);
    for (int k = 0; k < n; ++k) {
      const double t = kTwoPi * (k + 0.3 * jitter(rng)) / n, rho = radius(rng);
      poly.points.emplace_back(rho * std::cos(t), rho * std::sin(t));
    }
    const auto sh = shadow2d(poly, 1024);
    shadow_violations += sh.lipschitz_excess() > 1e-12;
    for (int k = 0; k < 10000; ++k) {
      const double a = up(rng), b = up(rng);
      const double d = std::min(std::abs(a - b), kTwoPi - std::abs(a - b));
      shadow_violations += std::abs(radial_support(poly, a) - radial_support(poly, b)) > sh.L * d + 1e-12;
    }
  }
  ok &= report(shadow_violations == 0, "planar shadow Lipschitz: %zu violations", shadow_violations);
  return ok;
}

// 8. negative controls
bool negative_controls() {
  const VerifyOptions vo;
  const auto f = test::combiaa();
  const auto below = sample_grid(f, 1.0, default_anchor(1.0), 256, 256);
  const double conv = convexity_check(below, vo.convexity_planes);
  const auto med = median_surface_check(below, vo.median_pairs, vo.seed);
  bool ok = report(conv > vo.convexity_tol, "r = 1.0 convexity residual %.3e (must exceed %.0e)", conv, vo.convexity_tol);
  ok &= report(std::max(med.mco1, med.mco2) > vo.median_tol, "r = 1.0 median residual %.3e (must exceed %.0e)",
               std::max(med.mco1, med.mco2), vo.median_tol);
  const double r0 = solve_r0(f, {kGrid, kGrid}).r0;
  SampleOptions so;
  so.shadow_variant = true;
  const double oh = convexity_check(sample_grid(f, r0, default_anchor(r0), 256, 256, so), vo.convexity_planes);
  ok &= report(oh > vo.convexity_tol, "shadow surface at r0 convexity residual %.3e (must exceed %.0e)", oh,
               vo.convexity_tol);
  return ok;
}

// 9. shadow3d boundary against the shadow surface
bool shadow_consistency() {
  const auto f = test::combiaa();
  const double r0 = solve_r0(f, {kGrid, kGrid}).r0;
  const auto body = sample_grid(f, r0, default_anchor(r0), 256, 256);
  const auto sh = shadow3d(body, 16, 256);
  const double res = shadow_boundary_residual(sh, body);
  bool ok = report(res < 5e-3, "boundary residual %.3e over %zu slices (tol 5e-3)", res, sh.slices.size());
  ok &= report(sh.warnings.empty(), "%zu warnings", sh.warnings.size());
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<int, std::pair<const char*, std::function<bool()>>> criteria{
      {1, {"combiaa r0", r0_combiaa}},
      {2, {"gallery r0 table", gallery_table}},
      {3, {"combiaa norms", norms}},
      {4, {"closed-form shift", closed_form_shift}},
      {5, {"antipodal width identity", antipodal}},
      {6, {"support-function width", width}},
      {7, {"property suites", properties}},
      {8, {"negative controls", negative_controls}},
      {9, {"shadow consistency", shadow_consistency}},
  };
  const int n = argc > 1 ? std::atoi(argv[1]) : 0;
  const auto it = criteria.find(n);
  if (it == criteria.end()) {
    std::fprintf(stderr, "usage: acceptance <1-9>\n");
    return 2;
  }
  bool ok = false;
  try {
    ok = it->second.second();
  } catch (const std::exception& e) {
    std::printf("  FAIL exception: %s\n", e.what());
  }
  std::printf("ACCEPTANCE %d %s: %s\n", n, it->second.first, ok ? "PASS" : "FAIL");
  return ok ? 0 : 1;
}
