#pragma once

// Command-line front end. Exit codes: 0 pass, 1 validation or verification
// failure (including bad config files), 2 usage error.

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "orbiform/io.hpp"

namespace orbiform {

namespace cli_detail {

struct Resolved {
  BodyConfig cfg;
  AFunction f;
  double r = 0.0;
  std::optional<FeasibilityReport> feasibility;
};

inline Resolved resolve(const std::string& config_path, std::optional<double> r_override) {
  Resolved out;
  out.cfg = load_config(config_path);
  out.f = out.cfg.function();
  if (r_override) {
    out.r = *r_override;
  } else if (out.cfg.r) {
    out.r = *out.cfg.r;
  } else {
    out.feasibility = solve_r0(out.f);
    out.r = out.feasibility->r0;
  }
  return out;
}

inline std::vector<Vec2> parse_polygon(const std::string& text) {
  std::vector<Vec2> pts;
  std::stringstream ss(text);
  std::string pair;
  while (std::getline(ss, pair, ';')) {
    const auto comma = pair.find(',');
    if (comma == std::string::npos) throw Error(ErrorCode::Usage, "polygon vertex '" + pair + "' needs x,y");
    try {
      pts.emplace_back(std::stod(pair.substr(0, comma)), std::stod(pair.substr(comma + 1)));
    } catch (const std::exception&) {
      throw Error(ErrorCode::Usage, "polygon vertex '" + pair + "' is not numeric");
    }
  }
  return pts;
}

inline std::vector<Vec2> read_points_csv(const std::string& path) {
  std::istringstream in(read_text(path));
  std::vector<Vec2> pts;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) continue;
    try {
      pts.emplace_back(std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      // header row
    }
  }
  return pts;
}

}  // namespace cli_detail

inline int cli_run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"orbiform: bodies of constant width from a generating function a(phi, theta)"};
  app.require_subcommand(1);

  std::string config;
  std::optional<double> r_opt;
  int nphi = 0, ntheta = 0;

  auto* validate_cmd = app.add_subcommand("validate", "check the admissibility conditions of a config");
  validate_cmd->add_option("--config,-c", config, "body config (JSON)")->required();
  int val_grid = 256;
  validate_cmd->add_option("--grid", val_grid, "sampling grid per axis")->check(CLI::PositiveNumber);

  auto* norms_cmd = app.add_subcommand("norms", "sup norms of a, d_theta a, d_theta^2 a");
  norms_cmd->add_option("--config,-c", config, "body config (JSON)")->required();

  auto* h_cmd = app.add_subcommand("h-field", "sample the shift field h and its partials");
  h_cmd->add_option("--config,-c", config, "body config (JSON)")->required();
  std::string h_out;
  int h_n = 64;
  h_cmd->add_option("--n", h_n, "samples per axis")->check(CLI::Range(2, 4096));
  h_cmd->add_option("--out,-o", h_out, "CSV output (phi,theta,h,h_phi,h_theta)");

  auto* r0_cmd = app.add_subcommand("r0", "solve for the minimal feasible radius");
  r0_cmd->add_option("--config,-c", config, "body config (JSON)")->required();
  int r0_grid = 512;
  double r0_tol = 1e-5;
  r0_cmd->add_option("--grid", r0_grid, "grid per axis")->check(CLI::Range(8, 8192));
  r0_cmd->add_option("--tol", r0_tol, "bisection tolerance")->check(CLI::PositiveNumber);

  auto* gen2d_cmd = app.add_subcommand("gen2d", "planar constant-width curve of the theta-slice of a");
  gen2d_cmd->add_option("--config,-c", config, "body config (JSON)")->required();
  double g2_theta = 0.0;
  int g2_samples = 512;
  std::string g2_out;
  gen2d_cmd->add_option("--theta", g2_theta, "slice angle (radians)");
  gen2d_cmd->add_option("--r", r_opt, "radius (default: config r, else ||a(., theta)||)");
  gen2d_cmd->add_option("--samples", g2_samples, "segments over [0, 2pi]")->check(CLI::Range(8, 1 << 20));
  gen2d_cmd->add_option("--out,-o", g2_out, "output path (.csv or .svg)")->required();

  auto* gen3d_cmd = app.add_subcommand("gen3d", "build the body and export an OBJ mesh");
  gen3d_cmd->add_option("--config,-c", config, "body config (JSON)")->required();
  std::string g3_out;
  bool g3_oh = false;
  gen3d_cmd->add_option("--out,-o", g3_out, "OBJ output path")->required();
  gen3d_cmd->add_option("--r", r_opt, "radius (overrides the config)");
  gen3d_cmd->add_option("--nphi", nphi, "phi samples (even)");
  gen3d_cmd->add_option("--ntheta", ntheta, "theta samples");
  gen3d_cmd->add_flag("--shadow-surface", g3_oh, "export X_oh = X - h Psi instead of X");

  auto* verify_cmd = app.add_subcommand("verify", "run the verification suite, JSON report on stdout");
  verify_cmd->add_option("--config,-c", config, "body config (JSON)")->required();
  std::string v_mesh, v_report;
  verify_cmd->add_option("--r", r_opt, "radius (overrides the config)");
  verify_cmd->add_option("--nphi", nphi, "phi samples (even)");
  verify_cmd->add_option("--ntheta", ntheta, "theta samples");
  verify_cmd->add_option("--mesh", v_mesh, "also check the width of a previously exported OBJ");
  verify_cmd->add_option("--report", v_report, "write the JSON report to this path too");

  auto* sh2_cmd = app.add_subcommand("shadow2d", "rotational shadow of a planar polygon or point set");
  std::string sh2_poly, sh2_csv, sh2_out;
  int npsi = 1024;
  sh2_cmd->add_option("--polygon", sh2_poly, "vertices as 'x1,y1;x2,y2;...'");
  sh2_cmd->add_option("--points", sh2_csv, "CSV file of x,y points");
  sh2_cmd->add_option("--npsi", npsi, "psi samples")->check(CLI::Range(3, 1 << 20));
  sh2_cmd->add_option("--out,-o", sh2_out, "CSV output (psi,R)");

  auto* sh3_cmd = app.add_subcommand("shadow3d", "3D shadow about the Xi-axis, compared with X_oh");
  sh3_cmd->add_option("--config,-c", config, "body config (JSON)")->required();
  int slices = 32;
  std::string sh3_out;
  sh3_cmd->add_option("--r", r_opt, "radius (overrides the config)");
  sh3_cmd->add_option("--slices", slices, "number of slices")->check(CLI::Range(1, 4096));
  sh3_cmd->add_option("--npsi", npsi, "psi samples per slice")->check(CLI::Range(3, 1 << 20));
  sh3_cmd->add_option("--out,-o", sh3_out, "CSV output (height,psi,R)");

  auto* gal_cmd = app.add_subcommand("gallery", "rebuild the six gallery bodies and their r0 table");
  std::string gal_out;
  int gal_grid = 512, gal_mesh = 128;
  gal_cmd->add_option("--out,-o", gal_out, "output directory")->required();
  gal_cmd->add_option("--grid", gal_grid, "feasibility grid per axis")->check(CLI::Range(8, 8192));
  gal_cmd->add_option("--mesh", gal_mesh, "mesh samples per axis (even)")->check(CLI::Range(8, 4096));

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();  // program name
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n" << app.help();
    return 2;
  }

  try {
    if (*validate_cmd) {
      const auto cfg = load_config(config);
      ValidateOptions vo;
      vo.n_phi = vo.n_theta = val_grid;
      vo.throw_on_violation = false;
      const auto rep = validate(cfg.terms, vo);
      out << to_json(rep).dump(2) << "\n";
      return rep.valid() ? 0 : 1;
    }
    if (*norms_cmd) {
      const auto cfg = load_config(config);
      out << to_json(cfg.function().norms()).dump(2) << "\n";
      return 0;
    }
    if (*h_cmd) {
      const auto cfg = load_config(config);
      const auto f = cfg.function();
      const auto& n = f.norms();
      std::string csv = "phi,theta,h,h_phi,h_theta\n";
      double excess = 0.0;
      char buf[160];
      for (int i = 0; i < h_n; ++i) {
        for (int j = 0; j < h_n; ++j) {
          const double p = kTwoPi * i / (h_n - 1), t = kPi * j / (h_n - 1);
          const auto s = shift_sample(f, p, t);
          const double sp = std::abs(std::sin(p));
          excess = std::max({excess, std::abs(s.h) - n.a_theta * sp, std::abs(s.h_phi) - n.a_theta,
                             std::abs(s.h_theta) - n.a_thetatheta * sp});
          std::snprintf(buf, sizeof buf, "%.9g,%.9g,%.9g,%.9g,%.9g\n", p, t, s.h, s.h_phi, s.h_theta);
          csv += buf;
        }
      }
      if (!h_out.empty()) write_text(h_out, csv);
      const bool ok = excess <= 1e-9;
      out << Json{{"samples", h_n * h_n}, {"max_bound_excess", std::max(0.0, excess)}, {"bounds_hold", ok}}.dump(2)
          << "\n";
      return ok ? 0 : 1;
    }
    if (*r0_cmd) {
      const auto cfg = load_config(config);
      FeasibilityOptions fo;
      fo.n_phi = fo.n_theta = r0_grid;
      fo.tol = r0_tol;
      const auto rep = solve_r0(cfg.function(), fo);
      out << to_json(rep).dump(2) << "\n";
      return 0;
    }
    if (*gen2d_cmd) {
      const auto cfg = load_config(config);
      const auto slice = cfg.function().slice(g2_theta);
      const double r = r_opt ? *r_opt : cfg.r ? *cfg.r : slice.sup_norm();
      const auto curve = sample_curve(slice, r, Vec2::Zero(), g2_samples);
      const bool svg = std::filesystem::path(g2_out).extension() == ".svg";
      const auto s = export_curve(curve, g2_out, svg ? CurveFormat::Svg : CurveFormat::Csv);
      out << Json{{"r", r}, {"samples", s.samples}, {"closure_gap", s.closure_gap},
                  {"width", s.width}, {"height", s.height}}.dump(2)
          << "\n";
      return 0;
    }
    if (*gen3d_cmd) {
      const auto res = cli_detail::resolve(config, r_opt);
      SampleOptions so;
      so.shadow_variant = g3_oh;
      const auto body = sample_grid(res.f, res.r, res.cfg.anchor(res.r), nphi ? nphi : res.cfg.nphi,
                                    ntheta ? ntheta : res.cfg.ntheta, so);
      const auto s = export_obj(body, g3_out);
      out << Json{{"r", res.r}, {"vertices", s.vertices}, {"faces", s.faces}, {"euler", s.euler},
                  {"watertight", s.watertight}}.dump(2)
          << "\n";
      return 0;
    }
    if (*verify_cmd) {
      auto res = cli_detail::resolve(config, r_opt);
      const auto r0 = res.feasibility ? res.feasibility->r0 : solve_r0(res.f).r0;
      SampleOptions so;
      so.feasible_radius = r0;
      const auto body = sample_grid(res.f, res.r, res.cfg.anchor(res.r), nphi ? nphi : 512,
                                    ntheta ? ntheta : 512, so);
      VerifyOptions vo;
      vo.r0 = r0;
      auto rep = verify_body(body, vo);
      if (!v_mesh.empty()) {
        const auto mesh = read_obj(v_mesh);
        const auto w = width_check(mesh.vertices, res.r, vo.width_directions);
        rep.checks.push_back(make_check("mesh_width", w.max_dev, vo.width_tol, w.directions.size(),
                                        "width of the reloaded OBJ vertices"));
      }
      Json doc = to_json(rep);
      doc["r"] = res.r;
      doc["r0"] = r0;
      if (!body.warnings.empty()) doc["warnings"] = body.warnings;
      out << doc.dump(2) << "\n";
      if (!v_report.empty()) write_text(v_report, doc.dump(2) + "\n");
      return rep.pass() ? 0 : 1;
    }
    if (*sh2_cmd) {
      if (sh2_poly.empty() == sh2_csv.empty())
        throw Error(ErrorCode::Usage, "give exactly one of --polygon or --points");
      PlanarBody body{sh2_poly.empty() ? cli_detail::read_points_csv(sh2_csv)
                                       : cli_detail::parse_polygon(sh2_poly)};
      const auto sh = shadow2d(body, npsi);
      if (!sh2_out.empty()) write_text(sh2_out, format_shadow_csv(sh));
      const double excess = sh.lipschitz_excess();
      out << Json{{"npsi", sh.size()}, {"L", sh.L}, {"area", sh.area()},
                  {"lipschitz_excess", std::max(0.0, excess)}}.dump(2)
          << "\n";
      return excess <= 1e-12 ? 0 : 1;
    }
    if (*sh3_cmd) {
      const auto res = cli_detail::resolve(config, r_opt);
      const auto body = sample_grid(res.f, res.r, res.cfg.anchor(res.r), res.cfg.nphi, res.cfg.ntheta);
      const auto sh = shadow3d(body, slices, npsi);
      if (!sh3_out.empty()) write_text(sh3_out, format_shadow_csv(sh));
      const double residual = shadow_boundary_residual(sh, body);
      Json doc{{"r", res.r}, {"slices", sh.slices.size()}, {"npsi", npsi},
               {"xoh_boundary_residual", residual}, {"tolerance", 5e-3}, {"pass", residual <= 5e-3}};
      if (!sh.warnings.empty()) doc["warnings"] = sh.warnings;
      out << doc.dump(2) << "\n";
      return residual <= 5e-3 ? 0 : 1;
    }
    if (*gal_cmd) {
      std::filesystem::create_directories(gal_out);
      FeasibilityOptions fo;
      fo.n_phi = fo.n_theta = gal_grid;
      Json table = Json::array();
      char line[256];
      std::snprintf(line, sizeof line, "%-9s  %-46s  %9s  %9s  %9s\n", "name", "a(phi, theta)", "caption",
                    "r0", "diff");
      out << line;
      for (const auto& g : gallery()) {
        const AFunction f(g.terms);
        const auto rep = solve_r0(f, fo);
        const auto body = sample_grid(f, rep.r0, default_anchor(rep.r0), gal_mesh, gal_mesh);
        const std::string obj = (std::filesystem::path(gal_out) / (g.name + ".obj")).string();
        export_obj(body, obj);
        const double diff = rep.r0 - g.caption_r0;
        std::snprintf(line, sizeof line, "%-9s  %-46s  %9.5f  %9.5f  %+9.5f\n", g.name.c_str(),
                      g.formula.c_str(), g.caption_r0, rep.r0, diff);
        out << line;
        table.push_back({{"name", g.name}, {"formula", g.formula}, {"caption_r0", g.caption_r0},
                         {"r0", rep.r0}, {"difference", diff}, {"obj", obj}});
      }
      write_text((std::filesystem::path(gal_out) / "gallery.json").string(), table.dump(2) + "\n");
      return 0;
    }
  } catch (const Error& e) {
    err << e.what() << "\n";
    return e.code() == ErrorCode::Usage ? 2 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

inline int cli_run(int argc, char** argv) {
  return cli_run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}

}  // namespace orbiform
