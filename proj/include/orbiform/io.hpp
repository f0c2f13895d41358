#pragma once

// JSON body configs, Wavefront OBJ meshes, curve CSV/SVG, report JSON and the
// built-in gallery.

#include <array>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "orbiform/afunc.hpp"
#include "orbiform/feasibility.hpp"
#include "orbiform/shadow.hpp"
#include "orbiform/surface.hpp"
#include "orbiform/verify.hpp"

namespace orbiform {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Config

struct BodyConfig {
  std::string name;
  std::vector<ATerm> terms;
  /// Empty means "auto": solve for r0.
  std::optional<double> r;
  /// Empty means the default anchor (0, 0, r).
  std::optional<Vec3> x0;
  int nphi = 256;
  int ntheta = 256;

  bool auto_radius() const { return !r.has_value(); }
  AFunction function() const { return AFunction(terms); }
  Vec3 anchor(double radius) const { return x0 ? *x0 : default_anchor(radius); }
};

inline std::string weight_tag(const ThetaWeight& w) {
  switch (w.kind) {
    case WeightKind::One: return "one";
    case WeightKind::Cos2: return "cos2";
    case WeightKind::Sin2: return "sin2";
    case WeightKind::SignedSin2: return "signedsin2";
    case WeightKind::CosEven: return "coseven:" + std::to_string(w.m);
    case WeightKind::SinEven: return "sineven:" + std::to_string(w.m);
    case WeightKind::CosOdd: return "cosodd:" + std::to_string(w.m);
    case WeightKind::SinOdd: return "sinodd:" + std::to_string(w.m);
  }
  return "one";
}

namespace detail {

inline int json_int(const Json& v, const std::string& field) {
  if (v.is_number_integer()) return v.get<int>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::floor(d) == d) return static_cast<int>(d);
  }
  throw Error(ErrorCode::SchemaError, field + ": expected an integer");
}

inline double json_real(const Json& v, const std::string& field) {
  if (!v.is_number()) throw Error(ErrorCode::SchemaError, field + ": expected a number");
  return v.get<double>();
}

inline ThetaWeight parse_weight(const std::string& tag, const Json* m_field, const std::string& field) {
  static const std::map<std::string, WeightKind> kinds{
      {"one", WeightKind::One},         {"cos2", WeightKind::Cos2},
      {"sin2", WeightKind::Sin2},       {"signedsin2", WeightKind::SignedSin2},
      {"coseven", WeightKind::CosEven}, {"sineven", WeightKind::SinEven},
      {"cosodd", WeightKind::CosOdd},   {"sinodd", WeightKind::SinOdd}};
  const auto colon = tag.find(':');
  const std::string base = tag.substr(0, colon);
  const auto it = kinds.find(base);
  if (it == kinds.end()) throw Error(ErrorCode::SchemaError, field + ": unknown weight tag '" + tag + "'");
  ThetaWeight w{it->second, 0};
  if (!w.has_parameter()) {
    if (colon != std::string::npos || m_field)
      throw Error(ErrorCode::SchemaError, field + ": weight '" + base + "' takes no parameter");
    return w;
  }
  if (colon != std::string::npos) {
    const std::string digits = tag.substr(colon + 1);
    std::size_t used = 0;
    try {
      w.m = std::stoi(digits, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (digits.empty() || used != digits.size())
      throw Error(ErrorCode::SchemaError, field + ": bad weight parameter in '" + tag + "'");
  } else if (m_field) {
    w.m = json_int(*m_field, field + ".m");
  } else {
    throw Error(ErrorCode::SchemaError, field + ": weight '" + base + "' needs a parameter m");
  }
  return w;
}

inline std::pair<int, int> line_column(const std::string& text, std::size_t byte) {
  int line = 1, col = 1;
  for (std::size_t k = 0; k < byte && k < text.size(); ++k) {
    if (text[k] == '\n') { ++line; col = 1; } else { ++col; }
  }
  return {line, col};
}

}  // namespace detail

/// Parses and validates a body config. Errors: ParseError (with line and
/// column), SchemaError (with the field path), InvalidTerm and
/// ConditionViolated from validation.
inline BodyConfig parse_config(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const auto [line, col] = detail::line_column(text, e.byte == 0 ? 0 : e.byte - 1);
    std::ostringstream msg;
    msg << "line " << line << ", column " << col << ": " << e.what();
    throw Error(ErrorCode::ParseError, msg.str());
  }
  if (!doc.is_object()) throw Error(ErrorCode::SchemaError, "top level must be an object");

  static const std::set<std::string> known{"name", "terms", "r", "x0", "grid"};
  for (const auto& [key, _] : doc.items())
    if (!known.count(key)) throw Error(ErrorCode::SchemaError, key + ": unknown field");

  BodyConfig cfg;
  if (doc.contains("name")) {
    if (!doc["name"].is_string()) throw Error(ErrorCode::SchemaError, "name: expected a string");
    cfg.name = doc["name"].get<std::string>();
  }
  if (!doc.contains("terms") || !doc["terms"].is_array())
    throw Error(ErrorCode::SchemaError, "terms: expected an array");
  const auto& terms = doc["terms"];
  for (std::size_t k = 0; k < terms.size(); ++k) {
    const std::string field = "terms[" + std::to_string(k) + "]";
    const auto& t = terms[k];
    if (!t.is_object()) throw Error(ErrorCode::SchemaError, field + ": expected an object");
    for (const auto& [key, _] : t.items())
      if (key != "coef" && key != "weight" && key != "m" && key != "harmonic")
        throw Error(ErrorCode::SchemaError, field + "." + key + ": unknown field");
    if (!t.contains("coef")) throw Error(ErrorCode::SchemaError, field + ".coef: missing");
    if (!t.contains("weight") || !t["weight"].is_string())
      throw Error(ErrorCode::SchemaError, field + ".weight: expected a string tag");
    if (!t.contains("harmonic") || !t["harmonic"].is_object())
      throw Error(ErrorCode::SchemaError, field + ".harmonic: expected an object");
    ATerm term;
    term.coefficient = detail::json_real(t["coef"], field + ".coef");
    term.weight = detail::parse_weight(t["weight"].get<std::string>(),
                                       t.contains("m") ? &t["m"] : nullptr, field + ".weight");
    const auto& h = t["harmonic"];
    if (!h.contains("kind") || !h["kind"].is_string())
      throw Error(ErrorCode::SchemaError, field + ".harmonic.kind: expected \"cos\" or \"sin\"");
    const auto kind = h["kind"].get<std::string>();
    if (kind == "cos") term.harmonic.kind = HarmonicKind::Cos;
    else if (kind == "sin") term.harmonic.kind = HarmonicKind::Sin;
    else throw Error(ErrorCode::SchemaError, field + ".harmonic.kind: expected \"cos\" or \"sin\"");
    if (!h.contains("k")) throw Error(ErrorCode::SchemaError, field + ".harmonic.k: missing");
    term.harmonic.k = detail::json_int(h["k"], field + ".harmonic.k");
    check_term(term, k);
    cfg.terms.push_back(term);
  }

  if (doc.contains("r")) {
    const auto& r = doc["r"];
    if (r.is_string()) {
      if (r.get<std::string>() != "auto") throw Error(ErrorCode::SchemaError, "r: expected a number or \"auto\"");
    } else {
      cfg.r = detail::json_real(r, "r");
      if (!(*cfg.r > 0.0)) throw Error(ErrorCode::SchemaError, "r: must be positive");
    }
  }
  if (doc.contains("x0")) {
    const auto& x = doc["x0"];
    if (x.is_string()) {
      if (x.get<std::string>() != "default") throw Error(ErrorCode::SchemaError, "x0: expected [x, y, z] or \"default\"");
    } else {
      if (!x.is_array() || x.size() != 3) throw Error(ErrorCode::SchemaError, "x0: expected [x, y, z] or \"default\"");
      cfg.x0 = Vec3(detail::json_real(x[0], "x0[0]"), detail::json_real(x[1], "x0[1]"),
                    detail::json_real(x[2], "x0[2]"));
    }
  }
  if (doc.contains("grid")) {
    const auto& g = doc["grid"];
    if (!g.is_object()) throw Error(ErrorCode::SchemaError, "grid: expected an object");
    if (g.contains("nphi")) cfg.nphi = detail::json_int(g["nphi"], "grid.nphi");
    if (g.contains("ntheta")) cfg.ntheta = detail::json_int(g["ntheta"], "grid.ntheta");
    if (cfg.nphi < 8 || cfg.nphi % 2 != 0) throw Error(ErrorCode::SchemaError, "grid.nphi: must be even and >= 8");
    if (cfg.ntheta < 4) throw Error(ErrorCode::SchemaError, "grid.ntheta: must be >= 4");
  }
  validate(cfg.terms);
  return cfg;
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path);
}

inline BodyConfig load_config(const std::string& path) { return parse_config(read_text(path)); }

inline Json config_to_json(const BodyConfig& cfg) {
  Json doc;
  if (!cfg.name.empty()) doc["name"] = cfg.name;
  Json terms = Json::array();
  for (const auto& t : cfg.terms) {
    terms.push_back({{"coef", t.coefficient},
                     {"weight", weight_tag(t.weight)},
                     {"harmonic", {{"kind", t.harmonic.kind == HarmonicKind::Cos ? "cos" : "sin"},
                                   {"k", t.harmonic.k}}}});
  }
  doc["terms"] = terms;
  if (cfg.r) doc["r"] = *cfg.r; else doc["r"] = "auto";
  if (cfg.x0) doc["x0"] = {cfg.x0->x(), cfg.x0->y(), cfg.x0->z()}; else doc["x0"] = "default";
  doc["grid"] = {{"nphi", cfg.nphi}, {"ntheta", cfg.ntheta}};
  return doc;
}

// ---------------------------------------------------------------------------
// Gallery

struct GalleryEntry {
  std::string name;
  std::string formula;
  std::vector<ATerm> terms;
  /// Radius printed with the figure.
  double caption_r0 = 0.0;
};

inline std::vector<GalleryEntry> gallery() {
  const auto cos_h = [](int k) { return PhiHarmonic{HarmonicKind::Cos, k}; };
  const auto sin_h = [](int k) { return PhiHarmonic{HarmonicKind::Sin, k}; };
  const ThetaWeight c2{WeightKind::Cos2, 0}, s2{WeightKind::Sin2, 0}, ss{WeightKind::SignedSin2, 0};
  return {
      {"gallery1", "-cos^2(t) cos(3p)", {{-1.0, c2, cos_h(3)}}, 1.0},
      {"gallery2", "-cos^2(t) cos(3p) + sin^2(t) cos(3p)",
       {{-1.0, c2, cos_h(3)}, {1.0, s2, cos_h(3)}}, 1.08867},
      {"gallery3", "-cos^2(t) cos(3p) + sin^2(t) cos(5p)",
       {{-1.0, c2, cos_h(3)}, {1.0, s2, cos_h(5)}}, 1.11693},
      {"gallery4", "cos^2(t) cos(3p) + sin^2(t) cos(5p)",
       {{1.0, c2, cos_h(3)}, {1.0, s2, cos_h(5)}}, 1.0},
      {"gallery5", "-cos^2(t) cos(5p) + sin^2(t) cos(5p)",
       {{-1.0, c2, cos_h(5)}, {1.0, s2, cos_h(5)}}, 1.01954},
      {"gallery6", "-cos^2(t) cos(5p) + |sin(t)| sin(t) sin(5p)",
       {{-1.0, c2, cos_h(5)}, {1.0, ss, sin_h(5)}}, 1.1102},
  };
}

/// The two-term example cos^2(t)(-cos 3p) + |sin t| sin t sin 3p.
inline std::vector<ATerm> combiaa_terms() {
  return {{-1.0, {WeightKind::Cos2, 0}, {HarmonicKind::Cos, 3}},
          {1.0, {WeightKind::SignedSin2, 0}, {HarmonicKind::Sin, 3}}};
}

// ---------------------------------------------------------------------------
// OBJ

struct MeshData {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;  // zero-based
};

struct MeshSummary {
  std::size_t vertices = 0;
  std::size_t faces = 0;
  std::size_t edges = 0;
  long euler = 0;
  /// Every undirected edge in exactly two faces, every directed edge once.
  bool watertight = false;
  std::size_t degenerate_faces = 0;
};

inline MeshSummary summarize(const MeshData& mesh) {
  MeshSummary s;
  s.vertices = mesh.vertices.size();
  s.faces = mesh.faces.size();
  std::map<std::pair<int, int>, int> undirected;
  std::set<std::pair<int, int>> directed;
  bool consistent = true;
  for (const auto& f : mesh.faces) {
    if (f[0] == f[1] || f[1] == f[2] || f[0] == f[2]) ++s.degenerate_faces;
    for (int e = 0; e < 3; ++e) {
      const int a = f[static_cast<std::size_t>(e)], b = f[static_cast<std::size_t>((e + 1) % 3)];
      ++undirected[{std::min(a, b), std::max(a, b)}];
      if (!directed.insert({a, b}).second) consistent = false;
    }
  }
  s.edges = undirected.size();
  bool two = true;
  for (const auto& [_, n] : undirected) two = two && n == 2;
  s.watertight = two && consistent;
  s.euler = static_cast<long>(s.vertices) - static_cast<long>(s.edges) + static_cast<long>(s.faces);
  return s;
}

/// Welded triangle mesh of a sampled body. Vertex order: north pole, then
/// theta rows j = 0..ntheta-1 with the interior phi nodes in order, then the
/// south pole. The row theta = pi reuses row 0 through (phi, pi) ~ (2pi - phi, 0).
/// Faces wind outward: phi-then-theta order on phi < pi, reversed on phi > pi.
inline MeshData body_mesh(const BodySurface& body) {
  const int np = body.nphi, nt = body.ntheta, half = np / 2;
  MeshData mesh;
  std::vector<int> row_slot(static_cast<std::size_t>(np + 1), -1);
  int interior = 0;
  for (int i = 1; i < np; ++i)
    if (i != half) row_slot[static_cast<std::size_t>(i)] = interior++;
  const int south = 1 + interior * nt;

  auto id = [&](int i, int j) {
    if (j == nt) { i = np - i; j = 0; }
    if (i == 0 || i == np) return 0;
    if (i == half) return south;
    return 1 + j * interior + row_slot[static_cast<std::size_t>(i)];
  };

  mesh.vertices.resize(static_cast<std::size_t>(south + 1));
  mesh.vertices[0] = body.at(0, 0);
  mesh.vertices[static_cast<std::size_t>(south)] = body.at(half, 0);
  for (int j = 0; j < nt; ++j)
    for (int i = 1; i < np; ++i)
      if (i != half) mesh.vertices[static_cast<std::size_t>(id(i, j))] = body.at(i, j);

  auto emit = [&](int a, int b, int c) {
    if (a != b && b != c && a != c) mesh.faces.push_back({a, b, c});
  };
  for (int j = 0; j < nt; ++j) {
    for (int i = 0; i < np; ++i) {
      const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      if (i < half) {
        emit(a, b, c);
        emit(a, c, d);
      } else {
        emit(a, c, b);
        emit(a, d, c);
      }
    }
  }
  return mesh;
}

inline std::string format_obj(const MeshData& mesh) {
  std::string out;
  out.reserve(mesh.vertices.size() * 48 + mesh.faces.size() * 24);
  char buf[128];
  for (const auto& v : mesh.vertices) {
    std::snprintf(buf, sizeof buf, "v %.9g %.9g %.9g\n", v.x(), v.y(), v.z());
    out += buf;
  }
  for (const auto& f : mesh.faces) {
    std::snprintf(buf, sizeof buf, "f %d %d %d\n", f[0] + 1, f[1] + 1, f[2] + 1);
    out += buf;
  }
  return out;
}

inline MeshSummary export_obj(const BodySurface& body, const std::string& path) {
  const auto mesh = body_mesh(body);
  write_text(path, format_obj(mesh));
  return summarize(mesh);
}

/// Reads v and f records (triangles; polygon faces are fanned).
inline MeshData read_obj(const std::string& path) {
  std::istringstream in(read_text(path));
  MeshData mesh;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "v") {
      double x, y, z;
      if (!(ls >> x >> y >> z)) throw Error(ErrorCode::ParseError, path + ":" + std::to_string(lineno) + ": bad vertex");
      mesh.vertices.emplace_back(x, y, z);
    } else if (tag == "f") {
      std::vector<int> idx;
      std::string tok;
      while (ls >> tok) idx.push_back(std::stoi(tok.substr(0, tok.find('/'))) - 1);
      if (idx.size() < 3) throw Error(ErrorCode::ParseError, path + ":" + std::to_string(lineno) + ": bad face");
      for (std::size_t k = 1; k + 1 < idx.size(); ++k) mesh.faces.push_back({idx[0], idx[k], idx[k + 1]});
    }
  }
  return mesh;
}

// ---------------------------------------------------------------------------
// Curves and shadows

enum class CurveFormat { Csv, Svg };

struct CurveSummary {
  std::size_t samples = 0;
  double closure_gap = 0.0;
  double width = 0.0;
  double height = 0.0;
};

inline std::string format_curve_csv(const Curve2D& c) {
  std::string out = "phi,x,y\n";
  char buf[128];
  for (std::size_t k = 0; k < c.points.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.9g,%.9g,%.9g\n", c.phi[k], c.points[k].x(), c.points[k].y());
    out += buf;
  }
  return out;
}

/// Closed SVG path in curve units (y flipped so the curve keeps its orientation).
inline std::string format_curve_svg(const Curve2D& c) {
  double minx = 1e300, maxx = -1e300, miny = 1e300, maxy = -1e300;
  for (const auto& p : c.points) {
    minx = std::min(minx, p.x()); maxx = std::max(maxx, p.x());
    miny = std::min(miny, -p.y()); maxy = std::max(maxy, -p.y());
  }
  char buf[256];
  std::string out;
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"%.9g %.9g %.9g %.9g\">\n",
                minx, miny, maxx - minx, maxy - miny);
  out += buf;
  out += "<path fill=\"none\" stroke=\"black\" stroke-width=\"0.005\" d=\"";
  // the last sample repeats the first; Z closes the path
  const std::size_t n = c.points.size() > 1 ? c.points.size() - 1 : c.points.size();
  for (std::size_t k = 0; k < n; ++k) {
    std::snprintf(buf, sizeof buf, "%s%.9g %.9g ", k == 0 ? "M" : "L", c.points[k].x(), -c.points[k].y());
    out += buf;
  }
  out += "Z\"/>\n</svg>\n";
  return out;
}

inline CurveSummary export_curve(const Curve2D& c, const std::string& path, CurveFormat format) {
  write_text(path, format == CurveFormat::Csv ? format_curve_csv(c) : format_curve_svg(c));
  CurveSummary s;
  s.samples = c.points.size();
  if (!c.points.empty()) s.closure_gap = (c.points.back() - c.points.front()).norm();
  double minx = 1e300, maxx = -1e300, miny = 1e300, maxy = -1e300;
  for (const auto& p : c.points) {
    minx = std::min(minx, p.x()); maxx = std::max(maxx, p.x());
    miny = std::min(miny, p.y()); maxy = std::max(maxy, p.y());
  }
  s.width = maxx - minx;
  s.height = maxy - miny;
  return s;
}

inline std::string format_shadow_csv(const ShadowDomain3D& sh) {
  std::string out = "height,psi,R\n";
  char buf[128];
  for (std::size_t k = 0; k < sh.slices.size(); ++k) {
    for (int i = 0; i < sh.slices[k].size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.9g,%.9g,%.9g\n", sh.heights[k], sh.slices[k].psi(i),
                    sh.slices[k].R[static_cast<std::size_t>(i)]);
      out += buf;
    }
  }
  return out;
}

inline std::string format_shadow_csv(const ShadowDomain& sh) {
  std::string out = "psi,R\n";
  char buf[96];
  for (int i = 0; i < sh.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.9g,%.9g\n", sh.psi(i), sh.R[static_cast<std::size_t>(i)]);
    out += buf;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Reports

inline Json to_json(const VerificationReport& rep) {
  Json checks = Json::object();
  for (const auto& c : rep.checks) {
    checks[c.name] = {{"max_residual", c.max_residual},
                      {"tolerance", c.tolerance},
                      {"pass", c.pass},
                      {"samples", c.samples},
                      {"note", c.note}};
  }
  return {{"pass", rep.pass()}, {"checks", checks}};
}

inline Json to_json(const ValidationReport& rep) {
  Json conds = Json::array();
  for (const auto& c : rep.conditions)
    conds.push_back({{"condition", c.name}, {"max_residual", c.max_residual},
                     {"tolerance", c.tolerance}, {"pass", c.pass}});
  return {{"valid", rep.valid()}, {"conditions", conds}};
}

inline Json to_json(const FeasibilityReport& rep) {
  return {{"r0", rep.r0},
          {"bracket", {rep.bracket_lo, rep.bracket_hi}},
          {"min_T", rep.min_T},
          {"min_D_over_sin", rep.min_D_over_sin},
          {"argmin", {{"phi", rep.argmin_phi}, {"theta", rep.argmin_theta}}},
          {"grid", {{"nphi", rep.n_phi}, {"ntheta", rep.n_theta}}},
          {"iterations", rep.iterations},
          {"samples", rep.samples}};
}

inline Json to_json(const SupNorms& n) {
  return {{"a", n.a}, {"a_theta", n.a_theta}, {"a_thetatheta", n.a_thetatheta}};
}

}  // namespace orbiform
