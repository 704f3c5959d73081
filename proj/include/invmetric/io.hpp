#pragma once

// JSON and CSV serialization: domains, solver configs, discs and report rows.

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "invmetric/bounds.hpp"
#include "invmetric/geodesics.hpp"

namespace invmetric::io {

using nlohmann::json;

class ConfigError : public InputError {
 public:
  using InputError::InputError;
};

// ---------------------------------------------------------------------------
// Numbers and points
// ---------------------------------------------------------------------------

/// A complex number is a JSON number or a [re, im] pair.
inline cplx complex_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw ConfigError("expected a number or [re, im], got " + j.dump());
}

inline json complex_to_json(cplx c) { return json::array({c.real(), c.imag()}); }

inline CVec vec_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw ConfigError("expected a nonempty array of coordinates, got " + j.dump());
  CVec v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v[i] = complex_from_json(j[i]);
  return v;
}

inline json vec_to_json(const CVec& v) {
  json a = json::array();
  for (const auto& c : v) a.push_back(complex_to_json(c));
  return a;
}

/// Finite doubles as numbers, non-finite as null (JSON has no infinity).
inline json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

// ---------------------------------------------------------------------------
// Domains
// ---------------------------------------------------------------------------

namespace detail {

inline const json& param(const json& params, const char* key) {
  if (!params.contains(key)) throw ConfigError(std::string("missing domain parameter \"") + key + "\"");
  return params.at(key);
}

inline std::vector<double> doubles(const json& j, const char* what) {
  if (!j.is_array() || j.empty()) throw ConfigError(std::string(what) + " must be a nonempty array of numbers");
  std::vector<double> out;
  for (const auto& x : j) {
    if (!x.is_number()) throw ConfigError(std::string(what) + " must contain numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

inline std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace detail

/// {"kind": ..., "params": {...}}; kind names are matched case-insensitively.
inline DomainGeometry domain_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    throw ConfigError("a domain is an object with a string \"kind\"");
  const json params = j.value("params", json::object());
  if (!params.is_object()) throw ConfigError("domain \"params\" must be an object");
  const std::string kind = detail::lower(j["kind"].get<std::string>());
  if (kind == "unitdisc" || kind == "disc") return DomainGeometry::unit_disc();
  if (kind == "ball") {
    if (params.contains("center"))
      return DomainGeometry::ball(vec_from_json(params["center"]), params.value("radius", 1.0));
    const auto n = params.value("dimension", 2);
    if (n < 1) throw ConfigError("ball dimension must be >= 1");
    return DomainGeometry::ball(Point(static_cast<std::size_t>(n)), params.value("radius", 1.0));
  }
  if (kind == "polydisc") return DomainGeometry::polydisc(detail::doubles(detail::param(params, "radii"), "radii"));
  if (kind == "complexellipsoid" || kind == "ellipsoid")
    return DomainGeometry::ellipsoid(detail::doubles(detail::param(params, "exponents"), "exponents"));
  if (kind == "annulus") return DomainGeometry::annulus(detail::param(params, "inner").get<double>());
  if (kind == "halfplane")
    return DomainGeometry::half_plane(vec_from_json(detail::param(params, "normal")), params.value("offset", 0.0));
  if (kind == "intersection") {
    const DomainGeometry base = domain_from_json(detail::param(params, "base"));
    return DomainGeometry::intersection(base, vec_from_json(detail::param(params, "center")),
                                        detail::param(params, "radius").get<double>());
  }
  throw ConfigError("unknown domain kind \"" + j["kind"].get<std::string>() + "\"");
}

inline json domain_to_json(const DomainGeometry& d) {
  json j{{"kind", kind_name(d.kind())}, {"params", json::object()}};
  auto& p = j["params"];
  switch (d.kind()) {
    case DomainKind::UnitDisc: break;
    case DomainKind::Ball: {
      const auto& b = d.as<shape::Ball>();
      p["center"] = vec_to_json(b.center);
      p["radius"] = b.radius;
      break;
    }
    case DomainKind::Polydisc: p["radii"] = d.as<shape::Polydisc>().radii; break;
    case DomainKind::ComplexEllipsoid: p["exponents"] = d.as<shape::ComplexEllipsoid>().exponents; break;
    case DomainKind::Annulus: p["inner"] = d.as<shape::Annulus>().inner; break;
    case DomainKind::HalfPlane: {
      const auto& h = d.as<shape::HalfPlane>();
      p["normal"] = vec_to_json(h.normal);
      p["offset"] = h.offset;
      break;
    }
    case DomainKind::Intersection: {
      const auto& s = d.as<shape::Intersection>();
      p["base"] = domain_to_json(*s.base);
      p["center"] = vec_to_json(s.center);
      p["radius"] = s.radius;
      break;
    }
  }
  return j;
}

// ---------------------------------------------------------------------------
// Solver config
// ---------------------------------------------------------------------------

inline SolverConfig solver_from_json(const json& j, SolverConfig base = {}) {
  if (!j.is_object()) throw ConfigError("solver config must be an object");
  static const std::vector<std::string> known{"degree",    "boundary_samples", "restarts",       "tol",     "seed",
                                              "min_delta", "path_nodes",       "laurent_degree", "patience"};
  for (const auto& [k, v] : j.items())
    if (std::find(known.begin(), known.end(), k) == known.end()) throw ConfigError("unknown solver key \"" + k + "\"");
  try {
    base.degree = j.value("degree", base.degree);
    base.boundary_samples = j.value("boundary_samples", base.boundary_samples);
    base.restarts = j.value("restarts", base.restarts);
    base.tol = j.value("tol", base.tol);
    base.seed = j.value("seed", base.seed);
    base.min_delta = j.value("min_delta", base.min_delta);
    base.path_nodes = j.value("path_nodes", base.path_nodes);
    base.laurent_degree = j.value("laurent_degree", base.laurent_degree);
    base.patience = j.value("patience", base.patience);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad solver config: ") + e.what());
  }
  base.validate();
  return base;
}

inline json solver_to_json(const SolverConfig& c) {
  return {{"degree", c.degree},         {"boundary_samples", c.boundary_samples}, {"restarts", c.restarts},
          {"tol", c.tol},               {"seed", c.seed},                         {"min_delta", c.min_delta},
          {"path_nodes", c.path_nodes}, {"laurent_degree", c.laurent_degree},     {"patience", c.patience}};
}

// ---------------------------------------------------------------------------
// Discs and geodesics
// ---------------------------------------------------------------------------

inline json disc_to_json(const AnalyticDiscParam& p) {
  json coeffs = json::array();
  for (const auto& a : p.coeffs) coeffs.push_back(vec_to_json(a));
  return {{"chart", p.chart == ChartKind::Log ? "log" : "identity"},
          {"coeffs", coeffs},
          {"pre_a", complex_to_json(p.pre_a)},
          {"pre_rot", complex_to_json(p.pre_rot)},
          {"alpha", complex_to_json(p.alpha)},
          {"boundary_samples", p.boundary_samples},
          {"shrink", p.shrink},
          {"star_normalized", p.star_normalized}};
}

inline AnalyticDiscParam disc_from_json(const json& j) {
  AnalyticDiscParam p;
  const std::string chart = j.value("chart", "identity");
  if (chart != "identity" && chart != "log") throw ConfigError("disc chart must be \"identity\" or \"log\"");
  p.chart = chart == "log" ? ChartKind::Log : ChartKind::Identity;
  if (!j.contains("coeffs") || !j["coeffs"].is_array()) throw ConfigError("disc needs a \"coeffs\" array");
  for (const auto& c : j["coeffs"]) p.coeffs.push_back(vec_from_json(c));
  if (p.coeffs.empty()) throw ConfigError("disc needs at least one coefficient");
  p.pre_a = complex_from_json(j.value("pre_a", json(0.0)));
  p.pre_rot = complex_from_json(j.value("pre_rot", json(1.0)));
  p.alpha = complex_from_json(j.value("alpha", json(0.0)));
  p.boundary_samples = j.value("boundary_samples", 0);
  p.shrink = j.value("shrink", 0.0);
  p.star_normalized = j.value("star_normalized", false);
  return p;
}

inline json geodesic_to_json(const ComplexGeodesicDisc& g) {
  return {{"disc", disc_to_json(g.disc)},
          {"zeta_z", complex_to_json(g.zeta_z)},
          {"zeta_w", complex_to_json(g.zeta_w)},
          {"defect", g.defect},
          {"tol", g.tol},
          {"accepted", g.accepted},
          {"source", g.source},
          {"bracket_width", g.bracket_width}};
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

/// Shortest round-trip decimal form; fixed across runs for identical doubles.
inline std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// Complex vector as space-separated a+bi terms (no commas, so no CSV quoting).
inline std::string fmt(const CVec& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ' ';
    s += fmt(v[i].real());
    const double im = v[i].imag();
    s += (std::signbit(im) ? "-" : "+") + fmt(std::abs(im)) + "i";
  }
  return s;
}

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header) : columns_(header.size()) { line(header); }

  template <class... T>
  void row(const T&... cells) {
    std::vector<std::string> v{cell(cells)...};
    if (v.size() != columns_) throw std::logic_error("csv row width mismatch");
    line(v);
  }
  [[nodiscard]] std::string str() const { return out_.str(); }
  [[nodiscard]] std::size_t rows() const { return rows_; }

 private:
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  static std::string cell(double x) { return fmt(x); }
  static std::string cell(int x) { return std::to_string(x); }
  static std::string cell(std::size_t x) { return std::to_string(x); }
  static std::string cell(bool b) { return b ? "true" : "false"; }
  static std::string cell(const CVec& v) { return fmt(v); }
  void line(const std::vector<std::string>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) out_ << (i ? "," : "") << v[i];
    out_ << '\n';
    ++rows_;
  }
  std::size_t columns_;
  std::size_t rows_ = 0;
  std::ostringstream out_;
};

inline const std::vector<std::string>& report_columns() {
  static const std::vector<std::string> c{"inequality", "index", "z",     "w",      "X",        "delta_z", "delta_w",
                                          "lhs",        "shape", "required", "margin", "status", "source"};
  return c;
}

inline void append_report(CsvWriter& w, const ComparisonReport& r) {
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    const auto& row = r.rows[i];
    w.row(r.id, i, row.z, row.w, row.X, row.delta_z, row.delta_w, row.lhs, row.shape, row.required, row.margin,
          std::string(status_name(row.status)), row.source);
  }
}

inline json report_summary(const ComparisonReport& r) {
  return {{"inequality", r.id},
          {"statement", r.statement},
          {"form", form_name(r.form)},
          {"C", number(r.C)},
          {"stability", number(r.stability)},
          {"rows", r.rows.size()},
          {"dropped", r.dropped},
          {"unboundable", r.unboundable},
          {"min_margin", number(r.min_margin)},
          {"flagged", r.flagged()},
          {"lower_ratio", r.lower_ratio ? number(*r.lower_ratio) : json(nullptr)}};
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << content;
}

inline json read_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open " + path);
  try {
    return json::parse(f);
  } catch (const json::parse_error& e) {
    throw ConfigError("malformed JSON in " + path + ": " + e.what());
  }
}

}  // namespace invmetric::io
