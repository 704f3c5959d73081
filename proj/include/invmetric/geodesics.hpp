#pragma once

// Gromov products, complex and real geodesics, and the boundary-behavior probes
// built on them: visibility, strong completeness, equicontinuity of normalized
// geodesic families and continuous extension to the closed disc.

#include <algorithm>
#include <numeric>

#include "invmetric/extremal.hpp"
#include "invmetric/parallel.hpp"

namespace invmetric {

enum class MetricSource { Auto, ClosedForm, Bracket };

/// Two-sided enclosure of k_D.
struct KBracket {
  double lower = 0.0;
  double upper = 0.0;
  std::string source;
  [[nodiscard]] double width() const { return upper - lower; }
};

/// k_D from the closed form, or [Caratheodory lower, Lempert upper] (path upper when no disc certifies).
inline KBracket k_bracket(const DomainGeometry& d, const Point& z, const Point& w, MetricSource src,
                          const SolverConfig& cfg = {}) {
  const bool closed = src == MetricSource::ClosedForm || (src == MetricSource::Auto && d.has_closed_form());
  if (closed) {
    if (!d.has_closed_form()) throw CapabilityError(std::string("no closed-form metric for ") + kind_name(d.kind()));
    const double v = model_distance(d, z, w).value;
    return {v, v, "closed_form"};
  }
  if (z == w) return {0.0, 0.0, "bracket"};
  const double lo = caratheodory_lower(d, z, w, cfg).value.value;
  double up = kInf;
  try {
    up = lempert_upper(d, z, w, cfg).value.value;
  } catch (const SolverFailure&) {
    const auto path = kobayashi_distance_upper(d, z, w, cfg);
    up = path.value.value + path.error_estimate;
  }
  return {lo, std::max(lo, up), "bracket"};
}

// ---------------------------------------------------------------------------
// Gromov product
// ---------------------------------------------------------------------------

struct GromovRecord {
  Point z, w, o;
  double value = 0.0;  // midpoint of [lower, upper]
  double lower = 0.0;
  double upper = 0.0;
  std::string source;
  [[nodiscard]] double width() const { return upper - lower; }
};

/// (z|w)_o = k(z, o) + k(w, o) - k(z, w); with brackets the lower bound pairs the two lower
/// bounds with the upper bound of k(z, w), and conversely.
inline GromovRecord gromov_product(const DomainGeometry& d, const Point& z, const Point& w, const Point& o,
                                   MetricSource src = MetricSource::Auto, const SolverConfig& cfg = {}) {
  for (const auto* p : {&z, &w, &o})
    if (!d.contains(*p)) throw DomainError("Gromov product needs interior points");
  const auto zo = k_bracket(d, z, o, src, cfg);
  const auto wo = k_bracket(d, w, o, src, cfg);
  const auto zw = k_bracket(d, z, w, src, cfg);
  GromovRecord r{z, w, o, 0.0, zo.lower + wo.lower - zw.upper, zo.upper + wo.upper - zw.lower, zo.source};
  r.value = 0.5 * (r.lower + r.upper);
  return r;
}

// ---------------------------------------------------------------------------
// Complex geodesics
// ---------------------------------------------------------------------------

struct GeodesicOptions {
  double tol = 5e-3;
  std::vector<double> radii{0.0, 0.3, 0.6, 0.85};
  int angles = 6;
  MetricSource source = MetricSource::Auto;
  unsigned threads = 1;
};

struct ComplexGeodesicDisc {
  AnalyticDiscParam disc;
  cplx zeta_z = 0.0;  // preimage of z
  cplx zeta_w = 0.0;  // preimage of w
  double defect = 0.0;
  double tol = 0.0;
  bool accepted = false;
  std::string source;
  double bracket_width = 0.0;  // widest k_D bracket on the test grid
  cplx worst_zeta = 0.0, worst_eta = 0.0;
  double grid_step = 0.0;  // set by normalize_star
  SolveDiagnostics diag;
};

/// Polynomial disc zeta -> sum a_k zeta^k in identity coordinates.
inline AnalyticDiscParam polynomial_disc(std::vector<CVec> coeffs) {
  if (coeffs.empty()) throw InputError("a disc needs at least one coefficient");
  AnalyticDiscParam p;
  p.coeffs = std::move(coeffs);
  return p;
}

namespace detail {

inline std::vector<cplx> disc_grid(const std::vector<double>& radii, int angles, double phase = 0.0) {
  std::vector<cplx> g;
  for (const double r : radii) {
    if (!(r >= 0.0) || !(r < 1.0)) throw InputError("grid radii must lie in [0, 1)");
    if (r == 0.0) {
      g.emplace_back(0.0);
      continue;
    }
    for (int a = 0; a < angles; ++a) g.push_back(std::polar(r, phase + 2.0 * kPi * (a + 0.5 * (r > 0.5)) / angles));
  }
  return g;
}

struct DefectResult {
  double defect = 0.0;
  cplx zeta = 0.0, eta = 0.0;
  double max_width = 0.0;
  std::string source;
};

/// Distance from t to the enclosure [lower, upper] of k_D; |t - k_D| for a closed form.
inline double outside(double t, const KBracket& kb) { return std::max({0.0, kb.lower - t, t - kb.upper}); }

/// max |k_Delta(zeta, eta) - k_D(phi zeta, phi eta)| over grid pairs; with a bracket for k_D, the
/// distance of k_Delta from the bracket.
inline DefectResult isometry_defect(const DomainGeometry& d, const AnalyticDiscParam& disc,
                                    const std::vector<cplx>& grid, const GeodesicOptions& opt,
                                    const SolverConfig& cfg) {
  std::vector<std::pair<cplx, cplx>> pairs;
  for (std::size_t i = 0; i < grid.size(); ++i)
    for (std::size_t j = i + 1; j < grid.size(); ++j) pairs.emplace_back(grid[i], grid[j]);
  for (const cplx c : grid)
    if (!d.contains(disc.at(c))) throw DomainError("disc leaves the domain on the test grid");
  const auto vals = parallel_map(pairs.size(), opt.threads, [&](std::size_t i) {
    const auto& [a, b] = pairs[i];
    const double kd = poincare_distance(a, b);
    const auto kb = k_bracket(d, disc.at(a), disc.at(b), opt.source, cfg);
    return std::make_tuple(outside(kd, kb), kb.width(), kb.source);
  });
  DefectResult r;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& [def, width, source] = vals[i];
    r.source = source;
    r.max_width = std::max(r.max_width, width);
    if (def > r.defect) {
      r.defect = def;
      r.zeta = pairs[i].first;
      r.eta = pairs[i].second;
    }
  }
  return r;
}


}  // namespace detail

/// Checks the isometry identity for a given disc; zeta_z and zeta_w are the preimages it carries.
inline ComplexGeodesicDisc verify_geodesic(const DomainGeometry& d, const AnalyticDiscParam& disc, cplx zeta_z,
                                           cplx zeta_w, const GeodesicOptions& opt = {}, const SolverConfig& cfg = {}) {
  ComplexGeodesicDisc g;
  g.disc = disc;
  g.zeta_z = zeta_z;
  g.zeta_w = zeta_w;
  g.tol = opt.tol;
  std::vector<cplx> grid = detail::disc_grid(opt.radii, opt.angles);
  for (const cplx extra : {zeta_z, zeta_w})
    if (std::none_of(grid.begin(), grid.end(), [&](cplx c) { return std::abs(c - extra) < 1e-12; }))
      grid.push_back(extra);
  const auto r = detail::isometry_defect(d, disc, grid, opt, cfg);
  g.defect = r.defect;
  g.worst_zeta = r.zeta;
  g.worst_eta = r.eta;
  g.source = r.source;
  g.bracket_width = r.max_width;
  g.accepted = r.defect <= opt.tol;
  return g;
}

/// Extremal disc through z and w from lempert_upper, accepted iff its isometry defect is within tol.
/// A rejected disc is returned with accepted = false and the worst grid pair.
inline ComplexGeodesicDisc complex_geodesic(const DomainGeometry& d, const Point& z, const Point& w,
                                            const SolverConfig& cfg = {}, const GeodesicOptions& opt = {}) {
  if (!d.is_convex_set()) throw CapabilityError("complex geodesics are constructed on convex domains only");
  if (z == w) throw InputError("complex geodesic needs z != w");
  const auto lem = lempert_upper(d, z, w, cfg);
  auto g = verify_geodesic(d, lem.disc, 0.0, lem.disc.alpha, opt, cfg);
  g.diag = lem.diag;
  return g;
}

namespace detail {

/// phi o M with M(zeta) = (zeta + c) / (1 + conj(c) zeta), folded into the disc's automorphism.
inline AnalyticDiscParam precompose(const AnalyticDiscParam& disc, cplx c) {
  AnalyticDiscParam out = disc;
  const cplx a = disc.automorphism(c);
  const cplx der = disc.automorphism_derivative(c) * (1.0 - std::norm(c));
  cplx rot = der / (1.0 - std::norm(a));
  rot /= std::abs(rot);
  out.pre_a = a;
  out.pre_rot = rot;
  return out;
}

inline cplx mobius_inverse(cplx c, cplx zeta) { return (zeta - c) / (1.0 - std::conj(c) * zeta); }

}  // namespace detail

/// Reparameterizes an accepted geodesic so that delta_D o phi peaks at 0. The peak comes from a
/// polar grid (ties broken by smallest |zeta|) refined by Nelder-Mead.
inline ComplexGeodesicDisc normalize_star(const ComplexGeodesicDisc& g, const DomainGeometry& d, int radial = 48,
                                          int angular = 96) {
  if (!g.accepted) throw InputError("normalize_star needs an accepted geodesic");
  auto score = [&](cplx zeta) {
    if (!(std::abs(zeta) < 1.0)) return -kInf;
    const Point p = g.disc.at(zeta);
    return d.contains(p) ? d.boundary_distance(p) : -kInf;
  };
  cplx best = 0.0;
  double best_v = score(0.0);
  const double rmax = 0.98;
  for (int i = 1; i <= radial; ++i) {
    const double r = rmax * i / radial;
    for (int a = 0; a < angular; ++a) {
      const cplx zeta = std::polar(r, 2.0 * kPi * a / angular);
      const double v = score(zeta);
      if (v > best_v + 1e-12) {
        best_v = v;
        best = zeta;
      }
    }
  }
  const double step = std::max(rmax / radial, 2.0 * kPi / angular);
  if (best != 0.0) {
    const auto nm = opt::nelder_mead(
        [&](const opt::Vec& x) { return -score(cplx(x[0], x[1])); },
        (opt::Vec(2) << best.real(), best.imag()).finished(), 0.5 * step);
    const cplx refined(nm.x[0], nm.x[1]);
    if (score(refined) > best_v + 1e-12) best = refined;
  }
  ComplexGeodesicDisc out = g;
  out.grid_step = step;
  out.disc = detail::precompose(g.disc, best);
  out.disc.star_normalized = true;
  out.zeta_z = detail::mobius_inverse(best, g.zeta_z);
  out.zeta_w = detail::mobius_inverse(best, g.zeta_w);
  return out;
}

/// Whether delta_D(phi(0)) >= delta_D(phi(zeta)) - tol on a polar test grid.
inline bool satisfies_star(const ComplexGeodesicDisc& g, const DomainGeometry& d, double tol, int radial = 24,
                           int angular = 48) {
  const double c = d.boundary_distance(g.disc.at(0.0));
  for (int i = 1; i <= radial; ++i)
    for (int a = 0; a < angular; ++a) {
      const Point p = g.disc.at(std::polar(0.98 * i / radial, 2.0 * kPi * a / angular));
      if (d.contains(p) && d.boundary_distance(p) > c + tol) return false;
    }
  return true;
}

// ---------------------------------------------------------------------------
// Real geodesics
// ---------------------------------------------------------------------------

struct RealGeodesicPath {
  std::vector<Point> nodes;
  std::vector<double> params;  // Kobayashi arc length
  double defect = 0.0;
  double declared_error = 0.0;
  bool accepted = false;
  std::string route;  // "complex_geodesic" or "variational"
  [[nodiscard]] double length() const { return params.empty() ? 0.0 : params.back(); }
};

namespace detail {

inline double path_defect(const DomainGeometry& d, const RealGeodesicPath& p, MetricSource src,
                          const SolverConfig& cfg, unsigned threads) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < p.nodes.size(); ++i)
    for (std::size_t j = i + 1; j < p.nodes.size(); ++j) pairs.emplace_back(i, j);
  const auto vals = parallel_map(pairs.size(), threads, [&](std::size_t k) {
    const auto [i, j] = pairs[k];
    const double target = std::abs(p.params[j] - p.params[i]);
    const auto kb = k_bracket(d, p.nodes[i], p.nodes[j], src, cfg);
    return outside(target, kb);
  });
  return vals.empty() ? 0.0 : *std::max_element(vals.begin(), vals.end());
}

}  // namespace detail

/// On convex domains: the complex geodesic restricted to the hyperbolic segment between the
/// preimages. Elsewhere: the Kobayashi path from kobayashi_distance_upper, parameterized by its
/// cumulative kappa-length, accepted when the defect is within tol plus the path's error estimate.
inline RealGeodesicPath real_geodesic(const DomainGeometry& d, const Point& z, const Point& w, int nodes,
                                      const SolverConfig& cfg = {}, const GeodesicOptions& opt = {}) {
  if (z == w) throw InputError("real geodesic needs z != w");
  if (nodes < 2) throw InputError("real geodesic needs at least two nodes");
  RealGeodesicPath out;
  if (d.is_convex_set()) {
    const auto g = complex_geodesic(d, z, w, cfg, opt);
    out.route = "complex_geodesic";
    const cplx a = g.zeta_w;
    const double len = std::atanh(std::abs(a));
    const cplx u = a / std::abs(a);
    for (int i = 0; i < nodes; ++i) {
      const double t = len * i / (nodes - 1);
      out.params.push_back(t);
      out.nodes.push_back(i == 0 ? z : (i == nodes - 1 ? w : g.disc.at(u * std::tanh(t))));
    }
    out.declared_error = opt.tol;
  } else {
    SolverConfig pc = cfg;
    pc.path_nodes = std::max(cfg.path_nodes, nodes - 1);
    const auto path = kobayashi_distance_upper(d, z, w, pc);
    out.route = "variational";
    const double h = path.step;
    double s = 0.0;
    for (std::size_t i = 0; i < path.nodes.size(); ++i) {
      if (i > 0) s += 0.5 * h * (path.integrand[i - 1] + path.integrand[i]);
      out.params.push_back(s);
      out.nodes.push_back(path.nodes[i]);
    }
    out.declared_error = opt.tol + path.error_estimate;
  }
  out.defect = detail::path_defect(d, out, opt.source, cfg, opt.threads);
  out.accepted = out.defect <= out.declared_error;
  return out;
}

// ---------------------------------------------------------------------------
// Approach sequences and divergence rates
// ---------------------------------------------------------------------------

/// Unit inward normal at a boundary point from central differences of the signed distance.
inline CVec inward_normal(const DomainGeometry& d, const Point& p) {
  const double h = 1e-7 * std::max(1.0, d.scale());
  CVec g(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const CVec e = unit(p.size(), i);
    const double dr = d.signed_distance(p + e * h) - d.signed_distance(p - e * h);
    const double di = d.signed_distance(p + e * cplx(0, h)) - d.signed_distance(p - e * cplx(0, h));
    g[i] = cplx(dr, di) / (2.0 * h);
  }
  const double n = g.norm();
  if (!(n > 0.0)) throw InputError("no inward direction at the boundary point");
  return g / n;
}

struct SequenceOptions {
  int j_min = 1;
  int j_max = 20;
  double base = 2.0;  // delta_j = base^{-j}
  std::optional<Point> origin;  // defaults to the domain anchor
  std::optional<CVec> split;    // w_j = z_j + delta_j^{split_power} split; absent means w_j = z_j
  double split_power = 1.0;
  MetricSource source = MetricSource::Auto;
  SolverConfig cfg;
};

/// Least-squares slope of y against x.
inline double regression_slope(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n < 2) return 0.0;
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxx > 0.0 ? sxy / sxx : 0.0;
}

struct SequenceRow {
  int j = 0;
  double delta = 0.0;
  Point z, w;
  GromovRecord gromov;
};

namespace detail {

inline Point approach_point(const DomainGeometry& d, const Point& p, const CVec& normal, double delta) {
  const Point z = p + normal * delta;
  if (!d.contains(z)) throw InputError("approach point left the domain; boundary point not reachable along the normal");
  return z;
}

struct Rates {
  double slope = 0.0;        // against log(1/delta) over the tail half
  double slope_atanh = 0.0;  // against atanh(1 - delta) over the tail half
  double max_width = 0.0;
  double sup = -kInf;
};

inline Rates rates(const std::vector<SequenceRow>& rows) {
  Rates r;
  std::vector<double> x, xa, y;
  for (std::size_t i = rows.size() / 2; i < rows.size(); ++i) {
    x.push_back(-std::log(rows[i].delta));
    xa.push_back(std::atanh(1.0 - rows[i].delta));
    y.push_back(rows[i].gromov.value);
  }
  for (const auto& row : rows) {
    r.max_width = std::max(r.max_width, row.gromov.width());
    r.sup = std::max(r.sup, row.gromov.value);
  }
  r.slope = regression_slope(x, y);
  r.slope_atanh = regression_slope(xa, y);
  return r;
}

inline std::vector<SequenceRow> run_sequences(const DomainGeometry& d, const std::function<Point(double)>& zf,
                                              const std::function<Point(double)>& wf, const SequenceOptions& so,
                                              unsigned threads) {
  if (so.j_min < 0 || so.j_max < so.j_min + 1) throw InputError("sequence needs j_max > j_min >= 0");
  if (!(so.base > 1.0)) throw InputError("sequence base must exceed 1");
  const Point o = so.origin.value_or(d.anchor());
  const std::size_t n = static_cast<std::size_t>(so.j_max - so.j_min + 1);
  return parallel_map(n, threads, [&](std::size_t i) {
    SequenceRow row;
    row.j = so.j_min + static_cast<int>(i);
    row.delta = std::pow(so.base, -row.j);
    row.z = zf(row.delta);
    row.w = wf(row.delta);
    row.gromov = gromov_product(d, row.z, row.w, o, so.source, so.cfg);
    return row;
  });
}

}  // namespace detail

enum class Verdict { Bounded, Divergent, Inconclusive };

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Bounded: return "bounded";
    case Verdict::Divergent: return "divergent";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

struct PairVerdict {
  Point p, q;
  Verdict verdict = Verdict::Inconclusive;
  double slope = 0.0;
  double slope_atanh = 0.0;
  double sup = 0.0;
  double max_width = 0.0;
  std::vector<SequenceRow> rows;
};

enum class Visibility { VisibleEvidence, NotVisible, Inconclusive };

inline const char* visibility_name(Visibility v) {
  switch (v) {
    case Visibility::VisibleEvidence: return "visible-evidence";
    case Visibility::NotVisible: return "not-visible";
    case Visibility::Inconclusive: return "inconclusive";
  }
  return "?";
}

struct VisibilityResult {
  std::vector<PairVerdict> pairs;
  Visibility overall = Visibility::Inconclusive;
  std::optional<std::size_t> witness;  // index of a divergent pair
};

inline constexpr double kVisibilitySlope = 0.25;
inline constexpr double kMaxBracketWidth = 0.1;

/// Gromov products along inward-normal approach sequences z_j -> p, w_j -> q; a pair is divergent
/// when the tail slope against log(1/delta_j) exceeds 0.25, inconclusive when a bracket is wider than 0.1.
inline VisibilityResult visibility_classify(const DomainGeometry& d, const std::vector<std::pair<Point, Point>>& pq,
                                            const SequenceOptions& so = {}, unsigned threads = 1) {
  VisibilityResult out;
  for (const auto& [p, q] : pq) {
    if (distance(p, q) < 1e-9) throw InputError("visibility pairs need p != q");
    const CVec np = inward_normal(d, p), nq = inward_normal(d, q);
    PairVerdict v;
    v.p = p;
    v.q = q;
    v.rows = detail::run_sequences(
        d, [&](double dl) { return detail::approach_point(d, p, np, dl); },
        [&](double dl) { return detail::approach_point(d, q, nq, dl); }, so, threads);
    const auto r = detail::rates(v.rows);
    v.slope = r.slope;
    v.slope_atanh = r.slope_atanh;
    v.sup = r.sup;
    v.max_width = r.max_width;
    if (r.max_width > kMaxBracketWidth) v.verdict = Verdict::Inconclusive;
    else v.verdict = r.slope > kVisibilitySlope ? Verdict::Divergent : Verdict::Bounded;
    out.pairs.push_back(std::move(v));
  }
  bool any_inconclusive = false;
  for (std::size_t i = 0; i < out.pairs.size(); ++i) {
    if (out.pairs[i].verdict == Verdict::Divergent && !out.witness) out.witness = i;
    if (out.pairs[i].verdict == Verdict::Inconclusive) any_inconclusive = true;
  }
  if (out.witness) out.overall = Visibility::NotVisible;
  else out.overall = any_inconclusive ? Visibility::Inconclusive : Visibility::VisibleEvidence;
  return out;
}

/// Two boundary points inside a flat boundary face found by disc_free_certificate, or nothing
/// when the boundary is disc-free.
inline std::optional<std::pair<Point, Point>> face_witness_pair(const DomainGeometry& d, double radius,
                                                                std::uint64_t seed = 0) {
  const auto v = disc_free_certificate(d, 64, radius, seed);
  if (!v.disc_found || !v.witness) return std::nullopt;
  return std::make_pair(v.witness->at(0.5), v.witness->at(-0.5));
}

/// Boundary pairs in near-opposite directions from the anchor: p on the ray u, q on the ray
/// -u + spread v for random unit u, v.
inline std::vector<std::pair<Point, Point>> opposite_boundary_pairs(const DomainGeometry& d, int count,
                                                                    double spread, std::uint64_t seed) {
  if (!d.bounded()) throw CapabilityError("boundary pair sampling needs a bounded domain");
  Rng rng(seed);
  std::vector<std::pair<Point, Point>> out;
  while (static_cast<int>(out.size()) < count) {
    const CVec u = random_unit(rng, d.dimension());
    CVec v = -u + random_unit(rng, d.dimension()) * spread;
    if (v.norm() < 1e-6) continue;
    v = v / v.norm();
    const auto p = detail::boundary_on_ray(d, u);
    const auto q = detail::boundary_on_ray(d, v);
    if (p && q && distance(*p, *q) > 1e-6) out.emplace_back(*p, *q);
  }
  return out;
}

struct CompletenessResult {
  bool divergent = false;
  bool inconclusive = false;
  double slope = 0.0;
  double max_width = 0.0;
  std::vector<SequenceRow> rows;
};

inline constexpr double kCompletenessSlope = 0.5;

/// Gromov products for z_j, w_j -> p along the inward normal; divergent when the tail slope
/// against log(1/delta_j) is at least 0.5.
inline CompletenessResult strong_completeness_probe(const DomainGeometry& d, const Point& p,
                                                    const SequenceOptions& so = {}, unsigned threads = 1) {
  if (std::abs(d.signed_distance(p)) > 1e-9 * std::max(1.0, d.scale()))
    throw InputError("strong completeness probe needs a boundary point");
  const CVec n = inward_normal(d, p);
  CompletenessResult out;
  out.rows = detail::run_sequences(
      d, [&](double dl) { return detail::approach_point(d, p, n, dl); },
      [&](double dl) {
        Point z = detail::approach_point(d, p, n, dl);
        if (so.split) z += *so.split * std::pow(dl, so.split_power);
        if (!d.contains(z)) throw InputError("split sequence left the domain");
        return z;
      },
      so, threads);
  const auto r = detail::rates(out.rows);
  out.slope = r.slope;
  out.max_width = r.max_width;
  out.inconclusive = r.max_width > kMaxBracketWidth;
  out.divergent = !out.inconclusive && r.slope >= kCompletenessSlope;
  return out;
}

// ---------------------------------------------------------------------------
// Equicontinuity and boundary extension
// ---------------------------------------------------------------------------

struct ModulusTable {
  std::vector<double> t;
  std::vector<double> omega;       // whole family
  std::vector<double> omega_half;  // first half of the family
  double exponent = 0.0;           // fitted omega ~ t^exponent over the small-t half
  bool uniform = false;
};

namespace detail {

inline std::vector<double> modulus(const std::vector<const AnalyticDiscParam*>& fam, const std::vector<double>& ts,
                                   int radial, int angular, int dirs) {
  std::vector<double> om(ts.size(), 0.0);
  for (const auto* g : fam) {
    for (int i = 0; i <= radial; ++i) {
      const double r = static_cast<double>(i) / radial;
      for (int a = 0; a < (i == 0 ? 1 : angular); ++a) {
        const cplx zeta = std::polar(r, 2.0 * kPi * a / angular);
        const Point pz = g->at(zeta);
        for (std::size_t k = 0; k < ts.size(); ++k) {
          for (int e = 0; e < dirs; ++e) {
            const cplx other = zeta + std::polar(ts[k], 2.0 * kPi * e / dirs);
            if (std::abs(other) > 1.0) continue;
            om[k] = std::max(om[k], distance(pz, g->at(other)));
          }
        }
      }
    }
  }
  // omega(t) is a sup over |zeta - zeta'| <= t.
  for (std::size_t k = ts.size(); k-- > 1;) om[k - 1] = std::max(om[k - 1], om[k]);
  return om;
}

}  // namespace detail

/// omega(t) = max over the family of |phi(zeta) - phi(zeta')| with |zeta - zeta'| <= t on the closed
/// disc, for t = 2^{-k}. Uniform when omega decays with a positive fitted exponent and the full family
/// stays within a factor 2 of its first half at the smallest t.
inline ModulusTable equicontinuity_modulus(const std::vector<ComplexGeodesicDisc>& family, int levels = 10,
                                           int radial = 16, int angular = 64, int dirs = 8) {
  if (family.empty()) throw InputError("equicontinuity needs a nonempty family");
  if (levels < 2) throw InputError("equicontinuity needs at least two levels");
  for (const auto& g : family)
    if (!g.accepted || !g.disc.star_normalized) throw InputError("family members must be accepted and normalized");
  ModulusTable m;
  for (int k = 0; k < levels; ++k) m.t.push_back(std::ldexp(1.0, -k));
  std::vector<const AnalyticDiscParam*> all, half;
  for (std::size_t i = 0; i < family.size(); ++i) {
    all.push_back(&family[i].disc);
    if (i < std::max<std::size_t>(1, family.size() / 2)) half.push_back(&family[i].disc);
  }
  m.omega = detail::modulus(all, m.t, radial, angular, dirs);
  m.omega_half = detail::modulus(half, m.t, radial, angular, dirs);
  std::vector<double> lx, ly;
  for (std::size_t k = m.t.size() / 2; k < m.t.size(); ++k) {
    if (!(m.omega[k] > 0.0)) continue;
    lx.push_back(std::log(m.t[k]));
    ly.push_back(std::log(m.omega[k]));
  }
  m.exponent = lx.size() >= 2 ? regression_slope(lx, ly) : 0.0;
  const double last = m.omega.back(), last_half = m.omega_half.back();
  const bool tends_to_zero = last == 0.0 || m.exponent > 0.1;
  const bool stable = last <= 2.0 * last_half + 1e-15;
  m.uniform = tends_to_zero && stable;
  return m;
}

struct ExtensionReport {
  double oscillation = 0.0;  // max over angles of |phi((1 - 2^{-J}) e^{i theta}) - phi(e^{i theta})|
  std::vector<double> target_distance;
  std::vector<cplx> target_zeta;
  [[nodiscard]] bool hits(double tol) const {
    return std::all_of(target_distance.begin(), target_distance.end(), [&](double v) { return v <= tol; });
  }
};

/// Evaluates phi on circles of radius 1 - 2^{-j} and on the unit circle, and the closest approach of
/// phi(closed disc) to each target (angle grid on the unit circle, then golden-section refinement).
inline ExtensionReport boundary_extension_check(const ComplexGeodesicDisc& g, const std::vector<Point>& targets,
                                                int J = 40, int angular = 4096) {
  ExtensionReport rep;
  const double r = 1.0 - std::ldexp(1.0, -J);
  for (int a = 0; a < angular; ++a) {
    const double th = 2.0 * kPi * a / angular;
    rep.oscillation = std::max(rep.oscillation, distance(g.disc.at(std::polar(r, th)), g.disc.at(std::polar(1.0, th))));
  }
  for (const auto& p : targets) {
    auto dist = [&](double th) { return distance(g.disc.at(std::polar(1.0, th)), p); };
    int best = 0;
    double bv = kInf;
    for (int a = 0; a < angular; ++a) {
      const double v = dist(2.0 * kPi * a / angular);
      if (v < bv) {
        bv = v;
        best = a;
      }
    }
    const double h = 2.0 * kPi / angular;
    double lo = 2.0 * kPi * best / angular - h, hi = lo + 2.0 * h;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = dist(x1), f2 = dist(x2);
    for (int it = 0; it < 100; ++it) {
      if (f1 < f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - gr * (hi - lo);
        f1 = dist(x1);
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + gr * (hi - lo);
        f2 = dist(x2);
      }
    }
    double th = 2.0 * kPi * best / angular;
    const double mid = 0.5 * (lo + hi);
    if (dist(mid) < bv) {
      bv = dist(mid);
      th = mid;
    }
    rep.target_distance.push_back(bv);
    rep.target_zeta.push_back(std::polar(1.0, th));
  }
  return rep;
}

}  // namespace invmetric
