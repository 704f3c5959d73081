#pragma once

// Comparison functions f_D, g_D and empirical inequality suites with fitted constants.
// Every left-hand side is evaluated in the direction that can only overstate the
// required constant: upper bounds where the inequality bounds a quantity from above,
// lower bounds where it bounds from below.

#include <algorithm>
#include <numeric>
#include <span>

#include "invmetric/extremal.hpp"
#include "invmetric/parallel.hpp"

namespace invmetric {

/// h(x) = x (1 + x) / log(1 + x), with its series below 1e-4.
inline double h_eval(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) throw InputError("h(x) requires a finite x > 0");
  if (x < 1e-4) return 1.0 + x * (1.5 + x * (5.0 / 12.0 - x / 24.0));
  return x * (1.0 + x) / std::log1p(x);
}

/// f_D(z, w) = delta(z) delta(w) h(|z - w| / sqrt(delta(z) delta(w))); z = w gives delta^2 (h(0+) = 1).
inline double f_bound(const DomainGeometry& d, const Point& z, const Point& w) {
  const double dz = d.boundary_distance(z), dw = d.boundary_distance(w);
  const double s = std::sqrt(dz * dw);
  const double x = distance(z, w) / s;
  return dz * dw * (x > 0.0 ? h_eval(x) : 1.0);
}

/// g_D(z, w) = |z - w| (|z - w| + sqrt(delta(z) delta(w))).
inline double g_bound(const DomainGeometry& d, const Point& z, const Point& w) {
  const double dz = d.boundary_distance(z), dw = d.boundary_distance(w);
  const double r = distance(z, w);
  return r * (r + std::sqrt(dz * dw));
}

// ---------------------------------------------------------------------------
// Constant fitting
// ---------------------------------------------------------------------------

/// How a row's lhs and shape combine with the constant C:
/// Ratio      lhs <= 1 + C shape
/// Difference lhs <= C shape
/// LogRatio   lhs <= log(1 + C shape)
/// Offset     lhs <= shape + C
/// Exact      lhs <= shape (no constant)
enum class BoundForm { Ratio, Difference, LogRatio, Offset, Exact };

inline const char* form_name(BoundForm f) {
  switch (f) {
    case BoundForm::Ratio: return "ratio";
    case BoundForm::Difference: return "difference";
    case BoundForm::LogRatio: return "log_ratio";
    case BoundForm::Offset: return "offset";
    case BoundForm::Exact: return "exact";
  }
  return "?";
}

struct FitRow {
  double lhs = 0.0;
  double shape = 0.0;
};

struct FitResult {
  double C = 0.0;
  double stability = 1.0;  // C on all rows / C on a seeded random half
  std::size_t unboundable = 0;
  std::vector<double> required;  // per row; -inf when the row needs no constant, +inf when unboundable
};

/// Smallest constant the row needs.
inline double required_constant(const FitRow& r, BoundForm form) {
  const bool positive = r.shape > 0.0;
  switch (form) {
    case BoundForm::Ratio:
      if (positive) return (r.lhs - 1.0) / r.shape;
      return r.lhs <= 1.0 ? -kInf : kInf;
    case BoundForm::Difference:
      if (positive) return r.lhs / r.shape;
      return r.lhs <= 0.0 ? -kInf : kInf;
    case BoundForm::LogRatio:
      if (positive) return std::expm1(r.lhs) / r.shape;
      return r.lhs <= 0.0 ? -kInf : kInf;
    case BoundForm::Offset:
    case BoundForm::Exact: return r.lhs - r.shape;
  }
  return kInf;
}

/// rhs(C) - lhs for a fitted constant.
inline double row_margin(const FitRow& r, BoundForm form, double C) {
  switch (form) {
    case BoundForm::Ratio: return 1.0 + C * r.shape - r.lhs;
    case BoundForm::Difference: return C * r.shape - r.lhs;
    case BoundForm::LogRatio: return std::log1p(C * r.shape) - r.lhs;
    case BoundForm::Offset: return r.shape + C - r.lhs;
    case BoundForm::Exact: return r.shape - r.lhs;
  }
  return -kInf;
}

/// C = max(0, sup of required constants) over boundable rows; stability compares with a
/// seeded random half of those rows.
inline FitResult fit_constant(std::span<const FitRow> rows, BoundForm form, std::uint64_t seed = 0) {
  if (rows.empty()) throw InputError("fit_constant needs at least one row");
  FitResult out;
  std::vector<std::size_t> ok;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double q = required_constant(rows[i], form);
    out.required.push_back(q);
    if (q == kInf || std::isnan(q)) {
      ++out.unboundable;
    } else {
      ok.push_back(i);
    }
  }
  if (form == BoundForm::Exact) return out;
  auto sup = [&](std::span<const std::size_t> idx) {
    double c = 0.0;
    for (const auto i : idx) c = std::max(c, out.required[i]);
    return c;
  };
  out.C = out.unboundable > 0 ? kInf : sup(ok);
  if (ok.size() < 2) return out;
  Rng rng(derive_seed(seed, 0x4a1f));
  std::vector<std::size_t> half = ok;
  for (std::size_t i = half.size() - 1; i > 0; --i) std::swap(half[i], half[rng() % (i + 1)]);
  half.resize(half.size() / 2);
  const double ch = sup(half);
  const double cf = sup(ok);
  // Constants at roundoff level count as zero, so a vanishing C is stable.
  constexpr double floor = 1e-9;
  out.stability = std::max(cf, floor) / std::max(ch, floor);
  return out;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

enum class RowStatus { Ok, Degenerate, Unboundable };

inline const char* status_name(RowStatus s) {
  switch (s) {
    case RowStatus::Ok: return "ok";
    case RowStatus::Degenerate: return "degenerate";
    case RowStatus::Unboundable: return "unboundable";
  }
  return "?";
}

struct ComparisonRow {
  Point z, w;  // w is empty for metric rows
  CVec X;      // empty for distance rows
  double delta_z = 0.0, delta_w = 0.0;
  double lhs = 0.0, shape = 0.0;
  double required = 0.0;
  double margin = 0.0;
  RowStatus status = RowStatus::Ok;
  std::string source;  // "closed_form" or "bracket"
};

struct ComparisonReport {
  std::string id;
  std::string statement;
  BoundForm form = BoundForm::Ratio;
  std::vector<ComparisonRow> rows;
  double C = 0.0;
  double stability = 1.0;
  std::size_t unboundable = 0;
  std::size_t dropped = 0;
  double min_margin = kInf;
  std::optional<double> lower_ratio;  // min lhs/shape on the two-sided subsample, when requested

  /// The declared falsification signal: an unboundable row or a half-sample ratio above 2.
  [[nodiscard]] bool flagged() const {
    if (form == BoundForm::Exact) return false;
    return unboundable > 0 || !std::isfinite(C) || !(stability <= 2.0);
  }
  [[nodiscard]] bool exact_holds(double tol) const { return form == BoundForm::Exact && min_margin >= -tol; }
};

namespace detail {

inline ComparisonReport finish_report(std::string id, std::string statement, BoundForm form,
                                      std::vector<std::optional<ComparisonRow>> rows, std::uint64_t seed) {
  ComparisonReport r;
  r.id = std::move(id);
  r.statement = std::move(statement);
  r.form = form;
  for (auto& row : rows) {
    if (!row) {
      ++r.dropped;
      continue;
    }
    // Ratio reports exclude z = w; difference reports keep them as exact zeros.
    if (row->status == RowStatus::Degenerate && form == BoundForm::Ratio) continue;
    r.rows.push_back(std::move(*row));
  }
  if (r.rows.empty()) return r;
  std::vector<FitRow> fr;
  for (const auto& row : r.rows) fr.push_back({row.lhs, row.shape});
  const auto fit = fit_constant(fr, form, seed);
  r.C = fit.C;
  r.stability = fit.stability;
  r.unboundable = fit.unboundable;
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    auto& row = r.rows[i];
    row.required = fit.required[i];
    if (fit.required[i] == kInf) row.status = RowStatus::Unboundable;
    row.margin = row.status == RowStatus::Unboundable ? -kInf : row_margin(fr[i], form, std::isfinite(r.C) ? r.C : 0.0);
    r.min_margin = std::min(r.min_margin, row.margin);
  }
  return r;
}

struct Bound {
  double value = 0.0;
  std::string source;
};

/// Upper bound for l_D: exact where a closed form exists (l = k on every such model).
inline Bound l_upper(const DomainGeometry& d, const Point& z, const Point& w, const SolverConfig& cfg) {
  if (d.has_closed_form()) return {model_distance(d, z, w).value, "closed_form"};
  return {lempert_upper(d, z, w, cfg).value.value, "bracket"};
}

/// Lower bound for k_D: exact where a closed form exists, else the Caratheodory lower bound.
inline Bound k_lower(const DomainGeometry& d, const Point& z, const Point& w, const SolverConfig& cfg) {
  if (d.has_closed_form()) return {model_distance(d, z, w).value, "closed_form"};
  return {caratheodory_lower(d, z, w, cfg).value.value, "bracket"};
}

/// Upper bound for k_D: exact where a closed form exists, else the path integral plus its error estimate.
inline Bound k_upper(const DomainGeometry& d, const Point& z, const Point& w, const SolverConfig& cfg) {
  if (d.has_closed_form()) return {model_distance(d, z, w).value, "closed_form"};
  const auto r = kobayashi_distance_upper(d, z, w, cfg);
  return {r.value.value + r.error_estimate, "bracket"};
}

inline Bound kappa_upper(const DomainGeometry& d, const Tangent& t, const SolverConfig& cfg) {
  if (d.has_closed_form()) return {model_metric(d, t), "closed_form"};
  return {kobayashi_metric_upper(d, t, cfg).value, "bracket"};
}

inline Bound kappa_lower(const DomainGeometry& d, const Tangent& t, const SolverConfig& cfg) {
  if (d.has_closed_form()) return {model_metric(d, t), "closed_form"};
  return {caratheodory_metric_lower(d, t, cfg).value, "bracket"};
}

inline std::string merge_source(const std::string& a, const std::string& b) {
  return a == "closed_form" && b == "closed_form" ? "closed_form" : "bracket";
}

inline ComparisonRow pair_row(const DomainGeometry& d, const Point& z, const Point& w) {
  ComparisonRow row;
  row.z = z;
  row.w = w;
  row.delta_z = d.boundary_distance(z);
  row.delta_w = d.boundary_distance(w);
  if (z == w) row.status = RowStatus::Degenerate;
  return row;
}

inline ComparisonRow tangent_row(const DomainGeometry& d, const Tangent& t) {
  ComparisonRow row;
  row.z = t.base;
  row.X = t.direction;
  row.delta_z = d.boundary_distance(t.base);
  return row;
}

/// Runs fn on every index; solver failures become dropped (empty) rows.
template <class Fn>
std::vector<std::optional<ComparisonRow>> evaluate_rows(std::size_t n, unsigned threads, Fn fn) {
  return parallel_map(n, threads, [&](std::size_t i) -> std::optional<ComparisonRow> {
    try {
      return fn(i);
    } catch (const SolverFailure&) {
      return std::nullopt;
    }
  });
}

/// Evaluates several quantities per input once and feeds them to multiple reports.
template <class T, class Fn>
std::vector<std::optional<T>> evaluate_inputs(std::size_t n, unsigned threads, Fn fn) {
  return parallel_map(n, threads, [&](std::size_t i) -> std::optional<T> {
    try {
      return fn(i);
    } catch (const SolverFailure&) {
      return std::nullopt;
    }
  });
}

inline void require_distinct(const std::vector<std::pair<Point, Point>>& pairs) {
  for (const auto& [z, w] : pairs)
    if (z == w) throw InputError("pairs must be distinct (z != w)");
}

}  // namespace detail

struct SuiteOptions {
  SolverConfig cfg;
  unsigned threads = 1;
};

// ---------------------------------------------------------------------------
// Global comparison: l/c, l - c, kappa vs gamma
// ---------------------------------------------------------------------------

/// Reports "zero" (l/c <= 1 + C f), "lip-global" (l - c <= C g), "met-global"
/// (kappa <= (1 + C delta^2 |X|) gamma) and "met-global-weak" (kappa <= gamma + C delta |X|).
inline std::vector<ComparisonReport> check_theorem_global(const DomainGeometry& d,
                                                          const std::vector<std::pair<Point, Point>>& pairs,
                                                          const std::vector<Tangent>& tangents,
                                                          const SuiteOptions& opt = {}) {
  detail::require_distinct(pairs);
  struct PairEval {
    ComparisonRow row;
    double l, c, f, g;
  };
  const auto pe = detail::evaluate_inputs<PairEval>(pairs.size(), opt.threads, [&](std::size_t i) {
    const auto& [z, w] = pairs[i];
    PairEval e{detail::pair_row(d, z, w), 0, 0, 0, 0};
    const auto l = detail::l_upper(d, z, w, opt.cfg);
    const auto c = caratheodory_lower(d, z, w, opt.cfg);
    e.l = l.value;
    e.c = c.value.value;
    e.f = f_bound(d, z, w);
    e.g = g_bound(d, z, w);
    e.row.source = detail::merge_source(l.source, "bracket");
    return e;
  });
  std::vector<std::optional<ComparisonRow>> zero, lip;
  for (const auto& e : pe) {
    if (!e) {
      zero.emplace_back();
      lip.emplace_back();
      continue;
    }
    ComparisonRow r = e->row;
    r.lhs = e->c > 0.0 ? e->l / e->c : kInf;
    r.shape = e->f;
    zero.emplace_back(r);
    r.lhs = e->l - e->c;
    r.shape = e->g;
    lip.emplace_back(r);
  }
  struct MetricEval {
    ComparisonRow row;
    double kappa, gamma;
  };
  const auto me = detail::evaluate_inputs<MetricEval>(tangents.size(), opt.threads, [&](std::size_t i) {
    MetricEval e{detail::tangent_row(d, tangents[i]), 0, 0};
    const auto k = detail::kappa_upper(d, tangents[i], opt.cfg);
    e.kappa = k.value;
    e.gamma = caratheodory_metric_lower(d, tangents[i], opt.cfg).value;
    e.row.source = detail::merge_source(k.source, "bracket");
    return e;
  });
  std::vector<std::optional<ComparisonRow>> met, weak;
  for (const auto& e : me) {
    if (!e) {
      met.emplace_back();
      weak.emplace_back();
      continue;
    }
    ComparisonRow r = e->row;
    const double dz = r.delta_z, xn = r.X.norm();
    r.lhs = e->gamma > 0.0 ? e->kappa / e->gamma : (e->kappa > 0.0 ? kInf : 1.0);
    r.shape = dz * dz * xn;
    met.emplace_back(r);
    r.lhs = e->kappa - e->gamma;
    r.shape = dz * xn;
    weak.emplace_back(r);
  }
  const auto seed = opt.cfg.seed;
  std::vector<ComparisonReport> out;
  out.push_back(detail::finish_report("zero", "l/c <= 1 + C f_D", BoundForm::Ratio, std::move(zero), seed));
  out.push_back(detail::finish_report("lip-global", "l - c <= C g_D", BoundForm::Difference, std::move(lip), seed));
  if (!tangents.empty()) {
    out.push_back(detail::finish_report("met-global", "kappa <= (1 + C delta^2 |X|) gamma", BoundForm::Ratio,
                                        std::move(met), seed));
    out.push_back(detail::finish_report("met-global-weak", "kappa <= gamma + C delta |X|", BoundForm::Difference,
                                        std::move(weak), seed));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Localization near a boundary point
// ---------------------------------------------------------------------------

struct LocalizationSetup {
  DomainGeometry domain;
  Point p;
  double r_u = 0.5;
  double r_v = 0.25;
  SolverConfig cfg;

  void validate() const {
    domain.check_point(p);
    if (std::abs(domain.signed_distance(p)) > 1e-9 * std::max(1.0, domain.scale()))
      throw InputError("localization point must lie on the boundary");
    if (!(r_v > 0.0) || !(r_u > 0.0)) throw InputError("window radii must be positive");
    if (r_v > 0.9 * r_u) throw InputError("V must be compactly inside U (r_V <= 0.9 r_U)");
  }
  [[nodiscard]] bool in_v(const Point& z) const { return domain.contains(z) && distance(z, p) < r_v; }
  [[nodiscard]] DomainGeometry local_domain() const { return DomainGeometry::intersection(domain, p, r_u); }
};

/// Reports "quo" (k_{D cap U}/c_D <= 1 + C f), "lip" (k_{D cap U} - c_D <= C g),
/// "met" (kappa_{D cap U} <= (1 + C delta^2) gamma_D), "met-weak" (<= gamma_D + C delta |X|),
/// and the weaker "lip-root" (k_{D cap U} - k_D <= C |z - w|^{1/2}) and
/// "met-linear" (kappa_{D cap U} <= (1 + C delta) kappa_D).
/// On the unit disc, "lip" also carries the two-sided ratio min lhs/shape over real pairs.
inline std::vector<ComparisonReport> check_localization(const LocalizationSetup& s,
                                                        const std::vector<std::pair<Point, Point>>& pairs,
                                                        const std::vector<Tangent>& tangents, unsigned threads = 1) {
  s.validate();
  detail::require_distinct(pairs);
  for (const auto& [z, w] : pairs)
    if (!s.in_v(z) || !s.in_v(w)) throw InputError("pair outside D cap V");
  for (const auto& t : tangents)
    if (!s.in_v(t.base)) throw InputError("tangent base outside D cap V");
  const DomainGeometry& d = s.domain;
  const DomainGeometry local = s.local_domain();
  struct PairEval {
    ComparisonRow row;
    double k_local, c, k_lo, f, g;
  };
  const auto pe = detail::evaluate_inputs<PairEval>(pairs.size(), threads, [&](std::size_t i) {
    const auto& [z, w] = pairs[i];
    PairEval e{detail::pair_row(d, z, w), 0, 0, 0, 0, 0};
    e.k_local = detail::k_upper(local, z, w, s.cfg).value;
    e.c = caratheodory_lower(d, z, w, s.cfg).value.value;
    const auto kl = detail::k_lower(d, z, w, s.cfg);
    e.k_lo = kl.value;
    e.f = f_bound(d, z, w);
    e.g = g_bound(d, z, w);
    e.row.source = "bracket";
    return e;
  });
  std::vector<std::optional<ComparisonRow>> quo, lip, root;
  for (const auto& e : pe) {
    if (!e) {
      quo.emplace_back();
      lip.emplace_back();
      root.emplace_back();
      continue;
    }
    ComparisonRow r = e->row;
    r.lhs = e->c > 0.0 ? e->k_local / e->c : kInf;
    r.shape = e->f;
    quo.emplace_back(r);
    r.lhs = e->k_local - e->c;
    r.shape = e->g;
    lip.emplace_back(r);
    r.lhs = e->k_local - e->k_lo;
    r.shape = std::sqrt(distance(r.z, r.w));
    root.emplace_back(r);
  }
  struct MetricEval {
    ComparisonRow row;
    double kappa_local, gamma, kappa_lo;
  };
  const auto me = detail::evaluate_inputs<MetricEval>(tangents.size(), threads, [&](std::size_t i) {
    MetricEval e{detail::tangent_row(d, tangents[i]), 0, 0, 0};
    e.kappa_local = detail::kappa_upper(local, tangents[i], s.cfg).value;
    e.gamma = caratheodory_metric_lower(d, tangents[i], s.cfg).value;
    e.kappa_lo = detail::kappa_lower(d, tangents[i], s.cfg).value;
    e.row.source = "bracket";
    return e;
  });
  std::vector<std::optional<ComparisonRow>> met, weak, linear;
  for (const auto& e : me) {
    if (!e) {
      met.emplace_back();
      weak.emplace_back();
      linear.emplace_back();
      continue;
    }
    ComparisonRow r = e->row;
    const double dz = r.delta_z;
    r.lhs = e->gamma > 0.0 ? e->kappa_local / e->gamma : (e->kappa_local > 0.0 ? kInf : 1.0);
    r.shape = dz * dz;
    met.emplace_back(r);
    r.lhs = e->kappa_local - e->gamma;
    r.shape = dz * r.X.norm();
    weak.emplace_back(r);
    r.lhs = e->kappa_lo > 0.0 ? e->kappa_local / e->kappa_lo : (e->kappa_local > 0.0 ? kInf : 1.0);
    r.shape = dz;
    linear.emplace_back(r);
  }
  const auto seed = s.cfg.seed;
  std::vector<ComparisonReport> out;
  out.push_back(detail::finish_report("quo", "k_{D cap U}/c_D <= 1 + C f_D", BoundForm::Ratio, std::move(quo), seed));
  out.push_back(detail::finish_report("lip", "k_{D cap U} - c_D <= C g_D", BoundForm::Difference, std::move(lip), seed));
  if (d.kind() == DomainKind::UnitDisc) {
    double lo = kInf;
    for (const auto& row : out.back().rows)
      if (row.z[0].imag() == 0.0 && row.w[0].imag() == 0.0 && row.shape > 0.0) lo = std::min(lo, row.lhs / row.shape);
    if (std::isfinite(lo)) out.back().lower_ratio = lo;
  }
  out.push_back(detail::finish_report("lip-root", "k_{D cap U} - k_D <= C |z - w|^{1/2}", BoundForm::Difference,
                                      std::move(root), seed));
  if (!tangents.empty()) {
    out.push_back(detail::finish_report("met", "kappa_{D cap U} <= (1 + C delta^2) gamma_D", BoundForm::Ratio,
                                        std::move(met), seed));
    out.push_back(detail::finish_report("met-weak", "kappa_{D cap U} <= gamma_D + C delta |X|", BoundForm::Difference,
                                        std::move(weak), seed));
    out.push_back(detail::finish_report("met-linear", "kappa_{D cap U} <= (1 + C delta) kappa_D", BoundForm::Ratio,
                                        std::move(linear), seed));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Classical bounds
// ---------------------------------------------------------------------------

namespace detail {

inline bool smooth_boundary(const DomainGeometry& d) {
  switch (d.kind()) {
    case DomainKind::UnitDisc:
    case DomainKind::Ball:
    case DomainKind::ComplexEllipsoid:
    case DomainKind::Annulus: return true;
    default: return false;
  }
}

inline void require_convex_bounded(const DomainGeometry& d, const char* what) {
  if (!d.is_convex_set() || !d.bounded())
    throw CapabilityError(std::string(what) + " requires a bounded convex domain");
}

inline void require_smooth(const DomainGeometry& d, const char* what) {
  if (!smooth_boundary(d)) throw CapabilityError(std::string(what) + " requires a smooth-boundary model");
}

inline double half_log_inv(double delta) { return -0.5 * std::log(delta); }

}  // namespace detail

/// "root": l - c <= C |z - w|^{1/2}.
inline ComparisonReport check_root(const DomainGeometry& d, const std::vector<std::pair<Point, Point>>& pairs,
                                   const SuiteOptions& opt = {}) {
  auto rows = detail::evaluate_rows(pairs.size(), opt.threads, [&](std::size_t i) {
    const auto& [z, w] = pairs[i];
    auto row = detail::pair_row(d, z, w);
    const auto l = detail::l_upper(d, z, w, opt.cfg);
    row.lhs = l.value - caratheodory_lower(d, z, w, opt.cfg).value.value;
    row.shape = std::sqrt(distance(z, w));
    row.source = "bracket";
    return row;
  });
  return detail::finish_report("root", "l - c <= C |z - w|^{1/2}", BoundForm::Difference, std::move(rows),
                               opt.cfg.seed);
}

/// "rt": kappa - gamma <= C |X|.
inline ComparisonReport check_rt(const DomainGeometry& d, const std::vector<Tangent>& tangents,
                                 const SuiteOptions& opt = {}) {
  auto rows = detail::evaluate_rows(tangents.size(), opt.threads, [&](std::size_t i) {
    auto row = detail::tangent_row(d, tangents[i]);
    const auto k = detail::kappa_upper(d, tangents[i], opt.cfg);
    row.lhs = k.value - caratheodory_metric_lower(d, tangents[i], opt.cfg).value;
    row.shape = row.X.norm();
    row.source = "bracket";
    return row;
  });
  return detail::finish_report("rt", "kappa - gamma <= C |X|", BoundForm::Difference, std::move(rows), opt.cfg.seed);
}

/// "dini": k <= log(1 + C |z - w| / sqrt(delta(z) delta(w))), with k from above.
inline ComparisonReport check_dini(const DomainGeometry& d, const std::vector<std::pair<Point, Point>>& pairs,
                                   const SuiteOptions& opt = {}) {
  detail::require_smooth(d, "dini");
  auto rows = detail::evaluate_rows(pairs.size(), opt.threads, [&](std::size_t i) {
    const auto& [z, w] = pairs[i];
    auto row = detail::pair_row(d, z, w);
    const auto k = detail::l_upper(d, z, w, opt.cfg);
    row.lhs = k.value;
    row.shape = distance(z, w) / std::sqrt(row.delta_z * row.delta_w);
    row.source = k.source;
    return row;
  });
  return detail::finish_report("dini", "k <= log(1 + C |z - w| / (delta(z) delta(w))^{1/2})", BoundForm::LogRatio,
                               std::move(rows), opt.cfg.seed);
}

/// "low": k >= (1/2) |log(delta(z)/delta(w))|, no constant; k from below.
inline ComparisonReport check_low(const DomainGeometry& d, const std::vector<std::pair<Point, Point>>& pairs,
                                  const SuiteOptions& opt = {}) {
  detail::require_convex_bounded(d, "low");
  auto rows = detail::evaluate_rows(pairs.size(), opt.threads, [&](std::size_t i) {
    const auto& [z, w] = pairs[i];
    auto row = detail::pair_row(d, z, w);
    const auto k = detail::k_lower(d, z, w, opt.cfg);
    row.lhs = 0.5 * std::abs(std::log(row.delta_z / row.delta_w));
    row.shape = k.value;
    row.source = k.source;
    return row;
  });
  return detail::finish_report("low", "(1/2) |log(delta(z)/delta(w))| <= k", BoundForm::Exact, std::move(rows),
                               opt.cfg.seed);
}

/// "vis": k >= (1/2) log(1/delta(z)) + (1/2) log(1/delta(w)) - C; k from below.
inline ComparisonReport check_vis(const DomainGeometry& d, const std::vector<std::pair<Point, Point>>& pairs,
                                  const SuiteOptions& opt = {}) {
  detail::require_convex_bounded(d, "vis");
  auto rows = detail::evaluate_rows(pairs.size(), opt.threads, [&](std::size_t i) {
    const auto& [z, w] = pairs[i];
    auto row = detail::pair_row(d, z, w);
    const auto k = detail::k_lower(d, z, w, opt.cfg);
    row.lhs = detail::half_log_inv(row.delta_z) + detail::half_log_inv(row.delta_w);
    row.shape = k.value;
    row.source = k.source;
    return row;
  });
  return detail::finish_report("vis", "(1/2) log(1/delta(z)) + (1/2) log(1/delta(w)) <= k + C", BoundForm::Offset,
                               std::move(rows), opt.cfg.seed);
}

/// "npt": l <= (1/2) log(1/delta(z)) + (1/2) log(1/delta(w)) + C; l from above.
inline ComparisonReport check_npt(const DomainGeometry& d, const std::vector<std::pair<Point, Point>>& pairs,
                                  const SuiteOptions& opt = {}) {
  detail::require_smooth(d, "npt");
  auto rows = detail::evaluate_rows(pairs.size(), opt.threads, [&](std::size_t i) {
    const auto& [z, w] = pairs[i];
    auto row = detail::pair_row(d, z, w);
    const auto l = detail::l_upper(d, z, w, opt.cfg);
    row.lhs = l.value;
    row.shape = detail::half_log_inv(row.delta_z) + detail::half_log_inv(row.delta_w);
    row.source = l.source;
    return row;
  });
  return detail::finish_report("npt", "l <= (1/2) log(1/delta(z)) + (1/2) log(1/delta(w)) + C", BoundForm::Offset,
                               std::move(rows), opt.cfg.seed);
}

struct ClassicalSuite {
  std::vector<ComparisonReport> reports;
  std::vector<std::pair<std::string, std::string>> skipped;  // (id, reason)
};

/// Runs every classical bound that applies to the domain kind; the rest are listed as skipped.
inline ClassicalSuite verify_classical(const DomainGeometry& d, const std::vector<std::pair<Point, Point>>& pairs,
                                       const std::vector<Tangent>& tangents, const SuiteOptions& opt = {}) {
  detail::require_distinct(pairs);
  ClassicalSuite s;
  auto attempt = [&](const char* id, auto&& fn) {
    try {
      s.reports.push_back(fn());
    } catch (const CapabilityError& e) {
      s.skipped.emplace_back(id, e.what());
    }
  };
  attempt("root", [&] { return check_root(d, pairs, opt); });
  if (!tangents.empty()) attempt("rt", [&] { return check_rt(d, tangents, opt); });
  attempt("dini", [&] { return check_dini(d, pairs, opt); });
  attempt("low", [&] { return check_low(d, pairs, opt); });
  attempt("vis", [&] { return check_vis(d, pairs, opt); });
  attempt("npt", [&] { return check_npt(d, pairs, opt); });
  return s;
}

}  // namespace invmetric
