#pragma once

// Extremal problems for the invariant functions: upper bounds for the Lempert
// function and Kobayashi metric over certified polynomial discs, lower bounds for
// the Caratheodory distance and metric over certified functionals, and the
// integrated Kobayashi distance along a path.

#include <span>

#include "invmetric/closed_forms.hpp"
#include "invmetric/disc.hpp"
#include "invmetric/functionals.hpp"
#include "invmetric/solver.hpp"

namespace invmetric {

struct DiscResult {
  HyperbolicValue value;
  AnalyticDiscParam disc;
  Direction direction = Direction::Upper;
  SolveDiagnostics diag;
};

struct MetricDiscResult {
  double value = 0.0;
  AnalyticDiscParam disc;
  Direction direction = Direction::Upper;
  SolveDiagnostics diag;
};

struct Bracket {
  HyperbolicValue lower;
  HyperbolicValue upper;
  SolveDiagnostics lower_diag;
  SolveDiagnostics upper_diag;
  [[nodiscard]] double width() const { return upper.value - lower.value; }
};

namespace detail {

inline void require_solvable(const DomainGeometry& d, const Point& z, const SolverConfig& cfg) {
  d.check_point(z);
  require_interior(d, z);
  if (d.boundary_distance(z) < cfg.min_delta)
    throw InputError("point too close to the boundary for the disc solver (delta < min_delta)");
}

inline const std::vector<double>& shrink_schedule() {
  static const std::vector<double> s{0.0,  1e-14, 1e-13, 1e-12, 1e-11, 1e-10, 1e-9, 1e-8, 1e-7,
                                     1e-6, 1e-5,  1e-4,  1e-3,  3e-3,  1e-2,  3e-2, 0.1,  0.3};
  return s;
}

inline std::vector<CVec> scale_coefficients(std::vector<CVec> a, double rho) {
  double rk = 1.0;
  for (auto& c : a) {
    c *= rk;
    rk *= rho;
  }
  return a;
}

/// Largest rho such that the chart circle {c + lambda(rho e^{it}) v} satisfies every atom.
inline double inscribed_radius(const DomainModel& m, const CVec& base, const CVec& v, cplx lc, double cap) {
  constexpr int K = 64;
  auto ok = [&](double rho) {
    for (int k = 0; k < K; ++k) {
      const cplx lam = lc + std::polar(rho, 2.0 * kPi * k / K);
      if (!(m.violation(base + v * lam) < 0.0)) return false;
    }
    return true;
  };
  if (!(m.violation(base + v * lc) < 0.0)) return 0.0;
  double lo = 0.0, hi = 1.0;
  while (ok(hi) && hi < cap) {
    lo = hi;
    hi *= 2.0;
  }
  if (hi >= cap && ok(hi)) return cap;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (ok(mid) ? lo : hi) = mid;
  }
  return lo;
}

inline opt::Vec perturb_coefficients(const opt::Vec& x, Rng& rng, double coef_scale, bool angle) {
  opt::Vec y = x;
  y[0] += 0.2 * normal01(rng);
  y[1] += (angle ? 0.1 * std::abs(x[1]) : 0.2) * normal01(rng);
  y[2] += 0.2 * normal01(rng);
  for (Eigen::Index i = 3; i < y.size(); ++i) y[i] += 0.1 * coef_scale * normal01(rng);
  return y;
}

}  // namespace detail


/// A polynomial disc in chart coordinates with p(node) at the base point, used as a warm start.
struct DiscHint {
  std::vector<CVec> coeffs;
  cplx node = 0.0;
};

namespace detail {

struct Candidate {
  double value = kInf;
  double unshrunk = kInf;  // value of the same disc before the certification shrink
  int degree = 0;
  AnalyticDiscParam disc;
  opt::Vec x;
};

/// Keeps the smallest certified value; among values within 1e-10 (relative) the lower degree wins.
struct CandidatePool {
  std::optional<Candidate> best;
  void offer(Candidate c) {
    if (!best) {
      best = std::move(c);
      return;
    }
    const double tie = 1e-10 * std::max(1.0, std::abs(best->value));
    const bool better = c.value < best->value - tie ||
                        (std::abs(c.value - best->value) <= tie && c.degree < best->degree);
    if (better) best = std::move(c);
  }
};

/// Multi-start augmented-Lagrangian descent. Every start is also certified as is.
/// Perturbed restarts continue until cfg.patience consecutive runs fail to improve
/// the best value by more than cfg.tol, or cfg.restarts runs are spent.
template <class Model, class Certify, class Perturb>
CandidatePool solve_discs(const Model& model, const std::vector<opt::Vec>& starts, const SolverConfig& cfg,
                          Certify certify, Perturb perturb, SolveDiagnostics& diag,
                          const opt::AlmOptions& alm_opts = {}) {
  CandidatePool pool;
  for (const auto& x : starts)
    if (auto c = certify(x)) {
      ++diag.certified;
      pool.offer(std::move(*c));
    }
  Rng rng(derive_seed(cfg.seed, 0x51ab));
  const int total = std::max<int>(cfg.restarts, static_cast<int>(starts.size()));
  int stale = 0;
  diag.max_violation = kInf;
  for (int r = 0; r < total; ++r) {
    const bool perturbed = r >= static_cast<int>(starts.size());
    const opt::Vec x0 = !perturbed ? starts[static_cast<std::size_t>(r)]
                                   : perturb(pool.best ? pool.best->x : starts.front(), rng);
    const double before = pool.best ? pool.best->value : kInf;
    const auto alm = opt::augmented_lagrangian(model, x0, alm_opts);
    diag.evaluations += alm.evaluations;
    diag.restarts_run = r + 1;
    diag.max_violation = std::min(diag.max_violation, alm.max_violation);
    if (auto c = certify(alm.x)) {
      ++diag.certified;
      pool.offer(std::move(*c));
    }
    if (perturbed || r + 1 == static_cast<int>(starts.size())) {
      const double after = pool.best ? pool.best->value : kInf;
      stale = (std::isfinite(after) && after < before - cfg.tol) ? 0 : stale + 1;
      if (pool.best && perturbed && stale >= cfg.patience) break;
    }
  }
  return pool;
}

/// When the certification shrink costs more than a tenth of the solver tolerance, the disc
/// boundary overshoots between the penalty samples; re-solve on a finer sample grid.
template <class Model, class Certify>
void refine_on_fine_grid(const Model& fine, CandidatePool& pool, const SolverConfig& cfg, Certify certify,
                         SolveDiagnostics& diag, const opt::AlmOptions& alm_opts = {}) {
  if (!pool.best || pool.best->value - pool.best->unshrunk <= 0.1 * cfg.tol * std::max(1.0, pool.best->value)) return;
  const auto alm = opt::augmented_lagrangian(fine, pool.best->x, alm_opts);
  diag.evaluations += alm.evaluations;
  if (auto c = certify(alm.x)) {
    ++diag.certified;
    pool.offer(std::move(*c));
  }
}

/// Starting parameters from the largest disc of a complex line inside the domain.
inline std::optional<std::pair<cplx, double>> best_slice(const std::function<double(cplx, double)>& score,
                                                         const DomainModel& dm, const CVec& base, const CVec& v,
                                                         cplx start, double scale) {
  auto objective = [&](const opt::Vec& p) {
    const cplx lc(p[0], p[1]);
    const double rho = inscribed_radius(dm, base, v, lc, 1e6);
    if (!(rho > 0.0)) return 1e6;
    return score(lc, rho);
  };
  opt::Vec p0(2);
  p0 << start.real(), start.imag();
  const auto nm = opt::nelder_mead(objective, p0, scale, {400, 1e-10, 1e-15});
  const cplx lc(nm.x[0], nm.x[1]);
  const double rho = inscribed_radius(dm, base, v, lc, 1e6);
  if (!(rho > 0.0) || !(nm.f < 1e5)) return std::nullopt;
  return std::make_pair(lc, rho);
}

}  // namespace detail

/// Upper bound for the Lempert function l_D(z, w) from a certified polynomial disc.
inline DiscResult lempert_upper(const DomainGeometry& d, const Point& z, const Point& w, const SolverConfig& cfg = {}) {
  cfg.validate();
  detail::require_solvable(d, z, cfg);
  detail::require_solvable(d, w, cfg);
  const DomainModel dm = domain_model(d);
  DiscResult out;
  out.diag.method = "disc";
  if (z == w) {
    out.disc = AnalyticDiscParam::constant(dm, z);
    return out;
  }
  const CVec yz = dm.to_chart(z);
  CVec yw = dm.to_chart(w);
  if (dm.chart == ChartKind::Log) yw = CVec{yz[0] + std::log(w[0] / z[0])};
  const int N = std::max(2, cfg.degree);
  const LempertModel model(dm, yz, yw, N, cfg.boundary_samples);
  const CVec v = yw - yz;

  std::vector<opt::Vec> starts;
  auto score = [](cplx lc, double rho) {
    const cplx b = -lc / rho, g = (1.0 - lc) / rho;
    const double m = std::max(std::abs(b), std::abs(g));
    return m >= 1.0 ? 100.0 + m : poincare_distance(b, g);
  };
  if (const auto sl = detail::best_slice(score, dm, yz, v, 0.5, 0.25)) {
    const auto [lc, rho] = *sl;
    const cplx b = -lc / rho, g = (1.0 - lc) / rho;
    if (std::max(std::abs(b), std::abs(g)) < 1.0) {
      std::vector<CVec> a(static_cast<std::size_t>(N + 1), CVec(yz.size()));
      a[0] = yz + v * lc;
      a[1] = v * rho;
      starts.push_back(model.from_polynomial(a, b, g));
    }
  }
  if (starts.empty()) {
    // Thin disc along the chart segment; infeasible starts are left to the penalty.
    std::vector<CVec> a(static_cast<std::size_t>(N + 1), CVec(yz.size()));
    a[0] = yz + v * 0.5;
    a[1] = v * 0.5;
    starts.push_back(model.from_polynomial(a, -1.0 + 1e-3, 1.0 - 1e-3));
  }

  auto certify = [&](const opt::Vec& x) -> std::optional<detail::Candidate> {
    const auto geo = LempertModel::geometry(x);
    const auto a = model.monomials(x);
    for (const double eta : detail::shrink_schedule()) {
      const double rho = 1.0 - eta;
      const double bt = geo.beta / rho;
      const cplx gt = geo.gamma / rho;
      if (!(std::abs(bt) < 1.0) || !(std::abs(gt) < 1.0)) continue;
      if (!certify_circle(dm.atoms, a, rho).certified) continue;
      detail::Candidate c;
      c.value = poincare_distance(bt, gt);
      c.unshrunk = poincare_distance(geo.beta, geo.gamma);
      c.disc.chart = dm.chart;
      c.disc.coeffs = detail::scale_coefficients(a, rho);
      c.disc.pre_a = bt;
      c.disc.alpha = (gt - bt) / (1.0 - bt * gt);
      c.disc.boundary_samples = cfg.boundary_samples;
      c.disc.shrink = eta;
      c.degree = c.disc.degree();
      c.x = x;
      return c;
    }
    return std::nullopt;
  };
  const double coef_scale = std::max(1e-3, v.norm());
  auto perturb = [&](const opt::Vec& x, Rng& rng) { return detail::perturb_coefficients(x, rng, coef_scale, true); };
  auto pool = detail::solve_discs(model, starts, cfg, certify, perturb, out.diag);
  detail::refine_on_fine_grid(LempertModel(dm, yz, yw, N, 8 * cfg.boundary_samples), pool, cfg, certify, out.diag);
  if (!pool.best)
    throw SolverFailure("no certified disc found after " + std::to_string(out.diag.restarts_run) +
                        " restarts; best constraint violation " + std::to_string(out.diag.max_violation));
  out.value = HyperbolicValue(pool.best->value);
  out.disc = std::move(pool.best->disc);
  out.diag.shrink = out.disc.shrink;
  return out;
}

namespace detail {

inline MetricDiscResult metric_upper_impl(const DomainGeometry& d, const Tangent& t, const SolverConfig& cfg,
                                          const std::vector<DiscHint>& hints, const opt::AlmOptions& alm_opts = {},
                                          bool fine_grid = true) {
  cfg.validate();
  const Point& z = t.base;
  require_solvable(d, z, cfg);
  if (t.direction.size() != d.dimension()) throw InputError("tangent dimension mismatch");
  if (!t.direction.finite()) throw InputError("tangent direction is not finite");
  const DomainModel dm = domain_model(d);
  MetricDiscResult out;
  out.diag.method = "disc";
  const double xn = t.direction.norm();
  if (xn == 0.0) {
    out.disc = AnalyticDiscParam::constant(dm, z);
    return out;
  }
  // Solve for the canonical direction (unit norm, largest component real positive),
  // which makes the result exactly homogeneous in the direction.
  const CVec u = t.direction / xn;
  std::size_t im = 0;
  for (std::size_t i = 1; i < u.size(); ++i)
    if (std::abs(u[i]) > std::abs(u[im]) * (1.0 + 1e-12)) im = i;
  const cplx phase = u[im] / std::abs(u[im]);
  // Snap to a dyadic grid so that directions differing by rounding solve identically.
  CVec X = u / phase;
  for (std::size_t i = 0; i < X.size(); ++i)
    X[i] = cplx(std::ldexp(std::round(std::ldexp(X[i].real(), 40)), -40),
                std::ldexp(std::round(std::ldexp(X[i].imag(), 40)), -40));
  const double scale = xn / X.norm();
  const CVec yz = dm.to_chart(z);
  const CVec Xc = dm.tangent_to_chart(z, X);
  const double xcn = Xc.norm();
  const int N = std::max(2, cfg.degree);
  const MetricModel model(dm, yz, Xc, N, cfg.boundary_samples);

  std::vector<opt::Vec> starts;
  for (const auto& h : hints) {
    auto a = h.coeffs;
    a.resize(static_cast<std::size_t>(N + 1), CVec(yz.size()));
    if (h.coeffs.size() <= static_cast<std::size_t>(N + 1)) starts.push_back(model.from_polynomial(a, h.node));
  }
  if (hints.empty()) {
    const CVec dir = Xc / xcn;
    auto score = [](cplx lc, double rho) {
      const double m = std::abs(lc);
      return rho > m ? -std::log((rho - m) * (rho + m) / rho) : 100.0 + m;
    };
    const double r0 = inscribed_radius(dm, yz, dir, 0.0, 1e6);
    if (const auto sl = best_slice(score, dm, yz, dir, 0.0, std::max(1e-6, 0.25 * r0))) {
      const auto [lc, rho] = *sl;
      if (rho > std::abs(lc)) {
        std::vector<CVec> a(static_cast<std::size_t>(N + 1), CVec(yz.size()));
        a[0] = yz + dir * lc;
        a[1] = dir * rho;
        starts.push_back(model.from_polynomial(a, -lc / rho));
      }
    }
  }
  if (starts.empty()) throw SolverFailure("no initial disc inside the domain");

  auto certify = [&](const opt::Vec& x) -> std::optional<Candidate> {
    const double beta = std::tanh(x[0]);
    const cplx s = std::exp(cplx(x[1], x[2]));
    const auto a = model.monomials(x);
    for (const double eta : shrink_schedule()) {
      const double rho = 1.0 - eta;
      const double bt = beta / rho;
      if (!(std::abs(bt) < 1.0)) continue;
      if (!certify_circle(dm.atoms, a, rho).certified) continue;
      const cplx st = s * rho;
      const double om = (1.0 - bt) * (1.0 + bt);
      Candidate c;
      c.value = scale / (std::abs(st) * om);
      c.unshrunk = scale / (std::abs(s) * (1.0 - beta) * (1.0 + beta));
      c.disc.chart = dm.chart;
      c.disc.coeffs = scale_coefficients(a, rho);
      c.disc.pre_a = bt;
      c.disc.alpha = scale * phase / (st * om);
      c.disc.boundary_samples = cfg.boundary_samples;
      c.disc.shrink = eta;
      c.degree = c.disc.degree();
      c.x = x;
      return c;
    }
    return std::nullopt;
  };
  auto perturb = [&](const opt::Vec& x, Rng& rng) { return perturb_coefficients(x, rng, xcn, false); };
  auto pool = solve_discs(model, starts, cfg, certify, perturb, out.diag, alm_opts);
  if (fine_grid)
    refine_on_fine_grid(MetricModel(dm, yz, Xc, N, 8 * cfg.boundary_samples), pool, cfg, certify, out.diag, alm_opts);
  if (!pool.best)
    throw SolverFailure("no certified disc found after " + std::to_string(out.diag.restarts_run) +
                        " restarts; best constraint violation " + std::to_string(out.diag.max_violation));
  out.value = pool.best->value;
  out.disc = std::move(pool.best->disc);
  out.diag.shrink = out.disc.shrink;
  return out;
}

}  // namespace detail

/// Upper bound for the Kobayashi-Royden metric kappa_D(z; X) from a certified disc
/// phi with phi(0) = z and alpha phi'(0) = X.
inline MetricDiscResult kobayashi_metric_upper(const DomainGeometry& d, const Tangent& t, const SolverConfig& cfg = {}) {
  return detail::metric_upper_impl(d, t, cfg, {});
}

struct PathResult {
  HyperbolicValue value;
  double error_estimate = 0.0;  // |S_P - S_{P/2}| / 3 for the trapezoid sums
  std::string route;            // "disc_trace" or "chart_path"
  std::vector<Point> nodes;
  std::vector<double> integrand;
  double step = 0.0;  // parameter spacing of the nodes
  std::optional<DiscResult> lempert;  // the disc whose trace was integrated, if any
  Direction direction = Direction::Upper;
  SolveDiagnostics diag;
};

namespace detail {

/// First-order distance to the boundary in chart coordinates, min over atoms of -G/|grad G|.
inline double chart_clearance(const DomainModel& dm, const CVec& y) {
  double m = kInf;
  std::vector<cplx> g(y.size());
  for (const auto& at : dm.atoms) {
    const double G = at.eval(y.raw(), g);
    double gn = 0.0;
    for (const auto& v : g) gn += std::norm(v);
    gn = std::sqrt(gn);
    if (!(G < 0.0)) return 0.0;
    m = std::min(m, gn > 0.0 ? -G / gn : kInf);
  }
  return m;
}

/// Trapezoid sums over P and P/2 panels of equally spaced integrand values.
inline std::pair<double, double> trapezoid_pair(const std::vector<double>& f, double h) {
  const std::size_t P = f.size() - 1;
  double s1 = 0.5 * (f.front() + f.back());
  for (std::size_t i = 1; i < P; ++i) s1 += f[i];
  double s2 = 0.5 * (f.front() + f.back());
  for (std::size_t i = 2; i < P; i += 2) s2 += f[i];
  return {s1 * h, s2 * 2.0 * h};
}

/// Chart path from yz to yw: the straight segment, or a bend through the anchor, with
/// interior nodes moved to shorten the path in the clearance metric |dy| / clearance(y).
inline std::vector<CVec> chart_path(const DomainGeometry& d, const DomainModel& dm, const CVec& yz, const CVec& yw,
                                    int P) {
  auto inside = [&](const CVec& a, const CVec& b) {
    for (int k = 0; k <= 64; ++k)
      if (!(dm.violation(a + (b - a) * (k / 64.0)) < 0.0)) return false;
    return true;
  };
  std::vector<CVec> knots{yz, yw};
  if (!inside(yz, yw)) {
    CVec ya = dm.to_chart(d.anchor());
    if (dm.chart == ChartKind::Log) {
      // Lift the anchor next to the segment midpoint.
      const double mid = 0.5 * (yz[0].imag() + yw[0].imag());
      const double k = std::round((mid - ya[0].imag()) / (2.0 * kPi));
      ya[0] += cplx(0.0, 2.0 * kPi * k);
    }
    if (!inside(yz, ya) || !inside(ya, yw)) throw TopologyError("no interior path found between the points");
    knots = {yz, ya, yw};
  }
  // Resample the polyline at P + 1 equally spaced nodes.
  std::vector<double> cum{0.0};
  for (std::size_t i = 1; i < knots.size(); ++i) cum.push_back(cum.back() + (knots[i] - knots[i - 1]).norm());
  std::vector<CVec> nodes;
  for (int i = 0; i <= P; ++i) {
    const double s = cum.back() * i / P;
    std::size_t j = 1;
    while (j + 1 < knots.size() && cum[j] < s) ++j;
    const double t = cum[j] > cum[j - 1] ? (s - cum[j - 1]) / (cum[j] - cum[j - 1]) : 0.0;
    nodes.push_back(knots[j - 1] + (knots[j] - knots[j - 1]) * std::clamp(t, 0.0, 1.0));
  }
  nodes.front() = yz;
  nodes.back() = yw;
  const std::size_t n = yz.size();
  const Eigen::Index dim = static_cast<Eigen::Index>(2 * n * static_cast<std::size_t>(P - 1));
  if (dim == 0) return nodes;
  auto unpack = [&](const opt::Vec& x) {
    std::vector<CVec> y = nodes;
    for (int i = 1; i < P; ++i)
      for (std::size_t c = 0; c < n; ++c) {
        const auto k = static_cast<Eigen::Index>(2 * ((static_cast<std::size_t>(i) - 1) * n + c));
        y[static_cast<std::size_t>(i)][c] = cplx(x[k], x[k + 1]);
      }
    return y;
  };
  auto length = [&](const opt::Vec& x) {
    const auto y = unpack(x);
    std::vector<double> seg;
    double total = 0.0;
    for (int i = 0; i < P; ++i) {
      const CVec& a = y[static_cast<std::size_t>(i)];
      const CVec& b = y[static_cast<std::size_t>(i + 1)];
      const double c = chart_clearance(dm, (a + b) * 0.5);
      if (!(c > 0.0)) return kInf;
      seg.push_back((b - a).norm() / c);
      total += seg.back();
    }
    double spread = 0.0;
    for (const double l : seg) spread += (l - total / P) * (l - total / P);
    return total + 0.5 * P * spread / std::max(total, 1e-300);
  };
  opt::Vec x0(dim);
  for (int i = 1; i < P; ++i)
    for (std::size_t c = 0; c < n; ++c) {
      const auto k = static_cast<Eigen::Index>(2 * ((static_cast<std::size_t>(i) - 1) * n + c));
      x0[k] = nodes[static_cast<std::size_t>(i)][c].real();
      x0[k + 1] = nodes[static_cast<std::size_t>(i)][c].imag();
    }
  auto objective = [&](const opt::Vec& x, opt::Vec* grad) {
    const double f = length(x);
    if (grad && std::isfinite(f)) {
      grad->resize(x.size());
      opt::Vec xp = x;
      for (Eigen::Index k = 0; k < x.size(); ++k) {
        const double h = 1e-6 * std::max(1.0, std::abs(x[k]));
        xp[k] = x[k] + h;
        const double fp = length(xp);
        xp[k] = x[k] - h;
        const double fm = length(xp);
        xp[k] = x[k];
        (*grad)[k] = (std::isfinite(fp) && std::isfinite(fm)) ? (fp - fm) / (2.0 * h) : 0.0;
      }
    }
    return f;
  };
  const auto r = opt::bfgs(objective, x0, {200, 1e-8, 1e-12});
  if (std::isfinite(r.f)) nodes = unpack(r.x);
  return nodes;
}

inline CVec chart_tangent_to_domain(const DomainModel& dm, const CVec& y, const CVec& Y) {
  if (dm.chart == ChartKind::Identity) return Y;
  return CVec{std::exp(y[0]) * Y[0]};
}

}  // namespace detail

/// Upper bound for the Kobayashi distance as the integral of kappa-upper along a path:
/// the trace of a certified Lempert disc when one is found, otherwise a chart path.
/// The trapezoid rule runs on P panels; error_estimate compares with P/2 panels.
inline PathResult kobayashi_distance_upper(const DomainGeometry& d, const Point& z, const Point& w,
                                           const SolverConfig& cfg = {}) {
  cfg.validate();
  detail::require_solvable(d, z, cfg);
  detail::require_solvable(d, w, cfg);
  PathResult out;
  out.diag.method = "path";
  if (z == w) {
    out.nodes = {z};
    out.route = "trivial";
    return out;
  }
  const int P = cfg.path_nodes + (cfg.path_nodes % 2);
  const DomainModel dm = domain_model(d);
  SolverConfig node_cfg = cfg;
  node_cfg.restarts = 1;
  // Node solves start from a nearby disc; a short polish is enough.
  opt::AlmOptions node_alm;
  node_alm.max_outer = 8;
  node_alm.inner.max_iter = 150;

  std::optional<DiscResult> disc;
  try {
    disc = lempert_upper(d, z, w, cfg);
  } catch (const SolverFailure&) {
  }
  std::vector<double> f(static_cast<std::size_t>(P + 1));
  double h = 0.0;
  auto add_diag = [&](const SolveDiagnostics& g) {
    out.diag.evaluations += g.evaluations;
    out.diag.restarts_run += g.restarts_run;
    out.diag.certified += g.certified;
    out.diag.shrink = std::max(out.diag.shrink, g.shrink);
  };
  if (disc && std::abs(disc->disc.alpha) > 0.0) {
    out.route = "disc_trace";
    add_diag(disc->diag);
    const auto& phi = disc->disc;
    const double a = std::atanh(std::abs(phi.alpha));
    const cplx dir = phi.alpha / std::abs(phi.alpha);
    h = a / P;
    for (int i = 0; i <= P; ++i) {
      const double s = h * i;
      const cplx zeta = std::tanh(s) * dir;
      Point y = i == 0 ? z : (i == P ? w : phi.at(zeta));
      const CVec X = phi.derivative(zeta) * (dir * (1.0 - std::norm(zeta)));
      const cplx xi = phi.automorphism(zeta);
      DiscHint hint{phi.coeffs, xi};
      const auto r = detail::metric_upper_impl(d, Tangent{y, X}, node_cfg, {hint}, node_alm, false);
      add_diag(r.diag);
      f[static_cast<std::size_t>(i)] = r.value;
      out.nodes.push_back(std::move(y));
    }
    out.lempert = std::move(disc);
  } else {
    out.route = "chart_path";
    const CVec yz = dm.to_chart(z);
    CVec yw = dm.to_chart(w);
    if (dm.chart == ChartKind::Log) yw = CVec{yz[0] + std::log(w[0] / z[0])};
    const auto ys = detail::chart_path(d, dm, yz, yw, P);
    h = 1.0 / P;
    std::vector<DiscHint> hints;
    for (int i = 0; i <= P; ++i) {
      const auto k = static_cast<std::size_t>(i);
      CVec Y = i == 0   ? (ys[0] * -3.0 + ys[1] * 4.0 - ys[2]) / (2.0 * h)
               : i == P ? (ys[k] * 3.0 - ys[k - 1] * 4.0 + ys[k - 2]) / (2.0 * h)
                        : (ys[k + 1] - ys[k - 1]) / (2.0 * h);
      Point y = i == 0 ? z : (i == P ? w : dm.from_chart(ys[k]));
      const CVec X = detail::chart_tangent_to_domain(dm, ys[k], Y);
      const auto r = detail::metric_upper_impl(d, Tangent{y, X}, node_cfg, hints, node_alm, false);
      add_diag(r.diag);
      f[k] = r.value;
      // Warm start the next node from this disc.
      hints = {DiscHint{r.disc.coeffs, r.disc.pre_a}};
      out.nodes.push_back(std::move(y));
    }
  }
  const auto [s1, s2] = detail::trapezoid_pair(f, h);
  out.value = HyperbolicValue(s1);
  out.error_estimate = std::abs(s1 - s2) / 3.0;
  out.integrand = std::move(f);
  out.step = h;
  return out;
}

/// Bracket [caratheodory_lower, lempert_upper] for the invariant distances at (z, w).
inline Bracket sandwich(const DomainGeometry& d, const Point& z, const Point& w, const SolverConfig& cfg = {}) {
  const auto lo = caratheodory_lower(d, z, w, cfg);
  const auto up = lempert_upper(d, z, w, cfg);
  Bracket b;
  b.lower = lo.value;
  b.upper = up.value;
  b.lower_diag = lo.diag;
  b.upper_diag = up.diag;
  return b;
}

}  // namespace invmetric
