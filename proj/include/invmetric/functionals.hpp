#pragma once

// Lower bounds for the Caratheodory distance and metric from explicit bounded
// holomorphic functionals f: D -> unit disc. Each candidate is a valid functional,
// so k_Delta(f(z), f(w)) <= c_D(z, w) holds for every member of the family.
//
// Families: supporting disc and half-plane projections (convex models), ball
// automorphisms followed by a coordinate projection, and Laurent polynomials on
// the annulus with a certified boundary supremum.

#include "invmetric/closed_forms.hpp"
#include "invmetric/optimize.hpp"
#include "invmetric/solver.hpp"

namespace invmetric {

struct ScalarFunctionalParam {
  enum class Kind { DiscProjection, HalfPlaneProjection, BallAutomorphism, Laurent };
  Kind kind = Kind::DiscProjection;
  CVec normal;               // projection covector: l(y) = <y, normal>
  cplx center = 0.0;         // DiscProjection: center of the image disc
  double radius = 1.0;       // DiscProjection: image radius; BallAutomorphism: ball radius
  double offset = 0.0;       // HalfPlaneProjection: Re l(y) < offset on D
  CVec ball_center;          // BallAutomorphism
  CVec ball_base;            // BallAutomorphism: point sent to 0, unit-ball coordinates
  double inner_radius = 0.0; // Laurent: annulus inner radius
  int laurent_degree = 0;    // Laurent: coefficients for k in [-N, N]
  std::vector<cplx> laurent;
  double sup = 1.0;          // certified bound for the raw map on D
  cplx base_value = 0.0;     // raw value at the base point, moved to 0 by a Mobius map

  /// Raw map with values in the unit disc.
  [[nodiscard]] cplx raw(const Point& y) const {
    switch (kind) {
      case Kind::DiscProjection: return (inner_product(y) - center) / radius;
      case Kind::HalfPlaneProjection: {
        const cplx v = offset - inner_product(y);
        return (v - 1.0) / (v + 1.0);
      }
      case Kind::BallAutomorphism: return inner(ball_map((y - ball_center) / radius), normal);
      case Kind::Laurent: return laurent_value(y[0]) / sup;
    }
    return 0.0;
  }

  /// Directional derivative of the raw map at y along X.
  [[nodiscard]] cplx raw_derivative(const Point& y, const CVec& X) const {
    switch (kind) {
      case Kind::DiscProjection: return inner(X, normal) / radius;
      case Kind::HalfPlaneProjection: {
        const cplx v = offset - inner_product(y);
        return -inner(X, normal) * 2.0 / ((v + 1.0) * (v + 1.0));
      }
      case Kind::BallAutomorphism: return inner(ball_map_derivative((y - ball_center) / radius, X / radius), normal);
      case Kind::Laurent: return laurent_derivative(y[0]) * X[0] / sup;
    }
    return 0.0;
  }

  /// Normalized functional, f(base) = 0.
  [[nodiscard]] cplx operator()(const Point& y) const {
    const cplx u = raw(y);
    return (u - base_value) / (1.0 - std::conj(base_value) * u);
  }

  [[nodiscard]] const char* kind_label() const {
    switch (kind) {
      case Kind::DiscProjection: return "disc_projection";
      case Kind::HalfPlaneProjection: return "half_plane_projection";
      case Kind::BallAutomorphism: return "ball_automorphism";
      case Kind::Laurent: return "laurent";
    }
    return "";
  }

  [[nodiscard]] cplx laurent_value(cplx zeta) const {
    const int N = laurent_degree;
    cplx s = laurent[static_cast<std::size_t>(N)];
    cplx p = 1.0, q = 1.0;
    const cplx rq = inner_radius / zeta;
    for (int k = 1; k <= N; ++k) {
      p *= zeta;
      q *= rq;
      s += laurent[static_cast<std::size_t>(N + k)] * p + laurent[static_cast<std::size_t>(N - k)] * q;
    }
    return s;
  }

  [[nodiscard]] cplx laurent_derivative(cplx zeta) const {
    const int N = laurent_degree;
    cplx s = 0.0;
    cplx p = 1.0, q = 1.0 / zeta;
    const cplx rq = inner_radius / zeta;
    for (int k = 1; k <= N; ++k) {
      s += static_cast<double>(k) * laurent[static_cast<std::size_t>(N + k)] * p;
      q *= rq;
      s -= static_cast<double>(k) * laurent[static_cast<std::size_t>(N - k)] * q;
      p *= zeta;
    }
    return s;
  }

 private:
  [[nodiscard]] cplx inner_product(const Point& y) const { return inner(y, normal); }

  // Ball automorphism u -> (a - P_a u - s_a Q_a u) / (1 - <u, a>) exchanging a and 0.
  [[nodiscard]] CVec ball_map(const CVec& u) const {
    const CVec& a = ball_base;
    const double a2 = a.norm2();
    if (a2 == 0.0) return -u;
    const double s = std::sqrt((1.0 - std::sqrt(a2)) * (1.0 + std::sqrt(a2)));
    const CVec Pu = a * (inner(u, a) / a2);
    const CVec Qu = u - Pu;
    return (a - Pu - Qu * s) / (1.0 - inner(u, a));
  }
  [[nodiscard]] CVec ball_map_derivative(const CVec& u, const CVec& V) const {
    const CVec& a = ball_base;
    const double a2 = a.norm2();
    if (a2 == 0.0) return -V;
    const double s = std::sqrt((1.0 - std::sqrt(a2)) * (1.0 + std::sqrt(a2)));
    const CVec Pu = a * (inner(u, a) / a2);
    const CVec PV = a * (inner(V, a) / a2);
    const cplx D = 1.0 - inner(u, a);
    const CVec Nu = a - Pu - (u - Pu) * s;
    const CVec dN = -PV - (V - PV) * s;
    return dN / D + Nu * (inner(V, a) / (D * D));
  }
};

struct FunctionalResult {
  HyperbolicValue value;
  ScalarFunctionalParam functional;
  Direction direction = Direction::Lower;
  SolveDiagnostics diag;
};

struct MetricFunctionalResult {
  double value = 0.0;
  ScalarFunctionalParam functional;
  Direction direction = Direction::Lower;
  SolveDiagnostics diag;
};

namespace detail {

inline double functional_distance(const ScalarFunctionalParam& f, const Point& z, const Point& w) {
  return poincare_distance(f.raw(z), f.raw(w));
}

inline double functional_metric(const ScalarFunctionalParam& f, const Point& z, const CVec& X) {
  const cplx u = f.raw(z);
  const double om = (1.0 - std::abs(u)) * (1.0 + std::abs(u));
  if (!(om > 0.0)) return 0.0;
  return std::abs(f.raw_derivative(z, X)) / om;
}

/// Rigorous upper bound for sup over the ellipsoid of |<y, nu>| by Lagrange duality:
/// for any lambda > 0 the sup is at most lambda + sum_i sup_t (t |nu_i| - lambda t^{2 m_i}).
inline double ellipsoid_support(const CVec& nu, const std::vector<double>& m) {
  auto t_of = [&](double lam, std::size_t i) {
    return std::pow(std::abs(nu[i]) / (2.0 * m[i] * lam), 1.0 / (2.0 * m[i] - 1.0));
  };
  auto g = [&](double lam) {
    double s = 0.0;
    for (std::size_t i = 0; i < nu.size(); ++i) s += std::pow(t_of(lam, i), 2.0 * m[i]);
    return s;
  };
  double lo = -60.0, hi = 60.0;  // log lambda
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    (g(std::exp(mid)) > 1.0 ? lo : hi) = mid;
  }
  const double lam = std::exp(0.5 * (lo + hi));
  double h = lam;
  for (std::size_t i = 0; i < nu.size(); ++i) h += t_of(lam, i) * std::abs(nu[i]) * (1.0 - 1.0 / (2.0 * m[i]));
  return h * (1.0 + 1e-14);
}

inline ScalarFunctionalParam disc_projection(CVec nu, cplx center, double radius) {
  ScalarFunctionalParam f;
  f.kind = ScalarFunctionalParam::Kind::DiscProjection;
  f.normal = std::move(nu);
  f.center = center;
  f.radius = radius;
  return f;
}

inline ScalarFunctionalParam ball_functional(const shape::Ball& b, const Point& z, CVec nu) {
  ScalarFunctionalParam f;
  f.kind = ScalarFunctionalParam::Kind::BallAutomorphism;
  f.ball_center = b.center;
  f.radius = b.radius;
  f.ball_base = (z - b.center) / b.radius;
  f.normal = std::move(nu);
  return f;
}

/// Ball functional aimed at w (distance) or along X (metric); extremal for the ball.
inline ScalarFunctionalParam ball_extremal(const shape::Ball& b, const Point& z, const std::optional<Point>& w,
                                           const std::optional<CVec>& X) {
  ScalarFunctionalParam f = ball_functional(b, z, CVec(z.size()));
  // Image of w (or of X) under the automorphism gives the optimal projection direction.
  CVec img(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    f.normal = unit(z.size(), i);
    img[i] = w ? f.raw(*w) : f.raw_derivative(z, *X);
  }
  const double n = img.norm();
  f.normal = n > 0.0 ? img / n : unit(z.size(), 0);
  return f;
}

/// Maximizes a functional value over unit covectors nu with Nelder-Mead from several starts.
template <class Make, class Score>
std::optional<ScalarFunctionalParam> best_covector(std::size_t n, const std::vector<CVec>& starts, Make make,
                                                   Score score) {
  std::optional<ScalarFunctionalParam> best;
  double best_v = -kInf;
  auto to_vec = [n](const opt::Vec& p) {
    CVec nu(n);
    for (std::size_t i = 0; i < n; ++i) nu[i] = cplx(p[static_cast<Eigen::Index>(2 * i)], p[static_cast<Eigen::Index>(2 * i + 1)]);
    return nu;
  };
  for (const auto& s0 : starts) {
    if (!(s0.norm() > 0.0)) continue;
    opt::Vec p(static_cast<Eigen::Index>(2 * n));
    const CVec u = s0 / s0.norm();
    for (std::size_t i = 0; i < n; ++i) {
      p[static_cast<Eigen::Index>(2 * i)] = u[i].real();
      p[static_cast<Eigen::Index>(2 * i + 1)] = u[i].imag();
    }
    auto obj = [&](const opt::Vec& q) {
      const CVec nu = to_vec(q);
      const double nn = nu.norm();
      if (!(nn > 1e-12)) return kInf;
      const auto f = make(nu / nn);
      if (!f) return kInf;
      return -score(*f);
    };
    const auto r = opt::nelder_mead(obj, p, 0.2, {600, 1e-12, 1e-16});
    const CVec nu = to_vec(r.x);
    if (!(nu.norm() > 1e-12)) continue;
    const auto f = make(nu / nu.norm());
    if (!f) continue;
    const double v = score(*f);
    if (v > best_v) {
      best_v = v;
      best = f;
    }
  }
  return best;
}

/// Laurent polynomial functional on the annulus r < |zeta| < 1 maximizing a real-linear
/// objective Re sum_k a_k c_k subject to |F| <= 1 on both boundary circles and F(z) = 0.
class LaurentModel : public opt::ConstrainedModel {
 public:
  LaurentModel(double r, int N, int M, cplx z, std::vector<cplx> objective)
      : r_(r), N_(N), M_(M), z_(z), c_(std::move(objective)) {
    const std::size_t K = static_cast<std::size_t>(2 * N);
    e_.assign(static_cast<std::size_t>(2 * M), std::vector<cplx>(K));
    for (int j = 0; j < 2 * M; ++j) {
      const double rho = j < M ? 1.0 : r;
      const cplx zeta = std::polar(rho, 2.0 * kPi * (j % M) / M);
      const auto bz = basis(z_), bj = basis(zeta);
      for (std::size_t k = 0; k < K; ++k) e_[static_cast<std::size_t>(j)][k] = bj[k] - bz[k];
    }
  }

  /// Basis values in the order (zeta^1..zeta^N, (r/zeta)^1..(r/zeta)^N).
  [[nodiscard]] std::vector<cplx> basis(cplx zeta) const {
    std::vector<cplx> b(static_cast<std::size_t>(2 * N_));
    cplx p = 1.0, q = 1.0;
    for (int k = 0; k < N_; ++k) {
      p *= zeta;
      q *= r_ / zeta;
      b[static_cast<std::size_t>(k)] = p;
      b[static_cast<std::size_t>(N_ + k)] = q;
    }
    return b;
  }
  [[nodiscard]] std::vector<cplx> basis_derivative(cplx zeta) const {
    std::vector<cplx> b(static_cast<std::size_t>(2 * N_));
    cplx p = 1.0, q = 1.0 / zeta;
    for (int k = 1; k <= N_; ++k) {
      q *= r_ / zeta;
      b[static_cast<std::size_t>(k - 1)] = static_cast<double>(k) * p;
      b[static_cast<std::size_t>(N_ + k - 1)] = -static_cast<double>(k) * q;
      p *= zeta;
    }
    return b;
  }

  [[nodiscard]] Eigen::Index constraint_count() const override { return 2 * M_; }
  [[nodiscard]] Eigen::Index dim() const { return 4 * N_; }

  double evaluate(const opt::Vec& x, opt::Vec* grad, opt::Vec& g, const opt::Penalty* pen) const override {
    const std::size_t K = static_cast<std::size_t>(2 * N_);
    double f = 0.0;
    for (std::size_t k = 0; k < K; ++k) f -= (coef(x, k) * c_[k]).real();
    if (grad) {
      grad->setZero(dim());
      for (std::size_t k = 0; k < K; ++k) {
        (*grad)[static_cast<Eigen::Index>(2 * k)] = -c_[k].real();
        (*grad)[static_cast<Eigen::Index>(2 * k + 1)] = c_[k].imag();
      }
    }
    for (int j = 0; j < 2 * M_; ++j) {
      const auto& e = e_[static_cast<std::size_t>(j)];
      cplx F = 0.0;
      for (std::size_t k = 0; k < K; ++k) F += coef(x, k) * e[k];
      const double G = std::norm(F) - 1.0;
      g[j] = G;
      if (!(grad && pen)) continue;
      const double w = pen->weight(j, G);
      if (w == 0.0) continue;
      for (std::size_t k = 0; k < K; ++k) {
        const cplx q = std::conj(F) * e[k];
        (*grad)[static_cast<Eigen::Index>(2 * k)] += w * 2.0 * q.real();
        (*grad)[static_cast<Eigen::Index>(2 * k + 1)] -= w * 2.0 * q.imag();
      }
    }
    return f;
  }

  [[nodiscard]] cplx coef(const opt::Vec& x, std::size_t k) const {
    return {x[static_cast<Eigen::Index>(2 * k)], x[static_cast<Eigen::Index>(2 * k + 1)]};
  }

  /// Functional with the constant term pinned so that F(z) = 0.
  [[nodiscard]] ScalarFunctionalParam functional(const opt::Vec& x) const {
    ScalarFunctionalParam f;
    f.kind = ScalarFunctionalParam::Kind::Laurent;
    f.inner_radius = r_;
    f.laurent_degree = N_;
    f.laurent.assign(static_cast<std::size_t>(2 * N_ + 1), 0.0);
    const auto bz = basis(z_);
    cplx a0 = 0.0;
    for (int k = 1; k <= N_; ++k) {
      const cplx ap = coef(x, static_cast<std::size_t>(k - 1));
      const cplx am = coef(x, static_cast<std::size_t>(N_ + k - 1));
      f.laurent[static_cast<std::size_t>(N_ + k)] = ap;
      f.laurent[static_cast<std::size_t>(N_ - k)] = am;
      a0 -= ap * bz[static_cast<std::size_t>(k - 1)] + am * bz[static_cast<std::size_t>(N_ + k - 1)];
    }
    f.laurent[static_cast<std::size_t>(N_)] = a0;
    return f;
  }

 private:
  double r_;
  int N_, M_;
  cplx z_;
  std::vector<cplx> c_;
  std::vector<std::vector<cplx>> e_;
};

/// Certified upper bound for sup |F| over both boundary circles of the annulus, by
/// adaptive arcs with the bound |d^2/dtheta^2 |F|^2| <= 2 L1^2 + 2 M0 L2.
inline double laurent_sup_bound(const ScalarFunctionalParam& f, int budget = 200000) {
  const int N = f.laurent_degree;
  double best_upper = 0.0;
  int evals = 0;
  for (const double rho : {1.0, f.inner_radius}) {
    double M0 = 0.0, L1 = 0.0, L2 = 0.0;
    for (int k = -N; k <= N; ++k) {
      const double mag = std::abs(f.laurent[static_cast<std::size_t>(N + k)]) *
                         (k >= 0 ? std::pow(rho, k) : std::pow(f.inner_radius / rho, -k));
      M0 += mag;
      L1 += std::abs(k) * mag;
      L2 += static_cast<double>(k * k) * mag;
    }
    const double B = 2.0 * L1 * L1 + 2.0 * M0 * L2;
    auto F2 = [&](double t) {
      ++evals;
      return std::norm(f.laurent_value(std::polar(rho, t)));
    };
    struct Arc {
      double t0, t1, f0, f1;
    };
    const int K = 1024;
    std::vector<Arc> arcs;
    std::vector<double> v(K + 1);
    double fmax = 0.0;
    for (int k = 0; k < K; ++k) {
      v[static_cast<std::size_t>(k)] = F2(2.0 * kPi * k / K);
      fmax = std::max(fmax, v[static_cast<std::size_t>(k)]);
    }
    v[K] = v[0];
    for (int k = 0; k < K; ++k)
      arcs.push_back({2.0 * kPi * k / K, 2.0 * kPi * (k + 1) / K, v[static_cast<std::size_t>(k)],
                      v[static_cast<std::size_t>(k + 1)]});
    double upper = fmax;
    while (!arcs.empty()) {
      const Arc a = arcs.back();
      arcs.pop_back();
      const double h = a.t1 - a.t0;
      const double ub = std::max(a.f0, a.f1) + B * h * h / 8.0;
      if (ub <= fmax * (1.0 + 1e-9) || evals > budget || h < 1e-12) {
        upper = std::max(upper, ub);
        continue;
      }
      const double tm = 0.5 * (a.t0 + a.t1);
      const double fm = F2(tm);
      fmax = std::max(fmax, fm);
      arcs.push_back({a.t0, tm, a.f0, fm});
      arcs.push_back({tm, a.t1, fm, a.f1});
    }
    best_upper = std::max(best_upper, std::max(upper, fmax));
  }
  return std::sqrt(best_upper) * (1.0 + 1e-14);
}

inline ScalarFunctionalParam solve_laurent(double r, cplx z, const std::vector<cplx>& objective, const SolverConfig& cfg,
                                           SolveDiagnostics& diag, int N) {
  LaurentModel model(r, N, cfg.boundary_samples, z, objective);
  opt::Vec x = opt::Vec::Zero(model.dim());
  opt::AlmOptions o;
  o.feas_tol = 1e-9;
  const auto res = opt::augmented_lagrangian(model, x, o);
  diag.evaluations += res.evaluations;
  diag.restarts_run = 1;
  diag.max_violation = res.max_violation;
  ScalarFunctionalParam f = model.functional(res.x);
  f.sup = 1.0;
  const double S = laurent_sup_bound(f);
  f.sup = S > 0.0 ? S : 1.0;
  ++diag.certified;
  return f;
}

/// Candidate functionals for a pair (w given) or a tangent (X given).
inline std::vector<ScalarFunctionalParam> functional_family(const DomainGeometry& d, const Point& z,
                                                            const std::optional<Point>& w,
                                                            const std::optional<CVec>& X, const SolverConfig& cfg,
                                                            SolveDiagnostics& diag) {
  std::vector<ScalarFunctionalParam> out;
  const std::size_t n = d.dimension();
  auto score = [&](const ScalarFunctionalParam& f) {
    return w ? functional_distance(f, z, *w) : functional_metric(f, z, *X);
  };
  auto add_base = [&](const DomainGeometry& b) {
    switch (b.kind()) {
      case DomainKind::UnitDisc: out.push_back(disc_projection(CVec{1.0}, 0.0, 1.0)); break;
      case DomainKind::Ball: out.push_back(ball_extremal(b.as<shape::Ball>(), z, w, X)); break;
      case DomainKind::Polydisc: {
        const auto& p = b.as<shape::Polydisc>();
        for (std::size_t i = 0; i < n; ++i) out.push_back(disc_projection(unit(n, i), 0.0, p.radii[i]));
        break;
      }
      case DomainKind::HalfPlane: {
        const auto& h = b.as<shape::HalfPlane>();
        ScalarFunctionalParam f;
        f.kind = ScalarFunctionalParam::Kind::HalfPlaneProjection;
        f.normal = h.normal;
        f.offset = h.offset;
        out.push_back(f);
        break;
      }
      case DomainKind::ComplexEllipsoid: {
        const auto& m = b.as<shape::ComplexEllipsoid>().exponents;
        std::vector<CVec> starts;
        if (w) {
          starts.push_back(*w - z);
          starts.push_back(*w);
        } else {
          starts.push_back(*X);
        }
        starts.push_back(z);
        for (std::size_t i = 0; i < n; ++i) starts.push_back(unit(n, i));
        auto make = [&](const CVec& nu) -> std::optional<ScalarFunctionalParam> {
          return disc_projection(nu, 0.0, ellipsoid_support(nu, m));
        };
        if (auto f = best_covector(n, starts, make, score)) out.push_back(*f);
        for (std::size_t i = 0; i < n; ++i) out.push_back(make(unit(n, i)).value());
        break;
      }
      case DomainKind::Annulus: {
        const double r = b.as<shape::Annulus>().inner;
        const int N = cfg.laurent_degree;
        LaurentModel probe(r, N, 8, z[0], {});
        std::vector<cplx> c;
        if (w) {
          const auto bw = probe.basis((*w)[0]);
          const auto bz = probe.basis(z[0]);
          for (std::size_t k = 0; k < bw.size(); ++k) c.push_back(bw[k] - bz[k]);
        } else {
          // Maximize Re F'(z) X with the phase of X absorbed into the coefficients.
          const auto bd = probe.basis_derivative(z[0]);
          for (const auto& v : bd) c.push_back(v * (*X)[0]);
        }
        out.push_back(solve_laurent(r, z[0], c, cfg, diag, N));
        break;
      }
      case DomainKind::Intersection: throw InputError("nested intersection");
    }
  };
  if (d.kind() == DomainKind::Intersection) {
    const auto& s = d.as<shape::Intersection>();
    add_base(*s.base);
    if (s.base->dimension() == n) out.push_back(ball_extremal(shape::Ball{s.center, s.radius}, z, w, X));
  } else {
    add_base(d);
  }
  if (out.empty()) throw CapabilityError(std::string("no admissible functionals for ") + kind_name(d.kind()));
  return out;
}

}  // namespace detail

/// Lower bound for the Caratheodory distance c_D(z, w).
inline FunctionalResult caratheodory_lower(const DomainGeometry& d, const Point& z, const Point& w,
                                           const SolverConfig& cfg = {}) {
  cfg.validate();
  d.check_point(z);
  d.check_point(w);
  detail::require_interior(d, z);
  detail::require_interior(d, w);
  FunctionalResult out;
  out.diag.method = "functional";
  if (z == w) return out;
  auto family = detail::functional_family(d, z, w, std::nullopt, cfg, out.diag);
  double best = -kInf;
  for (auto& f : family) {
    const double v = detail::functional_distance(f, z, w);
    if (v > best) {
      best = v;
      f.base_value = f.raw(z);
      out.functional = f;
    }
  }
  out.value = HyperbolicValue(std::max(0.0, best));
  out.diag.method = out.functional.kind_label();
  return out;
}

/// Lower bound for the Caratheodory-Reiffen metric gamma_D(z; X).
inline MetricFunctionalResult caratheodory_metric_lower(const DomainGeometry& d, const Tangent& t,
                                                        const SolverConfig& cfg = {}) {
  cfg.validate();
  d.check_point(t.base);
  if (t.direction.size() != d.dimension()) throw InputError("tangent dimension mismatch");
  if (!t.direction.finite()) throw InputError("tangent direction is not finite");
  detail::require_interior(d, t.base);
  MetricFunctionalResult out;
  out.diag.method = "functional";
  if (t.direction.norm() == 0.0) return out;
  auto family = detail::functional_family(d, t.base, std::nullopt, t.direction, cfg, out.diag);
  double best = -kInf;
  for (auto& f : family) {
    const double v = detail::functional_metric(f, t.base, t.direction);
    if (v > best) {
      best = v;
      f.base_value = f.raw(t.base);
      out.functional = f;
    }
  }
  out.value = std::max(0.0, best);
  out.diag.method = out.functional.kind_label();
  return out;
}

}  // namespace invmetric
