#pragma once

// Polynomial analytic discs: constraint atoms describing a domain in chart
// coordinates, a-posteriori containment certification, and the constrained
// models behind the Lempert-function and Kobayashi-metric solvers.
//
// A disc is a polynomial p(xi) = sum a_k xi^k in chart coordinates; the domain
// map is phi(zeta) = chart^{-1}(p(A(zeta))) for a disc automorphism A. The log
// chart (y = log z) is used for annulus-based domains so that the defining
// conditions become half-planes.

#include <memory>
#include <span>

#include "invmetric/domains.hpp"
#include "invmetric/optimize.hpp"

namespace invmetric {

enum class ChartKind { Identity, Log };

/// One defining condition G(y) <= 0 of the domain in chart coordinates.
struct Atom {
  enum class Type { Ball, CoordDisc, Ellipsoid, HalfSpace, ExpBall };
  Type type = Type::Ball;
  CVec center;
  double radius = 1.0;
  std::size_t index = 0;
  std::vector<double> exponents;
  CVec normal;
  double offset = 0.0;

  /// G(y) and its gradient in the convention dG = Re sum dy_i conj(grad_i).
  /// grad may be empty when only the value is needed.
  double eval(std::span<const cplx> y, std::span<cplx> grad) const {
    const bool g = !grad.empty();
    switch (type) {
      case Type::Ball: {
        double r2 = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) r2 += std::norm(y[i] - center[i]);
        const double r = std::sqrt(r2);
        if (g)
          for (std::size_t i = 0; i < y.size(); ++i) grad[i] = r > 0.0 ? (y[i] - center[i]) / r : 0.0;
        return r - radius;
      }
      case Type::CoordDisc: {
        const double r = std::abs(y[index]);
        if (g) {
          std::fill(grad.begin(), grad.end(), cplx(0.0));
          grad[index] = r > 0.0 ? y[index] / r : 0.0;
        }
        return r - radius;
      }
      case Type::Ellipsoid: {
        double s = -1.0;
        for (std::size_t i = 0; i < y.size(); ++i) {
          const double a2 = std::norm(y[i]);
          const double m = exponents[i];
          const double p = m == 1.0 ? 1.0 : std::pow(a2, m - 1.0);
          s += p * a2;
          if (g) grad[i] = 2.0 * m * p * y[i];
        }
        return s;
      }
      case Type::HalfSpace: {
        cplx v = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) v += y[i] * std::conj(normal[i]);
        if (g)
          for (std::size_t i = 0; i < y.size(); ++i) grad[i] = normal[i];
        return v.real() - offset;
      }
      case Type::ExpBall: {
        const cplx u = std::exp(y[0]);
        const cplx d = u - center[0];
        const double r = std::abs(d);
        if (g) grad[0] = r > 0.0 ? std::conj(u) * d / r : 0.0;
        return r - radius;
      }
    }
    return kInf;
  }

  double value(const CVec& y, CVec* grad) const {
    if (!grad) return eval(y.raw(), {});
    *grad = CVec(y.size());
    return eval(y.raw(), std::span<cplx>(&(*grad)[0], y.size()));
  }

  /// Smooth certificate function, positive exactly where G < 0.
  [[nodiscard]] double psi(const CVec& y) const {
    switch (type) {
      case Type::Ball: return radius * radius - (y - center).norm2();
      case Type::CoordDisc: return radius * radius - std::norm(y[index]);
      case Type::Ellipsoid: return -value(y, nullptr);
      case Type::HalfSpace: return -value(y, nullptr);
      case Type::ExpBall: return radius * radius - std::norm(std::exp(y[0]) - center[0]);
    }
    return -kInf;
  }
};

/// Bounds for a polynomial on the circle |xi| = rho used by the arc test.
struct PolyBounds {
  std::vector<double> m0;  // per component: max modulus bound
  std::vector<double> l1;  // per component: bound on |d/dtheta p_i|
  std::vector<double> l2;  // per component: bound on |d^2/dtheta^2 p_i|
  double L1 = 0.0, L2 = 0.0;
};

inline PolyBounds poly_bounds(const std::vector<CVec>& a, double rho) {
  const std::size_t n = a.front().size();
  PolyBounds b;
  b.m0.assign(n, 0.0);
  b.l1.assign(n, 0.0);
  b.l2.assign(n, 0.0);
  double rk = 1.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    double nk = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double m = std::abs(a[k][i]) * rk;
      b.m0[i] += m;
      b.l1[i] += static_cast<double>(k) * m;
      b.l2[i] += static_cast<double>(k * k) * m;
      nk += std::norm(a[k][i]);
    }
    b.L1 += static_cast<double>(k) * std::sqrt(nk) * rk;
    b.L2 += static_cast<double>(k * k) * std::sqrt(nk) * rk;
    rk *= rho;
  }
  return b;
}

namespace detail {

/// Bound on |d^2/dtheta^2 psi(p(rho e^{i theta}))| over the whole circle.
inline double psi_second_bound(const Atom& at, const std::vector<CVec>& a, double rho, const PolyBounds& b) {
  switch (at.type) {
    case Atom::Type::Ball: {
      double mc = (a[0] - at.center).norm();
      double rk = rho;
      for (std::size_t k = 1; k < a.size(); ++k, rk *= rho) mc += a[k].norm() * rk;
      return 2.0 * b.L1 * b.L1 + 2.0 * mc * b.L2;
    }
    case Atom::Type::CoordDisc: {
      const std::size_t i = at.index;
      return 2.0 * b.l1[i] * b.l1[i] + 2.0 * b.m0[i] * b.l2[i];
    }
    case Atom::Type::HalfSpace: return b.L2;
    case Atom::Type::Ellipsoid: {
      double s = 0.0;
      for (std::size_t i = 0; i < b.m0.size(); ++i) {
        const double m = at.exponents[i];
        const double M = b.m0[i];
        s += std::pow(M, 2.0 * m - 2.0) * ((4.0 * m * m - 2.0 * m) * b.l1[i] * b.l1[i] + 2.0 * m * M * b.l2[i]);
      }
      return s;
    }
    case Atom::Type::ExpBall: {
      double max_re = a[0][0].real();
      double rk = rho;
      for (std::size_t k = 1; k < a.size(); ++k, rk *= rho) max_re += std::abs(a[k][0]) * rk;
      const double U = std::exp(max_re);
      const double l1 = b.l1[0], l2 = b.l2[0];
      return 2.0 * U * U * l1 * l1 + 2.0 * (U + std::abs(at.center[0])) * U * (l2 + l1 * l1);
    }
  }
  return kInf;
}

/// Exact minimum of psi over the circle for affine discs, where available.
inline std::optional<double> psi_min_affine(const Atom& at, const std::vector<CVec>& a, double rho) {
  for (std::size_t k = 2; k < a.size(); ++k)
    if (a[k].norm2() != 0.0) return std::nullopt;
  const CVec a1 = a.size() > 1 ? a[1] * rho : CVec(a[0].size());
  switch (at.type) {
    case Atom::Type::Ball: {
      const CVec d = a[0] - at.center;
      return at.radius * at.radius - (d.norm2() + a1.norm2() + 2.0 * std::abs(inner(a1, d)));
    }
    case Atom::Type::CoordDisc: {
      const std::size_t i = at.index;
      return at.radius * at.radius -
             (std::norm(a[0][i]) + std::norm(a1[i]) + 2.0 * std::abs(a1[i] * std::conj(a[0][i])));
    }
    case Atom::Type::HalfSpace: return at.offset - inner(a[0], at.normal).real() - std::abs(inner(a1, at.normal));
    default: return std::nullopt;
  }
}

inline CVec poly_eval(const std::vector<CVec>& a, cplx x) {
  CVec s = a.back();
  for (std::size_t k = a.size() - 1; k-- > 0;) {
    s *= x;
    s += a[k];
  }
  return s;
}

inline CVec poly_derivative(const std::vector<CVec>& a, cplx x) {
  CVec s(a.front().size());
  for (std::size_t k = a.size(); k-- > 1;) {
    s *= x;
    s += a[k] * static_cast<double>(k);
  }
  return s;
}

}  // namespace detail

struct CertifyResult {
  bool certified = false;
  double min_psi = kInf;  // smallest certified lower bound over atoms (or violation found)
  int evaluations = 0;
};

/// Certifies psi(p(rho e^{i theta})) >= 0 for every atom and theta. Affine discs
/// against ball/coordinate/half-space atoms use the exact minimum; otherwise arcs
/// are accepted when min endpoint value exceeds h^2 B / 8, with adaptive splitting.
inline CertifyResult certify_circle(const std::vector<Atom>& atoms, const std::vector<CVec>& a, double rho,
                                    int budget = 40000) {
  CertifyResult r;
  const PolyBounds pb = poly_bounds(a, rho);
  double scale = 1.0;
  for (const auto& c : a) scale = std::max(scale, c.norm2());
  for (const auto& at : atoms) {
    const auto m = detail::psi_min_affine(at, a, rho);
    if (m) {
      const double slack = 64.0 * 1e-16 * (scale + at.radius * at.radius + std::abs(at.offset));
      r.min_psi = std::min(r.min_psi, *m);
      if (*m <= slack) return r;
      continue;
    }
    const double B = detail::psi_second_bound(at, a, rho, pb);
    if (!std::isfinite(B)) return r;
    const int K = 256;
    struct Arc {
      double t0, t1, f0, f1;
      int depth;
    };
    auto f = [&](double t) {
      ++r.evaluations;
      return at.psi(detail::poly_eval(a, std::polar(rho, t)));
    };
    std::vector<Arc> stack;
    std::vector<double> vals(K + 1);
    for (int k = 0; k <= K; ++k) vals[static_cast<std::size_t>(k)] = (k == K) ? vals[0] : f(2.0 * kPi * k / K);
    for (int k = 0; k < K; ++k)
      stack.push_back({2.0 * kPi * k / K, 2.0 * kPi * (k + 1) / K, vals[static_cast<std::size_t>(k)],
                       vals[static_cast<std::size_t>(k + 1)], 0});
    while (!stack.empty()) {
      const Arc arc = stack.back();
      stack.pop_back();
      const double lo = std::min(arc.f0, arc.f1);
      if (lo <= 0.0) {
        r.min_psi = std::min(r.min_psi, lo);
        return r;
      }
      const double h = arc.t1 - arc.t0;
      const double bound = lo - B * h * h / 8.0;
      if (bound > 0.0) {
        r.min_psi = std::min(r.min_psi, bound);
        continue;
      }
      if (arc.depth > 40 || r.evaluations > budget) return r;
      const double tm = 0.5 * (arc.t0 + arc.t1);
      const double fm = f(tm);
      stack.push_back({arc.t0, tm, arc.f0, fm, arc.depth + 1});
      stack.push_back({tm, arc.t1, fm, arc.f1, arc.depth + 1});
    }
  }
  r.certified = true;
  return r;
}

/// Chart and defining atoms of a domain.
struct DomainModel {
  ChartKind chart = ChartKind::Identity;
  std::vector<Atom> atoms;

  [[nodiscard]] CVec to_chart(const Point& z) const {
    if (chart == ChartKind::Identity) return z;
    return CVec{std::log(z[0])};
  }
  [[nodiscard]] Point from_chart(const CVec& y) const {
    if (chart == ChartKind::Identity) return y;
    return Point{std::exp(y[0])};
  }
  /// Tangent vector pushed into chart coordinates.
  [[nodiscard]] CVec tangent_to_chart(const Point& z, const CVec& X) const {
    if (chart == ChartKind::Identity) return X;
    return CVec{X[0] / z[0]};
  }
  /// Largest constraint value (<= 0 inside).
  [[nodiscard]] double violation(const CVec& y) const {
    double v = -kInf;
    for (const auto& at : atoms) v = std::max(v, at.value(y, nullptr));
    return v;
  }
};

inline DomainModel domain_model(const DomainGeometry& d) {
  DomainModel m;
  const std::size_t n = d.dimension();
  auto add_base = [&](const DomainGeometry& b) {
    switch (b.kind()) {
      case DomainKind::UnitDisc: {
        Atom a;
        a.type = Atom::Type::CoordDisc;
        a.index = 0;
        a.radius = 1.0;
        m.atoms.push_back(a);
        break;
      }
      case DomainKind::Ball: {
        Atom a;
        a.type = Atom::Type::Ball;
        a.center = b.as<shape::Ball>().center;
        a.radius = b.as<shape::Ball>().radius;
        m.atoms.push_back(a);
        break;
      }
      case DomainKind::Polydisc:
        for (std::size_t i = 0; i < n; ++i) {
          Atom a;
          a.type = Atom::Type::CoordDisc;
          a.index = i;
          a.radius = b.as<shape::Polydisc>().radii[i];
          m.atoms.push_back(a);
        }
        break;
      case DomainKind::ComplexEllipsoid: {
        Atom a;
        a.type = Atom::Type::Ellipsoid;
        a.exponents = b.as<shape::ComplexEllipsoid>().exponents;
        a.radius = 1.0;
        m.atoms.push_back(a);
        break;
      }
      case DomainKind::HalfPlane: {
        Atom a;
        a.type = Atom::Type::HalfSpace;
        a.normal = b.as<shape::HalfPlane>().normal;
        a.offset = b.as<shape::HalfPlane>().offset;
        m.atoms.push_back(a);
        break;
      }
      case DomainKind::Annulus: {
        m.chart = ChartKind::Log;
        Atom outer;
        outer.type = Atom::Type::HalfSpace;
        outer.normal = CVec{1.0};
        outer.offset = 0.0;
        Atom inner_atom = outer;
        inner_atom.normal = CVec{-1.0};
        inner_atom.offset = -std::log(b.as<shape::Annulus>().inner);
        m.atoms.push_back(outer);
        m.atoms.push_back(inner_atom);
        break;
      }
      case DomainKind::Intersection: throw InputError("nested intersection");
    }
  };
  if (d.kind() == DomainKind::Intersection) {
    const auto& s = d.as<shape::Intersection>();
    add_base(*s.base);
    Atom w;
    w.type = m.chart == ChartKind::Log ? Atom::Type::ExpBall : Atom::Type::Ball;
    w.center = s.center;
    w.radius = s.radius;
    m.atoms.push_back(w);
  } else {
    add_base(d);
  }
  return m;
}

/// A certified polynomial analytic disc phi(zeta) = chart^{-1}(p(A(zeta))) with
/// A(zeta) = (zeta + node) / (1 + node zeta) followed by a rotation.
struct AnalyticDiscParam {
  ChartKind chart = ChartKind::Identity;
  std::vector<CVec> coeffs;  // monomial coefficients a_0..a_N in chart coordinates
  cplx pre_a = 0.0;          // automorphism center
  cplx pre_rot = 1.0;        // automorphism rotation
  cplx alpha = 0.0;          // interpolation node (distance) or scale (metric)
  int boundary_samples = 0;
  double shrink = 0.0;       // radial shrink applied during certification
  bool star_normalized = false;

  [[nodiscard]] int degree() const {
    int d = 0;
    for (std::size_t k = 0; k < coeffs.size(); ++k)
      if (coeffs[k].norm2() > 0.0) d = static_cast<int>(k);
    return d;
  }
  [[nodiscard]] cplx automorphism(cplx zeta) const {
    return (pre_rot * zeta + pre_a) / (1.0 + std::conj(pre_a) * pre_rot * zeta);
  }
  [[nodiscard]] cplx automorphism_derivative(cplx zeta) const {
    const cplx den = 1.0 + std::conj(pre_a) * pre_rot * zeta;
    return pre_rot * (1.0 - std::norm(pre_a)) / (den * den);
  }
  [[nodiscard]] CVec raw(cplx xi) const { return detail::poly_eval(coeffs, xi); }
  [[nodiscard]] Point at(cplx zeta) const {
    const CVec y = raw(automorphism(zeta));
    if (chart == ChartKind::Identity) return y;
    return Point{std::exp(y[0])};
  }
  [[nodiscard]] CVec derivative(cplx zeta) const {
    const cplx xi = automorphism(zeta);
    CVec d = detail::poly_derivative(coeffs, xi) * automorphism_derivative(zeta);
    if (chart == ChartKind::Log) d[0] *= std::exp(raw(xi)[0]);
    return d;
  }
  /// Constant disc at a point.
  static AnalyticDiscParam constant(const DomainModel& m, const Point& z) {
    AnalyticDiscParam p;
    p.chart = m.chart;
    p.coeffs = {m.to_chart(z)};
    return p;
  }
};

namespace detail {

/// Powers xi_j^k of the boundary samples.
struct SampleTable {
  int M = 0, N = 0;
  std::vector<cplx> xi;
  std::vector<std::vector<cplx>> pw;
  SampleTable(int m, int n) : M(m), N(n) {
    xi.resize(static_cast<std::size_t>(M));
    pw.assign(static_cast<std::size_t>(M), std::vector<cplx>(static_cast<std::size_t>(N + 1)));
    for (int j = 0; j < M; ++j) {
      const cplx x = std::polar(1.0, 2.0 * kPi * j / M);
      xi[static_cast<std::size_t>(j)] = x;
      cplx p = 1.0;
      for (int k = 0; k <= N; ++k, p *= x) pw[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] = p;
    }
  }
};

inline void add_complex_grad(opt::Vec& grad, Eigen::Index offset, cplx q, double w) {
  // dG/dRe s = Re q, dG/dIm s = -Im q for q = (dp/ds) conj(gradG).
  grad[offset] += w * q.real();
  grad[offset + 1] -= w * q.imag();
}

}  // namespace detail

/// Lempert model: p(beta) = z, p(gamma) = w with p(xi) = z + (w - z) t(xi) +
/// sum_{k>=2} c_k [xi^k - beta^k - S_k (xi - beta)], t = (xi - beta)/(gamma - beta),
/// S_k = (gamma^k - beta^k)/(gamma - beta). Parameters x = (u, a, theta, c_2..c_N)
/// with beta = tanh u, gamma = (alpha + beta)/(1 + beta alpha), alpha = tanh(a) e^{i theta};
/// the objective k_Delta(beta, gamma) equals a.
class LempertModel : public opt::ConstrainedModel {
 public:
  LempertModel(const DomainModel& dm, CVec z, CVec w, int degree, int samples)
      : dm_(dm), z_(std::move(z)), w_(std::move(w)), n_(z_.size()), N_(degree), table_(samples, degree) {}

  [[nodiscard]] Eigen::Index constraint_count() const override {
    return static_cast<Eigen::Index>(table_.M) * static_cast<Eigen::Index>(dm_.atoms.size());
  }
  [[nodiscard]] Eigen::Index dim() const { return 3 + 2 * static_cast<Eigen::Index>(n_) * (N_ - 1); }
  [[nodiscard]] int degree() const { return N_; }

  struct Geometry {
    double beta;
    cplx alpha, gamma;
  };
  [[nodiscard]] static Geometry geometry(const opt::Vec& x) {
    const double beta = std::tanh(x[0]);
    const cplx alpha = std::tanh(x[1]) * std::polar(1.0, x[2]);
    return {beta, alpha, (alpha + beta) / (1.0 + beta * alpha)};
  }

  double evaluate(const opt::Vec& x, opt::Vec* grad, opt::Vec& g, const opt::Penalty* pen) const override {
    const double a = x[1];
    if (!(a > 1e-12) || a > 30.0 || std::abs(x[0]) > 30.0) return kInf;
    const auto geo = geometry(x);
    const double beta = geo.beta;
    const cplx gamma = geo.gamma, alpha = geo.alpha;
    const cplx gb = gamma - beta;
    if (std::abs(gb) < 1e-300) return kInf;
    const std::size_t N = static_cast<std::size_t>(N_);
    // S_k and its partial derivatives.
    std::vector<cplx> bp(N + 1), gp(N + 1), S(N + 1), dSb(N + 1), dSg(N + 1);
    bp[0] = gp[0] = 1.0;
    for (std::size_t k = 1; k <= N; ++k) {
      bp[k] = bp[k - 1] * beta;
      gp[k] = gp[k - 1] * gamma;
    }
    for (std::size_t k = 2; k <= N; ++k) {
      cplx s = 0.0, db = 0.0, dg = 0.0;
      for (std::size_t j = 0; j < k; ++j) {
        s += gp[j] * bp[k - 1 - j];
        if (k - 1 - j >= 1) db += gp[j] * static_cast<double>(k - 1 - j) * bp[k - 2 - j];
        if (j >= 1) dg += static_cast<double>(j) * gp[j - 1] * bp[k - 1 - j];
      }
      S[k] = s;
      dSb[k] = db;
      dSg[k] = dg;
    }
    const CVec dz = w_ - z_;
    const cplx gb2 = gb * gb;
    const double omb2 = 1.0 - beta * beta;
    const cplx den = 1.0 + beta * alpha;
    const cplx dgam_dalpha = omb2 / (den * den);
    const cplx dgam_dbeta = (1.0 - alpha * alpha) / (den * den);
    const double sech2 = 1.0 - std::tanh(a) * std::tanh(a);
    const cplx dalpha_da = sech2 * std::polar(1.0, x[2]);
    const cplx dalpha_dth = cplx(0.0, 1.0) * alpha;

    if (grad) {
      grad->setZero(dim());
      (*grad)[1] = 1.0;
    }
    const std::size_t A = dm_.atoms.size();
    std::vector<cplx> p(n_), pb(n_), pg(n_), gr(n_), B(N + 1), C((N + 1) * n_);
    for (std::size_t k = 2; k <= N; ++k)
      for (std::size_t i = 0; i < n_; ++i) C[k * n_ + i] = coef(x, k, i);
    const bool want = grad && pen;
    const std::span<cplx> gspan = want ? std::span<cplx>(gr) : std::span<cplx>();
    for (int j = 0; j < table_.M; ++j) {
      const auto& pw = table_.pw[static_cast<std::size_t>(j)];
      const cplx xi = pw[1];
      const cplx xb = xi - beta;
      const cplx t = xb / gb;
      const cplx tb = (xi - gamma) / gb2, tg = -xb / gb2;
      for (std::size_t i = 0; i < n_; ++i) {
        p[i] = z_[i] + dz[i] * t;
        pb[i] = dz[i] * tb;
        pg[i] = dz[i] * tg;
      }
      for (std::size_t k = 2; k <= N; ++k) {
        B[k] = pw[k] - bp[k] - S[k] * xb;
        const cplx cbk = -static_cast<double>(k) * bp[k - 1] - dSb[k] * xb + S[k];
        const cplx cgk = -dSg[k] * xb;
        for (std::size_t i = 0; i < n_; ++i) {
          const cplx c = C[k * n_ + i];
          p[i] += c * B[k];
          pb[i] += c * cbk;
          pg[i] += c * cgk;
        }
      }
      for (std::size_t ai = 0; ai < A; ++ai) {
        const Eigen::Index idx = static_cast<Eigen::Index>(static_cast<std::size_t>(j) * A + ai);
        const double G = dm_.atoms[ai].eval(p, gspan);
        g[idx] = G;
        if (!want) continue;
        const double wgt = pen->weight(idx, G);
        if (wgt == 0.0) continue;
        cplx qb = 0.0, qg = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
          const cplx cg = std::conj(gr[i]);
          qb += pb[i] * cg;
          qg += pg[i] * cg;
        }
        (*grad)[0] += wgt * ((qb + qg * dgam_dbeta) * omb2).real();
        (*grad)[1] += wgt * (qg * dgam_dalpha * dalpha_da).real();
        (*grad)[2] += wgt * (qg * dgam_dalpha * dalpha_dth).real();
        for (std::size_t k = 2; k <= N; ++k)
          for (std::size_t i = 0; i < n_; ++i)
            detail::add_complex_grad(*grad, coef_index(k, i), B[k] * std::conj(gr[i]), wgt);
      }
    }
    return a;
  }

  /// Monomial coefficients of p for parameters x.
  [[nodiscard]] std::vector<CVec> monomials(const opt::Vec& x) const {
    const auto geo = geometry(x);
    const double beta = geo.beta;
    const cplx gb = geo.gamma - beta;
    const std::size_t N = static_cast<std::size_t>(N_);
    std::vector<CVec> a(N + 1, CVec(n_));
    const CVec dz = w_ - z_;
    a[0] = z_ - dz * (beta / gb);
    a[1] = dz / gb;
    cplx bk = beta;
    for (std::size_t k = 2; k <= N; ++k) {
      bk *= beta;
      cplx s = 0.0;
      cplx gj = 1.0;
      for (std::size_t j = 0; j < k; ++j, gj *= geo.gamma) s += gj * std::pow(cplx(beta), static_cast<int>(k - 1 - j));
      for (std::size_t i = 0; i < n_; ++i) {
        const cplx c = coef(x, k, i);
        a[k][i] += c;
        a[0][i] += c * (-bk + s * beta);
        a[1][i] -= c * s;
      }
    }
    return a;
  }

  /// Parameters representing the polynomial a (degree <= N) with nodes beta, gamma
  /// after rotating beta onto the positive real axis. The affine part is re-derived
  /// from the interpolation conditions.
  [[nodiscard]] opt::Vec from_polynomial(std::vector<CVec> a, cplx beta, cplx gamma) const {
    const cplx rot = std::abs(beta) > 0.0 ? beta / std::abs(beta) : cplx(1.0);
    for (std::size_t k = 0; k < a.size(); ++k) a[k] *= std::pow(rot, static_cast<int>(k));
    const double b = std::abs(beta);
    const cplx g = gamma / rot;
    opt::Vec x = opt::Vec::Zero(dim());
    x[0] = std::atanh(std::min(b, 1.0 - 1e-15));
    const cplx alpha = (g - b) / (1.0 - b * g);
    x[1] = std::atanh(std::min(std::abs(alpha), 1.0 - 1e-15));
    x[2] = std::arg(alpha);
    for (std::size_t k = 2; k <= static_cast<std::size_t>(N_) && k < a.size(); ++k)
      for (std::size_t i = 0; i < n_; ++i) {
        (x)[coef_index(k, i)] = a[k][i].real();
        (x)[coef_index(k, i) + 1] = a[k][i].imag();
      }
    return x;
  }

  [[nodiscard]] Eigen::Index coef_index(std::size_t k, std::size_t i) const {
    return 3 + static_cast<Eigen::Index>(2 * ((k - 2) * n_ + i));
  }
  [[nodiscard]] cplx coef(const opt::Vec& x, std::size_t k, std::size_t i) const {
    const auto idx = coef_index(k, i);
    return {x[idx], x[idx + 1]};
  }

 private:
  const DomainModel& dm_;
  CVec z_, w_;
  std::size_t n_;
  int N_;
  detail::SampleTable table_;
};

/// Metric model: p(beta) = z, p'(beta) = s X with p(xi) = z + s X (xi - beta) +
/// sum_{k>=2} c_k [xi^k - beta^k - k beta^{k-1} (xi - beta)]. Parameters
/// x = (u, Re sigma, Im sigma, c_2..c_N), beta = tanh u, s = e^sigma; the objective
/// log of the scale 1/(|s| (1 - beta^2)).
class MetricModel : public opt::ConstrainedModel {
 public:
  MetricModel(const DomainModel& dm, CVec z, CVec X, int degree, int samples)
      : dm_(dm), z_(std::move(z)), X_(std::move(X)), n_(z_.size()), N_(degree), table_(samples, degree) {}

  [[nodiscard]] Eigen::Index constraint_count() const override {
    return static_cast<Eigen::Index>(table_.M) * static_cast<Eigen::Index>(dm_.atoms.size());
  }
  [[nodiscard]] Eigen::Index dim() const { return 3 + 2 * static_cast<Eigen::Index>(n_) * (N_ - 1); }
  [[nodiscard]] int degree() const { return N_; }

  double evaluate(const opt::Vec& x, opt::Vec* grad, opt::Vec& g, const opt::Penalty* pen) const override {
    if (std::abs(x[0]) > 30.0 || std::abs(x[1]) > 60.0) return kInf;
    const double beta = std::tanh(x[0]);
    const cplx sigma(x[1], x[2]);
    const cplx s = std::exp(sigma);
    const std::size_t N = static_cast<std::size_t>(N_);
    std::vector<cplx> bp(N + 1);
    bp[0] = 1.0;
    for (std::size_t k = 1; k <= N; ++k) bp[k] = bp[k - 1] * beta;
    const double omb2 = 1.0 - beta * beta;
    const double f = -x[1] + 2.0 * std::log(std::cosh(x[0]));
    if (grad) {
      grad->setZero(dim());
      (*grad)[0] = 2.0 * beta;
      (*grad)[1] = -1.0;
    }
    const std::size_t A = dm_.atoms.size();
    const CVec sX = X_ * s;
    std::vector<cplx> p(n_), pb(n_), gr(n_), E(N + 1), Eb(N + 1), C((N + 1) * n_);
    for (std::size_t k = 2; k <= N; ++k)
      for (std::size_t i = 0; i < n_; ++i) C[k * n_ + i] = coef(x, k, i);
    const bool want = grad && pen;
    const std::span<cplx> gspan = want ? std::span<cplx>(gr) : std::span<cplx>();
    for (int j = 0; j < table_.M; ++j) {
      const auto& pw = table_.pw[static_cast<std::size_t>(j)];
      const cplx xi = pw[1];
      const cplx xb = xi - beta;
      for (std::size_t i = 0; i < n_; ++i) {
        p[i] = z_[i] + sX[i] * xb;
        pb[i] = -sX[i];
      }
      for (std::size_t k = 2; k <= N; ++k) {
        E[k] = pw[k] - bp[k] - static_cast<double>(k) * bp[k - 1] * xb;
        Eb[k] = -static_cast<double>(k * (k - 1)) * bp[k - 2] * xb;
        for (std::size_t i = 0; i < n_; ++i) {
          const cplx c = C[k * n_ + i];
          p[i] += c * E[k];
          pb[i] += c * Eb[k];
        }
      }
      for (std::size_t ai = 0; ai < A; ++ai) {
        const Eigen::Index idx = static_cast<Eigen::Index>(static_cast<std::size_t>(j) * A + ai);
        const double G = dm_.atoms[ai].eval(p, gspan);
        g[idx] = G;
        if (!want) continue;
        const double wgt = pen->weight(idx, G);
        if (wgt == 0.0) continue;
        cplx qb = 0.0, qs = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
          const cplx cg = std::conj(gr[i]);
          qb += pb[i] * cg;
          qs += sX[i] * xb * cg;
        }
        (*grad)[0] += wgt * (qb * omb2).real();
        detail::add_complex_grad(*grad, 1, qs, wgt);
        for (std::size_t k = 2; k <= N; ++k)
          for (std::size_t i = 0; i < n_; ++i)
            detail::add_complex_grad(*grad, coef_index(k, i), E[k] * std::conj(gr[i]), wgt);
      }
    }
    return f;
  }

  [[nodiscard]] std::vector<CVec> monomials(const opt::Vec& x) const {
    const double beta = std::tanh(x[0]);
    const cplx s = std::exp(cplx(x[1], x[2]));
    const std::size_t N = static_cast<std::size_t>(N_);
    std::vector<CVec> a(N + 1, CVec(n_));
    a[0] = z_ - X_ * (s * beta);
    a[1] = X_ * s;
    for (std::size_t k = 2; k <= N; ++k) {
      const double bk = std::pow(beta, static_cast<double>(k));
      const double bk1 = std::pow(beta, static_cast<double>(k - 1));
      for (std::size_t i = 0; i < n_; ++i) {
        const cplx c = coef(x, k, i);
        a[k][i] += c;
        a[0][i] += c * (static_cast<double>(k - 1) * bk);
        a[1][i] -= c * (static_cast<double>(k) * bk1);
      }
    }
    return a;
  }

  /// Parameters for a polynomial a with p(beta) = z, after rotating beta to the real axis.
  [[nodiscard]] opt::Vec from_polynomial(std::vector<CVec> a, cplx beta) const {
    const cplx rot = std::abs(beta) > 0.0 ? beta / std::abs(beta) : cplx(1.0);
    for (std::size_t k = 0; k < a.size(); ++k) a[k] *= std::pow(rot, static_cast<int>(k));
    const double b = std::abs(beta);
    opt::Vec x = opt::Vec::Zero(dim());
    x[0] = std::atanh(std::min(b, 1.0 - 1e-15));
    const CVec d = detail::poly_derivative(a, b);
    const cplx s = inner(d, X_) / X_.norm2();
    const cplx sigma = std::log(std::abs(s) > 1e-300 ? s : cplx(1e-300));
    x[1] = sigma.real();
    x[2] = sigma.imag();
    for (std::size_t k = 2; k <= static_cast<std::size_t>(N_) && k < a.size(); ++k)
      for (std::size_t i = 0; i < n_; ++i) {
        x[coef_index(k, i)] = a[k][i].real();
        x[coef_index(k, i) + 1] = a[k][i].imag();
      }
    return x;
  }

  [[nodiscard]] Eigen::Index coef_index(std::size_t k, std::size_t i) const {
    return 3 + static_cast<Eigen::Index>(2 * ((k - 2) * n_ + i));
  }
  [[nodiscard]] cplx coef(const opt::Vec& x, std::size_t k, std::size_t i) const {
    const auto idx = coef_index(k, i);
    return {x[idx], x[idx + 1]};
  }

 private:
  const DomainModel& dm_;
  CVec z_, X_;
  std::size_t n_;
  int N_;
  detail::SampleTable table_;
};

}  // namespace invmetric
