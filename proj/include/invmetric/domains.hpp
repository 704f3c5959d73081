#pragma once

// Model domains in C^n: membership, boundary distance, affine disc radius,
// flatness probes, windows and seeded point sampling.

#include <array>
#include <memory>
#include <optional>
#include <queue>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "invmetric/core.hpp"

namespace invmetric {

enum class DomainKind { UnitDisc, Ball, Polydisc, ComplexEllipsoid, Annulus, HalfPlane, Intersection };

inline const char* kind_name(DomainKind k) {
  switch (k) {
    case DomainKind::UnitDisc: return "UnitDisc";
    case DomainKind::Ball: return "Ball";
    case DomainKind::Polydisc: return "Polydisc";
    case DomainKind::ComplexEllipsoid: return "ComplexEllipsoid";
    case DomainKind::Annulus: return "Annulus";
    case DomainKind::HalfPlane: return "HalfPlane";
    case DomainKind::Intersection: return "Intersection";
  }
  return "?";
}

class DomainGeometry;
using DomainPtr = std::shared_ptr<const DomainGeometry>;

namespace shape {
struct UnitDisc {};
struct Ball {
  Point center;
  double radius = 1.0;
};
struct Polydisc {
  std::vector<double> radii;
};
/// {sum |z_i|^(2 m_i) < 1}.
struct ComplexEllipsoid {
  std::vector<double> exponents;
};
/// {r < |z| < 1}.
struct Annulus {
  double inner = 0.5;
};
/// {Re <z, normal> < offset}; stored with a unit normal.
struct HalfPlane {
  CVec normal;
  double offset = 0.0;
};
/// base ∩ B(center, radius).
struct Intersection {
  DomainPtr base;
  Point center;
  double radius = 1.0;
};
}  // namespace shape

/// Neighbourhoods V ⋐ U of a boundary point, both Euclidean balls.
struct Window {
  Point center;
  double outer = 0.0;
  double inner = 0.0;

  Window() = default;
  Window(Point c, double r_outer, double r_inner) : center(std::move(c)), outer(r_outer), inner(r_inner) {
    if (!(inner > 0.0) || !(inner < outer)) throw InputError("window radii must satisfy 0 < r_V < r_U");
    if (!center.finite()) throw InputError("window center must be finite");
  }
  [[nodiscard]] bool in_inner(const Point& z) const { return distance(z, center) < inner; }
  [[nodiscard]] bool in_outer(const Point& z) const { return distance(z, center) < outer; }
};

namespace detail {

/// Solves sum (t u_i)^(2 m_i) = 1 for t > 0, u_i >= 0 not all zero.
inline double ellipsoid_radial(const std::vector<double>& u, const std::vector<double>& m) {
  double umax = 0.0;
  for (double x : u) umax = std::max(umax, x);
  if (umax <= 0.0) return kInf;
  auto g = [&](double t, double* dg) {
    double s = -1.0, d = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      if (u[i] <= 0.0) continue;
      const double term = std::pow(t * u[i], 2.0 * m[i]);
      s += term;
      d += 2.0 * m[i] * term / t;
    }
    if (dg) *dg = d;
    return s;
  };
  double lo = 0.0, hi = 1.0 / umax;
  double t = hi;
  for (int it = 0; it < 200; ++it) {
    double d = 0.0;
    const double v = g(t, &d);
    if (v > 0.0) hi = t; else lo = t;
    if (std::abs(v) < 1e-15) break;
    double next = (d > 0.0) ? t - v / d : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - t) <= 1e-16 * t) { t = next; break; }
    t = next;
  }
  return t;
}

inline std::vector<double> sphere_from_angles(const std::vector<double>& ang) {
  const std::size_t n = ang.size() + 1;
  std::vector<double> u(n, 1.0);
  double s = 1.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    u[i] = s * std::cos(ang[i]);
    s *= std::sin(ang[i]);
  }
  u[n - 1] = s;
  for (double& x : u) x = std::max(0.0, x);
  return u;
}

/// Euclidean distance from a point with moduli a to the surface sum x_i^(2 m_i) = 1
/// in the closed positive orthant.
inline double ellipsoid_surface_distance(const std::vector<double>& a, const std::vector<double>& m) {
  const std::size_t n = a.size();
  if (n == 1) return std::abs(1.0 - a[0]);
  auto dist_at = [&](const std::vector<double>& ang) {
    const auto u = sphere_from_angles(ang);
    const double t = ellipsoid_radial(u, m);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += (t * u[i] - a[i]) * (t * u[i] - a[i]);
    return std::sqrt(s);
  };
  auto golden = [&](std::vector<double>& ang, std::size_t k, double lo, double hi) {
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    ang[k] = x1;
    double f1 = dist_at(ang);
    ang[k] = x2;
    double f2 = dist_at(ang);
    while (hi - lo > 1e-13) {
      if (f1 < f2) {
        hi = x2; x2 = x1; f2 = f1; x1 = hi - gr * (hi - lo); ang[k] = x1; f1 = dist_at(ang);
      } else {
        lo = x1; x1 = x2; f1 = f2; x2 = lo + gr * (hi - lo); ang[k] = x2; f2 = dist_at(ang);
      }
    }
    ang[k] = 0.5 * (lo + hi);
    return dist_at(ang);
  };
  const double half = 0.5 * kPi;
  std::vector<double> ang(n - 1, 0.25 * kPi);
  const int grid = (n == 2) ? 256 : 32;
  const double step = half / grid;
  if (n == 2) {
    double best = kInf;
    int bi = 0;
    for (int i = 0; i <= grid; ++i) {
      ang[0] = i * step;
      const double d = dist_at(ang);
      if (d < best) { best = d; bi = i; }
    }
    return golden(ang, 0, std::max(0.0, (bi - 1) * step), std::min(half, (bi + 1) * step));
  }
  // Cyclic coordinate search over hyperspherical angles.
  double best = dist_at(ang);
  for (int sweep = 0; sweep < 12; ++sweep) {
    const double prev = best;
    for (std::size_t k = 0; k < n - 1; ++k) {
      double bk = ang[k];
      double bd = best;
      for (int i = 0; i <= grid; ++i) {
        ang[k] = i * step;
        const double d = dist_at(ang);
        if (d < bd) { bd = d; bk = ang[k]; }
      }
      best = golden(ang, k, std::max(0.0, bk - step), std::min(half, bk + step));
    }
    if (prev - best < 1e-14) break;
  }
  return best;
}

}  // namespace detail

/// Immutable description of a model domain.
class DomainGeometry {
 public:
  using Shape = std::variant<shape::UnitDisc, shape::Ball, shape::Polydisc, shape::ComplexEllipsoid,
                             shape::Annulus, shape::HalfPlane, shape::Intersection>;

  static DomainGeometry unit_disc() { return DomainGeometry(shape::UnitDisc{}, 1); }

  static DomainGeometry ball(Point center, double radius) {
    if (center.empty()) throw InputError("ball dimension must be >= 1");
    if (!center.finite()) throw InputError("ball center must be finite");
    if (!(radius > 0.0) || !std::isfinite(radius)) throw InputError("ball radius must be positive");
    const std::size_t n = center.size();
    return DomainGeometry(shape::Ball{std::move(center), radius}, n);
  }
  static DomainGeometry unit_ball(std::size_t n) { return ball(Point(n), 1.0); }

  static DomainGeometry polydisc(std::vector<double> radii) {
    if (radii.empty()) throw InputError("polydisc dimension must be >= 1");
    for (double r : radii)
      if (!(r > 0.0) || !std::isfinite(r)) throw InputError("polydisc radii must be positive");
    const std::size_t n = radii.size();
    return DomainGeometry(shape::Polydisc{std::move(radii)}, n);
  }

  static DomainGeometry ellipsoid(std::vector<double> exponents) {
    if (exponents.empty()) throw InputError("ellipsoid dimension must be >= 1");
    for (double m : exponents)
      if (!(m >= 1.0) || !std::isfinite(m)) throw InputError("ellipsoid exponents must be >= 1");
    const std::size_t n = exponents.size();
    return DomainGeometry(shape::ComplexEllipsoid{std::move(exponents)}, n);
  }

  static DomainGeometry annulus(double inner) {
    if (!(inner > 0.0 && inner < 1.0)) throw InputError("annulus inner radius must lie in (0,1)");
    return DomainGeometry(shape::Annulus{inner}, 1);
  }

  static DomainGeometry half_plane(CVec normal, double offset) {
    if (normal.empty()) throw InputError("half-plane dimension must be >= 1");
    const double nn = normal.norm();
    if (!(nn > 0.0) || !normal.finite() || !std::isfinite(offset)) throw InputError("half-plane normal must be nonzero");
    const std::size_t n = normal.size();
    return DomainGeometry(shape::HalfPlane{normal / nn, offset / nn}, n);
  }

  /// base ∩ B(center, radius); rejects empty or disconnected intersections,
  /// judged by flood fill over a grid with `grid` cells per real side.
  static DomainGeometry intersection(const DomainGeometry& base, Point center, double radius, int grid = 16) {
    if (base.kind() == DomainKind::Intersection) throw InputError("nested intersections are not supported");
    if (center.size() != base.dimension()) throw InputError("window dimension mismatch");
    if (!(radius > 0.0) || !center.finite()) throw InputError("window radius must be positive");
    DomainGeometry d(shape::Intersection{std::make_shared<const DomainGeometry>(base), std::move(center), radius},
                     base.dimension());
    d.check_intersection(grid);
    return d;
  }
  static DomainGeometry intersection(const DomainGeometry& base, const Window& w) {
    return intersection(base, w.center, w.outer);
  }

  [[nodiscard]] DomainKind kind() const { return static_cast<DomainKind>(shape_.index()); }
  [[nodiscard]] std::size_t dimension() const { return n_; }
  [[nodiscard]] const Shape& shape() const { return shape_; }
  template <class T>
  [[nodiscard]] const T& as() const { return std::get<T>(shape_); }

  [[nodiscard]] bool is_convex() const {
    switch (kind()) {
      case DomainKind::Annulus:
      case DomainKind::Intersection: return false;
      default: return true;
    }
  }
  /// Convex as a set, including intersections of a convex base with the window ball.
  [[nodiscard]] bool is_convex_set() const {
    if (kind() == DomainKind::Intersection) return as<shape::Intersection>().base->is_convex();
    return is_convex();
  }
  [[nodiscard]] bool has_closed_form() const {
    switch (kind()) {
      case DomainKind::ComplexEllipsoid:
      case DomainKind::Intersection: return false;
      default: return true;
    }
  }
  [[nodiscard]] bool bounded() const {
    if (kind() == DomainKind::HalfPlane) return false;
    return true;
  }

  void check_point(const Point& z) const {
    if (z.size() != n_) {
      std::ostringstream os;
      os << "dimension mismatch: domain has n=" << n_ << ", point has " << z.size();
      throw InputError(os.str());
    }
    if (!z.finite()) throw InputError("point has non-finite coordinates");
  }

  /// Signed Euclidean distance to the boundary: positive inside, negative outside.
  /// Exact inside; outside it is exact except for Intersection (a lower bound in magnitude).
  [[nodiscard]] double signed_distance(const Point& z) const {
    check_point(z);
    return std::visit([&](const auto& s) { return signed_distance_impl(s, z); }, shape_);
  }

  [[nodiscard]] bool contains(const Point& z) const {
    check_point(z);
    return std::visit([&](const auto& s) { return contains_impl(s, z); }, shape_);
  }

  [[nodiscard]] double boundary_distance(const Point& z) const {
    if (!contains(z)) throw DomainError("point is not interior to " + std::string(kind_name(kind())));
    return std::max(0.0, signed_distance(z));
  }

  /// A deep interior point.
  [[nodiscard]] Point anchor() const {
    switch (kind()) {
      case DomainKind::Ball: return as<shape::Ball>().center;
      case DomainKind::Annulus: return Point{cplx(0.5 * (1.0 + as<shape::Annulus>().inner), 0.0)};
      case DomainKind::HalfPlane: {
        const auto& h = as<shape::HalfPlane>();
        return h.normal * cplx(h.offset - 1.0);
      }
      case DomainKind::Intersection: return anchor_;
      default: return Point(n_);
    }
  }

  /// Radius of a ball about anchor() that contains the domain (infinite if unbounded).
  [[nodiscard]] double extent() const {
    switch (kind()) {
      case DomainKind::UnitDisc: return 1.0;
      case DomainKind::Ball: return as<shape::Ball>().radius;
      case DomainKind::Polydisc: {
        double s = 0.0;
        for (double r : as<shape::Polydisc>().radii) s += r * r;
        return std::sqrt(s);
      }
      case DomainKind::ComplexEllipsoid: return std::sqrt(static_cast<double>(n_));
      case DomainKind::Annulus: return 1.0 + 0.5 * (1.0 + as<shape::Annulus>().inner);
      case DomainKind::HalfPlane: return kInf;
      case DomainKind::Intersection: {
        const auto& s = as<shape::Intersection>();
        return distance(anchor_, s.center) + s.radius;
      }
    }
    return kInf;
  }

  /// Euclidean diameter bound used to scale probes.
  [[nodiscard]] double scale() const { return bounded() ? extent() : 1.0; }

  [[nodiscard]] std::string describe_short() const {
    std::ostringstream os;
    os << kind_name(kind()) << " in C^" << n_;
    return os.str();
  }

 private:
  DomainGeometry(Shape s, std::size_t n) : shape_(std::move(s)), n_(n) {}

  static double signed_distance_impl(const shape::UnitDisc&, const Point& z) { return 1.0 - std::abs(z[0]); }
  static double signed_distance_impl(const shape::Ball& b, const Point& z) {
    return b.radius - distance(z, b.center);
  }
  static double signed_distance_impl(const shape::Polydisc& p, const Point& z) {
    double inside = kInf, out2 = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
      const double g = p.radii[i] - std::abs(z[i]);
      inside = std::min(inside, g);
      if (g < 0.0) out2 += g * g;
    }
    return out2 > 0.0 ? -std::sqrt(out2) : inside;
  }
  static double signed_distance_impl(const shape::ComplexEllipsoid& e, const Point& z) {
    std::vector<double> a(z.size());
    double f = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
      a[i] = std::abs(z[i]);
      f += std::pow(a[i], 2.0 * e.exponents[i]);
    }
    const double d = detail::ellipsoid_surface_distance(a, e.exponents);
    return f < 1.0 ? d : -d;
  }
  static double signed_distance_impl(const shape::Annulus& a, const Point& z) {
    const double r = std::abs(z[0]);
    return std::min(r - a.inner, 1.0 - r);
  }
  static double signed_distance_impl(const shape::HalfPlane& h, const Point& z) {
    return h.offset - inner(z, h.normal).real();
  }
  static double signed_distance_impl(const shape::Intersection& s, const Point& z) {
    return std::min(s.base->signed_distance(z), s.radius - distance(z, s.center));
  }

  static bool contains_impl(const shape::UnitDisc&, const Point& z) { return std::abs(z[0]) < 1.0; }
  static bool contains_impl(const shape::Ball& b, const Point& z) { return (z - b.center).norm2() < b.radius * b.radius; }
  static bool contains_impl(const shape::Polydisc& p, const Point& z) {
    for (std::size_t i = 0; i < z.size(); ++i)
      if (!(std::abs(z[i]) < p.radii[i])) return false;
    return true;
  }
  static bool contains_impl(const shape::ComplexEllipsoid& e, const Point& z) {
    double f = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) f += std::pow(std::abs(z[i]), 2.0 * e.exponents[i]);
    return f < 1.0;
  }
  static bool contains_impl(const shape::Annulus& a, const Point& z) {
    const double r = std::abs(z[0]);
    return r > a.inner && r < 1.0;
  }
  static bool contains_impl(const shape::HalfPlane& h, const Point& z) {
    return inner(z, h.normal).real() < h.offset;
  }
  static bool contains_impl(const shape::Intersection& s, const Point& z) {
    return s.base->contains(z) && (z - s.center).norm2() < s.radius * s.radius;
  }

  void check_intersection(int grid) {
    const auto& s = as<shape::Intersection>();
    const std::size_t dims = 2 * n_;
    int g = std::max(4, grid);
    while (std::pow(static_cast<double>(g), static_cast<double>(dims)) > 1 << 20 && g > 4) --g;
    std::size_t total = 1;
    for (std::size_t d = 0; d < dims; ++d) total *= static_cast<std::size_t>(g);
    const double h = 2.0 * s.radius / g;
    auto cell_point = [&](std::size_t idx) {
      Point z(n_);
      for (std::size_t d = 0; d < dims; ++d) {
        const double x = -s.radius + (static_cast<double>(idx % g) + 0.5) * h;
        idx /= g;
        if (d % 2 == 0) z[d / 2] += cplx(x, 0.0); else z[d / 2] += cplx(0.0, x);
      }
      return z + s.center;
    };
    std::vector<signed char> inside(total, 0);
    double best = -1.0;
    for (std::size_t i = 0; i < total; ++i) {
      const Point z = cell_point(i);
      if (contains(z)) {
        inside[i] = 1;
        const double d = signed_distance(z);
        if (d > best) { best = d; anchor_ = z; }
      }
    }
    if (best < 0.0) throw SetupError("intersection of base and window is empty at grid resolution");
    std::vector<std::size_t> stride(dims, 1);
    for (std::size_t d = 1; d < dims; ++d) stride[d] = stride[d - 1] * g;
    int components = 0;
    std::vector<signed char> seen(total, 0);
    for (std::size_t i = 0; i < total; ++i) {
      if (!inside[i] || seen[i]) continue;
      ++components;
      std::queue<std::size_t> q;
      q.push(i);
      seen[i] = 1;
      while (!q.empty()) {
        const std::size_t c = q.front();
        q.pop();
        for (std::size_t d = 0; d < dims; ++d) {
          const std::size_t coord = (c / stride[d]) % g;
          if (coord > 0 && inside[c - stride[d]] && !seen[c - stride[d]]) { seen[c - stride[d]] = 1; q.push(c - stride[d]); }
          if (coord + 1 < static_cast<std::size_t>(g) && inside[c + stride[d]] && !seen[c + stride[d]]) {
            seen[c + stride[d]] = 1;
            q.push(c + stride[d]);
          }
        }
      }
    }
    if (components > 1) throw SetupError("intersection of base and window is disconnected");
  }

  Shape shape_;
  std::size_t n_ = 1;
  Point anchor_;
};

// ---------------------------------------------------------------------------
// Free-function interface
// ---------------------------------------------------------------------------

inline bool contains(const DomainGeometry& d, const Point& z) { return d.contains(z); }
inline double boundary_distance(const DomainGeometry& d, const Point& z) { return d.boundary_distance(z); }

/// Largest radius of a complex affine disc centered at z inside D.
struct AffineDiscRadius {
  double radius = 0.0;
  /// Angular resolution of the direction search (0 when exact).
  double grid_gap = 0.0;
  bool exact = true;
  CVec direction;
};

namespace detail {

/// Largest rho such that the sampled circle z + rho e^{it} v stays inside D.
/// For convex D this is the affine disc radius in direction v.
inline double disc_radius_along(const DomainGeometry& d, const Point& z, const CVec& v, double lo, int samples) {
  auto fits = [&](double rho) {
    for (int k = 0; k < samples; ++k) {
      const double t = 2.0 * kPi * k / samples;
      if (!d.contains(z + v * (rho * cplx(std::cos(t), std::sin(t))))) return false;
    }
    return true;
  };
  double hi = std::max(2.0 * lo, 1e-3);
  const double cap = 4.0 * d.scale() + 4.0;
  while (fits(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > cap) return kInf;
  }
  for (int it = 0; it < 48 && hi - lo > 1e-13 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (fits(mid)) lo = mid; else hi = mid;
  }
  return lo;
}

}  // namespace detail

inline AffineDiscRadius affine_disc_radius(const DomainGeometry& d, const Point& z, int directions = 256) {
  const double delta = d.boundary_distance(z);
  const std::size_t n = d.dimension();
  AffineDiscRadius out;
  out.direction = unit(n, 0);
  if (n == 1) {
    out.radius = delta;
    return out;
  }
  switch (d.kind()) {
    case DomainKind::Ball: {
      const auto& b = d.as<shape::Ball>();
      const CVec a = z - b.center;
      out.radius = std::sqrt(std::max(0.0, (b.radius - a.norm()) * (b.radius + a.norm())));
      // Any unit vector complex-orthogonal to z - c.
      CVec v = unit(n, 0);
      if (a.norm() > 0.0) {
        std::size_t j = 0;
        for (std::size_t i = 1; i < n; ++i)
          if (std::abs(a[i]) < std::abs(a[j])) j = i;
        v = unit(n, j) - a * (std::conj(a[j]) / a.norm2());
        v /= v.norm();
      }
      out.direction = v;
      return out;
    }
    case DomainKind::Polydisc: {
      const auto& p = d.as<shape::Polydisc>();
      double s = 0.0;
      CVec v(n);
      for (std::size_t i = 0; i < n; ++i) {
        const double gap = p.radii[i] - std::abs(z[i]);
        s += gap * gap;
        v[i] = gap;
      }
      out.radius = std::sqrt(s);
      out.direction = v / v.norm();
      return out;
    }
    case DomainKind::HalfPlane: {
      const auto& h = d.as<shape::HalfPlane>();
      std::size_t j = 0;
      for (std::size_t i = 1; i < n; ++i)
        if (std::abs(h.normal[i]) < std::abs(h.normal[j])) j = i;
      CVec v = unit(n, j) - h.normal * std::conj(h.normal[j]);
      out.radius = kInf;
      out.direction = v / v.norm();
      return out;
    }
    default: break;
  }
  // Convex numeric kinds: direction grid plus pattern refinement.
  out.exact = false;
  const int circle = 64;
  auto eval = [&](const CVec& v) { return detail::disc_radius_along(d, z, v, delta, circle); };
  double best = delta;
  CVec best_v = unit(n, 0);
  std::vector<double> best_ang;
  auto dir_from = [&](const std::vector<double>& ang) {
    // ang = (a_1..a_{n-1}, b_1..b_{n-1}): moduli from sphere angles, phases b.
    std::vector<double> mod_ang(ang.begin(), ang.begin() + static_cast<long>(n - 1));
    for (double& a : mod_ang) a = std::clamp(a, 0.0, 0.5 * kPi);  // keeps v a unit vector
    const auto m = detail::sphere_from_angles(mod_ang);
    CVec v(n);
    v[0] = m[0];
    for (std::size_t i = 1; i < n; ++i) v[i] = m[i] * std::polar(1.0, ang[n - 1 + i - 1]);
    return v;
  };
  const int per = std::max(2, static_cast<int>(std::lround(std::sqrt(static_cast<double>(directions)))));
  double gap = 0.5 * kPi / per;
  if (n == 2) {
    for (int i = 0; i <= per; ++i)
      for (int j = 0; j < per; ++j) {
        std::vector<double> ang{0.5 * kPi * i / per, 2.0 * kPi * j / per};
        const double r = eval(dir_from(ang));
        if (r > best) { best = r; best_ang = ang; }
      }
  } else {
    Rng rng(derive_seed(0x5eed, n));
    for (int k = 0; k < directions * static_cast<int>(n - 1); ++k) {
      std::vector<double> ang(2 * (n - 1));
      for (std::size_t i = 0; i < n - 1; ++i) {
        ang[i] = uniform(rng, 0.0, 0.5 * kPi);
        ang[n - 1 + i] = uniform(rng, 0.0, 2.0 * kPi);
      }
      const double r = eval(dir_from(ang));
      if (r > best) { best = r; best_ang = ang; }
    }
    gap = 0.5 * kPi / std::pow(static_cast<double>(directions), 1.0 / (2.0 * (n - 1)));
  }
  if (!best_ang.empty() && std::isfinite(best)) {
    double step = gap;
    while (step > 1e-4) {
      bool improved = false;
      for (std::size_t k = 0; k < best_ang.size(); ++k)
        for (double sgn : {1.0, -1.0}) {
          auto ang = best_ang;
          ang[k] += sgn * step;
          const double r = eval(dir_from(ang));
          if (r > best) { best = r; best_ang = ang; improved = true; }
        }
      if (!improved) step *= 0.5;
    }
    best_v = dir_from(best_ang);
    gap = step;
  }
  out.radius = best;
  out.grid_gap = gap;
  out.direction = best_v;
  return out;
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

struct SamplingOptions {
  /// Points must lie within this distance of p (when p is given); <= 0 means no limit.
  double within = 0.0;
  /// Spread of the aiming offset around p.
  double aim_spread = 0.25;
  int max_retries = 2000;
};

namespace detail {

inline constexpr double kBoundaryReject = 1e-10;

/// Walks from the anchor along direction u; returns the point nearest the first exit
/// with boundary distance equal to target, if any.
inline std::optional<Point> point_on_ray(const DomainGeometry& d, const Point& a, const CVec& u, double target) {
  const double cap = 2.0 * d.extent() + 2.0;
  double step = std::max(1e-3, std::min(0.5, cap / 64.0));
  double t_in = 0.0, t_out = -1.0;
  for (double t = step; t <= cap + step; t += step) {
    if (!d.contains(a + u * t)) { t_out = t; break; }
    t_in = t;
  }
  if (t_out < 0.0) return std::nullopt;
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (t_in + t_out);
    if (d.contains(a + u * mid)) t_in = mid; else t_out = mid;
  }
  // Scan back from the exit for the last crossing of the target level.
  const int scan = 256;
  double prev_t = t_in;
  bool found = false;
  double hi_t = t_in, lo_t = 0.0;
  for (int k = 1; k <= scan; ++k) {
    const double t = t_in * (1.0 - static_cast<double>(k) / scan);
    if (d.signed_distance(a + u * t) >= target) {
      lo_t = t;
      hi_t = prev_t;
      found = true;
      break;
    }
    prev_t = t;
  }
  if (!found) return std::nullopt;
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo_t + hi_t);
    if (d.signed_distance(a + u * mid) >= target) lo_t = mid; else hi_t = mid;
  }
  return a + u * lo_t;
}

}  // namespace detail

/// One interior point with boundary distance in [dmin, dmax], optionally near p.
inline Point sample_point(const DomainGeometry& d, const std::optional<Point>& p, double dmin, double dmax, Rng& rng,
                          const SamplingOptions& opt = {}) {
  if (!(dmin > 0.0) || !(dmax >= dmin)) throw InputError("sampling requires 0 < delta_min <= delta_max");
  if (p) d.check_point(*p);
  const std::size_t n = d.dimension();
  auto accept = [&](const Point& z) {
    if (!d.contains(z)) return false;
    const double dz = d.signed_distance(z);
    if (dz < detail::kBoundaryReject) return false;
    if (dz < dmin * (1.0 - 1e-9) || dz > dmax * (1.0 + 1e-9)) return false;
    if (p && opt.within > 0.0 && distance(z, *p) >= opt.within) return false;
    return true;
  };
  for (int attempt = 0; attempt < opt.max_retries; ++attempt) {
    const double target = (dmax > dmin) ? std::exp(uniform(rng, std::log(dmin), std::log(dmax))) : dmin;
    std::optional<Point> z;
    switch (d.kind()) {
      case DomainKind::UnitDisc:
      case DomainKind::Annulus: {
        const double inner_r = d.kind() == DomainKind::Annulus ? d.as<shape::Annulus>().inner : 0.0;
        double theta = uniform(rng, 0.0, 2.0 * kPi);
        bool outer = true;
        if (p) {
          const double pr = std::abs((*p)[0]);
          theta = std::arg((*p)[0]) + opt.aim_spread * normal01(rng);
          outer = d.kind() == DomainKind::UnitDisc || std::abs(pr - 1.0) <= std::abs(pr - inner_r);
        } else if (d.kind() == DomainKind::Annulus) {
          outer = uniform01(rng) < 0.5;
        }
        const double r = outer ? 1.0 - target : inner_r + target;
        z = Point{std::polar(r, theta)};
        break;
      }
      case DomainKind::HalfPlane: {
        const auto& h = d.as<shape::HalfPlane>();
        CVec base = p ? *p : h.normal * cplx(h.offset);
        CVec off = random_unit(rng, n) * (opt.aim_spread * std::abs(normal01(rng)));
        off -= h.normal * inner(off, h.normal);
        const double along = inner(base + off, h.normal).real();
        z = base + off + h.normal * cplx(h.offset - along - target);
        break;
      }
      default: {
        const Point a = d.anchor();
        CVec u = random_unit(rng, n);
        if (p) {
          CVec aim = *p + random_unit(rng, n) * (opt.aim_spread * std::abs(normal01(rng))) - a;
          if (aim.norm() > 1e-12) u = aim / aim.norm();
        }
        if (d.signed_distance(a) >= target) z = detail::point_on_ray(d, a, u, target);
        break;
      }
    }
    if (z && accept(*z)) return *z;
  }
  throw SamplingError("could not sample a point with boundary distance in [" + std::to_string(dmin) + ", " +
                      std::to_string(dmax) + "]");
}

/// Two distinct interior points with boundary distances in [dmin, dmax], concentrated near p.
/// dmin == dmax yields exact-shell points.
inline std::pair<Point, Point> sample_pair_near(const DomainGeometry& d, const std::optional<Point>& p, double dmin,
                                                double dmax, std::uint64_t seed, const SamplingOptions& opt = {}) {
  Rng rng(seed);
  const Point z = sample_point(d, p, dmin, dmax, rng, opt);
  for (int attempt = 0; attempt < 64; ++attempt) {
    Point w = sample_point(d, p, dmin, dmax, rng, opt);
    if (distance(z, w) > 1e-9) return {z, w};
  }
  throw SamplingError("could not sample two distinct points");
}

// ---------------------------------------------------------------------------
// Flatness probes
// ---------------------------------------------------------------------------

struct MConvexitySample {
  double delta = 0.0;
  double ratio = 0.0;  // affine disc radius / delta^{1/m}
  Point z;
};

struct MConvexityReport {
  double max_ratio = 0.0;
  Point worst_point;
  double worst_delta = 0.0;
  /// Largest ratios over the nearest and farthest thirds of the samples (by delta).
  double near_ratio = 0.0;
  double far_ratio = 0.0;
  /// Ratio grows by more than a factor 2 from the far third to the near third.
  bool divergent = false;
  int samples = 0;
  std::vector<MConvexitySample> rows;  // sorted by delta
};

inline MConvexityReport m_convexity_probe(const DomainGeometry& d, double m, int samples, std::uint64_t seed,
                                          double threshold = 0.1) {
  if (!d.is_convex()) throw CapabilityError("m-convexity probe requires a convex domain");
  if (!(m > 0.0)) throw InputError("m must be positive");
  if (samples < 3) throw InputError("m-convexity probe needs at least 3 samples");
  const double lo = threshold * 1e-3;
  using Row = MConvexitySample;
  std::vector<Row> rows;
  rows.reserve(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
    // Stratify delta over the log range so both ends are represented.
    const double f = (i + uniform01(rng)) / samples;
    const double target = lo * std::pow(threshold / lo, f);
    const Point z = sample_point(d, std::nullopt, target, target, rng);
    const double delta = d.boundary_distance(z);
    const double r = affine_disc_radius(d, z).radius / std::pow(delta, 1.0 / m);
    rows.push_back({delta, r, z});
  }
  MConvexityReport out;
  out.samples = samples;
  for (const auto& r : rows)
    if (r.ratio > out.max_ratio || out.worst_point.empty()) {
      out.max_ratio = r.ratio;
      out.worst_point = r.z;
      out.worst_delta = r.delta;
    }
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.delta < b.delta; });
  const std::size_t third = std::max<std::size_t>(1, rows.size() / 3);
  for (std::size_t i = 0; i < third; ++i) {
    out.near_ratio = std::max(out.near_ratio, rows[i].ratio);
    out.far_ratio = std::max(out.far_ratio, rows[rows.size() - 1 - i].ratio);
  }
  out.divergent = !std::isfinite(out.near_ratio) || out.near_ratio > 2.0 * out.far_ratio;
  out.rows = std::move(rows);
  return out;
}

/// A complex affine disc zeta -> center + zeta * radius * direction, |zeta| < 1.
struct AffineDisc {
  Point center;
  CVec direction;
  double radius = 0.0;
  [[nodiscard]] Point at(cplx zeta) const { return center + direction * (zeta * radius); }
};

struct DiscFreeVerdict {
  bool disc_found = false;
  std::optional<AffineDisc> witness;
  int chords_checked = 0;
  /// Smallest boundary distance of a sampled chord midpoint (NoDiscFound evidence).
  double min_midpoint_gap = kInf;
};

namespace detail {

/// Point of the boundary of a bounded domain on the ray from the anchor in direction u.
inline std::optional<Point> boundary_on_ray(const DomainGeometry& d, const CVec& u) {
  const Point a = d.anchor();
  const double cap = 2.0 * d.extent() + 2.0;
  double lo = 0.0, hi = cap;
  if (d.contains(a + u * hi)) return std::nullopt;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (d.contains(a + u * mid)) lo = mid; else hi = mid;
  }
  return a + u * (0.5 * (lo + hi));
}

inline DiscFreeVerdict chord_check(const DomainGeometry& d, int samples, std::uint64_t seed) {
  DiscFreeVerdict v;
  Rng rng(seed);
  const std::size_t n = d.dimension();
  for (int i = 0; i < samples; ++i) {
    const CVec u1 = random_unit(rng, n);
    CVec u2 = u1 + random_unit(rng, n) * uniform(rng, 1e-3, 1.0);
    u2 /= u2.norm();
    const auto p = boundary_on_ray(d, u1);
    const auto q = boundary_on_ray(d, u2);
    if (!p || !q) continue;
    const Point mid = (*p + *q) * 0.5;
    v.min_midpoint_gap = std::min(v.min_midpoint_gap, d.signed_distance(mid) / std::max(1e-300, distance(*p, *q)));
    ++v.chords_checked;
  }
  return v;
}

}  // namespace detail

/// Searches the boundary for a nonconstant complex affine disc of the given radius.
inline DiscFreeVerdict disc_free_certificate(const DomainGeometry& d, int samples, double radius, std::uint64_t seed) {
  const std::size_t n = d.dimension();
  DiscFreeVerdict out;
  switch (d.kind()) {
    case DomainKind::Polydisc: {
      if (n < 2) break;
      const auto& p = d.as<shape::Polydisc>();
      Point c(n);
      c[0] = p.radii[0];
      out.disc_found = true;
      out.witness = AffineDisc{c, unit(n, 1), std::min(radius, p.radii[1])};
      return out;
    }
    case DomainKind::HalfPlane: {
      if (n < 2) break;
      const auto& h = d.as<shape::HalfPlane>();
      std::size_t j = 0;
      for (std::size_t i = 1; i < n; ++i)
        if (std::abs(h.normal[i]) < std::abs(h.normal[j])) j = i;
      CVec v = unit(n, j) - h.normal * std::conj(h.normal[j]);
      out.disc_found = true;
      out.witness = AffineDisc{h.normal * cplx(h.offset), v / v.norm(), radius};
      return out;
    }
    case DomainKind::Ball:
    case DomainKind::ComplexEllipsoid:
      if (n < 2) break;
      return detail::chord_check(d, samples, seed);
    case DomainKind::Intersection: {
      const auto& s = d.as<shape::Intersection>();
      const auto base_v = disc_free_certificate(*s.base, samples, radius, seed);
      if (!base_v.disc_found) {
        if (n >= 2) return detail::chord_check(d, samples, seed);
        break;
      }
      // Shrink the base face disc until it fits in the closed window, after moving
      // its center to the face point nearest the window center.
      AffineDisc w = *base_v.witness;
      const CVec dir = w.direction;
      CVec shift = s.center - w.center;
      shift = dir * inner(shift, dir);
      if (s.base->kind() == DomainKind::Polydisc) {
        const auto& p = s.base->as<shape::Polydisc>();
        Point c = s.center;
        // Face |z_0| = r_0 through the point nearest the window center.
        c[0] = std::abs(c[0]) > 0.0 ? c[0] / std::abs(c[0]) * p.radii[0] : cplx(p.radii[0]);
        for (std::size_t i = 1; i < n; ++i)
          if (std::abs(c[i]) >= p.radii[i]) c[i] *= 0.5 * p.radii[i] / std::abs(c[i]);
        double room = p.radii[1] - std::abs(c[1]);
        w.center = c;
        w.radius = std::min(radius, room);
      } else {
        w.center = w.center + shift;
      }
      const double gap = s.radius - distance(w.center, s.center);
      if (gap <= 0.0) break;
      w.radius = std::min(w.radius, gap);
      out.disc_found = w.radius > 0.0;
      if (out.disc_found) out.witness = w;
      return out;
    }
    default: break;
  }
  return out;
}

namespace detail {

/// Complex normal direction at a boundary point; throws at non-smooth points.
inline CVec complex_normal(const DomainGeometry& d, const Point& p, double tol) {
  const std::size_t n = d.dimension();
  switch (d.kind()) {
    case DomainKind::Ball: return (p - d.as<shape::Ball>().center) / distance(p, d.as<shape::Ball>().center);
    case DomainKind::HalfPlane: return d.as<shape::HalfPlane>().normal;
    case DomainKind::Polydisc: {
      const auto& pd = d.as<shape::Polydisc>();
      int hits = 0;
      CVec nv(n);
      for (std::size_t i = 0; i < n; ++i)
        if (std::abs(std::abs(p[i]) - pd.radii[i]) <= tol) {
          ++hits;
          nv = unit(n, i) * (p[i] / std::abs(p[i]));
        }
      if (hits != 1) throw InputError("polydisc boundary point is not a smooth point");
      return nv;
    }
    case DomainKind::ComplexEllipsoid: {
      const auto& e = d.as<shape::ComplexEllipsoid>();
      CVec nv(n);
      for (std::size_t i = 0; i < n; ++i)
        nv[i] = e.exponents[i] * std::pow(std::abs(p[i]), 2.0 * e.exponents[i] - 2.0) * p[i];
      return nv / nv.norm();
    }
    case DomainKind::Intersection: {
      const auto& s = d.as<shape::Intersection>();
      const bool on_base = std::abs(s.base->signed_distance(p)) <= tol;
      const bool on_window = std::abs(s.radius - distance(p, s.center)) <= tol;
      if (on_base && on_window) throw InputError("intersection boundary point lies on the edge");
      if (on_base) return complex_normal(*s.base, p, tol);
      return (p - s.center) / distance(p, s.center);
    }
    default: break;
  }
  return unit(n, 0);
}

}  // namespace detail

/// True iff no sampled boundary point other than p lies in the complex tangent space at p.
inline bool strict_c_convexity_probe(const DomainGeometry& d, const Point& p, int samples, double tolerance = 1e-9,
                                     std::uint64_t seed = 0) {
  d.check_point(p);
  const double tol = std::max(tolerance, 1e-12);
  if (std::abs(d.signed_distance(p)) > std::max(tol, 1e-8)) throw InputError("p is not a boundary point");
  const std::size_t n = d.dimension();
  if (n == 1) return true;
  const CVec nv = detail::complex_normal(d, p, std::max(tol, 1e-8));
  Rng rng(seed);
  const double top = d.scale();
  for (int i = 0; i < samples; ++i) {
    CVec v = random_unit(rng, n);
    v -= nv * inner(v, nv);
    if (v.norm() < 1e-9) continue;
    v /= v.norm();
    const double s = 1e-3 * top * std::pow(1e3, static_cast<double>(i % 16) / 15.0) * uniform(rng, 0.5, 1.0);
    const Point q = p + v * s;
    if (std::abs(d.signed_distance(q)) <= tol) return false;
  }
  return true;
}

}  // namespace invmetric
