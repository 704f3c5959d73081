#pragma once

// Exact invariant distances and metrics on domains where closed forms exist.
// On the convex models c = k = l; on the annulus k = l is computed through the
// universal covering by the strip.

#include "invmetric/domains.hpp"

namespace invmetric {

namespace detail {

inline void require_interior(const DomainGeometry& d, const Point& z) {
  if (!d.contains(z)) throw DomainError("point is not interior to " + std::string(kind_name(d.kind())));
}

/// (1 - |a|^2) for |a| computed once, without cancellation.
inline double one_minus_sq(double r) { return (1.0 - r) * (1.0 + r); }

inline double ball_distance_unit(const CVec& a, const CVec& b) {
  const double na = a.norm(), nb = b.norm();
  const cplx ab = inner(a, b);
  const double den = std::norm(1.0 - ab);
  // |a|^2 |b|^2 - |<a,b>|^2 via Lagrange's identity.
  double cs = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i + 1; j < a.size(); ++j) cs += std::norm(a[i] * b[j] - a[j] * b[i]);
  const double t2 = std::max(0.0, ((a - b).norm2() - cs) / den);
  const double omt2 = one_minus_sq(na) * one_minus_sq(nb) / den;
  return atanh_from(std::min(1.0, std::sqrt(t2)), omt2);
}

inline double annulus_distance(double r, cplx z, cplx w) {
  const double L = -std::log(r);
  const double s = kPi / L;
  const double y1 = s * std::log(std::abs(z) / r);
  const double y2 = s * std::log(std::abs(w) / r);
  // The lifted distance is increasing in the argument gap, so the nearest deck
  // translate is the principal argument difference.
  const double dx = s * std::arg(w / z);
  const double sh = std::sinh(0.5 * dx);
  const double sh2 = sh * sh;
  const double sm = std::sin(0.5 * (y1 - y2));
  const double sp = std::sin(0.5 * (y1 + y2));
  const double den = sh2 + sp * sp;
  const double t = std::sqrt(std::max(0.0, (sh2 + sm * sm) / den));
  const double omt2 = std::sin(y1) * std::sin(y2) / den;
  return atanh_from(std::min(1.0, t), omt2);
}

}  // namespace detail

/// Exact distance c_D = k_D = l_D on disc, ball, polydisc, half-plane; k_D = l_D on the annulus.
inline HyperbolicValue model_distance(const DomainGeometry& d, const Point& z, const Point& w) {
  d.check_point(z);
  d.check_point(w);
  if (!d.has_closed_form()) throw CapabilityError(std::string("no closed form for ") + kind_name(d.kind()));
  detail::require_interior(d, z);
  detail::require_interior(d, w);
  if (z == w) return HyperbolicValue(0.0);
  switch (d.kind()) {
    case DomainKind::UnitDisc: return HyperbolicValue(poincare_distance(z[0], w[0]));
    case DomainKind::Ball: {
      const auto& b = d.as<shape::Ball>();
      return HyperbolicValue(detail::ball_distance_unit((z - b.center) / b.radius, (w - b.center) / b.radius));
    }
    case DomainKind::Polydisc: {
      const auto& p = d.as<shape::Polydisc>();
      double m = 0.0;
      for (std::size_t i = 0; i < z.size(); ++i)
        m = std::max(m, poincare_distance(z[i] / p.radii[i], w[i] / p.radii[i]));
      return HyperbolicValue(m);
    }
    case DomainKind::HalfPlane: {
      const auto& h = d.as<shape::HalfPlane>();
      return HyperbolicValue(
          right_half_plane_distance(h.offset - inner(z, h.normal), h.offset - inner(w, h.normal)));
    }
    case DomainKind::Annulus:
      return HyperbolicValue(detail::annulus_distance(d.as<shape::Annulus>().inner, z[0], w[0]));
    default: break;
  }
  throw CapabilityError(std::string("no closed form for ") + kind_name(d.kind()));
}

/// Exact infinitesimal metric kappa_D = gamma_D (convex models) or kappa_D (annulus).
inline double model_metric(const DomainGeometry& d, const Tangent& t) {
  d.check_point(t.base);
  if (t.direction.size() != d.dimension()) throw InputError("tangent dimension mismatch");
  if (!d.has_closed_form()) throw CapabilityError(std::string("no closed form for ") + kind_name(d.kind()));
  detail::require_interior(d, t.base);
  const Point& z = t.base;
  const CVec& X = t.direction;
  switch (d.kind()) {
    case DomainKind::UnitDisc: return std::abs(X[0]) / detail::one_minus_sq(std::abs(z[0]));
    case DomainKind::Ball: {
      const auto& b = d.as<shape::Ball>();
      const CVec a = (z - b.center) / b.radius;
      const CVec x = X / b.radius;
      const double s2 = detail::one_minus_sq(a.norm());
      return std::sqrt(x.norm2() / s2 + std::norm(inner(x, a)) / (s2 * s2));
    }
    case DomainKind::Polydisc: {
      const auto& p = d.as<shape::Polydisc>();
      double m = 0.0;
      for (std::size_t i = 0; i < z.size(); ++i)
        m = std::max(m, std::abs(X[i]) * p.radii[i] / ((p.radii[i] - std::abs(z[i])) * (p.radii[i] + std::abs(z[i]))));
      return m;
    }
    case DomainKind::HalfPlane: {
      const auto& h = d.as<shape::HalfPlane>();
      return std::abs(inner(X, h.normal)) / (2.0 * (h.offset - inner(z, h.normal).real()));
    }
    case DomainKind::Annulus: {
      const double r = d.as<shape::Annulus>().inner;
      const double L = -std::log(r);
      const double y = kPi * std::log(std::abs(z[0]) / r) / L;
      return kPi * std::abs(X[0]) / (2.0 * L * std::abs(z[0]) * std::sin(y));
    }
    default: break;
  }
  throw CapabilityError(std::string("no closed form for ") + kind_name(d.kind()));
}

/// log(1 + |zeta - eta| / (2 sqrt(delta(zeta) delta(eta)))), a lower bound for k on the unit disc.
inline HyperbolicValue disc_gromov_lower(cplx zeta, cplx eta) {
  const double dz = 1.0 - std::abs(zeta);
  const double de = 1.0 - std::abs(eta);
  if (!(dz > 0.0) || !(de > 0.0)) throw DomainError("point is not interior to the unit disc");
  return HyperbolicValue(std::log1p(std::abs(zeta - eta) / (2.0 * std::sqrt(dz * de))));
}

}  // namespace invmetric
