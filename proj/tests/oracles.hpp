#pragma once

// Independent reference formulas used only by the tests. Each one takes a
// different computational route from the library implementation.

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "invmetric/core.hpp"

namespace oracle {

using invmetric::cplx;
using invmetric::CVec;

inline double disc_k(cplx z, cplx w) { return std::atanh(std::abs(z - w) / std::abs(1.0 - std::conj(z) * w)); }

/// Ball automorphism exchanging 0 and a, applied to b.
inline CVec ball_automorphism(const CVec& a, const CVec& b) {
  const double a2 = a.norm2();
  const cplx ba = invmetric::inner(b, a);
  CVec pb = a2 > 0.0 ? a * (ba / a2) : CVec(a.size());
  CVec qb = b - pb;
  const double s = std::sqrt(1.0 - a2);
  return (a - pb - qb * s) / (1.0 - ba);
}

inline double ball_k(const CVec& z, const CVec& w) { return std::atanh(ball_automorphism(z, w).norm()); }

inline double polydisc_k(const CVec& z, const CVec& w, const std::vector<double>& r) {
  double m = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) m = std::max(m, disc_k(z[i] / r[i], w[i] / r[i]));
  return m;
}

/// Right half-plane distance through the Cayley map to the disc.
inline double right_half_plane_k(cplx u, cplx v) { return disc_k((u - 1.0) / (u + 1.0), (v - 1.0) / (v + 1.0)); }

/// Annulus distance: minimum over deck translates of upper half-plane distances
/// between exponential lifts.
inline double annulus_k(double r, cplx z, cplx w, int K = 6) {
  const double L = -std::log(r);
  auto lift = [&](cplx p, int k) {
    const cplx logp(std::log(std::abs(p)), std::arg(p) + 2.0 * invmetric::kPi * k);
    const cplx tau = cplx(0.0, invmetric::kPi / L) * (logp - std::log(r));
    return std::exp(tau);
  };
  const cplx a = lift(z, 0);
  double best = 1e300;
  for (int k = -K; k <= K; ++k) {
    const cplx b = lift(w, k);
    best = std::min(best, std::atanh(std::abs(a - b) / std::abs(a - std::conj(b))));
  }
  return best;
}

inline double disc_kappa(cplx z, cplx X) { return std::abs(X) / (1.0 - std::norm(z)); }

/// Ball metric from the Bergman-type quadratic form.
inline double ball_kappa(const CVec& z, const CVec& X) {
  const double s = 1.0 - z.norm2();
  return std::sqrt(X.norm2() / s + std::norm(invmetric::inner(X, z)) / (s * s));
}

inline double polydisc_kappa(const CVec& z, const CVec& X, const std::vector<double>& r) {
  double m = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) m = std::max(m, disc_kappa(z[i] / r[i], X[i] / r[i]));
  return m;
}

/// Annulus metric pulled back from the upper half-plane density 1/(2 Im tau).
inline double annulus_kappa(double r, cplx z, cplx X) {
  const double L = -std::log(r);
  const cplx tau = std::exp(cplx(0.0, invmetric::kPi / L) * (std::log(z) - std::log(r)));
  return std::abs(tau) * (invmetric::kPi / L) * std::abs(X / z) / (2.0 * tau.imag());
}

}  // namespace oracle
