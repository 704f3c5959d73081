#pragma once

// Shared value types, error hierarchy and small numeric helpers.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace invmetric {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed arguments (dimension mismatch, bad parameters).
class InputError : public Error {
 public:
  using Error::Error;
};

/// A point that must be interior is not.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The requested quantity is not available for this domain kind.
class CapabilityError : public Error {
 public:
  using Error::Error;
};

class SolverFailure : public Error {
 public:
  using Error::Error;
};

class SamplingError : public Error {
 public:
  using Error::Error;
};

class TopologyError : public Error {
 public:
  using Error::Error;
};

class SetupError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Complex coordinate vectors
// ---------------------------------------------------------------------------

class CVec {
 public:
  CVec() = default;
  explicit CVec(std::size_t n, cplx fill = 0.0) : c_(n, fill) {}
  CVec(std::initializer_list<cplx> il) : c_(il) {}
  explicit CVec(std::vector<cplx> v) : c_(std::move(v)) {}

  [[nodiscard]] std::size_t size() const { return c_.size(); }
  [[nodiscard]] bool empty() const { return c_.empty(); }
  cplx& operator[](std::size_t i) { return c_[i]; }
  const cplx& operator[](std::size_t i) const { return c_[i]; }
  auto begin() { return c_.begin(); }
  auto end() { return c_.end(); }
  [[nodiscard]] auto begin() const { return c_.begin(); }
  [[nodiscard]] auto end() const { return c_.end(); }
  [[nodiscard]] const std::vector<cplx>& raw() const { return c_; }

  [[nodiscard]] double norm2() const {
    double s = 0.0;
    for (const auto& v : c_) s += std::norm(v);
    return s;
  }
  [[nodiscard]] double norm() const { return std::sqrt(norm2()); }
  [[nodiscard]] bool finite() const {
    return std::all_of(c_.begin(), c_.end(), [](cplx v) {
      return std::isfinite(v.real()) && std::isfinite(v.imag());
    });
  }

  CVec& operator+=(const CVec& o) {
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
  }
  CVec& operator-=(const CVec& o) {
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
  }
  CVec& operator*=(cplx s) {
    for (auto& v : c_) v *= s;
    return *this;
  }
  CVec& operator/=(cplx s) {
    for (auto& v : c_) v /= s;
    return *this;
  }

  friend CVec operator+(CVec a, const CVec& b) { return a += b; }
  friend CVec operator-(CVec a, const CVec& b) { return a -= b; }
  friend CVec operator-(CVec a) { return a *= -1.0; }
  friend CVec operator*(CVec a, cplx s) { return a *= s; }
  friend CVec operator*(cplx s, CVec a) { return a *= s; }
  friend CVec operator/(CVec a, cplx s) { return a /= s; }
  friend bool operator==(const CVec& a, const CVec& b) { return a.c_ == b.c_; }

 private:
  std::vector<cplx> c_;
};

/// Hermitian product, linear in the first argument: sum a_i conj(b_i).
inline cplx inner(const CVec& a, const CVec& b) {
  cplx s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * std::conj(b[i]);
  return s;
}

inline double distance(const CVec& a, const CVec& b) { return (a - b).norm(); }

inline CVec unit(std::size_t n, std::size_t i) {
  CVec e(n);
  e[i] = 1.0;
  return e;
}

/// A point of a domain in C^n.
using Point = CVec;

/// A tangent vector X at a base point z.
struct Tangent {
  Point base;
  CVec direction;
};

// ---------------------------------------------------------------------------
// Hyperbolic scale
// ---------------------------------------------------------------------------

/// A nonnegative distance or metric value in the tanh^{-1} (half-log) scale.
struct HyperbolicValue {
  double value = 0.0;

  constexpr HyperbolicValue() = default;
  constexpr explicit HyperbolicValue(double v) : value(v) {}
  constexpr operator double() const { return value; }  // NOLINT
};

/// tanh^{-1}(t) given t and an accurately computed 1 - t^2.
inline double atanh_from(double t, double one_minus_t2) {
  if (one_minus_t2 <= 0.0) return kInf;
  return std::log1p(t) - 0.5 * std::log(one_minus_t2);
}

/// Hyperbolic distance on the unit disc, stable as points approach the circle.
inline double poincare_distance(cplx a, cplx b) {
  const cplx num = a - b;
  const cplx den = 1.0 - std::conj(a) * b;
  const double aden = std::abs(den);
  if (aden == 0.0) return kInf;
  const double t = std::min(1.0, std::abs(num) / aden);
  const double oma = (1.0 - std::abs(a)) * (1.0 + std::abs(a));
  const double omb = (1.0 - std::abs(b)) * (1.0 + std::abs(b));
  if (oma <= 0.0 || omb <= 0.0) return kInf;
  return atanh_from(t, oma * omb / (aden * aden));
}

/// Poincare distance between points of the right half-plane Re u > 0.
inline double right_half_plane_distance(cplx u, cplx v) {
  const double ru = u.real();
  const double rv = v.real();
  if (ru <= 0.0 || rv <= 0.0) return kInf;
  const cplx den = u + std::conj(v);
  const double aden2 = std::norm(den);
  const double t = std::min(1.0, std::abs(u - v) / std::sqrt(aden2));
  return atanh_from(t, 4.0 * ru * rv / aden2);
}

/// Disc automorphism zeta -> (zeta + a) / (1 + conj(a) zeta), sends 0 to a.
inline cplx mobius(cplx a, cplx zeta) { return (zeta + a) / (1.0 + std::conj(a) * zeta); }

// ---------------------------------------------------------------------------
// Deterministic randomness
// ---------------------------------------------------------------------------

using Rng = std::mt19937_64;

/// Derives an independent stream seed from (seed, index); splitmix64 finalizer.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t x = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// The standard distributions are implementation-defined; these are not, which
// keeps seeded output identical across standard libraries.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }
inline double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }
inline double normal01(Rng& rng) {
  double u1 = uniform01(rng);
  while (u1 <= 0.0) u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

/// Uniformly distributed unit vector in C^n.
inline CVec random_unit(Rng& rng, std::size_t n) {
  CVec v(n);
  double s = 0.0;
  do {
    for (std::size_t i = 0; i < n; ++i) v[i] = cplx(normal01(rng), normal01(rng));
    s = v.norm();
  } while (s < 1e-12);
  return v / s;
}

}  // namespace invmetric
