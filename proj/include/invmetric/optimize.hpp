#pragma once

// Local optimizers: BFGS with Armijo backtracking, Nelder-Mead, and a PHR
// augmented-Lagrangian driver for inequality constraints g_j(x) <= 0.

#include <Eigen/Dense>
#include <functional>

#include "invmetric/core.hpp"

namespace invmetric::opt {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Objective returning f(x) and, when grad != nullptr, its gradient.
using Objective = std::function<double(const Vec& x, Vec* grad)>;

struct BfgsOptions {
  int max_iter = 400;
  double grad_tol = 1e-10;
  double f_tol = 1e-15;
};

struct BfgsResult {
  Vec x;
  double f = kInf;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

inline BfgsResult bfgs(const Objective& f, Vec x, const BfgsOptions& o = {}) {
  BfgsResult r;
  const auto n = x.size();
  Vec g(n);
  double fx = f(x, &g);
  ++r.evaluations;
  if (!std::isfinite(fx)) {
    r.x = x;
    r.f = fx;
    return r;
  }
  Mat H = Mat::Identity(n, n);
  bool scaled = false;
  Vec xn(n), gn(n);
  for (int it = 0; it < o.max_iter; ++it) {
    r.iterations = it + 1;
    if (g.lpNorm<Eigen::Infinity>() <= o.grad_tol * std::max(1.0, std::abs(fx))) {
      r.converged = true;
      break;
    }
    Vec p = -H * g;
    double slope = p.dot(g);
    if (!(slope < 0.0)) {
      H.setIdentity();
      p = -g;
      slope = -g.squaredNorm();
    }
    double step = 1.0;
    double fn = kInf;
    bool ok = false;
    for (int ls = 0; ls < 60; ++ls) {
      xn = x + step * p;
      fn = f(xn, &gn);
      ++r.evaluations;
      if (std::isfinite(fn) && fn <= fx + 1e-4 * step * slope) {
        ok = true;
        break;
      }
      step *= (ls < 2) ? 0.5 : 0.25;
    }
    if (!ok) {
      if (H.isIdentity()) break;
      H.setIdentity();
      continue;
    }
    const Vec s = xn - x;
    const Vec y = gn - g;
    const double sy = s.dot(y);
    const double df = fx - fn;
    x = xn;
    g = gn;
    fx = fn;
    if (sy > 1e-14 * s.norm() * y.norm()) {
      if (!scaled) {
        H *= sy / y.squaredNorm();
        scaled = true;
      }
      const double rho = 1.0 / sy;
      const Vec Hy = H * y;
      H += (rho * rho * y.dot(Hy) + rho) * (s * s.transpose()) - rho * (Hy * s.transpose() + s * Hy.transpose());
    }
    if (df <= o.f_tol * std::max(1.0, std::abs(fx)) && s.lpNorm<Eigen::Infinity>() < 1e-14) {
      r.converged = true;
      break;
    }
  }
  r.x = x;
  r.f = fx;
  return r;
}

struct NelderMeadOptions {
  int max_evals = 2000;
  double x_tol = 1e-10;
  double f_tol = 1e-14;
};

/// Derivative-free minimization of a low-dimensional function.
inline BfgsResult nelder_mead(const std::function<double(const Vec&)>& f, const Vec& x0, double scale,
                              const NelderMeadOptions& o = {}) {
  const auto n = x0.size();
  std::vector<Vec> s(static_cast<std::size_t>(n + 1), x0);
  std::vector<double> fs(static_cast<std::size_t>(n + 1));
  for (Eigen::Index i = 0; i < n; ++i) s[static_cast<std::size_t>(i + 1)][i] += scale;
  int evals = 0;
  auto F = [&](const Vec& x) {
    ++evals;
    const double v = f(x);
    return std::isfinite(v) ? v : kInf;
  };
  for (std::size_t i = 0; i < s.size(); ++i) fs[i] = F(s[i]);
  std::vector<std::size_t> idx(s.size());
  while (evals < o.max_evals) {
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return fs[a] < fs[b]; });
    const std::size_t best = idx.front(), worst = idx.back(), second = idx[idx.size() - 2];
    double spread = 0.0;
    for (const auto& v : s) spread = std::max(spread, (v - s[best]).lpNorm<Eigen::Infinity>());
    if (spread < o.x_tol || (std::isfinite(fs[worst]) && fs[worst] - fs[best] < o.f_tol)) break;
    Vec c = Vec::Zero(n);
    for (std::size_t i = 0; i < s.size(); ++i)
      if (i != worst) c += s[i];
    c /= static_cast<double>(n);
    const Vec xr = c + (c - s[worst]);
    const double fr = F(xr);
    if (fr < fs[best]) {
      const Vec xe = c + 2.0 * (c - s[worst]);
      const double fe = F(xe);
      if (fe < fr) { s[worst] = xe; fs[worst] = fe; } else { s[worst] = xr; fs[worst] = fr; }
    } else if (fr < fs[second]) {
      s[worst] = xr;
      fs[worst] = fr;
    } else {
      const bool outside = fr < fs[worst];
      const Vec xc = outside ? Vec(c + 0.5 * (xr - c)) : Vec(c + 0.5 * (s[worst] - c));
      const double fc = F(xc);
      if (fc < std::min(fr, fs[worst])) {
        s[worst] = xc;
        fs[worst] = fc;
      } else {
        for (std::size_t i = 0; i < s.size(); ++i) {
          if (i == best) continue;
          s[i] = s[best] + 0.5 * (s[i] - s[best]);
          fs[i] = F(s[i]);
        }
      }
    }
  }
  std::size_t b = 0;
  for (std::size_t i = 1; i < s.size(); ++i)
    if (fs[i] < fs[b]) b = i;
  BfgsResult r;
  r.x = s[b];
  r.f = fs[b];
  r.evaluations = evals;
  r.converged = evals < o.max_evals;
  return r;
}

/// Multiplier state of the augmented Lagrangian.
struct Penalty {
  const Vec& lambda;
  double mu;
  [[nodiscard]] double weight(Eigen::Index j, double gj) const { return std::max(0.0, lambda[j] + mu * gj); }
};

/// A constrained model: objective f(x) and constraints g(x) <= 0.
/// evaluate() returns f and fills the constraint values g. When grad is given it
/// receives grad f, plus sum_j pen.weight(j, g_j) * grad g_j when pen is given.
class ConstrainedModel {
 public:
  virtual ~ConstrainedModel() = default;
  [[nodiscard]] virtual Eigen::Index constraint_count() const = 0;
  virtual double evaluate(const Vec& x, Vec* grad, Vec& g, const Penalty* pen) const = 0;
};

struct AlmOptions {
  double mu0 = 1e3;
  double mu_max = 1e10;
  int max_outer = 30;
  double feas_tol = 1e-10;
  double opt_tol = 1e-11;
  BfgsOptions inner{1000, 1e-10, 1e-16};
};

struct AlmResult {
  Vec x;
  double f = kInf;
  double max_violation = kInf;
  int outer = 0;
  int evaluations = 0;
  bool converged = false;
};

inline AlmResult augmented_lagrangian(const ConstrainedModel& m, Vec x, const AlmOptions& o = {}) {
  const Eigen::Index nc = m.constraint_count();
  Vec lambda = Vec::Zero(nc);
  double mu = o.mu0;
  AlmResult r;
  Vec g(nc);
  double prev_viol = kInf, prev_f = kInf;
  Vec gg(nc);
  auto lagrangian = [&](const Vec& xx, Vec* grad) {
    const Penalty pen{lambda, mu};
    const double f = m.evaluate(xx, grad, gg, grad ? &pen : nullptr);
    if (!std::isfinite(f)) return kInf;
    double p = 0.0;
    for (Eigen::Index j = 0; j < nc; ++j) {
      const double t = pen.weight(j, gg[j]);
      p += t * t - lambda[j] * lambda[j];
    }
    return f + p / (2.0 * mu);
  };
  for (int outer = 0; outer < o.max_outer; ++outer) {
    r.outer = outer + 1;
    const auto br = bfgs(lagrangian, x, o.inner);
    r.evaluations += br.evaluations;
    if (std::isfinite(br.f)) x = br.x;
    const double f = m.evaluate(x, nullptr, g, nullptr);
    double viol = 0.0;
    for (Eigen::Index j = 0; j < nc; ++j) {
      viol = std::max(viol, g[j]);
      lambda[j] = std::max(0.0, lambda[j] + mu * g[j]);
    }
    r.f = f;
    r.max_violation = viol;
    if (viol <= o.feas_tol && std::abs(f - prev_f) <= o.opt_tol * std::max(1.0, std::abs(f))) {
      r.converged = true;
      break;
    }
    if (viol > o.feas_tol && viol > 0.25 * prev_viol) mu = std::min(o.mu_max, mu * 10.0);
    prev_viol = viol;
    prev_f = f;
  }
  r.x = x;
  return r;
}

}  // namespace invmetric::opt
