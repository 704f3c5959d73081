#include <gtest/gtest.h>

#include "invmetric/extremal.hpp"
#include "oracles.hpp"

using namespace invmetric;

namespace {

constexpr double kSound = 1e-12;

std::pair<Point, Point> pair_in(const DomainGeometry& d, Rng& rng, double dmin = 0.05) {
  return {sample_point(d, std::nullopt, dmin, 0.6, rng), sample_point(d, std::nullopt, dmin, 0.6, rng)};
}

double oracle_k(const DomainGeometry& d, const Point& z, const Point& w) {
  switch (d.kind()) {
    case DomainKind::UnitDisc: return oracle::disc_k(z[0], w[0]);
    case DomainKind::Ball: return oracle::ball_k(z, w);
    case DomainKind::Polydisc: return oracle::polydisc_k(z, w, {1.0, 1.0});
    case DomainKind::Annulus: return oracle::annulus_k(0.3, z[0], w[0]);
    default: return NAN;
  }
}

double oracle_kappa(const DomainGeometry& d, const Point& z, const CVec& X) {
  switch (d.kind()) {
    case DomainKind::UnitDisc: return oracle::disc_kappa(z[0], X[0]);
    case DomainKind::Ball: return oracle::ball_kappa(z, X);
    case DomainKind::Polydisc: return oracle::polydisc_kappa(z, X, {1.0, 1.0});
    case DomainKind::Annulus: return oracle::annulus_kappa(0.3, z[0], X[0]);
    default: return NAN;
  }
}

std::vector<DomainGeometry> oracle_domains() {
  return {DomainGeometry::unit_disc(), DomainGeometry::unit_ball(2), DomainGeometry::polydisc({1.0, 1.0}),
          DomainGeometry::annulus(0.3)};
}

}  // namespace

TEST(LempertUpper, Examples) {
  const auto disc = lempert_upper(DomainGeometry::unit_disc(), Point{0.0}, Point{0.5});
  EXPECT_NEAR(disc.value, 0.549306, 1e-3);
  EXPECT_GE(disc.value + kSound, oracle::disc_k(0.0, 0.5));
  EXPECT_EQ(disc.direction, Direction::Upper);
  const auto ball = lempert_upper(DomainGeometry::unit_ball(2), Point{0.0, 0.0}, Point{0.5, 0.0});
  EXPECT_NEAR(ball.value, 0.549306, 1e-3);
  const auto same = lempert_upper(DomainGeometry::unit_ball(2), Point{0.1, 0.2}, Point{0.1, 0.2});
  EXPECT_EQ(same.value, 0.0);
}

TEST(LempertUpper, DiscHitsBothPoints) {
  const auto d = DomainGeometry::ellipsoid({1.0, 2.0});
  const Point z{cplx(0.2, 0.1), cplx(-0.3, 0.0)}, w{cplx(0.1, 0.4), cplx(0.3, -0.2)};
  const auto r = lempert_upper(d, z, w);
  EXPECT_LT((r.disc.at(0.0) - z).norm(), 1e-10);
  EXPECT_LT((r.disc.at(r.disc.alpha) - w).norm(), 1e-10);
  EXPECT_NEAR(r.value, std::atanh(std::abs(r.disc.alpha)), 1e-12);
  for (int j = 0; j < 1024; ++j) EXPECT_TRUE(d.contains(r.disc.at(std::polar(0.999999, 2.0 * kPi * j / 1024.0))));
}

TEST(LempertUpper, Errors) {
  const auto disc = DomainGeometry::unit_disc();
  EXPECT_THROW(lempert_upper(disc, Point{0.0}, Point{1.5}), DomainError);
  EXPECT_THROW(lempert_upper(disc, Point{0.0}, Point{0.99999}), InputError);
  SolverConfig bad;
  bad.degree = 0;
  EXPECT_THROW(lempert_upper(disc, Point{0.0}, Point{0.5}, bad), InputError);
  // Degree 8 polynomials cannot reach across the annulus; failure is reported, not faked.
  EXPECT_THROW(lempert_upper(DomainGeometry::annulus(0.3), Point{-0.6}, Point{0.6}), SolverFailure);
}

TEST(CaratheodoryLower, Examples) {
  const auto disc = caratheodory_lower(DomainGeometry::unit_disc(), Point{0.0}, Point{0.5});
  EXPECT_NEAR(disc.value, oracle::disc_k(0.0, 0.5), 1e-12);
  EXPECT_EQ(disc.direction, Direction::Lower);
  const auto poly = caratheodory_lower(DomainGeometry::polydisc({1.0, 1.0}), Point{0.0, 0.0}, Point{0.3, 0.7});
  EXPECT_GE(poly.value, 0.867301 - 1e-6);
  EXPECT_LE(poly.value, std::atanh(0.7) + kSound);
  const auto ball = caratheodory_lower(DomainGeometry::unit_ball(2), Point{0.0, 0.0}, Point{0.5, 0.0});
  EXPECT_NEAR(ball.value, 0.549306, 1e-6);
  EXPECT_EQ(caratheodory_lower(DomainGeometry::unit_disc(), Point{0.2}, Point{0.2}).value, 0.0);
}

TEST(MetricExamples, KobayashiUpper) {
  const auto disc = DomainGeometry::unit_disc();
  EXPECT_NEAR(kobayashi_metric_upper(disc, Tangent{Point{0.0}, CVec{1.0}}).value, 1.0, 1e-3);
  EXPECT_NEAR(kobayashi_metric_upper(disc, Tangent{Point{0.5}, CVec{1.0}}).value, 1.333333, 2e-3);
  EXPECT_NEAR(kobayashi_metric_upper(DomainGeometry::unit_ball(2), Tangent{Point{0.0, 0.0}, CVec{1.0, 0.0}}).value,
              1.0, 1e-3);
  EXPECT_EQ(kobayashi_metric_upper(disc, Tangent{Point{0.3}, CVec{0.0}}).value, 0.0);
}

TEST(MetricExamples, CaratheodoryLower) {
  EXPECT_NEAR(caratheodory_metric_lower(DomainGeometry::unit_disc(), Tangent{Point{0.0}, CVec{1.0}}).value, 1.0,
              1e-12);
  EXPECT_NEAR(
      caratheodory_metric_lower(DomainGeometry::polydisc({1.0, 1.0}), Tangent{Point{0.0, 0.0}, CVec{0.0, 2.0}}).value,
      2.0, 1e-12);
  EXPECT_EQ(caratheodory_metric_lower(DomainGeometry::unit_disc(), Tangent{Point{0.4}, CVec{0.0}}).value, 0.0);
}

TEST(Soundness, DistancesBracketOracles) {
  Rng rng(11);
  for (const auto& d : oracle_domains()) {
    for (int i = 0; i < 5; ++i) {
      const auto [z, w] = pair_in(d, rng);
      const double k = oracle_k(d, z, w);
      EXPECT_LE(caratheodory_lower(d, z, w).value, k + kSound) << kind_name(d.kind());
      try {
        EXPECT_GE(lempert_upper(d, z, w).value + kSound, k) << kind_name(d.kind());
      } catch (const SolverFailure&) {
        EXPECT_EQ(d.kind(), DomainKind::Annulus);
      }
    }
  }
}

TEST(Soundness, MetricsBracketOracles) {
  Rng rng(12);
  for (const auto& d : oracle_domains()) {
    for (int i = 0; i < 5; ++i) {
      const Point z = sample_point(d, std::nullopt, 0.05, 0.6, rng);
      const CVec X = random_unit(rng, d.dimension()) * uniform(rng, 0.1, 3.0);
      const double kappa = oracle_kappa(d, z, X);
      EXPECT_LE(caratheodory_metric_lower(d, Tangent{z, X}).value, kappa * (1.0 + kSound)) << kind_name(d.kind());
      EXPECT_GE(kobayashi_metric_upper(d, Tangent{z, X}).value * (1.0 + kSound), kappa) << kind_name(d.kind());
    }
  }
}

TEST(Homogeneity, KobayashiMetricScalesExactly) {
  const std::vector<std::pair<DomainGeometry, Tangent>> cases{
      {DomainGeometry::ellipsoid({1.0, 2.0}), Tangent{Point{cplx(0.2, 0.1), cplx(0.3, 0.0)}, CVec{cplx(0.5, 1.0), 0.7}}},
      {DomainGeometry::annulus(0.3), Tangent{Point{cplx(0.5, 0.2)}, CVec{cplx(0.3, -0.8)}}}};
  for (const auto& [d, t] : cases) {
    const double base = kobayashi_metric_upper(d, t).value;
    for (const cplx lambda : {cplx(2.5, 0.0), cplx(0.0, -0.3), cplx(-7.0, 4.0)}) {
      const double v = kobayashi_metric_upper(d, Tangent{t.base, t.direction * lambda}).value;
      EXPECT_NEAR(v, std::abs(lambda) * base, 1e-9 * std::abs(lambda) * base);
    }
  }
}

TEST(Monotonicity, IntersectionIsSmaller) {
  const auto ball = DomainGeometry::unit_ball(2);
  const auto cut = DomainGeometry::intersection(ball, Point{0.2, 0.0}, 0.7);
  Rng rng(5);
  for (int i = 0; i < 4; ++i) {
    const auto [z, w] = pair_in(cut, rng);
    EXPECT_GE(lempert_upper(cut, z, w).value + 1e-6, lempert_upper(ball, z, w).value);
  }
}

TEST(DegreeStability, OracleDomains) {
  SolverConfig hi;
  hi.degree = 16;
  const SolverConfig lo;
  Rng rng(9);
  for (const auto& d : {DomainGeometry::unit_disc(), DomainGeometry::unit_ball(2)}) {
    const auto [z, w] = pair_in(d, rng);
    EXPECT_NEAR(lempert_upper(d, z, w, lo).value, lempert_upper(d, z, w, hi).value, lo.tol) << kind_name(d.kind());
  }
  // Polydisc extremals are not unique; restarts land on a flat valley a few tol apart.
  const auto poly = DomainGeometry::polydisc({1.0, 1.0});
  const auto [z, w] = pair_in(poly, rng);
  EXPECT_NEAR(lempert_upper(poly, z, w, lo).value, lempert_upper(poly, z, w, hi).value, 10.0 * lo.tol);
}

TEST(KobayashiDistanceUpper, Examples) {
  const auto disc = DomainGeometry::unit_disc();
  const auto r = kobayashi_distance_upper(disc, Point{0.0}, Point{0.5});
  EXPECT_NEAR(r.value, 0.549306, 5e-3);
  EXPECT_GE(r.value + r.error_estimate + kSound, oracle::disc_k(0.0, 0.5));
  EXPECT_EQ(kobayashi_distance_upper(disc, Point{0.3}, Point{0.3}).value, 0.0);
}

TEST(KobayashiDistanceUpper, AnnulusChartPath) {
  const auto a = DomainGeometry::annulus(0.3);
  const double k = oracle::annulus_k(0.3, -0.6, 0.6);
  const auto r = kobayashi_distance_upper(a, Point{-0.6}, Point{0.6});
  EXPECT_EQ(r.route, "chart_path");
  EXPECT_GE(r.value + r.error_estimate, k);
  EXPECT_LT(r.value, 1.05 * k);
  for (const auto& p : r.nodes) EXPECT_TRUE(a.contains(p));
}

TEST(KobayashiMetricUpper, AnnulusErrorShrinksWithDegree) {
  const auto a = DomainGeometry::annulus(0.3);
  const Tangent t{Point{cplx(-0.6, 0.05)}, CVec{cplx(0.0, 1.0)}};
  const double kappa = oracle::annulus_kappa(0.3, t.base[0], t.direction[0]);
  double prev = kInf;
  for (const int n : {4, 8, 16}) {
    SolverConfig cfg;
    cfg.degree = n;
    const double err = kobayashi_metric_upper(a, t, cfg).value / kappa - 1.0;
    EXPECT_GE(err, -kSound);
    EXPECT_LT(err, prev);
    prev = err;
  }
  EXPECT_LT(prev, 0.02);
}

TEST(Chain, SampledPairs) {
  SolverConfig cfg;
  cfg.path_nodes = 8;
  Rng rng(21);
  for (const auto& d : {DomainGeometry::unit_disc(), DomainGeometry::unit_ball(2), DomainGeometry::polydisc({1.0, 1.0}),
                        DomainGeometry::ellipsoid({1.0, 2.0}), DomainGeometry::annulus(0.3)}) {
    for (int i = 0; i < 3; ++i) {
      const auto [z, w] = pair_in(d, rng);
      const auto k = kobayashi_distance_upper(d, z, w, cfg);
      const double tol = k.error_estimate + cfg.tol;
      EXPECT_LE(caratheodory_lower(d, z, w, cfg).value, k.value + tol) << kind_name(d.kind());
      if (k.lempert) {
        EXPECT_LE(k.value, k.lempert->value + tol) << kind_name(d.kind());
      }
    }
  }
}

TEST(Sandwich, ConvexWidthAndAnnulusGap) {
  const auto ball = DomainGeometry::unit_ball(2);
  Rng rng(4);
  for (int i = 0; i < 3; ++i) {
    const auto [z, w] = pair_in(ball, rng);
    const auto b = sandwich(ball, z, w);
    EXPECT_LE(b.width(), 1e-2);
    EXPECT_GE(b.width(), -kSound);
  }
  const auto disc = sandwich(DomainGeometry::unit_disc(), Point{0.0}, Point{0.5});
  EXPECT_NEAR(disc.lower, 0.549306, 1e-3);
  EXPECT_NEAR(disc.upper, 0.549306, 1e-3);
  SolverConfig deep;
  deep.degree = 32;
  deep.boundary_samples = 256;
  const auto gap = sandwich(DomainGeometry::annulus(0.3), Point{-0.6}, Point{0.6}, deep);
  EXPECT_GT(gap.width(), 0.5);
}
