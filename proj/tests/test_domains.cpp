#include <gtest/gtest.h>

#include "invmetric/domains.hpp"

using namespace invmetric;

namespace {

std::vector<DomainGeometry> model_domains() {
  return {DomainGeometry::unit_disc(),
          DomainGeometry::unit_ball(2),
          DomainGeometry::ball(Point{cplx(0.2, -0.1), cplx(0.0, 0.3)}, 1.5),
          DomainGeometry::polydisc({1.0, 0.5}),
          DomainGeometry::ellipsoid({1.0, 2.0}),
          DomainGeometry::annulus(0.3),
          DomainGeometry::half_plane(CVec{cplx(1.0, 0.0), cplx(0.0, 1.0)}, 0.5),
          DomainGeometry::intersection(DomainGeometry::unit_ball(2), Point{1.0, 0.0}, 0.5)};
}

}  // namespace

TEST(Contains, Examples) {
  EXPECT_TRUE(contains(DomainGeometry::unit_disc(), Point{0.0}));
  EXPECT_FALSE(contains(DomainGeometry::unit_disc(), Point{1.0}));
  EXPECT_TRUE(contains(DomainGeometry::polydisc({1.0, 1.0}), Point{0.5, 0.999}));
}

TEST(Contains, DimensionMismatchIsInputError) {
  EXPECT_THROW(contains(DomainGeometry::unit_ball(2), Point{0.0}), InputError);
  EXPECT_THROW(contains(DomainGeometry::unit_disc(), Point{0.0, 0.0}), InputError);
}

TEST(Construction, RejectsBadParameters) {
  EXPECT_THROW(DomainGeometry::annulus(1.0), InputError);
  EXPECT_THROW(DomainGeometry::annulus(0.0), InputError);
  EXPECT_THROW(DomainGeometry::polydisc({1.0, -1.0}), InputError);
  EXPECT_THROW(DomainGeometry::ellipsoid({0.5}), InputError);
  EXPECT_THROW(DomainGeometry::ball(Point{0.0}, 0.0), InputError);
  EXPECT_THROW(Window(Point{1.0}, 0.2, 0.3), InputError);
  EXPECT_THROW(DomainGeometry::intersection(DomainGeometry::unit_disc(), Point{3.0}, 0.5), SetupError);
}

TEST(Construction, ConvexityFlags) {
  EXPECT_TRUE(DomainGeometry::unit_disc().is_convex());
  EXPECT_TRUE(DomainGeometry::ellipsoid({1.0, 2.0}).is_convex());
  EXPECT_TRUE(DomainGeometry::half_plane(CVec{1.0}, 0.0).is_convex());
  EXPECT_FALSE(DomainGeometry::annulus(0.3).is_convex());
  EXPECT_FALSE(DomainGeometry::ellipsoid({1.0, 2.0}).has_closed_form());
  EXPECT_TRUE(DomainGeometry::annulus(0.3).has_closed_form());
}

TEST(BoundaryDistance, Examples) {
  EXPECT_NEAR(boundary_distance(DomainGeometry::unit_disc(), Point{0.9}), 0.1, 1e-15);
  EXPECT_NEAR(boundary_distance(DomainGeometry::unit_ball(2), Point{0.6, 0.0}), 0.4, 1e-15);
  EXPECT_NEAR(boundary_distance(DomainGeometry::annulus(0.3), Point{0.5}), 0.2, 1e-15);
}

TEST(BoundaryDistance, OutsideIsDomainError) {
  EXPECT_THROW(boundary_distance(DomainGeometry::unit_disc(), Point{1.0}), DomainError);
  EXPECT_THROW(boundary_distance(DomainGeometry::annulus(0.3), Point{0.1}), DomainError);
}

TEST(BoundaryDistance, EllipsoidMatchesBruteForceSurfaceSearch) {
  const auto d = DomainGeometry::ellipsoid({1.0, 2.0});
  Rng rng(11);
  for (int i = 0; i < 40; ++i) {
    const Point z = sample_point(d, std::nullopt, 0.01, 0.5, rng);
    // Brute force over the boundary surface |z1|^2 + |z2|^4 = 1 parameterised by
    // s = |z2| in [0,1] and aligned arguments.
    const double a1 = std::abs(z[0]), a2 = std::abs(z[1]);
    double best = 1e300;
    const int N = 200000;
    for (int k = 0; k <= N; ++k) {
      const double s = static_cast<double>(k) / N;
      const double x = std::sqrt(std::max(0.0, 1.0 - s * s * s * s));
      best = std::min(best, std::hypot(x - a1, s - a2));
    }
    EXPECT_NEAR(d.boundary_distance(z), best, 1e-8) << i;
    EXPECT_LE(d.boundary_distance(z), best + 1e-12);
  }
}

TEST(BoundaryDistance, EllipsoidUnitExponentsIsBall) {
  const auto e = DomainGeometry::ellipsoid({1.0, 1.0});
  const auto b = DomainGeometry::unit_ball(2);
  Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    const Point z = sample_point(b, std::nullopt, 1e-3, 0.9, rng);
    EXPECT_NEAR(e.boundary_distance(z), b.boundary_distance(z), 1e-12);
  }
}

TEST(BoundaryDistance, PositiveExactlyInsideAndVanishesRadially) {
  for (const auto& d : model_domains()) {
    Rng rng(derive_seed(7, static_cast<std::uint64_t>(d.kind())));
    for (int i = 0; i < 50; ++i) {
      const Point z = sample_point(d, std::nullopt, 1e-6, 0.3, rng);
      EXPECT_TRUE(d.contains(z));
      EXPECT_GT(d.boundary_distance(z), 0.0);
    }
    if (!d.bounded()) continue;
    // Radial sequence from the anchor to the boundary.
    const Point a = d.anchor();
    const CVec u = random_unit(rng, d.dimension());
    double lo = 0.0, hi = 2.0 * d.extent() + 2.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (d.contains(a + u * mid)) lo = mid; else hi = mid;
    }
    double prev = kInf;
    for (int j = 1; j <= 30; ++j) {
      const Point z = a + u * (lo * (1.0 - std::ldexp(1.0, -j)));
      if (!d.contains(z)) break;
      const double dz = d.boundary_distance(z);
      if (j > 10) {
        EXPECT_LT(dz, prev * 0.75) << d.describe_short();
      }
      prev = dz;
    }
    EXPECT_LT(prev, 1e-6) << d.describe_short();
  }
}

TEST(BoundaryDistance, IntersectionIsMinOfParts) {
  const auto base = DomainGeometry::polydisc({1.0, 1.0});
  const auto d = DomainGeometry::intersection(base, Point{1.0, 0.3}, 0.6);
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    const Point z = sample_point(d, std::nullopt, 1e-4, 0.3, rng);
    const auto& s = d.as<shape::Intersection>();
    EXPECT_DOUBLE_EQ(d.boundary_distance(z), std::min(base.boundary_distance(z), s.radius - distance(z, s.center)));
  }
}

TEST(AffineDiscRadius, Examples) {
  EXPECT_NEAR(affine_disc_radius(DomainGeometry::unit_ball(2), Point{0.0, 0.0}).radius, 1.0, 1e-15);
  EXPECT_NEAR(affine_disc_radius(DomainGeometry::unit_disc(), Point{0.5}).radius, 0.5, 1e-15);
  // The disc zeta -> (0.9, zeta) fits; tilting toward the first axis does slightly better.
  const auto r = affine_disc_radius(DomainGeometry::polydisc({1.0, 1.0}), Point{0.9, 0.0});
  EXPECT_GE(r.radius, 1.0);
  EXPECT_NEAR(r.radius, std::sqrt(1.01), 1e-15);
}

TEST(AffineDiscRadius, AtLeastBoundaryDistanceAndEqualInPlane) {
  for (const auto& d : model_domains()) {
    Rng rng(derive_seed(17, static_cast<std::uint64_t>(d.kind())));
    for (int i = 0; i < 6; ++i) {
      const Point z = sample_point(d, std::nullopt, 1e-3, 0.3, rng);
      const double delta = d.boundary_distance(z);
      const auto r = affine_disc_radius(d, z, 64);
      EXPECT_GE(r.radius, delta * (1.0 - 1e-12)) << d.describe_short();
      if (d.dimension() == 1) {
        EXPECT_EQ(r.radius, delta);
      }
    }
  }
}

TEST(AffineDiscRadius, WitnessDiscLiesInside) {
  const auto d = DomainGeometry::polydisc({1.0, 0.5});
  Rng rng(2);
  for (int i = 0; i < 50; ++i) {
    const Point z = sample_point(d, std::nullopt, 1e-3, 0.4, rng);
    const auto r = affine_disc_radius(d, z);
    for (int k = 0; k < 64; ++k) {
      const cplx e = std::polar(0.999999 * r.radius, 2.0 * kPi * k / 64);
      EXPECT_TRUE(d.contains(z + r.direction * e));
    }
  }
}

TEST(AffineDiscRadius, EllipsoidNumericAgreesWithBallLimit) {
  // Exponents (1,1) give the unit ball, whose radius is known exactly.
  const auto e = DomainGeometry::ellipsoid({1.0, 1.0});
  const Point z{0.3, cplx(0.1, 0.2)};
  const auto r = affine_disc_radius(e, z);
  EXPECT_FALSE(r.exact);
  EXPECT_NEAR(r.radius, std::sqrt(1.0 - z.norm2()), 1e-3);
  EXPECT_LE(r.radius, std::sqrt(1.0 - z.norm2()) + 1e-9);
}

TEST(MConvexity, BallBoundedPolydiscDivergentHalfPlaneDecaying) {
  const auto ball = m_convexity_probe(DomainGeometry::unit_ball(2), 2.0, 24, 1);
  EXPECT_LE(ball.max_ratio, 2.0);
  EXPECT_FALSE(ball.divergent);
  const auto poly = m_convexity_probe(DomainGeometry::polydisc({1.0, 1.0}), 2.0, 24, 1);
  EXPECT_TRUE(poly.divergent);
  const auto half = m_convexity_probe(DomainGeometry::half_plane(CVec{1.0}, 0.0), 2.0, 24, 1);
  EXPECT_FALSE(half.divergent);
  EXPECT_LT(half.near_ratio, half.far_ratio);
  EXPECT_THROW(m_convexity_probe(DomainGeometry::annulus(0.3), 2.0, 24, 1), CapabilityError);
}

TEST(DiscFree, FixedVerdicts) {
  const auto poly = disc_free_certificate(DomainGeometry::polydisc({1.0, 1.0}), 64, 0.9, 1);
  ASSERT_TRUE(poly.disc_found);
  const auto& w = *poly.witness;
  EXPECT_EQ(w.center, (Point{1.0, 0.0}));
  EXPECT_NEAR(w.radius, 0.9, 0.0);
  for (int k = 0; k < 32; ++k) {
    const Point q = w.at(std::polar(1.0, 2.0 * kPi * k / 32));
    EXPECT_NEAR(DomainGeometry::polydisc({1.0, 1.0}).signed_distance(q), 0.0, 1e-15);
  }
  const auto ball = disc_free_certificate(DomainGeometry::unit_ball(2), 64, 0.9, 1);
  EXPECT_FALSE(ball.disc_found);
  EXPECT_GT(ball.chords_checked, 0);
  EXPECT_GT(ball.min_midpoint_gap, 0.0);
  EXPECT_TRUE(disc_free_certificate(DomainGeometry::half_plane(CVec{1.0, 0.0}, 1.0), 8, 0.5, 1).disc_found);
  EXPECT_FALSE(disc_free_certificate(DomainGeometry::ellipsoid({1.0, 2.0}), 64, 0.5, 1).disc_found);
  EXPECT_FALSE(disc_free_certificate(DomainGeometry::unit_disc(), 8, 0.5, 1).disc_found);
}

TEST(DiscFree, PolydiscWindowKeepsFaceDisc) {
  const auto d = DomainGeometry::intersection(DomainGeometry::polydisc({1.0, 1.0}), Point{1.0, 0.2}, 0.5);
  const auto v = disc_free_certificate(d, 16, 0.9, 1);
  ASSERT_TRUE(v.disc_found);
  const auto& w = *v.witness;
  for (int k = 0; k < 32; ++k) {
    const Point q = w.at(std::polar(1.0, 2.0 * kPi * k / 32));
    EXPECT_NEAR(d.as<shape::Intersection>().base->signed_distance(q), 0.0, 1e-15);
    EXPECT_LE(distance(q, d.as<shape::Intersection>().center), 0.5 + 1e-12);
  }
}

TEST(StrictCConvexity, Examples) {
  EXPECT_TRUE(strict_c_convexity_probe(DomainGeometry::unit_ball(2), Point{1.0, 0.0}, 200));
  EXPECT_FALSE(strict_c_convexity_probe(DomainGeometry::polydisc({1.0, 1.0}), Point{1.0, 0.5}, 200));
  EXPECT_TRUE(strict_c_convexity_probe(DomainGeometry::unit_disc(), Point{1.0}, 200));
  EXPECT_TRUE(strict_c_convexity_probe(DomainGeometry::ellipsoid({1.0, 2.0}), Point{0.0, 1.0}, 200));
  EXPECT_THROW(strict_c_convexity_probe(DomainGeometry::unit_ball(2), Point{0.5, 0.0}, 10), InputError);
}

TEST(Sampling, DeterministicPerSeed) {
  const auto d = DomainGeometry::unit_ball(2);
  const auto a = sample_pair_near(d, Point{1.0, 0.0}, 0.01, 0.1, 42);
  const auto b = sample_pair_near(d, Point{1.0, 0.0}, 0.01, 0.1, 42);
  EXPECT_EQ(a.first, b.first);
  EXPECT_EQ(a.second, b.second);
  const auto c = sample_pair_near(d, Point{1.0, 0.0}, 0.01, 0.1, 43);
  EXPECT_NE(a.first, c.first);
}

TEST(Sampling, RightCrescentOfDisc) {
  const auto d = DomainGeometry::unit_disc();
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto [z, w] = sample_pair_near(d, Point{1.0}, 0.01, 0.1, s);
    for (const auto& p : {z, w}) {
      const double dz = d.boundary_distance(p);
      EXPECT_GE(dz, 0.01 * (1 - 1e-9));
      EXPECT_LE(dz, 0.1 * (1 + 1e-9));
    }
    EXPECT_NE(z, w);
  }
}

TEST(Sampling, BandRespectedOnAllModels) {
  for (const auto& d : model_domains()) {
    for (std::uint64_t s = 0; s < 20; ++s) {
      const auto [z, w] = sample_pair_near(d, std::nullopt, 0.02, 0.2, s);
      for (const auto& p : {z, w}) {
        const double dz = d.boundary_distance(p);
        EXPECT_GE(dz, 0.02 * (1 - 1e-9)) << d.describe_short();
        EXPECT_LE(dz, 0.2 * (1 + 1e-9)) << d.describe_short();
      }
    }
  }
}

TEST(Sampling, ExactShellAndWithinRadius) {
  const auto d = DomainGeometry::unit_ball(2);
  const auto [z, w] = sample_pair_near(d, std::nullopt, 0.05, 0.05, 9);
  EXPECT_NEAR(d.boundary_distance(z), 0.05, 1e-9);
  EXPECT_NEAR(d.boundary_distance(w), 0.05, 1e-9);
  SamplingOptions opt;
  opt.within = 0.25;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto pr = sample_pair_near(d, Point{1.0, 0.0}, 1e-3, 0.2, s, opt);
    EXPECT_LT(distance(pr.first, Point{1.0, 0.0}), 0.25);
    EXPECT_LT(distance(pr.second, Point{1.0, 0.0}), 0.25);
  }
}

TEST(Sampling, ImpossibleBandIsSamplingError) {
  EXPECT_THROW(sample_pair_near(DomainGeometry::unit_disc(), std::nullopt, 2.0, 3.0, 1), SamplingError);
  EXPECT_THROW(sample_pair_near(DomainGeometry::unit_disc(), std::nullopt, 0.2, 0.1, 1), InputError);
}

TEST(Intersection, AcceptsCrescentWindowAndRecordsAnchor) {
  const auto d = DomainGeometry::intersection(DomainGeometry::annulus(0.5), Point{1.0}, 0.3);
  EXPECT_TRUE(d.contains(d.anchor()));
  EXPECT_FALSE(d.is_convex());
  const auto b = DomainGeometry::intersection(DomainGeometry::unit_ball(2), Point{1.0, 0.0}, 0.5);
  EXPECT_TRUE(b.contains(b.anchor()));
  EXPECT_TRUE(b.is_convex_set());
}
