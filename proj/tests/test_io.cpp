#include <gtest/gtest.h>

#include "invmetric/io.hpp"

using namespace invmetric;
using io::json;

TEST(DomainJson, RoundTrip) {
  const std::vector<DomainGeometry> domains{
      DomainGeometry::unit_disc(),
      DomainGeometry::ball(Point{0.1, cplx(0.0, -0.2)}, 2.0),
      DomainGeometry::polydisc({1.0, 0.6}),
      DomainGeometry::ellipsoid({1.0, 2.0}),
      DomainGeometry::annulus(0.3),
      DomainGeometry::half_plane(CVec{1.0, 0.0}, 0.5),
      DomainGeometry::intersection(DomainGeometry::unit_ball(2), Point{1.0, 0.0}, 0.5)};
  for (const auto& d : domains) {
    const json j = io::domain_to_json(d);
    const auto back = io::domain_from_json(j);
    EXPECT_EQ(back.kind(), d.kind());
    EXPECT_EQ(io::domain_to_json(back), j) << j.dump();
  }
}

TEST(DomainJson, Errors) {
  EXPECT_THROW(io::domain_from_json(json::parse(R"({"kind": "Torus"})")), io::ConfigError);
  EXPECT_THROW(io::domain_from_json(json::parse(R"([1, 2])")), io::ConfigError);
  EXPECT_THROW(io::domain_from_json(json::parse(R"({"kind": "Polydisc"})")), InputError);
  EXPECT_EQ(io::domain_from_json(json::parse(R"({"kind": "disc"})")).kind(), DomainKind::UnitDisc);
  EXPECT_EQ(io::domain_from_json(json::parse(R"({"kind": "BALL", "params": {"dimension": 3}})")).dimension(), 3u);
}

TEST(SolverJson, RoundTripAndUnknownKeys) {
  SolverConfig c;
  c.degree = 12;
  c.tol = 1e-7;
  c.seed = 99;
  const auto back = io::solver_from_json(io::solver_to_json(c));
  EXPECT_EQ(back.degree, 12);
  EXPECT_EQ(back.tol, 1e-7);
  EXPECT_EQ(back.seed, 99u);
  EXPECT_THROW(io::solver_from_json(json::parse(R"({"degre": 8})")), io::ConfigError);
  EXPECT_THROW(io::solver_from_json(json::parse(R"({"degree": 0})")), InputError);
  EXPECT_THROW(io::solver_from_json(json::parse(R"({"degree": "eight"})")), io::ConfigError);
}

TEST(DiscJson, RoundTrip) {
  AnalyticDiscParam p;
  p.coeffs = {CVec{0.1, 0.0}, CVec{cplx(0.5, -0.25), 0.3}};
  p.pre_a = cplx(0.2, 0.1);
  p.pre_rot = cplx(0.0, 1.0);
  p.alpha = 0.4;
  p.star_normalized = true;
  const auto back = io::disc_from_json(io::disc_to_json(p));
  for (const cplx z : {cplx(0.0), cplx(0.3, -0.6), cplx(-0.9, 0.0)}) EXPECT_EQ(back.at(z), p.at(z));
  EXPECT_TRUE(back.star_normalized);
  EXPECT_THROW(io::disc_from_json(json::parse(R"({"coeffs": []})")), io::ConfigError);
}

TEST(Csv, FormatIsRoundTripAndStable) {
  for (const double x : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 0.0})
    EXPECT_EQ(std::stod(io::fmt(x)), x) << io::fmt(x);
  EXPECT_EQ(io::fmt(kInf), "inf");
  EXPECT_EQ(io::fmt(std::nan("")), "nan");
  EXPECT_EQ(io::fmt(CVec{cplx(1.0, -2.0), cplx(0.5, 0.0)}), "1-2i 0.5+0i");
  io::CsvWriter w({"a", "b", "c"});
  w.row(std::size_t{1}, 0.25, std::string("x"));
  EXPECT_EQ(w.str(), "a,b,c\n1,0.25,x\n");
  EXPECT_THROW(w.row(1, 2), std::logic_error);
}

TEST(Json, NonFiniteBecomesNull) {
  EXPECT_TRUE(io::number(kInf).is_null());
  EXPECT_TRUE(io::number(std::nan("")).is_null());
  EXPECT_EQ(io::number(1.5), json(1.5));
}
