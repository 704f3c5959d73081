// Acceptance suite: one PASS/FAIL line per criterion; exit status 1 if any criterion fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "invmetric/runner.hpp"
#include "oracles.hpp"

using namespace invmetric;
using io::json;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::filesystem::path config_path(const std::string& name) {
  return std::filesystem::path(INVMETRIC_SOURCE_DIR) / "configs" / name;
}

std::vector<std::pair<Point, Point>> seeded_pairs(const DomainGeometry& d, int n, double dmin, double dmax,
                                                  std::uint64_t seed) {
  std::vector<std::pair<Point, Point>> out;
  for (int i = 0; i < n; ++i) out.push_back(sample_pair_near(d, std::nullopt, dmin, dmax, derive_seed(seed, i)));
  return out;
}

double oracle_k(const DomainGeometry& d, const Point& z, const Point& w) {
  switch (d.kind()) {
    case DomainKind::UnitDisc: return oracle::disc_k(z[0], w[0]);
    case DomainKind::Ball: return oracle::ball_k(z, w);
    case DomainKind::Polydisc: return oracle::polydisc_k(z, w, d.as<shape::Polydisc>().radii);
    case DomainKind::Annulus: return oracle::annulus_k(d.as<shape::Annulus>().inner, z[0], w[0]);
    default: return NAN;
  }
}

const json* find(const json& reports, const std::string& id) {
  for (const auto& r : reports)
    if (r.value("inequality", "") == id) return &r;
  return nullptr;
}

bool stable(const json* r, double bound) {
  return r && r->at("C").is_number() && r->at("stability").is_number() && r->at("stability").get<double>() <= bound &&
         r->at("unboundable").get<int>() == 0;
}

std::string describe_report(const json* r) {
  if (!r) return "missing";
  return r->at("inequality").get<std::string>() + " C=" + r->at("C").dump() + " stab=" + r->at("stability").dump();
}

// ---------------------------------------------------------------------------

Outcome disc_oracle() {
  const auto t0 = Clock::now();
  const auto d = DomainGeometry::unit_disc();
  const auto pairs = seeded_pairs(d, 100, 0.05, 0.95, 101);
  const unsigned threads = resolve_threads(0);
  const auto errs = parallel_map(pairs.size(), threads, [&](std::size_t i) {
    const auto& [z, w] = pairs[i];
    const double k = oracle::disc_k(z[0], w[0]);
    const double up = lempert_upper(d, z, w).value.value - k;
    const double lo = k - caratheodory_lower(d, z, w).value.value;
    return std::pair{up, lo};
  });
  double up_max = -kInf, up_min = kInf, lo_max = -kInf, lo_min = kInf;
  for (const auto& [u, l] : errs) {
    up_max = std::max(up_max, u);
    up_min = std::min(up_min, u);
    lo_max = std::max(lo_max, l);
    lo_min = std::min(lo_min, l);
  }
  const double secs = seconds_since(t0);
  const bool ok = up_min >= -1e-12 && lo_min >= -1e-12 && up_max <= 1e-3 && lo_max <= 1e-3 && secs < 120.0;
  return {ok, fmt("upper-k in [%.2e, %.2e], k-lower in [%.2e, %.2e], %.1fs", up_min, up_max, lo_min, lo_max, secs)};
}

Outcome ball_sandwich() {
  const auto d = DomainGeometry::unit_ball(2);
  const auto pairs = seeded_pairs(d, 100, 0.05, 0.95, 202);
  const auto widths = parallel_map(pairs.size(), resolve_threads(0), [&](std::size_t i) {
    const auto b = sandwich(d, pairs[i].first, pairs[i].second);
    return std::pair{b.width(), oracle::ball_k(pairs[i].first, pairs[i].second)};
  });
  double wmax = 0.0, wmin = kInf;
  for (const auto& [w, k] : widths) {
    wmax = std::max(wmax, w);
    wmin = std::min(wmin, w);
  }
  return {wmax <= 1e-2 && wmin >= -1e-12, fmt("width in [%.2e, %.2e] over %zu pairs", wmin, wmax, pairs.size())};
}

Outcome chain() {
  SolverConfig cfg;
  cfg.restarts = 2;
  cfg.patience = 1;
  cfg.path_nodes = 8;
  const std::vector<DomainGeometry> domains{DomainGeometry::unit_disc(), DomainGeometry::unit_ball(2),
                                            DomainGeometry::polydisc({1.0, 1.0}), DomainGeometry::ellipsoid({1.0, 2.0}),
                                            DomainGeometry::annulus(0.3)};
  struct Job {
    std::size_t domain;
    Point z, w;
  };
  std::vector<Job> jobs;
  for (std::size_t k = 0; k < domains.size(); ++k)
    for (const auto& [z, w] : seeded_pairs(domains[k], 100, 0.02, 0.9, 300 + k)) jobs.push_back({k, z, w});
  struct Check {
    int violations = 0;
    bool failed = false;
    double worst = -kInf;  // largest excess over the combined tolerance
  };
  const auto checks = parallel_map(jobs.size(), resolve_threads(0), [&](std::size_t i) {
    const auto& j = jobs[i];
    const auto& d = domains[j.domain];
    Check c;
    try {
      const double lo = caratheodory_lower(d, j.z, j.w, cfg).value.value;
      const auto k = kobayashi_distance_upper(d, j.z, j.w, cfg);
      const double tol = cfg.tol + k.error_estimate;
      auto note = [&](double excess) {
        c.worst = std::max(c.worst, excess);
        if (excess > 0.0) ++c.violations;
      };
      note(lo - (k.value.value + tol));
      if (k.lempert) note(k.value.value - (k.lempert->value.value + tol));
      const double ko = oracle_k(d, j.z, j.w);
      if (!std::isnan(ko)) {
        note(lo - (ko + cfg.tol));
        note(ko - (k.value.value + tol));
        if (k.lempert) note(ko - (k.lempert->value.value + cfg.tol));
      }
    } catch (const SolverFailure&) {
      c.failed = true;
    }
    return c;
  });
  int violations = 0, failed = 0;
  double worst = -kInf;
  for (const auto& c : checks) {
    violations += c.violations;
    failed += c.failed ? 1 : 0;
    worst = std::max(worst, c.worst);
  }
  const int checked = static_cast<int>(jobs.size()) - failed;
  return {violations == 0 && checked >= 500,
          fmt("%d pairs checked (%d solver failures), %d violations, worst excess %.2e", checked, failed, violations,
              worst)};
}

Outcome annulus_theorem() {
  const auto res = run_config(io::read_json_file(config_path("theorem1_annulus.json").string()));
  if (res.exit_code != kExitOk && !res.summary.contains("reports"))
    return {false, "runner error: " + res.summary.dump()};
  const json& reps = res.summary["reports"];
  const auto* zero = find(reps, "zero");
  const auto* lip = find(reps, "lip-global");
  const int pairs = zero ? zero->at("rows").get<int>() + zero->at("dropped").get<int>() : 0;
  const bool ok = res.exit_code == kExitOk && stable(zero, 1.5) && stable(lip, 1.5) && pairs >= 200;
  return {ok, fmt("exit %d, %d pairs, ", res.exit_code, pairs) + describe_report(zero) + ", " + describe_report(lip)};
}

Outcome ball_localization() {
  json cfg = io::read_json_file(config_path("localize_ball.json").string());
  cfg["samples"]["pairs"] = 100;
  cfg["samples"]["tangents"] = 30;
  const auto res = run_config(cfg);
  if (!res.summary.contains("reports")) return {false, "runner error: " + res.summary.dump()};
  const json& reps = res.summary["reports"];
  bool ok = res.exit_code == kExitOk;
  std::string detail = fmt("exit %d", res.exit_code);
  for (const char* id : {"quo", "lip", "met"}) {
    const auto* r = find(reps, id);
    ok = ok && stable(r, 1.5) && r->at("rows").get<int>() + r->at("dropped").get<int>() > 0;
    detail += ", " + describe_report(r);
  }
  for (const char* id : {"lip-root", "met-linear"}) {
    const auto* r = find(reps, id);
    ok = ok && r && !r->at("flagged").get<bool>();
    detail += ", " + describe_report(r);
  }
  const auto* quo = find(reps, "quo");
  if (quo && quo->at("rows").get<int>() + quo->at("dropped").get<int>() < 100) ok = false;
  return {ok, detail};
}

Outcome exact_checks() {
  double worst_report = kInf, worst_oracle = kInf;
  for (const auto& d : {DomainGeometry::unit_ball(2), DomainGeometry::polydisc({1.0, 1.0})}) {
    const auto pairs = seeded_pairs(d, 1000, 1e-4, 0.95, 600);
    const auto r = check_low(d, pairs);
    worst_report = std::min(worst_report, r.min_margin);
    for (const auto& [z, w] : pairs) {
      const double lhs = 0.5 * std::abs(std::log(d.boundary_distance(z) / d.boundary_distance(w)));
      worst_oracle = std::min(worst_oracle, oracle_k(d, z, w) - lhs);
    }
  }
  const auto disc = DomainGeometry::unit_disc();
  Rng rng(6006);
  double worst_gromov = kInf;
  for (int i = 0; i < 10000; ++i) {
    const Point z = sample_point(disc, std::nullopt, 1e-6, 1.0, rng);
    const Point w = sample_point(disc, std::nullopt, 1e-6, 1.0, rng);
    worst_gromov = std::min(worst_gromov, oracle::disc_k(z[0], w[0]) - disc_gromov_lower(z[0], w[0]).value);
  }
  const bool ok = worst_report >= -1e-9 && worst_oracle >= -1e-9 && worst_gromov >= -1e-12;
  return {ok, fmt("low min margin %.2e (oracle %.2e) on 2000 pairs, disc Gromov min margin %.2e on 10^4 pairs",
                  worst_report, worst_oracle, worst_gromov)};
}

Outcome visibility() {
  const auto poly = DomainGeometry::polydisc({1.0, 1.0});
  const auto vp = visibility_classify(poly, {{Point{1.0, 0.2}, Point{1.0, -0.2}}});
  const auto ball = DomainGeometry::unit_ball(2);
  const auto pairs = opposite_boundary_pairs(ball, 20, 0.5, 7);
  const auto vb = visibility_classify(ball, pairs);
  double sup = -kInf;
  bool all_bounded = true;
  for (const auto& p : vb.pairs) {
    sup = std::max(sup, p.sup);
    all_bounded = all_bounded && p.verdict == Verdict::Bounded;
  }
  const bool poly_disc = disc_free_certificate(poly, 64, 0.4, 0).disc_found;
  const bool ball_disc = disc_free_certificate(ball, 64, 0.4, 0).disc_found;
  const double slope = vp.pairs[0].slope_atanh;
  const bool ok = vp.overall == Visibility::NotVisible && vp.witness && slope >= 1.8 &&
                  vb.overall == Visibility::VisibleEvidence && all_bounded && sup <= 1.0 && pairs.size() == 20 &&
                  poly_disc && !ball_disc;
  return {ok, fmt("polydisc %s slope %.3f, ball %s sup %.3f over %zu pairs, boundary discs: polydisc %s, ball %s",
                  visibility_name(vp.overall), slope, visibility_name(vb.overall), sup, pairs.size(),
                  poly_disc ? "yes" : "no", ball_disc ? "yes" : "no")};
}

Outcome completeness() {
  const auto t0 = Clock::now();
  SequenceOptions so;
  so.j_max = 20;
  so.source = MetricSource::ClosedForm;
  const auto disc = strong_completeness_probe(DomainGeometry::unit_disc(), Point{1.0}, so);
  const auto ball = strong_completeness_probe(DomainGeometry::unit_ball(2), Point{1.0, 0.0}, so);
  const double secs = seconds_since(t0);
  const double dmin = ball.rows.back().delta;
  const bool ok = disc.divergent && ball.divergent && std::abs(disc.slope - 1.0) <= 0.2 &&
                  std::abs(ball.slope - 1.0) <= 0.2 && dmin <= std::ldexp(1.0, -20) * (1.0 + 1e-9) && secs < 10.0;
  return {ok, fmt("disc slope %.4f, ball slope %.4f, smallest delta %.3g, %.2fs", disc.slope, ball.slope, dmin, secs)};
}

Outcome geodesics() {
  const auto ball = DomainGeometry::unit_ball(2);
  const auto poly = DomainGeometry::polydisc({1.0, 1.0});
  const auto disc = DomainGeometry::unit_disc();
  const auto slice = verify_geodesic(ball, polynomial_disc({CVec{0.0, 0.0}, CVec{1.0, 0.0}}), 0.0, 0.5);
  const auto diag = verify_geodesic(poly, polynomial_disc({CVec{0.0, 0.0}, CVec{1.0, 0.5}}), 0.0, 0.5);
  // Independent check of the slice against the ball oracle.
  double oracle_defect = 0.0;
  for (const cplx a : {cplx(0.1, 0.2), cplx(-0.6, 0.3), cplx(0.8, 0.0)})
    for (const cplx b : {cplx(0.0, -0.5), cplx(0.3, 0.3), cplx(-0.9, 0.1)})
      oracle_defect = std::max(oracle_defect, std::abs(oracle::ball_k(slice.disc.at(a), slice.disc.at(b)) -
                                                       oracle::disc_k(a, b)));
  AnalyticDiscParam moved = polynomial_disc({CVec{0.0, 0.0}, CVec{1.0, 0.0}});
  moved.pre_a = cplx(0.3, -0.4);
  const auto n1 = normalize_star(verify_geodesic(ball, moved, 0.0, 0.5), ball);
  const auto n2 = normalize_star(n1, ball);
  const double drift = distance(n1.disc.at(0.0), n2.disc.at(0.0));
  const auto id = verify_geodesic(disc, polynomial_disc({CVec{0.0}, CVec{1.0}}), 0.0, 0.5);
  const bool hits = boundary_extension_check(slice, {Point{1.0, 0.0}, Point{-1.0, 0.0}}).hits(1e-12) &&
                    boundary_extension_check(id, {Point{1.0}, Point{-1.0}}).hits(1e-12) &&
                    boundary_extension_check(diag, {Point{1.0, 0.5}, Point{-1.0, -0.5}}).hits(1e-12);
  const bool ok = slice.accepted && diag.accepted && slice.defect <= 1e-6 && diag.defect <= 1e-6 &&
                  oracle_defect <= 1e-6 && drift < n1.grid_step && hits;
  return {ok, fmt("slice defect %.2e (oracle %.2e), diagonal defect %.2e, star drift %.2e < %.2e, extension %s",
                  slice.defect, oracle_defect, diag.defect, drift, n1.grid_step, hits ? "exact" : "missed")};
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

Outcome determinism() {
  const auto tmp = std::filesystem::temp_directory_path() / "invmetric_acceptance";
  std::filesystem::remove_all(tmp);
  int compared = 0;
  std::string mismatch;
  for (const char* name : {"sandwich_polydisc.json", "metric_ball.json", "classical_ball.json",
                           "visibility_polydisc.json", "completeness_disc.json", "geodesic_ball.json",
                           "mconvex_ellipsoid.json"}) {
    const json cfg = io::read_json_file(config_path(name).string());
    std::vector<std::string> csv;
    for (const unsigned threads : {1u, 2u, 1u}) {
      RunOverrides ov;
      ov.threads = threads;
      ov.out_dir = (tmp / (std::string(name) + "." + std::to_string(csv.size()))).string();
      const auto res = run_config(cfg, ov);
      if (res.files.empty()) {
        mismatch += std::string(" ") + name + ":no-output";
        break;
      }
      csv.push_back(slurp(res.files.front()));
    }
    for (std::size_t i = 1; i < csv.size(); ++i)
      if (csv[i] != csv[0]) mismatch += std::string(" ") + name;
    compared += static_cast<int>(csv.size());
  }
  std::filesystem::remove_all(tmp);
  return {mismatch.empty() && compared > 0,
          fmt("%d runs over 7 configs (threads 1, 2, 1)", compared) + (mismatch.empty() ? "" : "; differs:" + mismatch)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"disc oracle equivalence", disc_oracle},
      {"ball sandwich width", ball_sandwich},
      {"chain c <= k <= l", chain},
      {"annulus global inequalities", annulus_theorem},
      {"ball localization", ball_localization},
      {"exact zero-constant checks", exact_checks},
      {"visibility dichotomy", visibility},
      {"strong completeness", completeness},
      {"geodesic verification", geodesics},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << (i + 1) << " " << criteria[i].first << ": " << o.detail
              << fmt(" [%.1fs]", seconds_since(t0)) << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
