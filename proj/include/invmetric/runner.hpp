#pragma once

// Experiment runner behind the CLI: parses a config, runs one task, and produces a
// deterministic CSV and a JSON summary.
//
// Exit codes: 0 all checks passed, 1 config error, 2 an inequality suite flagged an
// unboundable or unstable constant (or an exact check failed), 3 solver failures above
// the configured fraction (or a bracket or geodesic that could not be certified).

#include <filesystem>
#include <iostream>

#include "invmetric/io.hpp"

namespace invmetric {

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitFlagged = 2, kExitSolver = 3 };

inline const std::vector<std::string>& task_names() {
  static const std::vector<std::string> t{"metric",     "sandwich",     "theorem1", "localize", "classical",
                                          "visibility", "completeness", "geodesic", "mconvex"};
  return t;
}

struct RunOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> task;
  std::optional<std::string> out_dir;
  std::optional<unsigned> threads;
};

struct RunResult {
  int exit_code = kExitOk;
  std::string task;
  std::string csv;
  io::json summary;
  std::vector<std::string> files;
};

namespace run_detail {

using io::ConfigError;
using io::json;

struct Context {
  json cfg;
  std::string task;
  std::uint64_t seed = 0;
  DomainGeometry domain = DomainGeometry::unit_disc();
  SolverConfig solver;
  unsigned threads = 0;
  double failure_threshold = 0.1;
  int pairs = 20;
  int tangents = 0;
  double delta_min = 0.01;
  double delta_max = 0.5;

  [[nodiscard]] json task_params() const { return cfg.value(task, json::object()); }
};

struct Outcome {
  std::string csv;
  json summary = json::object();
  int exit_code = kExitOk;
  std::vector<std::pair<std::string, std::string>> extra_files;  // (suffix, content)
};

inline Point point_param(const json& params, const char* key) {
  if (!params.contains(key)) throw ConfigError(std::string("missing task parameter \"") + key + "\"");
  return io::vec_from_json(params.at(key));
}

inline std::vector<std::pair<Point, Point>> explicit_pairs(const json& j) {
  std::vector<std::pair<Point, Point>> out;
  if (!j.is_array()) throw ConfigError("\"pairs\" must be an array of [z, w]");
  for (const auto& p : j) {
    if (!p.is_array() || p.size() != 2) throw ConfigError("each pair is [z, w]");
    out.emplace_back(io::vec_from_json(p[0]), io::vec_from_json(p[1]));
  }
  return out;
}

/// Explicit "pairs" from the samples block, else seeded samples (optionally near p within radius).
inline std::vector<std::pair<Point, Point>> make_pairs(const Context& c, const std::optional<Point>& p = std::nullopt,
                                                       double within = 0.0) {
  const json s = c.cfg.value("samples", json::object());
  std::vector<std::pair<Point, Point>> out;
  if (s.contains("pairs") && s["pairs"].is_array()) {
    out = explicit_pairs(s["pairs"]);
  } else {
    SamplingOptions so;
    so.within = within;
    for (int i = 0; i < c.pairs; ++i)
      out.push_back(sample_pair_near(c.domain, p, c.delta_min, c.delta_max, derive_seed(c.seed, i), so));
  }
  for (const auto& [z, w] : out) {
    c.domain.check_point(z);
    c.domain.check_point(w);
    if (!c.domain.contains(z) || !c.domain.contains(w)) throw ConfigError("pair point outside the domain");
  }
  return out;
}

inline std::vector<Tangent> make_tangents(const Context& c, const std::optional<Point>& p = std::nullopt,
                                          double within = 0.0) {
  const json s = c.cfg.value("samples", json::object());
  std::vector<Tangent> out;
  if (s.contains("tangents") && s["tangents"].is_array()) {
    for (const auto& t : s["tangents"]) {
      if (!t.is_object()) throw ConfigError("each tangent is {\"base\": z, \"direction\": X}");
      out.push_back({point_param(t, "base"), point_param(t, "direction")});
    }
  } else {
    SamplingOptions so;
    so.within = within;
    for (int i = 0; i < c.tangents; ++i) {
      Rng rng(derive_seed(c.seed, 1000000 + static_cast<std::uint64_t>(i)));
      const Point z = sample_point(c.domain, p, c.delta_min, c.delta_max, rng, so);
      out.push_back({z, random_unit(rng, c.domain.dimension())});
    }
  }
  for (const auto& t : out) {
    c.domain.check_point(t.base);
    c.domain.check_point(t.direction);
    if (!c.domain.contains(t.base)) throw ConfigError("tangent base outside the domain");
  }
  return out;
}

inline bool too_many_failures(const Context& c, std::size_t failed, std::size_t total) {
  return total > 0 && static_cast<double>(failed) > c.failure_threshold * static_cast<double>(total);
}

// ---------------------------------------------------------------------------
// Tasks
// ---------------------------------------------------------------------------

inline Outcome task_metric(const Context& c) {
  const auto tangents = make_tangents(c);
  if (tangents.empty()) throw ConfigError("metric task needs tangents (samples.tangents > 0)");
  struct Row {
    double gamma = NAN, kappa = NAN;
    bool failed = false;
  };
  const auto rows = parallel_map(tangents.size(), c.threads, [&](std::size_t i) {
    Row r;
    try {
      r.gamma = caratheodory_metric_lower(c.domain, tangents[i], c.solver).value;
      r.kappa = kobayashi_metric_upper(c.domain, tangents[i], c.solver).value;
    } catch (const SolverFailure&) {
      r.failed = true;
    }
    return r;
  });
  io::CsvWriter w({"index", "z", "X", "delta", "gamma_lower", "kappa_upper", "closed_form", "status"});
  std::size_t failed = 0, violations = 0;
  double max_gap = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    const double cf = c.domain.has_closed_form() ? model_metric(c.domain, tangents[i]) : NAN;
    std::string status = "ok";
    if (r.failed) {
      ++failed;
      status = "failed";
    } else {
      const double slack = c.solver.tol * std::max(1.0, r.kappa);
      bool bad = r.gamma > r.kappa + slack;
      if (!std::isnan(cf)) bad = bad || r.gamma > cf + slack || r.kappa < cf - slack;
      if (bad) {
        ++violations;
        status = "violation";
      }
      max_gap = std::max(max_gap, r.kappa - r.gamma);
    }
    w.row(i, tangents[i].base, tangents[i].direction, c.domain.boundary_distance(tangents[i].base), r.gamma, r.kappa,
          cf, status);
  }
  Outcome o;
  o.csv = w.str();
  o.summary = {{"rows", rows.size()}, {"dropped", failed}, {"violations", violations}, {"max_gap", max_gap}};
  if (violations > 0 || too_many_failures(c, failed, rows.size())) o.exit_code = kExitSolver;
  return o;
}

inline Outcome task_sandwich(const Context& c) {
  const auto pairs = make_pairs(c);
  struct Row {
    double lower = NAN, upper = NAN;
    bool failed = false;
  };
  const auto rows = parallel_map(pairs.size(), c.threads, [&](std::size_t i) {
    Row r;
    try {
      const auto b = sandwich(c.domain, pairs[i].first, pairs[i].second, c.solver);
      r.lower = b.lower.value;
      r.upper = b.upper.value;
    } catch (const SolverFailure&) {
      r.failed = true;
    }
    return r;
  });
  io::CsvWriter w({"index", "z", "w", "delta_z", "delta_w", "lower", "upper", "width", "closed_form", "status"});
  std::size_t failed = 0, violations = 0;
  double max_width = 0.0, sum_width = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& [z, v] = pairs[i];
    const auto& r = rows[i];
    const double cf = c.domain.has_closed_form() ? model_distance(c.domain, z, v).value : NAN;
    std::string status = "ok";
    if (r.failed) {
      ++failed;
      status = "failed";
    } else {
      const double slack = c.solver.tol * std::max(1.0, r.upper);
      bool bad = r.lower > r.upper + slack;
      if (!std::isnan(cf)) bad = bad || r.lower > cf + slack || r.upper < cf - slack;
      if (bad) {
        ++violations;
        status = "violation";
      }
      max_width = std::max(max_width, r.upper - r.lower);
      sum_width += r.upper - r.lower;
    }
    w.row(i, z, v, c.domain.boundary_distance(z), c.domain.boundary_distance(v), r.lower, r.upper, r.upper - r.lower,
          cf, status);
  }
  Outcome o;
  o.csv = w.str();
  const std::size_t ok = rows.size() - failed;
  o.summary = {{"rows", rows.size()},
               {"dropped", failed},
               {"violations", violations},
               {"max_width", max_width},
               {"mean_width", ok ? sum_width / ok : 0.0}};
  if (violations > 0 || too_many_failures(c, failed, rows.size())) o.exit_code = kExitSolver;
  return o;
}

inline Outcome reports_outcome(const Context& c, const std::vector<ComparisonReport>& reports,
                               double exact_tol = 1e-9) {
  Outcome o;
  io::CsvWriter w(io::report_columns());
  json list = json::array();
  std::size_t rows = 0, dropped = 0;
  bool flagged = false;
  for (const auto& r : reports) {
    io::append_report(w, r);
    list.push_back(io::report_summary(r));
    rows += r.rows.size() + r.dropped;
    dropped += r.dropped;
    if (r.form == BoundForm::Exact) flagged = flagged || !r.exact_holds(exact_tol);
    else flagged = flagged || r.flagged();
  }
  o.csv = w.str();
  o.summary = {{"rows", rows}, {"dropped", dropped}, {"reports", list}};
  if (too_many_failures(c, dropped, rows)) o.exit_code = kExitSolver;
  else if (flagged) o.exit_code = kExitFlagged;
  return o;
}

inline Outcome task_theorem1(const Context& c) {
  const auto reports = check_theorem_global(c.domain, make_pairs(c), make_tangents(c), {c.solver, c.threads});
  return reports_outcome(c, reports);
}

inline Outcome task_localize(const Context& c) {
  const json tp = c.task_params();
  LocalizationSetup s{c.domain, point_param(tp, "p"), tp.value("r_u", 0.5), tp.value("r_v", 0.25), c.solver};
  s.validate();
  const auto pairs = make_pairs(c, s.p, s.r_v);
  const auto tangents = make_tangents(c, s.p, s.r_v);
  auto o = reports_outcome(c, check_localization(s, pairs, tangents, c.threads));
  o.summary["window"] = {{"p", io::vec_to_json(s.p)}, {"r_u", s.r_u}, {"r_v", s.r_v}};
  return o;
}

inline Outcome task_classical(const Context& c) {
  const auto suite = verify_classical(c.domain, make_pairs(c), make_tangents(c), {c.solver, c.threads});
  auto o = reports_outcome(c, suite.reports);
  json skipped = json::array();
  for (const auto& [id, why] : suite.skipped) skipped.push_back({{"inequality", id}, {"reason", why}});
  o.summary["skipped"] = skipped;
  return o;
}

inline MetricSource source_param(const json& tp) {
  const std::string s = tp.value("source", "auto");
  if (s == "auto") return MetricSource::Auto;
  if (s == "closed_form") return MetricSource::ClosedForm;
  if (s == "bracket") return MetricSource::Bracket;
  throw ConfigError("metric source must be auto, closed_form or bracket");
}

inline SequenceOptions sequence_params(const Context& c, const json& tp) {
  SequenceOptions so;
  so.j_min = tp.value("j_min", so.j_min);
  so.j_max = tp.value("j_max", so.j_max);
  so.base = tp.value("base", so.base);
  if (tp.contains("origin")) so.origin = point_param(tp, "origin");
  if (tp.contains("split")) so.split = point_param(tp, "split");
  so.split_power = tp.value("split_power", so.split_power);
  so.source = source_param(tp);
  so.cfg = c.solver;
  return so;
}

inline Outcome task_visibility(const Context& c) {
  const json tp = c.task_params();
  const auto so = sequence_params(c, tp);
  const double face_radius = tp.value("face_radius", 0.4);
  const auto dfree = c.domain.bounded() ? disc_free_certificate(c.domain, 64, face_radius, c.seed) : DiscFreeVerdict{};
  std::vector<std::pair<Point, Point>> pq;
  if (tp.contains("pairs")) {
    pq = explicit_pairs(tp["pairs"]);
  } else if (const auto face = face_witness_pair(c.domain, face_radius, c.seed)) {
    pq.push_back(*face);
  } else {
    pq = opposite_boundary_pairs(c.domain, tp.value("count", 20), tp.value("spread", 0.5), c.seed);
  }
  for (const auto& [p, q] : pq)
    if (std::abs(c.domain.signed_distance(p)) > 1e-9 || std::abs(c.domain.signed_distance(q)) > 1e-9)
      throw ConfigError("visibility pairs must lie on the boundary");
  const auto v = visibility_classify(c.domain, pq, so, c.threads);
  io::CsvWriter w({"pair", "p", "q", "j", "delta", "gromov", "gromov_lower", "gromov_upper", "slope", "verdict"});
  json pairs = json::array();
  for (std::size_t i = 0; i < v.pairs.size(); ++i) {
    const auto& pv = v.pairs[i];
    for (const auto& row : pv.rows)
      w.row(i, pv.p, pv.q, row.j, row.delta, row.gromov.value, row.gromov.lower, row.gromov.upper, pv.slope,
            std::string(verdict_name(pv.verdict)));
    pairs.push_back({{"p", io::vec_to_json(pv.p)},
                     {"q", io::vec_to_json(pv.q)},
                     {"verdict", verdict_name(pv.verdict)},
                     {"slope", pv.slope},
                     {"slope_atanh", pv.slope_atanh},
                     {"sup", pv.sup},
                     {"max_width", pv.max_width}});
  }
  Outcome o;
  o.csv = w.str();
  // A flat boundary face must produce a divergent witness.
  const bool consistent = !dfree.disc_found || v.overall == Visibility::NotVisible;
  o.summary = {{"rows", v.pairs.size()},
               {"dropped", 0},
               {"verdict", visibility_name(v.overall)},
               {"witness", v.witness ? json(*v.witness) : json(nullptr)},
               {"boundary_disc_found", dfree.disc_found},
               {"consistent_with_disc_free", consistent},
               {"pairs", pairs}};
  if (v.overall == Visibility::Inconclusive) o.exit_code = kExitSolver;
  else if (!consistent) o.exit_code = kExitFlagged;
  return o;
}

inline Outcome task_completeness(const Context& c) {
  const json tp = c.task_params();
  const auto r = strong_completeness_probe(c.domain, point_param(tp, "p"), sequence_params(c, tp), c.threads);
  io::CsvWriter w({"j", "delta", "z", "w", "gromov", "gromov_lower", "gromov_upper"});
  for (const auto& row : r.rows)
    w.row(row.j, row.delta, row.z, row.w, row.gromov.value, row.gromov.lower, row.gromov.upper);
  Outcome o;
  o.csv = w.str();
  o.summary = {{"rows", r.rows.size()},
               {"dropped", 0},
               {"divergent", r.divergent},
               {"inconclusive", r.inconclusive},
               {"slope", r.slope},
               {"max_width", r.max_width}};
  if (r.inconclusive) o.exit_code = kExitSolver;
  return o;
}

inline Outcome task_geodesic(const Context& c) {
  const json tp = c.task_params();
  const Point z = point_param(tp, "z"), w = point_param(tp, "w");
  GeodesicOptions go;
  go.tol = tp.value("tol", go.tol);
  go.source = source_param(tp);
  go.threads = c.threads;
  if (tp.contains("radii")) go.radii = tp["radii"].get<std::vector<double>>();
  go.angles = tp.value("angles", go.angles);
  const int nodes = tp.value("nodes", 9);
  Outcome o;
  o.summary = json::object();
  if (c.domain.is_convex_set()) {
    auto g = complex_geodesic(c.domain, z, w, c.solver, go);
    if (g.accepted && tp.value("normalize", true)) {
      g = normalize_star(g, c.domain);
      o.summary["star_normalized"] = satisfies_star(g, c.domain, g.grid_step);
    }
    if (tp.contains("targets")) {
      std::vector<Point> targets;
      for (const auto& t : tp["targets"]) targets.push_back(io::vec_from_json(t));
      const auto ext = boundary_extension_check(g, targets);
      o.summary["extension"] = {{"oscillation", ext.oscillation}, {"target_distance", ext.target_distance}};
    }
    o.summary["complex_geodesic"] = {{"defect", g.defect}, {"accepted", g.accepted}, {"source", g.source}};
    o.extra_files.emplace_back(".geodesic.json", io::geodesic_to_json(g).dump(2) + "\n");
    if (!g.accepted) o.exit_code = kExitSolver;
  }
  const auto path = real_geodesic(c.domain, z, w, nodes, c.solver, go);
  io::CsvWriter csv({"index", "t", "point", "delta"});
  for (std::size_t i = 0; i < path.nodes.size(); ++i)
    csv.row(i, path.params[i], path.nodes[i], c.domain.boundary_distance(path.nodes[i]));
  o.csv = csv.str();
  o.summary["rows"] = path.nodes.size();
  o.summary["dropped"] = 0;
  o.summary["real_geodesic"] = {{"route", path.route},
                                {"length", path.length()},
                                {"defect", path.defect},
                                {"declared_error", path.declared_error},
                                {"accepted", path.accepted}};
  if (!path.accepted) o.exit_code = kExitSolver;
  return o;
}

inline Outcome task_mconvex(const Context& c) {
  const json tp = c.task_params();
  const auto r = m_convexity_probe(c.domain, tp.value("m", 2.0), tp.value("samples", 30), c.seed,
                                   tp.value("threshold", 0.1));
  io::CsvWriter w({"index", "z", "delta", "ratio"});
  for (std::size_t i = 0; i < r.rows.size(); ++i) w.row(i, r.rows[i].z, r.rows[i].delta, r.rows[i].ratio);
  Outcome o;
  o.csv = w.str();
  o.summary = {{"rows", r.rows.size()},  {"dropped", 0},
               {"max_ratio", io::number(r.max_ratio)}, {"near_ratio", io::number(r.near_ratio)},
               {"far_ratio", io::number(r.far_ratio)}, {"divergent", r.divergent}};
  return o;
}

inline Context parse(const json& cfg, const RunOverrides& ov) {
  if (!cfg.is_object()) throw ConfigError("config must be a JSON object");
  Context c;
  c.cfg = cfg;
  if (ov.task) c.task = *ov.task;
  else if (cfg.contains("task") && cfg["task"].is_string()) c.task = cfg["task"].get<std::string>();
  else throw ConfigError("config needs a \"task\"");
  const auto& names = task_names();
  if (std::find(names.begin(), names.end(), c.task) == names.end()) throw ConfigError("unknown task \"" + c.task + "\"");
  if (ov.seed) c.seed = *ov.seed;
  else if (cfg.contains("seed") && cfg["seed"].is_number_unsigned()) c.seed = cfg["seed"].get<std::uint64_t>();
  else throw ConfigError("config needs a nonnegative integer \"seed\"");
  if (!cfg.contains("domain")) throw ConfigError("config needs a \"domain\"");
  c.domain = io::domain_from_json(cfg["domain"]);
  SolverConfig base;
  base.seed = c.seed;
  c.solver = io::solver_from_json(cfg.value("solver", json::object()), base);
  if (ov.seed) c.solver.seed = *ov.seed;
  c.threads = ov.threads.value_or(cfg.value("threads", 0u));
  c.failure_threshold = cfg.value("failure_threshold", 0.1);
  const json s = cfg.value("samples", json::object());
  if (!s.is_object()) throw ConfigError("\"samples\" must be an object");
  c.pairs = s.value("pairs_count", s.contains("pairs") && s["pairs"].is_number() ? s["pairs"].get<int>() : c.pairs);
  c.tangents =
      s.value("tangents_count", s.contains("tangents") && s["tangents"].is_number() ? s["tangents"].get<int>() : 0);
  c.delta_min = s.value("delta_min", c.delta_min);
  c.delta_max = s.value("delta_max", c.delta_max);
  if (c.pairs < 0 || c.tangents < 0) throw ConfigError("sample counts must be nonnegative");
  if (!(c.delta_min > 0.0) || !(c.delta_max >= c.delta_min)) throw ConfigError("need 0 < delta_min <= delta_max");
  return c;
}

}  // namespace run_detail

/// Runs one configured task; writes <dir>/<prefix>.csv and <prefix>.summary.json when an output
/// directory is set. Configuration problems are reported as exit code 1 in the result.
inline RunResult run_config(const io::json& cfg, const RunOverrides& ov = {}) {
  RunResult res;
  try {
    const auto c = run_detail::parse(cfg, ov);
    res.task = c.task;
    run_detail::Outcome o;
    if (c.task == "metric") o = run_detail::task_metric(c);
    else if (c.task == "sandwich") o = run_detail::task_sandwich(c);
    else if (c.task == "theorem1") o = run_detail::task_theorem1(c);
    else if (c.task == "localize") o = run_detail::task_localize(c);
    else if (c.task == "classical") o = run_detail::task_classical(c);
    else if (c.task == "visibility") o = run_detail::task_visibility(c);
    else if (c.task == "completeness") o = run_detail::task_completeness(c);
    else if (c.task == "geodesic") o = run_detail::task_geodesic(c);
    else o = run_detail::task_mconvex(c);
    res.exit_code = o.exit_code;
    res.csv = std::move(o.csv);
    res.summary = std::move(o.summary);
    res.summary["task"] = c.task;
    res.summary["seed"] = c.seed;
    res.summary["domain"] = io::domain_to_json(c.domain);
    res.summary["solver"] = io::solver_to_json(c.solver);
    res.summary["exit_code"] = res.exit_code;
    const auto out_dir = ov.out_dir ? *ov.out_dir : c.cfg.value("output", io::json::object()).value("dir", "");
    if (!out_dir.empty()) {
      const std::string prefix = c.cfg.value("output", io::json::object()).value("prefix", c.task);
      std::filesystem::create_directories(out_dir);
      const auto base = (std::filesystem::path(out_dir) / prefix).string();
      io::write_file(base + ".csv", res.csv);
      io::write_file(base + ".summary.json", res.summary.dump(2) + "\n");
      res.files = {base + ".csv", base + ".summary.json"};
      for (const auto& [suffix, content] : o.extra_files) {
        io::write_file(base + suffix, content);
        res.files.push_back(base + suffix);
      }
    }
  } catch (const SolverFailure& e) {
    res.exit_code = kExitSolver;
    res.summary = {{"task", res.task}, {"exit_code", kExitSolver}, {"error", e.what()}};
  } catch (const Error& e) {
    res.exit_code = kExitConfig;
    res.summary = {{"task", res.task}, {"exit_code", kExitConfig}, {"error", e.what()}};
  } catch (const io::json::exception& e) {
    res.exit_code = kExitConfig;
    res.summary = {{"task", res.task}, {"exit_code", kExitConfig}, {"error", e.what()}};
  }
  return res;
}

/// Geometry summary for a domain; runs no solvers.
inline std::string describe(const DomainGeometry& d) {
  std::ostringstream os;
  const bool convex = d.is_convex_set();
  const bool planar = d.dimension() == 1;
  os << "kind: " << kind_name(d.kind()) << "\n";
  os << "dimension: " << d.dimension() << "\n";
  os << "bounded: " << (d.bounded() ? "yes" : "no") << "\n";
  os << "convex: " << (convex ? "yes" : "no") << "\n";
  std::string closed;
  if (!d.has_closed_form()) closed = "no (bracketed by extremal solvers)";
  else if (d.kind() == DomainKind::Annulus) closed = "yes (Kobayashi via the strip covering)";
  else closed = "yes";
  os << "closed form: " << closed << "\n";
  if (d.kind() == DomainKind::Intersection) {
    const auto& s = d.as<shape::Intersection>();
    os << "base: " << kind_name(s.base->kind()) << "\n";
    os << "window: center " << io::fmt(s.center) << ", radius " << io::fmt(s.radius) << "\n";
    os << "connected: yes (grid flood fill at construction)\n";
  }
  std::vector<std::string> parts;
  parts.push_back(convex ? "convex" : (planar ? "non-convex planar" : "non-convex"));
  if (d.kind() == DomainKind::Annulus) parts.push_back("Kobayashi closed-form via covering");
  else if (d.has_closed_form()) parts.push_back("closed-form");
  else parts.push_back("bracketed");
  if (!planar) {
    const auto v = disc_free_certificate(d, 64, 0.4, 0);
    os << "boundary: " << (v.disc_found ? "contains affine discs" : "no affine disc found") << "\n";
    parts.push_back(v.disc_found ? "boundary contains discs" : "boundary disc-free");
  }
  os << "summary: ";
  for (std::size_t i = 0; i < parts.size(); ++i) os << (i ? ", " : "") << parts[i];
  os << "\n";
  return os.str();
}

}  // namespace invmetric
