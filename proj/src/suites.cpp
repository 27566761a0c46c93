#include "finsler/suites.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <future>
#include <limits>

#include "finsler/curvature.hpp"
#include "finsler/duality.hpp"
#include "finsler/expr.hpp"

namespace finsler {

namespace {

using CheckList = std::vector<CheckRecord>;

Json vector_json(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Json matrix_json(const Matrix& m) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(vector_json(m.row(i).transpose()));
  return a;
}

// Runs a group of checks, converting library errors into failing records
// and stamping runtimes when requested.
CheckList run_group(const std::string& fallback_id, const Json& inputs, bool timings,
                    const std::function<CheckList()>& body) {
  const auto start = std::chrono::steady_clock::now();
  CheckList list;
  try {
    list = body();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Usage) throw;
    list.push_back(check_error(fallback_id, inputs, std::string(to_string(e.kind())) + ": " + e.what()));
  }
  if (timings) {
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    for (CheckRecord& r : list) r.runtime = seconds;
  }
  return list;
}

Json environment_for(const RunConfig& cfg, const GalleryEntry& entry) {
  Json env;
  env["entry"] = entry.name;
  env["spec"] = spec_to_json(entry.spec);
  env["seed"] = cfg.seed;
  env["fd_step"] = entry.chart.fd_step();
  env["directions"] = direction_count(cfg, entry.dimension());
  env["distance_segments"] = cfg.distance.segments;
  env["distance_iterations"] = cfg.distance.iterations;
  env["distance_extrapolate"] = cfg.distance.extrapolate;
  env["ansatz_degree"] = cfg.degree;
  env["sv_threshold"] = cfg.sv_threshold;
  return env;
}

Json entry_inputs(const GalleryEntry& entry, const RunConfig& cfg) {
  return Json{{"spec", spec_to_json(entry.spec)}, {"seed", cfg.seed}};
}

GalleryEntry load_entry(const RunConfig& cfg) {
  const GallerySpec spec = resolve_spec(cfg);
  return build_entry(spec, cfg.example.empty() ? std::string() : cfg.example);
}

// ---------------------------------------------------------------- groups

CheckList gallery_checks(const GalleryEntry& entry, const RunConfig& cfg) {
  CheckList list;
  const Json inputs = entry_inputs(entry, cfg);
  for (const Certificate& cert : entry.certificates) {
    if (cert.name == "convexity-margin") list.push_back(check_above("gallery/" + cert.name, inputs, cert.value, 0.0));
    else list.push_back(check_at_most("gallery/" + cert.name, inputs, cert.value, cert.tolerance));
  }
  return list;
}

struct BettermentOutcome {
  double deviation = 0.0;
  std::vector<double> samples;
};

BettermentOutcome betterment_at(const GalleryEntry& entry, const Vector& x, const DirectionGrid& grid) {
  const Norm F = randers_norm_at(entry.randers(), x);
  const Betterment better(F, grid);
  const Matrix gx = entry.g(x);
  BettermentOutcome out;
  out.samples.reserve(grid.size());
  for (const Vector& u : grid.directions) {
    const double value = better(u);
    const double riemannian = std::sqrt(u.dot(gx * u));
    out.samples.push_back(value);
    out.deviation = std::max(out.deviation, std::abs(value - riemannian) / riemannian);
  }
  return out;
}

CheckList betterment_checks(const GalleryEntry& entry, const RunConfig& cfg) {
  const DirectionGrid grid = make_direction_grid(entry.dimension(), direction_count(cfg, entry.dimension()));
  std::vector<Vector> points{entry.chart.center()};
  for (const Vector& p : halton_points(entry.chart, 4, cfg.seed, 0.8)) points.push_back(p);

  double worst = 0.0;
  BettermentOutcome at_center;
  for (std::size_t i = 0; i < points.size(); ++i) {
    BettermentOutcome o = betterment_at(entry, points[i], grid);
    worst = std::max(worst, o.deviation);
    if (i == 0) at_center = std::move(o);
  }
  const QuadraticFit fit = riemannian_fit(at_center.samples, grid);

  Json inputs = entry_inputs(entry, cfg);
  inputs["directions"] = grid.size();
  CheckList list;
  CheckRecord recovers = check_at_most("betterment/recovers-g", inputs, worst, 1e-4);
  recovers.details["points"] = static_cast<int>(points.size());
  list.push_back(std::move(recovers));
  CheckRecord quad = check_at_most("betterment/riemannian-fit", inputs, fit.residual, 1e-6);
  quad.pass = quad.pass && fit.is_quadratic;
  quad.details["fitted_g"] = matrix_json(fit.g);
  quad.details["g_at_center"] = matrix_json(entry.g(entry.chart.center()));
  list.push_back(std::move(quad));
  return list;
}

CheckList curvature_checks(const GalleryEntry& entry, const RunConfig& cfg) {
  CheckList list;
  if (!entry.expected_curvature) return list;
  const double expected = *entry.expected_curvature;
  Json inputs = entry_inputs(entry, cfg);
  inputs["planes"] = cfg.curvature_planes;

  const bool holomorphic = entry.curvature_kind == CurvatureKind::ConstantHolomorphic && entry.J;
  const CurvatureSweep sweep = curvature_sweep(entry.g, entry.chart, cfg.curvature_planes, cfg.seed, 0.8,
                                               holomorphic ? &*entry.J : nullptr);
  Json values = Json::array();
  for (const CurvatureSample& s : sweep.samples) values.push_back(s.K);

  if (holomorphic) {
    CheckRecord spread = check_at_most("curvature/holomorphic-stddev", inputs, sweep.stddev, 1e-3);
    spread.details["values"] = values;
    list.push_back(std::move(spread));
    list.push_back(check_near("curvature/holomorphic-mean", inputs, sweep.mean, expected, 1e-3));
  } else {
    const double deviation = std::max(std::abs(sweep.max - expected), std::abs(sweep.min - expected));
    CheckRecord r = check_at_most("curvature/sectional", inputs, deviation, expected == 0.0 ? 1e-4 : 1e-3);
    r.expected = expected;
    r.details["values"] = values;
    r.details["mean"] = sweep.mean;
    list.push_back(std::move(r));
  }
  return list;
}

AlmostKillingConfig killing_config(const RunConfig& cfg) {
  AlmostKillingConfig k;
  k.degree = cfg.degree;
  k.sv_threshold = cfg.sv_threshold;
  k.seed = cfg.seed;
  k.sample_factor = cfg.sample_factor;
  k.cross_validate = cfg.cross_validate;
  k.flow_time = cfg.flow_time;
  k.flow_steps = cfg.flow_steps;
  k.triples = cfg.cross_triples;
  // Judged here rather than inside the solver so the measured value is reported.
  k.cross_tolerance = std::numeric_limits<double>::infinity();
  return k;
}

CheckList dimension_checks(const GalleryEntry& entry, const RunConfig& cfg, bool with_pullback) {
  const AlmostKillingConfig kc = killing_config(cfg);
  const AlmostKillingReport rep = almost_killing_dimension(entry.g, entry.tau, entry.chart, kc);
  Json inputs = entry_inputs(entry, cfg);
  inputs["degree"] = cfg.degree;
  inputs["sv_threshold"] = cfg.sv_threshold;
  inputs["sample_factor"] = cfg.sample_factor;

  CheckList list;
  const NullspaceResult& ns = rep.nullspace;
  CheckRecord dim = entry.expected_dimension
                        ? check_near("dimension/value", inputs, ns.dimension, *entry.expected_dimension, 0.0)
                        : check_above("dimension/value", inputs, ns.dimension, -1.0);
  dim.details["singular_values"] = ns.singular_values;
  dim.details["rows"] = rep.rows;
  dim.details["cols"] = rep.cols;
  dim.details["sample_points"] = rep.sample_points;
  list.push_back(std::move(dim));
  CheckRecord gap = check_above("dimension/spectral-gap", inputs, ns.gap, 100.0);
  if (ns.ambiguous) gap.note = "ambiguous rank";
  list.push_back(std::move(gap));

  if (cfg.cross_validate) {
    CheckRecord cross = check_at_most("dimension/cross-validation", inputs, rep.max_cross_difference,
                                      cfg.cross_tolerance);
    cross.details["per_field"] = rep.cross_validation;
    list.push_back(std::move(cross));
  }

  if (with_pullback && !ns.basis.empty()) {
    const VectorFieldAnsatz ansatz(entry.dimension(), cfg.degree);
    const MetricField F = entry.metric();
    const DirectionGrid grid = make_direction_grid(entry.dimension(), entry.dimension() == 2 ? 256 : 2000);
    const Vector x = entry.chart.center();
    const auto sample = halton_points(entry.chart, 64, cfg.seed, 0.9);
    double linearity = 0.0, closedness = 0.0;
    for (const Vector& coeffs : ns.basis) {
      double sup = 0.0;
      for (const Vector& p : sample) sup = std::max(sup, ansatz.evaluate(coeffs, p).norm());
      const VectorField K = ansatz.field(coeffs / sup);
      const PointMap phi = [&](const Vector& y) { return flow_map(K, cfg.flow_time, y, cfg.flow_steps, entry.chart); };
      const PullbackDelta pd = pullback_delta(F, phi, x, grid, entry.chart);
      linearity = std::max(linearity, pd.linearity_residual);
      closedness = std::max(closedness, pd.closedness_residual);
    }
    list.push_back(check_at_most("dimension/pullback-linearity", inputs, linearity, 1e-4));
    list.push_back(check_at_most("dimension/pullback-closedness", inputs, closedness, 1e-3));
  }
  return list;
}

OneFormField projective_differential(const GalleryEntry& entry, const RunConfig& cfg, std::string& description) {
  if (!cfg.projective_potential.empty()) {
    const Expression f = Expression::parse(cfg.projective_potential);
    if (f.max_variable() > entry.dimension())
      throw Error(ErrorKind::Usage, "projective potential uses more coordinates than the chart has");
    description = cfg.projective_potential;
    return expression_gradient(f);
  }
  // amplitude * sin(x1 + x2), with |df|_g at most half the convexity margin.
  const int n = entry.dimension();
  Vector direction = Vector::Zero(n);
  direction[0] = direction[1] = 1.0;
  double worst = 0.0;
  for (const Vector& x : box_lattice(entry.chart, n == 2 ? 11 : 5))
    worst = std::max(worst, dual_length(entry.g(x), direction));
  const double amplitude = std::min(0.2, 0.5 * entry.margin / worst);
  description = std::to_string(amplitude) + "*sin(x1+x2)";
  return [amplitude, direction](const Vector& x) -> Vector {
    return amplitude * std::cos(x[0] + x[1]) * direction;
  };
}

std::vector<TripleSample> triples_for(const GalleryEntry& entry, const RunConfig& cfg) {
  if (!cfg.triple_list.empty()) {
    for (const TripleSample& t : cfg.triple_list)
      for (const Vector* v : {&t.p, &t.q, &t.r})
        if (v->size() != entry.dimension() || !entry.chart.contains(*v))
          throw Error(ErrorKind::Usage, "configured triple point is outside the chart box");
    return cfg.triple_list;
  }
  return seeded_triples(entry.chart, cfg.triples, cfg.seed, cfg.triple_fraction);
}

CheckList t_invariance_checks(const GalleryEntry& entry, const RunConfig& cfg) {
  std::string description;
  const OneFormField df = projective_differential(entry, cfg, description);
  const MetricField F = entry.metric();
  const MetricField G = add_one_form(F, df, box_lattice(entry.chart, entry.dimension() == 2 ? 11 : 5));
  const auto triples = triples_for(entry, cfg);

  double tolerance = 0.0, worst = 0.0;
  Json rows = Json::array();
  for (const TripleSample& t : triples) {
    auto d = [&](const MetricField& M, const Vector& a, const Vector& b) {
      const CertifiedDistance c = certified_distance(M, a, b, entry.chart, cfg.distance);
      tolerance = std::max(tolerance, c.cauchy());
      return c.fine;
    };
    const double TF = d(F, t.p, t.q) + d(F, t.q, t.r) - d(F, t.p, t.r);
    const double TG = d(G, t.p, t.q) + d(G, t.q, t.r) - d(G, t.p, t.r);
    worst = std::max(worst, std::abs(TG - TF));
    rows.push_back(Json::array({TF, TG}));
  }
  // A floor keeps the bound meaningful when every path is exactly straight.
  const double solver_tolerance = std::max(tolerance, 1e-12);

  Json inputs = entry_inputs(entry, cfg);
  inputs["potential"] = description;
  inputs["triples"] = triples.size();
  inputs["segments"] = cfg.distance.segments;
  inputs["extrapolate"] = cfg.distance.extrapolate;
  CheckList list;
  CheckRecord change = check_at_most("t-invariance/projective-change", inputs, worst, 2.0 * solver_tolerance);
  change.details["potential"] = description;
  change.details["T_F_and_T_F_plus_df"] = rows;
  list.push_back(std::move(change));
  list.push_back(check_at_most("t-invariance/solver-tolerance", inputs, solver_tolerance, 1e-5));
  return list;
}

VerificationReport make_report(const std::string& suite, Json environment, std::vector<CheckList> groups) {
  VerificationReport report;
  report.suite = suite;
  report.environment = std::move(environment);
  for (CheckList& g : groups)
    for (CheckRecord& r : g) report.checks.push_back(std::move(r));
  report.sort_checks();
  return report;
}

} // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"verify",   "betterment",      "dimension", "distance",
                                                 "curvature", "invariant-forms", "triangle"};
  return names;
}

VerificationReport run_suite(const std::string& suite, const RunConfig& config) {
  if (suite == "verify") return run_verify(config);
  if (suite == "betterment") return run_betterment(config);
  if (suite == "dimension") return run_dimension(config);
  if (suite == "distance") return run_distance(config);
  if (suite == "curvature") return run_curvature(config);
  if (suite == "invariant-forms") return run_invariant_forms(config);
  if (suite == "triangle") return run_triangle(config);
  throw Error(ErrorKind::Usage, "unknown suite '" + suite + "'");
}

VerificationReport run_verify(const RunConfig& cfg) {
  const GalleryEntry entry = load_entry(cfg);
  const Json inputs = entry_inputs(entry, cfg);
  using Task = std::function<CheckList()>;
  const std::vector<std::pair<std::string, Task>> tasks = {
      {"gallery", [&] { return gallery_checks(entry, cfg); }},
      {"betterment", [&] { return betterment_checks(entry, cfg); }},
      {"curvature", [&] { return curvature_checks(entry, cfg); }},
      {"dimension", [&] { return dimension_checks(entry, cfg, true); }},
      {"t-invariance", [&] { return t_invariance_checks(entry, cfg); }},
  };
  // Groups are independent; results are merged and ordered by check id.
  std::vector<std::future<CheckList>> futures;
  for (const auto& [id, task] : tasks)
    futures.push_back(std::async(std::launch::async, [&, id = id, task = task] {
      return run_group(id + "/error", inputs, cfg.timings, task);
    }));
  std::vector<CheckList> groups;
  for (auto& f : futures) groups.push_back(f.get());
  return make_report("verify", environment_for(cfg, entry), std::move(groups));
}

VerificationReport run_betterment(const RunConfig& cfg) {
  const GalleryEntry entry = load_entry(cfg);
  const int n = entry.dimension();
  const Vector x = cfg.point ? *cfg.point : entry.chart.center();
  if (x.size() != n || !entry.chart.contains(x)) throw Error(ErrorKind::Usage, "betterment point is outside the chart box");
  if (cfg.sigma && cfg.sigma->size() != n) throw Error(ErrorKind::Usage, "sigma has the wrong dimension");

  Json inputs = entry_inputs(entry, cfg);
  inputs["point"] = vector_json(x);
  if (cfg.sigma) inputs["sigma"] = vector_json(*cfg.sigma);

  CheckList list = run_group("betterment/error", inputs, cfg.timings, [&] {
    const DirectionGrid grid = make_direction_grid(n, direction_count(cfg, n));
    const BettermentOutcome o = betterment_at(entry, x, grid);
    const QuadraticFit fit = riemannian_fit(o.samples, grid);
    CheckList out;
    CheckRecord recovers = check_at_most("betterment/recovers-g", inputs, o.deviation, 1e-4);
    recovers.details["samples"] = o.samples;
    out.push_back(std::move(recovers));
    CheckRecord quad = check_at_most("betterment/riemannian-fit", inputs, fit.residual, 1e-6);
    quad.pass = quad.pass && fit.is_quadratic;
    quad.details["is_quadratic"] = fit.is_quadratic;
    quad.details["fitted_g"] = matrix_json(fit.g);
    out.push_back(std::move(quad));
    if (cfg.sigma) {
      const Norm F = randers_norm_at(entry.randers(), x);
      const Vector sigma = *cfg.sigma;
      const Norm shifted = [F, sigma](const Vector& y) { return F(y) + sigma.dot(y); };
      const Betterment a(F, grid), b(shifted, grid);
      double deviation = 0.0;
      for (const Vector& u : grid.directions) deviation = std::max(deviation, std::abs(a(u) - b(u)));
      out.push_back(check_at_most("betterment/invariance", inputs, deviation, 1e-4));
      out.push_back(check_at_most("betterment/polar-translation", inputs, polar_translation_check(F, sigma, grid),
                                  1e-6));
    }
    return out;
  });
  Json env = environment_for(cfg, entry);
  return make_report("betterment", std::move(env), {std::move(list)});
}

VerificationReport run_dimension(const RunConfig& cfg) {
  const GalleryEntry entry = load_entry(cfg);
  const Json inputs = entry_inputs(entry, cfg);
  CheckList list = run_group("dimension/error", inputs, cfg.timings, [&] {
    CheckList out = dimension_checks(entry, cfg, false);
    // Spell out the basis fields in the report.
    const AlmostKillingReport rep = [&] {
      AlmostKillingConfig k = killing_config(cfg);
      k.cross_validate = false;
      return almost_killing_dimension(entry.g, entry.tau, entry.chart, k);
    }();
    const VectorFieldAnsatz ansatz(entry.dimension(), cfg.degree);
    Json fields = Json::array();
    for (const Vector& coeffs : rep.nullspace.basis) {
      Json terms = Json::array();
      const double top = coeffs.cwiseAbs().maxCoeff();
      for (int col = 0; col < coeffs.size(); ++col)
        if (std::abs(coeffs[col]) > 1e-8 * top) terms.push_back(Json::array({ansatz.describe(col), coeffs[col]}));
      fields.push_back(terms);
    }
    for (CheckRecord& r : out)
      if (r.id == "dimension/value") r.details["basis"] = fields;
    return out;
  });
  return make_report("dimension", environment_for(cfg, entry), {std::move(list)});
}

VerificationReport run_distance(const RunConfig& cfg) {
  const GalleryEntry entry = load_entry(cfg);
  if (!cfg.from || !cfg.to) throw Error(ErrorKind::Usage, "distance needs 'from' and 'to' points");
  const Vector p = *cfg.from, q = *cfg.to;
  if (p.size() != entry.dimension() || q.size() != entry.dimension() || !entry.chart.contains(p)
      || !entry.chart.contains(q))
    throw Error(ErrorKind::Usage, "distance endpoints must lie in the chart box");

  Json inputs = entry_inputs(entry, cfg);
  inputs["from"] = vector_json(p);
  inputs["to"] = vector_json(q);
  inputs["segments"] = cfg.distance.segments;
  inputs["iterations"] = cfg.distance.iterations;

  CheckList list = run_group("distance/error", inputs, cfg.timings, [&] {
    const MetricField F = entry.metric();
    Json trace = Json::array();
    std::vector<double> lengths;
    DistanceResult r;
    for (int level = 0; level < 3; ++level) {
      const DistanceOptions opts{cfg.distance.segments << level, cfg.distance.iterations << level};
      r = level == 0 ? minimize_distance(F, p, q, entry.chart, opts)
                     : minimize_distance(F, refine_path(r.path), entry.chart, opts);
      lengths.push_back(r.length);
      trace.push_back(Json{{"segments", static_cast<int>(r.path.size()) - 1}, {"iterations", r.iterations},
                           {"length", r.length}, {"straight_length", r.straight_length}});
    }
    double coarse = lengths[0], fine = lengths[1];
    if (cfg.distance.extrapolate) {
      coarse = (4.0 * lengths[1] - lengths[0]) / 3.0;
      fine = (4.0 * lengths[2] - lengths[1]) / 3.0;
    }
    CheckList out;
    CheckRecord cauchy = check_at_most("distance/cauchy", inputs, std::abs(fine - coarse), 1e-5);
    cauchy.details["trace"] = trace;
    cauchy.details["length"] = fine;
    out.push_back(std::move(cauchy));
    if (cfg.expected_distance)
      out.push_back(check_near("distance/value", inputs, fine, *cfg.expected_distance, 1e-5));
    return out;
  });
  return make_report("distance", environment_for(cfg, entry), {std::move(list)});
}

VerificationReport run_curvature(const RunConfig& cfg) {
  const GalleryEntry entry = load_entry(cfg);
  const Json inputs = entry_inputs(entry, cfg);
  CheckList list = run_group("curvature/error", inputs, cfg.timings, [&] {
    CheckList out = curvature_checks(entry, cfg);
    if (out.empty()) {
      // No expected value: report the spread of a plain sweep.
      const CurvatureSweep sweep = curvature_sweep(entry.g, entry.chart, cfg.curvature_planes, cfg.seed);
      CheckRecord r = check_above("curvature/finite", inputs, std::isfinite(sweep.mean) ? 1.0 : 0.0, 0.5);
      Json values = Json::array();
      for (const CurvatureSample& s : sweep.samples) values.push_back(s.K);
      r.details["values"] = values;
      r.details["mean"] = sweep.mean;
      r.details["stddev"] = sweep.stddev;
      out.push_back(std::move(r));
    }
    return out;
  });
  return make_report("curvature", environment_for(cfg, entry), {std::move(list)});
}

VerificationReport run_invariant_forms(const RunConfig& cfg) {
  std::vector<Matrix> generators;
  int expected = 0;
  if (cfg.subalgebra == "so2") {
    generators = so_generators(2);
    expected = 1;
  } else if (cfg.subalgebra == "so3") {
    generators = so_generators(3);
  } else if (cfg.subalgebra == "so4") {
    generators = so_generators(4);
  } else if (cfg.subalgebra == "u2") {
    generators = u2_generators();
    expected = 1;
  } else {
    throw Error(ErrorKind::Usage, "unknown subalgebra '" + cfg.subalgebra + "' (so2, so3, so4, u2)");
  }
  const Json inputs{{"subalgebra", cfg.subalgebra}};
  CheckList list = run_group("invariant-forms/error", inputs, cfg.timings, [&] {
    const InvariantFormsResult res = invariant_two_forms(generators);
    CheckList out;
    CheckRecord dim = check_near("invariant-forms/dimension", inputs, res.dimension, expected, 0.0);
    Json basis = Json::array();
    for (const Matrix& b : res.basis) basis.push_back(matrix_json(b));
    dim.details["basis"] = basis;
    out.push_back(std::move(dim));
    if (cfg.subalgebra == "u2" && res.dimension == 1) {
      Matrix omega = Matrix::Zero(4, 4);
      omega(0, 1) = omega(2, 3) = 1.0;
      omega(1, 0) = omega(3, 2) = -1.0;
      const Matrix& b = res.basis.front();
      const double cosine = std::abs((b.array() * omega.array()).sum()) / (b.norm() * omega.norm());
      out.push_back(check_at_most("invariant-forms/kahler-alignment", inputs, 1.0 - cosine, 1e-8));
    }
    return out;
  });
  Json env{{"subalgebra", cfg.subalgebra}, {"generators", generators.size()}};
  return make_report("invariant-forms", std::move(env), {std::move(list)});
}

VerificationReport run_triangle(const RunConfig& cfg) {
  const GalleryEntry entry = load_entry(cfg);
  const int n = entry.dimension();
  const auto triples = triples_for(entry, cfg);
  Json inputs = entry_inputs(entry, cfg);
  inputs["triples"] = triples.size();
  if (!cfg.flow_field.empty()) {
    inputs["flow_field"] = cfg.flow_field;
    inputs["flow_time"] = cfg.flow_time;
  }

  CheckList list = run_group("triangle/error", inputs, cfg.timings, [&] {
    const MetricField F = entry.metric();
    CheckList out;
    if (cfg.flow_field.empty()) {
      double lowest = std::numeric_limits<double>::infinity();
      Json values = Json::array();
      for (const TripleSample& t : triples) {
        const double T = triangular(F, t, entry.chart, cfg.distance);
        lowest = std::min(lowest, T);
        values.push_back(T);
      }
      // T >= 0 is the triangle inequality of the nonsymmetric distance.
      CheckRecord r = check_above("triangle/nonnegative", inputs, lowest, -1e-6);
      r.details["T"] = values;
      out.push_back(std::move(r));
      return out;
    }
    if (static_cast<int>(cfg.flow_field.size()) != n)
      throw Error(ErrorKind::Usage, "flow field needs one expression per coordinate");
    std::vector<Expression> comps;
    for (const std::string& e : cfg.flow_field) comps.push_back(Expression::parse(e));
    const VectorField K = [comps](const Vector& x) -> Vector {
      Vector v(static_cast<Eigen::Index>(comps.size()));
      for (std::size_t i = 0; i < comps.size(); ++i) v[static_cast<Eigen::Index>(i)] = comps[i](x);
      return v;
    };
    const PointMap phi = [&](const Vector& x) { return flow_map(K, cfg.flow_time, x, cfg.flow_steps, entry.chart); };
    const TInvarianceResult res = t_invariance_check(F, phi, triples, entry.chart, cfg.distance);
    CheckRecord r = check_at_most("triangle/invariance", inputs, res.max_diff, cfg.triangle_tolerance);
    Json rows = Json::array();
    for (const TripleCheckRow& row : res.rows) rows.push_back(Json::array({row.T, row.T_mapped}));
    r.details["T_and_T_mapped"] = rows;
    out.push_back(std::move(r));
    return out;
  });
  return make_report("triangle", environment_for(cfg, entry), {std::move(list)});
}

} // namespace finsler
