#include "finsler/gallery.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "finsler/curvature.hpp"
#include "finsler/expr.hpp"
#include "finsler/grid.hpp"
#include "finsler/symmetry.hpp"

namespace finsler {

const char* to_string(CurvatureKind kind) {
  switch (kind) {
  case CurvatureKind::None: return "none";
  case CurvatureKind::ConstantSectional: return "constant-sectional";
  case CurvatureKind::ConstantHolomorphic: return "constant-holomorphic";
  }
  return "none";
}

namespace {

constexpr double kDefaultHalfWidth = 0.5;
constexpr double kShrinkFactor = 0.8;
constexpr int kMaxShrinks = 30;
constexpr std::uint64_t kCertificateSeed = 7;

void require_kind(const std::string& kind) {
  if (kind != "flat" && kind != "sphere" && kind != "hyperbolic")
    throw Error(ErrorKind::Usage, "unknown model metric kind '" + kind + "' (flat, sphere, hyperbolic)");
}

double model_curvature(const std::string& kind) {
  if (kind == "sphere") return 1.0;
  if (kind == "hyperbolic") return -1.0;
  return 0.0;
}

MetricComponents conformal_metric(const std::string& kind, int n) {
  return [kind, n](const Vector& x) -> Matrix {
    return conformal_factor(kind, x.squaredNorm()) * Matrix::Identity(n, n);
  };
}

Matrix kahler_form_flat() {
  Matrix w = Matrix::Zero(4, 4);
  w(0, 1) = 1.0;
  w(1, 0) = -1.0;
  w(2, 3) = 1.0;
  w(3, 2) = -1.0;
  return w;
}

std::string describe_box(double half, int n) {
  std::ostringstream os;
  os << "[" << -half << ", " << half << "]^" << n;
  return os.str();
}

// Shared admissibility and certification. `build` produces an uncertified
// entry for a given half-width.
template <class Build>
GalleryEntry certify(const GallerySpec& spec, Build build) {
  const bool automatic = !spec.half_width.has_value();
  double half = automatic ? kDefaultHalfWidth : *spec.half_width;
  if (!(half > 0.0)) throw Error(ErrorKind::DegenerateInput, "box half-width must be positive");

  for (int attempt = 0;; ++attempt) {
    std::optional<GalleryEntry> candidate;
    std::string reason;
    try {
      candidate.emplace(build(half));
      const int n = candidate->dimension();
      const auto lattice = box_lattice(candidate->chart, n == 2 ? 21 : 7);
      candidate->margin = convexity_margin(candidate->randers(), lattice);
      if (!(candidate->margin > 0.0)) {
        std::ostringstream os;
        os << "convexity margin " << candidate->margin << " on " << describe_box(half, n);
        reason = os.str();
        candidate.reset();
      }
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::ConvexityViolation && e.kind() != ErrorKind::IndefiniteMetric
          && e.kind() != ErrorKind::DegenerateInput)
        throw;
      reason = e.what();
      candidate.reset();
    }
    if (candidate) {
      GalleryEntry entry = std::move(*candidate);
      entry.spec.half_width = half;
      entry.certificates.push_back({"convexity-margin", entry.margin, 0.0, true});
      return entry;
    }
    if (!automatic || attempt >= kMaxShrinks) {
      throw Error(ErrorKind::ConvexityViolation,
                  spec.family + " entry is not admissible (" + reason + "); use a smaller box or smaller |c|");
    }
    half *= kShrinkFactor;
  }
}

void add_certificate(GalleryEntry& entry, std::string name, double value, double tolerance) {
  entry.certificates.push_back({std::move(name), value, tolerance, value <= tolerance});
}

void run_certificates(GalleryEntry& entry, bool check_omega_closed) {
  const ChartDomain& chart = entry.chart;
  const double h = chart.fd_step();
  const auto points = halton_points(chart, 24, kCertificateSeed, 0.9);

  const TwoFormField dtau = exterior_derivative_extrapolated(entry.tau, h);
  double form_defect = 0.0;
  for (const Vector& x : points) {
    chart.require_interior(x, h);
    form_defect = std::max(form_defect, (dtau(x) - entry.c * entry.omega(x)).cwiseAbs().maxCoeff());
  }
  add_certificate(entry, "dtau-equals-c-omega", form_defect, 1e-6);

  if (check_omega_closed) {
    double defect = 0.0;
    for (const Vector& x : points) defect = std::max(defect, closedness_defect(entry.omega, x, chart));
    add_certificate(entry, "omega-closed", defect, 1e-6);
  }

  if (entry.expected_curvature) {
    const double expected = *entry.expected_curvature;
    if (entry.curvature_kind == CurvatureKind::ConstantHolomorphic && entry.J) {
      const CurvatureSweep sweep = curvature_sweep(entry.g, chart, 50, kCertificateSeed, 0.8, &*entry.J);
      add_certificate(entry, "holomorphic-curvature-stddev", sweep.stddev, 1e-3);
      add_certificate(entry, "holomorphic-curvature-mean", std::abs(sweep.mean - expected), 1e-3);
    } else {
      const CurvatureSweep sweep = curvature_sweep(entry.g, chart, 50, kCertificateSeed, 0.8);
      const double deviation = std::max(std::abs(sweep.max - expected), std::abs(sweep.min - expected));
      add_certificate(entry, "sectional-curvature", deviation, expected == 0.0 ? 1e-4 : 1e-3);
    }
  }

  std::string failed;
  for (const Certificate& cert : entry.certificates) {
    if (!cert.pass) {
      std::ostringstream os;
      os << (failed.empty() ? "" : ", ") << cert.name << " = " << cert.value << " > " << cert.tolerance;
      failed += os.str();
    }
  }
  if (!failed.empty())
    throw Error(ErrorKind::ConstructionInvalid, entry.name + " failed its certificates: " + failed);
}

struct UnitQuadrature {
  std::vector<double> nodes, weights;
  UnitQuadrature() { gauss_legendre(24, 0.0, 1.0, nodes, weights); }
};

} // namespace

double conformal_factor(const std::string& kind, double r2) {
  if (kind == "flat") return 1.0;
  if (kind == "sphere") return 4.0 / ((1.0 + r2) * (1.0 + r2));
  if (kind == "hyperbolic") {
    if (!(r2 < 1.0)) throw Error(ErrorKind::DegenerateInput, "point outside the unit-disk model");
    return 4.0 / ((1.0 - r2) * (1.0 - r2));
  }
  require_kind(kind);
  return 1.0;
}

double radial_primitive(const std::string& kind, double c, double r) {
  static const UnitQuadrature q;
  double s = 0.0;
  for (std::size_t k = 0; k < q.nodes.size(); ++k) {
    const double t = q.nodes[k];
    s += q.weights[k] * t * conformal_factor(kind, r * r * t * t);
  }
  return c * s;
}

namespace {

GalleryEntry constant_curvature_impl(const GallerySpec& spec) {
  const std::string kind = spec.kind;
  const double c = spec.c;
  require_kind(kind);
  if (spec.dimension != 2) throw Error(ErrorKind::Usage, "constant-curvature-2d is two-dimensional");

  GalleryEntry entry = certify(spec, [&](double half) {
    const ChartDomain chart = ChartDomain::cube(2, half, spec.fd_step);
    if (kind == "hyperbolic" && !(2.0 * half * half < 1.0))
      throw Error(ErrorKind::DegenerateInput, "box leaves the unit-disk model");
    OneFormField tau = [kind, c](const Vector& x) -> Vector {
      const double A = radial_primitive(kind, c, x.norm());
      Vector t(2);
      t << -A * x[1], A * x[0];
      return t;
    };
    TwoFormField omega = [kind](const Vector& x) -> Matrix {
      const double lambda = conformal_factor(kind, x.squaredNorm());
      Matrix w(2, 2);
      w << 0.0, lambda, -lambda, 0.0;
      return w;
    };
    return GalleryEntry{"", spec, chart, conformal_metric(kind, 2), std::move(tau), std::move(omega),
                        std::nullopt, 3, CurvatureKind::ConstantSectional, model_curvature(kind), c, 0.0, {}};
  });
  entry.name = "constant-curvature-2d/" + kind;
  run_certificates(entry, false);
  return entry;
}

GalleryEntry flat_kahler_impl(const GallerySpec& spec) {
  const double c = spec.c;
  const Matrix J = standard_complex_structure(4);
  GalleryEntry entry = certify(spec, [&](double half) {
    const ChartDomain chart = ChartDomain::cube(4, half, spec.fd_step);
    // tau = (c/2)(x1 dx2 - x2 dx1 + x3 dx4 - x4 dx3) = (c/2) J x
    OneFormField tau = [J, c](const Vector& x) -> Vector { return 0.5 * c * (J * x); };
    TwoFormField omega = [](const Vector&) -> Matrix { return kahler_form_flat(); };
    MetricComponents g = [](const Vector&) -> Matrix { return Matrix::Identity(4, 4); };
    return GalleryEntry{"", spec, chart, std::move(g), std::move(tau), std::move(omega), J,
                        c != 0.0 ? 8 : 10, CurvatureKind::ConstantHolomorphic, 0.0, c, 0.0, {}};
  });
  entry.name = "flat-kahler-4d";
  run_certificates(entry, false);
  return entry;
}

GalleryEntry fubini_study_impl(const GallerySpec& spec) {
  const double c = spec.c;
  const Matrix J = standard_complex_structure(4);
  GalleryEntry entry = certify(spec, [&](double half) {
    const ChartDomain chart = ChartDomain::cube(4, half, spec.fd_step);
    MetricComponents g = [J](const Vector& x) -> Matrix {
      const double s = 1.0 + x.squaredNorm();
      const Vector jx = J * x;
      return (s * Matrix::Identity(4, 4) - x * x.transpose() - jx * jx.transpose()) / (s * s);
    };
    TwoFormField omega = [J, g](const Vector& x) -> Matrix { return J.transpose() * g(x); };
    OneFormField tau = [J, c](const Vector& x) -> Vector {
      return (c / (2.0 * (1.0 + x.squaredNorm()))) * (J * x);
    };
    return GalleryEntry{"", spec, chart, std::move(g), std::move(tau), std::move(omega), J,
                        8, CurvatureKind::ConstantHolomorphic, 4.0, c, 0.0, {}};
  });
  entry.name = "fubini-study-4d";
  run_certificates(entry, true);
  return entry;
}

GalleryEntry randers_closed_impl(const GallerySpec& spec) {
  const int n = spec.dimension;
  if (n < 2) throw Error(ErrorKind::DegenerateInput, "dimension must be at least 2");
  const bool constant = spec.kind == "constant";
  if (!constant) require_kind(spec.kind);
  if (constant) {
    if (static_cast<int>(spec.diagonal.size()) != n)
      throw Error(ErrorKind::Usage, "constant metric needs one diagonal entry per dimension");
    for (double d : spec.diagonal)
      if (!(d > 0.0)) throw Error(ErrorKind::IndefiniteMetric, "constant metric diagonal must be positive");
  }
  const Expression f = Expression::parse(spec.potential);
  if (f.max_variable() > n)
    throw Error(ErrorKind::Usage, "potential '" + spec.potential + "' uses more than " + std::to_string(n)
                                      + " coordinates");

  GalleryEntry entry = certify(spec, [&](double half) {
    const ChartDomain chart = ChartDomain::cube(n, half, spec.fd_step);
    if (spec.kind == "hyperbolic" && !(n * half * half < 1.0))
      throw Error(ErrorKind::DegenerateInput, "box leaves the unit-ball model");
    MetricComponents g;
    if (constant) {
      Vector d = Eigen::Map<const Vector>(spec.diagonal.data(), n);
      g = [d](const Vector&) -> Matrix { return d.asDiagonal(); };
    } else {
      g = conformal_metric(spec.kind, n);
    }
    OneFormField tau = expression_gradient(f);
    TwoFormField omega = [n](const Vector&) -> Matrix { return Matrix::Zero(n, n); };
    return GalleryEntry{"", spec, chart, std::move(g), std::move(tau), std::move(omega), std::nullopt,
                        n * (n + 1) / 2, CurvatureKind::ConstantSectional,
                        constant ? 0.0 : model_curvature(spec.kind), 0.0, 0.0, {}};
  });
  entry.name = "randers-closed/" + spec.kind;
  run_certificates(entry, false);
  return entry;
}

GalleryEntry make_custom(const GallerySpec& spec) {
  const int n = spec.dimension;
  if (static_cast<int>(spec.metric_expressions.size()) != n
      || std::any_of(spec.metric_expressions.begin(), spec.metric_expressions.end(),
                     [n](const auto& row) { return static_cast<int>(row.size()) != n; }))
    throw Error(ErrorKind::Usage, "custom metric needs an n x n matrix of expressions");
  if (static_cast<int>(spec.form_expressions.size()) != n)
    throw Error(ErrorKind::Usage, "custom one-form needs n expressions");

  std::vector<Expression> gij, ti;
  for (const auto& row : spec.metric_expressions)
    for (const auto& e : row) gij.push_back(Expression::parse(e));
  for (const auto& e : spec.form_expressions) ti.push_back(Expression::parse(e));
  for (const auto& e : gij)
    if (e.max_variable() > n) throw Error(ErrorKind::Usage, "metric expression uses too many coordinates");
  for (const auto& e : ti)
    if (e.max_variable() > n) throw Error(ErrorKind::Usage, "one-form expression uses too many coordinates");

  GalleryEntry entry = certify(spec, [&](double half) {
    const ChartDomain chart = ChartDomain::cube(n, half, spec.fd_step);
    MetricComponents g = [gij, n](const Vector& x) -> Matrix {
      Matrix m(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = gij[i * n + j](x);
      return symmetric_part(m);
    };
    OneFormField tau = [ti, n](const Vector& x) -> Vector {
      Vector t(n);
      for (int i = 0; i < n; ++i) t[i] = ti[i](x);
      return t;
    };
    TwoFormField omega = exterior_derivative_extrapolated(tau, spec.fd_step);
    return GalleryEntry{"", spec, chart, std::move(g), std::move(tau), std::move(omega), std::nullopt,
                        spec.expected_dimension, CurvatureKind::None, std::nullopt, 1.0, 0.0, {}};
  });
  entry.name = "custom";
  run_certificates(entry, false);
  return entry;
}

} // namespace

GalleryEntry make_constant_curvature_2d(const std::string& kind, double c, std::optional<double> half_width) {
  GallerySpec spec;
  spec.family = "constant-curvature-2d";
  spec.kind = kind;
  spec.c = c;
  spec.half_width = half_width;
  return constant_curvature_impl(spec);
}

GalleryEntry make_flat_kahler_4d(double c, std::optional<double> half_width) {
  GallerySpec spec;
  spec.family = "flat-kahler-4d";
  spec.c = c;
  spec.dimension = 4;
  spec.half_width = half_width;
  return flat_kahler_impl(spec);
}

GalleryEntry make_fubini_study_4d(double c, std::optional<double> half_width) {
  GallerySpec spec;
  spec.family = "fubini-study-4d";
  spec.kind = "fubini-study";
  spec.c = c;
  spec.dimension = 4;
  spec.half_width = half_width;
  return fubini_study_impl(spec);
}

GalleryEntry make_randers_closed(const std::string& g_kind, const std::string& potential, int dimension,
                                 std::optional<double> half_width) {
  GallerySpec spec;
  spec.family = "randers-closed";
  spec.kind = g_kind;
  spec.potential = potential;
  spec.dimension = dimension;
  spec.half_width = half_width;
  return randers_closed_impl(spec);
}

GalleryEntry build_entry(const GallerySpec& spec, const std::string& name) {
  GalleryEntry entry = [&] {
    if (spec.family == "constant-curvature-2d") return constant_curvature_impl(spec);
    if (spec.family == "flat-kahler-4d") {
      if (spec.dimension != 4) throw Error(ErrorKind::Usage, "flat-kahler-4d is four-dimensional");
      return flat_kahler_impl(spec);
    }
    if (spec.family == "fubini-study-4d") {
      if (spec.dimension != 4) throw Error(ErrorKind::Usage, "fubini-study-4d is four-dimensional");
      return fubini_study_impl(spec);
    }
    if (spec.family == "randers-closed") return randers_closed_impl(spec);
    if (spec.family == "custom") return make_custom(spec);
    throw Error(ErrorKind::Usage, "unknown gallery family '" + spec.family + "'");
  }();
  if (!name.empty()) entry.name = name;
  return entry;
}

std::vector<std::string> gallery_names() {
  return {"example-2",          "example-2-sphere", "example-2-flat4d", "example-2.5", "example-2.5-sphere",
          "example-2.5-hyperbolic", "example-3",    "example-3-fs",     "example-4",   "flat-4d"};
}

GallerySpec gallery_spec(const std::string& name) {
  GallerySpec s;
  if (name == "example-2") {
    s.family = "randers-closed";
    s.kind = "flat";
    s.potential = "0.3*x1";
  } else if (name == "example-2-sphere") {
    s.family = "randers-closed";
    s.kind = "sphere";
    s.potential = "0.1*sin(x1)";
  } else if (name == "example-2-flat4d") {
    s.family = "randers-closed";
    s.kind = "flat";
    s.potential = "0.2*x1";
    s.dimension = 4;
  } else if (name == "example-2.5") {
    s.family = "constant-curvature-2d";
    s.kind = "flat";
    s.c = 0.4;
  } else if (name == "example-2.5-sphere" || name == "example-2.5-hyperbolic") {
    s.family = "constant-curvature-2d";
    s.kind = name == "example-2.5-sphere" ? "sphere" : "hyperbolic";
    s.c = 0.3;
  } else if (name == "example-3") {
    s.family = "flat-kahler-4d";
    s.c = 0.2;
    s.dimension = 4;
  } else if (name == "example-3-fs") {
    s.family = "fubini-study-4d";
    s.kind = "fubini-study";
    s.c = 0.1;
    s.dimension = 4;
  } else if (name == "example-4") {
    s.family = "randers-closed";
    s.kind = "constant";
    s.diagonal = {4.0, 1.0};
    s.potential = "0.1*x1";
  } else if (name == "flat-4d") {
    s.family = "flat-kahler-4d";
    s.c = 0.0;
    s.dimension = 4;
  } else {
    std::string known;
    for (const auto& n : gallery_names()) known += (known.empty() ? "" : ", ") + n;
    throw Error(ErrorKind::Usage, "unknown example '" + name + "' (known: " + known + ")");
  }
  return s;
}

GalleryEntry gallery_entry(const std::string& name) { return build_entry(gallery_spec(name), name); }

} // namespace finsler
