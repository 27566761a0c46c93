#pragma once

#include <optional>
#include <string>
#include <vector>

#include "finsler/metric.hpp"

namespace finsler {

enum class CurvatureKind { None, ConstantSectional, ConstantHolomorphic };
const char* to_string(CurvatureKind kind);

/// Reproducible description of a gallery entry. Everything needed to rebuild
/// the entry lives here, so it round-trips through configuration files.
struct GallerySpec {
  // constant-curvature-2d | flat-kahler-4d | fubini-study-4d | randers-closed | custom
  std::string family;
  // flat | sphere | hyperbolic | constant (randers-closed only, uses `diagonal`)
  std::string kind = "flat";
  double c = 0.0;
  int dimension = 2;
  std::string potential;       // randers-closed: f with tau = df
  std::vector<double> diagonal; // randers-closed with kind "constant"
  // custom: g_ij and tau_i as expressions in x1..xn
  std::vector<std::vector<std::string>> metric_expressions;
  std::vector<std::string> form_expressions;
  std::optional<int> expected_dimension; // custom only
  std::optional<double> half_width;      // explicit box; absent means auto-shrink from 0.5
  double fd_step = 1e-3;
};

struct Certificate {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// A certified Randers configuration F = sqrt(g) + tau on a chart box.
struct GalleryEntry {
  std::string name;
  GallerySpec spec; // with the chosen box recorded in spec.half_width
  ChartDomain chart;
  MetricComponents g;
  OneFormField tau;
  TwoFormField omega; // d tau = c * omega
  std::optional<Matrix> J;
  std::optional<int> expected_dimension;
  CurvatureKind curvature_kind = CurvatureKind::None;
  std::optional<double> expected_curvature;
  double c = 0.0;
  double margin = 0.0;
  std::vector<Certificate> certificates;

  RandersData randers() const { return {g, tau}; }
  MetricField metric() const { return randers_metric(randers(), name); }
  int dimension() const { return chart.dimension(); }
};

// Boxes are [-h, h]^n. Without an explicit half-width the box starts at 0.5
// and shrinks by 0.8 until the entry is admissible; an explicit box that is
// not admissible raises ConvexityViolation.
GalleryEntry make_constant_curvature_2d(const std::string& kind, double c,
                                        std::optional<double> half_width = std::nullopt);
GalleryEntry make_flat_kahler_4d(double c, std::optional<double> half_width = std::nullopt);
GalleryEntry make_fubini_study_4d(double c, std::optional<double> half_width = std::nullopt);
GalleryEntry make_randers_closed(const std::string& g_kind, const std::string& potential, int dimension,
                                 std::optional<double> half_width = std::nullopt);

GalleryEntry build_entry(const GallerySpec& spec, const std::string& name = {});

// Conformal factor lambda(r^2) of the flat / sphere / hyperbolic model metric.
double conformal_factor(const std::string& kind, double r2);
// A(r) with d(A(r)(x1 dx2 - x2 dx1)) = c * lambda dx1^dx2, from Gauss-Legendre
// quadrature of c * int_0^1 t lambda(r t) dt.
double radial_primitive(const std::string& kind, double c, double r);

// Registered example names, in a fixed order.
std::vector<std::string> gallery_names();
// Throws ErrorKind::Usage for unknown names.
GallerySpec gallery_spec(const std::string& name);
GalleryEntry gallery_entry(const std::string& name);

} // namespace finsler
