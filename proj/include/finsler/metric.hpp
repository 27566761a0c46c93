#pragma once

#include <span>
#include <string>

#include "finsler/chart.hpp"

namespace finsler {

// Norm of a single tangent space, y -> F(x0, y) for a fixed x0.
using Norm = std::function<double(const Vector&)>;

/// Finsler length rate F(x, y): positively 1-homogeneous in y, positive
/// for y != 0. Evaluation goes through a plain closure so any norm family
/// (Randers, symmetrized, betterment output, ...) plugs into the same
/// geodesic and duality machinery.
struct MetricField {
  std::function<double(const Vector&, const Vector&)> eval;
  bool reversible = false;
  std::string name;

  double operator()(const Vector& x, const Vector& y) const { return eval(x, y); }
  Norm at(const Vector& x) const {
    return [f = eval, x](const Vector& y) { return f(x, y); };
  }
};

/// F(x,y) = sqrt(g_x(y,y)) + tau_x(y).
struct RandersData {
  MetricComponents g;
  OneFormField tau;
};

// |tau|_g = sqrt(tau^T g^{-1} tau) at x; throws IndefiniteMetric when the
// Cholesky factorization of g(x) fails.
double dual_length(const Matrix& g, const Vector& covector);

double randers_eval(const RandersData& data, const Vector& x, const Vector& y);

// Norm at a fixed point; the admissibility check runs once, not per call.
Norm randers_norm_at(const RandersData& data, const Vector& x);

MetricField randers_metric(RandersData data, std::string name = "randers");
MetricField riemannian_metric(MetricComponents g, std::string name = "riemannian");
MetricField euclidean_metric(int dimension);

double symmetrize_eval(const MetricField& F, const Vector& x, const Vector& y);
MetricField symmetrize(MetricField F);

// (x, y) -> F(x,y) + sigma_x(y). Positivity on the unit F-sphere is checked
// at every sample point against `check_directions` directions (uniform
// polygon in 2D, coordinate/diagonal set otherwise) and a violation raises
// ConvexityViolation naming the point.
MetricField add_one_form(MetricField F, OneFormField sigma, std::span<const Vector> sample_points,
                         int check_directions = 256);

// min over samples of 1 - |tau|_g.
double convexity_margin(const RandersData& data, std::span<const Vector> sample_points);

// Tensor grid with `per_axis` points per axis spanning the chart box
// (corners included).
std::vector<Vector> box_lattice(const ChartDomain& chart, int per_axis);

} // namespace finsler
