#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "finsler/grid.hpp"
#include "finsler/metric.hpp"

namespace finsler {

/// Unit ball K_F = {F <= 1} sampled along a direction grid as a star-shaped
/// body {r u : 0 <= r <= rho(u)} with rho(u) = 1 / F(u).
struct SupportSamples {
  DirectionGrid grid;
  std::vector<double> values;
};

SupportSamples unit_ball_samples(const Norm& F, const DirectionGrid& grid);
// Columns u_1..u_n,value.
void write_csv(std::ostream& os, const SupportSamples& samples);

// Maximizes a positively 0-homogeneous objective over directions near u0.
// The search stays within `radius` (radians, roughly) of u0 and only
// accepts improving moves, so the result never undercuts objective(u0).
double refine_direction_max(const std::function<double(const Vector&)>& objective, const Vector& u0,
                            double radius);

// Angular spacing used as refinement radius for a grid.
double grid_spacing(const DirectionGrid& grid);

/// Polar body K*_F of a norm at one tangent space.
///
/// Its gauge is the dual norm F*(xi) = max_y xi(y) / F(y). Queries first
/// take the maximum over the precomputed unit-sphere points u / F(u) and
/// then polish the maximizer locally.
class PolarBody {
public:
  PolarBody(Norm F, const DirectionGrid& grid);

  double gauge(const Vector& xi) const;
  // F* evaluated on the grid directions themselves.
  const std::vector<double>& grid_gauges() const { return grid_gauges_; }
  // Support function of the reconstructed body, max over xi of <xi, u> / F*(xi),
  // taken over the grid boundary points and the supporting covector dF_u.
  double support(const Vector& u) const;
  const DirectionGrid& grid() const { return grid_; }

private:
  Norm F_;
  DirectionGrid grid_;
  Matrix sphere_points_;   // n x m, columns u_i / F(u_i)
  Matrix boundary_points_; // n x m, columns xi_j / F*(xi_j)
  std::vector<double> grid_gauges_;
  double spacing_;
};

double dual_norm_eval(const Norm& F, const Vector& xi, const DirectionGrid& grid);

// Volume barycenter of the star body with gauge values `dual_gauges` on the
// grid; radial integrals are done exactly (R^{n+1}/(n+1), R^n/n).
Vector polar_barycenter(std::span<const double> dual_gauges, const DirectionGrid& grid);

/// F_better(y) = F(y) - <b_F, y> with b_F the barycenter of K*_F.
class Betterment {
public:
  Betterment(Norm F, const DirectionGrid& grid);

  double operator()(const Vector& y) const;
  const Vector& barycenter() const { return barycenter_; }

private:
  Norm F_;
  Vector barycenter_;
};

double betterment_eval(const Norm& F, const Vector& y, const DirectionGrid& grid);

struct QuadraticFit {
  bool is_quadratic = false;
  Matrix g;
  double residual = 0.0; // max relative residual of F^2 against u^T g u
};

QuadraticFit riemannian_fit(std::span<const double> samples, const DirectionGrid& grid, double tolerance = 1e-6);

// max_u |h_{K*_{F+sigma}}(u) - h_{K*_F}(u) - sigma(u)| through the full
// dualize-and-reconstruct pipeline.
double polar_translation_check(const Norm& F, const Vector& sigma, const DirectionGrid& grid);

} // namespace finsler
