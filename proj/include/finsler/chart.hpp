#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "finsler/errors.hpp"

namespace finsler {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

using ScalarField = std::function<double(const Vector&)>;
// Covector components tau_i(x).
using OneFormField = std::function<Vector(const Vector&)>;
// Antisymmetric component matrix beta_ij(x).
using TwoFormField = std::function<Matrix(const Vector&)>;
// Vector components K^i(x).
using VectorField = std::function<Vector(const Vector&)>;
// Symmetric positive-definite g_ij(x).
using MetricComponents = std::function<Matrix(const Vector&)>;
using PointMap = std::function<Vector(const Vector&)>;

/// Axis-aligned coordinate box with a fixed finite-difference step.
///
/// Every differential operator in the library uses symmetric stencils and
/// refuses to evaluate when the stencil would leave the box.
class ChartDomain {
public:
  ChartDomain(Vector lower, Vector upper, double fd_step = 1e-3);

  // Cube [-half_width, half_width]^n.
  static ChartDomain cube(int dimension, double half_width, double fd_step = 1e-3);

  int dimension() const { return static_cast<int>(lower_.size()); }
  const Vector& lower() const { return lower_; }
  const Vector& upper() const { return upper_; }
  double fd_step() const { return fd_step_; }
  Vector center() const { return 0.5 * (lower_ + upper_); }
  double min_edge() const;

  bool contains(const Vector& x, double margin = 0.0) const;

  // Throws ErrorKind::Boundary if the closed ball of radius `reach`
  // (max-norm) around x is not inside the box.
  void require_interior(const Vector& x, double reach) const;

  ChartDomain with_step(double fd_step) const;
  // Box scaled about its center by `factor`.
  ChartDomain shrunk(double factor) const;

private:
  Vector lower_;
  Vector upper_;
  double fd_step_;
};

// --- finite-difference helpers (second-order central differences) ---

// d/dx_axis of a scalar, vector or matrix valued field.
double partial(const ScalarField& f, const Vector& x, int axis, double h);
Vector partial(const std::function<Vector(const Vector&)>& f, const Vector& x, int axis, double h);
Matrix partial(const std::function<Matrix(const Vector&)>& f, const Vector& x, int axis, double h);

// J(a, i) = d f^a / d x^i.
Matrix jacobian(const std::function<Vector(const Vector&)>& f, const Vector& x, double h);

// Covector field df computed by central differences with step h.
OneFormField gradient_field(ScalarField f, double h);

// --- exterior and Lie calculus ---

// (d tau)_ij = d_i tau_j - d_j tau_i.
Matrix exterior_derivative(const OneFormField& tau, const Vector& x, const ChartDomain& chart);
TwoFormField exterior_derivative_field(OneFormField tau, ChartDomain chart);

// Largest component of the 3-form d beta at x:
// (d beta)_abc = d_a beta_bc + d_b beta_ca + d_c beta_ab.
double closedness_defect(const TwoFormField& beta, const Vector& x, const ChartDomain& chart);

// (L_K g)_ij = K^a d_a g_ij + g_aj d_i K^a + g_ia d_j K^a.
Matrix lie_derivative_metric(const VectorField& K, const MetricComponents& g, const Vector& x,
                             const ChartDomain& chart);

// L_K beta = d(i_K beta) + i_K d beta.
Matrix lie_derivative_two_form(const VectorField& K, const TwoFormField& beta, const Vector& x,
                               const ChartDomain& chart);

// Classical RK4 approximation of the time-t flow of K starting at x.
// Every stage point is checked against the chart box; leaving it raises
// DomainEscapeError carrying the time of the last inside step.
Vector flow_map(const VectorField& K, double t, const Vector& x, int n_steps, const ChartDomain& chart);

inline Matrix antisymmetric_part(const Matrix& m) { return 0.5 * (m - m.transpose()); }
inline Matrix symmetric_part(const Matrix& m) { return 0.5 * (m + m.transpose()); }

} // namespace finsler
