#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "finsler/geodesic.hpp"
#include "finsler/metric.hpp"

namespace finsler {

/// Polynomial vector fields sum_c sum_alpha a_{c,alpha} x^alpha d_c with
/// |alpha| <= degree.
///
/// Coefficient layout: column = component * monomial_count() + monomial,
/// monomials in graded lexicographic order (1, x1, ..., xn, x1^2, x1 x2, ...).
class VectorFieldAnsatz {
public:
  explicit VectorFieldAnsatz(int dimension, int degree = 2);

  int dimension() const { return dimension_; }
  int degree() const { return degree_; }
  int monomial_count() const { return static_cast<int>(exponents_.size()); }
  int coefficient_count() const { return dimension_ * monomial_count(); }
  const std::vector<int>& exponents(int monomial) const { return exponents_[monomial]; }

  double monomial(int m, const Vector& x) const;
  Vector monomial_gradient(int m, const Vector& x) const;

  Vector evaluate(const Vector& coefficients, const Vector& x) const;
  Matrix jacobian(const Vector& coefficients, const Vector& x) const; // (a, i) = d_i K^a
  VectorField field(Vector coefficients) const;

  // Coefficients of the affine field x -> A x + b.
  Vector affine_coefficients(const Matrix& A, const Vector& b) const;
  // Index of a monomial by exponent vector, -1 if absent.
  int monomial_index(const std::vector<int>& alpha) const;

  std::string describe(int column) const;

private:
  int dimension_;
  int degree_;
  std::vector<std::vector<int>> exponents_;
};

struct ResidualMatrix {
  Matrix rows;
  std::vector<Vector> points;
  double step = 0.0;
  int metric_rows_per_point = 0;
  int form_rows_per_point = 0;
  Vector column_scale; // columns of `rows` were divided by these
};

// Richardson-combined central difference (4 D_{h/2} - D_h) / 3.
Matrix partial_extrapolated(const std::function<Matrix(const Vector&)>& f, const Vector& x, int axis, double h);
// d tau with the extrapolated stencil.
TwoFormField exterior_derivative_extrapolated(OneFormField tau, double h);

/// Linear constraints L_K g = 0 (n(n+1)/2 rows per point) and, when `dtau`
/// is present, L_K dtau = 0 (n(n-1)/2 rows per point, normalized by the
/// largest |dtau| component over the samples).
ResidualMatrix build_residual(const MetricComponents& g, const std::optional<TwoFormField>& dtau,
                              const VectorFieldAnsatz& ansatz, std::span<const Vector> points,
                              const ChartDomain& chart);

struct NullspaceResult {
  int dimension = 0;
  std::vector<Vector> basis; // ansatz coefficient vectors, unit norm
  double gap = 0.0;          // smallest kept / largest dropped singular value (inf if none dropped)
  bool ambiguous = false;    // gap < 10
  std::vector<double> singular_values; // descending, relative to the largest
};

NullspaceResult nullspace_dimension(const ResidualMatrix& R, double sv_threshold = 1e-6);

struct InvariantFormsResult {
  int dimension = 0;
  std::vector<Matrix> basis; // orthonormal antisymmetric matrices (Frobenius / sqrt 2)
};

// Common kernel of beta -> A^T beta + beta A over the generators.
InvariantFormsResult invariant_two_forms(const std::vector<Matrix>& generators);

std::vector<Matrix> so_generators(int n);
Matrix standard_complex_structure(int n); // n even; J e_{2k} = e_{2k+1}
std::vector<Matrix> u2_generators();      // commutant of J inside so(4)

// Halton points in the box shrunk by `fraction`, skipping `seed`-dependent prefix.
std::vector<Vector> halton_points(const ChartDomain& chart, int count, std::uint64_t seed, double fraction = 0.9);

// Residual of projecting `coefficients` onto span(basis), relative to its norm.
double projection_residual(const std::vector<Vector>& basis, const Vector& coefficients);

struct AlmostKillingConfig {
  int degree = 2;
  double sv_threshold = 1e-6;
  std::uint64_t seed = 1;
  int sample_factor = 5;
  bool cross_validate = true;
  double flow_time = 0.3;
  int flow_steps = 64;
  int triples = 10;
  double triple_fraction = 0.3;
  double cross_tolerance = 1e-4;
  DistanceOptions distance{16, 40};
};

struct AlmostKillingReport {
  NullspaceResult nullspace;
  int rows = 0;
  int cols = 0;
  int sample_points = 0;
  std::vector<double> cross_validation; // max T difference per basis field
  double max_cross_difference = 0.0;
};

/// Dimension of the almost-Killing algebra of F = sqrt(g) + tau on the chart:
/// nullspace of {L_K g = 0, L_K d tau = 0} over the polynomial ansatz. With
/// cross-validation on, each basis field is scaled to unit sup-norm, flowed
/// for `flow_time`, and must preserve the triangular function on seeded
/// triples; a failure raises ErrorKind::Inconsistency.
AlmostKillingReport almost_killing_dimension(const MetricComponents& g, const OneFormField& tau,
                                             const ChartDomain& chart, const AlmostKillingConfig& config = {});

} // namespace finsler
