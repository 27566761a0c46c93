#include <cmath>

#include <doctest.h>

#include "finsler/gallery.hpp"
#include "finsler/symmetry.hpp"

using namespace finsler;

namespace {

MetricComponents flat(int n) {
  return [n](const Vector&) { return Matrix(Matrix::Identity(n, n)); };
}

TwoFormField constant_form(Matrix beta) {
  return [beta](const Vector&) { return beta; };
}

int nullity(const MetricComponents& g, const std::optional<TwoFormField>& dtau, int n, int degree,
            double threshold = 1e-6) {
  const ChartDomain box = ChartDomain::cube(n, 0.5);
  const VectorFieldAnsatz ansatz(n, degree);
  const auto points = halton_points(box, 5 * ansatz.coefficient_count(), 1, 0.9);
  return nullspace_dimension(build_residual(g, dtau, ansatz, points, box), threshold).dimension;
}

AlmostKillingConfig no_flows() {
  AlmostKillingConfig cfg;
  cfg.cross_validate = false;
  return cfg;
}

} // namespace

TEST_CASE("ansatz layout") {
  const VectorFieldAnsatz a(2, 2);
  CHECK(a.monomial_count() == 6);
  CHECK(a.coefficient_count() == 12);
  CHECK(VectorFieldAnsatz(4, 2).coefficient_count() == 4 * 15);
  CHECK(a.exponents(0) == std::vector<int>{0, 0});
  CHECK(a.exponents(1) == std::vector<int>{1, 0});
  CHECK(a.exponents(3) == std::vector<int>{2, 0});
  CHECK(a.monomial_index({1, 1}) == 4);
  CHECK(a.monomial_index({3, 0}) == -1);

  Vector x(2);
  x << 0.3, -0.7;
  CHECK(a.monomial(4, x) == doctest::Approx(-0.21));
  CHECK(a.monomial_gradient(4, x)[0] == doctest::Approx(-0.7));

  Matrix A(2, 2);
  A << 0, -1, 1, 0;
  Vector b(2);
  b << 0.5, 2;
  const Vector coeffs = a.affine_coefficients(A, b);
  CHECK((a.evaluate(coeffs, x) - (A * x + b)).norm() <= 1e-15);
  CHECK((a.jacobian(coeffs, x) - A).norm() <= 1e-15);

  const Vector c1 = Vector::Random(12), c2 = Vector::Random(12);
  CHECK((a.evaluate(2 * c1 + c2, x) - 2 * a.evaluate(c1, x) - a.evaluate(c2, x)).norm() <= 1e-14);
  CHECK(!a.describe(4).empty());
}

TEST_CASE("residual examples") {
  CHECK(nullity(flat(2), std::nullopt, 2, 1) == 3);
  CHECK(nullity(flat(4), std::nullopt, 4, 2) == 10);
  const TwoFormField x1_area = [](const Vector& x) {
    Matrix b = Matrix::Zero(2, 2);
    b(0, 1) = x[0];
    b(1, 0) = -x[0];
    return b;
  };
  CHECK(nullity(flat(2), x1_area, 2, 2) == 1);
}

TEST_CASE("residual row counts and underdetermined samples") {
  const ChartDomain box = ChartDomain::cube(3, 0.5);
  const VectorFieldAnsatz ansatz(3, 1);
  Matrix beta = Matrix::Zero(3, 3);
  beta(0, 1) = 1;
  beta(1, 0) = -1;
  const auto points = halton_points(box, 3 * ansatz.coefficient_count(), 2);
  const ResidualMatrix R = build_residual(flat(3), constant_form(beta), ansatz, points, box);
  CHECK(R.metric_rows_per_point == 6);
  CHECK(R.form_rows_per_point == 3);
  CHECK(R.rows.rows() == static_cast<Eigen::Index>(points.size()) * 9);
  CHECK(R.rows.cols() == ansatz.coefficient_count());

  const auto few = halton_points(box, ansatz.coefficient_count(), 2);
  try {
    build_residual(flat(3), std::nullopt, ansatz, few, box);
    FAIL("expected an underdetermined system");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Underdetermined);
  }
}

TEST_CASE("adding form rows never enlarges the nullspace") {
  Matrix beta = Matrix::Zero(4, 4);
  beta(0, 1) = 0.2;
  beta(1, 0) = -0.2;
  beta(2, 3) = 0.2;
  beta(3, 2) = -0.2;
  const int killing = nullity(flat(4), std::nullopt, 4, 2);
  const int almost = nullity(flat(4), constant_form(beta), 4, 2);
  CHECK(almost <= killing);
  CHECK(almost == 8);
}

TEST_CASE("almost-Killing dimensions of flat data") {
  const GalleryEntry twist = make_constant_curvature_2d("flat", 0.4);
  const AlmostKillingReport r = almost_killing_dimension(twist.g, twist.tau, twist.chart, no_flows());
  CHECK(r.nullspace.dimension == 3);
  CHECK(r.nullspace.gap > 100);
  CHECK_FALSE(r.nullspace.ambiguous);
  CHECK(r.rows >= 2 * r.cols);

  const GalleryEntry kahler = make_flat_kahler_4d(0.2);
  CHECK(almost_killing_dimension(kahler.g, kahler.tau, kahler.chart, no_flows()).nullspace.dimension == 8);

  const GalleryEntry plain = make_flat_kahler_4d(0.0);
  CHECK(almost_killing_dimension(plain.g, plain.tau, plain.chart, no_flows()).nullspace.dimension == 10);
}

TEST_CASE("closed forms on the round sphere chart keep the full algebra") {
  const GalleryEntry e = make_randers_closed("sphere", "0.1*x1", 2);
  const AlmostKillingReport r = almost_killing_dimension(e.g, e.tau, e.chart, no_flows());
  CHECK(r.nullspace.dimension == 3);
}

TEST_CASE("dimension is stable under thresholds and form scaling") {
  const GalleryEntry e = make_constant_curvature_2d("sphere", 0.3);
  for (double threshold : {1e-7, 1e-6, 1e-5}) {
    AlmostKillingConfig cfg = no_flows();
    cfg.sv_threshold = threshold;
    CHECK(almost_killing_dimension(e.g, e.tau, e.chart, cfg).nullspace.dimension == 3);
  }
  const OneFormField half = [&](const Vector& x) { return Vector(0.5 * e.tau(x)); };
  CHECK(almost_killing_dimension(e.g, half, e.chart, no_flows()).nullspace.dimension == 3);
}

TEST_CASE("computed nullspace contains the known generators") {
  const GalleryEntry e = make_flat_kahler_4d(0.2);
  const VectorFieldAnsatz ansatz(4, 2);
  const AlmostKillingReport r = almost_killing_dimension(e.g, e.tau, e.chart, no_flows());
  REQUIRE(r.nullspace.dimension == 8);
  for (const Matrix& A : u2_generators())
    CHECK(projection_residual(r.nullspace.basis, ansatz.affine_coefficients(A, Vector::Zero(4))) < 1e-4);
  for (int i = 0; i < 4; ++i)
    CHECK(projection_residual(r.nullspace.basis, ansatz.affine_coefficients(Matrix::Zero(4, 4), Vector::Unit(4, i))) <
          1e-4);
  // A rotation outside u(2) is not almost Killing here.
  const Matrix outside = so_generators(4)[1]; // mixes x1 and x3
  CHECK(projection_residual(r.nullspace.basis, ansatz.affine_coefficients(outside, Vector::Zero(4))) > 0.1);
}

TEST_CASE("cross-validation flows every basis field") {
  const GalleryEntry e = make_constant_curvature_2d("flat", 0.4);
  AlmostKillingConfig cfg;
  cfg.distance = {32, 40, true};
  const AlmostKillingReport r = almost_killing_dimension(e.g, e.tau, e.chart, cfg);
  CHECK(r.cross_validation.size() == 3);
  CHECK(r.max_cross_difference < 1e-4);
}

TEST_CASE("invariant two-forms") {
  CHECK(invariant_two_forms(so_generators(3)).dimension == 0);
  CHECK(invariant_two_forms(so_generators(4)).dimension == 0);
  CHECK(invariant_two_forms(so_generators(2)).dimension == 1);

  const InvariantFormsResult u2 = invariant_two_forms(u2_generators());
  REQUIRE(u2.dimension == 1);
  Matrix kahler = Matrix::Zero(4, 4);
  kahler(0, 1) = kahler(2, 3) = 1;
  kahler(1, 0) = kahler(3, 2) = -1;
  const Matrix& b = u2.basis[0];
  const double cosine = std::abs((b.array() * kahler.array()).sum()) / (b.norm() * kahler.norm());
  CHECK(cosine > 1 - 1e-8);

  Matrix bad = Matrix::Identity(3, 3);
  CHECK_THROWS_AS(invariant_two_forms({bad}), Error);
}

TEST_CASE("complex structure and unitary generators") {
  const Matrix J = standard_complex_structure(4);
  CHECK((J * J + Matrix::Identity(4, 4)).norm() == 0.0);
  const auto gens = u2_generators();
  CHECK(gens.size() == 4);
  for (const Matrix& A : gens) {
    CHECK((A + A.transpose()).norm() <= 1e-12);
    CHECK((A * J - J * A).norm() <= 1e-12);
  }
  CHECK_THROWS_AS(standard_complex_structure(3), Error);
}

TEST_CASE("Halton samples are seeded and inside the shrunk box") {
  const ChartDomain box = ChartDomain::cube(3, 0.5);
  const auto a = halton_points(box, 50, 3, 0.8);
  const auto b = halton_points(box, 50, 3, 0.8);
  const auto c = halton_points(box, 50, 4, 0.8);
  CHECK(a.size() == 50);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i] == b[i]);
    CHECK(a[i].cwiseAbs().maxCoeff() <= 0.4);
  }
  CHECK(a[0] != c[0]);
}
