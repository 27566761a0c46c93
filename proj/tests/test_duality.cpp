#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <doctest.h>

#include "finsler/duality.hpp"

using namespace finsler;

namespace {

Vector v2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

// |y|_g + a(y) for a constant g and covector a.
Norm randers_norm(const Matrix& g, const Vector& a) {
  return [g, a](const Vector& y) { return std::sqrt(y.dot(g * y)) + a.dot(y); };
}

// Closed form of the dual norm of |y|_g + a(y): the polar body is the
// g^{-1}-ellipsoid centred at a, so F*(xi) is the positive root t of
// |xi - t a|^2 = t^2 in the inverse metric.
double randers_dual_oracle(const Matrix& g, const Vector& a, const Vector& xi) {
  const Matrix gi = g.inverse();
  const double aa = a.dot(gi * a), xa = xi.dot(gi * a), xx = xi.dot(gi * xi);
  return (-xa + std::sqrt(xa * xa + (1.0 - aa) * xx)) / (1.0 - aa);
}

Vector random_vector(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> N;
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = N(rng);
  return v;
}

Matrix random_spd(std::mt19937_64& rng, int n) {
  Matrix A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = 0.3 * random_vector(rng, 1)[0];
  return Matrix::Identity(n, n) + A * A.transpose();
}

std::vector<double> samples_of(const Norm& F, const DirectionGrid& grid) {
  std::vector<double> s;
  for (const Vector& u : grid.directions) s.push_back(F(u));
  return s;
}

} // namespace

TEST_CASE("direction grids") {
  for (int n : {2, 3, 4}) {
    const DirectionGrid grid = make_direction_grid(n);
    CHECK(grid.total_weight() == doctest::Approx(sphere_area(n)).epsilon(1e-12));
    for (std::size_t k = 0; k < grid.size(); ++k) {
      CHECK(std::abs(grid.directions[k].norm() - 1.0) <= 1e-12);
      CHECK(grid.weights[k] > 0.0);
    }
  }
  CHECK(make_direction_grid(2).size() == 512);
  CHECK(make_direction_grid(3).size() == 2562);
  const std::size_t m4 = make_direction_grid(4).size();
  CHECK(m4 >= 9000);
  CHECK(m4 <= 11000);

  // Quadrature of the second moment: int u_1^2 = area / n.
  for (int n : {2, 3, 4}) {
    const DirectionGrid grid = make_direction_grid(n);
    double moment = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) moment += grid.weights[k] * grid.directions[k][0] * grid.directions[k][0];
    CHECK(moment == doctest::Approx(sphere_area(n) / n).epsilon(1e-6));
  }
}

TEST_CASE("dual norm examples") {
  const DirectionGrid grid = polygon_grid(512);
  const Norm euclid = [](const Vector& y) { return y.norm(); };
  CHECK(dual_norm_eval(euclid, v2(0.6, 0.8), grid) == doctest::Approx(1.0).epsilon(1e-10));

  const Norm F = randers_norm(Matrix::Identity(2, 2), v2(0.5, 0));
  CHECK(std::abs(dual_norm_eval(F, v2(1, 0), grid) - 2.0 / 3.0) <= 1e-6);
  CHECK(std::abs(dual_norm_eval(F, v2(0, 1), grid) - 2.0 / std::sqrt(3.0)) <= 1e-6);
}

TEST_CASE("dual norm against the translated-ellipsoid closed form") {
  std::mt19937_64 rng(3);
  for (int n : {2, 3, 4}) {
    const DirectionGrid grid = make_direction_grid(n);
    const Matrix g = random_spd(rng, n);
    Vector a = random_vector(rng, n);
    a *= 0.4 / std::sqrt(a.dot(g.inverse() * a));
    const Norm F = randers_norm(g, a);
    for (int trial = 0; trial < 5; ++trial) {
      const Vector xi = random_vector(rng, n);
      const double oracle = randers_dual_oracle(g, a, xi);
      CHECK(std::abs(dual_norm_eval(F, xi, grid) - oracle) <= 1e-6 * oracle);
    }
  }
}

TEST_CASE("double duality returns a symmetric norm") {
  const DirectionGrid grid = polygon_grid(256);
  const Norm F = [](const Vector& y) { return std::pow(std::pow(y[0], 4) + 2 * std::pow(y[1], 4), 0.25); };
  const Norm Fstar = [&](const Vector& xi) { return dual_norm_eval(F, xi, grid); };
  for (int k = 0; k < 256; k += 37) {
    const Vector& u = grid.directions[k];
    CHECK(std::abs(dual_norm_eval(Fstar, u, grid) - F(u)) <= 1e-4);
  }
}

TEST_CASE("barycenter examples") {
  const DirectionGrid grid = polygon_grid(512);
  const std::vector<double> ball(grid.size(), 1.0);
  CHECK(polar_barycenter(ball, grid).norm() <= 1e-12);

  const PolarBody body(randers_norm(Matrix::Identity(2, 2), v2(0.5, 0)), grid);
  CHECK((polar_barycenter(body.grid_gauges(), grid) - v2(0.5, 0)).norm() <= 1e-6);

  std::vector<double> square;
  for (const Vector& u : grid.directions) square.push_back(u.cwiseAbs().maxCoeff());
  CHECK(polar_barycenter(square, grid).norm() <= 1e-12);

  std::vector<double> bad = ball;
  bad[7] = 0.0;
  CHECK_THROWS_AS(polar_barycenter(bad, grid), Error);
}

TEST_CASE("barycenter of a Randers polar body is the form, in every dimension") {
  std::mt19937_64 rng(8);
  for (int n : {2, 3, 4}) {
    const DirectionGrid grid = make_direction_grid(n);
    const Matrix g = random_spd(rng, n);
    Vector a = random_vector(rng, n);
    a *= 0.3 / std::sqrt(a.dot(g.inverse() * a));
    const Betterment better(randers_norm(g, a), grid);
    CHECK((better.barycenter() - a).norm() <= 1e-5);
  }
}

TEST_CASE("betterment examples") {
  const DirectionGrid grid = polygon_grid(512);
  const Betterment shifted(randers_norm(Matrix::Identity(2, 2), v2(0.5, 0)), grid);
  for (int k = 0; k < 512; k += 17) CHECK(std::abs(shifted(grid.directions[k]) - 1.0) <= 1e-6);

  const Norm euclid = [](const Vector& y) { return y.norm(); };
  const Vector y = v2(0.3, -1.7);
  CHECK(std::abs(betterment_eval(euclid, y, grid) - y.norm()) <= 1e-12);

  Matrix g = Matrix::Zero(2, 2);
  g(0, 0) = 4;
  g(1, 1) = 1;
  const Betterment better(randers_norm(g, v2(0.1, 0)), grid);
  for (int k = 0; k < 512; k += 13) {
    const Vector& u = grid.directions[k];
    CHECK(std::abs(better(u) - std::sqrt(u.dot(g * u))) <= 1e-6);
  }
  CHECK_THROWS_AS(better(v2(0, 0)), Error);
}

TEST_CASE("betterment is idempotent and ignores added covectors") {
  const DirectionGrid grid = polygon_grid(512);
  const Norm F = [](const Vector& y) {
    return std::pow(std::pow(y[0], 4) + std::pow(y[1], 4), 0.25) + 0.2 * y[0] - 0.1 * y[1];
  };
  const Betterment once(F, grid);
  const Norm once_norm = [&](const Vector& y) { return once(y); };
  const Betterment twice(once_norm, grid);
  CHECK(twice.barycenter().norm() <= 1e-6);

  const Vector sigma = v2(-0.15, 0.25);
  const Norm moved = [&](const Vector& y) { return F(y) + sigma.dot(y); };
  const Betterment other(moved, grid);
  double worst = 0.0;
  for (const Vector& u : grid.directions) worst = std::max(worst, std::abs(other(u) - once(u)));
  CHECK(worst <= 5e-6);
}

TEST_CASE("barycenter rotates with the norm") {
  const DirectionGrid grid = polygon_grid(512);
  const Norm F = [](const Vector& y) { return std::sqrt(3 * y[0] * y[0] + y[1] * y[1] + y[0] * y[1]) + 0.2 * y[0] + 0.1 * y[1]; };
  Matrix R(2, 2);
  R << 0, -1, 1, 0;
  const Norm rotated = [&](const Vector& y) { return F(R.transpose() * y); };
  const Vector b = Betterment(F, grid).barycenter();
  const Vector br = Betterment(rotated, grid).barycenter();
  CHECK((br - R * b).norm() <= 1e-12);
}

TEST_CASE("Riemannian fit examples") {
  const DirectionGrid grid = polygon_grid(512);
  Matrix g = Matrix::Zero(2, 2);
  g(0, 0) = 4;
  g(1, 1) = 1;
  const QuadraticFit ellipse = riemannian_fit(samples_of(randers_norm(g, v2(0, 0)), grid), grid);
  CHECK(ellipse.is_quadratic);
  CHECK(ellipse.residual < 1e-8);
  CHECK((ellipse.g - g).norm() <= 1e-10);

  const QuadraticFit randers = riemannian_fit(samples_of(randers_norm(Matrix::Identity(2, 2), v2(0.5, 0)), grid), grid);
  CHECK_FALSE(randers.is_quadratic);
  CHECK(randers.residual > 1e-2);

  const QuadraticFit round = riemannian_fit(samples_of([](const Vector& y) { return y.norm(); }, grid), grid);
  CHECK(round.is_quadratic);
  CHECK((round.g - Matrix::Identity(2, 2)).norm() <= 1e-10);
}

TEST_CASE("betterment of Randers norms fits g") {
  std::mt19937_64 rng(21);
  const DirectionGrid grid = polygon_grid(512);
  for (int trial = 0; trial < 3; ++trial) {
    const Matrix g = random_spd(rng, 2);
    Vector a = random_vector(rng, 2);
    a *= 0.5 / std::sqrt(a.dot(g.inverse() * a));
    const Betterment better(randers_norm(g, a), grid);
    const QuadraticFit fit = riemannian_fit(samples_of([&](const Vector& y) { return better(y); }, grid), grid);
    CHECK(fit.is_quadratic);
    CHECK((fit.g - g).cwiseAbs().maxCoeff() <= 1e-4 * g.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("polar translation examples") {
  const DirectionGrid grid = polygon_grid(512);
  const Norm euclid = [](const Vector& y) { return y.norm(); };
  CHECK(polar_translation_check(euclid, v2(0.3, 0), grid) < 1e-6);
  CHECK(polar_translation_check(euclid, v2(0, 0), grid) == 0.0);

  Matrix g = Matrix::Zero(2, 2);
  g(0, 0) = 4;
  g(1, 1) = 1;
  CHECK(polar_translation_check(randers_norm(g, v2(0.1, 0)), v2(0, 0.2), grid) < 1e-6);
  CHECK_THROWS_AS(polar_translation_check(euclid, v2(1.5, 0), grid), Error);
}

TEST_CASE("unit ball samples serialize to CSV") {
  const DirectionGrid grid = polygon_grid(8);
  const SupportSamples s = unit_ball_samples([](const Vector& y) { return 2 * y.norm(); }, grid);
  for (double v : s.values) CHECK(v == doctest::Approx(0.5));
  std::ostringstream os;
  write_csv(os, s);
  const std::string text = os.str();
  CHECK(text.rfind("u1,u2,value\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 9);
}
