#include <cmath>
#include <sstream>

#include <doctest.h>

#include "finsler/gallery.hpp"
#include "finsler/geodesic.hpp"

using namespace finsler;

namespace {

Vector v2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

MetricField flat_randers(double t1, double t2 = 0.0) {
  return randers_metric({[](const Vector&) { return Matrix::Identity(2, 2); },
                         [t1, t2](const Vector&) { return v2(t1, t2); }});
}

// |y| + (c/2)(x1 y2 - x2 y1): d tau = c dx1^dx2, not closed.
MetricField twisted(double c) {
  return randers_metric({[](const Vector&) { return Matrix::Identity(2, 2); },
                         [c](const Vector& x) { return v2(-0.5 * c * x[1], 0.5 * c * x[0]); }});
}

Vector rotate(const Vector& x, double angle) {
  return v2(std::cos(angle) * x[0] - std::sin(angle) * x[1], std::sin(angle) * x[0] + std::cos(angle) * x[1]);
}

} // namespace

TEST_CASE("path length examples") {
  const MetricField E = euclidean_metric(2);
  CHECK(path_length(E, {v2(0, 0), v2(1.5, 2), v2(3, 4)}) == doctest::Approx(5.0));
  CHECK(path_length(E, {v2(0, 0), v2(1, 1), v2(2, 0)}) == doctest::Approx(2 * std::sqrt(2.0)));

  const MetricField F = flat_randers(0.3);
  CHECK(path_length(F, {v2(0, 0), v2(1, 0)}) == doctest::Approx(1.3));
  CHECK(path_length(F, {v2(1, 0), v2(0, 0)}) == doctest::Approx(0.7));

  CHECK_THROWS_AS(path_length(E, {v2(0, 0), v2(0, 0), v2(1, 0)}), Error);
}

TEST_CASE("distance examples") {
  const ChartDomain big = ChartDomain::cube(2, 5.0);
  CHECK(std::abs(distance(euclidean_metric(2), v2(0, 0), v2(3, 4), big) - 5.0) <= 1e-6);

  const ChartDomain box(v2(-0.5, -0.5), v2(1.5, 0.5));
  const MetricField F = flat_randers(0.3);
  CHECK(std::abs(distance(F, v2(0, 0), v2(1, 0), box) - 1.3) <= 1e-10);
  CHECK(std::abs(distance(F, v2(1, 0), v2(0, 0), box) - 0.7) <= 1e-10);

  const ChartDomain small = ChartDomain::cube(2, 0.5);
  const MetricField G = twisted(0.4);
  const Vector p = v2(0, 0), q = v2(0.2, 0);
  const DistanceResult r = minimize_distance(G, p, q, small);
  CHECK(r.length <= r.straight_length + 1e-12);
  // F >= (1 - |tau|) |y| on the box, and the round trip is at most twice the symmetrized distance.
  CHECK(r.length >= (1 - 0.2 * std::sqrt(0.5)) * 0.2);
  const double round_trip = r.length + distance(G, q, p, small);
  CHECK(round_trip <= 2 * distance(symmetrize(G), p, q, small) + 1e-9);
}

TEST_CASE("constant forms make the distance asymmetric by twice the form") {
  const ChartDomain box = ChartDomain::cube(2, 1.0);
  const MetricField F = flat_randers(0.2, -0.1);
  const Vector p = v2(-0.4, 0.3), q = v2(0.5, -0.2);
  const double asym = distance(F, p, q, box) - distance(F, q, p, box);
  CHECK(asym == doctest::Approx(2 * (0.2 * 0.9 - 0.1 * -0.5)).epsilon(1e-9));
}

TEST_CASE("distance endpoint errors") {
  const ChartDomain box = ChartDomain::cube(2, 0.5);
  try {
    distance(euclidean_metric(2), v2(0, 0), v2(0.9, 0), box);
    FAIL("expected a boundary error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Boundary);
  }
}

TEST_CASE("triangular function examples") {
  const ChartDomain box = ChartDomain::cube(2, 2.0);
  const MetricField E = euclidean_metric(2);
  const TripleSample same{v2(0.1, 0.1), v2(0.1, 0.1), v2(0.1, 0.1)};
  CHECK(triangular(E, same, box) == 0.0);
  const TripleSample corner{v2(0, 0), v2(1, 0), v2(1, 1)};
  CHECK(std::abs(triangular(E, corner, box) - (2 - std::sqrt(2.0))) <= 1e-5);
  CHECK(std::abs(triangular(flat_randers(0.3), corner, box) - (2 - std::sqrt(2.0))) <= 1e-5);
}

TEST_CASE("extrapolated distances converge faster than plain ones") {
  const GalleryEntry e = gallery_entry("example-2.5");
  const MetricField F = e.metric();
  const Vector p = v2(-0.3, -0.3), q = v2(0.3, 0.25);
  const CertifiedDistance plain = certified_distance(F, p, q, e.chart, {16, 40, false});
  const CertifiedDistance rich = certified_distance(F, p, q, e.chart, {16, 40, true});
  CHECK(plain.cauchy() > 0.0);
  CHECK(rich.cauchy() < 1e-2 * plain.cauchy());
  CHECK(std::abs(rich.fine - plain.fine) <= 2 * plain.cauchy());
}

TEST_CASE("refinement never lengthens the minimum for a flat metric") {
  const GalleryEntry e = gallery_entry("example-2.5");
  const MetricField F = e.metric();
  for (const TripleSample& t : seeded_triples(e.chart, 5, 9, 0.8)) {
    double previous = distance(F, t.p, t.q, e.chart, {8, 40});
    for (int k : {16, 32, 64}) {
      const double next = distance(F, t.p, t.q, e.chart, {k, 40});
      CHECK(next <= previous + 1e-12);
      previous = next;
    }
  }
}

TEST_CASE("seeded triples are reproducible and stay in the shrunk box") {
  const ChartDomain box = ChartDomain::cube(3, 0.5);
  const auto a = seeded_triples(box, 10, 42, 0.6);
  const auto b = seeded_triples(box, 10, 42, 0.6);
  const auto c = seeded_triples(box, 10, 43, 0.6);
  REQUIRE(a.size() == 10);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].p == b[i].p);
    CHECK(a[i].r == b[i].r);
    CHECK(a[i].p.cwiseAbs().maxCoeff() <= 0.3);
  }
  CHECK(a[0].p != c[0].p);
}

TEST_CASE("T is nonnegative and invariant under adding an exact form") {
  const GalleryEntry e = gallery_entry("example-2.5");
  const MetricField F = e.metric();
  const OneFormField df = [](const Vector& x) {
    const double s = 0.1 * std::cos(x[0] - 2 * x[1]);
    return v2(s, -2 * s);
  };
  const MetricField G = add_one_form(F, df, box_lattice(e.chart, 9));
  const DistanceOptions opts{32, 40, true};
  for (const TripleSample& t : seeded_triples(e.chart, 6, 4, 0.6)) {
    const double TF = triangular(F, t, e.chart, opts);
    CHECK(TF >= -1e-8);
    CHECK(std::abs(triangular(G, t, e.chart, opts) - TF) <= 1e-8);
  }
}

TEST_CASE("T-invariance of isometries and non-isometries") {
  const ChartDomain box = ChartDomain::cube(2, 1.0);
  const MetricField E = euclidean_metric(2);
  const auto triples = seeded_triples(box, 20, 7, 0.6);
  const PointMap turn = [](const Vector& x) { return rotate(x, 0.5); };
  CHECK(t_invariance_check(E, turn, triples, box).max_diff < 1e-5);

  const PointMap bend = [](const Vector& x) { return v2(x[0] + 0.1 * x[0] * x[0], x[1]); };
  const auto wide = seeded_triples(box, 20, 7, 0.9);
  CHECK(t_invariance_check(E, bend, wide, box).max_diff > 1e-3);

  const PointMap push = [](const Vector& x) { return v2(x[0] + 0.5, x[1]); };
  CHECK_THROWS_AS(t_invariance_check(E, push, seeded_triples(box, 5, 1, 1.0), box), DomainEscapeError);
}

TEST_CASE("rotations are almost isometries of the twisted metric") {
  const GalleryEntry e = gallery_entry("example-2.5");
  const MetricField F = e.metric();
  const PointMap flow = [&](const Vector& x) {
    return flow_map([](const Vector& y) { return v2(-y[1], y[0]); }, 0.3, x, 64, e.chart);
  };
  const TInvarianceResult r = t_invariance_check(F, flow, seeded_triples(e.chart, 10, 2, 0.5), e.chart, {32, 40, true});
  CHECK(r.max_diff < 1e-4);
  CHECK(r.rows.size() == 10);

  std::ostringstream os;
  write_csv(os, r);
  CHECK(os.str().rfind("p1,p2,q1,q2,r1,r2,T,T_phi,diff\n", 0) == 0);
}

TEST_CASE("symmetrized metric inherits T-invariance") {
  const GalleryEntry e = gallery_entry("example-2.5");
  const MetricField S = symmetrize(e.metric());
  const PointMap flow = [&](const Vector& x) {
    return flow_map([](const Vector& y) { return v2(-y[1], y[0]); }, 0.3, x, 64, e.chart);
  };
  CHECK(t_invariance_check(S, flow, seeded_triples(e.chart, 5, 2, 0.5), e.chart, {32, 40, true}).max_diff < 1e-4);
}

TEST_CASE("pullback defect examples") {
  const ChartDomain box = ChartDomain::cube(2, 1.0);
  const DirectionGrid grid = polygon_grid(256);
  const Vector x = v2(0.1, -0.2);
  const MetricField E = euclidean_metric(2);

  const PointMap identity = [](const Vector& y) { return y; };
  const PullbackDelta id = pullback_delta(E, identity, x, grid, box);
  CHECK(id.linearity_residual <= 1e-10);
  CHECK(id.closedness_residual <= 1e-8);

  const PointMap turn = [](const Vector& y) { return rotate(y, 0.7); };
  CHECK(pullback_delta(E, turn, x, grid, box).linearity_residual <= 1e-8);

  const GalleryEntry e = gallery_entry("example-2.5");
  const PointMap flow = [&](const Vector& y) {
    return flow_map([](const Vector& z) { return v2(-z[1], z[0]); }, 0.2, y, 64, e.chart);
  };
  const PullbackDelta d = pullback_delta(e.metric(), flow, v2(0.05, 0.1), grid, e.chart);
  CHECK(d.linearity_residual < 1e-4);
  CHECK(d.closedness_residual < 1e-3);

  const PointMap collapse = [](const Vector& y) { return v2(y[0], 0.0); };
  try {
    pullback_delta(E, collapse, x, grid, box);
    FAIL("expected an invalid map");
  } catch (const Error& err) {
    CHECK(err.kind() == ErrorKind::InvalidMap);
  }
}
