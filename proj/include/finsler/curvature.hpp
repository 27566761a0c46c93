#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "finsler/chart.hpp"

namespace finsler {

// Gamma[k](i, j) = Gamma^k_ij.
using Christoffels = std::vector<Matrix>;
// R[a][b](c, d) = R^a_bcd, with R(d_c, d_d) d_b = R^a_bcd d_a.
using RiemannTensor = std::vector<std::vector<Matrix>>;

struct PlaneAtPoint {
  Vector x;
  Vector u;
  Vector v;
};

Christoffels christoffels(const MetricComponents& g, const Vector& x, const ChartDomain& chart);

// Derivatives of Gamma by a second layer of central differences; the stencil
// reaches 2h from x.
RiemannTensor riemann_tensor(const MetricComponents& g, const Vector& x, const ChartDomain& chart);

// K(u,v) = <R(u,v)v, u> / (|u|^2 |v|^2 - <u,v>^2).
double sectional_curvature(const MetricComponents& g, const PlaneAtPoint& plane, const ChartDomain& chart);
double sectional_curvature(const MetricComponents& g, const RiemannTensor& R, const PlaneAtPoint& plane);

struct CurvatureSample {
  PlaneAtPoint plane;
  double K = 0.0;
};

struct CurvatureSweep {
  std::vector<CurvatureSample> samples;
  double mean = 0.0;
  double stddev = 0.0;
  double min = 0.0;
  double max = 0.0;
};

// `count` seeded random planes at random points of the box shrunk by
// `fraction`. With `complex_structure` set, v = J u (holomorphic planes).
CurvatureSweep curvature_sweep(const MetricComponents& g, const ChartDomain& chart, int count, std::uint64_t seed,
                               double fraction = 0.8, const Matrix* complex_structure = nullptr);

// Columns x1..xn,sample,K.
void write_csv(std::ostream& os, const CurvatureSweep& sweep);

} // namespace finsler
