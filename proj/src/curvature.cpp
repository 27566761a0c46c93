#include "finsler/curvature.hpp"

#include <cmath>
#include <ostream>

#include "finsler/geodesic.hpp"

namespace finsler {

namespace {

Christoffels christoffels_unchecked(const MetricComponents& g, const Vector& x, double h) {
  const int n = static_cast<int>(x.size());
  const Matrix gx = g(x);
  const Eigen::LLT<Matrix> llt(gx);
  if (llt.info() != Eigen::Success)
    throw Error(ErrorKind::IndefiniteMetric, "metric components are not positive-definite");
  const Matrix ginv = llt.solve(Matrix::Identity(n, n));

  std::vector<Matrix> dg(n); // dg[c](a, b) = d_c g_ab
  for (int c = 0; c < n; ++c) dg[c] = partial(g, x, c, h);

  // lowered[a](i, j) = 1/2 (d_i g_aj + d_j g_ai - d_a g_ij)
  std::vector<Matrix> lowered(n, Matrix(n, n));
  for (int a = 0; a < n; ++a)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) lowered[a](i, j) = 0.5 * (dg[i](a, j) + dg[j](a, i) - dg[a](i, j));

  Christoffels gamma(n, Matrix::Zero(n, n));
  for (int k = 0; k < n; ++k)
    for (int a = 0; a < n; ++a) gamma[k] += ginv(k, a) * lowered[a];
  for (Matrix& m : gamma) m = symmetric_part(m);
  return gamma;
}

} // namespace

Christoffels christoffels(const MetricComponents& g, const Vector& x, const ChartDomain& chart) {
  chart.require_interior(x, chart.fd_step());
  return christoffels_unchecked(g, x, chart.fd_step());
}

RiemannTensor riemann_tensor(const MetricComponents& g, const Vector& x, const ChartDomain& chart) {
  const double h = chart.fd_step();
  chart.require_interior(x, 2.0 * h);
  const int n = static_cast<int>(x.size());
  const Christoffels G = christoffels_unchecked(g, x, h);

  // dG[c][a](i, j) = d_c Gamma^a_ij
  std::vector<Christoffels> dG(n);
  for (int c = 0; c < n; ++c) {
    Vector xp = x, xm = x;
    xp[c] += h;
    xm[c] -= h;
    const Christoffels Gp = christoffels_unchecked(g, xp, h);
    const Christoffels Gm = christoffels_unchecked(g, xm, h);
    dG[c].resize(n);
    for (int a = 0; a < n; ++a) dG[c][a] = (Gp[a] - Gm[a]) / (2.0 * h);
  }

  RiemannTensor R(n, std::vector<Matrix>(n, Matrix::Zero(n, n)));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          double v = dG[c][a](d, b) - dG[d][a](c, b);
          for (int e = 0; e < n; ++e) v += G[a](c, e) * G[e](d, b) - G[a](d, e) * G[e](c, b);
          R[a][b](c, d) = v;
        }
  return R;
}

double sectional_curvature(const MetricComponents& g, const RiemannTensor& R, const PlaneAtPoint& plane) {
  const int n = static_cast<int>(plane.x.size());
  const Matrix gx = g(plane.x);
  const Vector& u = plane.u;
  const Vector& v = plane.v;
  const double uu = u.dot(gx * u), vv = v.dot(gx * v), uv = u.dot(gx * v);
  const double gram = uu * vv - uv * uv;
  if (!(gram >= 1e-6 * uu * vv) || uu <= 0.0 || vv <= 0.0)
    throw Error(ErrorKind::DegeneratePlane, "plane vectors are nearly parallel");

  // (R(u,v)v)^a = R^a_bcd v^b u^c v^d
  Vector Ruvv = Vector::Zero(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) Ruvv[a] += v[b] * u.dot(R[a][b] * v);
  return u.dot(gx * Ruvv) / gram;
}

double sectional_curvature(const MetricComponents& g, const PlaneAtPoint& plane, const ChartDomain& chart) {
  const Matrix gx = g(plane.x);
  const double uu = plane.u.dot(gx * plane.u), vv = plane.v.dot(gx * plane.v), uv = plane.u.dot(gx * plane.v);
  if (!(uu * vv - uv * uv >= 1e-6 * uu * vv))
    throw Error(ErrorKind::DegeneratePlane, "plane vectors are nearly parallel");
  return sectional_curvature(g, riemann_tensor(g, plane.x, chart), plane);
}

CurvatureSweep curvature_sweep(const MetricComponents& g, const ChartDomain& chart, int count, std::uint64_t seed,
                               double fraction, const Matrix* complex_structure) {
  SeededSampler rng(seed);
  const int n = chart.dimension();
  const ChartDomain inner = chart.shrunk(fraction);
  CurvatureSweep sweep;
  while (static_cast<int>(sweep.samples.size()) < count) {
    PlaneAtPoint plane;
    plane.x.resize(n);
    for (int i = 0; i < n; ++i) plane.x[i] = rng.uniform(inner.lower()[i], inner.upper()[i]);
    plane.u.resize(n);
    plane.v.resize(n);
    for (int i = 0; i < n; ++i) plane.u[i] = rng.uniform(-1.0, 1.0);
    if (complex_structure) {
      plane.v = *complex_structure * plane.u;
    } else {
      for (int i = 0; i < n; ++i) plane.v[i] = rng.uniform(-1.0, 1.0);
    }
    try {
      sweep.samples.push_back({plane, sectional_curvature(g, plane, chart)});
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::DegeneratePlane) throw;
    }
  }
  double sum = 0.0;
  sweep.min = sweep.max = sweep.samples.front().K;
  for (const auto& s : sweep.samples) {
    sum += s.K;
    sweep.min = std::min(sweep.min, s.K);
    sweep.max = std::max(sweep.max, s.K);
  }
  sweep.mean = sum / count;
  double var = 0.0;
  for (const auto& s : sweep.samples) var += (s.K - sweep.mean) * (s.K - sweep.mean);
  sweep.stddev = count > 1 ? std::sqrt(var / (count - 1)) : 0.0;
  return sweep;
}

void write_csv(std::ostream& os, const CurvatureSweep& sweep) {
  if (sweep.samples.empty()) return;
  const int n = static_cast<int>(sweep.samples.front().plane.x.size());
  for (int i = 0; i < n; ++i) os << "x" << i + 1 << ",";
  os << "sample,K\n";
  os.precision(17);
  for (std::size_t s = 0; s < sweep.samples.size(); ++s) {
    for (int i = 0; i < n; ++i) os << sweep.samples[s].plane.x[i] << ",";
    os << s << "," << sweep.samples[s].K << "\n";
  }
}

} // namespace finsler
