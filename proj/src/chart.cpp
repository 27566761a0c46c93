#include "finsler/chart.hpp"

#include <cmath>
#include <sstream>

namespace finsler {

const char* to_string(ErrorKind kind) {
  switch (kind) {
  case ErrorKind::Boundary: return "boundary";
  case ErrorKind::DomainEscape: return "domain-escape";
  case ErrorKind::ConvexityViolation: return "convexity-violation";
  case ErrorKind::DegenerateInput: return "degenerate-input";
  case ErrorKind::InvalidBody: return "invalid-body";
  case ErrorKind::DegenerateBetterment: return "degenerate-betterment";
  case ErrorKind::InvalidMap: return "invalid-map";
  case ErrorKind::IndefiniteMetric: return "indefinite-metric";
  case ErrorKind::DegeneratePlane: return "degenerate-plane";
  case ErrorKind::Underdetermined: return "underdetermined-system";
  case ErrorKind::Inconsistency: return "inconsistency";
  case ErrorKind::ConstructionInvalid: return "construction-invalid";
  case ErrorKind::Usage: return "usage";
  }
  return "unknown";
}

namespace {

std::string format_point(const Vector& x) {
  std::ostringstream os;
  os << "(";
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (i) os << ", ";
    os << x[i];
  }
  os << ")";
  return os.str();
}

} // namespace

ChartDomain::ChartDomain(Vector lower, Vector upper, double fd_step)
    : lower_(std::move(lower)), upper_(std::move(upper)), fd_step_(fd_step) {
  if (lower_.size() != upper_.size())
    throw Error(ErrorKind::DegenerateInput, "chart bounds have mismatched dimensions");
  if (lower_.size() < 2)
    throw Error(ErrorKind::DegenerateInput, "chart dimension must be at least 2");
  for (Eigen::Index i = 0; i < lower_.size(); ++i) {
    if (!(upper_[i] > lower_[i]))
      throw Error(ErrorKind::DegenerateInput, "chart box has an empty axis");
  }
  if (!(fd_step_ > 0.0) || fd_step_ >= 1e-2 * min_edge())
    throw Error(ErrorKind::DegenerateInput,
                "finite-difference step must be positive and below 1e-2 of the smallest box edge");
}

ChartDomain ChartDomain::cube(int dimension, double half_width, double fd_step) {
  return ChartDomain(Vector::Constant(dimension, -half_width), Vector::Constant(dimension, half_width),
                     fd_step);
}

double ChartDomain::min_edge() const { return (upper_ - lower_).minCoeff(); }

bool ChartDomain::contains(const Vector& x, double margin) const {
  if (x.size() != lower_.size()) return false;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i])) return false;
    if (x[i] - margin < lower_[i] || x[i] + margin > upper_[i]) return false;
  }
  return true;
}

void ChartDomain::require_interior(const Vector& x, double reach) const {
  if (!contains(x, reach)) {
    std::ostringstream os;
    os << "stencil of reach " << reach << " around " << format_point(x) << " leaves the chart box";
    throw Error(ErrorKind::Boundary, os.str());
  }
}

ChartDomain ChartDomain::with_step(double fd_step) const { return ChartDomain(lower_, upper_, fd_step); }

ChartDomain ChartDomain::shrunk(double factor) const {
  const Vector c = center();
  return ChartDomain(c + factor * (lower_ - c), c + factor * (upper_ - c), fd_step_);
}

double partial(const ScalarField& f, const Vector& x, int axis, double h) {
  Vector xp = x, xm = x;
  xp[axis] += h;
  xm[axis] -= h;
  return (f(xp) - f(xm)) / (2.0 * h);
}

Vector partial(const std::function<Vector(const Vector&)>& f, const Vector& x, int axis, double h) {
  Vector xp = x, xm = x;
  xp[axis] += h;
  xm[axis] -= h;
  return (f(xp) - f(xm)) / (2.0 * h);
}

Matrix partial(const std::function<Matrix(const Vector&)>& f, const Vector& x, int axis, double h) {
  Vector xp = x, xm = x;
  xp[axis] += h;
  xm[axis] -= h;
  return (f(xp) - f(xm)) / (2.0 * h);
}

Matrix jacobian(const std::function<Vector(const Vector&)>& f, const Vector& x, double h) {
  const int n = static_cast<int>(x.size());
  Matrix J;
  for (int i = 0; i < n; ++i) {
    const Vector col = partial(f, x, i, h);
    if (i == 0) J.resize(col.size(), n);
    J.col(i) = col;
  }
  return J;
}

OneFormField gradient_field(ScalarField f, double h) {
  return [f = std::move(f), h](const Vector& x) {
    Vector df(x.size());
    for (int i = 0; i < x.size(); ++i) df[i] = partial(f, x, i, h);
    return df;
  };
}

Matrix exterior_derivative(const OneFormField& tau, const Vector& x, const ChartDomain& chart) {
  const double h = chart.fd_step();
  chart.require_interior(x, h);
  // D(j, i) = d_i tau_j
  const Matrix D = jacobian(tau, x, h);
  return D.transpose() - D;
}

TwoFormField exterior_derivative_field(OneFormField tau, ChartDomain chart) {
  return [tau = std::move(tau), chart = std::move(chart)](const Vector& x) {
    return exterior_derivative(tau, x, chart);
  };
}

double closedness_defect(const TwoFormField& beta, const Vector& x, const ChartDomain& chart) {
  const double h = chart.fd_step();
  chart.require_interior(x, h);
  const int n = static_cast<int>(x.size());
  std::vector<Matrix> d(n);
  for (int a = 0; a < n; ++a) d[a] = partial(beta, x, a, h);
  double worst = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      for (int c = b + 1; c < n; ++c)
        worst = std::max(worst, std::abs(d[a](b, c) + d[b](c, a) + d[c](a, b)));
  return worst;
}

Matrix lie_derivative_metric(const VectorField& K, const MetricComponents& g, const Vector& x,
                             const ChartDomain& chart) {
  const double h = chart.fd_step();
  chart.require_interior(x, h);
  const int n = static_cast<int>(x.size());
  const Vector k = K(x);
  const Matrix gx = g(x);
  const Matrix DK = jacobian(K, x, h); // DK(a, i) = d_i K^a

  Matrix L = Matrix::Zero(n, n);
  for (int a = 0; a < n; ++a) L += k[a] * partial(g, x, a, h);
  L += DK.transpose() * gx + gx * DK;
  return symmetric_part(L);
}

Matrix lie_derivative_two_form(const VectorField& K, const TwoFormField& beta, const Vector& x,
                               const ChartDomain& chart) {
  const double h = chart.fd_step();
  chart.require_interior(x, h);
  const int n = static_cast<int>(x.size());

  // (i_K beta)_j = K^a beta_aj
  const OneFormField contraction = [&](const Vector& p) -> Vector {
    return beta(p).transpose() * K(p);
  };
  const Matrix D = jacobian(contraction, x, h);
  Matrix result = D.transpose() - D;

  // (i_K d beta)_ij = K^a (d_a beta_ij + d_i beta_ja + d_j beta_ai)
  std::vector<Matrix> dbeta(n);
  for (int a = 0; a < n; ++a) dbeta[a] = partial(beta, x, a, h);
  const Vector k = K(x);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int a = 0; a < n; ++a)
        s += k[a] * (dbeta[a](i, j) + dbeta[i](j, a) + dbeta[j](a, i));
      result(i, j) += s;
    }
  }
  return antisymmetric_part(result);
}

Vector flow_map(const VectorField& K, double t, const Vector& x, int n_steps, const ChartDomain& chart) {
  if (n_steps < 16) throw Error(ErrorKind::DegenerateInput, "flow_map requires at least 16 steps");
  if (!chart.contains(x)) throw DomainEscapeError("flow start point " + format_point(x) + " is outside the chart box", 0.0);

  const double dt = t / n_steps;
  Vector y = x;
  auto check = [&](const Vector& p, int step) {
    if (!chart.contains(p)) {
      throw DomainEscapeError("flow trajectory from " + format_point(x) + " leaves the chart box near "
                                  + format_point(p),
                              step * dt);
    }
  };
  for (int s = 0; s < n_steps; ++s) {
    const Vector k1 = K(y);
    const Vector p2 = y + 0.5 * dt * k1;
    check(p2, s);
    const Vector k2 = K(p2);
    const Vector p3 = y + 0.5 * dt * k2;
    check(p3, s);
    const Vector k3 = K(p3);
    const Vector p4 = y + dt * k3;
    check(p4, s);
    const Vector k4 = K(p4);
    y += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    check(y, s);
  }
  return y;
}

} // namespace finsler
