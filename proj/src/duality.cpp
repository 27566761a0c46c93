#include "finsler/duality.hpp"

#include <cmath>
#include <numbers>
#include <ostream>

namespace finsler {

SupportSamples unit_ball_samples(const Norm& F, const DirectionGrid& grid) {
  SupportSamples s{grid, {}};
  s.values.reserve(grid.size());
  for (const Vector& u : grid.directions) {
    const double f = F(u);
    if (!(f > 0.0) || !std::isfinite(f))
      throw Error(ErrorKind::InvalidBody, "norm is not positive on the direction grid");
    s.values.push_back(1.0 / f);
  }
  return s;
}

void write_csv(std::ostream& os, const SupportSamples& samples) {
  const int n = samples.grid.dimension;
  for (int i = 0; i < n; ++i) os << "u" << i + 1 << ",";
  os << "value\n";
  os.precision(17);
  for (std::size_t k = 0; k < samples.values.size(); ++k) {
    for (int i = 0; i < n; ++i) os << samples.grid.directions[k][i] << ",";
    os << samples.values[k] << "\n";
  }
}

double grid_spacing(const DirectionGrid& grid) {
  const int n = grid.dimension;
  const double cell = sphere_area(n) / static_cast<double>(grid.size());
  return 2.0 * std::pow(cell, 1.0 / (n - 1));
}

namespace {

double golden_arc_max(const std::function<double(const Vector&)>& objective, const Vector& u0, double radius) {
  Vector e(2);
  e << -u0[1], u0[0];
  auto at = [&](double theta) -> double {
    return objective(std::cos(theta) * u0 + std::sin(theta) * e);
  };
  const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = -radius, b = radius;
  double c = b - ratio * (b - a), d = a + ratio * (b - a);
  double fc = at(c), fd = at(d);
  double best = std::max(objective(u0), std::max(fc, fd));
  for (int it = 0; it < 200 && (b - a) > 1e-13; ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - ratio * (b - a);
      fc = at(c);
      best = std::max(best, fc);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + ratio * (b - a);
      fd = at(d);
      best = std::max(best, fd);
    }
  }
  return best;
}

double newton_tangent_max(const std::function<double(const Vector&)>& objective, const Vector& u0, double radius) {
  const int n = static_cast<int>(u0.size());
  const int m = n - 1;
  // Orthonormal basis of the tangent space u0^perp.
  Eigen::HouseholderQR<Matrix> qr(u0);
  const Matrix Q = qr.householderQ();
  const Matrix E = Q.rightCols(m);

  auto phi = [&](const Vector& t) { return objective(u0 + E * t); };

  Vector t = Vector::Zero(m);
  double f = phi(t);
  const double hg = 1e-6, hh = 1e-4;
  for (int it = 0; it < 40; ++it) {
    Vector grad(m);
    for (int i = 0; i < m; ++i) {
      Vector tp = t, tm = t;
      tp[i] += hg;
      tm[i] -= hg;
      grad[i] = (phi(tp) - phi(tm)) / (2.0 * hg);
    }
    Matrix H(m, m);
    for (int i = 0; i < m; ++i) {
      Vector tp = t, tm = t;
      tp[i] += hh;
      tm[i] -= hh;
      H(i, i) = (phi(tp) - 2.0 * f + phi(tm)) / (hh * hh);
      for (int j = 0; j < i; ++j) {
        Vector pp = t, pm = t, mp = t, mm = t;
        pp[i] += hh; pp[j] += hh;
        pm[i] += hh; pm[j] -= hh;
        mp[i] -= hh; mp[j] += hh;
        mm[i] -= hh; mm[j] -= hh;
        H(i, j) = H(j, i) = (phi(pp) - phi(pm) - phi(mp) + phi(mm)) / (4.0 * hh * hh);
      }
    }
    Vector step;
    const Eigen::LLT<Matrix> llt(-H);
    if (llt.info() == Eigen::Success) {
      step = llt.solve(grad);
    } else {
      const double gn = grad.norm();
      if (gn == 0.0) break;
      step = grad * (0.05 * radius / gn);
    }
    const double sn = step.norm();
    if (sn > radius) step *= radius / sn;

    bool accepted = false;
    double alpha = 1.0;
    for (int k = 0; k < 40; ++k, alpha *= 0.5) {
      const Vector trial = t + alpha * step;
      if (trial.norm() > 2.0 * radius) continue;
      const double ft = phi(trial);
      if (ft > f) {
        t = trial;
        f = ft;
        accepted = true;
        break;
      }
    }
    if (!accepted || alpha * step.norm() < 1e-12) break;
  }
  return f;
}

} // namespace

double refine_direction_max(const std::function<double(const Vector&)>& objective, const Vector& u0,
                            double radius) {
  if (u0.size() == 2) return golden_arc_max(objective, u0, radius);
  return newton_tangent_max(objective, u0, radius);
}

PolarBody::PolarBody(Norm F, const DirectionGrid& grid)
    : F_(std::move(F)), grid_(grid), spacing_(grid_spacing(grid)) {
  const int n = grid_.dimension;
  const int m = static_cast<int>(grid_.size());
  sphere_points_.resize(n, m);
  for (int i = 0; i < m; ++i) {
    const double f = F_(grid_.directions[i]);
    if (!(f > 0.0) || !std::isfinite(f))
      throw Error(ErrorKind::InvalidBody, "norm is not positive on the direction grid");
    sphere_points_.col(i) = grid_.directions[i] / f;
  }
  grid_gauges_.resize(m);
  boundary_points_.resize(n, m);
  for (int j = 0; j < m; ++j) {
    grid_gauges_[j] = gauge(grid_.directions[j]);
    boundary_points_.col(j) = grid_.directions[j] / grid_gauges_[j];
  }
}

double PolarBody::gauge(const Vector& xi) const {
  const double xn = xi.norm();
  if (xn == 0.0) return 0.0;
  Eigen::Index best = 0;
  const double grid_max = (sphere_points_.transpose() * xi).maxCoeff(&best);
  const Vector u0 = grid_.directions[best];
  const auto objective = [&](const Vector& y) { return xi.dot(y) / F_(y); };
  return std::max(grid_max, refine_direction_max(objective, u0, spacing_));
}

double PolarBody::support(const Vector& u) const {
  Eigen::Index best = 0;
  const double grid_max = (boundary_points_.transpose() * u).maxCoeff(&best);
  const auto objective = [&](const Vector& xi) { return u.dot(xi) / gauge(xi); };

  // The supporting covector of K* in direction u is dF_u; the objective is
  // stationary there, so a finite-difference gradient is accurate to second order.
  const double h = 1e-6 * u.norm();
  Vector dF(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    Vector up = u, um = u;
    up[i] += h;
    um[i] -= h;
    dF[i] = (F_(up) - F_(um)) / (2.0 * h);
  }
  double value = std::max(grid_max, objective(dF));
  if (grid_.dimension == 2) value = std::max(value, refine_direction_max(objective, grid_.directions[best], spacing_));
  return value;
}

double dual_norm_eval(const Norm& F, const Vector& xi, const DirectionGrid& grid) {
  const int m = static_cast<int>(grid.size());
  Eigen::Index best = 0;
  double grid_max = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < m; ++i) {
    const double v = xi.dot(grid.directions[i]) / F(grid.directions[i]);
    if (v > grid_max) {
      grid_max = v;
      best = i;
    }
  }
  if (xi.norm() == 0.0) return 0.0;
  const auto objective = [&](const Vector& y) { return xi.dot(y) / F(y); };
  return std::max(grid_max, refine_direction_max(objective, grid.directions[best], grid_spacing(grid)));
}

Vector polar_barycenter(std::span<const double> dual_gauges, const DirectionGrid& grid) {
  if (dual_gauges.size() != grid.size())
    throw Error(ErrorKind::InvalidBody, "gauge sample count does not match the grid");
  const int n = grid.dimension;
  Vector moment = Vector::Zero(n);
  double volume = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double gauge = dual_gauges[k];
    if (!(gauge > 0.0) || !std::isfinite(gauge))
      throw Error(ErrorKind::InvalidBody, "dual gauge must be positive and finite");
    const double R = 1.0 / gauge;
    const double rn = std::pow(R, n);
    volume += grid.weights[k] * rn / n;
    moment += grid.weights[k] * (rn * R / (n + 1)) * grid.directions[k];
  }
  return moment / volume;
}

Betterment::Betterment(Norm F, const DirectionGrid& grid) : F_(std::move(F)) {
  const PolarBody body(F_, grid);
  barycenter_ = polar_barycenter(body.grid_gauges(), grid);
  for (const Vector& u : grid.directions) {
    if (!(F_(u) - barycenter_.dot(u) > 0.0))
      throw Error(ErrorKind::DegenerateBetterment, "origin is not interior to the recentered body");
  }
}

double Betterment::operator()(const Vector& y) const {
  if (y.cwiseAbs().maxCoeff() == 0.0)
    throw Error(ErrorKind::DegenerateInput, "length rate requested for the zero vector");
  return F_(y) - barycenter_.dot(y);
}

double betterment_eval(const Norm& F, const Vector& y, const DirectionGrid& grid) {
  return Betterment(F, grid)(y);
}

QuadraticFit riemannian_fit(std::span<const double> samples, const DirectionGrid& grid, double tolerance) {
  const int n = grid.dimension;
  const int m = static_cast<int>(grid.size());
  if (static_cast<int>(samples.size()) != m)
    throw Error(ErrorKind::DegenerateInput, "sample count does not match the grid");
  const int unknowns = n * (n + 1) / 2;
  Matrix A(m, unknowns);
  Vector rhs(m);
  for (int k = 0; k < m; ++k) {
    const Vector& u = grid.directions[k];
    if (!(samples[k] > 0.0)) throw Error(ErrorKind::DegenerateInput, "samples must be positive");
    int c = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) A(k, c++) = (i == j ? 1.0 : 2.0) * u[i] * u[j];
    rhs[k] = samples[k] * samples[k];
  }
  const Vector coeffs = A.colPivHouseholderQr().solve(rhs);

  QuadraticFit fit;
  fit.g.resize(n, n);
  int c = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) fit.g(i, j) = fit.g(j, i) = coeffs[c++];

  const Vector q = A * coeffs;
  for (int k = 0; k < m; ++k) fit.residual = std::max(fit.residual, std::abs(rhs[k] - q[k]) / rhs[k]);

  const Eigen::LLT<Matrix> llt(fit.g);
  fit.is_quadratic = llt.info() == Eigen::Success && fit.residual < tolerance;
  return fit;
}

double polar_translation_check(const Norm& F, const Vector& sigma, const DirectionGrid& grid) {
  const Norm shifted = [&F, sigma](const Vector& y) { return F(y) + sigma.dot(y); };
  for (const Vector& u : grid.directions) {
    if (!(shifted(u) > 0.0))
      throw Error(ErrorKind::ConvexityViolation, "F + sigma is not positive on the direction grid");
  }
  const PolarBody base(F, grid);
  const PolarBody moved(shifted, grid);
  double deviation = 0.0;
  for (const Vector& u : grid.directions)
    deviation = std::max(deviation, std::abs(moved.support(u) - base.support(u) - sigma.dot(u)));
  return deviation;
}

} // namespace finsler
