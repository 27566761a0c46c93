#include "finsler/metric.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "finsler/grid.hpp"

namespace finsler {

namespace {

std::string describe(const Vector& x) {
  std::ostringstream os;
  os << "(";
  for (Eigen::Index i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
  os << ")";
  return os.str();
}

void require_nonzero(const Vector& y) {
  if (y.size() == 0 || y.cwiseAbs().maxCoeff() == 0.0)
    throw Error(ErrorKind::DegenerateInput, "length rate requested for the zero vector");
}

} // namespace

double dual_length(const Matrix& g, const Vector& covector) {
  const Eigen::LLT<Matrix> llt(g);
  if (llt.info() != Eigen::Success)
    throw Error(ErrorKind::IndefiniteMetric, "metric components are not positive-definite");
  const Vector w = llt.matrixL().solve(covector);
  return w.norm();
}

double randers_eval(const RandersData& data, const Vector& x, const Vector& y) {
  require_nonzero(y);
  const Matrix g = data.g(x);
  const Vector tau = data.tau(x);
  if (dual_length(g, tau) >= 1.0)
    throw Error(ErrorKind::ConvexityViolation, "|tau|_g >= 1 at " + describe(x));
  return std::sqrt(y.dot(g * y)) + tau.dot(y);
}

Norm randers_norm_at(const RandersData& data, const Vector& x) {
  const Matrix g = data.g(x);
  const Vector tau = data.tau(x);
  if (dual_length(g, tau) >= 1.0)
    throw Error(ErrorKind::ConvexityViolation, "|tau|_g >= 1 at " + describe(x));
  return [g, tau](const Vector& y) {
    require_nonzero(y);
    return std::sqrt(y.dot(g * y)) + tau.dot(y);
  };
}

MetricField randers_metric(RandersData data, std::string name) {
  MetricField F;
  F.eval = [data = std::move(data)](const Vector& x, const Vector& y) { return randers_eval(data, x, y); };
  F.reversible = false;
  F.name = std::move(name);
  return F;
}

MetricField riemannian_metric(MetricComponents g, std::string name) {
  MetricField F;
  F.eval = [g = std::move(g)](const Vector& x, const Vector& y) {
    require_nonzero(y);
    return std::sqrt(y.dot(g(x) * y));
  };
  F.reversible = true;
  F.name = std::move(name);
  return F;
}

MetricField euclidean_metric(int dimension) {
  MetricField F;
  F.eval = [dimension](const Vector&, const Vector& y) {
    require_nonzero(y);
    if (y.size() != dimension) throw Error(ErrorKind::DegenerateInput, "dimension mismatch");
    return y.norm();
  };
  F.reversible = true;
  F.name = "euclidean";
  return F;
}

double symmetrize_eval(const MetricField& F, const Vector& x, const Vector& y) {
  require_nonzero(y);
  return 0.5 * (F(x, y) + F(x, -y));
}

MetricField symmetrize(MetricField F) {
  MetricField S;
  S.name = F.name + "-sym";
  S.reversible = true;
  S.eval = [F = std::move(F)](const Vector& x, const Vector& y) { return symmetrize_eval(F, x, y); };
  return S;
}

MetricField add_one_form(MetricField F, OneFormField sigma, std::span<const Vector> sample_points,
                         int check_directions) {
  if (!sample_points.empty()) {
    const int n = static_cast<int>(sample_points.front().size());
    const DirectionGrid grid = make_direction_grid(n, n == 4 ? 2000 : check_directions);
    for (const Vector& x : sample_points) {
      const Vector s = sigma(x);
      for (const Vector& u : grid.directions) {
        // value of F + sigma on the unit F-sphere point u / F(x,u)
        const double f = F(x, u);
        if (!(1.0 + s.dot(u) / f > 0.0))
          throw Error(ErrorKind::ConvexityViolation,
                      "F + sigma is not positive on the unit sphere at " + describe(x));
      }
    }
  }
  MetricField G;
  G.name = F.name + "+form";
  G.reversible = false;
  G.eval = [F = std::move(F), sigma = std::move(sigma)](const Vector& x, const Vector& y) {
    return F(x, y) + sigma(x).dot(y);
  };
  return G;
}

double convexity_margin(const RandersData& data, std::span<const Vector> sample_points) {
  double margin = std::numeric_limits<double>::infinity();
  for (const Vector& x : sample_points) margin = std::min(margin, 1.0 - dual_length(data.g(x), data.tau(x)));
  return margin;
}

std::vector<Vector> box_lattice(const ChartDomain& chart, int per_axis) {
  const int n = chart.dimension();
  std::vector<Vector> points;
  std::vector<int> idx(n, 0);
  while (true) {
    Vector x(n);
    for (int i = 0; i < n; ++i) {
      const double t = per_axis == 1 ? 0.5 : static_cast<double>(idx[i]) / (per_axis - 1);
      x[i] = chart.lower()[i] + t * (chart.upper()[i] - chart.lower()[i]);
    }
    points.push_back(x);
    int axis = 0;
    while (axis < n && ++idx[axis] == per_axis) idx[axis++] = 0;
    if (axis == n) break;
  }
  return points;
}

} // namespace finsler
