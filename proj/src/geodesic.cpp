#include "finsler/geodesic.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>

namespace finsler {

double path_length(const MetricField& F, const PathPolyline& path) {
  if (path.size() < 2) throw Error(ErrorKind::DegenerateInput, "a path needs at least two vertices");
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const Vector delta = path[i + 1] - path[i];
    if (delta.cwiseAbs().maxCoeff() == 0.0)
      throw Error(ErrorKind::DegenerateInput, "path has a zero-length segment");
    total += F(0.5 * (path[i] + path[i + 1]), delta);
  }
  return total;
}

namespace {

using SegmentFn = std::function<double(const Vector& a, const Vector& b)>;

struct SegmentModel {
  double value = 0.0;
  Vector grad; // 2n
  Matrix hess; // 2n x 2n
};

SegmentModel model_segment(const SegmentFn& seg, const Vector& a, const Vector& b) {
  const int n = static_cast<int>(a.size());
  const int d = 2 * n;
  Vector z(d);
  z << a, b;
  auto eval = [&](const Vector& w) { return seg(w.head(n), w.tail(n)); };

  const double scale = std::max((b - a).norm(), 1e-9);
  const double hg = 1e-6 * scale;
  const double hh = 1e-3 * scale;

  SegmentModel m;
  m.value = eval(z);
  m.grad.resize(d);
  m.hess.resize(d, d);
  std::vector<double> plus(d), minus(d);
  for (int i = 0; i < d; ++i) {
    Vector zp = z, zm = z;
    zp[i] += hg;
    zm[i] -= hg;
    m.grad[i] = (eval(zp) - eval(zm)) / (2.0 * hg);
    zp = z;
    zm = z;
    zp[i] += hh;
    zm[i] -= hh;
    plus[i] = eval(zp);
    minus[i] = eval(zm);
    m.hess(i, i) = (plus[i] - 2.0 * m.value + minus[i]) / (hh * hh);
  }
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < i; ++j) {
      Vector pp = z, mm = z;
      pp[i] += hh; pp[j] += hh;
      mm[i] -= hh; mm[j] -= hh;
      const double mixed = eval(pp) - plus[i] - plus[j] + 2.0 * m.value - minus[i] - minus[j] + eval(mm);
      m.hess(i, j) = m.hess(j, i) = mixed / (2.0 * hh * hh);
    }
  }
  return m;
}

// Solves the symmetric block-tridiagonal system (diag + lambda I) x = rhs.
// Returns false when a pivot block is not positive-definite.
bool solve_block_tridiagonal(const std::vector<Matrix>& diag, const std::vector<Matrix>& upper,
                             const std::vector<Vector>& rhs, double lambda, std::vector<Vector>& x) {
  const std::size_t N = diag.size();
  const Eigen::Index n = diag.front().rows();
  std::vector<Eigen::LLT<Matrix>> pivots;
  pivots.reserve(N);
  std::vector<Vector> r(N);
  for (std::size_t i = 0; i < N; ++i) {
    Matrix D = diag[i] + lambda * Matrix::Identity(n, n);
    r[i] = rhs[i];
    if (i > 0) {
      // W = U_{i-1}^T D'_{i-1}^{-1}
      const Matrix W = pivots[i - 1].solve(upper[i - 1]).transpose();
      D -= W * upper[i - 1];
      r[i] -= W * r[i - 1];
    }
    pivots.emplace_back(D);
    if (pivots.back().info() != Eigen::Success) return false;
  }
  x.assign(N, Vector());
  for (std::size_t i = N; i-- > 0;) {
    Vector b = r[i];
    if (i + 1 < N) b -= upper[i] * x[i + 1];
    x[i] = pivots[i].solve(b);
  }
  for (const Vector& v : x)
    if (!v.allFinite()) return false;
  return true;
}

double total(const SegmentFn& seg, const PathPolyline& pts) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) s += seg(pts[i], pts[i + 1]);
  return s;
}

// Damped Newton on the interior vertices; returns the number of accepted steps.
int newton_polyline(const SegmentFn& seg, PathPolyline& pts, const ChartDomain& chart, int max_iterations) {
  const std::size_t k = pts.size() - 1;
  if (k < 2) return 0;
  const std::size_t N = k - 1;
  const int n = static_cast<int>(pts.front().size());

  double value = total(seg, pts);
  double lambda = 0.0;
  int accepted_steps = 0;
  int blocked_retries = 0;
  std::vector<Matrix> diag(N), upper(N > 1 ? N - 1 : 0);
  std::vector<Vector> grad(N);

  for (int it = 0; it < max_iterations; ++it) {
    std::vector<SegmentModel> models(k);
    for (std::size_t s = 0; s < k; ++s) models[s] = model_segment(seg, pts[s], pts[s + 1]);

    double diag_scale = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const SegmentModel& left = models[i];      // segment ending at vertex i+1
      const SegmentModel& right = models[i + 1]; // segment starting at vertex i+1
      diag[i] = left.hess.bottomRightCorner(n, n) + right.hess.topLeftCorner(n, n);
      grad[i] = left.grad.tail(n) + right.grad.head(n);
      if (i + 1 < N) upper[i] = right.hess.topRightCorner(n, n);
      diag_scale = std::max(diag_scale, diag[i].diagonal().cwiseAbs().maxCoeff());
    }
    double gnorm = 0.0;
    for (const Vector& g : grad) gnorm = std::max(gnorm, g.cwiseAbs().maxCoeff());
    if (gnorm == 0.0) break;

    std::vector<Vector> step;
    std::vector<Vector> neg_grad(N);
    for (std::size_t i = 0; i < N; ++i) neg_grad[i] = -grad[i];
    bool solved = false;
    for (int attempt = 0; attempt < 30; ++attempt) {
      if (solve_block_tridiagonal(diag, upper, neg_grad, lambda, step)) {
        solved = true;
        break;
      }
      lambda = std::max(10.0 * lambda, 1e-10 * diag_scale);
    }
    if (!solved) break;

    bool improved = false;
    bool blocked = false;
    double alpha = 1.0;
    PathPolyline trial = pts;
    for (int ls = 0; ls < 40; ++ls, alpha *= 0.5) {
      bool inside = true;
      for (std::size_t i = 0; i < N; ++i) {
        trial[i + 1] = pts[i + 1] + alpha * step[i];
        if (!chart.contains(trial[i + 1])) inside = false;
      }
      if (!inside) {
        blocked = true;
        continue;
      }
      const double v = total(seg, trial);
      if (v < value) {
        improved = true;
        break;
      }
    }
    if (!improved) {
      if (!blocked) break;
      if (++blocked_retries > 8)
        throw DomainEscapeError("distance iteration is pushed outside the chart box", 0.0);
      lambda = std::max(10.0 * lambda, 1e-6 * diag_scale);
      continue;
    }
    const double new_value = total(seg, trial);
    const double decrease = value - new_value;
    pts = trial;
    value = new_value;
    ++accepted_steps;
    if (alpha == 1.0) lambda *= 0.1;
    if (lambda < 1e-14 * diag_scale) lambda = 0.0;
    if (decrease <= 1e-15 * std::abs(value)) break;
  }
  return accepted_steps;
}

} // namespace

DistanceResult minimize_distance(const MetricField& F, PathPolyline pts, const ChartDomain& chart,
                                 const DistanceOptions& options) {
  if (pts.size() < 2) throw Error(ErrorKind::DegenerateInput, "a path needs at least two points");
  const Vector p = pts.front(), q = pts.back();
  if (!chart.contains(p) || !chart.contains(q))
    throw Error(ErrorKind::Boundary, "distance endpoints must lie inside the chart box");
  DistanceResult result;
  if ((q - p).cwiseAbs().maxCoeff() == 0.0) {
    result.path = {p, q};
    return result;
  }
  const int k = static_cast<int>(pts.size()) - 1;
  PathPolyline straight(k + 1);
  for (int i = 0; i <= k; ++i) straight[i] = p + (static_cast<double>(i) / k) * (q - p);
  straight[k] = q;
  result.straight_length = path_length(F, straight);
  for (const Vector& x : pts)
    if (!chart.contains(x)) throw Error(ErrorKind::Boundary, "initial path leaves the chart box");

  const SegmentFn energy = [&F](const Vector& a, const Vector& b) {
    const double f = F(0.5 * (a + b), b - a);
    return f * f;
  };

  result.iterations = newton_polyline(energy, pts, chart, options.iterations);

  const double optimized = path_length(F, pts);
  if (optimized <= result.straight_length) {
    result.length = optimized;
    result.path = std::move(pts);
  } else {
    result.length = result.straight_length;
    result.path = std::move(straight);
  }
  return result;
}

DistanceResult minimize_distance(const MetricField& F, const Vector& p, const Vector& q, const ChartDomain& chart,
                                 const DistanceOptions& options) {
  if (!chart.contains(p) || !chart.contains(q))
    throw Error(ErrorKind::Boundary, "distance endpoints must lie inside the chart box");
  const int k = std::max(1, options.segments);
  PathPolyline pts(k + 1);
  for (int i = 0; i <= k; ++i) pts[i] = p + (static_cast<double>(i) / k) * (q - p);
  pts[k] = q;
  return minimize_distance(F, std::move(pts), chart, options);
}

PathPolyline refine_path(const PathPolyline& path) {
  PathPolyline out;
  out.reserve(2 * path.size());
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    out.push_back(path[i]);
    out.push_back(0.5 * (path[i] + path[i + 1]));
  }
  if (!path.empty()) out.push_back(path.back());
  return out;
}

namespace {

// Optimized lengths at k, 2k, 4k, ... segments, each level started from the
// refined optimum of the previous one.
std::vector<double> length_ladder(const MetricField& F, const Vector& p, const Vector& q, const ChartDomain& chart,
                                  DistanceOptions options, int levels) {
  options.extrapolate = false;
  std::vector<double> lengths;
  DistanceResult r = minimize_distance(F, p, q, chart, options);
  lengths.push_back(r.length);
  for (int level = 1; level < levels; ++level) {
    options.iterations *= 2;
    r = minimize_distance(F, refine_path(r.path), chart, options);
    lengths.push_back(r.length);
  }
  return lengths;
}

} // namespace

double distance(const MetricField& F, const Vector& p, const Vector& q, const ChartDomain& chart,
                const DistanceOptions& options) {
  if (!options.extrapolate) return minimize_distance(F, p, q, chart, options).length;
  const std::vector<double> L = length_ladder(F, p, q, chart, options, 2);
  return (4.0 * L[1] - L[0]) / 3.0;
}

CertifiedDistance certified_distance(const MetricField& F, const Vector& p, const Vector& q,
                                     const ChartDomain& chart, const DistanceOptions& options) {
  const std::vector<double> L = length_ladder(F, p, q, chart, options, options.extrapolate ? 3 : 2);
  CertifiedDistance c;
  if (options.extrapolate) {
    c.coarse = (4.0 * L[1] - L[0]) / 3.0;
    c.fine = (4.0 * L[2] - L[1]) / 3.0;
  } else {
    c.coarse = L[0];
    c.fine = L[1];
  }
  return c;
}

double triangular(const MetricField& F, const TripleSample& s, const ChartDomain& chart,
                  const DistanceOptions& options) {
  return distance(F, s.p, s.q, chart, options) + distance(F, s.q, s.r, chart, options)
       - distance(F, s.p, s.r, chart, options);
}

std::uint64_t SeededSampler::next() {
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

double SeededSampler::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::vector<TripleSample> seeded_triples(const ChartDomain& chart, int count, std::uint64_t seed, double fraction) {
  SeededSampler rng(seed);
  const Vector c = chart.center();
  const Vector lo = c + fraction * (chart.lower() - c);
  const Vector hi = c + fraction * (chart.upper() - c);
  auto point = [&] {
    Vector x(chart.dimension());
    for (int i = 0; i < x.size(); ++i) x[i] = rng.uniform(lo[i], hi[i]);
    return x;
  };
  std::vector<TripleSample> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    TripleSample s;
    s.p = point();
    s.q = point();
    s.r = point();
    out.push_back(std::move(s));
  }
  return out;
}

TInvarianceResult t_invariance_check(const MetricField& F, const PointMap& phi, const std::vector<TripleSample>& triples,
                                     const ChartDomain& chart, const DistanceOptions& options) {
  TInvarianceResult result;
  for (const TripleSample& s : triples) {
    TripleSample mapped{phi(s.p), phi(s.q), phi(s.r)};
    for (const Vector* v : {&mapped.p, &mapped.q, &mapped.r}) {
      if (!chart.contains(*v)) throw DomainEscapeError("mapped triple leaves the chart box", 0.0);
    }
    TripleCheckRow row;
    row.triple = s;
    row.T = triangular(F, s, chart, options);
    row.T_mapped = triangular(F, mapped, chart, options);
    result.max_diff = std::max(result.max_diff, row.diff());
    result.rows.push_back(std::move(row));
  }
  return result;
}

void write_csv(std::ostream& os, const TInvarianceResult& result) {
  if (result.rows.empty()) {
    os << "T,T_phi,diff\n";
    return;
  }
  const int n = static_cast<int>(result.rows.front().triple.p.size());
  for (const char* name : {"p", "q", "r"})
    for (int i = 0; i < n; ++i) os << name << i + 1 << ",";
  os << "T,T_phi,diff\n";
  os.precision(17);
  for (const TripleCheckRow& row : result.rows) {
    for (const Vector* v : {&row.triple.p, &row.triple.q, &row.triple.r})
      for (int i = 0; i < n; ++i) os << (*v)[i] << ",";
    os << row.T << "," << row.T_mapped << "," << row.diff() << "\n";
  }
}

namespace {

struct DefectFit {
  Vector covector;
  double residual = 0.0;
};

DefectFit fit_defect(const MetricField& F, const PointMap& phi, const Vector& x, const DirectionGrid& grid) {
  const Matrix J = jacobian(phi, x, 1e-5);
  const double det = J.determinant();
  if (!std::isfinite(det) || std::abs(det) < 1e-12) throw Error(ErrorKind::InvalidMap, "map Jacobian is singular");
  const Vector fx = phi(x);
  const int n = static_cast<int>(x.size());
  std::vector<double> delta(grid.size());
  Matrix normal = Matrix::Zero(n, n);
  Vector rhs = Vector::Zero(n);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const Vector& u = grid.directions[k];
    delta[k] = F(fx, J * u) - F(x, u);
    normal += grid.weights[k] * u * u.transpose();
    rhs += grid.weights[k] * delta[k] * u;
  }
  DefectFit fit;
  fit.covector = normal.ldlt().solve(rhs);
  for (std::size_t k = 0; k < grid.size(); ++k)
    fit.residual = std::max(fit.residual, std::abs(delta[k] - fit.covector.dot(grid.directions[k])));
  return fit;
}

} // namespace

PullbackDelta pullback_delta(const MetricField& F, const PointMap& phi, const Vector& x, const DirectionGrid& grid,
                             const ChartDomain& chart, const std::vector<Vector>& closedness_points) {
  PullbackDelta out;
  const DefectFit fit = fit_defect(F, phi, x, grid);
  out.covector = fit.covector;
  out.linearity_residual = fit.residual;

  const OneFormField fitted = [&](const Vector& y) { return fit_defect(F, phi, y, grid).covector; };
  const std::vector<Vector> points = closedness_points.empty() ? std::vector<Vector>{x} : closedness_points;
  for (const Vector& y : points) {
    const Matrix d = exterior_derivative(fitted, y, chart);
    out.closedness_residual = std::max(out.closedness_residual, d.cwiseAbs().maxCoeff());
  }
  return out;
}

} // namespace finsler
