#include "finsler/symmetry.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace finsler {

VectorFieldAnsatz::VectorFieldAnsatz(int dimension, int degree) : dimension_(dimension), degree_(degree) {
  if (dimension < 2 || degree < 0) throw Error(ErrorKind::DegenerateInput, "invalid ansatz dimensions");
  // graded lexicographic enumeration
  for (int total = 0; total <= degree; ++total) {
    std::vector<int> alpha(dimension, 0);
    std::function<void(int, int)> rec = [&](int axis, int remaining) {
      if (axis == dimension - 1) {
        alpha[axis] = remaining;
        exponents_.push_back(alpha);
        return;
      }
      for (int e = remaining; e >= 0; --e) {
        alpha[axis] = e;
        rec(axis + 1, remaining - e);
      }
    };
    rec(0, total);
  }
}

double VectorFieldAnsatz::monomial(int m, const Vector& x) const {
  double v = 1.0;
  const auto& alpha = exponents_[m];
  for (int i = 0; i < dimension_; ++i)
    for (int e = 0; e < alpha[i]; ++e) v *= x[i];
  return v;
}

Vector VectorFieldAnsatz::monomial_gradient(int m, const Vector& x) const {
  Vector grad = Vector::Zero(dimension_);
  const auto& alpha = exponents_[m];
  for (int i = 0; i < dimension_; ++i) {
    if (alpha[i] == 0) continue;
    double v = alpha[i];
    for (int j = 0; j < dimension_; ++j) {
      const int e = j == i ? alpha[j] - 1 : alpha[j];
      for (int k = 0; k < e; ++k) v *= x[j];
    }
    grad[i] = v;
  }
  return grad;
}

Vector VectorFieldAnsatz::evaluate(const Vector& coefficients, const Vector& x) const {
  const int M = monomial_count();
  Vector mono(M);
  for (int m = 0; m < M; ++m) mono[m] = monomial(m, x);
  Vector K(dimension_);
  for (int c = 0; c < dimension_; ++c) K[c] = coefficients.segment(c * M, M).dot(mono);
  return K;
}

Matrix VectorFieldAnsatz::jacobian(const Vector& coefficients, const Vector& x) const {
  const int M = monomial_count();
  Matrix grads(M, dimension_);
  for (int m = 0; m < M; ++m) grads.row(m) = monomial_gradient(m, x).transpose();
  Matrix J(dimension_, dimension_);
  for (int c = 0; c < dimension_; ++c) J.row(c) = coefficients.segment(c * M, M).transpose() * grads;
  return J;
}

VectorField VectorFieldAnsatz::field(Vector coefficients) const {
  return [self = *this, coefficients = std::move(coefficients)](const Vector& x) {
    return self.evaluate(coefficients, x);
  };
}

int VectorFieldAnsatz::monomial_index(const std::vector<int>& alpha) const {
  for (int m = 0; m < monomial_count(); ++m)
    if (exponents_[m] == alpha) return m;
  return -1;
}

Vector VectorFieldAnsatz::affine_coefficients(const Matrix& A, const Vector& b) const {
  if (degree_ < 1) throw Error(ErrorKind::DegenerateInput, "affine fields need degree >= 1");
  const int M = monomial_count();
  Vector coeffs = Vector::Zero(coefficient_count());
  const int constant = monomial_index(std::vector<int>(dimension_, 0));
  for (int c = 0; c < dimension_; ++c) {
    coeffs[c * M + constant] = b[c];
    for (int i = 0; i < dimension_; ++i) {
      std::vector<int> alpha(dimension_, 0);
      alpha[i] = 1;
      coeffs[c * M + monomial_index(alpha)] = A(c, i);
    }
  }
  return coeffs;
}

std::string VectorFieldAnsatz::describe(int column) const {
  const int M = monomial_count();
  const int c = column / M, m = column % M;
  std::ostringstream os;
  bool any = false;
  for (int i = 0; i < dimension_; ++i) {
    if (exponents_[m][i] == 0) continue;
    if (any) os << "*";
    os << "x" << i + 1;
    if (exponents_[m][i] > 1) os << "^" << exponents_[m][i];
    any = true;
  }
  if (!any) os << "1";
  os << " d/dx" << c + 1;
  return os.str();
}

Matrix partial_extrapolated(const std::function<Matrix(const Vector&)>& f, const Vector& x, int axis, double h) {
  return (4.0 * partial(f, x, axis, 0.5 * h) - partial(f, x, axis, h)) / 3.0;
}

TwoFormField exterior_derivative_extrapolated(OneFormField tau, double h) {
  return [tau = std::move(tau), h](const Vector& x) -> Matrix {
    const Matrix coarse = jacobian(tau, x, h);
    const Matrix fine = jacobian(tau, x, 0.5 * h);
    const Matrix D = (4.0 * fine - coarse) / 3.0; // D(j, i) = d_i tau_j
    return D.transpose() - D;
  };
}

ResidualMatrix build_residual(const MetricComponents& g, const std::optional<TwoFormField>& dtau,
                              const VectorFieldAnsatz& ansatz, std::span<const Vector> points,
                              const ChartDomain& chart) {
  const int n = ansatz.dimension();
  const int cols = ansatz.coefficient_count();
  const int M = ansatz.monomial_count();
  const double h = chart.fd_step();
  const int metric_rows = n * (n + 1) / 2;
  const int form_rows = dtau ? n * (n - 1) / 2 : 0;
  const int per_point = metric_rows + form_rows;
  const int total_rows = per_point * static_cast<int>(points.size());
  if (static_cast<int>(points.size()) < 3 * cols || total_rows < 2 * cols)
    throw Error(ErrorKind::Underdetermined, "need at least 3 sample points per ansatz coefficient");

  ResidualMatrix R;
  R.step = h;
  R.metric_rows_per_point = metric_rows;
  R.form_rows_per_point = form_rows;
  R.points.assign(points.begin(), points.end());
  R.rows = Matrix::Zero(total_rows, cols);

  struct PointData {
    Matrix g0;
    std::vector<Matrix> dg;
    Matrix b0;
    std::vector<Matrix> db;
  };
  std::vector<PointData> data(points.size());
  double form_scale = 0.0;
  for (std::size_t p = 0; p < points.size(); ++p) {
    const Vector& x = points[p];
    chart.require_interior(x, 2.0 * h);
    data[p].g0 = g(x);
    data[p].dg.resize(n);
    for (int a = 0; a < n; ++a) data[p].dg[a] = partial_extrapolated(g, x, a, h);
    if (dtau) {
      data[p].b0 = (*dtau)(x);
      data[p].db.resize(n);
      for (int a = 0; a < n; ++a) data[p].db[a] = partial_extrapolated(*dtau, x, a, h);
      form_scale = std::max(form_scale, data[p].b0.cwiseAbs().maxCoeff());
    }
  }
  const double form_weight = form_scale > 0.0 ? 1.0 / form_scale : 0.0;

  for (std::size_t p = 0; p < points.size(); ++p) {
    const Vector& x = points[p];
    const PointData& d = data[p];
    const int row0 = static_cast<int>(p) * per_point;
    for (int m = 0; m < M; ++m) {
      const double mono = ansatz.monomial(m, x);
      const Vector grad = ansatz.monomial_gradient(m, x);
      for (int c = 0; c < n; ++c) {
        const int col = c * M + m;
        int r = row0;
        for (int i = 0; i < n; ++i)
          for (int j = i; j < n; ++j)
            R.rows(r++, col) = mono * d.dg[c](i, j) + grad[i] * d.g0(c, j) + d.g0(i, c) * grad[j];
        if (dtau) {
          for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
              R.rows(r++, col) =
                  form_weight * (mono * d.db[c](i, j) + grad[i] * d.b0(c, j) + d.b0(i, c) * grad[j]);
        }
      }
    }
  }

  // Scale by the size of the ansatz function itself rather than by the
  // column norm, which for an (almost) exact null column is pure noise.
  Vector monomial_size = Vector::Zero(M);
  for (const Vector& x : points)
    for (int m = 0; m < M; ++m) {
      const double v = ansatz.monomial(m, x);
      monomial_size[m] += v * v + ansatz.monomial_gradient(m, x).squaredNorm();
    }
  R.column_scale.resize(cols);
  for (int col = 0; col < cols; ++col) {
    const double s = std::sqrt(monomial_size[col % M] / static_cast<double>(points.size()));
    R.column_scale[col] = s > 0.0 ? s : 1.0;
    R.rows.col(col) /= R.column_scale[col];
  }
  return R;
}

NullspaceResult nullspace_dimension(const ResidualMatrix& R, double sv_threshold) {
  const Eigen::BDCSVD<Matrix> svd(R.rows, Eigen::ComputeThinV);
  const Vector sv = svd.singularValues();
  const Matrix& V = svd.matrixV();
  const int cols = static_cast<int>(sv.size());
  const double top = sv.size() ? sv[0] : 0.0;

  NullspaceResult out;
  for (int i = 0; i < cols; ++i) out.singular_values.push_back(top > 0.0 ? sv[i] / top : 0.0);
  int kept = 0;
  for (int i = 0; i < cols; ++i)
    if (top > 0.0 && sv[i] >= sv_threshold * top) ++kept;
  // Columns beyond the row count are unconstrained.
  out.dimension = static_cast<int>(R.rows.cols()) - kept;
  if (kept == 0 || kept == R.rows.cols()) {
    out.gap = std::numeric_limits<double>::infinity();
  } else {
    const double dropped = sv[kept];
    out.gap = dropped > 0.0 ? sv[kept - 1] / dropped : std::numeric_limits<double>::infinity();
  }
  out.ambiguous = out.gap < 10.0;
  for (int i = kept; i < R.rows.cols(); ++i) {
    Vector v = V.col(i).cwiseQuotient(R.column_scale);
    out.basis.push_back(v / v.norm());
  }
  return out;
}

InvariantFormsResult invariant_two_forms(const std::vector<Matrix>& generators) {
  InvariantFormsResult out;
  if (generators.empty()) return out;
  const int n = static_cast<int>(generators.front().rows());
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  const int N = static_cast<int>(pairs.size());

  Matrix stacked = Matrix::Zero(N * static_cast<int>(generators.size()), N);
  for (std::size_t k = 0; k < generators.size(); ++k) {
    const Matrix& A = generators[k];
    if ((A + A.transpose()).cwiseAbs().maxCoeff() > 1e-12)
      throw Error(ErrorKind::DegenerateInput, "generators must be antisymmetric");
    for (int col = 0; col < N; ++col) {
      Matrix beta = Matrix::Zero(n, n);
      beta(pairs[col].first, pairs[col].second) = 1.0;
      beta(pairs[col].second, pairs[col].first) = -1.0;
      const Matrix image = A.transpose() * beta + beta * A;
      for (int row = 0; row < N; ++row)
        stacked(static_cast<int>(k) * N + row, col) = image(pairs[row].first, pairs[row].second);
    }
  }
  const Eigen::JacobiSVD<Matrix> svd(stacked, Eigen::ComputeFullV);
  const Vector sv = svd.singularValues();
  const double top = sv.size() ? std::max(sv[0], 1.0) : 1.0;
  int kept = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] > 1e-10 * top) ++kept;
  out.dimension = N - kept;
  for (int i = kept; i < N; ++i) {
    const Vector v = svd.matrixV().col(i);
    Matrix beta = Matrix::Zero(n, n);
    for (int c = 0; c < N; ++c) {
      beta(pairs[c].first, pairs[c].second) = v[c];
      beta(pairs[c].second, pairs[c].first) = -v[c];
    }
    out.basis.push_back(beta);
  }
  return out;
}

std::vector<Matrix> so_generators(int n) {
  std::vector<Matrix> gens;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      Matrix A = Matrix::Zero(n, n);
      A(i, j) = -1.0;
      A(j, i) = 1.0;
      gens.push_back(A);
    }
  return gens;
}

Matrix standard_complex_structure(int n) {
  if (n % 2 != 0) throw Error(ErrorKind::DegenerateInput, "complex structure needs even dimension");
  Matrix J = Matrix::Zero(n, n);
  for (int k = 0; k < n; k += 2) {
    J(k + 1, k) = 1.0;
    J(k, k + 1) = -1.0;
  }
  return J;
}

std::vector<Matrix> u2_generators() {
  const Matrix J = standard_complex_structure(4);
  // Project so(4) onto the commutant of J and extract an orthonormal basis.
  const std::vector<Matrix> so4 = so_generators(4);
  Matrix coords(16, static_cast<int>(so4.size()));
  for (std::size_t k = 0; k < so4.size(); ++k) {
    const Matrix P = 0.5 * (so4[k] + J * so4[k] * J.transpose());
    coords.col(static_cast<int>(k)) = Eigen::Map<const Vector>(P.data(), 16);
  }
  const Eigen::JacobiSVD<Matrix> svd(coords, Eigen::ComputeThinU);
  std::vector<Matrix> gens;
  for (int i = 0; i < svd.singularValues().size(); ++i) {
    if (svd.singularValues()[i] < 1e-12) continue;
    const Vector u = svd.matrixU().col(i);
    gens.push_back(Eigen::Map<const Matrix>(u.data(), 4, 4));
  }
  return gens;
}

namespace {

double radical_inverse(std::uint64_t index, int base) {
  double inv = 1.0 / base, f = inv, r = 0.0;
  while (index > 0) {
    r += f * static_cast<double>(index % base);
    index /= base;
    f *= inv;
  }
  return r;
}

constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29};

} // namespace

std::vector<Vector> halton_points(const ChartDomain& chart, int count, std::uint64_t seed, double fraction) {
  const int n = chart.dimension();
  if (n > 10) throw Error(ErrorKind::DegenerateInput, "Halton sampling supports up to 10 dimensions");
  const ChartDomain inner = chart.shrunk(fraction);
  std::vector<Vector> pts;
  pts.reserve(count);
  const std::uint64_t start = 1 + 1000 * (seed % 100000);
  for (int i = 0; i < count; ++i) {
    Vector x(n);
    for (int a = 0; a < n; ++a)
      x[a] = inner.lower()[a] + radical_inverse(start + i, kPrimes[a]) * (inner.upper()[a] - inner.lower()[a]);
    pts.push_back(x);
  }
  return pts;
}

double projection_residual(const std::vector<Vector>& basis, const Vector& coefficients) {
  if (basis.empty()) return 1.0;
  Matrix B(coefficients.size(), static_cast<int>(basis.size()));
  for (std::size_t i = 0; i < basis.size(); ++i) B.col(static_cast<int>(i)) = basis[i];
  const Vector fit = B * B.colPivHouseholderQr().solve(coefficients);
  return (coefficients - fit).norm() / coefficients.norm();
}

AlmostKillingReport almost_killing_dimension(const MetricComponents& g, const OneFormField& tau,
                                             const ChartDomain& chart, const AlmostKillingConfig& config) {
  const int n = chart.dimension();
  const VectorFieldAnsatz ansatz(n, config.degree);
  const double h = chart.fd_step();
  const double fraction = std::min(0.9, 1.0 - 8.0 * h / chart.min_edge());
  const std::vector<Vector> points =
      halton_points(chart, config.sample_factor * ansatz.coefficient_count(), config.seed, fraction);

  const TwoFormField dtau = exterior_derivative_extrapolated(tau, h);
  double form_size = 0.0;
  for (const Vector& x : points) form_size = std::max(form_size, dtau(x).cwiseAbs().maxCoeff());
  // A numerically closed tau contributes no constraints.
  const std::optional<TwoFormField> form = form_size > 1e-7 ? std::optional<TwoFormField>(dtau) : std::nullopt;

  const ResidualMatrix R = build_residual(g, form, ansatz, points, chart);
  AlmostKillingReport report;
  report.rows = static_cast<int>(R.rows.rows());
  report.cols = static_cast<int>(R.rows.cols());
  report.sample_points = static_cast<int>(points.size());
  report.nullspace = nullspace_dimension(R, config.sv_threshold);

  if (!config.cross_validate) return report;

  const MetricField F = randers_metric(RandersData{g, tau});
  const auto triples = seeded_triples(chart, config.triples, config.seed, config.triple_fraction);
  for (std::size_t b = 0; b < report.nullspace.basis.size(); ++b) {
    const Vector& coeffs = report.nullspace.basis[b];
    double sup = 0.0;
    for (const Vector& x : points) sup = std::max(sup, ansatz.evaluate(coeffs, x).norm());
    const VectorField K = ansatz.field(coeffs / sup);
    const PointMap phi = [&](const Vector& x) { return flow_map(K, config.flow_time, x, config.flow_steps, chart); };
    const TInvarianceResult check = t_invariance_check(F, phi, triples, chart, config.distance);
    report.cross_validation.push_back(check.max_diff);
    report.max_cross_difference = std::max(report.max_cross_difference, check.max_diff);
    if (!(check.max_diff < config.cross_tolerance)) {
      std::ostringstream os;
      os << "nullspace basis field " << b << " changes the triangular function by " << check.max_diff
         << " (tolerance " << config.cross_tolerance << ")";
      throw Error(ErrorKind::Inconsistency, os.str());
    }
  }
  return report;
}

} // namespace finsler
