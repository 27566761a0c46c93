#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "finsler/grid.hpp"
#include "finsler/metric.hpp"

namespace finsler {

// Vertices p = c_0, ..., c_k = q.
using PathPolyline = std::vector<Vector>;

// Sum over segments of F(midpoint, increment).
double path_length(const MetricField& F, const PathPolyline& path);

struct DistanceOptions {
  int segments = 32;   // k
  int iterations = 60; // Newton iterations
  // Combine the k- and 2k-segment lengths as (4 L_2k - L_k) / 3, cancelling
  // the leading h^2 discretization error.
  bool extrapolate = false;
};

struct DistanceResult {
  double length = 0.0;
  double straight_length = 0.0;
  int iterations = 0;
  PathPolyline path;
};

/// Nonsymmetric distance d(p, q) by polyline minimization.
///
/// Minimizes the discrete energy sum F(m_i, dx_i)^2 over the interior
/// vertices, starting from the straight segment, and reports the midpoint
/// length of the minimizer. The iteration is damped Newton with
/// finite-difference block-tridiagonal Hessians and a backtracking line
/// search that never leaves the chart box. The reported length never
/// exceeds the straight-segment length.
///
/// The energy minimizer has constant discrete speed, so its length error
/// has a clean h^2 expansion; minimizing the length directly lets vertices
/// drift along the path and spoils that expansion.
DistanceResult minimize_distance(const MetricField& F, const Vector& p, const Vector& q, const ChartDomain& chart,
                                 const DistanceOptions& options = {});

// Same minimization started from `initial` (endpoints fixed). Its segment
// count replaces options.segments.
DistanceResult minimize_distance(const MetricField& F, PathPolyline initial, const ChartDomain& chart,
                                 const DistanceOptions& options = {});

// Splits every segment of a polyline at its midpoint.
PathPolyline refine_path(const PathPolyline& path);

double distance(const MetricField& F, const Vector& p, const Vector& q, const ChartDomain& chart,
                const DistanceOptions& options = {});

// Distance at (k, iters) and at (2k, 2 iters); the Cauchy difference is the
// operational solver tolerance. With extrapolation both levels are
// extrapolated values, so three polylines (k, 2k, 4k) are solved.
struct CertifiedDistance {
  double coarse = 0.0;
  double fine = 0.0;
  double cauchy() const { return std::abs(fine - coarse); }
};

CertifiedDistance certified_distance(const MetricField& F, const Vector& p, const Vector& q,
                                     const ChartDomain& chart, const DistanceOptions& options = {});

struct TripleSample {
  Vector p, q, r;
};

// T(p,q,r) = d(p,q) + d(q,r) - d(p,r).
double triangular(const MetricField& F, const TripleSample& s, const ChartDomain& chart,
                  const DistanceOptions& options = {});

// Deterministic 64-bit generator (splitmix64) for reproducible sampling.
class SeededSampler {
public:
  explicit SeededSampler(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  double uniform(); // [0, 1)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
  std::uint64_t state_;
};

// Triples with all points inside the box shrunk by `fraction` about its center.
std::vector<TripleSample> seeded_triples(const ChartDomain& chart, int count, std::uint64_t seed,
                                         double fraction = 1.0);

struct TripleCheckRow {
  TripleSample triple;
  double T = 0.0;
  double T_mapped = 0.0;
  double diff() const { return std::abs(T_mapped - T); }
};

struct TInvarianceResult {
  double max_diff = 0.0;
  std::vector<TripleCheckRow> rows;
};

TInvarianceResult t_invariance_check(const MetricField& F, const PointMap& phi, const std::vector<TripleSample>& triples,
                                     const ChartDomain& chart, const DistanceOptions& options = {});

// Columns p1..pn,q1..,r1..,T,T_phi,diff.
void write_csv(std::ostream& os, const TInvarianceResult& result);

struct PullbackDelta {
  double linearity_residual = 0.0;
  double closedness_residual = 0.0;
  Vector covector; // best linear fit of phi^*F - F at x, the candidate df(x)
};

/// Measures how far phi is from satisfying phi^*F = F + df.
///
/// The defect delta(u) = F(phi(x), Dphi(x) u) - F(x, u) is fitted by a
/// covector on the grid; the closedness residual is the largest component
/// of d(fitted covector field) over `closedness_points` (x itself when
/// empty).
PullbackDelta pullback_delta(const MetricField& F, const PointMap& phi, const Vector& x, const DirectionGrid& grid,
                             const ChartDomain& chart, const std::vector<Vector>& closedness_points = {});

} // namespace finsler
