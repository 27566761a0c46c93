#include "finsler/grid.hpp"

#include <array>
#include <cmath>
#include <map>
#include <numbers>

namespace finsler {

double DirectionGrid::total_weight() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

double sphere_area(int dimension) {
  // |S^{n-1}| = 2 pi^{n/2} / Gamma(n/2)
  return 2.0 * std::pow(std::numbers::pi, 0.5 * dimension) / std::tgamma(0.5 * dimension);
}

void gauss_legendre(int count, double a, double b, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(count, 0.0);
  weights.assign(count, 0.0);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (int i = 0; i < (count + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (count + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < count; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      dp = count * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    nodes[i] = mid - half * z;
    nodes[count - 1 - i] = mid + half * z;
    weights[i] = weights[count - 1 - i] = half * w;
  }
}

DirectionGrid polygon_grid(int m) {
  if (m < 8) throw Error(ErrorKind::DegenerateInput, "polygon grid needs at least 8 directions");
  DirectionGrid grid;
  grid.dimension = 2;
  grid.kind = "polygon";
  grid.directions.reserve(m);
  for (int k = 0; k < m; ++k) {
    const double theta = 2.0 * std::numbers::pi * k / m;
    Vector u(2);
    u << std::cos(theta), std::sin(theta);
    grid.directions.push_back(u);
  }
  grid.weights.assign(m, 2.0 * std::numbers::pi / m);
  return grid;
}

namespace {

using Tri = std::array<int, 3>;

// Van Oosterom-Strackee solid angle of the spherical triangle (a, b, c).
double spherical_triangle_area(const Vector& a, const Vector& b, const Vector& c) {
  const Eigen::Vector3d A = a, B = b, C = c;
  const double num = std::abs(A.dot(B.cross(C)));
  const double den = 1.0 + A.dot(B) + B.dot(C) + C.dot(A);
  return 2.0 * std::atan2(num, den);
}

} // namespace

DirectionGrid icosahedral_grid(int levels) {
  const double phi = 0.5 * (1.0 + std::sqrt(5.0));
  std::vector<Vector> verts;
  auto add = [&](double x, double y, double z) {
    Vector v(3);
    v << x, y, z;
    verts.push_back(v.normalized());
  };
  add(-1, phi, 0); add(1, phi, 0); add(-1, -phi, 0); add(1, -phi, 0);
  add(0, -1, phi); add(0, 1, phi); add(0, -1, -phi); add(0, 1, -phi);
  add(phi, 0, -1); add(phi, 0, 1); add(-phi, 0, -1); add(-phi, 0, 1);
  std::vector<Tri> faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                            {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                            {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                            {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};

  for (int level = 0; level < levels; ++level) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int i, int j) {
      const auto key = std::minmax(i, j);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      verts.push_back((verts[i] + verts[j]).normalized());
      const int idx = static_cast<int>(verts.size()) - 1;
      midpoint.emplace(key, idx);
      return idx;
    };
    std::vector<Tri> next;
    next.reserve(faces.size() * 4);
    for (const Tri& f : faces) {
      const int a = mid(f[0], f[1]), b = mid(f[1], f[2]), c = mid(f[2], f[0]);
      next.push_back({f[0], a, c});
      next.push_back({f[1], b, a});
      next.push_back({f[2], c, b});
      next.push_back({a, b, c});
    }
    faces = std::move(next);
  }

  DirectionGrid grid;
  grid.dimension = 3;
  grid.kind = "icosahedral";
  grid.directions = verts;
  grid.weights.assign(verts.size(), 0.0);
  for (const Tri& f : faces) {
    const double area = spherical_triangle_area(verts[f[0]], verts[f[1]], verts[f[2]]);
    for (int v : f) grid.weights[v] += area / 3.0;
  }
  return grid;
}

DirectionGrid hopf_grid(int latitude_nodes, int angle_nodes) {
  if (latitude_nodes < 2 || angle_nodes < 3)
    throw Error(ErrorKind::DegenerateInput, "Hopf grid too coarse");
  std::vector<double> eta, w_eta;
  gauss_legendre(latitude_nodes, 0.0, 0.5 * std::numbers::pi, eta, w_eta);

  DirectionGrid grid;
  grid.dimension = 4;
  grid.kind = "hopf-gauss-legendre";
  const double dphi = 2.0 * std::numbers::pi / angle_nodes;
  for (int a = 0; a < latitude_nodes; ++a) {
    const double ce = std::cos(eta[a]), se = std::sin(eta[a]);
    const double w = w_eta[a] * se * ce * dphi * dphi;
    for (int i = 0; i < angle_nodes; ++i) {
      // half-step offset in the second angle avoids aligning both circles
      const double p1 = dphi * i;
      for (int j = 0; j < angle_nodes; ++j) {
        const double p2 = dphi * (j + 0.5);
        Vector u(4);
        u << ce * std::cos(p1), ce * std::sin(p1), se * std::cos(p2), se * std::sin(p2);
        grid.directions.push_back(u);
        grid.weights.push_back(w);
      }
    }
  }
  return grid;
}

DirectionGrid make_direction_grid(int dimension, int m) {
  switch (dimension) {
  case 2: return polygon_grid(m > 0 ? m : 512);
  case 3: {
    const int target = m > 0 ? m : 2562;
    int levels = 1;
    while (levels < 7 && std::abs(10.0 * std::pow(4.0, levels + 1) + 2 - target)
                             < std::abs(10.0 * std::pow(4.0, levels) + 2 - target))
      ++levels;
    return icosahedral_grid(levels);
  }
  case 4: {
    const int target = m > 0 ? m : 10000;
    const int lat = std::max(2, static_cast<int>(std::lround(0.75 * std::cbrt(static_cast<double>(target)))));
    const int ang = std::max(3, static_cast<int>(std::lround(std::sqrt(static_cast<double>(target) / lat))));
    return hopf_grid(lat, ang);
  }
  default:
    throw Error(ErrorKind::DegenerateInput, "direction grids are available for dimensions 2, 3 and 4");
  }
}

} // namespace finsler
