#pragma once

#include <string>
#include <vector>

#include "finsler/chart.hpp"

namespace finsler {

/// Quadrature grid on the unit sphere S^{n-1}.
///
/// Kinds:
///   2D  uniform m-gon, equal weights 2*pi/m.
///   3D  subdivided icosahedron; a vertex carries one third of the
///       spherical area of each incident triangle.
///   4D  Hopf-coordinate product grid: Gauss-Legendre in the latitude
///       eta in [0, pi/2] (measure sin(eta) cos(eta)) times uniform
///       nodes in both angles.
/// Weights sum to the sphere area in every case.
struct DirectionGrid {
  int dimension = 0;
  std::vector<Vector> directions;
  std::vector<double> weights;
  std::string kind;

  std::size_t size() const { return directions.size(); }
  double total_weight() const;
};

DirectionGrid polygon_grid(int m);
// 10 * 4^levels + 2 vertices; levels = 4 gives 2562.
DirectionGrid icosahedral_grid(int levels);
DirectionGrid hopf_grid(int latitude_nodes, int angle_nodes);

// Grid of roughly m directions for n in {2, 3, 4}; m <= 0 selects the
// defaults 512 / 2562 / 10^4.
DirectionGrid make_direction_grid(int dimension, int m = 0);

// Gauss-Legendre nodes and weights on [a, b].
void gauss_legendre(int count, double a, double b, std::vector<double>& nodes, std::vector<double>& weights);

double sphere_area(int dimension);

} // namespace finsler
