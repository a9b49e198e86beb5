#pragma once

#include <array>
#include <vector>

namespace tdgl {

enum class CellType { Interval, Triangle, Tetrahedron };

/// Reference volume: 1 (interval [0,1]), 1/2 (unit triangle), 1/6 (unit tetrahedron).
double reference_volume(CellType type);

/**
 * @brief Quadrature rule on a reference simplex.
 *
 * Points are barycentric coordinates (lambda_0, ..., lambda_d); the reference
 * coordinates are (lambda_1, ..., lambda_d). Weights sum to the reference volume.
 */
struct QuadratureRule {
  CellType cell = CellType::Triangle;
  int degree = 0;
  std::vector<std::array<double, 4>> points;
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
  /// Reference coordinates of point q.
  std::array<double, 3> reference_point(std::size_t q) const
  {
    return {points[q][1], points[q][2], points[q][3]};
  }
};

/// Highest supported degree: 8 on triangles, 6 on tetrahedra, 41 on intervals.
int max_quadrature_degree(CellType type);

/**
 * Symmetric rule exact for polynomials up to @p degree, with positive weights
 * and no point on a vertex. Triangle rules are Dunavant's, tetrahedron rules
 * Keast-type; degrees without a positive-weight rule use the next higher one.
 * Interval rules are Gauss-Legendre on [0,1].
 * Throws std::invalid_argument for unsupported degrees.
 */
QuadratureRule quadrature_rule(CellType type, int degree);

}  // namespace tdgl
