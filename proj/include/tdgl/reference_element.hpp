#pragma once

#include "tdgl/geometry.hpp"

#include <array>
#include <functional>
#include <span>
#include <vector>

namespace tdgl {

enum class Family { Lagrange, RaviartThomas, NedelecFirstKind, DiscontinuousLagrange };

enum class EntityKind { Vertex, Edge, Face, Cell };

/// What a degree of freedom measures.
enum class FunctionalKind {
  PointValue,       // value (or one vector component) at a point
  EdgeNormalMoment, // 2D: int_0^1 v(x(s)) . R(x_q - x_p) L_m(s) ds
  EdgeTangentMoment,// int_0^1 v(x(s)) . (x_q - x_p) ds
  FaceFluxMoment,   // int over parameter triangle of v . ((x_q - x_p) x (x_r - x_p))
  InteriorMoment    // int over the reference cell of the pulled-back component
};

struct DofInfo {
  EntityKind entity = EntityKind::Vertex;
  int local_entity = 0;  // local vertex / edge / face index, 0 for the cell
  int sub = 0;           // Legendre degree or component; dof index within the entity
  FunctionalKind functional = FunctionalKind::PointValue;
  std::array<double, 3> node{};  // reference point for PointValue
};

/**
 * @brief Finite element on the reference simplex with a nodal (dual) basis.
 *
 * Basis functions are polynomials of degree at most 2, built by inverting the
 * matrix of degrees of freedom applied to a spanning set of the element space.
 * Vector elements are mapped with the contravariant (Raviart-Thomas) or
 * covariant (Nedelec) Piola transform.
 */
class ReferenceElement {
public:
  /// Cached instance; throws std::invalid_argument for unsupported combinations.
  static const ReferenceElement& get(Family family, int degree, int dim);

  Family family() const { return family_; }
  int degree() const { return degree_; }
  int dim() const { return dim_; }
  int num_dofs() const { return static_cast<int>(dofs_.size()); }
  /// 1 for scalar families, dim for vector families.
  int value_size() const { return value_size_; }
  bool is_vector() const { return value_size_ > 1; }
  const std::vector<DofInfo>& dofs() const { return dofs_; }

  /// Reference vertices.
  std::span<const Vec3> vertices() const { return {ref_vertices_.data(), static_cast<std::size_t>(dim_ + 1)}; }

  /**
   * Tabulates the basis at a reference point.
   * values: num_dofs * value_size; jacobian: num_dofs * value_size * 3 with
   * entry [(i * value_size + c) * 3 + d] = d(phi_i)_c / d xhat_d.
   */
  void tabulate(const Vec3& xhat, std::span<double> values, std::span<double> jacobian) const;

  /// Applies degree of freedom i to a field given on the reference cell.
  double apply(int i, const std::function<Vec3(const Vec3&)>& field) const;

private:
  ReferenceElement(Family family, int degree, int dim);

  struct Poly {
    std::array<double, 10> c{};
  };

  Family family_;
  int degree_;
  int dim_;
  int value_size_ = 1;
  std::array<Vec3, 4> ref_vertices_{};
  std::vector<DofInfo> dofs_;
  // basis_[i][comp]
  std::vector<std::array<Poly, 3>> basis_;
};

/**
 * Applies a degree of freedom of @p element on a physical cell with the given
 * vertex coordinates, using the cell-local entity orientation. For vector
 * elements the result equals the reference functional applied to the Piola
 * pullback of the field. Scalar elements read component 0 of the field.
 */
double apply_local_functional(const ReferenceElement& element, int i, std::span<const Vec3> cell_vertices,
                              const std::function<Vec3(const Vec3&)>& field);

}  // namespace tdgl
