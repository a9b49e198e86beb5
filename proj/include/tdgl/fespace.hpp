#pragma once

#include "tdgl/mesh.hpp"
#include "tdgl/quadrature.hpp"
#include "tdgl/reference_element.hpp"

#include <complex>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace tdgl {

using Complex = std::complex<double>;

enum class ValueKind { ScalarReal, ScalarComplex, VectorReal };

struct SpaceDescriptor {
  Family family = Family::Lagrange;
  int degree = 1;
  ValueKind value_kind = ValueKind::ScalarReal;
};

/// Affine map x = x0 + J xhat of one cell, with K = J^{-1}.
struct CellGeometry {
  int dim = 2;
  Vec3 x0{};
  double J[3][3]{};
  double K[3][3]{};
  double det = 1.0;

  Vec3 map(const Vec3& xhat) const;
};

CellGeometry cell_geometry(const Mesh& mesh, int cell);

/**
 * @brief Global numbering of a finite element space on a mesh.
 *
 * A vector-valued Lagrange space (family Lagrange, value kind VectorReal)
 * stores one scalar dof per vertex and Cartesian component, numbered
 * dim * vertex + component; its boundary dofs are the normal components on
 * axis-aligned boundary facets. For the other families the boundary dofs are
 * those attached to boundary entities.
 */
class DofMap {
public:
  DofMap(std::shared_ptr<const Mesh> mesh, SpaceDescriptor desc);

  const Mesh& mesh() const { return *mesh_; }
  const std::shared_ptr<const Mesh>& mesh_ptr() const { return mesh_; }
  const SpaceDescriptor& descriptor() const { return desc_; }
  /// Scalar reference element for vector Lagrange spaces.
  const ReferenceElement& element() const { return *element_; }

  bool is_vector_lagrange() const { return vector_lagrange_; }
  /// 1 for scalar spaces, the mesh dimension for vector spaces.
  int value_size() const { return value_size_; }
  int num_dofs() const { return num_dofs_; }
  int dofs_per_cell() const { return dofs_per_cell_; }

  std::span<const int> cell_dofs(int c) const
  {
    return {cell_dofs_.data() + static_cast<std::size_t>(c) * dofs_per_cell_,
            static_cast<std::size_t>(dofs_per_cell_)};
  }
  std::span<const signed char> cell_signs(int c) const
  {
    return {cell_signs_.data() + static_cast<std::size_t>(c) * dofs_per_cell_,
            static_cast<std::size_t>(dofs_per_cell_)};
  }

  /// Sorted global indices carrying the essential boundary condition.
  const std::vector<int>& boundary_dofs() const { return boundary_dofs_; }
  bool is_boundary_dof(int i) const { return boundary_mask_[i] != 0; }

private:
  std::shared_ptr<const Mesh> mesh_;
  SpaceDescriptor desc_;
  const ReferenceElement* element_ = nullptr;
  bool vector_lagrange_ = false;
  int value_size_ = 1;
  int num_dofs_ = 0;
  int dofs_per_cell_ = 0;
  std::vector<int> cell_dofs_;
  std::vector<signed char> cell_signs_;
  std::vector<int> boundary_dofs_;
  std::vector<char> boundary_mask_;
};

/// Validates the family/degree/value-kind combination and builds the dof map.
std::shared_ptr<const DofMap> make_space(std::shared_ptr<const Mesh> mesh, SpaceDescriptor desc);

template <typename T>
struct FeFunction {
  std::shared_ptr<const DofMap> space;
  std::vector<T> coefficients;

  FeFunction() = default;
  explicit FeFunction(std::shared_ptr<const DofMap> s)
      : space(std::move(s)), coefficients(static_cast<std::size_t>(space->num_dofs()), T{})
  {
  }
};

using RealFunction = FeFunction<double>;
using ComplexFunction = FeFunction<Complex>;

/**
 * @brief Physical basis functions of one cell at the points of a quadrature rule.
 *
 * Entries are indexed [q * num_dofs + i] and already include the dof signs.
 * Scalar spaces store the value in component 0 and their curl is the rotated
 * gradient (d/dy, -d/dx) in 2D. Vector spaces store the 2D curl in component 2;
 * Raviart-Thomas entries carry no curl and Nedelec entries no divergence.
 */
struct BasisValues {
  int num_points = 0;
  int num_dofs = 0;
  std::vector<Vec3> points;
  std::vector<double> JxW;
  std::vector<Vec3> value;
  std::vector<Vec3> grad;
  std::vector<double> div;
  std::vector<Vec3> curl;
};

class BasisEvaluator {
public:
  BasisEvaluator(const DofMap& space, QuadratureRule rule);

  void reinit(int cell);
  int cell() const { return cell_; }
  const BasisValues& values() const { return values_; }
  const QuadratureRule& rule() const { return rule_; }

private:
  const DofMap* space_;
  QuadratureRule rule_;
  int cell_ = -1;
  int nref_ = 0;
  int vs_ = 1;
  std::vector<double> ref_values_;
  std::vector<double> ref_jacobians_;
  BasisValues values_;
};

template <typename T>
struct FieldValue {
  std::array<T, 3> value{};
  std::array<T, 3> grad{};
  T div{};
  std::array<T, 3> curl{};
};

/// Field value (and derivatives) of f at point q of the evaluator's current cell.
template <typename T>
FieldValue<T> evaluate_at(const BasisValues& basis, std::span<const int> dofs, const std::vector<T>& coefficients,
                          int q);

/// Evaluates f at a reference point of a cell.
template <typename T>
FieldValue<T> evaluate(const FeFunction<T>& f, int cell, const Vec3& xhat);

using ScalarField = std::function<double(const Vec3&)>;
using ComplexField = std::function<Complex(const Vec3&)>;
using VectorField = std::function<Vec3(const Vec3&)>;

/// Degree-of-freedom interpolation pi_h. Scalar families use the scalar callbacks.
RealFunction interpolate(std::shared_ptr<const DofMap> space, const ScalarField& field);
ComplexFunction interpolate(std::shared_ptr<const DofMap> space, const ComplexField& field);
RealFunction interpolate(std::shared_ptr<const DofMap> space, const VectorField& field);

/// Degree-of-freedom values of a vector field restricted to the dofs in @p mask (others 0).
std::vector<double> interpolate_dofs(const DofMap& space, const VectorField& field, const std::vector<char>* mask);

}  // namespace tdgl
