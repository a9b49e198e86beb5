#pragma once

#include "tdgl/geometry.hpp"

#include <array>
#include <iosfwd>
#include <span>
#include <vector>

namespace tdgl {

/**
 * @brief Conforming simplicial mesh (triangles in 2D, tetrahedra in 3D).
 *
 * Edges and faces are stored with canonical orientation: ascending global
 * vertex index. Every cell keeps its vertices in positively oriented order,
 * and for each of its edges (and faces in 3D) a sign telling whether the
 * cell-local orientation agrees with the canonical one.
 *
 * Local numbering:
 *  - triangle edge k is opposite vertex k: {1,2}, {0,2}, {0,1};
 *  - tetrahedron edges: {0,1}, {0,2}, {0,3}, {1,2}, {1,3}, {2,3};
 *  - tetrahedron face k is opposite vertex k: {1,2,3}, {0,2,3}, {0,1,3}, {0,1,2}.
 *
 * Local entities always list their vertices in increasing local index.
 * The mesh is immutable once built.
 */
class Mesh {
public:
  /// Builds topology from vertices and cells; cells must have positive signed volume.
  static Mesh from_cells(int dim, std::vector<Vec3> vertices, const std::vector<std::array<int, 4>>& cells);

  int dim() const { return dim_; }
  int vertices_per_cell() const { return dim_ + 1; }
  int edges_per_cell() const { return dim_ == 2 ? 3 : 6; }
  int facets_per_cell() const { return dim_ + 1; }

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_cells() const { return num_cells_; }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  int num_faces() const { return static_cast<int>(faces_.size()); }
  /// Codimension-one entities: edges in 2D, faces in 3D.
  int num_facets() const { return dim_ == 2 ? num_edges() : num_faces(); }

  const Vec3& vertex(int v) const { return vertices_[v]; }
  std::span<const int> cell_vertices(int c) const
  {
    return {cells_.data() + static_cast<std::size_t>(c) * (dim_ + 1), static_cast<std::size_t>(dim_ + 1)};
  }
  const std::array<int, 2>& edge(int e) const { return edges_[e]; }
  const std::array<int, 3>& face(int f) const { return faces_[f]; }

  std::span<const int> cell_edges(int c) const
  {
    const auto n = static_cast<std::size_t>(edges_per_cell());
    return {cell_edges_.data() + c * n, n};
  }
  std::span<const signed char> cell_edge_signs(int c) const
  {
    const auto n = static_cast<std::size_t>(edges_per_cell());
    return {cell_edge_signs_.data() + c * n, n};
  }
  std::span<const int> cell_faces(int c) const { return {cell_faces_.data() + c * 4u, 4u}; }
  std::span<const signed char> cell_face_signs(int c) const { return {cell_face_signs_.data() + c * 4u, 4u}; }

  /// Facet k of cell c (edge k in 2D, face k in 3D) and its orientation sign.
  int cell_facet(int c, int k) const { return dim_ == 2 ? cell_edges(c)[k] : cell_faces(c)[k]; }
  signed char cell_facet_sign(int c, int k) const
  {
    return dim_ == 2 ? cell_edge_signs(c)[k] : cell_face_signs(c)[k];
  }

  /// Cells adjacent to a facet; the second entry is -1 on the boundary.
  const std::array<int, 2>& facet_cells(int f) const { return facet_cells_[f]; }

  bool is_boundary_vertex(int v) const { return boundary_vertex_[v] != 0; }
  bool is_boundary_edge(int e) const { return boundary_edge_[e] != 0; }
  bool is_boundary_face(int f) const { return boundary_face_[f] != 0; }
  bool is_boundary_facet(int f) const { return dim_ == 2 ? is_boundary_edge(f) : is_boundary_face(f); }

  /// Signed measure of a cell (positive by construction).
  double cell_volume(int c) const;
  /// Largest cell diameter.
  double mesh_size() const;

  /// Canonical vertices of a facet (2 in 2D, 3 in 3D), in ascending global index.
  std::array<int, 3> facet_vertices(int f) const;

  /// Plain-text dump: header `dim nv nc`, vertex coordinates, then 0-based cell vertices.
  void write(std::ostream& os) const;

private:
  Mesh() = default;

  int dim_ = 0;
  int num_cells_ = 0;
  std::vector<Vec3> vertices_;
  std::vector<int> cells_;
  std::vector<std::array<int, 2>> edges_;
  std::vector<std::array<int, 3>> faces_;
  std::vector<int> cell_edges_;
  std::vector<signed char> cell_edge_signs_;
  std::vector<int> cell_faces_;
  std::vector<signed char> cell_face_signs_;
  std::vector<std::array<int, 2>> facet_cells_;
  std::vector<char> boundary_vertex_;
  std::vector<char> boundary_edge_;
  std::vector<char> boundary_face_;
};

/// Local vertex pairs of the cell edges, in local edge order.
std::span<const std::array<int, 2>> local_edges(int dim);
/// Local vertex triples of the tetrahedron faces.
std::span<const std::array<int, 3>> local_faces();

/// (M+1)^2 vertices on (0,1)^2, every grid square cut along its lower-left to upper-right diagonal.
Mesh build_unit_square_mesh(int M);

/// (-1,1)^2 minus [0,1]x[-1,0] with M cells per unit length; reentrant corner at the origin.
Mesh build_lshape_mesh(int M);

/// (M+1)^3 vertices on (0,1)^3, every grid cube split into 6 Kuhn tetrahedra.
Mesh build_unit_cube_mesh(int M);

enum class Domain { UnitSquare, LShape, UnitCube };

inline int domain_dimension(Domain d) { return d == Domain::UnitCube ? 3 : 2; }
Mesh build_mesh(Domain domain, int M);

}  // namespace tdgl
