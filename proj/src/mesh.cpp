#include "tdgl/mesh.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>
#include <tuple>

namespace tdgl {

namespace {

constexpr std::array<std::array<int, 2>, 3> kTriangleEdges{{{1, 2}, {0, 2}, {0, 1}}};
constexpr std::array<std::array<int, 2>, 6> kTetEdges{{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};
constexpr std::array<std::array<int, 3>, 4> kTetFaces{{{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}}};

double signed_volume(int dim, const std::vector<Vec3>& x, std::span<const int> v)
{
  const Vec3 a = x[v[1]] - x[v[0]];
  const Vec3 b = x[v[2]] - x[v[0]];
  if (dim == 2) {
    return 0.5 * (a[0] * b[1] - a[1] * b[0]);
  }
  const Vec3 c = x[v[3]] - x[v[0]];
  return dot(a, cross(b, c)) / 6.0;
}

// Parity of the permutation that sorts three distinct integers.
signed char permutation_sign(int a, int b, int c)
{
  int inversions = (a > b) + (a > c) + (b > c);
  return inversions % 2 == 0 ? 1 : -1;
}

void require_positive(int M, const char* what)
{
  if (M < 1) {
    throw std::invalid_argument(std::string(what) + ": mesh density M must be >= 1, got " + std::to_string(M));
  }
}

}  // namespace

std::span<const std::array<int, 2>> local_edges(int dim)
{
  if (dim == 2) {
    return kTriangleEdges;
  }
  return kTetEdges;
}

std::span<const std::array<int, 3>> local_faces() { return kTetFaces; }

Mesh Mesh::from_cells(int dim, std::vector<Vec3> vertices, const std::vector<std::array<int, 4>>& cells)
{
  if (dim != 2 && dim != 3) {
    throw std::invalid_argument("Mesh: dimension must be 2 or 3");
  }
  Mesh m;
  m.dim_ = dim;
  m.num_cells_ = static_cast<int>(cells.size());
  m.vertices_ = std::move(vertices);
  const int nv = dim + 1;
  const int nvert = static_cast<int>(m.vertices_.size());
  m.cells_.reserve(cells.size() * nv);
  for (std::size_t c = 0; c < cells.size(); ++c) {
    for (int k = 0; k < nv; ++k) {
      const int v = cells[c][k];
      if (v < 0 || v >= nvert) {
        throw std::invalid_argument("Mesh: cell " + std::to_string(c) + " references vertex out of range");
      }
      m.cells_.push_back(v);
    }
    if (!(signed_volume(dim, m.vertices_, m.cell_vertices(static_cast<int>(c))) > 0.0)) {
      throw std::invalid_argument("Mesh: cell " + std::to_string(c) + " is not positively oriented");
    }
  }

  // Edges: sort (lo, hi, cell, local) records, number unique pairs in ascending order.
  const int epc = m.edges_per_cell();
  const auto ledges = local_edges(dim);
  {
    std::vector<std::tuple<int, int, int, int>> recs;
    recs.reserve(cells.size() * epc);
    for (int c = 0; c < m.num_cells_; ++c) {
      const auto cv = m.cell_vertices(c);
      for (int k = 0; k < epc; ++k) {
        const int a = cv[ledges[k][0]];
        const int b = cv[ledges[k][1]];
        recs.emplace_back(std::min(a, b), std::max(a, b), c, k);
      }
    }
    std::sort(recs.begin(), recs.end());
    m.cell_edges_.assign(cells.size() * epc, -1);
    m.cell_edge_signs_.assign(cells.size() * epc, 0);
    std::vector<int> edge_use;
    for (std::size_t i = 0; i < recs.size(); ++i) {
      const auto [lo, hi, c, k] = recs[i];
      if (i == 0 || std::get<0>(recs[i - 1]) != lo || std::get<1>(recs[i - 1]) != hi) {
        m.edges_.push_back({lo, hi});
        edge_use.push_back(0);
      }
      const int e = static_cast<int>(m.edges_.size()) - 1;
      ++edge_use[e];
      m.cell_edges_[c * epc + k] = e;
      const auto cv = m.cell_vertices(c);
      m.cell_edge_signs_[c * epc + k] = cv[ledges[k][0]] < cv[ledges[k][1]] ? 1 : -1;
      if (dim == 2) {
        if (m.facet_cells_.size() < m.edges_.size()) {
          m.facet_cells_.push_back({c, -1});
        } else if (m.facet_cells_[e][1] == -1) {
          m.facet_cells_[e][1] = c;
        } else {
          throw std::invalid_argument("Mesh: edge shared by more than two triangles");
        }
      }
    }
    m.boundary_edge_.assign(m.edges_.size(), 0);
    m.boundary_vertex_.assign(nvert, 0);
    if (dim == 2) {
      for (std::size_t e = 0; e < m.edges_.size(); ++e) {
        if (edge_use[e] == 1) {
          m.boundary_edge_[e] = 1;
          m.boundary_vertex_[m.edges_[e][0]] = 1;
          m.boundary_vertex_[m.edges_[e][1]] = 1;
        }
      }
    }
  }

  if (dim == 3) {
    std::vector<std::tuple<int, int, int, int, int>> recs;
    recs.reserve(cells.size() * 4);
    for (int c = 0; c < m.num_cells_; ++c) {
      const auto cv = m.cell_vertices(c);
      for (int k = 0; k < 4; ++k) {
        std::array<int, 3> g{cv[kTetFaces[k][0]], cv[kTetFaces[k][1]], cv[kTetFaces[k][2]]};
        std::sort(g.begin(), g.end());
        recs.emplace_back(g[0], g[1], g[2], c, k);
      }
    }
    std::sort(recs.begin(), recs.end());
    m.cell_faces_.assign(cells.size() * 4, -1);
    m.cell_face_signs_.assign(cells.size() * 4, 0);
    for (std::size_t i = 0; i < recs.size(); ++i) {
      const auto [a, b, cc, c, k] = recs[i];
      if (i == 0 || std::get<0>(recs[i - 1]) != a || std::get<1>(recs[i - 1]) != b ||
          std::get<2>(recs[i - 1]) != cc) {
        m.faces_.push_back({a, b, cc});
        m.facet_cells_.push_back({c, -1});
      } else {
        auto& fc = m.facet_cells_.back();
        if (fc[1] != -1) {
          throw std::invalid_argument("Mesh: face shared by more than two tetrahedra");
        }
        fc[1] = c;
      }
      const int f = static_cast<int>(m.faces_.size()) - 1;
      const auto cv = m.cell_vertices(c);
      m.cell_faces_[c * 4 + k] = f;
      m.cell_face_signs_[c * 4 + k] =
          permutation_sign(cv[kTetFaces[k][0]], cv[kTetFaces[k][1]], cv[kTetFaces[k][2]]);
    }
    m.boundary_face_.assign(m.faces_.size(), 0);
    for (std::size_t f = 0; f < m.faces_.size(); ++f) {
      if (m.facet_cells_[f][1] == -1) {
        m.boundary_face_[f] = 1;
        for (int v : m.faces_[f]) {
          m.boundary_vertex_[v] = 1;
        }
      }
    }
    // An edge is on the boundary iff it belongs to a boundary face.
    for (int c = 0; c < m.num_cells_; ++c) {
      for (int k = 0; k < 4; ++k) {
        if (!m.boundary_face_[m.cell_faces_[c * 4 + k]]) {
          continue;
        }
        for (int e = 0; e < 6; ++e) {
          const auto& le = kTetEdges[e];
          const auto& lf = kTetFaces[k];
          const bool on_face = std::find(lf.begin(), lf.end(), le[0]) != lf.end() &&
                               std::find(lf.begin(), lf.end(), le[1]) != lf.end();
          if (on_face) {
            m.boundary_edge_[m.cell_edges_[c * 6 + e]] = 1;
          }
        }
      }
    }
  }
  return m;
}

double Mesh::cell_volume(int c) const { return signed_volume(dim_, vertices_, cell_vertices(c)); }

double Mesh::mesh_size() const
{
  double h = 0.0;
  for (const auto& e : edges_) {
    h = std::max(h, norm(vertices_[e[1]] - vertices_[e[0]]));
  }
  return h;
}

std::array<int, 3> Mesh::facet_vertices(int f) const
{
  if (dim_ == 2) {
    return {edges_[f][0], edges_[f][1], -1};
  }
  return faces_[f];
}

void Mesh::write(std::ostream& os) const
{
  os << dim_ << ' ' << num_vertices() << ' ' << num_cells_ << '\n';
  os.precision(17);
  for (const auto& x : vertices_) {
    os << x[0] << ' ' << x[1];
    if (dim_ == 3) {
      os << ' ' << x[2];
    }
    os << '\n';
  }
  for (int c = 0; c < num_cells_; ++c) {
    const auto cv = cell_vertices(c);
    for (int k = 0; k <= dim_; ++k) {
      os << cv[k] << (k == dim_ ? '\n' : ' ');
    }
  }
}

Mesh build_unit_square_mesh(int M)
{
  require_positive(M, "build_unit_square_mesh");
  const int n = M + 1;
  std::vector<Vec3> x;
  x.reserve(static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      x.push_back({static_cast<double>(i) / M, static_cast<double>(j) / M, 0.0});
    }
  }
  std::vector<std::array<int, 4>> cells;
  cells.reserve(2 * static_cast<std::size_t>(M) * M);
  for (int j = 0; j < M; ++j) {
    for (int i = 0; i < M; ++i) {
      const int v00 = j * n + i;
      const int v10 = v00 + 1;
      const int v01 = v00 + n;
      const int v11 = v01 + 1;
      cells.push_back({v00, v10, v11, -1});
      cells.push_back({v00, v11, v01, -1});
    }
  }
  return Mesh::from_cells(2, std::move(x), cells);
}

Mesh build_lshape_mesh(int M)
{
  require_positive(M, "build_lshape_mesh");
  const int ns = 2 * M;  // squares per direction over (-1,1)
  auto kept = [M, ns](int i, int j) {
    if (i < 0 || j < 0 || i >= ns || j >= ns) {
      return false;
    }
    return !(i >= M && j < M);
  };
  std::vector<int> id(static_cast<std::size_t>(ns + 1) * (ns + 1), -1);
  std::vector<Vec3> x;
  for (int j = 0; j <= ns; ++j) {
    for (int i = 0; i <= ns; ++i) {
      if (kept(i, j) || kept(i - 1, j) || kept(i, j - 1) || kept(i - 1, j - 1)) {
        id[j * (ns + 1) + i] = static_cast<int>(x.size());
        x.push_back({static_cast<double>(i - M) / M, static_cast<double>(j - M) / M, 0.0});
      }
    }
  }
  std::vector<std::array<int, 4>> cells;
  cells.reserve(6 * static_cast<std::size_t>(M) * M);
  for (int j = 0; j < ns; ++j) {
    for (int i = 0; i < ns; ++i) {
      if (!kept(i, j)) {
        continue;
      }
      const int v00 = id[j * (ns + 1) + i];
      const int v10 = id[j * (ns + 1) + i + 1];
      const int v01 = id[(j + 1) * (ns + 1) + i];
      const int v11 = id[(j + 1) * (ns + 1) + i + 1];
      cells.push_back({v00, v10, v11, -1});
      cells.push_back({v00, v11, v01, -1});
    }
  }
  return Mesh::from_cells(2, std::move(x), cells);
}

Mesh build_unit_cube_mesh(int M)
{
  require_positive(M, "build_unit_cube_mesh");
  const int n = M + 1;
  std::vector<Vec3> x;
  x.reserve(static_cast<std::size_t>(n) * n * n);
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        x.push_back({static_cast<double>(i) / M, static_cast<double>(j) / M, static_cast<double>(k) / M});
      }
    }
  }
  auto vid = [n](int i, int j, int k) { return (k * n + j) * n + i; };
  // Kuhn subdivision: one tetrahedron per monotone lattice path from corner 000 to corner 111.
  static constexpr std::array<std::array<int, 3>, 6> perms{
      {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
  std::vector<std::array<int, 4>> cells;
  cells.reserve(6 * static_cast<std::size_t>(M) * M * M);
  for (int k = 0; k < M; ++k) {
    for (int j = 0; j < M; ++j) {
      for (int i = 0; i < M; ++i) {
        for (const auto& p : perms) {
          std::array<int, 3> ijk{i, j, k};
          std::array<int, 4> tet{};
          tet[0] = vid(ijk[0], ijk[1], ijk[2]);
          for (int s = 0; s < 3; ++s) {
            ++ijk[p[s]];
            tet[s + 1] = vid(ijk[0], ijk[1], ijk[2]);
          }
          const Vec3 a = x[tet[1]] - x[tet[0]];
          const Vec3 b = x[tet[2]] - x[tet[0]];
          const Vec3 c = x[tet[3]] - x[tet[0]];
          if (dot(a, cross(b, c)) < 0.0) {
            std::swap(tet[2], tet[3]);
          }
          cells.push_back(tet);
        }
      }
    }
  }
  return Mesh::from_cells(3, std::move(x), cells);
}

Mesh build_mesh(Domain domain, int M)
{
  switch (domain) {
    case Domain::UnitSquare:
      return build_unit_square_mesh(M);
    case Domain::LShape:
      return build_lshape_mesh(M);
    case Domain::UnitCube:
      return build_unit_cube_mesh(M);
  }
  throw std::invalid_argument("build_mesh: unknown domain");
}

}  // namespace tdgl
