#include "tdgl/fespace.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tdgl {

Vec3 CellGeometry::map(const Vec3& xhat) const
{
  Vec3 x = x0;
  for (int d = 0; d < dim; ++d) {
    for (int e = 0; e < dim; ++e) {
      x[d] += J[d][e] * xhat[e];
    }
  }
  return x;
}

CellGeometry cell_geometry(const Mesh& mesh, int cell)
{
  CellGeometry g;
  g.dim = mesh.dim();
  const auto verts = mesh.cell_vertices(cell);
  g.x0 = mesh.vertex(verts[0]);
  for (int e = 0; e < g.dim; ++e) {
    const Vec3 col = mesh.vertex(verts[e + 1]) - g.x0;
    for (int d = 0; d < g.dim; ++d) {
      g.J[d][e] = col[d];
    }
  }
  if (g.dim == 2) {
    g.det = g.J[0][0] * g.J[1][1] - g.J[0][1] * g.J[1][0];
    g.K[0][0] = g.J[1][1] / g.det;
    g.K[0][1] = -g.J[0][1] / g.det;
    g.K[1][0] = -g.J[1][0] / g.det;
    g.K[1][1] = g.J[0][0] / g.det;
  } else {
    const auto& a = g.J;
    g.det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
            a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        const int i1 = (j + 1) % 3, i2 = (j + 2) % 3;
        const int j1 = (i + 1) % 3, j2 = (i + 2) % 3;
        g.K[i][j] = (a[i1][j1] * a[i2][j2] - a[i1][j2] * a[i2][j1]) / g.det;
      }
    }
  }
  return g;
}

DofMap::DofMap(std::shared_ptr<const Mesh> mesh, SpaceDescriptor desc) : mesh_(std::move(mesh)), desc_(desc)
{
  if (!mesh_) {
    throw std::invalid_argument("DofMap: null mesh");
  }
  const Mesh& m = *mesh_;
  const int dim = m.dim();
  const bool vector_family = desc.family == Family::RaviartThomas || desc.family == Family::NedelecFirstKind;
  if (vector_family && desc.value_kind != ValueKind::VectorReal) {
    throw std::invalid_argument("make_space: vector-valued family needs value kind VectorReal");
  }
  if (desc.family == Family::DiscontinuousLagrange && desc.value_kind != ValueKind::ScalarReal) {
    throw std::invalid_argument("make_space: discontinuous Lagrange is scalar real only");
  }
  vector_lagrange_ = desc.family == Family::Lagrange && desc.value_kind == ValueKind::VectorReal;
  if (vector_lagrange_ && desc.degree != 1) {
    throw std::invalid_argument("make_space: vector Lagrange supports degree 1 only");
  }
  element_ = &ReferenceElement::get(desc.family, desc.degree, dim);
  value_size_ = (vector_family || vector_lagrange_) ? dim : 1;

  const ReferenceElement& el = *element_;
  const int nloc = el.num_dofs();
  dofs_per_cell_ = vector_lagrange_ ? nloc * dim : nloc;
  const int nc = m.num_cells();
  cell_dofs_.resize(static_cast<std::size_t>(nc) * dofs_per_cell_);
  cell_signs_.resize(cell_dofs_.size(), 1);

  switch (desc.family) {
    case Family::Lagrange:
      num_dofs_ = desc.degree == 1 ? m.num_vertices() : m.num_vertices() + m.num_edges();
      if (vector_lagrange_) {
        num_dofs_ = dim * m.num_vertices();
      }
      break;
    case Family::DiscontinuousLagrange:
      num_dofs_ = nc * nloc;
      break;
    case Family::RaviartThomas:
      if (dim == 2) {
        num_dofs_ = desc.degree == 0 ? m.num_edges() : 2 * m.num_edges() + 2 * nc;
      } else {
        num_dofs_ = m.num_faces();
      }
      break;
    case Family::NedelecFirstKind:
      num_dofs_ = m.num_edges();
      break;
  }

  for (int c = 0; c < nc; ++c) {
    const auto verts = m.cell_vertices(c);
    int* dofs = cell_dofs_.data() + static_cast<std::size_t>(c) * dofs_per_cell_;
    signed char* signs = cell_signs_.data() + static_cast<std::size_t>(c) * dofs_per_cell_;
    for (int i = 0; i < nloc; ++i) {
      const DofInfo& info = el.dofs()[i];
      int g = 0;
      signed char s = 1;
      switch (info.entity) {
        case EntityKind::Vertex:
          g = verts[info.local_entity];
          break;
        case EntityKind::Edge: {
          const int e = m.cell_edges(c)[info.local_entity];
          const signed char eps = m.cell_edge_signs(c)[info.local_entity];
          if (desc.family == Family::Lagrange) {
            g = m.num_vertices() + e;
          } else if (desc.family == Family::RaviartThomas) {
            g = (desc.degree + 1) * e + info.sub;
            // Odd Legendre moments are invariant under edge reversal.
            s = info.sub % 2 == 0 ? eps : 1;
          } else {
            g = e;
            s = eps;
          }
          break;
        }
        case EntityKind::Face:
          g = m.cell_faces(c)[info.local_entity];
          s = m.cell_face_signs(c)[info.local_entity];
          break;
        case EntityKind::Cell:
          if (desc.family == Family::DiscontinuousLagrange) {
            g = c * nloc + i;
          } else {
            g = 2 * m.num_edges() + 2 * c + info.sub;
          }
          break;
      }
      if (vector_lagrange_) {
        for (int comp = 0; comp < dim; ++comp) {
          dofs[i * dim + comp] = dim * g + comp;
        }
      } else {
        dofs[i] = g;
        signs[i] = s;
      }
    }
  }

  boundary_mask_.assign(num_dofs_, 0);
  if (vector_lagrange_) {
    for (int f = 0; f < m.num_facets(); ++f) {
      if (!m.is_boundary_facet(f)) {
        continue;
      }
      const auto fv = m.facet_vertices(f);
      const int nfv = dim;
      Vec3 normal{};
      if (dim == 2) {
        normal = rotate_cw(m.vertex(fv[1]) - m.vertex(fv[0]));
      } else {
        normal = cross(m.vertex(fv[1]) - m.vertex(fv[0]), m.vertex(fv[2]) - m.vertex(fv[0]));
      }
      const double len = norm(normal);
      int axis = -1;
      for (int a = 0; a < dim; ++a) {
        if (std::abs(std::abs(normal[a]) - len) <= 1e-12 * len) {
          axis = a;
        }
      }
      if (axis < 0) {
        throw std::invalid_argument("make_space: vector Lagrange needs axis-aligned boundary facets");
      }
      for (int k = 0; k < nfv; ++k) {
        boundary_mask_[dim * fv[k] + axis] = 1;
      }
    }
  } else if (desc.family != Family::DiscontinuousLagrange) {
    for (int c = 0; c < nc; ++c) {
      for (int i = 0; i < nloc; ++i) {
        const DofInfo& info = el.dofs()[i];
        bool on_boundary = false;
        switch (info.entity) {
          case EntityKind::Vertex:
            on_boundary = m.is_boundary_vertex(m.cell_vertices(c)[info.local_entity]);
            break;
          case EntityKind::Edge:
            on_boundary = m.is_boundary_edge(m.cell_edges(c)[info.local_entity]);
            break;
          case EntityKind::Face:
            on_boundary = m.is_boundary_face(m.cell_faces(c)[info.local_entity]);
            break;
          case EntityKind::Cell:
            break;
        }
        if (on_boundary) {
          boundary_mask_[cell_dofs(c)[i]] = 1;
        }
      }
    }
  }
  for (int i = 0; i < num_dofs_; ++i) {
    if (boundary_mask_[i]) {
      boundary_dofs_.push_back(i);
    }
  }
}

std::shared_ptr<const DofMap> make_space(std::shared_ptr<const Mesh> mesh, SpaceDescriptor desc)
{
  return std::make_shared<const DofMap>(std::move(mesh), desc);
}

BasisEvaluator::BasisEvaluator(const DofMap& space, QuadratureRule rule) : space_(&space), rule_(std::move(rule))
{
  const ReferenceElement& el = space.element();
  nref_ = el.num_dofs();
  vs_ = el.value_size();
  const int nq = static_cast<int>(rule_.size());
  ref_values_.resize(static_cast<std::size_t>(nq) * nref_ * vs_);
  ref_jacobians_.resize(ref_values_.size() * 3);
  for (int q = 0; q < nq; ++q) {
    const std::size_t off = static_cast<std::size_t>(q) * nref_ * vs_;
    el.tabulate(rule_.reference_point(q), std::span<double>(ref_values_.data() + off, nref_ * vs_),
                std::span<double>(ref_jacobians_.data() + 3 * off, 3 * nref_ * vs_));
  }
  values_.num_points = nq;
  values_.num_dofs = space.dofs_per_cell();
  const std::size_t n = static_cast<std::size_t>(nq) * values_.num_dofs;
  values_.points.resize(nq);
  values_.JxW.resize(nq);
  values_.value.resize(n);
  values_.grad.resize(n);
  values_.div.resize(n);
  values_.curl.resize(n);
}

void BasisEvaluator::reinit(int cell)
{
  cell_ = cell;
  const DofMap& space = *space_;
  const int dim = space.mesh().dim();
  const CellGeometry G = cell_geometry(space.mesh(), cell);
  const auto signs = space.cell_signs(cell);
  const Family family = space.descriptor().family;
  const bool vlag = space.is_vector_lagrange();
  const int nd = values_.num_dofs;
  BasisValues& bv = values_;

  for (int q = 0; q < bv.num_points; ++q) {
    bv.points[q] = G.map(rule_.reference_point(q));
    bv.JxW[q] = rule_.weights[q] * std::abs(G.det);
    const double* rv = ref_values_.data() + static_cast<std::size_t>(q) * nref_ * vs_;
    const double* rj = ref_jacobians_.data() + static_cast<std::size_t>(q) * nref_ * vs_ * 3;
    const std::size_t base = static_cast<std::size_t>(q) * nd;

    for (int i = 0; i < nref_; ++i) {
      if (family == Family::Lagrange || family == Family::DiscontinuousLagrange) {
        const double phi = rv[i];
        Vec3 g{};
        for (int d = 0; d < dim; ++d) {
          for (int e = 0; e < dim; ++e) {
            g[d] += G.K[e][d] * rj[i * 3 + e];
          }
        }
        if (vlag) {
          for (int c = 0; c < dim; ++c) {
            const std::size_t k = base + i * dim + c;
            Vec3 ec{};
            ec[c] = 1.0;
            bv.value[k] = phi * ec;
            bv.grad[k] = g;
            bv.div[k] = g[c];
            bv.curl[k] = cross(g, ec);
          }
        } else {
          const double s = signs[i];
          const std::size_t k = base + i;
          bv.value[k] = {s * phi, 0.0, 0.0};
          bv.grad[k] = s * g;
          bv.div[k] = 0.0;
          bv.curl[k] = dim == 2 ? s * rotate_cw(g) : Vec3{};
        }
        continue;
      }

      const double s = signs[i];
      const std::size_t k = base + i;
      const double* vh = rv + i * vs_;
      const double* jh = rj + i * vs_ * 3;
      Vec3 v{};
      Vec3 curl{};
      double div = 0.0;
      if (family == Family::RaviartThomas) {
        for (int d = 0; d < dim; ++d) {
          for (int c = 0; c < dim; ++c) {
            v[d] += G.J[d][c] * vh[c];
          }
          v[d] /= G.det;
        }
        for (int c = 0; c < dim; ++c) {
          div += jh[c * 3 + c];
        }
        div /= G.det;
      } else {
        for (int d = 0; d < 3; ++d) {
          for (int c = 0; c < 3; ++c) {
            v[d] += G.K[c][d] * vh[c];
          }
        }
        const Vec3 ch{jh[2 * 3 + 1] - jh[1 * 3 + 2], jh[0 * 3 + 2] - jh[2 * 3 + 0], jh[1 * 3 + 0] - jh[0 * 3 + 1]};
        for (int d = 0; d < 3; ++d) {
          for (int c = 0; c < 3; ++c) {
            curl[d] += G.J[d][c] * ch[c];
          }
          curl[d] /= G.det;
        }
      }
      bv.value[k] = s * v;
      bv.grad[k] = {};
      bv.div[k] = s * div;
      bv.curl[k] = s * curl;
    }
  }
}

template <typename T>
FieldValue<T> evaluate_at(const BasisValues& basis, std::span<const int> dofs, const std::vector<T>& coefficients,
                          int q)
{
  FieldValue<T> out;
  const std::size_t base = static_cast<std::size_t>(q) * basis.num_dofs;
  for (int i = 0; i < basis.num_dofs; ++i) {
    const T c = coefficients[dofs[i]];
    const std::size_t k = base + i;
    for (int d = 0; d < 3; ++d) {
      out.value[d] += c * basis.value[k][d];
      out.grad[d] += c * basis.grad[k][d];
      out.curl[d] += c * basis.curl[k][d];
    }
    out.div += c * basis.div[k];
  }
  return out;
}

template <typename T>
FieldValue<T> evaluate(const FeFunction<T>& f, int cell, const Vec3& xhat)
{
  QuadratureRule rule;
  rule.cell = f.space->mesh().dim() == 2 ? CellType::Triangle : CellType::Tetrahedron;
  rule.points.push_back({1.0 - xhat[0] - xhat[1] - xhat[2], xhat[0], xhat[1], xhat[2]});
  rule.weights.push_back(1.0);
  BasisEvaluator ev(*f.space, rule);
  ev.reinit(cell);
  return evaluate_at(ev.values(), f.space->cell_dofs(cell), f.coefficients, 0);
}

template FieldValue<double> evaluate_at(const BasisValues&, std::span<const int>, const std::vector<double>&, int);
template FieldValue<Complex> evaluate_at(const BasisValues&, std::span<const int>, const std::vector<Complex>&, int);
template FieldValue<double> evaluate(const FeFunction<double>&, int, const Vec3&);
template FieldValue<Complex> evaluate(const FeFunction<Complex>&, int, const Vec3&);

std::vector<double> interpolate_dofs(const DofMap& space, const VectorField& field, const std::vector<char>* mask)
{
  const Mesh& m = space.mesh();
  const int dim = m.dim();
  const ReferenceElement& el = space.element();
  std::vector<double> out(space.num_dofs(), 0.0);
  std::vector<char> done(space.num_dofs(), 0);
  std::array<Vec3, 4> x{};
  for (int c = 0; c < m.num_cells(); ++c) {
    const auto verts = m.cell_vertices(c);
    for (int k = 0; k <= dim; ++k) {
      x[k] = m.vertex(verts[k]);
    }
    const auto dofs = space.cell_dofs(c);
    const auto signs = space.cell_signs(c);
    for (int i = 0; i < space.dofs_per_cell(); ++i) {
      const int g = dofs[i];
      if (done[g] || (mask != nullptr && !(*mask)[g])) {
        continue;
      }
      done[g] = 1;
      if (space.is_vector_lagrange()) {
        out[g] = field(x[i / dim])[i % dim];
      } else {
        out[g] = signs[i] * apply_local_functional(el, i, std::span<const Vec3>(x.data(), dim + 1), field);
      }
    }
  }
  return out;
}

RealFunction interpolate(std::shared_ptr<const DofMap> space, const ScalarField& field)
{
  if (space->value_size() != 1) {
    throw std::invalid_argument("interpolate: scalar field into a vector space");
  }
  RealFunction f(space);
  f.coefficients = interpolate_dofs(*space, [&](const Vec3& x) { return Vec3{field(x), 0.0, 0.0}; }, nullptr);
  return f;
}

ComplexFunction interpolate(std::shared_ptr<const DofMap> space, const ComplexField& field)
{
  if (space->value_size() != 1) {
    throw std::invalid_argument("interpolate: scalar field into a vector space");
  }
  const auto re = interpolate_dofs(*space, [&](const Vec3& x) { return Vec3{field(x).real(), 0.0, 0.0}; }, nullptr);
  const auto im = interpolate_dofs(*space, [&](const Vec3& x) { return Vec3{field(x).imag(), 0.0, 0.0}; }, nullptr);
  ComplexFunction f(space);
  for (std::size_t i = 0; i < re.size(); ++i) {
    f.coefficients[i] = {re[i], im[i]};
  }
  return f;
}

RealFunction interpolate(std::shared_ptr<const DofMap> space, const VectorField& field)
{
  if (space->value_size() == 1) {
    throw std::invalid_argument("interpolate: vector field into a scalar space");
  }
  RealFunction f(space);
  f.coefficients = interpolate_dofs(*space, field, nullptr);
  return f;
}

}  // namespace tdgl
