#include "tdgl/reference_element.hpp"

#include "tdgl/mesh.hpp"
#include "tdgl/quadrature.hpp"

#include <Eigen/Dense>

#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <tuple>

namespace tdgl {

namespace {

// Monomials of total degree <= 2 in (x, y, z).
constexpr std::array<std::array<int, 3>, 10> kExponents{
    {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {2, 0, 0}, {1, 1, 0}, {1, 0, 1}, {0, 2, 0}, {0, 1, 1}, {0, 0, 2}}};

int monomial_index(int ex, int ey, int ez)
{
  for (int m = 0; m < 10; ++m) {
    if (kExponents[m][0] == ex && kExponents[m][1] == ey && kExponents[m][2] == ez) {
      return m;
    }
  }
  throw std::logic_error("monomial_index: degree too high");
}

void monomials(const Vec3& x, std::array<double, 10>& v, std::array<std::array<double, 3>, 10>& dv)
{
  for (int m = 0; m < 10; ++m) {
    double val = 1.0;
    std::array<double, 3> grad{1.0, 1.0, 1.0};
    for (int d = 0; d < 3; ++d) {
      const int e = kExponents[m][d];
      const double p = e == 0 ? 1.0 : (e == 1 ? x[d] : x[d] * x[d]);
      val *= p;
      for (int g = 0; g < 3; ++g) {
        if (g == d) {
          grad[g] *= e == 0 ? 0.0 : (e == 1 ? 1.0 : 2.0 * x[d]);
        } else {
          grad[g] *= p;
        }
      }
    }
    v[m] = val;
    dv[m] = grad;
  }
}

double legendre01(int m, double s) { return m == 0 ? 1.0 : 2.0 * s - 1.0; }

// Affine map data for a simplex given by its vertices.
struct AffineMap {
  int dim;
  Vec3 origin;
  std::array<Vec3, 3> cols{};  // J columns
  double det = 1.0;

  AffineMap(std::span<const Vec3> x, int d) : dim(d), origin(x[0])
  {
    for (int k = 0; k < d; ++k) {
      cols[k] = x[k + 1] - x[0];
    }
    if (d == 2) {
      det = cols[0][0] * cols[1][1] - cols[0][1] * cols[1][0];
    } else {
      det = dot(cols[0], cross(cols[1], cols[2]));
    }
  }

  Vec3 map(const Vec3& xhat) const
  {
    Vec3 x = origin;
    for (int k = 0; k < dim; ++k) {
      x = x + xhat[k] * cols[k];
    }
    return x;
  }

  // det(J) * J^{-1} v, i.e. the contravariant pullback.
  Vec3 adjugate_times(const Vec3& v) const
  {
    if (dim == 2) {
      const auto& a = cols[0];
      const auto& b = cols[1];
      return {b[1] * v[0] - b[0] * v[1], -a[1] * v[0] + a[0] * v[1], 0.0};
    }
    // Rows of adj(J) are the cross products of the columns.
    const Vec3 r0 = cross(cols[1], cols[2]);
    const Vec3 r1 = cross(cols[2], cols[0]);
    const Vec3 r2 = cross(cols[0], cols[1]);
    return {dot(r0, v), dot(r1, v), dot(r2, v)};
  }
};

}  // namespace

double apply_local_functional(const ReferenceElement& element, int i, std::span<const Vec3> x,
                              const std::function<Vec3(const Vec3&)>& field)
{
  const int dim = element.dim();
  const DofInfo& dof = element.dofs()[i];
  const AffineMap F(x, dim);
  switch (dof.functional) {
    case FunctionalKind::PointValue: {
      const Vec3 v = field(F.map(dof.node));
      return v[0];
    }
    case FunctionalKind::EdgeNormalMoment:
    case FunctionalKind::EdgeTangentMoment: {
      const auto& le = local_edges(dim)[dof.local_entity];
      const Vec3 t = x[le[1]] - x[le[0]];
      const Vec3 dir = dof.functional == FunctionalKind::EdgeNormalMoment ? rotate_cw(t) : t;
      static const QuadratureRule line = quadrature_rule(CellType::Interval, 11);
      double sum = 0.0;
      for (std::size_t q = 0; q < line.size(); ++q) {
        const double s = line.points[q][1];
        const Vec3 v = field(x[le[0]] + s * t);
        sum += line.weights[q] * dot(v, dir) * legendre01(dof.sub, s);
      }
      return sum;
    }
    case FunctionalKind::FaceFluxMoment: {
      const auto& lf = local_faces()[dof.local_entity];
      const Vec3 a = x[lf[1]] - x[lf[0]];
      const Vec3 b = x[lf[2]] - x[lf[0]];
      const Vec3 n = cross(a, b);
      static const QuadratureRule tri = quadrature_rule(CellType::Triangle, 8);
      double sum = 0.0;
      for (std::size_t q = 0; q < tri.size(); ++q) {
        const Vec3 p = x[lf[0]] + tri.points[q][1] * a + tri.points[q][2] * b;
        sum += tri.weights[q] * dot(field(p), n);
      }
      return sum;
    }
    case FunctionalKind::InteriorMoment: {
      const QuadratureRule& rule = dim == 2 ? []() -> const QuadratureRule& {
        static const QuadratureRule r = quadrature_rule(CellType::Triangle, 8);
        return r;
      }()
                                            : []() -> const QuadratureRule& {
        static const QuadratureRule r = quadrature_rule(CellType::Tetrahedron, 6);
        return r;
      }();
      double sum = 0.0;
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const Vec3 v = F.adjugate_times(field(F.map(rule.reference_point(q))));
        sum += rule.weights[q] * v[dof.sub];
      }
      return sum;
    }
  }
  return 0.0;
}

const ReferenceElement& ReferenceElement::get(Family family, int degree, int dim)
{
  static std::mutex mutex;
  static std::map<std::tuple<int, int, int>, std::unique_ptr<ReferenceElement>> cache;
  const std::lock_guard<std::mutex> lock(mutex);
  const auto key = std::make_tuple(static_cast<int>(family), degree, dim);
  auto it = cache.find(key);
  if (it == cache.end()) {
    it = cache.emplace(key, std::unique_ptr<ReferenceElement>(new ReferenceElement(family, degree, dim))).first;
  }
  return *it->second;
}

ReferenceElement::ReferenceElement(Family family, int degree, int dim)
    : family_(family), degree_(degree), dim_(dim)
{
  if (dim != 2 && dim != 3) {
    throw std::invalid_argument("ReferenceElement: dimension must be 2 or 3");
  }
  ref_vertices_[0] = {0.0, 0.0, 0.0};
  for (int k = 0; k < dim; ++k) {
    ref_vertices_[k + 1] = {0.0, 0.0, 0.0};
    ref_vertices_[k + 1][k] = 1.0;
  }

  auto unsupported = [&]() {
    return std::invalid_argument("ReferenceElement: unsupported family/degree " + std::to_string(degree) +
                                 " in " + std::to_string(dim) + "D");
  };

  // Spanning set of the element space.
  std::vector<std::array<Poly, 3>> raw;
  auto scalar_monomials = [&](int k) {
    for (int m = 0; m < 10; ++m) {
      const auto& e = kExponents[m];
      if (e[0] + e[1] + e[2] > k || (dim == 2 && e[2] > 0)) {
        continue;
      }
      std::array<Poly, 3> p{};
      p[0].c[m] = 1.0;
      raw.push_back(p);
    }
  };
  auto vec = [&](std::initializer_list<std::tuple<int, int, int, int, double>> terms) {
    std::array<Poly, 3> p{};
    for (const auto& [comp, ex, ey, ez, coef] : terms) {
      p[comp].c[monomial_index(ex, ey, ez)] += coef;
    }
    raw.push_back(p);
  };

  const auto ledges = local_edges(dim);
  switch (family) {
    case Family::Lagrange:
    case Family::DiscontinuousLagrange: {
      const bool dg = family == Family::DiscontinuousLagrange;
      if (dg ? (degree < 0 || degree > 1) : (degree < 1 || degree > 2) || (dim == 3 && degree > 1)) {
        throw unsupported();
      }
      scalar_monomials(degree);
      if (degree == 0) {
        DofInfo d{EntityKind::Cell, 0, 0, FunctionalKind::PointValue, {}};
        for (int k = 0; k <= dim; ++k) {
          d.node = d.node + (1.0 / (dim + 1)) * ref_vertices_[k];
        }
        dofs_.push_back(d);
      } else {
        for (int k = 0; k <= dim; ++k) {
          dofs_.push_back({dg ? EntityKind::Cell : EntityKind::Vertex, dg ? 0 : k, dg ? k : 0,
                           FunctionalKind::PointValue, ref_vertices_[k]});
        }
      }
      if (degree == 2) {
        for (int e = 0; e < static_cast<int>(ledges.size()); ++e) {
          const Vec3 mid = 0.5 * (ref_vertices_[ledges[e][0]] + ref_vertices_[ledges[e][1]]);
          dofs_.push_back({EntityKind::Edge, e, 0, FunctionalKind::PointValue, mid});
        }
      }
      break;
    }
    case Family::RaviartThomas: {
      value_size_ = dim;
      if (dim == 2 && degree == 0) {
        vec({{0, 0, 0, 0, 1.0}});
        vec({{1, 0, 0, 0, 1.0}});
        vec({{0, 1, 0, 0, 1.0}, {1, 0, 1, 0, 1.0}});
      } else if (dim == 2 && degree == 1) {
        vec({{0, 0, 0, 0, 1.0}});
        vec({{0, 1, 0, 0, 1.0}});
        vec({{0, 0, 1, 0, 1.0}});
        vec({{1, 0, 0, 0, 1.0}});
        vec({{1, 1, 0, 0, 1.0}});
        vec({{1, 0, 1, 0, 1.0}});
        vec({{0, 2, 0, 0, 1.0}, {1, 1, 1, 0, 1.0}});
        vec({{0, 1, 1, 0, 1.0}, {1, 0, 2, 0, 1.0}});
      } else if (dim == 3 && degree == 0) {
        vec({{0, 0, 0, 0, 1.0}});
        vec({{1, 0, 0, 0, 1.0}});
        vec({{2, 0, 0, 0, 1.0}});
        vec({{0, 1, 0, 0, 1.0}, {1, 0, 1, 0, 1.0}, {2, 0, 0, 1, 1.0}});
      } else {
        throw unsupported();
      }
      if (dim == 2) {
        for (int e = 0; e < 3; ++e) {
          for (int m = 0; m <= degree; ++m) {
            dofs_.push_back({EntityKind::Edge, e, m, FunctionalKind::EdgeNormalMoment, {}});
          }
        }
        if (degree == 1) {
          for (int c = 0; c < 2; ++c) {
            dofs_.push_back({EntityKind::Cell, 0, c, FunctionalKind::InteriorMoment, {}});
          }
        }
      } else {
        for (int f = 0; f < 4; ++f) {
          dofs_.push_back({EntityKind::Face, f, 0, FunctionalKind::FaceFluxMoment, {}});
        }
      }
      break;
    }
    case Family::NedelecFirstKind: {
      if (dim != 3 || degree != 1) {
        throw unsupported();
      }
      value_size_ = 3;
      vec({{0, 0, 0, 0, 1.0}});
      vec({{1, 0, 0, 0, 1.0}});
      vec({{2, 0, 0, 0, 1.0}});
      vec({{1, 0, 0, 1, -1.0}, {2, 0, 1, 0, 1.0}});  // e_x cross x
      vec({{0, 0, 0, 1, 1.0}, {2, 1, 0, 0, -1.0}});  // e_y cross x
      vec({{0, 0, 1, 0, -1.0}, {1, 1, 0, 0, 1.0}});  // e_z cross x
      for (int e = 0; e < 6; ++e) {
        dofs_.push_back({EntityKind::Edge, e, 0, FunctionalKind::EdgeTangentMoment, {}});
      }
      break;
    }
  }

  const int n = static_cast<int>(raw.size());
  if (n != num_dofs()) {
    throw std::logic_error("ReferenceElement: spanning set and dof count disagree");
  }
  Eigen::MatrixXd D(n, n);
  for (int j = 0; j < n; ++j) {
    const auto& p = raw[j];
    auto f = [&p](const Vec3& x) {
      std::array<double, 10> mv{};
      std::array<std::array<double, 3>, 10> dm{};
      monomials(x, mv, dm);
      Vec3 v{};
      for (int c = 0; c < 3; ++c) {
        for (int m = 0; m < 10; ++m) {
          v[c] += p[c].c[m] * mv[m];
        }
      }
      return v;
    };
    for (int i = 0; i < n; ++i) {
      D(i, j) = apply_local_functional(*this, i, vertices(), f);
    }
  }
  const Eigen::MatrixXd C = D.fullPivLu().inverse();
  basis_.assign(n, {});
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) {
      for (int c = 0; c < 3; ++c) {
        for (int m = 0; m < 10; ++m) {
          basis_[k][c].c[m] += C(j, k) * raw[j][c].c[m];
        }
      }
    }
  }
}

void ReferenceElement::tabulate(const Vec3& xhat, std::span<double> values, std::span<double> jacobian) const
{
  std::array<double, 10> mv{};
  std::array<std::array<double, 3>, 10> dm{};
  monomials(xhat, mv, dm);
  const int n = num_dofs();
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < value_size_; ++c) {
      const auto& p = basis_[i][c].c;
      double v = 0.0;
      std::array<double, 3> g{};
      for (int m = 0; m < 10; ++m) {
        if (p[m] == 0.0) {
          continue;
        }
        v += p[m] * mv[m];
        for (int d = 0; d < 3; ++d) {
          g[d] += p[m] * dm[m][d];
        }
      }
      if (!values.empty()) {
        values[i * value_size_ + c] = v;
      }
      if (!jacobian.empty()) {
        for (int d = 0; d < 3; ++d) {
          jacobian[(i * value_size_ + c) * 3 + d] = g[d];
        }
      }
    }
  }
}

double ReferenceElement::apply(int i, const std::function<Vec3(const Vec3&)>& field) const
{
  return apply_local_functional(*this, i, vertices(), field);
}

}  // namespace tdgl
