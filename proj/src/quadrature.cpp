#include "tdgl/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace tdgl {

namespace {

// Appends every distinct permutation of a barycentric tuple with the given weight.
void add_orbit(QuadratureRule& rule, std::array<double, 4> bary, int n, double weight)
{
  std::sort(bary.begin(), bary.begin() + n);
  do {
    rule.points.push_back(bary);
    rule.weights.push_back(weight);
  } while (std::next_permutation(bary.begin(), bary.begin() + n));
}

void tri_centroid(QuadratureRule& r, double w) { add_orbit(r, {1.0 / 3, 1.0 / 3, 1.0 / 3, 0.0}, 3, w); }
void tri_orbit3(QuadratureRule& r, double a, double w) { add_orbit(r, {a, a, 1.0 - 2.0 * a, 0.0}, 3, w); }
void tri_orbit6(QuadratureRule& r, double a, double b, double w)
{
  add_orbit(r, {a, b, 1.0 - a - b, 0.0}, 3, w);
}

// Dunavant weights are tabulated for unit area; the reference triangle has area 1/2.
QuadratureRule triangle_rule(int degree)
{
  QuadratureRule r;
  r.cell = CellType::Triangle;
  switch (degree) {
    case 0:
    case 1:
      r.degree = 1;
      tri_centroid(r, 0.5);
      break;
    case 2:
      r.degree = 2;
      tri_orbit3(r, 1.0 / 6.0, 1.0 / 6.0);
      break;
    case 3:
    case 4:
      r.degree = 4;
      tri_orbit3(r, 0.44594849091596488631832925388305, 0.5 * 0.22338158967801146569500700843312);
      tri_orbit3(r, 0.09157621350977074345957146340220, 0.5 * 0.10995174365532186763832632490021);
      break;
    case 5:
      r.degree = 5;
      tri_centroid(r, 0.5 * 0.225);
      tri_orbit3(r, 0.47014206410511508977044120951345, 0.5 * 0.13239415278850618073764938783315);
      tri_orbit3(r, 0.10128650732345633880098736191512, 0.5 * 0.12593918054482715259568394550018);
      break;
    case 6:
      r.degree = 6;
      tri_orbit3(r, 0.24928674517091042129163855310702, 0.5 * 0.11678627572637936602528961138558);
      tri_orbit3(r, 0.06308901449150222834033160287082, 0.5 * 0.05084490637020681692093680910686);
      tri_orbit6(r, 0.31035245103378440541660773395655, 0.63650249912139864723014259441205,
                 0.5 * 0.08285107561837357519355345642044);
      break;
    case 7:
    case 8:
      r.degree = 8;
      tri_centroid(r, 0.5 * 0.14431560767778716825109111048906);
      tri_orbit3(r, 0.17056930775176020662229350149146, 0.5 * 0.10321737053471825028179155029212);
      tri_orbit3(r, 0.05054722831703097545842355059660, 0.5 * 0.03245849762319808031092592834178);
      tri_orbit3(r, 0.45929258829272315602881551449417, 0.5 * 0.09509163426728462479389610438858);
      tri_orbit6(r, 0.26311282963463811342178578628464, 0.72849239295540428124100037917606,
                 0.5 * 0.02723031417443499426484469007390);
      break;
    default:
      throw std::invalid_argument("quadrature_rule: triangle degree " + std::to_string(degree) +
                                  " unsupported (max 8)");
  }
  return r;
}

QuadratureRule tetrahedron_rule(int degree)
{
  QuadratureRule r;
  r.cell = CellType::Tetrahedron;
  switch (degree) {
    case 0:
    case 1:
      r.degree = 1;
      add_orbit(r, {0.25, 0.25, 0.25, 0.25}, 4, 1.0 / 6.0);
      break;
    case 2: {
      r.degree = 2;
      const double a = 0.58541019662496845446;
      const double b = (1.0 - a) / 3.0;
      add_orbit(r, {a, b, b, b}, 4, 1.0 / 24.0);
      break;
    }
    case 3:
    case 4:
    case 5: {
      r.degree = 5;
      const double a6 = 0.045503704125649649492;
      add_orbit(r, {a6, a6, 0.5 - a6, 0.5 - a6}, 4, 7.0910034628469110730E-03);
      const double a4 = 0.092735250310891226402;
      add_orbit(r, {a4, a4, a4, 1.0 - 3.0 * a4}, 4, 0.012248840519393658257);
      const double a4b = 0.067342242210098170608;
      const double b4b = (1.0 - a4b) / 3.0;
      add_orbit(r, {a4b, b4b, b4b, b4b}, 4, 0.018781320953002641800);
      break;
    }
    case 6: {
      r.degree = 6;
      const double a1 = 0.21460287125915202929;
      add_orbit(r, {a1, a1, a1, 1.0 - 3.0 * a1}, 4, 6.6537917096945820166E-03);
      const double a2 = 0.040673958534611353116;
      add_orbit(r, {a2, a2, a2, 1.0 - 3.0 * a2}, 4, 1.6795351758867738247E-03);
      const double a3 = 0.032986329573173468968;
      const double b3 = (1.0 - a3) / 3.0;
      add_orbit(r, {a3, b3, b3, b3}, 4, 9.2261969239424536825E-03);
      const double a = 0.063661001875017525299;
      const double b = 0.26967233145831580803;
      add_orbit(r, {a, a, b, 1.0 - 2.0 * a - b}, 4, 8.0357142857142857143E-03);
      break;
    }
    default:
      throw std::invalid_argument("quadrature_rule: tetrahedron degree " + std::to_string(degree) +
                                  " unsupported (max 6)");
  }
  return r;
}

// Gauss-Legendre nodes on [0,1] by Newton iteration on P_n.
QuadratureRule interval_rule(int degree)
{
  if (degree < 0 || degree > 41) {
    throw std::invalid_argument("quadrature_rule: interval degree " + std::to_string(degree) +
                                " unsupported (max 41)");
  }
  const int n = std::max(1, (degree + 2) / 2);
  QuadratureRule r;
  r.cell = CellType::Interval;
  r.degree = 2 * n - 1;
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double pn = n == 1 ? x : p1;
      const double pnm1 = n == 1 ? 1.0 : p0;
      dp = n * (x * pn - pnm1) / (x * x - 1.0);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) {
        break;
      }
    }
    const double s = 0.5 * (1.0 - x);
    const double w = 1.0 / ((1.0 - x * x) * dp * dp);  // half of the [-1,1] weight
    r.points.push_back({1.0 - s, s, 0.0, 0.0});
    r.weights.push_back(w);
  }
  return r;
}

}  // namespace

double reference_volume(CellType type)
{
  switch (type) {
    case CellType::Interval:
      return 1.0;
    case CellType::Triangle:
      return 0.5;
    case CellType::Tetrahedron:
      return 1.0 / 6.0;
  }
  return 0.0;
}

int max_quadrature_degree(CellType type)
{
  switch (type) {
    case CellType::Interval:
      return 41;
    case CellType::Triangle:
      return 8;
    case CellType::Tetrahedron:
      return 6;
  }
  return 0;
}

QuadratureRule quadrature_rule(CellType type, int degree)
{
  if (degree < 0) {
    throw std::invalid_argument("quadrature_rule: negative degree");
  }
  switch (type) {
    case CellType::Interval:
      return interval_rule(degree);
    case CellType::Triangle:
      return triangle_rule(degree);
    case CellType::Tetrahedron:
      return tetrahedron_rule(degree);
  }
  throw std::invalid_argument("quadrature_rule: unknown cell type");
}

}  // namespace tdgl
