#include "tdgl/assembly.hpp"
#include "tdgl/scheme.hpp"

#include "dense_oracle.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <iterator>
#include <numbers>
#include <random>

using namespace tdgl;

namespace {

using CMat = Eigen::MatrixXcd;
using RMat = Eigen::MatrixXd;
const Complex I(0.0, 1.0);

std::vector<int> common(const std::vector<int>& a, const std::vector<int>& b)
{
  std::vector<int> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

int oracle_degree(int dim) { return dim == 2 ? 8 : 6; }

template <typename T>
std::vector<T> random_vector(int n, unsigned seed, double scale = 1.0)
{
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-scale, scale);
  std::vector<T> v(n);
  for (auto& x : v) {
    if constexpr (std::is_same_v<T, Complex>) {
      x = Complex(u(rng), u(rng));
    } else {
      x = u(rng);
    }
  }
  return v;
}

template <typename Mat>
double max_abs(const Mat& m)
{
  return m.cwiseAbs().maxCoeff();
}

// Pointwise data of the previous level: psi value/gradient and A value/divergence.
struct Coefficients {
  Complex psi;
  std::array<Complex, 3> grad_psi;
  Vec3 A;
  double divA;
};

Coefficients coefficients_at(const oracle::Tabulation& tp, const std::vector<Complex>& psi,
                             const oracle::Tabulation& ta, const std::vector<double>& A, int c, int q)
{
  const auto [pv, pg] = tp.field(psi, c, q);
  const auto [av, ag] = ta.field(A, c, q);
  return {pv[0], pg[0], av, ag[0][0] + ag[1][1] + ag[2][2]};
}

struct PsiOracle {
  CMat K;
  Eigen::VectorXcd F;
  CMat D;  // int div A phi_j phi_i
};

PsiOracle psi_oracle(const DofMap& ps, const DofMap& as, const ComplexFunction& psi_old, const RealFunction& A_old,
                     double tau, double kappa, bool lagrange_form, const std::vector<Complex>& forcing)
{
  const int deg = oracle_degree(ps.mesh().dim());
  const oracle::Tabulation tp(ps, deg), ta(as, deg);
  const auto supp = oracle::supports(ps);
  const int n = ps.num_dofs();
  PsiOracle o{CMat::Zero(n, n), Eigen::VectorXcd::Zero(n), CMat::Zero(n, n)};
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int c : common(supp[i], supp[j])) {
        for (int q = 0; q < tp.nq(); ++q) {
          const double w = tp.JxW[c * tp.nq() + q];
          const auto d = coefficients_at(tp, psi_old.coefficients, ta, A_old.coefficients, c, q);
          const auto phi = tp.global(j, c, q), om = tp.global(i, c, q);
          // (i/kappa grad + A) applied to a real function
          std::array<Complex, 3> Dphi{}, Dom{};
          for (int a = 0; a < 3; ++a) {
            Dphi[a] = I / kappa * phi.jac[0][a] + d.A[a] * phi.value[0];
            Dom[a] = I / kappa * om.jac[0][a] + d.A[a] * om.value[0];
          }
          Complex cov{};
          for (int a = 0; a < 3; ++a) {
            cov += Dphi[a] * std::conj(Dom[a]);
          }
          const double rho = std::norm(d.psi);
          const double V = lagrange_form ? -(dot(d.A, d.A) + rho - 1.0) : rho - 1.0;
          const double pp = phi.value[0] * om.value[0];
          o.K(i, j) += w * (pp / tau - I * kappa * d.divA * pp + cov + V * pp);
          o.D(i, j) += w * d.divA * pp;
        }
      }
    }
    for (int c : supp[i]) {
      for (int q = 0; q < tp.nq(); ++q) {
        const auto d = coefficients_at(tp, psi_old.coefficients, ta, A_old.coefficients, c, q);
        o.F(i) += tp.JxW[c * tp.nq() + q] * d.psi / tau * tp.global(i, c, q).value[0];
      }
    }
    o.F(i) += forcing[i];
  }
  return o;
}

// (1/kappa) Im(conj(psi) grad psi)
Vec3 current(const Coefficients& d, double kappa)
{
  Vec3 J{};
  for (int a = 0; a < 3; ++a) {
    J[a] = (std::conj(d.psi) * d.grad_psi[a]).imag() / kappa;
  }
  return J;
}

void saddle_oracle(const DofMap& ss, const DofMap& as, const DofMap& ps, const ComplexFunction& psi_old,
                   const RealFunction& A_old, double tau, double kappa, const std::vector<double>& sigma_bc,
                   const std::vector<double>& forcing, RMat& K, Eigen::VectorXd& F)
{
  const int dim = ps.mesh().dim();
  const int deg = oracle_degree(dim);
  const oracle::Tabulation ts(ss, deg), ta(as, deg), tp(ps, deg);
  const auto s_supp = oracle::supports(ss);
  const auto a_supp = oracle::supports(as);
  const int ns = ss.num_dofs(), na = as.num_dofs();
  K = RMat::Zero(ns + na, ns + na);
  F = Eigen::VectorXd::Zero(ns + na);
  const int nq = ts.nq();
  // C chi: rotated gradient (2D scalar) or curl (3D)
  auto C = [&](const oracle::Shape& s) { return dim == 2 ? s.rot() : s.curl(); };
  auto coeff = [&](int c, int q) { return coefficients_at(tp, psi_old.coefficients, ta, A_old.coefficients, c, q); };
  for (int i = 0; i < ns; ++i) {
    for (int j = 0; j < ns; ++j) {
      for (int c : common(s_supp[i], s_supp[j])) {
        for (int q = 0; q < nq; ++q) {
          K(i, j) += ts.JxW[c * nq + q] * dot(ts.global(j, c, q).value, ts.global(i, c, q).value);
        }
      }
    }
    for (int j = 0; j < na; ++j) {
      for (int c : common(s_supp[i], a_supp[j])) {
        for (int q = 0; q < nq; ++q) {
          const double w = ts.JxW[c * nq + q];
          const auto chi = ts.global(i, c, q);
          const auto v = ta.global(j, c, q);
          K(i, ns + j) -= w * dot(C(chi), v.value);
          K(ns + j, i) += w * dot(C(chi), v.value);
        }
      }
    }
  }
  for (int i = 0; i < na; ++i) {
    for (int j = 0; j < na; ++j) {
      for (int c : common(a_supp[i], a_supp[j])) {
        for (int q = 0; q < nq; ++q) {
          const double w = ta.JxW[c * nq + q];
          const auto u = ta.global(j, c, q), v = ta.global(i, c, q);
          const double rho = std::norm(coeff(c, q).psi);
          K(ns + i, ns + j) += w * ((1.0 / tau + rho) * dot(u.value, v.value) + u.div() * v.div());
        }
      }
    }
    for (int c : a_supp[i]) {
      for (int q = 0; q < nq; ++q) {
        const auto d = coeff(c, q);
        const auto v = ta.global(i, c, q);
        F(ns + i) += ta.JxW[c * nq + q] * (dot(d.A, v.value) / tau + dot(current(d, kappa), v.value));
      }
    }
    F(ns + i) += forcing[i];
  }
  std::vector<char> constrained(ns + na, 0);
  std::vector<double> values(ns + na, 0.0);
  for (int d : ss.boundary_dofs()) {
    constrained[d] = 1;
    values[d] = sigma_bc[d];
  }
  for (int d : as.boundary_dofs()) {
    constrained[ns + d] = 1;
  }
  oracle::eliminate(K, F, constrained, values);
}

struct Setup {
  std::shared_ptr<const Mesh> mesh;
  int r;
};

Discretization spaces_for(const Setup& s)
{
  Discretization d;
  d.mesh = s.mesh;
  d.psi = make_space(s.mesh, {Family::Lagrange, std::max(1, s.r), ValueKind::ScalarComplex});
  d.A = make_space(s.mesh, {Family::RaviartThomas, s.r, ValueKind::VectorReal});
  d.sigma = s.mesh->dim() == 2 ? make_space(s.mesh, {Family::Lagrange, s.r + 1, ValueKind::ScalarReal})
                               : make_space(s.mesh, {Family::NedelecFirstKind, 1, ValueKind::VectorReal});
  return d;
}

std::vector<Setup> mixed_setups()
{
  auto sq = std::make_shared<const Mesh>(build_unit_square_mesh(3));
  auto ls = std::make_shared<const Mesh>(build_lshape_mesh(2));
  auto cu = std::make_shared<const Mesh>(build_unit_cube_mesh(2));
  return {{sq, 0}, {sq, 1}, {ls, 0}, {cu, 0}};
}

}  // namespace

TEST(DenseOracle, PsiSystem)
{
  for (const auto& s : mixed_setups()) {
    const auto d = spaces_for(s);
    ComplexFunction psi(d.psi);
    psi.coefficients = random_vector<Complex>(d.psi->num_dofs(), 1);
    RealFunction A(d.A);
    A.coefficients = random_vector<double>(d.A->num_dofs(), 2);
    const auto forcing = random_vector<Complex>(d.psi->num_dofs(), 3);
    const double tau = 0.3, kappa = 1.7;
    PsiAssembler pa(d.psi, d.A, kappa);
    const auto& sys = pa.assemble(psi, A, tau, forcing);
    const auto o = psi_oracle(*d.psi, *d.A, psi, A, tau, kappa, false, forcing);
    const CMat K = oracle::to_dense(sys.matrix);
    EXPECT_LE(max_abs(K - o.K), 1e-12 * max_abs(o.K)) << "dim " << s.mesh->dim() << " r " << s.r;
    const Eigen::VectorXcd F = Eigen::Map<const Eigen::VectorXcd>(sys.rhs.data(), sys.rhs.size());
    EXPECT_LE(max_abs(F - o.F), 1e-12 * max_abs(o.F));

    // The covariant part is Hermitian; the div A term is skew-Hermitian.
    const CMat skew = K - K.adjoint();
    EXPECT_LE(max_abs(skew + 2.0 * I * kappa * o.D), 1e-12 * max_abs(o.K));

    // Reassembly on the recorded pattern gives the same matrix.
    const auto& again = pa.assemble(psi, A, tau, forcing);
    EXPECT_EQ(oracle::to_dense(again.matrix), K);
  }
}

TEST(DenseOracle, SaddleSystem)
{
  for (const auto& s : mixed_setups()) {
    const auto d = spaces_for(s);
    ComplexFunction psi(d.psi);
    psi.coefficients = random_vector<Complex>(d.psi->num_dofs(), 4);
    RealFunction A(d.A);
    A.coefficients = random_vector<double>(d.A->num_dofs(), 5);
    const auto bc = random_vector<double>(d.sigma->num_dofs(), 6);
    const auto forcing = random_vector<double>(d.A->num_dofs(), 7);
    const double tau = 0.25, kappa = 2.0;
    SigmaAAssembler sa(d.sigma, d.A, d.psi, kappa);
    const auto& sys = sa.assemble(psi, A, tau, bc, forcing);
    RMat K;
    Eigen::VectorXd F;
    saddle_oracle(*d.sigma, *d.A, *d.psi, psi, A, tau, kappa, bc, forcing, K, F);
    EXPECT_LE(max_abs(oracle::to_dense(sys.matrix) - K), 1e-12 * max_abs(K)) << "dim " << s.mesh->dim() << " r " << s.r;
    const Eigen::VectorXd got = Eigen::Map<const Eigen::VectorXd>(sys.rhs.data(), sys.rhs.size());
    EXPECT_LE(max_abs(got - F), 1e-12 * max_abs(F));
    for (int k = 0; k < sys.matrix.rows(); ++k) {
      if (std::find(sys.dirichlet_dofs.begin(), sys.dirichlet_dofs.end(), k) == sys.dirichlet_dofs.end()) {
        continue;
      }
      for (int p = sys.matrix.row_ptr()[k]; p < sys.matrix.row_ptr()[k + 1]; ++p) {
        EXPECT_EQ(sys.matrix.values()[p], sys.matrix.col_idx()[p] == k ? 1.0 : 0.0);
      }
    }
  }
}

TEST(DenseOracle, LagrangeSystems)
{
  const auto mesh = std::make_shared<const Mesh>(build_lshape_mesh(2));
  const auto ps = make_space(mesh, {Family::Lagrange, 1, ValueKind::ScalarComplex});
  const auto as = make_space(mesh, {Family::Lagrange, 1, ValueKind::VectorReal});
  ComplexFunction psi(ps);
  psi.coefficients = random_vector<Complex>(ps->num_dofs(), 8);
  RealFunction A(as);
  A.coefficients = random_vector<double>(as->num_dofs(), 9);
  const double tau = 0.2, kappa = 10.0;

  const auto gpsi = random_vector<Complex>(ps->num_dofs(), 10);
  PsiAssembler pa(ps, as, kappa, true);
  const auto& psys = pa.assemble(psi, A, tau, gpsi);
  const auto po = psi_oracle(*ps, *as, psi, A, tau, kappa, true, gpsi);
  EXPECT_LE(max_abs(oracle::to_dense(psys.matrix) - po.K), 1e-12 * max_abs(po.K));

  const auto f = random_vector<double>(as->num_dofs(), 11);
  LagrangeAAssembler la(as, ps, kappa);
  const auto& sys = la.assemble(psi, A, tau, f);
  const oracle::Tabulation ta(*as, 8), tp(*ps, 8);
  const auto supp = oracle::supports(*as);
  const int n = as->num_dofs();
  RMat K = RMat::Zero(n, n);
  Eigen::VectorXd F = Eigen::VectorXd::Zero(n);
  const int nq = ta.nq();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int c : common(supp[i], supp[j])) {
        for (int q = 0; q < nq; ++q) {
          const auto u = ta.global(j, c, q), v = ta.global(i, c, q);
          const double rho = std::norm(coefficients_at(tp, psi.coefficients, ta, A.coefficients, c, q).psi);
          K(i, j) += ta.JxW[c * nq + q] *
                     ((1.0 / tau + rho) * dot(u.value, v.value) + u.div() * v.div() + u.curl()[2] * v.curl()[2]);
        }
      }
    }
    for (int c : supp[i]) {
      for (int q = 0; q < nq; ++q) {
        const auto d = coefficients_at(tp, psi.coefficients, ta, A.coefficients, c, q);
        const auto v = ta.global(i, c, q);
        F(i) += ta.JxW[c * nq + q] * (dot(d.A, v.value) / tau + dot(current(d, kappa), v.value));
      }
    }
    F(i) += f[i];
  }
  std::vector<char> constrained(n, 0);
  for (int d : as->boundary_dofs()) {
    constrained[d] = 1;
  }
  oracle::eliminate(K, F, constrained, std::vector<double>(n, 0.0));
  EXPECT_LE(max_abs(oracle::to_dense(sys.matrix) - K), 1e-12 * max_abs(K));
  const Eigen::VectorXd got = Eigen::Map<const Eigen::VectorXd>(sys.rhs.data(), sys.rhs.size());
  EXPECT_LE(max_abs(got - F), 1e-12 * max_abs(F));
}

TEST(DenseOracle, ForcingLoads)
{
  for (const auto& mc : {square2d_case(), cube3d_case()}) {
    const auto mesh = std::make_shared<const Mesh>(build_mesh(mc.domain(), mc.dim() == 2 ? 3 : 2));
    const auto d = spaces_for({mesh, 0});
    const int deg = oracle_degree(mc.dim());
    const auto loads = assemble_forcing_loads(mc, *d.psi, *d.A, deg);
    const double t = 0.6;
    const auto g = psi_forcing(mc, loads, t);
    const auto f = mixed_A_forcing(mc, loads, t);
    const oracle::Tabulation tp(*d.psi, deg), ta(*d.A, deg);
    const auto psupp = oracle::supports(*d.psi);
    for (int i = 0; i < d.psi->num_dofs(); ++i) {
      Complex ref{};
      for (int c : psupp[i]) {
        for (int q = 0; q < tp.nq(); ++q) {
          ref += tp.JxW[c * tp.nq() + q] * mc.g(tp.points[c * tp.nq() + q], t) * tp.global(i, c, q).value[0];
        }
      }
      EXPECT_NEAR(std::abs(g[i] - ref), 0.0, 1e-12 * std::max(1.0, std::abs(ref)));
    }
    const auto asupp = oracle::supports(*d.A);
    for (int i = 0; i < d.A->num_dofs(); ++i) {
      double ref = 0.0;
      for (int c : asupp[i]) {
        for (int q = 0; q < ta.nq(); ++q) {
          const Vec3& x = ta.points[c * ta.nq() + q];
          ref += ta.JxW[c * ta.nq() + q] * dot(mc.f(x, t) + mc.curl_He(x, t), ta.global(i, c, q).value);
        }
      }
      EXPECT_NEAR(f[i], ref, 1e-12 * std::max(1.0, std::abs(ref)));
    }
  }
}

TEST(Assembly, SingleTriangleStiffness)
{
  auto mesh = std::make_shared<const Mesh>(
      Mesh::from_cells(2, {Vec3{0, 0, 0}, Vec3{1, 0, 0}, Vec3{0, 1, 0}}, {std::array<int, 4>{0, 1, 2, 0}}));
  const auto ps = make_space(mesh, {Family::Lagrange, 1, ValueKind::ScalarComplex});
  const auto as = make_space(mesh, {Family::RaviartThomas, 0, ValueKind::VectorReal});
  PsiAssembler pa(ps, as, 1.0);
  // tau = 1 and psi = 0 cancel the mass terms
  const auto& sys = pa.assemble(ComplexFunction(ps), RealFunction(as), 1.0, {});
  const double ref[3][3] = {{1.0, -0.5, -0.5}, {-0.5, 0.5, 0.0}, {-0.5, 0.0, 0.5}};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      EXPECT_NEAR(std::abs(sys.matrix.coeff(i, j) - ref[i][j]), 0.0, 1e-14);
    }
  }
}

TEST(Assembly, GradientFieldHasNoCurlContribution)
{
  const auto mesh = std::make_shared<const Mesh>(build_unit_square_mesh(4));
  const auto ps = make_space(mesh, {Family::Lagrange, 1, ValueKind::ScalarComplex});
  const auto as = make_space(mesh, {Family::Lagrange, 1, ValueKind::VectorReal});
  // grad of p = x^2 - 3xy + 2y^2 is linear, hence in the space
  const RealFunction A = interpolate(as, VectorField([](const Vec3& x) {
    return Vec3{2 * x[0] - 3 * x[1], -3 * x[0] + 4 * x[1], 0.0};
  }));
  const double tau = 0.5;
  LagrangeAAssembler la(as, ps, 1.0, false);
  const auto& sys = la.assemble(ComplexFunction(ps), A, tau, {});
  const auto KA = sys.matrix * A.coefficients;
  // mass and div-div parts only
  const oracle::Tabulation ta(*as, 4);
  std::vector<double> ref(as->num_dofs(), 0.0);
  for (int c = 0; c < mesh->num_cells(); ++c) {
    for (int q = 0; q < ta.nq(); ++q) {
      const auto [av, ag] = ta.field(A.coefficients, c, q);
      const double divA = ag[0][0] + ag[1][1];
      const auto dofs = as->cell_dofs(c);
      const auto& sh = ta.shapes[c * ta.nq() + q];
      for (std::size_t k = 0; k < dofs.size(); ++k) {
        ref[dofs[k]] += ta.JxW[c * ta.nq() + q] * (dot(av, sh[k].value) / tau + divA * sh[k].div());
      }
    }
  }
  for (int i = 0; i < as->num_dofs(); ++i) {
    EXPECT_NEAR(KA[i], ref[i], 1e-12);
  }
}

TEST(Assembly, MassMatricesArePositiveDefinite)
{
  const auto sq = std::make_shared<const Mesh>(build_unit_square_mesh(4));
  const auto cu = std::make_shared<const Mesh>(build_unit_cube_mesh(2));
  const std::shared_ptr<const DofMap> spaces[] = {
      make_space(sq, {Family::Lagrange, 1, ValueKind::ScalarReal}),
      make_space(sq, {Family::Lagrange, 2, ValueKind::ScalarReal}),
      make_space(sq, {Family::RaviartThomas, 0, ValueKind::VectorReal}),
      make_space(sq, {Family::RaviartThomas, 1, ValueKind::VectorReal}),
      make_space(sq, {Family::Lagrange, 1, ValueKind::VectorReal}),
      make_space(cu, {Family::NedelecFirstKind, 1, ValueKind::VectorReal}),
      make_space(cu, {Family::RaviartThomas, 0, ValueKind::VectorReal})};
  for (const auto& s : spaces) {
    const RMat M = oracle::to_dense(assemble_mass_matrix(*s, 6));
    EXPECT_LE(max_abs(M - M.transpose()), 1e-15);
    const Eigen::SelfAdjointEigenSolver<RMat> es(M);
    EXPECT_GT(es.eigenvalues().minCoeff(), 0.0);
  }
}

TEST(L2Error, ClosedForms)
{
  const auto mesh = std::make_shared<const Mesh>(build_unit_square_mesh(16));
  const auto p1 = make_space(mesh, {Family::Lagrange, 1, ValueKind::ScalarReal});
  const auto c1 = make_space(mesh, {Family::Lagrange, 1, ValueKind::ScalarComplex});
  const double pi = std::numbers::pi;
  EXPECT_NEAR(l2_error(RealFunction(p1), ScalarField([&](const Vec3& x) { return std::cos(pi * x[0]); }), 6),
              1.0 / std::sqrt(2.0), 1e-10);
  const auto mc = square2d_case();
  EXPECT_NEAR(l2_error(ComplexFunction(c1), ComplexField([&](const Vec3& x) { return mc.psi(x, 1.0); }), 6),
              std::exp(-1.0), 1e-10);
  const ScalarField lin = [](const Vec3& x) { return x[0] - 2 * x[1]; };
  EXPECT_LE(l2_error(interpolate(p1, lin), lin, 6), 1e-12);
}

TEST(CurlProjection, ReproducesLinearCurl)
{
  const auto mesh = std::make_shared<const Mesh>(build_unit_square_mesh(4));
  const auto as = make_space(mesh, {Family::Lagrange, 1, ValueKind::VectorReal});
  const auto p1 = make_space(mesh, {Family::Lagrange, 1, ValueKind::ScalarReal});
  // constant curl 3
  const RealFunction A = interpolate(as, VectorField([](const Vec3& x) {
    return Vec3{1 + x[0] - x[1], 2 * x[0] + x[1], 0.0};
  }));
  const RealFunction s = project_curl(A, p1);
  for (double v : s.coefficients) {
    EXPECT_NEAR(v, 3.0, 1e-12);
  }
}
