#include "tdgl/scheme.hpp"

#include "dense_oracle.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace tdgl;

namespace {

double max_abs(const std::vector<double>& v)
{
  double m = 0.0;
  for (double x : v) {
    m = std::max(m, std::abs(x));
  }
  return m;
}

double max_abs(const std::vector<Complex>& v)
{
  double m = 0.0;
  for (const Complex& x : v) {
    m = std::max(m, std::abs(x));
  }
  return m;
}

double l2_norm(const RealFunction& f)
{
  if (f.space->value_size() == 1) {
    return l2_error(f, ScalarField([](const Vec3&) { return 0.0; }), 6);
  }
  return l2_error(f, VectorField([](const Vec3&) { return Vec3{}; }), 5);
}

// max over interior chi of |(sigma, chi) - (C chi, A)| by brute-force quadrature.
double oracle_constraint(const RealFunction& sigma, const RealFunction& A)
{
  const DofMap& ss = *sigma.space;
  const DofMap& as = *A.space;
  const int dim = ss.mesh().dim();
  const int deg = dim == 2 ? 8 : 6;
  const oracle::Tabulation ts(ss, deg), ta(as, deg);
  std::vector<double> r(ss.num_dofs(), 0.0);
  for (int c = 0; c < ss.mesh().num_cells(); ++c) {
    for (int q = 0; q < ts.nq(); ++q) {
      const auto [sv, sg] = ts.field(sigma.coefficients, c, q);
      const auto [av, ag] = ta.field(A.coefficients, c, q);
      const auto dofs = ss.cell_dofs(c);
      const auto& sh = ts.shapes[c * ts.nq() + q];
      for (std::size_t k = 0; k < dofs.size(); ++k) {
        const Vec3 Cchi = dim == 2 ? sh[k].rot() : sh[k].curl();
        r[dofs[k]] += ts.JxW[c * ts.nq() + q] * (dot(sv, sh[k].value) - dot(Cchi, av));
      }
    }
  }
  double m = 0.0;
  for (int i = 0; i < ss.num_dofs(); ++i) {
    if (!ss.is_boundary_dof(i)) {
      m = std::max(m, std::abs(r[i]));
    }
  }
  return m;
}

SchemeConfig config(SchemeKind scheme, int r, int M, double tau, Coupling coupling = Coupling::Lagged)
{
  SchemeConfig c;
  c.scheme = scheme;
  c.r = r;
  c.M = M;
  c.tau = tau;
  c.coupling = coupling;
  return c;
}

}  // namespace

TEST(ZeroData, MixedSchemeKeepsZero)
{
  for (Domain d : {Domain::UnitSquare, Domain::LShape, Domain::UnitCube}) {
    for (int r : {0, 1}) {
      if (d == Domain::UnitCube && r == 1) {
        continue;
      }
      const auto mc = zero_case(d);
      for (Coupling coupling : {Coupling::Lagged, Coupling::Sequential}) {
        TdglSolver solver(mc, config(SchemeKind::Mixed, r, d == Domain::UnitCube ? 2 : 4, 0.25, coupling));
        const auto res = solver.run();
        EXPECT_EQ(max_abs(res.state.psi.coefficients), 0.0);
        EXPECT_EQ(max_abs(res.state.A.coefficients), 0.0);
        EXPECT_EQ(max_abs(res.state.sigma.coefficients), 0.0);
        EXPECT_EQ(res.errors.psi + res.errors.A + res.errors.sigma, 0.0);
        EXPECT_EQ(res.state.n, 4);
      }
    }
  }
}

TEST(ZeroData, LagrangeSchemeKeepsZero)
{
  for (Domain d : {Domain::UnitSquare, Domain::LShape}) {
    const auto mc = zero_case(d);
    TdglSolver solver(mc, config(SchemeKind::Lagrange, 0, 4, 0.1));
    const auto res = solver.run();
    EXPECT_EQ(max_abs(res.state.psi.coefficients), 0.0);
    EXPECT_EQ(max_abs(res.state.A.coefficients), 0.0);
    EXPECT_EQ(max_abs(res.state.sigma.coefficients), 0.0);
  }
}

TEST(ConstraintResidual, EveryMixedStep)
{
  struct Run {
    ManufacturedCase mc;
    int r;
    int M;
  };
  const Run runs[] = {{square2d_case(), 0, 4}, {square2d_case(), 1, 4}, {lshape2d_case(), 0, 4},
                      {cube3d_case(), 0, 2}, {square2d_case(), 0, 16}};
  for (const auto& run : runs) {
    for (Coupling coupling : {Coupling::Lagged, Coupling::Sequential}) {
      TdglSolver solver(run.mc, config(SchemeKind::Mixed, run.r, run.M, 1.0 / 8, coupling));
      auto state = solver.initial_state();
      for (int n = 0; n < solver.num_steps(); ++n) {
        solver.step(state);
        EXPECT_LE(solver.last_diagnostics().constraint_residual, 1e-10) << run.mc.name() << " step " << n + 1;
        if (run.M <= 4) {
          // the same audit by independent quadrature, relative to ||sigma||
          EXPECT_LE(oracle_constraint(state.sigma, state.A), 1e-10 * l2_norm(state.sigma));
        }
      }
    }
  }
}

TEST(SolverResidual, EverySystem)
{
  struct Run {
    ManufacturedCase mc;
    SchemeKind scheme;
    int r;
    int M;
  };
  const Run runs[] = {{square2d_case(), SchemeKind::Mixed, 0, 8},   {square2d_case(), SchemeKind::Mixed, 1, 8},
                      {lshape2d_case(), SchemeKind::Mixed, 0, 8},   {cube3d_case(), SchemeKind::Mixed, 0, 3},
                      {lshape2d_case(), SchemeKind::Lagrange, 0, 8}};
  for (const auto& run : runs) {
    TdglSolver solver(run.mc, config(run.scheme, run.r, run.M, 1.0 / 16, Coupling::Sequential));
    auto state = solver.initial_state();
    for (int n = 0; n < solver.num_steps(); ++n) {
      solver.step(state);
      EXPECT_LE(solver.last_diagnostics().psi_residual, 1e-10);
      EXPECT_LE(solver.last_diagnostics().field_residual, 1e-10);
    }
  }
  TdglSolver solver(square2d_case(), config(SchemeKind::Mixed, 0, 8, 1.0 / 8));
  const auto res = solver.run();
  EXPECT_LE(res.max_solver_residual, 1e-10);
  EXPECT_GE(res.factorizations, 2);
}

// Lagged coupling reads only level n-1, so the order of the two solves is irrelevant.
TEST(Decoupling, SolveOrderIsIrrelevant)
{
  for (const auto& mc : {square2d_case(), cube3d_case()}) {
    const int M = mc.dim() == 2 ? 8 : 2;
    TdglSolver a(mc, config(SchemeKind::Mixed, 0, M, 0.25));
    TdglSolver b(mc, config(SchemeKind::Mixed, 0, M, 0.25));
    auto sa = a.initial_state();
    auto sb = b.initial_state();
    for (int n = 0; n < 4; ++n) {
      auto psi_a = a.solve_psi(sa);
      auto fields_a = a.solve_fields(sa);
      auto fields_b = b.solve_fields(sb);
      auto psi_b = b.solve_psi(sb);
      EXPECT_EQ(psi_a.coefficients, psi_b.coefficients);
      EXPECT_EQ(fields_a.first.coefficients, fields_b.first.coefficients);
      EXPECT_EQ(fields_a.second.coefficients, fields_b.second.coefficients);
      // the driver's step produces the same level
      a.step(sa);
      EXPECT_EQ(sa.psi.coefficients, psi_a.coefficients);
      EXPECT_EQ(sa.A.coefficients, fields_a.second.coefficients);
      sb.psi = std::move(psi_b);
      sb.sigma = std::move(fields_b.first);
      sb.A = std::move(fields_b.second);
      sb.n += 1;
    }
  }
}

TEST(Decoupling, SequentialCouplingUsesTheNewPsi)
{
  const auto mc = square2d_case();
  TdglSolver lagged(mc, config(SchemeKind::Mixed, 0, 8, 0.25, Coupling::Lagged));
  TdglSolver sequential(mc, config(SchemeKind::Mixed, 0, 8, 0.25, Coupling::Sequential));
  auto s0 = lagged.initial_state();
  auto s1 = sequential.initial_state();
  lagged.step(s0);
  sequential.step(s1);
  EXPECT_EQ(s0.psi.coefficients, s1.psi.coefficients);
  EXPECT_NE(s0.A.coefficients, s1.A.coefficients);

  auto s2 = sequential.initial_state();
  s2.psi = s1.psi;
  const auto fields = sequential.solve_fields(s2);
  for (std::size_t i = 0; i < s1.A.coefficients.size(); ++i) {
    EXPECT_NEAR(fields.second.coefficients[i], s1.A.coefficients[i], 1e-12);
  }
}

TEST(InitialState, InterpolationRate)
{
  const auto mc = square2d_case();
  double e[2];
  for (int k = 0; k < 2; ++k) {
    TdglSolver solver(mc, config(SchemeKind::Mixed, 0, 32 << k, 1.0));
    e[k] = solver.errors(solver.initial_state()).psi;
  }
  EXPECT_GE(e[0] / e[1], 3.6);
  EXPECT_LE(e[0] / e[1], 4.4);
}

TEST(InitialState, RaviartThomasDataIsReproduced)
{
  const ManufacturedCase mc("rt0-field", Domain::UnitSquare, 1.0, 1.0, {}, {}, {}, [](const Vec3& x) {
    SpatialSample s;
    s.A = {1.0 + 0.5 * x[0], -2.0 + 0.5 * x[1], 0.0};
    s.div_A = 1.0;
    return s;
  });
  TdglSolver solver(mc, config(SchemeKind::Mixed, 0, 4, 0.5));
  const auto s0 = solver.initial_state();
  const auto direct = interpolate(solver.spaces().A, VectorField([&](const Vec3& x) { return mc.A(x, 0.0); }));
  EXPECT_EQ(s0.A.coefficients, direct.coefficients);
  EXPECT_LE(solver.errors(s0).A, 1e-12);
  EXPECT_EQ(s0.n, 0);
  EXPECT_EQ(s0.t, 0.0);
}

// One step from interpolated exact data: the defect is proportional to tau while tau << h^2.
TEST(Consistency, SingleStepDefectScalesWithTau)
{
  const auto mc = square2d_case();
  double e[2];
  const double taus[2] = {1e-4, 5e-5};
  for (int k = 0; k < 2; ++k) {
    SchemeConfig c = config(SchemeKind::Mixed, 0, 16, taus[k]);
    c.final_time = taus[k];
    TdglSolver solver(mc, c);
    auto s = solver.initial_state();
    solver.step(s);
    const auto target = interpolate(solver.spaces().psi, ComplexField([&](const Vec3& x) { return mc.psi(x, s.t); }));
    ComplexFunction diff(solver.spaces().psi);
    for (std::size_t i = 0; i < diff.coefficients.size(); ++i) {
      diff.coefficients[i] = s.psi.coefficients[i] - target.coefficients[i];
    }
    e[k] = l2_error(diff, ComplexField([](const Vec3&) { return Complex{}; }), 6);
    EXPECT_GT(e[k], 0.0);
  }
  EXPECT_GE(e[0] / e[1], 1.7);
  EXPECT_LE(e[0] / e[1], 2.3);
}

TEST(TimeSteps, AdjustsToIntegerCount)
{
  double tau = 0.3;
  EXPECT_EQ(time_steps(1.0, tau), 3);
  EXPECT_DOUBLE_EQ(tau, 1.0 / 3.0);
  tau = 1.0 / 64;
  EXPECT_EQ(time_steps(1.0, tau), 64);
  EXPECT_EQ(tau, 1.0 / 64);
  tau = 0.0;
  EXPECT_THROW(time_steps(1.0, tau), std::invalid_argument);
}

TEST(Discretization, SpacesFollowTheOrder)
{
  const auto sq = square2d_case();
  const auto d1 = make_discretization(sq, config(SchemeKind::Mixed, 1, 2, 0.5));
  EXPECT_EQ(d1.psi->descriptor().degree, 1);
  EXPECT_EQ(d1.A->descriptor().degree, 1);
  EXPECT_EQ(d1.sigma->descriptor().degree, 2);
  const auto d0 = make_discretization(sq, config(SchemeKind::Mixed, 0, 2, 0.5));
  EXPECT_EQ(d0.psi->descriptor().degree, 1);
  EXPECT_EQ(d0.sigma->descriptor().family, Family::Lagrange);
  const auto d3 = make_discretization(cube3d_case(), config(SchemeKind::Mixed, 0, 1, 0.5));
  EXPECT_EQ(d3.sigma->descriptor().family, Family::NedelecFirstKind);
  EXPECT_THROW(make_discretization(cube3d_case(), config(SchemeKind::Mixed, 1, 1, 0.5)), std::invalid_argument);
  EXPECT_THROW(make_discretization(cube3d_case(), config(SchemeKind::Lagrange, 0, 1, 0.5)), std::invalid_argument);
}
