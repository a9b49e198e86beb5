#include "tdgl/scheme.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <stdexcept>
#include <string>

namespace tdgl {

namespace {

int error_quadrature_degree(const ManufacturedCase& mcase)
{
  return mcase.domain() == Domain::LShape ? 8 : load_quadrature_degree(mcase.dim());
}

// sigma as stored in a dof vector: scalar (component 0) in 2D, vector in 3D.
Vec3 sigma_dof_field(const Vec3& curl, int dim) { return dim == 2 ? Vec3{curl[2], 0.0, 0.0} : curl; }

}  // namespace

Discretization make_discretization(const ManufacturedCase& mcase, const SchemeConfig& config)
{
  if (config.M < 1) {
    throw std::invalid_argument("make_discretization: M must be positive");
  }
  if (config.r < 0 || config.r > 1) {
    throw std::invalid_argument("make_discretization: r must be 0 or 1");
  }
  const int dim = mcase.dim();
  Discretization d;
  d.mesh = std::make_shared<const Mesh>(build_mesh(mcase.domain(), config.M));
  if (config.scheme == SchemeKind::Lagrange) {
    if (dim != 2 || config.r != 0) {
      throw std::invalid_argument("make_discretization: the Lagrange scheme is available for r = 0 in 2D only");
    }
    d.psi = make_space(d.mesh, {Family::Lagrange, 1, ValueKind::ScalarComplex});
    d.A = make_space(d.mesh, {Family::Lagrange, 1, ValueKind::VectorReal});
    d.sigma = make_space(d.mesh, {Family::Lagrange, 1, ValueKind::ScalarReal});
    return d;
  }
  if (dim == 3 && config.r != 0) {
    throw std::invalid_argument("make_discretization: only r = 0 is available in 3D");
  }
  d.psi = make_space(d.mesh, {Family::Lagrange, std::max(1, config.r), ValueKind::ScalarComplex});
  d.A = make_space(d.mesh, {Family::RaviartThomas, config.r, ValueKind::VectorReal});
  if (dim == 2) {
    d.sigma = make_space(d.mesh, {Family::Lagrange, config.r + 1, ValueKind::ScalarReal});
  } else {
    d.sigma = make_space(d.mesh, {Family::NedelecFirstKind, 1, ValueKind::VectorReal});
  }
  return d;
}

int time_steps(double final_time, double& tau)
{
  if (!(tau > 0.0) || !(final_time > 0.0)) {
    throw std::invalid_argument("time_steps: tau and final time must be positive");
  }
  const int n = std::max(1, static_cast<int>(std::lround(final_time / tau)));
  const double adjusted = final_time / n;
  if (std::abs(adjusted - tau) > 1e-12 * tau) {
    std::cerr << "warning: tau " << tau << " adjusted to " << adjusted << " (" << n << " steps)\n";
  }
  tau = adjusted;
  return n;
}

TdglSolver::TdglSolver(const ManufacturedCase& mcase, SchemeConfig config)
    : case_(mcase), config_(config), spaces_(make_discretization(mcase, config)), tau_(config.tau), psi_lu_(1e-10),
      field_lu_(1e-10), p1_mass_lu_(1e-10)
{
  steps_ = time_steps(config_.final_time.value_or(case_.final_time()), tau_);
  const int dim = case_.dim();
  loads_ = assemble_forcing_loads(case_, *spaces_.psi, *spaces_.A, load_quadrature_degree(dim));
  const bool lagrange = config_.scheme == SchemeKind::Lagrange;
  psi_assembler_ =
      std::make_unique<PsiAssembler>(spaces_.psi, spaces_.A, case_.kappa(), lagrange && config_.lagrange_extra_potential);
  if (lagrange) {
    lagrange_assembler_ = std::make_unique<LagrangeAAssembler>(spaces_.A, spaces_.psi, case_.kappa());
    const int deg = matrix_quadrature_degree({spaces_.A.get(), spaces_.sigma.get()});
    p1_mass_ = std::make_unique<RealMatrix>(assemble_mass_matrix(*spaces_.sigma, deg));
    p1_mass_lu_.factorize(*p1_mass_);
  } else {
    saddle_assembler_ = std::make_unique<SigmaAAssembler>(spaces_.sigma, spaces_.A, spaces_.psi, case_.kappa());
    std::vector<char> mask(spaces_.sigma->num_dofs(), 0);
    for (int d : spaces_.sigma->boundary_dofs()) {
      mask[d] = 1;
    }
    sigma_bc_spatial_ = interpolate_dofs(
        *spaces_.sigma, [&](const Vec3& x) { return sigma_dof_field(case_.spatial(x).He, dim); }, &mask);
  }
}

TdglState TdglSolver::initial_state() const
{
  const int dim = case_.dim();
  TdglState s;
  s.psi = interpolate(spaces_.psi, ComplexField([&](const Vec3& x) { return case_.psi(x, 0.0); }));
  s.A = interpolate(spaces_.A, VectorField([&](const Vec3& x) { return case_.A(x, 0.0); }));
  RealFunction sigma(spaces_.sigma);
  sigma.coefficients =
      interpolate_dofs(*spaces_.sigma, [&](const Vec3& x) { return sigma_dof_field(case_.sigma(x, 0.0), dim); }, nullptr);
  s.sigma = std::move(sigma);
  s.n = 0;
  s.t = 0.0;
  return s;
}

ComplexFunction TdglSolver::solve_psi(const TdglState& previous)
{
  const double t = (previous.n + 1) * tau_;
  const auto g = psi_forcing(case_, loads_, t);
  const auto& sys = psi_assembler_->assemble(previous.psi, previous.A, tau_, g);
  ComplexFunction psi(spaces_.psi);
  psi.coefficients = psi_lu_.solve(sys.matrix, sys.rhs);
  diag_.psi_residual = psi_lu_.last_residual();
  diag_.psi_refinements = psi_lu_.last_refinements();
  return psi;
}

std::pair<RealFunction, RealFunction> TdglSolver::solve_fields(const TdglState& previous)
{
  const double t = (previous.n + 1) * tau_;
  RealFunction sigma(spaces_.sigma);
  RealFunction A(spaces_.A);
  if (config_.scheme == SchemeKind::Lagrange) {
    const auto f = lagrange_A_forcing(case_, loads_, t);
    const auto& sys = lagrange_assembler_->assemble(previous.psi, previous.A, tau_, f);
    A.coefficients = field_lu_.solve(sys.matrix, sys.rhs);
    diag_.field_residual = field_lu_.last_residual();
    diag_.field_refinements = field_lu_.last_refinements();
    const int deg = matrix_quadrature_degree({spaces_.A.get(), spaces_.sigma.get()});
    sigma.coefficients = p1_mass_lu_.solve(assemble_curl_load(A, *spaces_.sigma, deg));
    return {std::move(sigma), std::move(A)};
  }
  const double h = case_.He_factor(t);
  std::vector<double> bc(sigma_bc_spatial_.size());
  std::transform(sigma_bc_spatial_.begin(), sigma_bc_spatial_.end(), bc.begin(), [h](double v) { return h * v; });
  const auto f = mixed_A_forcing(case_, loads_, t);
  const auto& sys = saddle_assembler_->assemble(previous.psi, previous.A, tau_, bc, f);
  const auto x = field_lu_.solve(sys.matrix, sys.rhs);
  diag_.field_residual = field_lu_.last_residual();
  diag_.field_refinements = field_lu_.last_refinements();
  const auto ns = static_cast<std::ptrdiff_t>(spaces_.sigma->num_dofs());
  sigma.coefficients.assign(x.begin(), x.begin() + ns);
  A.coefficients.assign(x.begin() + ns, x.end());
  if (config_.check_constraint) {
    diag_.constraint_residual = sigma_constraint_residual(sigma, A);
  }
  return {std::move(sigma), std::move(A)};
}

void TdglSolver::step(TdglState& state)
{
  try {
    auto psi = solve_psi(state);
    std::pair<RealFunction, RealFunction> fields;
    if (config_.coupling == Coupling::Sequential) {
      state.psi.coefficients.swap(psi.coefficients);
      fields = solve_fields(state);
      state.psi.coefficients.swap(psi.coefficients);
    } else {
      fields = solve_fields(state);
    }
    auto& [sigma, A] = fields;
    state.psi = std::move(psi);
    state.A = std::move(A);
    state.sigma = std::move(sigma);
    state.n += 1;
    state.t = state.n * tau_;
  } catch (const SolverError& e) {
    throw SolverError("step " + std::to_string(state.n + 1) + ": " + e.what(), e.pivot_row());
  }
}

ErrorTriple TdglSolver::errors(const TdglState& state) const
{
  const int deg = error_quadrature_degree(case_);
  const double t = state.t;
  ErrorTriple e;
  e.psi = l2_error(state.psi, ComplexField([&](const Vec3& x) { return case_.psi(x, t); }), deg);
  e.A = l2_error(state.A, VectorField([&](const Vec3& x) { return case_.A(x, t); }), deg);
  if (case_.dim() == 2) {
    e.sigma = l2_error(state.sigma, ScalarField([&](const Vec3& x) { return case_.sigma(x, t)[2]; }), deg);
  } else {
    e.sigma = l2_error(state.sigma, VectorField([&](const Vec3& x) { return case_.sigma(x, t); }), deg);
  }
  return e;
}

RunResult TdglSolver::run()
{
  const auto start = std::chrono::steady_clock::now();
  RunResult result;
  result.state = initial_state();
  for (int n = 0; n < steps_; ++n) {
    step(result.state);
    result.max_solver_residual =
        std::max({result.max_solver_residual, diag_.psi_residual, diag_.field_residual});
    result.max_constraint_residual = std::max(result.max_constraint_residual, diag_.constraint_residual);
  }
  result.errors = errors(result.state);
  result.tau = tau_;
  result.steps = steps_;
  result.factorizations = psi_lu_.factorizations() + field_lu_.factorizations();
  result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace tdgl
