#pragma once

#include "tdgl/assembly.hpp"
#include "tdgl/fespace.hpp"
#include "tdgl/manufactured.hpp"
#include "tdgl/sparse.hpp"

#include <memory>
#include <optional>
#include <utility>

namespace tdgl {

enum class SchemeKind { Mixed, Lagrange };

/// Which psi enters the field equation: psi^{n-1} (Lagged) or the new psi^n (Sequential).
enum class Coupling { Lagged, Sequential };

struct SchemeConfig {
  SchemeKind scheme = SchemeKind::Mixed;
  int r = 0;
  int M = 8;
  double tau = 0.125;
  /// Final time; taken from the case when unset.
  std::optional<double> final_time;
  /// Lagrange scheme: use -(|A|^2 + |psi|^2 - 1) as the psi potential instead of |psi|^2 - 1.
  bool lagrange_extra_potential = true;
  /// Audit the discrete sigma constraint after every mixed step.
  bool check_constraint = true;
  Coupling coupling = Coupling::Lagged;
};

/// psi, A and sigma spaces of one configuration.
struct Discretization {
  std::shared_ptr<const Mesh> mesh;
  std::shared_ptr<const DofMap> psi;
  std::shared_ptr<const DofMap> A;
  std::shared_ptr<const DofMap> sigma;
};

Discretization make_discretization(const ManufacturedCase& mcase, const SchemeConfig& config);

struct TdglState {
  ComplexFunction psi;
  RealFunction A;
  RealFunction sigma;
  int n = 0;
  double t = 0.0;
};

struct ErrorTriple {
  double psi = 0.0;
  double A = 0.0;
  double sigma = 0.0;
};

struct StepDiagnostics {
  double psi_residual = 0.0;
  double field_residual = 0.0;
  double constraint_residual = 0.0;
  int psi_refinements = 0;
  int field_refinements = 0;
};

struct RunResult {
  TdglState state;
  ErrorTriple errors;
  double tau = 0.0;
  int steps = 0;
  double seconds = 0.0;
  double max_solver_residual = 0.0;
  double max_constraint_residual = 0.0;
  /// LU factorizations over the run (psi and field systems together).
  int factorizations = 0;
};

/// Number of steps N = round(T / tau) (at least 1); tau is replaced by T / N.
int time_steps(double final_time, double& tau);

/**
 * @brief Linearized backward Euler time stepping for the TDGL system.
 *
 * The mixed scheme solves psi in Lagrange elements and (sigma, A) in the
 * Lagrange (2D) or Nedelec (3D) times Raviart-Thomas pair; the Lagrange
 * scheme solves A in vector Lagrange elements. With lagged coupling each
 * step reads only the previous level and the two solves are independent;
 * sequential coupling feeds the new psi into the field solve.
 */
class TdglSolver {
public:
  TdglSolver(const ManufacturedCase& mcase, SchemeConfig config);

  const Discretization& spaces() const { return spaces_; }
  const SchemeConfig& config() const { return config_; }
  double tau() const { return tau_; }
  int num_steps() const { return steps_; }

  TdglState initial_state() const;
  /// Advances one level; throws SolverError with the step index on failure.
  void step(TdglState& state);
  const StepDiagnostics& last_diagnostics() const { return diag_; }

  ComplexFunction solve_psi(const TdglState& previous);
  /// New (sigma, A); the field equation uses previous.psi as its psi.
  std::pair<RealFunction, RealFunction> solve_fields(const TdglState& previous);

  ErrorTriple errors(const TdglState& state) const;
  RunResult run();

private:
  const ManufacturedCase& case_;
  SchemeConfig config_;
  Discretization spaces_;
  double tau_;
  int steps_;
  ForcingLoads loads_;
  std::vector<double> sigma_bc_spatial_;
  std::unique_ptr<PsiAssembler> psi_assembler_;
  std::unique_ptr<SigmaAAssembler> saddle_assembler_;
  std::unique_ptr<LagrangeAAssembler> lagrange_assembler_;
  RefinedLu<Complex> psi_lu_;
  RefinedLu<double> field_lu_;
  std::unique_ptr<RealMatrix> p1_mass_;
  SparseLu<double> p1_mass_lu_;
  StepDiagnostics diag_;
};

}  // namespace tdgl
