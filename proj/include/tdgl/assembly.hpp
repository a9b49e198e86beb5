#pragma once

#include "tdgl/fespace.hpp"
#include "tdgl/manufactured.hpp"
#include "tdgl/sparse.hpp"

#include <array>
#include <memory>
#include <span>
#include <vector>

namespace tdgl {

template <typename T>
struct AssembledSystem {
  SparseMatrix<T> matrix;
  std::vector<T> rhs;
  /// Eliminated essential dofs and their prescribed values.
  std::vector<int> dirichlet_dofs;
  std::vector<T> dirichlet_values;
};

/**
 * @brief Accumulates a global system from cell contributions.
 *
 * Rows of constrained dofs are replaced by identity rows; constrained columns
 * are moved to the right-hand side. The first assembly records the sparsity
 * pattern; later assemblies must issue the same sequence of add() calls and
 * write straight into the stored CSR values.
 */
template <typename T>
class SystemBuilder {
public:
  SystemBuilder(int n, std::vector<char> constrained);

  int size() const { return n_; }
  const std::vector<char>& constrained() const { return constrained_; }

  /// Starts an assembly. @p bc holds values for the constrained dofs (full length).
  void begin(std::span<const T> bc);
  void add(int row, int col, T value);
  void add_rhs(int row, T value) { system_.rhs[row] += value; }
  /// Scatters a dense row-major block.
  void add_block(std::span<const int> rows, std::span<const int> cols, const T* block);
  const AssembledSystem<T>& finish();

  const AssembledSystem<T>& system() const { return system_; }

private:
  int n_;
  std::vector<char> constrained_;
  std::vector<T> bc_;
  bool recorded_ = false;
  std::vector<Triplet<T>> triplets_;
  std::vector<int> positions_;
  std::size_t cursor_ = 0;
  AssembledSystem<T> system_;
};

/// Quadrature degree used for matrices with the given spaces: 2 * (max polynomial degree) + 2.
int matrix_quadrature_degree(std::initializer_list<const DofMap*> spaces);
/// Highest polynomial degree of the basis functions of a space.
int polynomial_degree(const DofMap& space);
/// Load and error quadrature degree: 6 in 2D, 5 in 3D.
int load_quadrature_degree(int dim);

/**
 * Load vectors of the time-independent forcing terms: psi[k]_i = (G_k, w_i),
 * A[k]_i = (F_k, v_i), curl_He_i = (curl H, v_i), He_curl_i = (H, curl v_i).
 */
struct ForcingLoads {
  std::array<std::vector<Complex>, ManufacturedCase::kTerms> psi;
  std::array<std::vector<double>, ManufacturedCase::kTerms> A;
  std::vector<double> curl_He;
  std::vector<double> He_curl;
};

ForcingLoads assemble_forcing_loads(const ManufacturedCase& mcase, const DofMap& psi_space, const DofMap& A_space,
                                    int degree);

/// (g(t), w_i) from precomputed loads.
std::vector<Complex> psi_forcing(const ManufacturedCase& mcase, const ForcingLoads& loads, double t);
/// (f(t), v_i) + (curl H_e(t), v_i) for the mixed scheme.
std::vector<double> mixed_A_forcing(const ManufacturedCase& mcase, const ForcingLoads& loads, double t);
/// (f(t), v_i) + (H_e(t), curl v_i) for the Lagrange scheme.
std::vector<double> lagrange_A_forcing(const ManufacturedCase& mcase, const ForcingLoads& loads, double t);

/**
 * @brief Linear system for psi^n:
 *   (1/tau)(u, w) - i kappa (div A u, w) + ((i/kappa grad + A) u, (i/kappa grad + A) w) + (V u, w)
 *   = (1/tau)(psi^{n-1}, w) + (g, w),
 * with A = A^{n-1} and V = |psi^{n-1}|^2 - 1, or V = -(|A|^2 + |psi^{n-1}|^2 - 1) in
 * the Lagrange-comparison form. No essential conditions.
 */
class PsiAssembler {
public:
  PsiAssembler(std::shared_ptr<const DofMap> psi_space, std::shared_ptr<const DofMap> A_space, double kappa,
               bool lagrange_form = false);

  const AssembledSystem<Complex>& assemble(const ComplexFunction& psi_old, const RealFunction& A_old, double tau,
                                           std::span<const Complex> forcing);

private:
  std::shared_ptr<const DofMap> psi_space_;
  std::shared_ptr<const DofMap> A_space_;
  double kappa_;
  bool lagrange_form_;
  int degree_;
  SystemBuilder<Complex> builder_;
};

/**
 * @brief Saddle system for (sigma^n, A^n), sigma unknowns first:
 *   (sigma, chi) - (C chi, A) = 0,
 *   (C sigma, v) + (1/tau)(A, v) + (div A, div v) + (|psi^{n-1}|^2 A, v)
 *   = (1/tau)(A^{n-1}, v) + forcing + (1/kappa)(Im(conj(psi^{n-1}) grad psi^{n-1}), v),
 * where C is the rotated gradient in 2D and the curl in 3D. Boundary sigma dofs
 * take the supplied values and boundary normal A dofs are zero.
 */
class SigmaAAssembler {
public:
  SigmaAAssembler(std::shared_ptr<const DofMap> sigma_space, std::shared_ptr<const DofMap> A_space,
                  std::shared_ptr<const DofMap> psi_space, double kappa, bool essential = true);

  int num_sigma() const { return sigma_space_->num_dofs(); }
  int num_A() const { return A_space_->num_dofs(); }

  /// @p sigma_bc: sigma dof values (only boundary entries are read); @p forcing: A-space load.
  const AssembledSystem<double>& assemble(const ComplexFunction& psi_old, const RealFunction& A_old, double tau,
                                          std::span<const double> sigma_bc, std::span<const double> forcing);

private:
  std::shared_ptr<const DofMap> sigma_space_;
  std::shared_ptr<const DofMap> A_space_;
  std::shared_ptr<const DofMap> psi_space_;
  double kappa_;
  int degree_;
  SystemBuilder<double> builder_;
};

/**
 * @brief Vector-Lagrange system for A^n:
 *   (1/tau)(A, v) + (div A, div v) + (curl A, curl v) + (|psi^{n-1}|^2 A, v)
 *   = (1/tau)(A^{n-1}, v) + forcing + (1/kappa)(Im(conj(psi^{n-1}) grad psi^{n-1}), v),
 * with the normal components zero on the boundary.
 */
class LagrangeAAssembler {
public:
  LagrangeAAssembler(std::shared_ptr<const DofMap> A_space, std::shared_ptr<const DofMap> psi_space, double kappa,
                     bool essential = true);

  const AssembledSystem<double>& assemble(const ComplexFunction& psi_old, const RealFunction& A_old, double tau,
                                          std::span<const double> forcing);

private:
  std::shared_ptr<const DofMap> A_space_;
  std::shared_ptr<const DofMap> psi_space_;
  double kappa_;
  int degree_;
  SystemBuilder<double> builder_;
};

/// Mass matrix of a space (no constraints).
RealMatrix assemble_mass_matrix(const DofMap& space, int degree);

/// max over interior chi-dofs of |(sigma, chi) - (C chi, A)|, relative to max(||sigma||_L2, ||A||_L2).
double sigma_constraint_residual(const RealFunction& sigma, const RealFunction& A);

/// (curl A, w_i) for a 2D vector field A (z component of the curl) and a scalar space.
std::vector<double> assemble_curl_load(const RealFunction& A, const DofMap& scalar_space, int degree);

/// L2 projection of the cellwise curl of a vector field (z component in 2D) onto a scalar Lagrange space.
RealFunction project_curl(const RealFunction& A, std::shared_ptr<const DofMap> scalar_space);

/// L2 norms of f - exact with the given quadrature degree.
double l2_error(const RealFunction& f, const ScalarField& exact, int degree);
double l2_error(const ComplexFunction& f, const ComplexField& exact, int degree);
double l2_error(const RealFunction& f, const VectorField& exact, int degree);

}  // namespace tdgl
