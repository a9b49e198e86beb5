#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace tdgl {

template <typename T>
struct Triplet {
  int row;
  int col;
  T value;
};

/**
 * @brief Compressed sparse row matrix.
 *
 * Column indices are strictly increasing within each row.
 */
template <typename T>
class SparseMatrix {
public:
  SparseMatrix() = default;
  SparseMatrix(int rows, int cols, std::vector<int> row_ptr, std::vector<int> col_idx, std::vector<T> values);

  /**
   * Sums duplicates. When @p positions is given it receives, for every input
   * triplet, the index of the value slot it was added into.
   * Throws std::out_of_range for indices outside [0, rows) x [0, cols).
   */
  static SparseMatrix from_triplets(int rows, int cols, std::span<const Triplet<T>> entries,
                                    std::vector<int>* positions = nullptr);
  static SparseMatrix from_triplets(int n, std::span<const Triplet<T>> entries)
  {
    return from_triplets(n, n, entries);
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t nnz() const { return values_.size(); }
  const std::vector<int>& row_ptr() const { return row_ptr_; }
  const std::vector<int>& col_idx() const { return col_idx_; }
  const std::vector<T>& values() const { return values_; }
  std::vector<T>& values() { return values_; }

  /// Stored entry (i, j), zero when absent.
  T coeff(int i, int j) const;

  void multiply(std::span<const T> x, std::span<T> y) const;
  std::vector<T> operator*(const std::vector<T>& x) const;

private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<int> row_ptr_{0};
  std::vector<int> col_idx_;
  std::vector<T> values_;
};

using RealMatrix = SparseMatrix<double>;
using ComplexMatrix = SparseMatrix<std::complex<double>>;

/// Raised when a factorization or solve fails; pivot_row is -1 when unknown.
class SolverError : public std::runtime_error {
public:
  SolverError(const std::string& what, int pivot_row = -1) : std::runtime_error(what), pivot_row_(pivot_row) {}
  int pivot_row() const { return pivot_row_; }

private:
  int pivot_row_;
};

/// ||Ax - b|| / ||b|| (absolute residual when b = 0).
template <typename T>
double relative_residual(const SparseMatrix<T>& A, std::span<const T> x, std::span<const T> b);

/**
 * @brief Sparse direct LU factorization (UMFPACK, approximate minimum degree ordering).
 *
 * The symbolic analysis is kept and reused while the sparsity pattern is
 * unchanged. Every solve verifies ||Ax - b|| / ||b|| <= tolerance and throws
 * SolverError otherwise; an infinite tolerance skips the check and UMFPACK's own refinement steps.
 */
template <typename T>
class SparseLu {
public:
  explicit SparseLu(double tolerance = 1e-10);
  ~SparseLu();
  SparseLu(const SparseLu&) = delete;
  SparseLu& operator=(const SparseLu&) = delete;

  void factorize(const SparseMatrix<T>& A);
  /// Solves with the most recently factorized matrix, which must still be alive and unchanged.
  std::vector<T> solve(std::span<const T> b) const;

  double last_residual() const { return last_residual_; }

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  double tolerance_;
  mutable double last_residual_ = 0.0;
};

/**
 * @brief Solver for a sequence of slowly varying matrices with a fixed pattern.
 *
 * Keeps the LU factors of an earlier matrix and uses them for iterative
 * refinement on the current one. When refinement does not reach
 * tolerance * refine_ratio within max_refinements corrections, the current
 * matrix is factorized afresh. The tolerance contract of SparseLu holds for
 * every returned solution.
 */
template <typename T>
class RefinedLu {
public:
  explicit RefinedLu(double tolerance = 1e-10, int max_refinements = 20, double refine_ratio = 1e-2);

  std::vector<T> solve(const SparseMatrix<T>& A, std::span<const T> b);

  double last_residual() const { return last_residual_; }
  int last_refinements() const { return last_refinements_; }
  int factorizations() const { return factorizations_; }

private:
  bool refine(const SparseMatrix<T>& A, std::span<const T> b, std::vector<T>& x);
  void refactorize(const SparseMatrix<T>& A);

  double tolerance_;
  int max_refinements_;
  double target_;
  SparseMatrix<T> frozen_;
  SparseLu<T> lu_;
  bool ready_ = false;
  double last_residual_ = 0.0;
  int last_refinements_ = 0;
  int factorizations_ = 0;
};

/// One-shot factorize and solve.
template <typename T>
std::vector<T> lu_solve(const SparseMatrix<T>& A, std::span<const T> b);

}  // namespace tdgl
