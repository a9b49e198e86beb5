#include "tdgl/assembly.hpp"
#include "tdgl/sparse.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <stdexcept>

using namespace tdgl;

namespace {

using C = std::complex<double>;

}  // namespace

TEST(SparseMatrix, DuplicatesAreSummed)
{
  const std::vector<Triplet<double>> t = {{0, 0, 1.0}, {0, 0, 2.0}};
  const auto A = RealMatrix::from_triplets(1, t);
  EXPECT_EQ(A.nnz(), 1u);
  EXPECT_EQ(A.coeff(0, 0), 3.0);
}

TEST(SparseMatrix, EmptyIsZero)
{
  const auto A = RealMatrix::from_triplets(4, std::span<const Triplet<double>>{});
  const auto y = A * std::vector<double>{1, 2, 3, 4};
  EXPECT_EQ(y, std::vector<double>(4, 0.0));
}

TEST(SparseMatrix, RejectsOutOfRange)
{
  const std::vector<Triplet<double>> t = {{0, 3, 1.0}};
  EXPECT_THROW(RealMatrix::from_triplets(3, t), std::out_of_range);
}

TEST(SparseMatrix, MatvecMatchesDense)
{
  std::mt19937 rng(1);
  std::uniform_int_distribution<int> idx(0, 49);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  std::vector<Triplet<double>> t;
  std::vector<double> dense(50 * 50, 0.0);
  for (int k = 0; k < 600; ++k) {
    const int i = idx(rng), j = idx(rng);
    const double v = val(rng);
    t.push_back({i, j, v});
    dense[i * 50 + j] += v;
  }
  const auto A = RealMatrix::from_triplets(50, t);
  for (int i = 0; i < 50; ++i) {
    for (int k = A.row_ptr()[i] + 1; k < A.row_ptr()[i + 1]; ++k) {
      EXPECT_LT(A.col_idx()[k - 1], A.col_idx()[k]);
    }
  }
  std::vector<double> x(50);
  for (auto& v : x) {
    v = val(rng);
  }
  const auto y = A * x;
  for (int i = 0; i < 50; ++i) {
    double ref = 0.0;
    for (int j = 0; j < 50; ++j) {
      ref += dense[i * 50 + j] * x[j];
    }
    EXPECT_NEAR(y[i], ref, 1e-13);
  }
}

TEST(SparseLu, IdentityReturnsRhs)
{
  std::vector<Triplet<double>> t;
  for (int i = 0; i < 5; ++i) {
    t.push_back({i, i, 1.0});
  }
  const auto A = RealMatrix::from_triplets(5, t);
  const std::vector<double> b = {1, -2, 3, 0.5, 7};
  EXPECT_EQ(lu_solve<double>(A, b), b);
}

TEST(SparseLu, ComplexTwoByTwo)
{
  const std::vector<Triplet<C>> t = {{0, 0, 1.0}, {0, 1, C(0, 1)}, {1, 0, C(0, -1)}, {1, 1, 2.0}};
  const auto A = ComplexMatrix::from_triplets(2, t);
  const std::vector<C> b = {1.0, 0.0};
  const auto x = lu_solve<C>(A, b);
  EXPECT_NEAR(std::abs(x[0] - C(2, 0)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(x[1] - C(0, 1)), 0.0, 1e-14);
}

TEST(SparseLu, MassMatrixOnes)
{
  const auto mesh = std::make_shared<const Mesh>(build_unit_square_mesh(16));
  const auto p1 = make_space(mesh, {Family::Lagrange, 1, ValueKind::ScalarReal});
  const auto M = assemble_mass_matrix(*p1, 2);
  const auto b = M * std::vector<double>(p1->num_dofs(), 1.0);
  const auto x = lu_solve<double>(M, b);
  for (double v : x) {
    EXPECT_NEAR(v, 1.0, 1e-10);
  }
}

TEST(SparseLu, SingularMatrixReportsPivot)
{
  const std::vector<Triplet<double>> t = {{0, 0, 1.0}, {1, 0, 1.0}, {2, 2, 1.0}};
  const auto A = RealMatrix::from_triplets(3, t);
  SparseLu<double> lu;
  try {
    lu.factorize(A);
    (void)lu.solve(std::vector<double>{1.0, 1.0, 1.0});
    FAIL() << "singular matrix accepted";
  } catch (const SolverError& e) {
    EXPECT_GE(e.pivot_row(), 0);
  }
}

TEST(SparseLu, Deterministic)
{
  const auto mesh = std::make_shared<const Mesh>(build_unit_square_mesh(8));
  const auto p2 = make_space(mesh, {Family::Lagrange, 2, ValueKind::ScalarReal});
  const auto M = assemble_mass_matrix(*p2, 4);
  std::vector<double> b(p2->num_dofs());
  for (std::size_t i = 0; i < b.size(); ++i) {
    b[i] = std::sin(static_cast<double>(i));
  }
  EXPECT_EQ(lu_solve<double>(M, b), lu_solve<double>(M, b));
}

// Frozen factors of a nearby matrix still deliver the residual contract.
TEST(RefinedLu, ResidualContractAcrossChangingMatrices)
{
  const int n = 200;
  RefinedLu<C> solver(1e-10);
  for (int step = 0; step < 6; ++step) {
    std::vector<Triplet<C>> t;
    for (int i = 0; i < n; ++i) {
      t.push_back({i, i, C(4.0 + 0.01 * step * std::sin(i), 0.1 * step)});
      if (i + 1 < n) {
        t.push_back({i, i + 1, C(-1.0, 0.2)});
        t.push_back({i + 1, i, C(-1.0, -0.2 + 0.001 * step)});
      }
    }
    const auto A = ComplexMatrix::from_triplets(n, t);
    std::vector<C> b(n);
    for (int i = 0; i < n; ++i) {
      b[i] = C(std::cos(i), 1.0);
    }
    const auto x = solver.solve(A, b);
    EXPECT_LE(relative_residual<C>(A, x, b), 1e-10);
    EXPECT_LE(solver.last_residual(), 1e-10);
  }
  EXPECT_LT(solver.factorizations(), 6);
}

TEST(RefinedLu, RefactorizesWhenFactorsAreStale)
{
  const int n = 50;
  RefinedLu<double> solver(1e-10, 3);
  for (double shift : {1.0, 100.0}) {
    std::vector<Triplet<double>> t;
    for (int i = 0; i < n; ++i) {
      t.push_back({i, i, shift + i});
      if (i + 1 < n) {
        t.push_back({i, i + 1, 0.5});
      }
    }
    const auto A = RealMatrix::from_triplets(n, t);
    const std::vector<double> b(n, 1.0);
    const auto x = solver.solve(A, b);
    EXPECT_LE(relative_residual<double>(A, x, b), 1e-10);
  }
  EXPECT_EQ(solver.factorizations(), 2);
}
