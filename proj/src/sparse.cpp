#include "tdgl/sparse.hpp"

#include <umfpack.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace tdgl {

namespace {

using Long = SuiteSparse_long;
using Complex = std::complex<double>;

double magnitude2(double v) { return v * v; }
double magnitude2(const Complex& v) { return std::norm(v); }

// Thin dispatch over the real (dl) and packed-complex (zl) UMFPACK entry points.
template <typename T>
struct Umf;

template <>
struct Umf<double> {
  static const double* ptr(const double* v) { return v; }
  static double* ptr(double* v) { return v; }
  static Long symbolic(Long n, const Long* Ap, const Long* Ai, const double* Ax, void** S, const double* control,
                       double* info)
  {
    return umfpack_dl_symbolic(n, n, Ap, Ai, Ax, S, control, info);
  }
  static Long numeric(const Long* Ap, const Long* Ai, const double* Ax, void* S, void** N, const double* control,
                      double* info)
  {
    return umfpack_dl_numeric(Ap, Ai, Ax, S, N, control, info);
  }
  static Long solve(const Long* Ap, const Long* Ai, const double* Ax, double* x, const double* b, void* N,
                    const double* control, double* info)
  {
    return umfpack_dl_solve(UMFPACK_Aat, Ap, Ai, Ax, x, b, N, control, info);
  }
  static Long diag(Long* P, Long* Q, double* D, void* N)
  {
    return umfpack_dl_get_numeric(nullptr, nullptr, nullptr, nullptr, nullptr, nullptr, P, Q, D, nullptr, nullptr,
                                  N);
  }
  static void free_symbolic(void** S) { umfpack_dl_free_symbolic(S); }
  static void free_numeric(void** N) { umfpack_dl_free_numeric(N); }
  static void defaults(double* control) { umfpack_dl_defaults(control); }
};

template <>
struct Umf<Complex> {
  static const double* ptr(const Complex* v) { return reinterpret_cast<const double*>(v); }
  static double* ptr(Complex* v) { return reinterpret_cast<double*>(v); }
  static Long symbolic(Long n, const Long* Ap, const Long* Ai, const double* Ax, void** S, const double* control,
                       double* info)
  {
    return umfpack_zl_symbolic(n, n, Ap, Ai, Ax, nullptr, S, control, info);
  }
  static Long numeric(const Long* Ap, const Long* Ai, const double* Ax, void* S, void** N, const double* control,
                      double* info)
  {
    return umfpack_zl_numeric(Ap, Ai, Ax, nullptr, S, N, control, info);
  }
  static Long solve(const Long* Ap, const Long* Ai, const double* Ax, double* x, const double* b, void* N,
                    const double* control, double* info)
  {
    return umfpack_zl_solve(UMFPACK_Aat, Ap, Ai, Ax, nullptr, x, nullptr, b, nullptr, N, control, info);
  }
  static Long diag(Long* P, Long* Q, double* D, void* N)
  {
    return umfpack_zl_get_numeric(nullptr, nullptr, nullptr, nullptr, nullptr, nullptr, nullptr, nullptr, P, Q, D,
                                  nullptr, nullptr, nullptr, N);
  }
  static void free_symbolic(void** S) { umfpack_zl_free_symbolic(S); }
  static void free_numeric(void** N) { umfpack_zl_free_numeric(N); }
  static void defaults(double* control) { umfpack_zl_defaults(control); }
};

}  // namespace

template <typename T>
SparseMatrix<T>::SparseMatrix(int rows, int cols, std::vector<int> row_ptr, std::vector<int> col_idx,
                              std::vector<T> values)
    : rows_(rows), cols_(cols), row_ptr_(std::move(row_ptr)), col_idx_(std::move(col_idx)), values_(std::move(values))
{
  if (static_cast<int>(row_ptr_.size()) != rows_ + 1 || col_idx_.size() != values_.size() ||
      row_ptr_.back() != static_cast<int>(col_idx_.size())) {
    throw std::invalid_argument("SparseMatrix: inconsistent CSR arrays");
  }
}

template <typename T>
SparseMatrix<T> SparseMatrix<T>::from_triplets(int rows, int cols, std::span<const Triplet<T>> entries,
                                               std::vector<int>* positions)
{
  if (rows < 0 || cols < 0) {
    throw std::invalid_argument("from_triplets: negative dimension");
  }
  std::vector<int> count(static_cast<std::size_t>(rows) + 1, 0);
  for (const auto& t : entries) {
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols) {
      throw std::out_of_range("from_triplets: entry (" + std::to_string(t.row) + ", " + std::to_string(t.col) +
                              ") outside " + std::to_string(rows) + "x" + std::to_string(cols));
    }
    ++count[t.row + 1];
  }
  std::partial_sum(count.begin(), count.end(), count.begin());
  // Bucket by row, keeping input order; then order each row by column.
  std::vector<int> order(entries.size());
  {
    std::vector<int> next(count.begin(), count.end() - 1);
    for (std::size_t k = 0; k < entries.size(); ++k) {
      order[next[entries[k].row]++] = static_cast<int>(k);
    }
  }
  SparseMatrix<T> A;
  A.rows_ = rows;
  A.cols_ = cols;
  A.row_ptr_.assign(static_cast<std::size_t>(rows) + 1, 0);
  A.col_idx_.reserve(entries.size());
  A.values_.reserve(entries.size());
  if (positions != nullptr) {
    positions->assign(entries.size(), -1);
  }
  for (int i = 0; i < rows; ++i) {
    const auto begin = order.begin() + count[i];
    const auto end = order.begin() + count[i + 1];
    std::stable_sort(begin, end, [&](int a, int b) { return entries[a].col < entries[b].col; });
    int last = -1;
    for (auto it = begin; it != end; ++it) {
      const auto& t = entries[*it];
      if (t.col != last) {
        A.col_idx_.push_back(t.col);
        A.values_.push_back(t.value);
        last = t.col;
      } else {
        A.values_.back() += t.value;
      }
      if (positions != nullptr) {
        (*positions)[*it] = static_cast<int>(A.values_.size()) - 1;
      }
    }
    A.row_ptr_[i + 1] = static_cast<int>(A.col_idx_.size());
  }
  return A;
}

template <typename T>
T SparseMatrix<T>::coeff(int i, int j) const
{
  const auto begin = col_idx_.begin() + row_ptr_[i];
  const auto end = col_idx_.begin() + row_ptr_[i + 1];
  const auto it = std::lower_bound(begin, end, j);
  return (it != end && *it == j) ? values_[it - col_idx_.begin()] : T{};
}

template <typename T>
void SparseMatrix<T>::multiply(std::span<const T> x, std::span<T> y) const
{
  if (static_cast<int>(x.size()) != cols_ || static_cast<int>(y.size()) != rows_) {
    throw std::invalid_argument("SparseMatrix::multiply: size mismatch");
  }
  for (int i = 0; i < rows_; ++i) {
    T s{};
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      s += values_[k] * x[col_idx_[k]];
    }
    y[i] = s;
  }
}

template <typename T>
std::vector<T> SparseMatrix<T>::operator*(const std::vector<T>& x) const
{
  std::vector<T> y(rows_);
  multiply(x, y);
  return y;
}

template <typename T>
double relative_residual(const SparseMatrix<T>& A, std::span<const T> x, std::span<const T> b)
{
  std::vector<T> r(A.rows());
  A.multiply(x, r);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    num += magnitude2(r[i] - b[i]);
    den += magnitude2(b[i]);
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

template <typename T>
struct SparseLu<T>::Impl {
  const SparseMatrix<T>* matrix = nullptr;
  Long n = 0;
  std::vector<Long> Ap;
  std::vector<Long> Ai;
  void* symbolic = nullptr;
  void* numeric = nullptr;
  double control[UMFPACK_CONTROL];

  Impl() { Umf<T>::defaults(control); }
  ~Impl()
  {
    if (numeric != nullptr) {
      Umf<T>::free_numeric(&numeric);
    }
    if (symbolic != nullptr) {
      Umf<T>::free_symbolic(&symbolic);
    }
  }

  bool same_pattern(const SparseMatrix<T>& A) const
  {
    if (symbolic == nullptr || Ap.size() != A.row_ptr().size() || Ai.size() != A.col_idx().size()) {
      return false;
    }
    return std::equal(Ap.begin(), Ap.end(), A.row_ptr().begin()) &&
           std::equal(Ai.begin(), Ai.end(), A.col_idx().begin());
  }
};

template <typename T>
SparseLu<T>::SparseLu(double tolerance) : impl_(std::make_unique<Impl>()), tolerance_(tolerance)
{
  if (std::isinf(tolerance_)) {
    impl_->control[UMFPACK_IRSTEP] = 0;
  }
}

template <typename T>
SparseLu<T>::~SparseLu() = default;

template <typename T>
void SparseLu<T>::factorize(const SparseMatrix<T>& A)
{
  if (A.rows() != A.cols()) {
    throw std::invalid_argument("SparseLu: matrix is not square");
  }
  Impl& m = *impl_;
  if (m.numeric != nullptr) {
    Umf<T>::free_numeric(&m.numeric);
  }
  m.matrix = &A;
  m.n = A.rows();
  if (m.n == 0) {
    return;
  }
  double info[UMFPACK_INFO];
  if (!m.same_pattern(A)) {
    if (m.symbolic != nullptr) {
      Umf<T>::free_symbolic(&m.symbolic);
    }
    m.Ap.assign(A.row_ptr().begin(), A.row_ptr().end());
    m.Ai.assign(A.col_idx().begin(), A.col_idx().end());
    const Long status =
        Umf<T>::symbolic(m.n, m.Ap.data(), m.Ai.data(), Umf<T>::ptr(A.values().data()), &m.symbolic, m.control, info);
    if (status != UMFPACK_OK) {
      m.symbolic = nullptr;
      throw SolverError("sparse LU: symbolic analysis failed (status " + std::to_string(status) + ")");
    }
  }
  const Long status =
      Umf<T>::numeric(m.Ap.data(), m.Ai.data(), Umf<T>::ptr(A.values().data()), m.symbolic, &m.numeric, m.control, info);
  if (status == UMFPACK_WARNING_singular_matrix) {
    // UMFPACK factors the transpose, so its column permutation indexes our rows.
    const std::size_t vals = sizeof(T) / sizeof(double);
    std::vector<Long> P(m.n), Q(m.n);
    std::vector<double> D(vals * m.n);
    Umf<T>::diag(P.data(), Q.data(), D.data(), m.numeric);
    int row = -1;
    for (Long k = 0; k < m.n && row < 0; ++k) {
      bool zero = true;
      for (std::size_t c = 0; c < vals; ++c) {
        zero = zero && D[vals * k + c] == 0.0;
      }
      if (zero) {
        row = static_cast<int>(Q[k]);
      }
    }
    Umf<T>::free_numeric(&m.numeric);
    throw SolverError("sparse LU: matrix is singular (zero pivot in row " + std::to_string(row) + ")", row);
  }
  if (status != UMFPACK_OK) {
    throw SolverError("sparse LU: numeric factorization failed (status " + std::to_string(status) + ")");
  }
}

template <typename T>
std::vector<T> SparseLu<T>::solve(std::span<const T> b) const
{
  const Impl& m = *impl_;
  if (m.matrix == nullptr) {
    throw std::logic_error("SparseLu::solve called before factorize");
  }
  if (static_cast<Long>(b.size()) != m.n) {
    throw std::invalid_argument("SparseLu::solve: right-hand side has wrong length");
  }
  std::vector<T> x(b.size());
  if (m.n == 0) {
    last_residual_ = 0.0;
    return x;
  }
  double info[UMFPACK_INFO];
  const Long status = Umf<T>::solve(m.Ap.data(), m.Ai.data(), Umf<T>::ptr(m.matrix->values().data()),
                                    Umf<T>::ptr(x.data()), Umf<T>::ptr(b.data()), m.numeric, m.control, info);
  if (status != UMFPACK_OK) {
    throw SolverError("sparse LU: solve failed (status " + std::to_string(status) + ")");
  }
  if (std::isinf(tolerance_)) {
    return x;
  }
  last_residual_ = relative_residual<T>(*m.matrix, x, b);
  if (!(last_residual_ <= tolerance_)) {
    throw SolverError("sparse LU: relative residual " + std::to_string(last_residual_) + " exceeds tolerance");
  }
  return x;
}

template <typename T>
std::vector<T> lu_solve(const SparseMatrix<T>& A, std::span<const T> b)
{
  SparseLu<T> lu;
  lu.factorize(A);
  return lu.solve(b);
}

template <typename T>
RefinedLu<T>::RefinedLu(double tolerance, int max_refinements, double refine_ratio)
    : tolerance_(tolerance),
      max_refinements_(max_refinements),
      target_(tolerance * refine_ratio),
      lu_(std::numeric_limits<double>::infinity())
{
}

template <typename T>
void RefinedLu<T>::refactorize(const SparseMatrix<T>& A)
{
  frozen_ = A;
  lu_.factorize(frozen_);
  ready_ = true;
  ++factorizations_;
}

template <typename T>
bool RefinedLu<T>::refine(const SparseMatrix<T>& A, std::span<const T> b, std::vector<T>& x)
{
  x = lu_.solve(b);
  std::vector<T> r(b.size());
  for (last_refinements_ = 0;; ++last_refinements_) {
    const std::vector<T> ax = A * x;
    double rr = 0.0;
    double bb = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
      r[i] = b[i] - ax[i];
      rr += std::norm(r[i]);
      bb += std::norm(b[i]);
    }
    last_residual_ = bb > 0.0 ? std::sqrt(rr / bb) : std::sqrt(rr);
    if (last_residual_ <= target_) {
      return true;
    }
    if (last_refinements_ == max_refinements_ || !std::isfinite(last_residual_)) {
      return false;
    }
    const std::vector<T> dx = lu_.solve(r);
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] += dx[i];
    }
  }
}

template <typename T>
std::vector<T> RefinedLu<T>::solve(const SparseMatrix<T>& A, std::span<const T> b)
{
  const bool same_shape = ready_ && frozen_.rows() == A.rows() && frozen_.row_ptr().size() == A.row_ptr().size() &&
                          std::equal(frozen_.col_idx().begin(), frozen_.col_idx().end(), A.col_idx().begin(),
                                     A.col_idx().end());
  std::vector<T> x;
  if (same_shape && refine(A, b, x)) {
    return x;
  }
  refactorize(A);
  refine(A, b, x);
  if (!(last_residual_ <= tolerance_)) {
    throw SolverError("sparse LU: relative residual " + std::to_string(last_residual_) + " exceeds tolerance");
  }
  return x;
}

template class SparseMatrix<double>;
template class SparseMatrix<Complex>;
template class SparseLu<double>;
template class SparseLu<Complex>;
template class RefinedLu<double>;
template class RefinedLu<Complex>;
template double relative_residual(const SparseMatrix<double>&, std::span<const double>, std::span<const double>);
template double relative_residual(const SparseMatrix<Complex>&, std::span<const Complex>, std::span<const Complex>);
template std::vector<double> lu_solve(const SparseMatrix<double>&, std::span<const double>);
template std::vector<Complex> lu_solve(const SparseMatrix<Complex>&, std::span<const Complex>);

}  // namespace tdgl
