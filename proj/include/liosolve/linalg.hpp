#pragma once

// Small dense linear algebra over Complex. Matrices here never exceed a few
// dozen entries per side (2n x 2n for the systems we certify), so the
// algorithms favour rounding control over asymptotics: LU with partial
// pivoting for solves and determinants, cyclic Jacobi on Hermitian products
// for eigenvalues, singular values and kernel bases.

#include <utility>
#include <vector>

#include "liosolve/complex.hpp"

namespace liosolve {

template <typename T>
class Matrix {
 public:
  Matrix() : rows_(0), cols_(0) {}
  Matrix(size_t rows, size_t cols, T fill = T())
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }
  T& operator()(size_t i, size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(size_t i, size_t j) const { return data_[i * cols_ + j]; }

  std::vector<T> col(size_t j) const {
    std::vector<T> c(rows_);
    for (size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
  }
  std::vector<T> row(size_t i) const {
    std::vector<T> r(cols_);
    for (size_t j = 0; j < cols_; ++j) r[j] = (*this)(i, j);
    return r;
  }

 private:
  size_t rows_, cols_;
  std::vector<T> data_;
};

using CMatrix = Matrix<Complex>;

CMatrix mat_mul(const CMatrix& a, const CMatrix& b, unsigned prec);
CMatrix mat_conj_transpose(const CMatrix& a);
CVector mat_vec(const CMatrix& a, const CVector& x, unsigned prec);

// Solve A x = b by LU with partial pivoting. Throws SingularJacobian on an
// exactly zero pivot; near-singularity is the caller's business (checked
// through singular values before trusting the solution).
CVector lu_solve(const CMatrix& a, const CVector& b, unsigned prec);

Complex determinant(const CMatrix& a, unsigned prec);

struct EigenResult {
  std::vector<BigFloat> values;  // ascending, real
  CMatrix vectors;               // unitary columns, same order
};

// Cyclic Jacobi for a Hermitian matrix. The input is symmetrized first so
// rounding skew in a computed product cannot break the method.
EigenResult hermitian_eigen(const CMatrix& a, unsigned prec);

// Singular values in descending order, via the Hermitian eigenproblem of the
// smaller Gram product.
std::vector<BigFloat> singular_values(const CMatrix& a, unsigned prec);

// Orthonormal basis (columns) for the span of the `dim` smallest eigenvalue
// directions of A^H A: the numerical kernel once the rank is known.
CMatrix kernel_basis(const CMatrix& a, size_t dim, unsigned prec);

}  // namespace liosolve
