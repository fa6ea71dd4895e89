#include "liosolve/linalg.hpp"

#include <algorithm>
#include <numeric>

#include "liosolve/errors.hpp"

namespace liosolve {

CMatrix mat_mul(const CMatrix& a, const CMatrix& b, unsigned prec) {
  if (a.cols() != b.rows()) throw InputError("matrix product dimension mismatch");
  unsigned wide = prec + 8;
  CMatrix r(a.rows(), b.cols(), Complex::zero(prec));
  for (size_t i = 0; i < a.rows(); ++i)
    for (size_t j = 0; j < b.cols(); ++j) {
      Complex acc = Complex::zero(wide);
      for (size_t k = 0; k < a.cols(); ++k)
        acc = Complex::add(acc, Complex::mul(a(i, k), b(k, j), wide), wide);
      r(i, j) = Complex(acc.re.round_to(prec), acc.im.round_to(prec));
    }
  return r;
}

CMatrix mat_conj_transpose(const CMatrix& a) {
  CMatrix r(a.cols(), a.rows());
  for (size_t i = 0; i < a.rows(); ++i)
    for (size_t j = 0; j < a.cols(); ++j) r(j, i) = a(i, j).conj();
  return r;
}

CVector mat_vec(const CMatrix& a, const CVector& x, unsigned prec) {
  if (a.cols() != x.size()) throw InputError("matrix-vector dimension mismatch");
  unsigned wide = prec + 8;
  CVector r(a.rows());
  for (size_t i = 0; i < a.rows(); ++i) {
    Complex acc = Complex::zero(wide);
    for (size_t k = 0; k < a.cols(); ++k)
      acc = Complex::add(acc, Complex::mul(a(i, k), x[k], wide), wide);
    r[i] = Complex(acc.re.round_to(prec), acc.im.round_to(prec));
  }
  return r;
}

namespace {

// In-place LU with partial pivoting on |entry|^2. Returns the pivot
// permutation and the sign of that permutation; throws on exact zero pivot.
int lu_decompose(CMatrix& a, std::vector<size_t>& perm, unsigned prec) {
  size_t n = a.rows();
  perm.resize(n);
  std::iota(perm.begin(), perm.end(), size_t{0});
  int sign = 1;
  unsigned wide = prec + 8;
  for (size_t k = 0; k < n; ++k) {
    size_t best = k;
    BigFloat best_mag = a(perm[k], k).norm2(wide);
    for (size_t i = k + 1; i < n; ++i) {
      BigFloat mag = a(perm[i], k).norm2(wide);
      if (mag > best_mag) {
        best = i;
        best_mag = mag;
      }
    }
    if (best_mag.is_zero()) throw SingularJacobian("zero pivot in LU factorization");
    if (best != k) {
      std::swap(perm[k], perm[best]);
      sign = -sign;
    }
    const Complex piv = a(perm[k], k);
    for (size_t i = k + 1; i < n; ++i) {
      Complex f = Complex::div(a(perm[i], k), piv, wide);
      a(perm[i], k) = f;
      for (size_t j = k + 1; j < n; ++j)
        a(perm[i], j) = Complex::sub(a(perm[i], j), Complex::mul(f, a(perm[k], j), wide), wide);
    }
  }
  return sign;
}

}  // namespace

CVector lu_solve(const CMatrix& a, const CVector& b, unsigned prec) {
  if (a.rows() != a.cols() || a.rows() != b.size())
    throw InputError("lu_solve expects a square system");
  size_t n = a.rows();
  unsigned wide = prec + 8;
  CMatrix lu = a;
  std::vector<size_t> perm;
  lu_decompose(lu, perm, prec);
  CVector y(n);
  for (size_t i = 0; i < n; ++i) {
    Complex acc = b[perm[i]];
    for (size_t j = 0; j < i; ++j)
      acc = Complex::sub(acc, Complex::mul(lu(perm[i], j), y[j], wide), wide);
    y[i] = acc;
  }
  CVector x(n);
  for (size_t ii = n; ii-- > 0;) {
    Complex acc = y[ii];
    for (size_t j = ii + 1; j < n; ++j)
      acc = Complex::sub(acc, Complex::mul(lu(perm[ii], j), x[j], wide), wide);
    x[ii] = Complex::div(acc, lu(perm[ii], ii), prec);
  }
  return x;
}

Complex determinant(const CMatrix& a, unsigned prec) {
  if (a.rows() != a.cols()) throw InputError("determinant expects a square matrix");
  unsigned wide = prec + 8;
  CMatrix lu = a;
  std::vector<size_t> perm;
  int sign;
  try {
    sign = lu_decompose(lu, perm, prec);
  } catch (const SingularJacobian&) {
    return Complex::zero(prec);
  }
  Complex det = Complex::one(wide);
  for (size_t k = 0; k < a.rows(); ++k)
    det = Complex::mul(det, lu(perm[k], k), wide);
  if (sign < 0) det = det.neg();
  return Complex(det.re.round_to(prec), det.im.round_to(prec));
}

EigenResult hermitian_eigen(const CMatrix& a_in, unsigned prec) {
  if (a_in.rows() != a_in.cols()) throw InputError("eigensolver expects a square matrix");
  size_t n = a_in.rows();
  unsigned w = prec + 16;
  const BigFloat half = BigFloat::from_rational(Rational(1, 2), w);
  const BigFloat one = BigFloat::from_int(1, w);

  // Symmetrize: A <- (A + A^H)/2 with a real diagonal.
  CMatrix A(n, n, Complex::zero(w));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) {
      Complex s = Complex::add(a_in(i, j), a_in(j, i).conj(), w);
      A(i, j) = Complex::scale(s, half, w);
    }
  for (size_t i = 0; i < n; ++i) A(i, i) = Complex(A(i, i).re, BigFloat::zero(w));

  CMatrix V(n, n, Complex::zero(w));
  for (size_t i = 0; i < n; ++i) V(i, i) = Complex::one(w);

  if (n > 1) {
    BigFloat frob2 = BigFloat::zero(w);
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j)
        frob2 = BigFloat::add(frob2, A(i, j).norm2(w), w);
    // Stop once every off-diagonal entry is this small (squared scale).
    BigFloat stop2 = frob2.ldexp(BigInt(-2) * (static_cast<long>(prec) - 4));

    for (int sweep = 0; sweep < 64; ++sweep) {
      bool rotated = false;
      for (size_t p = 0; p < n; ++p)
        for (size_t q = p + 1; q < n; ++q) {
          Complex gamma = A(p, q);
          BigFloat g2 = gamma.norm2(w);
          if (g2.is_zero() || g2 <= stop2) continue;
          rotated = true;
          BigFloat g = BigFloat::sqrt(g2, w);
          Complex phi = Complex(BigFloat::div(gamma.re, g, w), BigFloat::div(gamma.im, g, w));
          BigFloat alpha = A(p, p).re;
          BigFloat beta = A(q, q).re;
          BigFloat tau = BigFloat::div(BigFloat::sub(beta, alpha, w), g.ldexp(BigInt(1)), w);
          BigFloat root = BigFloat::sqrt(BigFloat::add(one, BigFloat::mul(tau, tau, w), w), w);
          BigFloat t = BigFloat::div(one, BigFloat::add(tau.abs(), root, w), w);
          if (tau.sign() < 0) t = t.neg();
          BigFloat c = BigFloat::div(one, BigFloat::sqrt(BigFloat::add(one, BigFloat::mul(t, t, w), w), w), w);
          BigFloat s = BigFloat::mul(t, c, w);

          // Columns p,q:  col_p <- c*col_p - s*conj(phi)*col_q,
          //               col_q <- s*col_p + c*conj(phi)*col_q.
          Complex phic = phi.conj();
          auto col_update = [&](CMatrix& M) {
            for (size_t k = 0; k < M.rows(); ++k) {
              Complex mp = M(k, p);
              Complex mq = Complex::mul(M(k, q), phic, w);
              M(k, p) = Complex::sub(Complex::scale(mp, c, w), Complex::scale(mq, s, w), w);
              M(k, q) = Complex::add(Complex::scale(mp, s, w), Complex::scale(mq, c, w), w);
            }
          };
          col_update(A);
          col_update(V);
          // Rows p,q of A get the conjugate-transposed update.
          for (size_t k = 0; k < n; ++k) {
            Complex rp = A(p, k);
            Complex rq = Complex::mul(A(q, k), phi, w);
            A(p, k) = Complex::sub(Complex::scale(rp, c, w), Complex::scale(rq, s, w), w);
            A(q, k) = Complex::add(Complex::scale(rp, s, w), Complex::scale(rq, c, w), w);
          }
          A(p, q) = Complex::zero(w);
          A(q, p) = Complex::zero(w);
          A(p, p) = Complex(A(p, p).re, BigFloat::zero(w));
          A(q, q) = Complex(A(q, q).re, BigFloat::zero(w));
        }
      if (!rotated) break;
    }
  }

  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](size_t i, size_t j) {
    return A(i, i).re < A(j, j).re;
  });
  EigenResult out;
  out.values.reserve(n);
  out.vectors = CMatrix(n, n, Complex::zero(prec));
  for (size_t c = 0; c < n; ++c) {
    out.values.push_back(A(order[c], order[c]).re.round_to(prec));
    for (size_t r = 0; r < n; ++r) {
      Complex v = V(r, order[c]);
      out.vectors(r, c) = Complex(v.re.round_to(prec), v.im.round_to(prec));
    }
  }
  return out;
}

std::vector<BigFloat> singular_values(const CMatrix& a, unsigned prec) {
  unsigned w = prec + 16;
  CMatrix at = mat_conj_transpose(a);
  CMatrix gram = (a.rows() <= a.cols()) ? mat_mul(a, at, w) : mat_mul(at, a, w);
  EigenResult eig = hermitian_eigen(gram, w);
  std::vector<BigFloat> sv;
  sv.reserve(eig.values.size());
  for (size_t i = eig.values.size(); i-- > 0;) {
    BigFloat lam = eig.values[i];
    if (lam.sign() < 0) lam = BigFloat::zero(w);
    sv.push_back(BigFloat::sqrt(lam, prec));
  }
  return sv;
}

CMatrix kernel_basis(const CMatrix& a, size_t dim, unsigned prec) {
  unsigned w = prec + 16;
  CMatrix gram = mat_mul(mat_conj_transpose(a), a, w);
  EigenResult eig = hermitian_eigen(gram, w);
  if (dim > gram.rows()) throw InputError("kernel dimension exceeds matrix size");
  CMatrix basis(gram.rows(), dim, Complex::zero(prec));
  for (size_t c = 0; c < dim; ++c)
    for (size_t r = 0; r < gram.rows(); ++r) basis(r, c) = eig.vectors(r, c);
  return basis;
}

}  // namespace liosolve
