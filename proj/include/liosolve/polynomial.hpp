#pragma once

// Sparse polynomial maps F: C^n x C^n x C^r -> C^n with exact Gaussian
// rational coefficients, their Jacobians, and the composition with partial
// sums that turns G(x, H(x)) = 0 into a square polynomial system in x alone.

#include <vector>

#include "liosolve/complex.hpp"
#include "liosolve/linalg.hpp"
#include "liosolve/liouville.hpp"

namespace liosolve {

struct Term {
  GaussianRational coeff;
  std::vector<unsigned> xe;  // exponents of x_1..x_n
  std::vector<unsigned> ye;  // exponents of y_1..y_n
  std::vector<unsigned> ze;  // exponents of z_1..z_r
};

class PolynomialMap {
 public:
  // Canonicalizes on construction: merges duplicate exponent triples, drops
  // zero coefficients, sorts terms by (total degree, exponent vectors).
  static PolynomialMap make(size_t n, size_t r,
                            std::vector<std::vector<Term>> components);

  size_t n() const { return n_; }
  size_t r() const { return r_; }
  const std::vector<std::vector<Term>>& components() const { return components_; }

  // Partial derivative of component `comp` w.r.t. variable `var`, where
  // var indexes x_1..x_n then y_1..y_n (0-based, var < 2n).
  std::vector<Term> derivative(size_t comp, size_t var) const;

 private:
  size_t n_ = 0, r_ = 0;
  std::vector<std::vector<Term>> components_;
};

// F(x, y, z) with floating parameters; terms are summed smallest magnitude
// first, so exact cancellations on dyadic inputs happen while values are
// still exact.
CVector evaluate(const PolynomialMap& f, const CVector& x, const CVector& y,
                 const CVector& z, unsigned prec);

// n x 2n matrix of partials w.r.t. x_1..x_n, y_1..y_n.
CMatrix jacobian(const PolynomialMap& f, const CVector& x, const CVector& y,
                 const CVector& z, unsigned prec);

// Exact-rational evaluation mode.
GVector evaluate_exact(const PolynomialMap& f, const GVector& x, const GVector& y,
                       const GVector& z);

// F with z pinned, y replaced by H_{d,eps} applied componentwise: the square
// system Phi(x) = F(x, H_{d,eps}(x), z) whose roots the tracker follows.
class ComposedSystem {
 public:
  ComposedSystem(PolynomialMap f, LiouvilleSequence seq, CVector z, size_t d,
                 Complex eps);

  const PolynomialMap& map() const { return f_; }
  const LiouvilleSequence& sequence() const { return seq_; }
  const CVector& z() const { return z_; }
  size_t d() const { return d_; }
  const Complex& eps() const { return eps_; }

  // Same system at a different truncation level or perturbation.
  ComposedSystem with(size_t d, Complex eps) const;

 private:
  PolynomialMap f_;
  LiouvilleSequence seq_;
  CVector z_;
  size_t d_;
  Complex eps_;
};

CVector compose_eval(const ComposedSystem& sys, const CVector& x, unsigned prec);

// Chain rule: J(i,j) = dF_i/dx_j + dF_i/dy_j * H'_{d,eps}(x_j), an n x n matrix.
CMatrix compose_jacobian(const ComposedSystem& sys, const CVector& x, unsigned prec);

// dPhi/deps = (dF/dy) * (x_j^(d+1)): the homotopy velocity term.
CVector compose_eps_derivative(const ComposedSystem& sys, const CVector& x, unsigned prec);

// Exact mode (z must be exact; guarded by coefficient_exact depth limits).
GVector compose_eval_exact(const PolynomialMap& f, const LiouvilleSequence& seq,
                           const GVector& z, size_t d, const GaussianRational& eps,
                           const GVector& x);

}  // namespace liosolve
