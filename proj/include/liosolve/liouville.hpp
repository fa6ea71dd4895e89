#pragma once

// Liouville coefficient sequences and the analytic side of the solver:
// partial sums H_d, perturbed sums H_{d,eps}, modified partial sums, their
// derivatives, the growth audit, and certified tail bounds.
//
// Magnitudes are bookkept as exact log2 big integers. The default tower
// a_1 = 2, a_{i+1} = a_i^(i^i) reaches log2|a_6| = 86,400,000 and
// log2|a_7| ~ 4.03e12, so values are never materialized as integers;
// only the reciprocals 1/a_i enter evaluations, and for power-of-two
// sequences those are exact BigFloats at any precision.

#include <memory>
#include <optional>
#include <vector>

#include "liosolve/complex.hpp"

namespace liosolve {

class LiouvilleSequence {
 public:
  enum class Kind { DefaultTower, FactorialPow2, UserSupplied };

  // Generated kinds ignore `values`; user_supplied requires a non-empty list
  // of non-zero integers.
  static LiouvilleSequence make(Kind kind, const std::vector<BigInt>& values = {});

  Kind kind() const;
  // Largest addressable index: the list length for user sequences, a large
  // practical ceiling for generated ones.
  size_t max_index() const;

  int sign(size_t i) const;
  bool is_pow2(size_t i) const;
  // Exact log2|a_i| for power-of-two terms, floor(log2|a_i|) otherwise.
  BigInt log2_magnitude(size_t i) const;
  // Materialized a_i; only available for user sequences.
  const BigInt& user_value(size_t i) const;

  // 1/a_i, correctly rounded (exact for power-of-two terms).
  BigFloat coefficient_real(size_t i, unsigned prec,
                            RoundMode mode = RoundMode::Nearest) const;
  // Exact 1/a_i as a rational. Refuses once log2|a_i| passes 2^25 (the
  // denominator of 1/a_6 alone would occupy ~11 MB); this is what limits the
  // exact evaluation mode to d <= 4 endpoint identities on the default tower.
  Rational coefficient_exact(size_t i) const;

 private:
  struct Impl;
  explicit LiouvilleSequence(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

// Per-index growth audit of |a_{i+1}| > |a_i|^(i^l).
struct AuditReport {
  std::vector<bool> ok;        // ok[i-1] is the verdict for index i
  size_t first_all_true = 0;   // least i with ok true from i through i_max; 0 if none
};

AuditReport audit_growth(const LiouvilleSequence& seq, unsigned l, size_t i_max);

// 1/a_i as a complex value (imaginary part zero).
Complex coefficient(const LiouvilleSequence& seq, size_t i, unsigned prec);

// H_{d,eps}(x) = sum_{i=1}^d x^i/a_i + eps*x^(d+1), Horner from the innermost
// (smallest) coefficient out. With eps = 1/a_{d+1} the operation sequence is
// identical to evaluating H_{d+1}, which makes the homotopy endpoint identity
// hold to the last rounded bit.
Complex eval_partial_sum(const LiouvilleSequence& seq, size_t d, const Complex& eps,
                         const Complex& x, unsigned prec);

// d/dx H_{d,eps}(x) = sum_{i=1}^d i*x^(i-1)/a_i + (d+1)*eps*x^d.
Complex eval_partial_sum_derivative(const LiouvilleSequence& seq, size_t d,
                                    const Complex& eps, const Complex& x, unsigned prec);

// mu_{k}(x) = H_k(x) + x^k*g(x) for a polynomial g given by coefficients
// g[0] + g[1] x + ... (the "modified partial sum" with user-supplied g).
Complex eval_modified_partial_sum(const LiouvilleSequence& seq, size_t k,
                                  const CVector& g, const Complex& x, unsigned prec);

// Exact-rational evaluation mode (test oracle; guarded by coefficient_exact).
GaussianRational eval_partial_sum_exact(const LiouvilleSequence& seq, size_t d,
                                        const GaussianRational& eps,
                                        const GaussianRational& x);
GaussianRational eval_partial_sum_derivative_exact(const LiouvilleSequence& seq, size_t d,
                                                   const GaussianRational& eps,
                                                   const GaussianRational& x);

// Certified upper bound on sup_{|x|<=R} |H(x) - H_d(x)|.
//
// Computes t_i = R^i/|a_i| for i = d..d+m with directed rounding, demands
// t_{i+1} <= t_i/2 across the probe window (including the boundary ratio
// t_{d+1}/t_d), and proves the ratio keeps holding for every i > d+m from
// the sequence recurrence: log2|a_{i+1}| - log2|a_i| is non-decreasing for
// both generated kinds, so checking it against ceil(log2 R) + 1 once at
// i = d+m covers the whole tail. Returns sum_{i=d+1}^{d+m-1} t_i + 2*t_{d+m}
// rounded upward.
//
// Throws RatioTestFailed when a probe ratio exceeds 1/2 (raise d and retry),
// and GrowthUnverified for user sequences, whose growth beyond the supplied
// list cannot be certified.
BigFloat tail_bound(const LiouvilleSequence& seq, size_t d, const BigFloat& R,
                    size_t m, unsigned prec = 128);

}  // namespace liosolve
