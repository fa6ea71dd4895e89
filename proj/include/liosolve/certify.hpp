#pragma once

// Certification of candidate zeros of the parametrized polynomial map
// F_z: C^n x C^n -> C^n. A zero is regular when the n x 2n Jacobian has
// numerical rank n; balanced when additionally the x-coordinates are
// nonzero and pairwise distinct and some complementary partition (I, J)
// of {1..n} has a nonsingular minor d(F)/d(x_I, y_J); well balanced when
// on top of that the tangent space is not trapped inside any hyperplane
// x_i = c. Also hosts the inverse-adjoining augmentation and the degree
// threshold formulas.

#include <optional>
#include <vector>

#include "liosolve/bigfloat.hpp"
#include "liosolve/complex.hpp"
#include "liosolve/linalg.hpp"
#include "liosolve/polynomial.hpp"

namespace liosolve {

struct CertifyTolerances {
  BigFloat residual_tol;      // point must satisfy ||F(point)|| <= this
  BigFloat rank_rel_tol;      // sigma_n/sigma_1 above this means full rank
  BigFloat det_tol;           // absolute floor for a witness determinant
  BigFloat distinctness_tol;  // |x_i| and |x_i - x_j| must exceed this
  BigFloat tangent_tol;       // per-coordinate kernel mass must exceed this

  // residual_tol 2^-120, distinctness_tol 2^(-prec/2), everything else
  // 2^(-prec/4).
  static CertifyTolerances defaults(unsigned prec);
};

struct WitnessPartition {
  std::vector<size_t> I;  // x-block indices, 0-based, ascending
  std::vector<size_t> J;  // y-block indices, 0-based, ascending
  BigFloat det_magnitude;
};

struct ZeroCertificate {
  CVector point;  // (x_1..x_n, y_1..y_n)
  CVector z;
  BigFloat residual_norm;
  size_t jacobian_rank = 0;
  BigFloat sigma_min;  // smallest singular value of the n x 2n Jacobian
  BigFloat sigma_max;  // largest
  std::optional<WitnessPartition> witness;
  bool regular = false;
  bool balanced = false;
  bool well_balanced = false;
  CertifyTolerances tolerances;
};

// Checks the residual gate (NotAZero above residual_tol) and classifies the
// numerical rank of the Jacobian through its singular value ratio. A ratio
// inside [rank_rel_tol/10, 10*rank_rel_tol] would flip under a small
// precision change, so it raises PrecisionExhausted instead of guessing.
ZeroCertificate certify_regular(const PolynomialMap& f, const CVector& z,
                                const CVector& point,
                                const CertifyTolerances& tol, unsigned prec);

// Enumerates all 2^n complementary partitions I, J of {1..n} and returns
// the one maximizing |det dF/d(x_I, y_J)| when that maximum clears det_tol;
// nullopt when every minor is below it. Ties go to the lexicographically
// smallest I, so the result does not depend on enumeration order. Throws
// DistinctnessViolated when some |x_i| or |x_i - x_j| is at or below
// distinctness_tol.
std::optional<WitnessPartition> find_balanced_witness(
    const PolynomialMap& f, const CVector& z, const CVector& point,
    const CertifyTolerances& tol, unsigned prec);

// Full pipeline: regular, then balanced via witness search, then the
// tangent-space condition. The kernel of the Jacobian has dimension n at a
// regular zero; the zero is well balanced iff for every i the x_i-coordinate
// functional does not vanish on it, which for an orthonormal kernel basis
// means the i-th x row of the basis matrix has norm above tangent_tol.
ZeroCertificate certify_well_balanced(const PolynomialMap& f, const CVector& z,
                                      const CVector& point,
                                      const CertifyTolerances& tol,
                                      unsigned prec);

// G = F followed by f_{n+1} = P(x_I, y_J) * y_{n+1} - 1 in n+1 variable
// pairs. P is given in the same (n, n, r) term layout as components of F and
// may only touch x_i for i in I and y_j for j in J. A zero of F where P is
// nonzero extends to a zero of G via y_{n+1} = 1/P, x_{n+1} arbitrary, and
// the Jacobian picks up a block-diagonal structure that keeps it balanced.
PolynomialMap augment_for_inverse(const PolynomialMap& f,
                                  const std::vector<Term>& p,
                                  const std::vector<size_t>& I,
                                  const std::vector<size_t>& J);

struct DegreeBounds {
  BigInt inductive;   // n(nr + n + r + 1)
  BigInt finiteness;  // n(r + 1) + r
};

// Exact integer evaluation of the two degree thresholds. n >= 1, r >= 0.
DegreeBounds degree_bounds(unsigned n, unsigned r);

}  // namespace liosolve
