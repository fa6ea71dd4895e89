#pragma once

// Degree-by-degree homotopy tracking. Starting from a root of the truncated
// system F(x, H_{d0}(x), z) = 0, each stage deforms eps from 0 to 1/a_{d+1}
// along H_{d,eps}, which lands bit-exactly on H_{d+1}. The run stops once the
// certified series tail is small enough that the truncated root works as a
// root of the full analytic system, up to a reported residual bound.

#include <cstdint>
#include <vector>

#include "liosolve/complex.hpp"
#include "liosolve/liouville.hpp"
#include "liosolve/polynomial.hpp"

namespace liosolve {

struct TrackerConfig {
  unsigned precision_bits = 256;
  size_t d_start = 0;  // 0 means auto: the smallest d <= d_max with a start root
  size_t d_max = 8;
  size_t max_newton_iters = 50;
  size_t max_substeps_per_epsilon = 64;
  size_t multistart_budget = 200;
  std::uint64_t rng_seed = 1;

  // All tolerance fields are exact powers of two (stored at 64 bits).
  BigFloat residual_tol;      // accepted points must stay below this
  BigFloat newton_tol;        // Newton convergence target, <= residual_tol
  BigFloat distinctness_tol;  // start-root coordinate separation filter
  BigFloat r_max;             // working ball radius

  static TrackerConfig defaults(unsigned prec = 256);
  // Throws InputError on incoherent settings (newton_tol > residual_tol,
  // zero radius, d_start > d_max, ...).
  void validate() const;
};

// One accepted point on a homotopy path.
struct PathState {
  size_t d = 0;
  Complex eps;
  CVector x;
  size_t newton_iters = 0;
  BigFloat norm_x;
  BigFloat residual;
};

struct NewtonOutcome {
  CVector x;
  BigFloat residual;
  size_t iters = 0;
  unsigned precision_used = 0;  // > config.precision_bits after an escalation
};

struct TrackSegment {
  CVector x;                      // endpoint, a root at eps = eps_target
  std::vector<PathState> states;  // accepted substeps in order
};

struct LimitRoot {
  CVector a;           // root of the final truncated system
  size_t final_d = 0;  // its truncation degree
  // Measured |F(a, H_d(a), z)| plus a rounding slack, then the certified
  // price of swapping H_d for H, and their sum: the claim is that a zero of
  // the analytic system lies within Newton reach of `a` and the residual of
  // `a` itself is at most total_residual_bound.
  BigFloat residual_truncated;
  BigFloat tail_term;
  BigFloat total_residual_bound;
  // |x_{d+1} - x_d| per completed stage; for an admissible sequence these
  // shrink fast enough to make the limits Cauchy.
  std::vector<BigFloat> cauchy_history;
  bool stopped_by_tail_rule = false;  // false: the d_max ceiling ended the run
  std::vector<PathState> trace;       // start point plus every accepted substep
};

// Damped-free Newton iteration on the square composed system. Succeeds when
// the residual drops below newton_tol and the last step is below
// newton_tol*(1 + |x|); demands superlinear step decay along the way. Throws
// SingularJacobian near rank drops, NoConvergence otherwise. A run that
// stalls on rounding noise (final residual in (newton_tol, sqrt(newton_tol)))
// is retried once at doubled working precision.
NewtonOutcome newton_correct(const ComposedSystem& sys, const CVector& x0,
                             const TrackerConfig& config);

// Multistart Newton from deterministic pseudo-random points in the ball
// |x| <= r_max. Runs the full budget, keeps roots that stay in the ball,
// have a well-conditioned Jacobian, and pass the coordinate distinctness
// filter, then returns the smallest-norm one (ties broken lexicographically).
// Throws StartNotFound when the budget yields nothing.
CVector find_start_root(const PolynomialMap& f, const CVector& z,
                        const LiouvilleSequence& seq, size_t d0,
                        const TrackerConfig& config);

// Tracks the root x of F(x, H_{d,eps}(x), z) from eps = 0 to eps_target via
// Euler prediction along dPhi/deps and Newton correction, with adaptive
// dyadic substeps (eps(t) = t*eps_target stays exact). Accepted points must
// stay inside the ball, else PathEscapedBall; step halving past the substep
// budget raises SubstepLimit (or the corrector's own error when one step
// keeps failing at the minimum width).
TrackSegment track_epsilon(const PolynomialMap& f, const CVector& z,
                           const LiouvilleSequence& seq, size_t d,
                           const CVector& x_at_zero, const Complex& eps_target,
                           const TrackerConfig& config);

// Full pipeline: find a start root, raise the truncation degree stage by
// stage, and stop once L_y * sqrt(n) * tail(d, |a|+1) < residual_tol / 2
// (or at d_max). L_y bounds |dF/dy| over a polydisc that covers both the
// partial sums and the full series on the ball.
LimitRoot solve(const PolynomialMap& f, const CVector& z,
                const LiouvilleSequence& seq, const TrackerConfig& config);

}  // namespace liosolve
