#include <doctest.h>

#include <utility>
#include <vector>

#include "liosolve/errors.hpp"
#include "liosolve/tracker.hpp"

using namespace liosolve;

namespace {

Term term(Rational c, std::vector<unsigned> xe, std::vector<unsigned> ye,
          std::vector<unsigned> ze = {}) {
  return Term{GaussianRational{std::move(c), Rational(0)}, std::move(xe), std::move(ye),
              std::move(ze)};
}

Complex creal(const Rational& q, unsigned prec = 256) {
  return Complex(BigFloat::from_rational(q, prec), BigFloat::zero(prec));
}

LiouvilleSequence tower() {
  return LiouvilleSequence::make(LiouvilleSequence::Kind::DefaultTower);
}

// y1 - 1
PolynomialMap unit_target() {
  return PolynomialMap::make(1, 0,
                             {{term(Rational(1), {0}, {1}), term(Rational(-1), {0}, {0})}});
}

// y1 - x1^2
PolynomialMap parabola() {
  return PolynomialMap::make(1, 0,
                             {{term(Rational(1), {0}, {1}), term(Rational(-1), {2}, {0})}});
}

// (y1 - x2, y2 - x1 - 1)
PolynomialMap swap_shift() {
  return PolynomialMap::make(
      2, 0,
      {{term(Rational(1), {0, 0}, {1, 0}), term(Rational(-1), {0, 1}, {0, 0})},
       {term(Rational(1), {0, 0}, {0, 1}), term(Rational(-1), {1, 0}, {0, 0}),
        term(Rational(-1), {0, 0}, {0, 0})}});
}

// |a - b| < 2^e, with exact agreement allowed (exponent() throws on zero).
bool within_pow2(const BigFloat& a, const BigFloat& b, long e) {
  BigFloat d = (a - b).abs();
  return d.is_zero() || d.exponent() < BigInt(e);
}

// Newton iteration on a univariate polynomial with the coefficients given
// directly, written against raw BigFloat ops so tracker output is checked
// against something that shares none of its code path.
BigFloat poly_newton(const std::vector<BigFloat>& c, const BigFloat& x0, unsigned prec,
                     int iters) {
  BigFloat x = x0;
  for (int k = 0; k < iters; ++k) {
    BigFloat p = BigFloat::zero(prec);
    BigFloat dp = BigFloat::zero(prec);
    for (size_t i = c.size(); i-- > 0;) {
      dp = BigFloat::add(BigFloat::mul(dp, x, prec), p, prec);
      p = BigFloat::add(BigFloat::mul(p, x, prec), c[i], prec);
    }
    x = BigFloat::sub(x, BigFloat::div(p, dp, prec), prec);
  }
  return x;
}

// H_6 summed from the frozen tower magnitudes, for the fixed point oracle.
BigFloat h6(const BigFloat& x, unsigned prec) {
  static const long g[6] = {1, 1, 4, 108, 27648, 86400000};
  BigFloat acc = BigFloat::zero(prec);
  BigFloat p = BigFloat::from_int(1, prec);
  for (int i = 0; i < 6; ++i) {
    p = BigFloat::mul(p, x, prec);
    acc = BigFloat::add(acc, p.ldexp(BigInt(-g[i])), prec);
  }
  return acc;
}

// Alternating fixed point x2 <- H6(x1), x1 <- H6(x2) - 1; contracts by about
// 0.15 per cycle from the linear-stage root, so 240 cycles saturate 512 bits.
std::pair<BigFloat, BigFloat> swap_fixed_point(unsigned prec, int cycles) {
  BigFloat x1 = BigFloat::from_rational(Rational(-4, 3), prec);
  BigFloat x2 = BigFloat::from_rational(Rational(-2, 3), prec);
  for (int k = 0; k < cycles; ++k) {
    x2 = h6(x1, prec);
    x1 = BigFloat::sub(h6(x2, prec), BigFloat::from_int(1, prec), prec);
  }
  return {x1, x2};
}

}  // namespace

TEST_CASE("tracker config defaults are coherent and validated") {
  TrackerConfig cfg = TrackerConfig::defaults(256);
  CHECK_NOTHROW(cfg.validate());
  CHECK(cfg.newton_tol == BigFloat::pow2(BigInt(-192), 64));
  CHECK(cfg.residual_tol == BigFloat::pow2(BigInt(-120), 64));
  CHECK(cfg.distinctness_tol == BigFloat::pow2(BigInt(-128), 64));

  // low precision pulls the residual target up to stay reachable
  TrackerConfig low = TrackerConfig::defaults(64);
  CHECK_NOTHROW(low.validate());
  CHECK(low.residual_tol == BigFloat::pow2(BigInt(-40), 64));
  CHECK(low.newton_tol == BigFloat::pow2(BigInt(-48), 64));

  TrackerConfig bad = TrackerConfig::defaults(256);
  bad.residual_tol = BigFloat::pow2(BigInt(-200), 64);
  CHECK_THROWS_AS(bad.validate(), InputError);

  bad = TrackerConfig::defaults(256);
  bad.d_start = 9;
  CHECK_THROWS_AS(bad.validate(), InputError);

  bad = TrackerConfig::defaults(256);
  bad.precision_bits = 32;
  CHECK_THROWS_AS(bad.validate(), InputError);

  bad = TrackerConfig::defaults(256);
  bad.r_max = BigFloat::zero(64);
  CHECK_THROWS_AS(bad.validate(), InputError);
}

TEST_CASE("newton correction lands on the degree two root") {
  LiouvilleSequence seq = tower();
  TrackerConfig cfg = TrackerConfig::defaults(256);
  // x/2 + x^2/2 = 1 factors as (x - 1)(x + 2) = 0; track the root at 1
  ComposedSystem sys(unit_target(), seq, {}, 2, Complex::zero(256));

  NewtonOutcome o = newton_correct(sys, {creal(Rational(11, 10))}, cfg);
  CHECK(o.precision_used == 256);
  CHECK(o.iters <= 10);
  CHECK(o.residual <= cfg.newton_tol);
  CHECK(within_pow2(o.x[0].re, BigFloat::from_int(1, 256), -185));
  CHECK(o.x[0].im.is_zero());

  // starting on the root is a one-iteration no-op
  NewtonOutcome fixed = newton_correct(sys, {creal(Rational(1))}, cfg);
  CHECK(fixed.iters == 1);
  CHECK(fixed.residual.is_zero());
  CHECK(BigFloat::compare(fixed.x[0].re, BigFloat::from_int(1, 256)) == 0);
}

TEST_CASE("newton correction agrees with an independent univariate oracle") {
  LiouvilleSequence seq = tower();
  TrackerConfig cfg = TrackerConfig::defaults(256);
  ComposedSystem sys(unit_target(), seq, {}, 3, Complex::zero(256));

  NewtonOutcome o = newton_correct(sys, {creal(Rational(1))}, cfg);

  // root of x/2 + x^2/2 + x^3/16 - 1 near 0.963, found by a standalone
  // Horner-and-divide loop
  std::vector<BigFloat> c = {BigFloat::from_int(-1, 320), BigFloat::pow2(BigInt(-1), 320),
                             BigFloat::pow2(BigInt(-1), 320), BigFloat::pow2(BigInt(-4), 320)};
  BigFloat oracle = poly_newton(c, BigFloat::from_rational(Rational(24, 25), 320), 320, 60);
  CHECK(within_pow2(o.x[0].re, oracle, -180));
  CHECK(o.x[0].im.is_zero());
}

TEST_CASE("newton refuses a double root as singular") {
  LiouvilleSequence seq = tower();
  TrackerConfig cfg = TrackerConfig::defaults(256);
  // y1^2 composes to (x/2)^2 at d = 1: a double root at the origin
  PolynomialMap sq = PolynomialMap::make(1, 0, {{term(Rational(1), {0}, {2})}});
  ComposedSystem sys(sq, seq, {}, 1, Complex::zero(256));

  CVector start = {creal(Rational(BigInt(1), BigInt(1) << 140))};
  CHECK_THROWS_AS(newton_correct(sys, start, cfg), SingularJacobian);
}

TEST_CASE("newton gives up when the iteration budget is too small") {
  LiouvilleSequence seq = tower();
  TrackerConfig cfg = TrackerConfig::defaults(256);
  cfg.max_newton_iters = 3;
  ComposedSystem sys(unit_target(), seq, {}, 2, Complex::zero(256));
  // from 100 the steps halve the distance; three of them are nowhere near
  CHECK_THROWS_AS(newton_correct(sys, {creal(Rational(100))}, cfg), NoConvergence);
}

TEST_CASE("newton stalled on evaluation noise escalates precision once") {
  LiouvilleSequence seq = tower();
  TrackerConfig cfg = TrackerConfig::defaults(64);
  // 2^20 * (y1 - 2): at 64 bits the evaluation noise floor sits around
  // 2^-42, far above newton_tol = 2^-48, so the first attempt stalls inside
  // the escalation band; the root (sqrt(17) - 1)/2 is irrational, so no
  // iterate can terminate the stall by exact cancellation
  PolynomialMap f = PolynomialMap::make(
      1, 0,
      {{term(Rational(BigInt(1) << 20), {0}, {1}), term(Rational(-(BigInt(1) << 21)), {0}, {0})}});
  ComposedSystem sys(f, seq, {}, 2, Complex::zero(64));

  NewtonOutcome o = newton_correct(sys, {creal(Rational(3, 2), 64)}, cfg);
  CHECK(o.precision_used == 128);
  CHECK(o.residual <= cfg.newton_tol);

  BigFloat oracle = BigFloat::div(
      BigFloat::sub(BigFloat::sqrt(BigFloat::from_int(17, 192), 192), BigFloat::from_int(1, 192), 192),
      BigFloat::from_int(2, 192), 192);
  CHECK(within_pow2(o.x[0].re, oracle, -60));
}

TEST_CASE("start search lands exactly on a linear root") {
  LiouvilleSequence seq = tower();
  TrackerConfig cfg = TrackerConfig::defaults(256);

  CVector a = find_start_root(unit_target(), {}, seq, 1, cfg);
  REQUIRE(a.size() == 1);
  CHECK(BigFloat::compare(a[0].re, BigFloat::from_int(2, 256)) == 0);
  CHECK(a[0].im.is_zero());

  // bitwise reproducible
  CVector b = find_start_root(unit_target(), {}, seq, 1, cfg);
  CHECK(a[0] == b[0]);
}

TEST_CASE("start search rejects the origin root of the parabola") {
  LiouvilleSequence seq = tower();
  TrackerConfig cfg = TrackerConfig::defaults(256);

  // x/2 - x^2 has roots 0 and 1/2; the origin fails the distinctness filter
  CVector a = find_start_root(parabola(), {}, seq, 1, cfg);
  REQUIRE(a.size() == 1);
  CHECK(within_pow2(a[0].re, BigFloat::from_rational(Rational(1, 2), 256), -150));
  CHECK(a[0].re > BigFloat::from_rational(Rational(2, 5), 256));
}

TEST_CASE("start search solves the linear swap shift stage") {
  LiouvilleSequence seq = tower();
  TrackerConfig cfg = TrackerConfig::defaults(256);

  CVector a = find_start_root(swap_shift(), {}, seq, 1, cfg);
  REQUIRE(a.size() == 2);
  CHECK(within_pow2(a[0].re, BigFloat::from_rational(Rational(-4, 3), 256), -240));
  CHECK(within_pow2(a[1].re, BigFloat::from_rational(Rational(-2, 3), 256), -240));
  CHECK(a[0].im.is_zero());
  CHECK(a[1].im.is_zero());
}

TEST_CASE("start search exhausts its budget when every root lies outside the ball") {
  LiouvilleSequence seq = tower();
  TrackerConfig cfg = TrackerConfig::defaults(256);
  cfg.r_max = BigFloat::from_int(3, 64);
  cfg.multistart_budget = 60;

  // H_d(x) = 10 keeps its roots outside |x| <= 3 for d = 1, 2, 3: the
  // truncations give 20, {4, -5}, and a trio of magnitude at least 3.4
  PolynomialMap f = PolynomialMap::make(
      1, 0, {{term(Rational(1), {0}, {1}), term(Rational(-10), {0}, {0})}});
  for (size_t d0 : {size_t(1), size_t(2), size_t(3)})
    CHECK_THROWS_AS(find_start_root(f, {}, seq, d0, cfg), StartNotFound);
}

TEST_CASE("epsilon tracking follows the quadratic path to its endpoint") {
  LiouvilleSequence seq = tower();
  TrackerConfig cfg = TrackerConfig::defaults(256);
  const Complex eps_target = coefficient(seq, 2, 256);

  // along x/2 + eps*x^2 = 1 the root slides from 2 down to 1
  TrackSegment seg = track_epsilon(unit_target(), {}, seq, 1, {creal(Rational(2))},
                                   eps_target, cfg);
  REQUIRE(!seg.states.empty());
  CHECK(within_pow2(seg.x[0].re, BigFloat::from_int(1, 256), -180));
  CHECK(seg.states.back().eps == eps_target);
  for (const PathState& st : seg.states) {
    CHECK(st.d == 1);
    CHECK(st.residual <= cfg.residual_tol);
    CHECK(st.norm_x <= cfg.r_max);
  }

  // the endpoint is bit for bit a point on the next truncation level
  ComposedSystem next(unit_target(), seq, {}, 2, Complex::zero(256));
  CHECK(vec_norm(compose_eval(next, seg.x, 256), 256) <= cfg.newton_tol);
}

TEST_CASE("epsilon tracking with a zero target is the identity") {
  LiouvilleSequence seq = tower();
  TrackerConfig cfg = TrackerConfig::defaults(256);
  CVector x0 = {creal(Rational(2))};
  TrackSegment seg = track_epsilon(unit_target(), {}, seq, 1, x0, Complex::zero(256), cfg);
  CHECK(seg.states.empty());
  REQUIRE(seg.x.size() == 1);
  CHECK(seg.x[0] == x0[0]);
}

TEST_CASE("a path that leaves the working ball throws") {
  LiouvilleSequence seq = tower();
  TrackerConfig cfg = TrackerConfig::defaults(256);
  cfg.r_max = BigFloat::from_rational(Rational(21, 20), 64);

  // from the root at 1 of x/2 - x^2/2, the branch [1 - sqrt(1-8eps)]/(4eps)
  // climbs to 4*(1 - sqrt(1/2)) = 1.17 at eps = 1/16, outside a 1.05 ball
  const Complex eps_target = coefficient(seq, 3, 256);
  CHECK_THROWS_AS(
      track_epsilon(parabola(), {}, seq, 2, {creal(Rational(1))}, eps_target, cfg),
      PathEscapedBall);
}

TEST_CASE("substep halving gives up against a crippled corrector") {
  LiouvilleSequence seq = tower();
  TrackerConfig cfg = TrackerConfig::defaults(256);
  cfg.max_newton_iters = 1;  // one iteration can never reach 2^-192 from afar
  cfg.max_substeps_per_epsilon = 12;

  const Complex eps_target = coefficient(seq, 3, 256);
  CHECK_THROWS_AS(
      track_epsilon(unit_target(), {}, seq, 2, {creal(Rational(1))}, eps_target, cfg),
      SubstepLimit);
}

TEST_CASE("solve stops by the tail rule and matches the truncated series root") {
  LiouvilleSequence seq = tower();
  TrackerConfig cfg = TrackerConfig::defaults(256);

  LimitRoot lim = solve(unit_target(), {}, seq, cfg);
  CHECK(lim.final_d == 4);
  CHECK(lim.stopped_by_tail_rule);
  CHECK(lim.total_residual_bound <= BigFloat::pow2(BigInt(-100), 64));
  CHECK(lim.residual_truncated <= BigFloat::pow2(BigInt(-185), 64));
  CHECK(lim.tail_term <= BigFloat::pow2(BigInt(-27000), 64));

  // independent root of x/2 + x^2/2 + x^3/16 + x^4/2^108 = 1
  std::vector<BigFloat> c = {BigFloat::from_int(-1, 320), BigFloat::pow2(BigInt(-1), 320),
                             BigFloat::pow2(BigInt(-1), 320), BigFloat::pow2(BigInt(-4), 320),
                             BigFloat::pow2(BigInt(-108), 320)};
  BigFloat oracle = poly_newton(c, BigFloat::from_rational(Rational(24, 25), 320), 320, 60);
  CHECK(within_pow2(lim.a[0].re, oracle, -100));
  CHECK(lim.a[0].im.is_zero());

  // stage shifts: 2 -> 1 -> 26/27-ish -> 4th stage moves by ~2^-109
  REQUIRE(lim.cauchy_history.size() == 3);
  CHECK(lim.cauchy_history[1] < lim.cauchy_history[0]);
  CHECK(lim.cauchy_history[2] < lim.cauchy_history[1]);
  CHECK(lim.cauchy_history[2] <= BigFloat::pow2(BigInt(-102), 64));

  REQUIRE(!lim.trace.empty());
  CHECK(lim.trace.front().d == 1);
  CHECK(lim.trace.front().eps.is_zero());
  CHECK(lim.trace.back().d == 4);
  for (const PathState& st : lim.trace) CHECK(st.residual <= cfg.residual_tol);

  // end to end determinism
  LimitRoot again = solve(unit_target(), {}, seq, cfg);
  CHECK(again.a[0] == lim.a[0]);
  CHECK(BigFloat::compare(again.total_residual_bound, lim.total_residual_bound) == 0);
}

TEST_CASE("solve pins the swap shift pair against the fixed point oracle") {
  LiouvilleSequence seq = tower();
  TrackerConfig cfg = TrackerConfig::defaults(256);

  LimitRoot lim = solve(swap_shift(), {}, seq, cfg);
  CHECK(lim.final_d == 4);
  CHECK(lim.stopped_by_tail_rule);
  CHECK(lim.total_residual_bound <= BigFloat::pow2(BigInt(-100), 64));

  auto [o1, o2] = swap_fixed_point(512, 240);
  CHECK(within_pow2(lim.a[0].re, o1, -80));
  CHECK(within_pow2(lim.a[1].re, o2, -80));
  CHECK(lim.a[0].im.is_zero());
  CHECK(lim.a[1].im.is_zero());

  // coordinates stay distinct and away from zero, as the start filter promised
  BigFloat gap = Complex::sub(lim.a[0], lim.a[1], 256).abs(256);
  CHECK(gap > BigFloat::from_rational(Rational(1, 2), 64));
  CHECK(lim.a[0].abs(256) > BigFloat::from_rational(Rational(1, 2), 64));
  CHECK(lim.a[1].abs(256) > BigFloat::from_rational(Rational(1, 100), 64));
}

TEST_CASE("solve with a fixed start degree skips the auto scan") {
  LiouvilleSequence seq = tower();
  TrackerConfig cfg = TrackerConfig::defaults(256);
  cfg.d_start = 2;

  LimitRoot lim = solve(unit_target(), {}, seq, cfg);
  CHECK(lim.final_d == 4);
  CHECK(lim.trace.front().d == 2);
  CHECK(lim.cauchy_history.size() == 2);
}

TEST_CASE("solve refuses tails it cannot certify") {
  // user-supplied sequences have no growth certificate beyond their list
  LiouvilleSequence user =
      LiouvilleSequence::make(LiouvilleSequence::Kind::UserSupplied, {BigInt(2), BigInt(16)});
  TrackerConfig cfg = TrackerConfig::defaults(256);
  CHECK_THROWS_AS(solve(unit_target(), {}, user, cfg), GrowthUnverified);
}

TEST_CASE("tracker entry points validate dimensions") {
  LiouvilleSequence seq = tower();
  TrackerConfig cfg = TrackerConfig::defaults(256);
  CHECK_THROWS_AS(solve(unit_target(), {creal(Rational(1))}, seq, cfg), InputError);
  CHECK_THROWS_AS(track_epsilon(unit_target(), {}, seq, 1,
                                {creal(Rational(1)), creal(Rational(2))},
                                coefficient(seq, 2, 256), cfg),
                  InputError);
  CHECK_THROWS_AS(find_start_root(unit_target(), {creal(Rational(1))}, seq, 1, cfg),
                  InputError);
}
