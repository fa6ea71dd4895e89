#include <doctest.h>

#include <atomic>
#include <random>
#include <thread>

#include "liosolve/liouville.hpp"

using namespace liosolve;

namespace {

using Kind = LiouvilleSequence::Kind;

Complex creal(const Rational& q, unsigned prec = 256) {
  return Complex(BigFloat::from_rational(q, prec), BigFloat::zero(prec));
}

Complex crand(std::mt19937_64& rng, double radius, unsigned prec = 256) {
  std::uniform_real_distribution<double> dist(-radius, radius);
  return Complex(BigFloat::from_double(dist(rng), prec), BigFloat::from_double(dist(rng), prec));
}

}  // namespace

TEST_CASE("default tower magnitudes follow the exact recurrence") {
  auto seq = LiouvilleSequence::make(Kind::DefaultTower);
  // log2|a_i| for i = 1..7
  const char* expected[] = {"1", "1", "4", "108", "27648", "86400000", "4031078400000"};
  for (size_t i = 1; i <= 7; ++i) CHECK(seq.log2_magnitude(i) == BigInt(expected[i - 1]));
  // a_8, a_9 exceed any fixed-width exponent.
  CHECK(seq.log2_magnitude(8) == BigInt("4031078400000") * BigInt(823543));
  CHECK(seq.log2_magnitude(9) == seq.log2_magnitude(8) * BigInt(16777216));
  CHECK(seq.sign(5) == 1);
  CHECK(seq.is_pow2(5));
}

TEST_CASE("factorial and user sequences") {
  auto fact = LiouvilleSequence::make(Kind::FactorialPow2);
  CHECK(fact.log2_magnitude(1) == 1);
  CHECK(fact.log2_magnitude(4) == 24);
  CHECK(fact.log2_magnitude(6) == 720);

  auto user = LiouvilleSequence::make(Kind::UserSupplied, {BigInt(2), BigInt(4), BigInt(256)});
  CHECK(user.max_index() == 3);
  CHECK(user.log2_magnitude(1) == 1);
  CHECK(user.log2_magnitude(2) == 2);
  CHECK(user.log2_magnitude(3) == 8);

  CHECK_THROWS_AS(LiouvilleSequence::make(Kind::UserSupplied, {BigInt(2), BigInt(0), BigInt(5)}),
                  InvalidSequence);
  CHECK_THROWS_AS(LiouvilleSequence::make(Kind::UserSupplied, {}), InvalidSequence);
  CHECK_THROWS_AS(user.log2_magnitude(4), InvalidIndex);
  CHECK_THROWS_AS(user.log2_magnitude(0), InvalidIndex);

  auto negs = LiouvilleSequence::make(Kind::UserSupplied, {BigInt(-2), BigInt(7)});
  CHECK(negs.sign(1) == -1);
  CHECK(!negs.is_pow2(2));
  CHECK(negs.coefficient_exact(2) == Rational(1, 7));
  CHECK(negs.coefficient_exact(1) == Rational(-1, 2));
}

TEST_CASE("growth audit: frozen verdict tables") {
  auto seq = LiouvilleSequence::make(Kind::DefaultTower);

  // l=1: fails only at i=1 (log2 a_2 = 1 is not > 1).
  AuditReport r1 = audit_growth(seq, 1, 8);
  CHECK(r1.ok == std::vector<bool>{false, true, true, true, true, true, true, true});
  CHECK(r1.first_all_true == 2);

  // l=3: i=3 hits exact equality 108 = 27*4 and fails; passes from 4 on.
  AuditReport r3 = audit_growth(seq, 3, 7);
  CHECK(r3.ok == std::vector<bool>{false, false, false, true, true, true, true});
  CHECK(r3.first_all_true == 4);

  // The window i >= max(3, l+1) is all-true for every l through 5.
  for (unsigned l = 1; l <= 5; ++l) {
    AuditReport r = audit_growth(seq, l, 8);
    size_t from = std::max<size_t>(3, l + 1);
    for (size_t i = from; i <= 8; ++i) CHECK(r.ok[i - 1]);
    CHECK(r.first_all_true == (l == 1 ? 2 : l + 1));
  }

  // 2^(i!) is not admissible: l=2 already fails at i=3 (24 vs 54) and beyond.
  auto fact = LiouvilleSequence::make(Kind::FactorialPow2);
  AuditReport rf = audit_growth(seq, 2, 3);
  CHECK(rf.ok[2]);
  AuditReport rf2 = audit_growth(fact, 2, 8);
  CHECK(!rf2.ok[2]);
  CHECK(rf2.first_all_true == 0);  // still failing at i_max

  // User sequence audited by direct integer powers: 3^(2^2)=81 < 100.
  auto user = LiouvilleSequence::make(Kind::UserSupplied, {BigInt(2), BigInt(3), BigInt(100), BigInt(7)});
  AuditReport ru = audit_growth(user, 2, 3);
  CHECK(ru.ok[0]);   // 3 > 2^1
  CHECK(ru.ok[1]);   // 100 > 3^4 = 81
  CHECK(!ru.ok[2]);  // 7 < 100^9
  CHECK(ru.first_all_true == 0);

  CHECK_THROWS_AS(audit_growth(user, 2, 4), InvalidIndex);
  CHECK_THROWS_AS(audit_growth(seq, 0, 4), InputError);
}

TEST_CASE("coefficients reach astronomical indices without underflow") {
  auto seq = LiouvilleSequence::make(Kind::DefaultTower);
  CHECK(seq.coefficient_real(3, 64) == BigFloat::from_rational(Rational(1, 16), 64));
  CHECK(seq.coefficient_real(4, 64).exponent() == -108);
  CHECK(seq.coefficient_real(6, 64).exponent() == -86400000);
  CHECK(seq.coefficient_real(7, 64).exponent() == BigInt("-4031078400000"));
  CHECK(coefficient(seq, 3, 64).im.is_zero());

  CHECK(seq.coefficient_exact(5) == Rational(1, BigInt(1) << 27648));
  CHECK_THROWS_AS(seq.coefficient_exact(6), ArithmeticError);  // 86.4 Mbit denominator
  CHECK_THROWS_AS(seq.coefficient_real(0, 64), InvalidIndex);
}

TEST_CASE("partial sums match the exact rational oracle") {
  auto seq = LiouvilleSequence::make(Kind::DefaultTower);
  Complex zero = Complex::zero(256);

  CHECK(eval_partial_sum(seq, 1, zero, creal(Rational(2)), 256) == creal(Rational(1)));
  CHECK(eval_partial_sum(seq, 2, zero, creal(Rational(2)), 256) == creal(Rational(3)));
  CHECK(eval_partial_sum(seq, 3, zero, creal(Rational(1)), 256) == creal(Rational(17, 16)));

  // Derivatives: H'_1 = 1/2 everywhere; pinned values at d=2.
  CHECK(eval_partial_sum_derivative(seq, 1, zero, creal(Rational(7)), 256) ==
        creal(Rational(1, 2)));
  CHECK(eval_partial_sum_derivative(seq, 2, zero, creal(Rational(1)), 256) ==
        creal(Rational(3, 2)));
  CHECK(eval_partial_sum_derivative(seq, 2, creal(Rational(1, 16)), creal(Rational(1)), 256) ==
        creal(Rational(27, 16)));

  // Random complex points against the exact evaluator (dyadic inputs, d <= 4:
  // every operation below 256 bits happens to be exact or tested as rounded).
  std::mt19937_64 rng(2024);
  for (int iter = 0; iter < 20; ++iter) {
    size_t d = 1 + (iter % 4);
    Complex x = crand(rng, 1.5);
    GaussianRational gx(x.re.to_rational(), x.im.to_rational());
    GaussianRational exact = eval_partial_sum_exact(seq, d, GaussianRational(0), gx);
    Complex got = eval_partial_sum(seq, d, Complex::zero(320), x, 320);
    Complex want(BigFloat::from_rational(exact.re, 320), BigFloat::from_rational(exact.im, 320));
    BigFloat err = Complex::sub(got, want, 320).abs(64);
    CHECK(err <= BigFloat::pow2(BigInt(-300), 64));
  }
}

TEST_CASE("modified partial sums") {
  auto seq = LiouvilleSequence::make(Kind::DefaultTower);
  // k=0, g=x: the sum is empty and mu = g(x) = x.
  CVector g_x = {Complex::zero(256), Complex::one(256)};
  Complex at = creal(Rational(7, 3));
  CHECK(eval_modified_partial_sum(seq, 0, g_x, at, 256) == creal(Rational(7, 3)));
  // k=1, g=3x at x=2: H_1(2) + 2*6 = 13.
  CVector g_3x = {Complex::zero(256), creal(Rational(3))};
  CHECK(eval_modified_partial_sum(seq, 1, g_3x, creal(Rational(2)), 256) == creal(Rational(13)));
  // k=2, g=0 reduces to H_2.
  CHECK(eval_modified_partial_sum(seq, 2, {}, creal(Rational(2)), 256) == creal(Rational(3)));
}

TEST_CASE("homotopy endpoint identity is bit-exact") {
  auto seq = LiouvilleSequence::make(Kind::DefaultTower);
  std::mt19937_64 rng(31337);
  for (size_t d = 1; d <= 4; ++d) {
    Complex eps = coefficient(seq, d + 1, 256);
    for (int rep = 0; rep < 5; ++rep) {
      Complex x = crand(rng, 2.0);
      Complex lhs = eval_partial_sum(seq, d, eps, x, 256);
      Complex rhs = eval_partial_sum(seq, d + 1, Complex::zero(256), x, 256);
      CHECK(lhs == rhs);  // identical to the last bit
      CHECK(eval_partial_sum_derivative(seq, d, eps, x, 256) ==
            eval_partial_sum_derivative(seq, d + 1, Complex::zero(256), x, 256));
    }
  }
  // Exact-rational mode: the identity is an identity of rationals for d <= 4.
  for (size_t d = 1; d <= 4; ++d) {
    GaussianRational eps(seq.coefficient_exact(d + 1), Rational(0));
    GaussianRational x(Rational(5, 7), Rational(-2, 3));
    CHECK(eval_partial_sum_exact(seq, d, eps, x) ==
          eval_partial_sum_exact(seq, d + 1, GaussianRational(0), x));
  }
}

TEST_CASE("derivative agrees with central differences at O(h^2)") {
  auto seq = LiouvilleSequence::make(Kind::DefaultTower);
  std::mt19937_64 rng(555);
  unsigned prec = 320;
  for (int pt = 0; pt < 10; ++pt) {
    Complex x = crand(rng, 2.0, prec);
    Complex eps = creal(Rational(1, 64), prec);
    Complex deriv = eval_partial_sum_derivative(seq, 3, eps, x, prec);
    BigFloat prev_err;
    bool first = true;
    // h = 2^-10, 2^-20, 2^-30, 2^-40: four decades, error must fall ~h^2.
    for (long k = 10; k <= 40; k += 10) {
      Complex h(BigFloat::pow2(BigInt(-k), prec), BigFloat::zero(prec));
      Complex up = eval_partial_sum(seq, 3, eps, Complex::add(x, h, prec), prec);
      Complex dn = eval_partial_sum(seq, 3, eps, Complex::sub(x, h, prec), prec);
      Complex diff = Complex::div(Complex::sub(up, dn, prec), Complex::add(h, h, prec), prec);
      BigFloat err = Complex::sub(diff, deriv, prec).abs(64);
      if (!first) {
        // One decade of h (2^-10) must buy ~two decades of error; allow slack.
        CHECK(err <= prev_err.ldexp(-10));
      }
      first = false;
      prev_err = err;
    }
  }
}

TEST_CASE("tail bound: pinned values, failures, monotonicity") {
  auto seq = LiouvilleSequence::make(Kind::DefaultTower);
  BigFloat one = BigFloat::from_int(1, 128);

  BigFloat b = tail_bound(seq, 3, one, 3);
  CHECK(b <= BigFloat::pow2(BigInt(-107), 64));
  CHECK(b >= BigFloat::pow2(BigInt(-108), 64));

  CHECK(tail_bound(seq, 2, BigFloat::zero(128), 4).is_zero());

  // d=1, R=4: t_2 = 16/2 = 8 already violates t_2 <= t_1/2 = 1.
  CHECK_THROWS_AS(tail_bound(seq, 1, BigFloat::from_int(4, 128), 3), RatioTestFailed);

  // Monotone: non-increasing in d, non-decreasing in R.
  BigFloat r_half = BigFloat::from_rational(Rational(1, 2), 128);
  BigFloat r_one_half = BigFloat::from_rational(Rational(3, 2), 128);
  CHECK(tail_bound(seq, 4, one, 3) <= tail_bound(seq, 3, one, 3));
  CHECK(tail_bound(seq, 3, r_half, 3) <= tail_bound(seq, 3, one, 3));
  CHECK(tail_bound(seq, 3, one, 3) <= tail_bound(seq, 3, r_one_half, 3));

  // The bound dominates a directly summed probe prefix.
  unsigned w = 160;
  BigFloat brute = BigFloat::zero(w);
  for (size_t i = 4; i <= 6; ++i) {
    BigFloat ri = BigFloat::from_int(1, w);  // R=1: R^i = 1
    brute = BigFloat::add(brute, ri.ldexp(-seq.log2_magnitude(i)), w, RoundMode::ToZero);
  }
  CHECK(b >= brute);
  CHECK(b <= brute.ldexp(1));

  // User sequences cannot certify an infinite tail.
  auto user = LiouvilleSequence::make(Kind::UserSupplied, {BigInt(2), BigInt(16), BigInt(65536)});
  CHECK_THROWS_AS(tail_bound(user, 1, one, 2), GrowthUnverified);

  // Factorial growth is fast enough for the ratio test at small R even
  // though the sequence fails the Liouville audit.
  auto fact = LiouvilleSequence::make(Kind::FactorialPow2);
  BigFloat fb = tail_bound(fact, 2, one, 4);
  CHECK(fb <= BigFloat::pow2(BigInt(-5), 64));  // t_3 = 2^-3! = 2^-6 dominates
  CHECK(fb >= BigFloat::pow2(BigInt(-6), 64));

  CHECK_THROWS_AS(tail_bound(seq, 3, one.neg(), 3), InputError);
  CHECK_THROWS_AS(tail_bound(seq, 3, one, 1), InputError);
}

TEST_CASE("sequences are shareable across threads") {
  auto seq = LiouvilleSequence::make(Kind::DefaultTower);
  // Lazy extension is mutex-guarded; hammer it from several threads.
  std::vector<std::thread> pool;
  std::atomic<bool> fail{false};
  for (int t = 0; t < 4; ++t)
    pool.emplace_back([&seq, &fail] {
      for (size_t i = 1; i <= 12; ++i)
        if (seq.log2_magnitude(i) < 1) fail = true;
    });
  for (auto& th : pool) th.join();
  CHECK(!fail);
  CHECK(seq.log2_magnitude(3) == 4);
}
