#pragma once

// Arbitrary-precision binary floating point with an *arbitrary-precision
// exponent*. The tower sequences handled here have magnitudes like
// |a_7| = 2^4031078400000 and |a_9| ~ 2^(5.6e25); the exponent itself
// overflows int64, so both the mantissa and the exponent are big integers.
// There is no underflow or overflow: every operation is correctly rounded
// to the requested precision in the requested mode, or exact.

#include <compare>
#include <cstdint>
#include <optional>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

#include "liosolve/errors.hpp"

namespace liosolve {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

enum class RoundMode {
  Nearest,   // round to nearest, ties to even
  Away,      // round away from zero (for certified upper bounds)
  ToZero,    // truncate toward zero (for certified lower bounds)
};

class BigFloat {
 public:
  // Value is sign * mant * 2^exp with 2^(prec-1) <= mant < 2^prec,
  // or zero (sign == 0, mant == 0).
  BigFloat() : sign_(0), prec_(default_precision()) {}

  static BigFloat zero(unsigned prec = default_precision());
  static BigFloat from_int(long v, unsigned prec = default_precision());
  static BigFloat from_bigint(const BigInt& v, unsigned prec = default_precision(),
                              RoundMode mode = RoundMode::Nearest);
  static BigFloat from_rational(const Rational& q, unsigned prec = default_precision(),
                                RoundMode mode = RoundMode::Nearest);
  static BigFloat from_double(double d, unsigned prec = default_precision());
  // Accepts plain/scientific decimals ("-3.25e-7") and the power-of-two
  // notation produced for astronomically scaled values ("1.375p-86400000").
  static BigFloat parse(const std::string& text, unsigned prec = default_precision(),
                        RoundMode mode = RoundMode::Nearest);

  // Exactly 2^k.
  static BigFloat pow2(const BigInt& k, unsigned prec = default_precision());

  bool is_zero() const { return sign_ == 0; }
  int sign() const { return sign_; }
  unsigned precision() const { return prec_; }

  // floor(log2 |x|); throws on zero.
  BigInt exponent() const;
  const BigInt& raw_exponent() const { return exp_; }
  const BigInt& raw_mantissa() const { return mant_; }

  // Re-round to a new precision.
  BigFloat round_to(unsigned prec, RoundMode mode = RoundMode::Nearest) const;

  BigFloat neg() const;
  BigFloat abs() const;
  // Multiply by 2^k; always exact.
  BigFloat ldexp(const BigInt& k) const;

  static BigFloat add(const BigFloat& a, const BigFloat& b, unsigned prec,
                      RoundMode mode = RoundMode::Nearest);
  static BigFloat sub(const BigFloat& a, const BigFloat& b, unsigned prec,
                      RoundMode mode = RoundMode::Nearest);
  static BigFloat mul(const BigFloat& a, const BigFloat& b, unsigned prec,
                      RoundMode mode = RoundMode::Nearest);
  static BigFloat div(const BigFloat& a, const BigFloat& b, unsigned prec,
                      RoundMode mode = RoundMode::Nearest);
  static BigFloat sqrt(const BigFloat& a, unsigned prec,
                       RoundMode mode = RoundMode::Nearest);

  // Operator forms round to max(operand precisions), nearest.
  friend BigFloat operator+(const BigFloat& a, const BigFloat& b);
  friend BigFloat operator-(const BigFloat& a, const BigFloat& b);
  friend BigFloat operator*(const BigFloat& a, const BigFloat& b);
  friend BigFloat operator/(const BigFloat& a, const BigFloat& b);
  BigFloat operator-() const { return neg(); }

  // Comparisons are exact (no rounding involved).
  static int compare(const BigFloat& a, const BigFloat& b);
  friend bool operator==(const BigFloat& a, const BigFloat& b) { return compare(a, b) == 0; }
  friend bool operator!=(const BigFloat& a, const BigFloat& b) { return compare(a, b) != 0; }
  friend bool operator<(const BigFloat& a, const BigFloat& b) { return compare(a, b) < 0; }
  friend bool operator<=(const BigFloat& a, const BigFloat& b) { return compare(a, b) <= 0; }
  friend bool operator>(const BigFloat& a, const BigFloat& b) { return compare(a, b) > 0; }
  friend bool operator>=(const BigFloat& a, const BigFloat& b) { return compare(a, b) >= 0; }

  // Saturates to +-HUGE_VAL / +-0 outside double range; diagnostics only.
  double to_double() const;
  // Exact rational value. Refuses when |exponent| is over ~2^24 (the plain
  // binary-to-rational blowup would be gigabytes); use the string form then.
  Rational to_rational() const;

  // Shortest-faithful decimal is not attempted; this prints `digits`
  // significant digits (correctly rounded, ties to even), trimming trailing
  // zeros, switching to d.dddp<exp2> notation when the binary exponent is
  // too large for exact power-of-ten scaling.
  std::string to_string(unsigned digits = 0) const;

  static unsigned default_precision() { return default_prec_; }
  static void set_default_precision(unsigned p);

 private:
  BigFloat(int sign, BigInt mant, BigInt exp, unsigned prec)
      : sign_(sign), mant_(std::move(mant)), exp_(std::move(exp)), prec_(prec) {}

  // Round |m| * 2^e (plus an optional sticky tail below the lsb) to prec
  // bits. Requires m > 0; if sticky is set, m must carry at least prec+1
  // bits so the sticky tail sits strictly below the rounding position.
  static BigFloat normalize(int sign, BigInt m, BigInt e, unsigned prec,
                            RoundMode mode, bool sticky);

  int sign_;       // -1, 0, +1
  BigInt mant_;    // normalized to exactly prec_ bits (zero iff sign_ == 0)
  BigInt exp_;     // value = sign_ * mant_ * 2^exp_
  unsigned prec_;

  static unsigned default_prec_;
};

}  // namespace liosolve
