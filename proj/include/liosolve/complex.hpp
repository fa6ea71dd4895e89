#pragma once

// Complex numbers over BigFloat, plus the exact Gaussian-rational type used
// for polynomial coefficients and for the exact evaluation mode.

#include <string>
#include <vector>

#include "liosolve/bigfloat.hpp"

namespace liosolve {

struct Complex {
  BigFloat re;
  BigFloat im;

  Complex() = default;
  Complex(BigFloat r, BigFloat i) : re(std::move(r)), im(std::move(i)) {}
  explicit Complex(BigFloat r) : re(std::move(r)), im(BigFloat::zero(re.precision())) {}

  static Complex zero(unsigned prec = BigFloat::default_precision());
  static Complex one(unsigned prec = BigFloat::default_precision());

  bool is_zero() const { return re.is_zero() && im.is_zero(); }
  unsigned precision() const { return std::max(re.precision(), im.precision()); }

  Complex conj() const { return Complex(re, im.neg()); }
  Complex neg() const { return Complex(re.neg(), im.neg()); }
  Complex ldexp(const BigInt& k) const { return Complex(re.ldexp(k), im.ldexp(k)); }

  // |z|^2 and |z|, rounded at prec. Away mode gives certified upper bounds.
  BigFloat norm2(unsigned prec, RoundMode mode = RoundMode::Nearest) const;
  BigFloat abs(unsigned prec, RoundMode mode = RoundMode::Nearest) const;

  static Complex add(const Complex& a, const Complex& b, unsigned prec);
  static Complex sub(const Complex& a, const Complex& b, unsigned prec);
  static Complex mul(const Complex& a, const Complex& b, unsigned prec);
  static Complex div(const Complex& a, const Complex& b, unsigned prec);
  static Complex scale(const Complex& a, const BigFloat& s, unsigned prec);

  friend Complex operator+(const Complex& a, const Complex& b);
  friend Complex operator-(const Complex& a, const Complex& b);
  friend Complex operator*(const Complex& a, const Complex& b);
  friend Complex operator/(const Complex& a, const Complex& b);
  Complex operator-() const { return neg(); }
  friend bool operator==(const Complex& a, const Complex& b) {
    return a.re == b.re && a.im == b.im;
  }
  friend bool operator!=(const Complex& a, const Complex& b) { return !(a == b); }

  std::string to_string(unsigned digits = 0) const;
};

using CVector = std::vector<Complex>;

// Euclidean norm sqrt(sum |z_i|^2) and its square.
BigFloat vec_norm2(const CVector& v, unsigned prec, RoundMode mode = RoundMode::Nearest);
BigFloat vec_norm(const CVector& v, unsigned prec, RoundMode mode = RoundMode::Nearest);
CVector vec_sub(const CVector& a, const CVector& b, unsigned prec);
CVector vec_add(const CVector& a, const CVector& b, unsigned prec);
CVector vec_scale(const CVector& a, const Complex& s, unsigned prec);

// Exact complex rational: coefficients of input systems live here.
struct GaussianRational {
  Rational re;
  Rational im;

  GaussianRational() : re(0), im(0) {}
  GaussianRational(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}
  explicit GaussianRational(long v) : re(v), im(0) {}

  bool is_zero() const { return re == 0 && im == 0; }
  GaussianRational conj() const { return {re, -im}; }

  friend GaussianRational operator+(const GaussianRational& a, const GaussianRational& b) {
    return {a.re + b.re, a.im + b.im};
  }
  friend GaussianRational operator-(const GaussianRational& a, const GaussianRational& b) {
    return {a.re - b.re, a.im - b.im};
  }
  friend GaussianRational operator*(const GaussianRational& a, const GaussianRational& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  GaussianRational operator-() const { return {-re, -im}; }
  friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
    return a.re == b.re && a.im == b.im;
  }

  Complex to_complex(unsigned prec) const {
    return Complex(BigFloat::from_rational(re, prec), BigFloat::from_rational(im, prec));
  }
};

using GVector = std::vector<GaussianRational>;

}  // namespace liosolve
