#include "liosolve/complex.hpp"

namespace liosolve {

Complex Complex::zero(unsigned prec) {
  return Complex(BigFloat::zero(prec), BigFloat::zero(prec));
}

Complex Complex::one(unsigned prec) {
  return Complex(BigFloat::from_int(1, prec), BigFloat::zero(prec));
}

BigFloat Complex::norm2(unsigned prec, RoundMode mode) const {
  return BigFloat::add(BigFloat::mul(re, re, prec, mode),
                       BigFloat::mul(im, im, prec, mode), prec, mode);
}

BigFloat Complex::abs(unsigned prec, RoundMode mode) const {
  return BigFloat::sqrt(norm2(prec + 8, mode), prec, mode);
}

Complex Complex::add(const Complex& a, const Complex& b, unsigned prec) {
  return Complex(BigFloat::add(a.re, b.re, prec), BigFloat::add(a.im, b.im, prec));
}

Complex Complex::sub(const Complex& a, const Complex& b, unsigned prec) {
  return Complex(BigFloat::sub(a.re, b.re, prec), BigFloat::sub(a.im, b.im, prec));
}

Complex Complex::mul(const Complex& a, const Complex& b, unsigned prec) {
  unsigned wide = prec + 8;
  BigFloat rr = BigFloat::mul(a.re, b.re, wide);
  BigFloat ii = BigFloat::mul(a.im, b.im, wide);
  BigFloat ri = BigFloat::mul(a.re, b.im, wide);
  BigFloat ir = BigFloat::mul(a.im, b.re, wide);
  return Complex(BigFloat::sub(rr, ii, prec), BigFloat::add(ri, ir, prec));
}

Complex Complex::div(const Complex& a, const Complex& b, unsigned prec) {
  if (b.is_zero()) throw ArithmeticError("complex division by zero");
  unsigned wide = prec + 8;
  BigFloat w = b.norm2(wide);
  BigFloat rr = BigFloat::add(BigFloat::mul(a.re, b.re, wide),
                              BigFloat::mul(a.im, b.im, wide), wide);
  BigFloat ii = BigFloat::sub(BigFloat::mul(a.im, b.re, wide),
                              BigFloat::mul(a.re, b.im, wide), wide);
  return Complex(BigFloat::div(rr, w, prec), BigFloat::div(ii, w, prec));
}

Complex Complex::scale(const Complex& a, const BigFloat& s, unsigned prec) {
  return Complex(BigFloat::mul(a.re, s, prec), BigFloat::mul(a.im, s, prec));
}

Complex operator+(const Complex& a, const Complex& b) {
  return Complex::add(a, b, std::max(a.precision(), b.precision()));
}
Complex operator-(const Complex& a, const Complex& b) {
  return Complex::sub(a, b, std::max(a.precision(), b.precision()));
}
Complex operator*(const Complex& a, const Complex& b) {
  return Complex::mul(a, b, std::max(a.precision(), b.precision()));
}
Complex operator/(const Complex& a, const Complex& b) {
  return Complex::div(a, b, std::max(a.precision(), b.precision()));
}

std::string Complex::to_string(unsigned digits) const {
  std::string r = re.to_string(digits);
  if (im.is_zero()) return r;
  std::string i = im.to_string(digits);
  if (!i.empty() && i[0] == '-') return r + i + "i";
  return r + "+" + i + "i";
}

BigFloat vec_norm2(const CVector& v, unsigned prec, RoundMode mode) {
  unsigned wide = prec + 8;
  BigFloat acc = BigFloat::zero(wide);
  for (const auto& z : v) acc = BigFloat::add(acc, z.norm2(wide, mode), wide, mode);
  return acc.round_to(prec, mode);
}

BigFloat vec_norm(const CVector& v, unsigned prec, RoundMode mode) {
  return BigFloat::sqrt(vec_norm2(v, prec + 8, mode), prec, mode);
}

CVector vec_sub(const CVector& a, const CVector& b, unsigned prec) {
  CVector r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = Complex::sub(a[i], b[i], prec);
  return r;
}

CVector vec_add(const CVector& a, const CVector& b, unsigned prec) {
  CVector r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = Complex::add(a[i], b[i], prec);
  return r;
}

CVector vec_scale(const CVector& a, const Complex& s, unsigned prec) {
  CVector r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = Complex::mul(a[i], s, prec);
  return r;
}

}  // namespace liosolve
