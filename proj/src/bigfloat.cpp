#include "liosolve/bigfloat.hpp"

#include <cassert>
#include <cctype>
#include <cmath>
#include <limits>

namespace liosolve {

namespace mp = boost::multiprecision;

unsigned BigFloat::default_prec_ = 256;

void BigFloat::set_default_precision(unsigned p) {
  if (p < 8) throw InputError("precision must be at least 8 bits");
  if (p > (1u << 22)) throw InputError("precision above 2^22 bits is not supported");
  default_prec_ = p;
}

BigFloat BigFloat::zero(unsigned prec) { return BigFloat(0, BigInt(0), BigInt(0), prec); }

static size_t bitlen(const BigInt& m) {
  return static_cast<size_t>(mp::msb(m)) + 1;
}

BigFloat BigFloat::normalize(int sign, BigInt m, BigInt e, unsigned prec,
                             RoundMode mode, bool sticky) {
  assert(sign != 0 && m > 0);
  size_t L = bitlen(m);
  if (L <= prec) {
    // Widening is exact. Sticky inputs always carry more than prec bits,
    // so the tail never has to be re-materialized here.
    assert(!sticky);
    if (L < prec) {
      m <<= (prec - L);
      e -= static_cast<long>(prec - L);
    }
    return BigFloat(sign, std::move(m), std::move(e), prec);
  }
  size_t k = L - prec;
  BigInt q = m >> k;
  BigInt rem = m - (q << k);
  bool up = false;
  switch (mode) {
    case RoundMode::Nearest: {
      BigInt half = BigInt(1) << (k - 1);
      if (rem > half)
        up = true;
      else if (rem == half)
        up = sticky || mp::bit_test(q, 0);
      break;
    }
    case RoundMode::Away:
      up = (rem != 0) || sticky;
      break;
    case RoundMode::ToZero:
      break;
  }
  e += static_cast<long>(k);
  if (up) {
    ++q;
    if (bitlen(q) > prec) {
      q >>= 1;
      e += 1;
    }
  }
  return BigFloat(sign, std::move(q), std::move(e), prec);
}

BigFloat BigFloat::from_int(long v, unsigned prec) { return from_bigint(BigInt(v), prec); }

BigFloat BigFloat::from_bigint(const BigInt& v, unsigned prec, RoundMode mode) {
  if (v == 0) return zero(prec);
  int s = v < 0 ? -1 : 1;
  return normalize(s, mp::abs(v), BigInt(0), prec, mode, false);
}

BigFloat BigFloat::from_rational(const Rational& q, unsigned prec, RoundMode mode) {
  BigInt num = mp::numerator(q);
  BigInt den = mp::denominator(q);
  if (num == 0) return zero(prec);
  int s = num < 0 ? -1 : 1;
  BigInt n = mp::abs(num);
  // Aim the quotient at prec+3 bits so the remainder is pure sticky.
  std::ptrdiff_t sh = static_cast<std::ptrdiff_t>(prec) + 3 +
                      static_cast<std::ptrdiff_t>(bitlen(den)) -
                      static_cast<std::ptrdiff_t>(bitlen(n));
  BigInt quot, rem;
  if (sh >= 0)
    mp::divide_qr(BigInt(n << static_cast<size_t>(sh)), den, quot, rem);
  else
    mp::divide_qr(n, BigInt(den << static_cast<size_t>(-sh)), quot, rem);
  return normalize(s, std::move(quot), BigInt(-sh), prec, mode, rem != 0);
}

BigFloat BigFloat::from_double(double d, unsigned prec) {
  if (!std::isfinite(d)) throw ArithmeticError("cannot convert non-finite double");
  if (d == 0.0) return zero(prec);
  int ex = 0;
  double fr = std::frexp(std::fabs(d), &ex);
  auto m = static_cast<long long>(std::ldexp(fr, 53));  // exact: fr has <= 53 bits
  return normalize(d < 0 ? -1 : 1, BigInt(m), BigInt(ex - 53), prec,
                   RoundMode::Nearest, false);
}

BigFloat BigFloat::pow2(const BigInt& k, unsigned prec) {
  BigInt m = BigInt(1) << (prec - 1);
  return BigFloat(1, std::move(m), k - (prec - 1), prec);
}

BigInt BigFloat::exponent() const {
  if (sign_ == 0) throw ArithmeticError("exponent of zero");
  return exp_ + prec_ - 1;
}

BigFloat BigFloat::round_to(unsigned prec, RoundMode mode) const {
  if (sign_ == 0) return zero(prec);
  if (prec == prec_) return *this;
  return normalize(sign_, mant_, exp_, prec, mode, false);
}

BigFloat BigFloat::neg() const {
  BigFloat r = *this;
  r.sign_ = -r.sign_;
  return r;
}

BigFloat BigFloat::abs() const {
  BigFloat r = *this;
  if (r.sign_ < 0) r.sign_ = 1;
  return r;
}

BigFloat BigFloat::ldexp(const BigInt& k) const {
  if (sign_ == 0) return *this;
  BigFloat r = *this;
  r.exp_ += k;
  return r;
}

BigFloat BigFloat::add(const BigFloat& a, const BigFloat& b, unsigned prec, RoundMode mode) {
  if (a.sign_ == 0) return b.round_to(prec, mode);
  if (b.sign_ == 0) return a.round_to(prec, mode);
  BigInt ta = a.exp_ + a.prec_;
  BigInt tb = b.exp_ + b.prec_;
  const BigFloat& big = (ta >= tb) ? a : b;
  const BigFloat& small = (ta >= tb) ? b : a;
  BigInt gap = (ta >= tb) ? BigInt(ta - tb) : BigInt(tb - ta);
  if (gap > BigInt(a.prec_) + b.prec_ + prec + 8) {
    // The small operand only influences the sticky tail. Replace it by a
    // one-ulp-wide bracket below the widened big mantissa.
    size_t s = prec + 6;
    BigInt m = big.mant_ << s;
    if (big.sign_ != small.sign_) m -= 1;
    return normalize(big.sign_, std::move(m), big.exp_ - static_cast<long>(s),
                     prec, mode, true);
  }
  const BigInt& emin = (a.exp_ <= b.exp_) ? a.exp_ : b.exp_;
  auto sa = static_cast<size_t>(BigInt(a.exp_ - emin).convert_to<unsigned long>());
  auto sb = static_cast<size_t>(BigInt(b.exp_ - emin).convert_to<unsigned long>());
  BigInt M = (a.sign_ > 0 ? BigInt(a.mant_ << sa) : BigInt(-(a.mant_ << sa))) +
             (b.sign_ > 0 ? BigInt(b.mant_ << sb) : BigInt(-(b.mant_ << sb)));
  if (M == 0) return zero(prec);
  int s = M < 0 ? -1 : 1;
  return normalize(s, mp::abs(M), emin, prec, mode, false);
}

BigFloat BigFloat::sub(const BigFloat& a, const BigFloat& b, unsigned prec, RoundMode mode) {
  return add(a, b.neg(), prec, mode);
}

BigFloat BigFloat::mul(const BigFloat& a, const BigFloat& b, unsigned prec, RoundMode mode) {
  if (a.sign_ == 0 || b.sign_ == 0) return zero(prec);
  return normalize(a.sign_ * b.sign_, a.mant_ * b.mant_, a.exp_ + b.exp_, prec, mode, false);
}

BigFloat BigFloat::div(const BigFloat& a, const BigFloat& b, unsigned prec, RoundMode mode) {
  if (b.sign_ == 0) throw ArithmeticError("division by zero");
  if (a.sign_ == 0) return zero(prec);
  size_t K = prec + b.prec_ + 3;
  BigInt q, r;
  mp::divide_qr(BigInt(a.mant_ << K), b.mant_, q, r);
  return normalize(a.sign_ * b.sign_, std::move(q),
                   a.exp_ - b.exp_ - static_cast<long>(K), prec, mode, r != 0);
}

BigFloat BigFloat::sqrt(const BigFloat& a, unsigned prec, RoundMode mode) {
  if (a.sign_ < 0) throw ArithmeticError("sqrt of a negative value");
  if (a.sign_ == 0) return zero(prec);
  BigInt m = a.mant_;
  BigInt e = a.exp_;
  if (e % 2 != 0) {
    m <<= 1;
    e -= 1;
  }
  size_t t = prec + 3;
  m <<= 2 * t;
  e -= static_cast<long>(2 * t);
  BigInt r;
  BigInt s = mp::sqrt(m, r);
  return normalize(1, std::move(s), BigInt(e / 2), prec, mode, r != 0);
}

BigFloat operator+(const BigFloat& a, const BigFloat& b) {
  return BigFloat::add(a, b, std::max(a.precision(), b.precision()));
}
BigFloat operator-(const BigFloat& a, const BigFloat& b) {
  return BigFloat::sub(a, b, std::max(a.precision(), b.precision()));
}
BigFloat operator*(const BigFloat& a, const BigFloat& b) {
  return BigFloat::mul(a, b, std::max(a.precision(), b.precision()));
}
BigFloat operator/(const BigFloat& a, const BigFloat& b) {
  return BigFloat::div(a, b, std::max(a.precision(), b.precision()));
}

int BigFloat::compare(const BigFloat& a, const BigFloat& b) {
  if (a.sign_ != b.sign_) return a.sign_ < b.sign_ ? -1 : 1;
  if (a.sign_ == 0) return 0;
  BigInt ta = a.exp_ + a.prec_;
  BigInt tb = b.exp_ + b.prec_;
  int mag;
  if (ta != tb) {
    mag = ta < tb ? -1 : 1;
  } else if (a.exp_ == b.exp_) {
    mag = a.mant_ < b.mant_ ? -1 : (a.mant_ == b.mant_ ? 0 : 1);
  } else if (a.exp_ < b.exp_) {
    BigInt bm = b.mant_ << static_cast<size_t>(BigInt(b.exp_ - a.exp_).convert_to<unsigned long>());
    mag = a.mant_ < bm ? -1 : (a.mant_ == bm ? 0 : 1);
  } else {
    BigInt am = a.mant_ << static_cast<size_t>(BigInt(a.exp_ - b.exp_).convert_to<unsigned long>());
    mag = am < b.mant_ ? -1 : (am == b.mant_ ? 0 : 1);
  }
  return a.sign_ > 0 ? mag : -mag;
}

double BigFloat::to_double() const {
  if (sign_ == 0) return 0.0;
  BigInt l2 = exp_ + prec_ - 1;
  if (l2 > 1024) return sign_ > 0 ? HUGE_VAL : -HUGE_VAL;
  if (l2 < -1075) return sign_ > 0 ? 0.0 : -0.0;
  unsigned take = std::min(prec_, 54u);
  auto top = BigInt(mant_ >> (prec_ - take)).convert_to<long long>();
  long e = BigInt(exp_ + (prec_ - take)).convert_to<long>();
  double d = std::ldexp(static_cast<double>(top), static_cast<int>(e));
  return sign_ > 0 ? d : -d;
}

Rational BigFloat::to_rational() const {
  if (sign_ == 0) return Rational(0);
  if (mp::abs(exp_) > (BigInt(1) << 24))
    throw ArithmeticError("binary exponent too large for an exact rational");
  Rational r;
  if (exp_ >= 0)
    r = Rational(BigInt(mant_ << exp_.convert_to<unsigned long>()));
  else
    r = Rational(mant_, BigInt(BigInt(1) << BigInt(-exp_).convert_to<unsigned long>()));
  return sign_ > 0 ? r : Rational(-r);
}

namespace {

BigInt pow10_int(size_t k) { return mp::pow(BigInt(10), static_cast<unsigned>(k)); }

// round_half_even(n / d) for n >= 0, d > 0.
BigInt div_round_even(const BigInt& n, const BigInt& d) {
  BigInt q, r;
  mp::divide_qr(n, d, q, r);
  BigInt twice = r * 2;
  if (twice > d || (twice == d && mp::bit_test(q, 0))) ++q;
  return q;
}

// floor(v * 30103 / 100000), a one-off approximation of v*log10(2).
BigInt floor_log10_scale(const BigInt& v) {
  BigInt num = v * 30103;
  BigInt q = num / 100000;
  if (num % 100000 != 0 && num < 0) --q;
  return q;
}

std::string trim_fraction(std::string s) {
  if (s.find('.') == std::string::npos) return s;
  size_t last = s.find_last_not_of('0');
  if (s[last] == '.') last--;
  s.erase(last + 1);
  return s;
}

}  // namespace

std::string BigFloat::to_string(unsigned digits) const {
  size_t D = digits ? digits
                    : std::max<size_t>(1, ((prec_ > 8 ? prec_ - 8 : 1) * 30103ull) / 100000ull);
  if (sign_ == 0) return "0";
  std::string sgn = sign_ < 0 ? "-" : "";
  BigInt l2 = exp_ + prec_ - 1;

  if (mp::abs(l2) > (BigInt(1) << 21)) {
    // Power-of-two notation: mantissa in [1,2) times 2^floor(log2|x|).
    BigInt scaled = div_round_even(mant_ * pow10_int(D - 1), BigInt(1) << (prec_ - 1));
    std::string ds = scaled.str();
    std::string body = ds.substr(0, 1);
    if (ds.size() > 1) body += "." + ds.substr(1);
    return sgn + trim_fraction(body) + "p" + l2.str();
  }

  BigInt t10 = floor_log10_scale(l2);
  BigInt q;
  for (int iter = 0; iter < 4; ++iter) {
    BigInt k = BigInt(D - 1) - t10;  // scale by 10^k
    BigInt num = mant_;
    BigInt den = 1;
    if (exp_ >= 0)
      num <<= exp_.convert_to<unsigned long>();
    else
      den <<= BigInt(-exp_).convert_to<unsigned long>();
    if (k >= 0)
      num *= mp::pow(BigInt(10), k.convert_to<unsigned>());
    else
      den *= mp::pow(BigInt(10), BigInt(-k).convert_to<unsigned>());
    q = div_round_even(num, den);
    if (q >= pow10_int(D)) {
      t10 += 1;
      continue;
    }
    if (q < pow10_int(D - 1)) {
      t10 -= 1;
      continue;
    }
    break;
  }
  std::string ds = q.str();
  long t = t10.convert_to<long>();
  std::string body;
  if (t >= -4 && t <= 11) {
    if (t >= 0) {
      size_t ip = static_cast<size_t>(t) + 1;
      if (ip >= ds.size())
        body = ds + std::string(ip - ds.size(), '0');
      else
        body = ds.substr(0, ip) + "." + ds.substr(ip);
    } else {
      body = "0." + std::string(static_cast<size_t>(-t) - 1, '0') + ds;
    }
    return sgn + trim_fraction(body);
  }
  body = ds.substr(0, 1);
  if (ds.size() > 1) body += "." + ds.substr(1);
  return sgn + trim_fraction(body) + "e" + std::to_string(t);
}

BigFloat BigFloat::parse(const std::string& text, unsigned prec, RoundMode mode) {
  std::string s;
  s.reserve(text.size());
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  if (s.empty()) throw InputError("empty number");
  int sign = 1;
  size_t pos = 0;
  if (s[pos] == '+' || s[pos] == '-') {
    if (s[pos] == '-') sign = -1;
    ++pos;
  }
  auto digits_from = [&](size_t start, size_t end) {
    for (size_t i = start; i < end; ++i)
      if (!std::isdigit(static_cast<unsigned char>(s[i])))
        throw InputError("bad digit in number: " + text);
    if (start == end) throw InputError("missing digits in number: " + text);
    // cpp_int would read a leading 0 as an octal prefix.
    while (start + 1 < end && s[start] == '0') ++start;
    return BigInt(s.substr(start, end - start));
  };

  size_t ppos = s.find_first_of("pP", pos);
  size_t epos = s.find_first_of("eE", pos);
  size_t mant_end = std::min(ppos == std::string::npos ? s.size() : ppos,
                             epos == std::string::npos ? s.size() : epos);
  size_t dot = s.find('.', pos);
  if (dot != std::string::npos && dot > mant_end) dot = std::string::npos;

  BigInt intpart = 0, fracpart = 0;
  size_t fraclen = 0;
  if (dot == std::string::npos) {
    intpart = digits_from(pos, mant_end);
  } else {
    if (dot > pos) intpart = digits_from(pos, dot);
    else if (dot + 1 == mant_end) throw InputError("missing digits in number: " + text);
    if (dot + 1 < mant_end) {
      fracpart = digits_from(dot + 1, mant_end);
      fraclen = mant_end - dot - 1;
    }
  }
  Rational mantissa = Rational(intpart) + Rational(fracpart, pow10_int(fraclen));
  if (sign < 0) mantissa = -mantissa;

  if (ppos != std::string::npos) {
    if (epos != std::string::npos) throw InputError("number mixes e and p exponents: " + text);
    size_t xs = ppos + 1;
    int xsign = 1;
    if (xs < s.size() && (s[xs] == '+' || s[xs] == '-')) {
      if (s[xs] == '-') xsign = -1;
      ++xs;
    }
    BigInt p = digits_from(xs, s.size());
    if (xsign < 0) p = -p;
    if (mantissa == 0) return zero(prec);
    return from_rational(mantissa, prec, mode).ldexp(p);
  }
  if (epos != std::string::npos) {
    size_t xs = epos + 1;
    int xsign = 1;
    if (xs < s.size() && (s[xs] == '+' || s[xs] == '-')) {
      if (s[xs] == '-') xsign = -1;
      ++xs;
    }
    BigInt ev = digits_from(xs, s.size());
    if (ev > 1000000) throw InputError("decimal exponent too large; use p-notation: " + text);
    long e = (xsign < 0 ? BigInt(-ev) : ev).convert_to<long>();
    if (mantissa == 0) return zero(prec);
    if (e >= 0)
      mantissa *= Rational(pow10_int(static_cast<size_t>(e)));
    else
      mantissa /= Rational(pow10_int(static_cast<size_t>(-e)));
    return from_rational(mantissa, prec, mode);
  }
  if (mantissa == 0) return zero(prec);
  return from_rational(mantissa, prec, mode);
}

}  // namespace liosolve
