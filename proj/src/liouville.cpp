#include "liosolve/liouville.hpp"

#include <mutex>

namespace liosolve {

namespace mp = boost::multiprecision;

namespace {

// Generated sequences extend on demand: log2|a_i| at index 4096 already
// occupies megabytes, so anything past this is a usage error.
constexpr size_t kMaxGeneratedIndex = 4096;
// coefficient_exact materializes 2^g; cap the denominator at 2^25 bits.
const long kExactLog2Limit = 1L << 25;
// audit_growth on materialized user values computes |a_i|^(i^l) exactly.
const long kAuditBitLimit = 1L << 26;

}  // namespace

struct LiouvilleSequence::Impl {
  Kind kind;
  // User sequences are fully materialized.
  std::vector<BigInt> user_values;
  std::vector<int> user_signs;
  std::vector<bool> user_pow2;
  std::vector<BigInt> user_log2floor;
  // Generated kinds memoize exact log2 magnitudes lazily.
  mutable std::mutex mu;
  mutable std::vector<BigInt> g;

  BigInt log2_at(size_t i) const {  // i >= 1, generated kinds only
    std::lock_guard<std::mutex> lock(mu);
    while (g.size() < i) {
      size_t k = g.size();
      if (k == 0) {
        g.push_back(BigInt(1));  // a_1 = 2 for both generated kinds
      } else if (kind == Kind::DefaultTower) {
        // log2 a_{k+1} = k^k * log2 a_k
        g.push_back(g[k - 1] * mp::pow(BigInt(k), static_cast<unsigned>(k)));
      } else {
        // a_i = 2^(i!): log2 a_{k+1} = (k+1)!
        g.push_back(g[k - 1] * static_cast<unsigned long>(k + 1));
      }
    }
    return g[i - 1];
  }
};

LiouvilleSequence LiouvilleSequence::make(Kind kind, const std::vector<BigInt>& values) {
  auto impl = std::make_shared<Impl>();
  impl->kind = kind;
  if (kind == Kind::UserSupplied) {
    if (values.empty()) throw InvalidSequence("user sequence must supply at least one value");
    for (const BigInt& v : values) {
      if (v == 0) throw InvalidSequence("user sequence entries must be non-zero integers");
      BigInt a = mp::abs(v);
      impl->user_values.push_back(v);
      impl->user_signs.push_back(v < 0 ? -1 : 1);
      impl->user_pow2.push_back((a & (a - 1)) == 0);
      impl->user_log2floor.push_back(BigInt(mp::msb(a)));
    }
  }
  return LiouvilleSequence(std::move(impl));
}

LiouvilleSequence::Kind LiouvilleSequence::kind() const { return impl_->kind; }

size_t LiouvilleSequence::max_index() const {
  return impl_->kind == Kind::UserSupplied ? impl_->user_values.size() : kMaxGeneratedIndex;
}

static void check_index(const LiouvilleSequence& seq, size_t i) {
  if (i < 1 || i > seq.max_index())
    throw InvalidIndex("sequence index " + std::to_string(i) + " out of range");
}

int LiouvilleSequence::sign(size_t i) const {
  check_index(*this, i);
  return impl_->kind == Kind::UserSupplied ? impl_->user_signs[i - 1] : 1;
}

bool LiouvilleSequence::is_pow2(size_t i) const {
  check_index(*this, i);
  return impl_->kind == Kind::UserSupplied ? impl_->user_pow2[i - 1] : true;
}

BigInt LiouvilleSequence::log2_magnitude(size_t i) const {
  check_index(*this, i);
  if (impl_->kind == Kind::UserSupplied) return impl_->user_log2floor[i - 1];
  return impl_->log2_at(i);
}

const BigInt& LiouvilleSequence::user_value(size_t i) const {
  check_index(*this, i);
  if (impl_->kind != Kind::UserSupplied)
    throw InvalidIndex("materialized values only exist for user sequences");
  return impl_->user_values[i - 1];
}

BigFloat LiouvilleSequence::coefficient_real(size_t i, unsigned prec, RoundMode mode) const {
  check_index(*this, i);
  if (impl_->kind != Kind::UserSupplied) {
    return BigFloat::pow2(-impl_->log2_at(i), prec);  // exact
  }
  const BigInt& v = impl_->user_values[i - 1];
  if (impl_->user_pow2[i - 1]) {
    BigFloat c = BigFloat::pow2(-impl_->user_log2floor[i - 1], prec);
    return v < 0 ? c.neg() : c;
  }
  return BigFloat::from_rational(Rational(1, v), prec, mode);
}

Rational LiouvilleSequence::coefficient_exact(size_t i) const {
  check_index(*this, i);
  if (impl_->kind == Kind::UserSupplied) return Rational(1, impl_->user_values[i - 1]);
  BigInt g = impl_->log2_at(i);
  if (g > kExactLog2Limit)
    throw ArithmeticError("exact mode unavailable: log2|a_" + std::to_string(i) +
                          "| exceeds 2^25 bits");
  return Rational(1, BigInt(1) << g.convert_to<unsigned long>());
}

AuditReport audit_growth(const LiouvilleSequence& seq, unsigned l, size_t i_max) {
  if (l < 1) throw InputError("audit exponent l must be >= 1");
  if (i_max < 1 || i_max + 1 > seq.max_index())
    throw InvalidIndex("audit needs indices 1.." + std::to_string(i_max + 1));
  AuditReport report;
  report.ok.resize(i_max);
  for (size_t i = 1; i <= i_max; ++i) {
    BigInt power = mp::pow(BigInt(i), l);  // i^l
    bool pass;
    if (seq.is_pow2(i) && seq.is_pow2(i + 1)) {
      pass = seq.log2_magnitude(i + 1) > power * seq.log2_magnitude(i);
    } else {
      // Compare |a_{i+1}| against |a_i|^(i^l) directly.
      BigInt ai = mp::abs(seq.user_value(i));
      BigInt an = mp::abs(seq.user_value(i + 1));
      if (ai == 1) {
        pass = an > 1;
      } else {
        BigInt bits = (seq.log2_magnitude(i) + 1) * power;
        if (bits > kAuditBitLimit)
          throw InputError("audit power |a_i|^(i^l) too large to compute exactly");
        pass = an > mp::pow(ai, power.convert_to<unsigned>());
      }
    }
    report.ok[i - 1] = pass;
  }
  report.first_all_true = 0;
  for (size_t i = i_max; i >= 1; --i) {
    if (!report.ok[i - 1]) break;
    report.first_all_true = i;
    if (i == 1) break;
  }
  return report;
}

Complex coefficient(const LiouvilleSequence& seq, size_t i, unsigned prec) {
  return Complex(seq.coefficient_real(i, prec), BigFloat::zero(prec));
}

Complex eval_partial_sum(const LiouvilleSequence& seq, size_t d, const Complex& eps,
                         const Complex& x, unsigned prec) {
  Complex acc(eps.re.round_to(prec), eps.im.round_to(prec));
  for (size_t i = d; i >= 1; --i) {
    acc = Complex::add(coefficient(seq, i, prec), Complex::mul(x, acc, prec), prec);
  }
  return Complex::mul(x, acc, prec);
}

Complex eval_partial_sum_derivative(const LiouvilleSequence& seq, size_t d,
                                    const Complex& eps, const Complex& x, unsigned prec) {
  Complex acc = Complex::scale(Complex(eps.re.round_to(prec), eps.im.round_to(prec)),
                               BigFloat::from_int(static_cast<long>(d) + 1, prec), prec);
  for (size_t i = d; i >= 1; --i) {
    Complex term = Complex::scale(coefficient(seq, i, prec),
                                  BigFloat::from_int(static_cast<long>(i), prec), prec);
    acc = Complex::add(term, Complex::mul(x, acc, prec), prec);
  }
  return acc;
}

Complex eval_modified_partial_sum(const LiouvilleSequence& seq, size_t k,
                                  const CVector& g, const Complex& x, unsigned prec) {
  Complex h = eval_partial_sum(seq, k, Complex::zero(prec), x, prec);
  Complex gv = Complex::zero(prec);
  for (size_t j = g.size(); j-- > 0;) gv = Complex::add(g[j], Complex::mul(x, gv, prec), prec);
  Complex xk = Complex::one(prec);
  for (size_t j = 0; j < k; ++j) xk = Complex::mul(xk, x, prec);
  return Complex::add(h, Complex::mul(xk, gv, prec), prec);
}

GaussianRational eval_partial_sum_exact(const LiouvilleSequence& seq, size_t d,
                                        const GaussianRational& eps,
                                        const GaussianRational& x) {
  GaussianRational acc = eps;
  for (size_t i = d; i >= 1; --i) {
    acc = GaussianRational(seq.coefficient_exact(i), Rational(0)) + x * acc;
  }
  return x * acc;
}

GaussianRational eval_partial_sum_derivative_exact(const LiouvilleSequence& seq, size_t d,
                                                   const GaussianRational& eps,
                                                   const GaussianRational& x) {
  Rational dd(static_cast<long>(d) + 1);
  GaussianRational acc(eps.re * dd, eps.im * dd);
  for (size_t i = d; i >= 1; --i) {
    Rational ci = seq.coefficient_exact(i) * static_cast<long>(i);
    acc = GaussianRational(ci, Rational(0)) + x * acc;
  }
  return acc;
}

namespace {

// ceil(log2 R) for R > 0, computed exactly from the representation.
BigInt ceil_log2(const BigFloat& r) {
  BigInt fl = r.exponent();
  const BigInt& m = r.raw_mantissa();
  bool pow2 = (m & (m - 1)) == 0;
  return pow2 ? fl : BigInt(fl + 1);
}

}  // namespace

BigFloat tail_bound(const LiouvilleSequence& seq, size_t d, const BigFloat& R,
                    size_t m, unsigned prec) {
  if (R.sign() < 0) throw InputError("tail bound radius must be non-negative");
  if (m < 2) throw InputError("tail bound probe count must be at least 2");
  if (R.is_zero()) return BigFloat::zero(prec);
  if (seq.kind() == LiouvilleSequence::Kind::UserSupplied)
    throw GrowthUnverified(
        "tail bound needs a sequence recurrence; a finite user list cannot "
        "certify growth past its last term");
  if (d + m + 1 > seq.max_index())
    throw InvalidIndex("tail bound probe window exceeds the sequence ceiling");

  unsigned w = prec + 8;
  // Directed powers of R: up[i], dn[i] bracket R^i for i = d..d+m.
  std::vector<BigFloat> t_up(d + m + 1), t_dn(d + m + 1);
  BigFloat r_up = R.round_to(w, RoundMode::Away);
  BigFloat r_dn = R.round_to(w, RoundMode::ToZero);
  BigFloat p_up = BigFloat::from_int(1, w);
  BigFloat p_dn = BigFloat::from_int(1, w);
  for (size_t i = 1; i <= d + m; ++i) {
    p_up = BigFloat::mul(p_up, r_up, w, RoundMode::Away);
    p_dn = BigFloat::mul(p_dn, r_dn, w, RoundMode::ToZero);
    if (i >= d && i >= 1) {
      BigInt g = seq.log2_magnitude(i);  // exact: generated kinds are powers of two
      t_up[i] = p_up.ldexp(-g);
      t_dn[i] = p_dn.ldexp(-g);
    }
  }

  // Probe-window ratio test, boundary ratio t_{d+1}/t_d included when d >= 1.
  for (size_t i = (d >= 1 ? d : 1); i + 1 <= d + m; ++i) {
    if (t_up[i + 1].ldexp(1) > t_dn[i])
      throw RatioTestFailed("tail terms decay slower than 1/2 at i = " +
                            std::to_string(i + 1) + "; raise the truncation degree");
  }

  // Beyond the window: log2|a_{i+1}| - log2|a_i| is non-decreasing for both
  // generated kinds, so one check at i = d+m covers every later index.
  BigInt delta = seq.log2_magnitude(d + m + 1) - seq.log2_magnitude(d + m);
  BigInt need = ceil_log2(R) + 1;
  if (need < 1) need = 1;
  if (delta < need)
    throw RatioTestFailed("sequence growth past the probe window is too slow for radius R");

  BigFloat acc = BigFloat::zero(w);
  for (size_t i = d + 1; i <= d + m - 1; ++i)
    acc = BigFloat::add(acc, t_up[i], w, RoundMode::Away);
  acc = BigFloat::add(acc, t_up[d + m].ldexp(1), w, RoundMode::Away);
  return acc.round_to(prec, RoundMode::Away);
}

}  // namespace liosolve
