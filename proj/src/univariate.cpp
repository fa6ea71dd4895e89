#include "liosolve/univariate.hpp"

#include <algorithm>

#include "liosolve/errors.hpp"
#include "liosolve/liouville.hpp"

namespace liosolve {

size_t UnivariatePoly::degree() const {
  size_t d = coeffs.size();
  while (d > 0 && coeffs[d - 1].is_zero()) --d;
  return d == 0 ? 0 : d - 1;
}

bool UnivariatePoly::is_zero() const {
  for (const Complex& c : coeffs)
    if (!c.is_zero()) return false;
  return true;
}

namespace {

CVector conv(const CVector& a, const CVector& b, unsigned prec) {
  CVector out(a.size() + b.size() - 1, Complex::zero(prec));
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i].is_zero()) continue;
    for (size_t j = 0; j < b.size(); ++j) {
      if (b[j].is_zero()) continue;
      out[i + j] =
          Complex::add(out[i + j], Complex::mul(a[i], b[j], prec), prec);
    }
  }
  return out;
}

Complex horner(const CVector& c, size_t count, const Complex& x, unsigned prec) {
  Complex acc = Complex::zero(prec);
  for (size_t i = count; i-- > 0;)
    acc = Complex::add(Complex::mul(acc, x, prec), c[i], prec);
  return acc;
}

}  // namespace

UnivariatePoly univariate_from_map(const PolynomialMap& f, const CVector& z,
                                   unsigned prec) {
  if (f.n() != 1) throw InputError("univariate form needs n = 1");
  if (z.size() != f.r())
    throw InputError("expected " + std::to_string(f.r()) + " parameters");
  const unsigned wp = prec + 8;

  size_t maxdeg = 0;
  for (const Term& t : f.components()[0]) {
    if (t.ye[0] != 0)
      throw InputError("univariate form requires a map with no y-dependence");
    maxdeg = std::max(maxdeg, size_t(t.xe[0]));
  }

  UnivariatePoly p;
  p.coeffs.assign(maxdeg + 1, Complex::zero(prec));
  for (const Term& t : f.components()[0]) {
    Complex v = t.coeff.to_complex(wp);
    for (size_t k = 0; k < z.size(); ++k)
      for (unsigned e = 0; e < t.ze[k]; ++e) v = Complex::mul(v, z[k], wp);
    p.coeffs[t.xe[0]] = Complex::add(p.coeffs[t.xe[0]], v, prec);
  }
  return p;
}

UnivariatePoly univariate_from_composed(const ComposedSystem& sys, unsigned prec) {
  const PolynomialMap& f = sys.map();
  if (f.n() != 1) throw InputError("univariate form needs n = 1");
  const unsigned wp = prec + 8;
  const size_t d = sys.d();

  // Dense coefficients of H_{d,eps}: degree d+1, constant term zero.
  CVector h(d + 2, Complex::zero(wp));
  for (size_t i = 1; i <= d; ++i) h[i] = coefficient(sys.sequence(), i, wp);
  h[d + 1] = Complex::add(h[d + 1], sys.eps(), wp);

  // Powers of H, convolved on demand.
  std::vector<CVector> hpow{CVector{Complex::one(wp)}};
  auto power = [&](unsigned k) -> const CVector& {
    while (hpow.size() <= k) hpow.push_back(conv(hpow.back(), h, wp));
    return hpow[k];
  };

  UnivariatePoly p;
  p.coeffs.assign(1, Complex::zero(prec));
  for (const Term& t : f.components()[0]) {
    Complex v = t.coeff.to_complex(wp);
    for (size_t k = 0; k < sys.z().size(); ++k)
      for (unsigned e = 0; e < t.ze[k]; ++e) v = Complex::mul(v, sys.z()[k], wp);

    const CVector& yp = power(t.ye[0]);
    const size_t shift = t.xe[0];
    if (p.coeffs.size() < yp.size() + shift)
      p.coeffs.resize(yp.size() + shift, Complex::zero(prec));
    for (size_t i = 0; i < yp.size(); ++i) {
      if (yp[i].is_zero()) continue;
      p.coeffs[i + shift] =
          Complex::add(p.coeffs[i + shift], Complex::mul(v, yp[i], wp), prec);
    }
  }
  return p;
}

CVector univariate_roots(const UnivariatePoly& p, unsigned prec) {
  size_t top = p.coeffs.size();
  while (top > 0 && p.coeffs[top - 1].is_zero()) --top;
  if (top == 0) throw InputError("roots of the zero polynomial");
  const size_t deg = top - 1;
  if (deg == 0) return {};

  // Exact zero roots come off as a plain x^k factor.
  size_t k = 0;
  while (k < deg && p.coeffs[k].is_zero()) ++k;
  CVector roots(k, Complex::zero(prec));
  if (k == deg) return roots;

  const unsigned wp = prec + 32;
  const size_t m = deg - k;
  CVector c(m + 1);
  for (size_t i = 0; i <= m; ++i)
    c[i] = Complex::div(p.coeffs[k + i], p.coeffs[deg], wp);

  // Start circle: 1 + max |c_i| bounds every root of the monic polynomial.
  BigFloat radius = BigFloat::from_int(0, wp);
  for (size_t i = 0; i < m; ++i) {
    BigFloat a = c[i].abs(wp);
    if (a > radius) radius = a;
  }
  radius = radius + BigFloat::from_int(1, wp);

  const Complex u(BigFloat::from_rational(Rational(3, 5), wp),
                  BigFloat::from_rational(Rational(4, 5), wp));
  CVector w(m);
  Complex spin = u;
  for (size_t j = 0; j < m; ++j) {
    w[j] = Complex::scale(spin, radius, wp);
    spin = Complex::mul(spin, u, wp);
  }

  // Weierstrass corrections, applied in place (each root sees the already
  // updated positions of its predecessors, which speeds settling and keeps
  // the sweep order deterministic).
  const BigFloat stop = BigFloat::pow2(BigInt(-long(prec / 2) + 8), 64);
  const int max_sweeps = 2000;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    BigFloat max_step = BigFloat::zero(64);
    BigFloat max_w = BigFloat::zero(64);
    for (size_t j = 0; j < m; ++j) {
      Complex num = horner(c, m + 1, w[j], wp);
      Complex den = Complex::one(wp);
      for (size_t i = 0; i < m; ++i) {
        if (i == j) continue;
        den = Complex::mul(den, Complex::sub(w[j], w[i], wp), wp);
      }
      if (den.is_zero()) {
        // Two iterates collided exactly; shear one of them off.
        w[j] = Complex::add(w[j], Complex(BigFloat::pow2(BigInt(-long(prec / 2)), wp),
                                          BigFloat::zero(wp)),
                            wp);
        max_step = radius;
        continue;
      }
      Complex delta = Complex::div(num, den, wp);
      w[j] = Complex::sub(w[j], delta, wp);
      BigFloat ds = delta.abs(wp);
      if (ds > max_step) max_step = ds;
      BigFloat aw = w[j].abs(wp);
      if (aw > max_w) max_w = aw;
    }
    if (max_step <= stop * (BigFloat::from_int(1, 64) + max_w)) {
      for (const Complex& r : w)
        roots.emplace_back(r.re.round_to(prec, RoundMode::Nearest),
                           r.im.round_to(prec, RoundMode::Nearest));
      return roots;
    }
  }
  throw NoConvergence("root iteration did not settle in 2000 sweeps");
}

namespace {

std::optional<BigFloat> min_root_norm(const UnivariatePoly& p, unsigned prec) {
  if (p.is_zero()) return std::nullopt;  // no isolated roots at all
  CVector roots = univariate_roots(p, prec);
  if (roots.empty()) return std::nullopt;  // nonzero constant
  BigFloat best = roots[0].abs(prec);
  for (size_t i = 1; i < roots.size(); ++i) {
    BigFloat a = roots[i].abs(prec);
    if (a < best) best = a;
  }
  return best;
}

}  // namespace

std::optional<BigFloat> min_isolated_root_norm(const PolynomialMap& f,
                                               const CVector& z, unsigned prec) {
  return min_root_norm(univariate_from_map(f, z, prec), prec);
}

std::optional<BigFloat> min_isolated_root_norm(const ComposedSystem& sys,
                                               unsigned prec) {
  return min_root_norm(univariate_from_composed(sys, prec), prec);
}

}  // namespace liosolve
