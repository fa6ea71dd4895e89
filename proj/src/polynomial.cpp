#include "liosolve/polynomial.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <tuple>

namespace liosolve {

namespace {

size_t total_degree(const Term& t) {
  size_t deg = 0;
  for (unsigned e : t.xe) deg += e;
  for (unsigned e : t.ye) deg += e;
  for (unsigned e : t.ze) deg += e;
  return deg;
}

using ExpKey = std::tuple<std::vector<unsigned>, std::vector<unsigned>, std::vector<unsigned>>;

}  // namespace

PolynomialMap PolynomialMap::make(size_t n, size_t r,
                                  std::vector<std::vector<Term>> components) {
  if (n < 1) throw InputError("polynomial map needs n >= 1");
  if (components.size() != n)
    throw InputError("polynomial map needs exactly n component polynomials");
  PolynomialMap f;
  f.n_ = n;
  f.r_ = r;
  f.components_.resize(n);
  for (size_t c = 0; c < n; ++c) {
    std::map<ExpKey, GaussianRational> merged;
    for (const Term& t : components[c]) {
      if (t.xe.size() != n || t.ye.size() != n || t.ze.size() != r)
        throw InputError("term exponent vectors must have sizes n, n, r");
      ExpKey key{t.xe, t.ye, t.ze};
      auto [it, fresh] = merged.emplace(key, t.coeff);
      if (!fresh) it->second = it->second + t.coeff;
    }
    std::vector<Term>& out = f.components_[c];
    for (auto& [key, coeff] : merged) {
      if (coeff.is_zero()) continue;
      out.push_back(Term{std::move(coeff), std::get<0>(key), std::get<1>(key), std::get<2>(key)});
    }
    std::stable_sort(out.begin(), out.end(), [](const Term& a, const Term& b) {
      size_t da = total_degree(a), db = total_degree(b);
      if (da != db) return da < db;
      return std::tie(a.xe, a.ye, a.ze) < std::tie(b.xe, b.ye, b.ze);
    });
  }
  return f;
}

std::vector<Term> PolynomialMap::derivative(size_t comp, size_t var) const {
  if (comp >= n_ || var >= 2 * n_) throw InputError("derivative index out of range");
  std::vector<Term> out;
  for (const Term& t : components_[comp]) {
    const std::vector<unsigned>& exps = var < n_ ? t.xe : t.ye;
    size_t idx = var < n_ ? var : var - n_;
    unsigned e = exps[idx];
    if (e == 0) continue;
    Term dt = t;
    GaussianRational factor{Rational(e), Rational(0)};
    dt.coeff = dt.coeff * factor;
    (var < n_ ? dt.xe : dt.ye)[idx] = e - 1;
    out.push_back(std::move(dt));
  }
  return out;
}

namespace {

// Power tables powers[v][k] = value_v^k up to the largest exponent used.
std::vector<std::vector<Complex>> power_table(const CVector& vals,
                                              const std::vector<unsigned>& max_exp,
                                              unsigned prec) {
  std::vector<std::vector<Complex>> table(vals.size());
  for (size_t v = 0; v < vals.size(); ++v) {
    table[v].resize(max_exp[v] + 1);
    table[v][0] = Complex::one(prec);
    for (unsigned k = 1; k <= max_exp[v]; ++k)
      table[v][k] = Complex::mul(table[v][k - 1], vals[v], prec);
  }
  return table;
}

// Evaluate one canonical term list: compute every term value, then sum in
// increasing magnitude order (deterministic: exact |.|^2 comparisons with a
// stable tie-break on term order).
Complex eval_terms(const std::vector<Term>& terms, const CVector& x, const CVector& y,
                   const CVector& z, unsigned prec) {
  unsigned w = prec + 8;
  size_t n = x.size(), r = z.size();
  std::vector<unsigned> mx(n, 0), my(n, 0), mz(r, 0);
  for (const Term& t : terms) {
    for (size_t j = 0; j < n; ++j) {
      mx[j] = std::max(mx[j], t.xe[j]);
      my[j] = std::max(my[j], t.ye[j]);
    }
    for (size_t j = 0; j < r; ++j) mz[j] = std::max(mz[j], t.ze[j]);
  }
  auto px = power_table(x, mx, w);
  auto py = power_table(y, my, w);
  auto pz = power_table(z, mz, w);

  CVector vals;
  vals.reserve(terms.size());
  for (const Term& t : terms) {
    Complex v = t.coeff.to_complex(w);
    for (size_t j = 0; j < n; ++j) {
      if (t.xe[j]) v = Complex::mul(v, px[j][t.xe[j]], w);
      if (t.ye[j]) v = Complex::mul(v, py[j][t.ye[j]], w);
    }
    for (size_t j = 0; j < r; ++j)
      if (t.ze[j]) v = Complex::mul(v, pz[j][t.ze[j]], w);
    vals.push_back(std::move(v));
  }
  std::vector<size_t> order(vals.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return vals[a].norm2(w) < vals[b].norm2(w);
  });
  Complex acc = Complex::zero(w);
  for (size_t idx : order) acc = Complex::add(acc, vals[idx], w);
  return Complex(acc.re.round_to(prec), acc.im.round_to(prec));
}

void check_dims(const PolynomialMap& f, const CVector& x, const CVector& y, const CVector& z) {
  if (x.size() != f.n() || y.size() != f.n() || z.size() != f.r())
    throw InputError("evaluation point dimensions do not match the map");
}

}  // namespace

CVector evaluate(const PolynomialMap& f, const CVector& x, const CVector& y,
                 const CVector& z, unsigned prec) {
  check_dims(f, x, y, z);
  CVector out(f.n());
  for (size_t c = 0; c < f.n(); ++c) out[c] = eval_terms(f.components()[c], x, y, z, prec);
  return out;
}

CMatrix jacobian(const PolynomialMap& f, const CVector& x, const CVector& y,
                 const CVector& z, unsigned prec) {
  check_dims(f, x, y, z);
  size_t n = f.n();
  CMatrix jac(n, 2 * n, Complex::zero(prec));
  for (size_t c = 0; c < n; ++c)
    for (size_t v = 0; v < 2 * n; ++v)
      jac(c, v) = eval_terms(f.derivative(c, v), x, y, z, prec);
  return jac;
}

GVector evaluate_exact(const PolynomialMap& f, const GVector& x, const GVector& y,
                       const GVector& z) {
  if (x.size() != f.n() || y.size() != f.n() || z.size() != f.r())
    throw InputError("evaluation point dimensions do not match the map");
  GVector out(f.n());
  for (size_t c = 0; c < f.n(); ++c) {
    GaussianRational acc;
    for (const Term& t : f.components()[c]) {
      GaussianRational v = t.coeff;
      for (size_t j = 0; j < f.n(); ++j) {
        for (unsigned k = 0; k < t.xe[j]; ++k) v = v * x[j];
        for (unsigned k = 0; k < t.ye[j]; ++k) v = v * y[j];
      }
      for (size_t j = 0; j < f.r(); ++j)
        for (unsigned k = 0; k < t.ze[j]; ++k) v = v * z[j];
      acc = acc + v;
    }
    out[c] = acc;
  }
  return out;
}

ComposedSystem::ComposedSystem(PolynomialMap f, LiouvilleSequence seq, CVector z,
                               size_t d, Complex eps)
    : f_(std::move(f)), seq_(std::move(seq)), z_(std::move(z)), d_(d), eps_(std::move(eps)) {
  if (z_.size() != f_.r()) throw InputError("parameter vector length must equal r");
}

ComposedSystem ComposedSystem::with(size_t d, Complex eps) const {
  ComposedSystem copy = *this;
  copy.d_ = d;
  copy.eps_ = std::move(eps);
  return copy;
}

CVector compose_eval(const ComposedSystem& sys, const CVector& x, unsigned prec) {
  if (x.size() != sys.map().n()) throw InputError("point dimension must equal n");
  CVector y(x.size());
  for (size_t j = 0; j < x.size(); ++j)
    y[j] = eval_partial_sum(sys.sequence(), sys.d(), sys.eps(), x[j], prec);
  return evaluate(sys.map(), x, y, sys.z(), prec);
}

CMatrix compose_jacobian(const ComposedSystem& sys, const CVector& x, unsigned prec) {
  if (x.size() != sys.map().n()) throw InputError("point dimension must equal n");
  size_t n = x.size();
  unsigned w = prec + 8;
  CVector y(n), hp(n);
  for (size_t j = 0; j < n; ++j) {
    y[j] = eval_partial_sum(sys.sequence(), sys.d(), sys.eps(), x[j], w);
    hp[j] = eval_partial_sum_derivative(sys.sequence(), sys.d(), sys.eps(), x[j], w);
  }
  CMatrix full = jacobian(sys.map(), x, y, sys.z(), w);
  CMatrix jac(n, n, Complex::zero(prec));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) {
      Complex chain = Complex::mul(full(i, n + j), hp[j], w);
      Complex v = Complex::add(full(i, j), chain, w);
      jac(i, j) = Complex(v.re.round_to(prec), v.im.round_to(prec));
    }
  return jac;
}

CVector compose_eps_derivative(const ComposedSystem& sys, const CVector& x, unsigned prec) {
  if (x.size() != sys.map().n()) throw InputError("point dimension must equal n");
  size_t n = x.size();
  unsigned w = prec + 8;
  CVector y(n), xd(n);
  for (size_t j = 0; j < n; ++j) {
    y[j] = eval_partial_sum(sys.sequence(), sys.d(), sys.eps(), x[j], w);
    Complex p = Complex::one(w);
    for (size_t k = 0; k < sys.d() + 1; ++k) p = Complex::mul(p, x[j], w);
    xd[j] = p;  // x_j^(d+1)
  }
  CMatrix full = jacobian(sys.map(), x, y, sys.z(), w);
  CVector out(n);
  for (size_t i = 0; i < n; ++i) {
    Complex acc = Complex::zero(w);
    for (size_t j = 0; j < n; ++j)
      acc = Complex::add(acc, Complex::mul(full(i, n + j), xd[j], w), w);
    out[i] = Complex(acc.re.round_to(prec), acc.im.round_to(prec));
  }
  return out;
}

GVector compose_eval_exact(const PolynomialMap& f, const LiouvilleSequence& seq,
                           const GVector& z, size_t d, const GaussianRational& eps,
                           const GVector& x) {
  if (x.size() != f.n()) throw InputError("point dimension must equal n");
  GVector y(x.size());
  for (size_t j = 0; j < x.size(); ++j) y[j] = eval_partial_sum_exact(seq, d, eps, x[j]);
  return evaluate_exact(f, x, y, z);
}

}  // namespace liosolve
