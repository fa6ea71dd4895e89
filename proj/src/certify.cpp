#include "liosolve/certify.hpp"

#include <algorithm>

#include "liosolve/errors.hpp"

namespace liosolve {

CertifyTolerances CertifyTolerances::defaults(unsigned prec) {
  CertifyTolerances t;
  t.residual_tol = BigFloat::pow2(BigInt(-120), 64);
  t.rank_rel_tol = BigFloat::pow2(BigInt(-long(prec / 4)), 64);
  t.det_tol = BigFloat::pow2(BigInt(-long(prec / 4)), 64);
  t.distinctness_tol = BigFloat::pow2(BigInt(-long(prec / 2)), 64);
  t.tangent_tol = BigFloat::pow2(BigInt(-long(prec / 4)), 64);
  return t;
}

namespace {

void split_point(const PolynomialMap& f, const CVector& z, const CVector& point,
                 CVector& x, CVector& y) {
  const size_t n = f.n();
  if (point.size() != 2 * n)
    throw InputError("point must have 2n = " + std::to_string(2 * n) +
                     " coordinates, got " + std::to_string(point.size()));
  if (z.size() != f.r())
    throw InputError("expected " + std::to_string(f.r()) + " parameters, got " +
                     std::to_string(z.size()));
  x.assign(point.begin(), point.begin() + n);
  y.assign(point.begin() + n, point.end());
}

void check_distinctness(const CVector& x, const BigFloat& tol, unsigned prec) {
  for (size_t i = 0; i < x.size(); ++i) {
    if (x[i].abs(prec, RoundMode::Nearest) <= tol)
      throw DistinctnessViolated("x_" + std::to_string(i + 1) +
                                 " is zero within tolerance");
    for (size_t j = i + 1; j < x.size(); ++j) {
      Complex diff = Complex::sub(x[i], x[j], prec);
      if (diff.abs(prec, RoundMode::Nearest) <= tol)
        throw DistinctnessViolated("x_" + std::to_string(i + 1) + " and x_" +
                                   std::to_string(j + 1) +
                                   " coincide within tolerance");
    }
  }
}

// Columns I from the x block and J from the y block of the n x 2n Jacobian,
// as an n x n matrix. |det| does not depend on the column order.
CMatrix witness_minor(const CMatrix& jac, const std::vector<size_t>& I,
                      const std::vector<size_t>& J) {
  const size_t n = jac.rows();
  CMatrix m(n, n);
  size_t col = 0;
  for (size_t i : I) {
    for (size_t row = 0; row < n; ++row) m(row, col) = jac(row, i);
    ++col;
  }
  for (size_t j : J) {
    for (size_t row = 0; row < n; ++row) m(row, col) = jac(row, n + j);
    ++col;
  }
  return m;
}

}  // namespace

ZeroCertificate certify_regular(const PolynomialMap& f, const CVector& z,
                                const CVector& point,
                                const CertifyTolerances& tol, unsigned prec) {
  CVector x, y;
  split_point(f, z, point, x, y);

  ZeroCertificate cert;
  cert.point = point;
  cert.z = z;
  cert.tolerances = tol;

  cert.residual_norm = vec_norm(evaluate(f, x, y, z, prec), prec);
  if (cert.residual_norm > tol.residual_tol)
    throw NotAZero("residual norm " + cert.residual_norm.to_string(6) +
                   " exceeds residual_tol " + tol.residual_tol.to_string(6));

  const CMatrix jac = jacobian(f, x, y, z, prec);
  const std::vector<BigFloat> sv = singular_values(jac, prec);  // descending
  cert.sigma_max = sv.front();
  cert.sigma_min = sv.back();

  if (cert.sigma_max.is_zero()) {
    // The Jacobian vanishes identically at the point: rank 0, nothing
    // ambiguous about it.
    cert.jacobian_rank = 0;
    cert.regular = false;
    return cert;
  }

  const BigFloat ratio = BigFloat::div(cert.sigma_min, cert.sigma_max, prec,
                                       RoundMode::Nearest);
  const BigFloat band_lo = tol.rank_rel_tol / BigFloat::from_int(10, 64);
  const BigFloat band_hi = tol.rank_rel_tol * BigFloat::from_int(10, 64);
  if (ratio >= band_lo && ratio <= band_hi)
    throw PrecisionExhausted("rank ratio " + ratio.to_string(6) +
                             " is inside the ambiguity band around " +
                             tol.rank_rel_tol.to_string(6));

  size_t rank = 0;
  for (const BigFloat& s : sv)
    if (BigFloat::div(s, cert.sigma_max, prec, RoundMode::Nearest) >
        tol.rank_rel_tol)
      ++rank;
  cert.jacobian_rank = rank;
  cert.regular = (rank == f.n());
  return cert;
}

std::optional<WitnessPartition> find_balanced_witness(
    const PolynomialMap& f, const CVector& z, const CVector& point,
    const CertifyTolerances& tol, unsigned prec) {
  CVector x, y;
  split_point(f, z, point, x, y);
  check_distinctness(x, tol.distinctness_tol, prec);

  const size_t n = f.n();
  const CMatrix jac = jacobian(f, x, y, z, prec);

  std::optional<WitnessPartition> best;
  for (size_t mask = 0; mask < (size_t(1) << n); ++mask) {
    WitnessPartition cand;
    for (size_t i = 0; i < n; ++i) {
      if (mask & (size_t(1) << i))
        cand.I.push_back(i);
      else
        cand.J.push_back(i);
    }
    cand.det_magnitude =
        determinant(witness_minor(jac, cand.I, cand.J), prec).abs(prec);
    if (cand.det_magnitude <= tol.det_tol) continue;
    if (!best || cand.det_magnitude > best->det_magnitude ||
        (cand.det_magnitude == best->det_magnitude &&
         std::lexicographical_compare(cand.I.begin(), cand.I.end(),
                                      best->I.begin(), best->I.end()))) {
      best = std::move(cand);
    }
  }
  return best;
}

ZeroCertificate certify_well_balanced(const PolynomialMap& f, const CVector& z,
                                      const CVector& point,
                                      const CertifyTolerances& tol,
                                      unsigned prec) {
  ZeroCertificate cert = certify_regular(f, z, point, tol, prec);
  if (!cert.regular) return cert;

  cert.witness = find_balanced_witness(f, z, point, tol, prec);
  if (!cert.witness) return cert;
  cert.balanced = true;

  // At a regular zero the kernel of the n x 2n Jacobian has dimension n.
  // With an orthonormal basis in the columns of B (2n x n), the largest
  // |x_i - component| over unit kernel vectors is exactly the norm of the
  // i-th row of B, so the tangent space avoids every hyperplane x_i = c
  // iff all x rows carry mass.
  const size_t n = f.n();
  CVector x(point.begin(), point.begin() + n);
  CVector y(point.begin() + n, point.end());
  const CMatrix jac = jacobian(f, x, y, z, prec);
  const CMatrix basis = kernel_basis(jac, n, prec);

  bool all_rows_massive = true;
  for (size_t i = 0; i < n; ++i) {
    if (vec_norm(basis.row(i), prec) <= tol.tangent_tol) {
      all_rows_massive = false;
      break;
    }
  }
  cert.well_balanced = all_rows_massive;
  return cert;
}

PolynomialMap augment_for_inverse(const PolynomialMap& f,
                                  const std::vector<Term>& p,
                                  const std::vector<size_t>& I,
                                  const std::vector<size_t>& J) {
  const size_t n = f.n();
  const size_t r = f.r();

  bool p_nonzero = false;
  for (const Term& t : p) {
    if (!t.coeff.is_zero()) p_nonzero = true;
    if (t.xe.size() != n || t.ye.size() != n || t.ze.size() != r)
      throw InputError("P term exponent vectors must match the (n, n, r) layout");
    for (size_t i = 0; i < n; ++i) {
      if (t.xe[i] != 0 && std::find(I.begin(), I.end(), i) == I.end())
        throw InputError("P touches x_" + std::to_string(i + 1) +
                         " which is not in I");
      if (t.ye[i] != 0 && std::find(J.begin(), J.end(), i) == J.end())
        throw InputError("P touches y_" + std::to_string(i + 1) +
                         " which is not in J");
    }
    for (unsigned e : t.ze)
      if (e != 0) throw InputError("P may not involve the parameters");
  }
  if (!p_nonzero) throw ZeroPolynomial("P is identically zero");

  // Re-embed everything with one extra variable pair.
  auto widen = [n](const Term& t, unsigned extra_y) {
    Term w = t;
    w.xe.resize(n + 1, 0);
    w.ye.resize(n + 1, 0);
    w.ye[n] += extra_y;
    return w;
  };

  std::vector<std::vector<Term>> comps;
  comps.reserve(n + 1);
  for (const auto& comp : f.components()) {
    std::vector<Term> widened;
    widened.reserve(comp.size());
    for (const Term& t : comp) widened.push_back(widen(t, 0));
    comps.push_back(std::move(widened));
  }

  std::vector<Term> last;
  last.reserve(p.size() + 1);
  for (const Term& t : p) last.push_back(widen(t, 1));  // P * y_{n+1}
  Term minus_one;
  minus_one.coeff = GaussianRational(-1);
  minus_one.xe.assign(n + 1, 0);
  minus_one.ye.assign(n + 1, 0);
  minus_one.ze.assign(r, 0);
  last.push_back(minus_one);
  comps.push_back(std::move(last));

  return PolynomialMap::make(n + 1, r, std::move(comps));
}

DegreeBounds degree_bounds(unsigned n, unsigned r) {
  if (n < 1) throw InputError("degree bounds need n >= 1");
  DegreeBounds b;
  const BigInt N = n, R = r;
  b.inductive = N * (N * R + N + R + 1);
  b.finiteness = N * (R + 1) + R;
  return b;
}

}  // namespace liosolve
