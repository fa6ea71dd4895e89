#pragma once

// Dense univariate complex polynomials. They come from two places: a
// one-variable polynomial map with the parameters substituted, or a
// composed system at a fixed truncation expanded into coefficient form.
// Roots are found simultaneously by the Weierstrass correction iteration
// with a deterministic start configuration, which is what the minimum
// isolated-root-norm functional N_F is built on.

#include <optional>
#include <vector>

#include "liosolve/complex.hpp"
#include "liosolve/polynomial.hpp"

namespace liosolve {

struct UnivariatePoly {
  CVector coeffs;  // coeffs[k] multiplies x^k; exact zeros stay exact

  // Degree after trimming exact-zero leading coefficients; 0 for constants
  // and for the zero polynomial (check is_zero first).
  size_t degree() const;
  bool is_zero() const;
};

// Requires n = 1 and no y-dependence; coefficient k collects coeff * z^ze
// over all terms with x-exponent k. With exact parameter values the dead
// terms vanish exactly (z = 0 really removes the quadratic from
// z x^2 - 2x + 1).
UnivariatePoly univariate_from_map(const PolynomialMap& f, const CVector& z,
                                   unsigned prec);

// Dense expansion of Phi(x) = F(x, H_{d,eps}(x), z) for n = 1: powers of
// the partial sum are convolved out term by term.
UnivariatePoly univariate_from_composed(const ComposedSystem& sys, unsigned prec);

// All roots, multiplicity counted. Exact zero roots split off symbolically;
// the rest run the Weierstrass iteration from points radius * ((3+4i)/5)^k,
// a deterministic spread on a circle (the angle is an irrational multiple
// of pi, so the starts never collide). Simple roots resolve essentially to
// working precision; multiple roots land as clusters of radius around
// 2^(-prec/2). Throws InputError on the zero polynomial, NoConvergence if
// the iteration cap is hit.
CVector univariate_roots(const UnivariatePoly& p, unsigned prec);

// min |root|, or nullopt (plus infinity) when there are no roots: the zero
// polynomial (no isolated roots at all) and nonzero constants.
std::optional<BigFloat> min_isolated_root_norm(const PolynomialMap& f,
                                               const CVector& z, unsigned prec);
std::optional<BigFloat> min_isolated_root_norm(const ComposedSystem& sys,
                                               unsigned prec);

}  // namespace liosolve
