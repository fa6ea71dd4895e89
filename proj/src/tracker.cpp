#include "liosolve/tracker.hpp"

#include <algorithm>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "liosolve/errors.hpp"
#include "liosolve/linalg.hpp"

namespace liosolve {

namespace {

constexpr unsigned kTolBits = 64;

BigFloat tpow2(long k) { return BigFloat::pow2(BigInt(k), kTolBits); }

CVector vec_neg(const CVector& v) {
  CVector out;
  out.reserve(v.size());
  for (const Complex& c : v) out.push_back(c.neg());
  return out;
}

BigFloat pow_mag_up(const BigFloat& base, unsigned e, unsigned prec) {
  BigFloat r = BigFloat::from_int(1, prec);
  for (unsigned i = 0; i < e; ++i) r = BigFloat::mul(r, base, prec, RoundMode::Away);
  return r;
}

// Upper bound on the summed magnitude of a term list over the polydisc
// |x_i| <= rx, |y_j| <= ry with z pinned to zmag.
BigFloat terms_mag_up(const std::vector<Term>& terms, const std::vector<BigFloat>& zmag,
                      const BigFloat& rx, const BigFloat& ry, unsigned prec) {
  BigFloat total = BigFloat::zero(prec);
  for (const Term& t : terms) {
    Rational cm = abs(t.coeff.re) + abs(t.coeff.im);
    BigFloat m = BigFloat::from_rational(cm, prec, RoundMode::Away);
    unsigned sx = 0, sy = 0;
    for (unsigned e : t.xe) sx += e;
    for (unsigned e : t.ye) sy += e;
    m = BigFloat::mul(m, pow_mag_up(rx, sx, prec), prec, RoundMode::Away);
    m = BigFloat::mul(m, pow_mag_up(ry, sy, prec), prec, RoundMode::Away);
    for (size_t k = 0; k < t.ze.size(); ++k)
      for (unsigned e = 0; e < t.ze[k]; ++e)
        m = BigFloat::mul(m, zmag[k], prec, RoundMode::Away);
    total = BigFloat::add(total, m, prec, RoundMode::Away);
  }
  return total;
}

// Frobenius bound on dF/dy over the polydisc; dominates the operator norm.
BigFloat dy_frobenius_up(const PolynomialMap& f, const std::vector<BigFloat>& zmag,
                         const BigFloat& rx, const BigFloat& ry, unsigned prec) {
  const size_t n = f.n();
  BigFloat sum2 = BigFloat::zero(prec);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) {
      BigFloat e = terms_mag_up(f.derivative(i, n + j), zmag, rx, ry, prec);
      sum2 = BigFloat::add(sum2, BigFloat::mul(e, e, prec, RoundMode::Away), prec,
                           RoundMode::Away);
    }
  return BigFloat::sqrt(sum2, prec, RoundMode::Away);
}

// Upper bound on sup_{|x| <= rx} |H_d(x)|.
BigFloat partial_sum_mag_up(const LiouvilleSequence& seq, size_t d, const BigFloat& rx,
                            unsigned prec) {
  BigFloat s = BigFloat::zero(prec);
  for (size_t i = 1; i <= d; ++i) {
    BigFloat c = seq.coefficient_real(i, prec, RoundMode::Away).abs();
    s = BigFloat::add(s, BigFloat::mul(pow_mag_up(rx, unsigned(i), prec), c, prec, RoundMode::Away),
                      prec, RoundMode::Away);
  }
  return s;
}

// Rounding slack for one composed evaluation: every arithmetic step moves
// the result by at most an ulp of the running magnitude, the magnitudes are
// bounded by the polydisc estimate, and the operation count per component is
// bounded by terms + degree + the Horner chain for H_d. First order model
// with a 2^4 headroom factor, not a formal interval evaluation; it only has
// to dominate the ~2^(10-prec) noise actually seen on converged points.
BigFloat eval_slack_up(const PolynomialMap& f, const std::vector<BigFloat>& zmag, size_t d,
                       const BigFloat& rx, const BigFloat& ry, unsigned prec) {
  BigFloat e_total = BigFloat::zero(prec);
  size_t max_terms = 0;
  unsigned max_deg = 0;
  for (const std::vector<Term>& comp : f.components()) {
    e_total = BigFloat::add(e_total, terms_mag_up(comp, zmag, rx, ry, prec), prec,
                            RoundMode::Away);
    max_terms = std::max(max_terms, comp.size());
    for (const Term& t : comp) {
      unsigned deg = 0;
      for (unsigned e : t.xe) deg += e;
      for (unsigned e : t.ye) deg += e;
      for (unsigned e : t.ze) deg += e;
      max_deg = std::max(max_deg, deg);
    }
  }
  long ops = long(max_terms) + long(max_deg) + long(d) + 16;
  BigFloat count = BigFloat::from_int(ops, prec);
  BigFloat unit = BigFloat::pow2(BigInt(4) - BigInt(prec), prec);
  return BigFloat::mul(BigFloat::mul(e_total, count, prec, RoundMode::Away), unit, prec,
                       RoundMode::Away);
}

struct Attempt {
  bool ok = false;
  CVector x;
  BigFloat residual;
  size_t iters = 0;
  bool stalled = false;  // residual pinned just above newton_tol by eval noise
  const char* reason = "iteration budget exhausted";
};

Attempt newton_attempt(const ComposedSystem& sys, const CVector& x0,
                       const TrackerConfig& cfg, unsigned prec) {
  Attempt out;
  CVector x = x0;
  const BigFloat one = BigFloat::from_int(1, prec);
  const BigFloat escape = BigFloat::add(
      BigFloat::mul(cfg.r_max, BigFloat::from_int(4, prec), prec),
      BigFloat::from_int(10, prec), prec);
  const BigFloat sing_unit = BigFloat::pow2(BigInt(-long(prec / 2)), kTolBits);
  const BigFloat floor_unit = BigFloat::pow2(BigInt(32) - BigInt(prec), kTolBits);

  CVector phi = compose_eval(sys, x, prec);
  BigFloat residual = vec_norm(phi, prec);
  std::vector<BigFloat> steps;

  for (size_t it = 1; it <= cfg.max_newton_iters; ++it) {
    CMatrix jac = compose_jacobian(sys, x, prec);
    std::vector<BigFloat> sv = singular_values(jac, prec);
    const BigFloat& smax = sv.front();
    const BigFloat& smin = sv.back();
    if (smax.is_zero() ||
        smin <= BigFloat::mul(sing_unit, BigFloat::add(one, smax, prec), prec))
      throw SingularJacobian("newton: jacobian singular to working precision");

    CVector step = lu_solve(jac, vec_neg(phi), prec);
    x = vec_add(x, step, prec);
    BigFloat step_norm = vec_norm(step, prec);
    steps.push_back(step_norm);

    phi = compose_eval(sys, x, prec);
    residual = vec_norm(phi, prec);
    BigFloat norm_x = vec_norm(x, prec);
    out.iters = it;
    if (norm_x > escape) {
      out.reason = "iterates diverged";
      break;
    }

    BigFloat scale = BigFloat::add(one, norm_x, prec);
    if (residual <= cfg.newton_tol &&
        step_norm <= BigFloat::mul(cfg.newton_tol, scale, prec)) {
      // demand superlinear step decay, waived once steps reach the
      // rounding floor where their sizes are pure noise
      if (steps.size() >= 3) {
        const BigFloat& s1 = steps[steps.size() - 3];
        const BigFloat& s2 = steps[steps.size() - 2];
        const BigFloat& s3 = steps[steps.size() - 1];
        bool at_floor = s3 <= BigFloat::mul(floor_unit, scale, prec);
        bool superlinear =
            s3 <= s2.ldexp(BigInt(-2)) && s2 <= s1.ldexp(BigInt(-2));
        if (!at_floor && !superlinear) {
          out.reason = "step decay is not superlinear";
          break;
        }
      }
      out.ok = true;
      out.x = std::move(x);
      out.residual = std::move(residual);
      return out;
    }
  }

  out.x = std::move(x);
  out.residual = residual;
  BigFloat band_hi = BigFloat::sqrt(cfg.newton_tol, kTolBits, RoundMode::Away);
  out.stalled = residual > cfg.newton_tol && residual <= band_hi;
  return out;
}

}  // namespace

TrackerConfig TrackerConfig::defaults(unsigned prec) {
  TrackerConfig cfg;
  cfg.precision_bits = prec;
  const long p = long(prec);
  cfg.newton_tol = tpow2(-(3 * p) / 4);
  // 2^-120 unless the precision cannot reach that; keep an 8 bit gap to
  // newton_tol either way
  cfg.residual_tol = tpow2(std::max(-120L, -(3 * p) / 4 + 8));
  cfg.distinctness_tol = tpow2(-p / 2);
  cfg.r_max = BigFloat::from_int(10, kTolBits);
  return cfg;
}

void TrackerConfig::validate() const {
  if (precision_bits < 64) throw InputError("tracker: precision must be at least 64 bits");
  if (d_max < 1 || d_max > 64) throw InputError("tracker: d_max must be in 1..64");
  if (d_start > d_max) throw InputError("tracker: d_start exceeds d_max");
  if (max_newton_iters < 1) throw InputError("tracker: max_newton_iters must be positive");
  if (max_substeps_per_epsilon < 1)
    throw InputError("tracker: max_substeps_per_epsilon must be positive");
  if (multistart_budget < 1) throw InputError("tracker: multistart_budget must be positive");
  if (residual_tol.sign() <= 0 || newton_tol.sign() <= 0 || distinctness_tol.sign() <= 0)
    throw InputError("tracker: tolerances must be positive (start from defaults())");
  if (newton_tol > residual_tol)
    throw InputError("tracker: newton_tol must not exceed residual_tol");
  if (r_max.sign() <= 0) throw InputError("tracker: r_max must be positive");
}

NewtonOutcome newton_correct(const ComposedSystem& sys, const CVector& x0,
                             const TrackerConfig& config) {
  Attempt first = newton_attempt(sys, x0, config, config.precision_bits);
  if (first.ok)
    return NewtonOutcome{std::move(first.x), std::move(first.residual), first.iters,
                         config.precision_bits};
  if (first.stalled) {
    // the residual tracks the evaluation noise floor instead of the distance
    // to the root; one retry at doubled precision resolves which it is
    const unsigned prec2 = config.precision_bits * 2;
    Attempt second = newton_attempt(sys, x0, config, prec2);
    if (second.ok)
      return NewtonOutcome{std::move(second.x), std::move(second.residual), second.iters,
                           prec2};
    throw NoConvergence(std::string("newton: ") + second.reason +
                        " (even after precision escalation)");
  }
  throw NoConvergence(std::string("newton: ") + first.reason);
}

CVector find_start_root(const PolynomialMap& f, const CVector& z,
                        const LiouvilleSequence& seq, size_t d0,
                        const TrackerConfig& config) {
  config.validate();
  if (d0 < 1) throw InputError("find_start_root: truncation degree must be at least 1");
  if (z.size() != f.r()) throw InputError("find_start_root: wrong parameter count");
  const unsigned prec = config.precision_bits;
  const size_t n = f.n();
  const ComposedSystem sys(f, seq, z, d0, Complex::zero(prec));

  const BigFloat cond_gate = BigFloat::pow2(BigInt(-long(prec / 4)), kTolBits);
  const BigFloat one = BigFloat::from_int(1, prec);

  std::mt19937_64 rng(config.rng_seed);
  // 53-bit uniforms on [-1, 1); spelled out rather than taken from
  // std::uniform_real_distribution so runs reproduce across platforms
  auto unit = [&rng]() { return double(rng() >> 11) * 0x1p-52 - 1.0; };

  auto sample_ball = [&]() {
    CVector x;
    for (int tries = 0; tries < 64; ++tries) {
      x.clear();
      for (size_t i = 0; i < n; ++i) {
        BigFloat re = BigFloat::mul(config.r_max, BigFloat::from_double(unit(), prec), prec);
        BigFloat im = BigFloat::mul(config.r_max, BigFloat::from_double(unit(), prec), prec);
        x.emplace_back(std::move(re), std::move(im));
      }
      if (vec_norm(x, prec) <= config.r_max) return x;
    }
    // rejection keeps missing (plausible only at high n); squeeze the last
    // cube sample into the ball instead
    BigFloat shrink =
        BigFloat::div(config.r_max,
                      BigFloat::add(vec_norm(x, prec, RoundMode::Away), one, prec),
                      prec, RoundMode::ToZero);
    return vec_scale(x, Complex(shrink), prec);
  };

  struct Candidate {
    CVector x;
    BigFloat norm;
  };
  std::vector<Candidate> roots;

  for (size_t trial = 0; trial < config.multistart_budget; ++trial) {
    CVector start = sample_ball();
    NewtonOutcome o;
    try {
      o = newton_correct(sys, start, config);
    } catch (const SingularJacobian&) {
      continue;
    } catch (const NoConvergence&) {
      continue;
    }

    BigFloat norm_x = vec_norm(o.x, prec);
    if (norm_x > config.r_max) continue;

    CMatrix jac = compose_jacobian(sys, o.x, prec);
    std::vector<BigFloat> sv = singular_values(jac, prec);
    if (sv.front().is_zero() ||
        sv.back() <= BigFloat::mul(cond_gate, sv.front(), prec))
      continue;

    bool distinct = true;
    for (size_t i = 0; i < n && distinct; ++i) {
      if (o.x[i].abs(prec) <= config.distinctness_tol) distinct = false;
      for (size_t j = i + 1; j < n && distinct; ++j)
        if (Complex::sub(o.x[i], o.x[j], prec).abs(prec) <= config.distinctness_tol)
          distinct = false;
    }
    if (!distinct) continue;

    bool fresh = true;
    for (const Candidate& c : roots) {
      BigFloat gap = vec_norm(vec_sub(o.x, c.x, prec), prec);
      BigFloat near = BigFloat::mul(config.newton_tol, BigFloat::add(one, c.norm, prec), prec);
      if (gap <= near) {
        fresh = false;
        break;
      }
    }
    if (fresh) roots.push_back(Candidate{std::move(o.x), std::move(norm_x)});
  }

  if (roots.empty())
    throw StartNotFound("find_start_root: no admissible root at d = " + std::to_string(d0) +
                        " within the multistart budget");

  // smallest norm wins; exact norm ties fall back to coordinate order
  const Candidate* best = &roots.front();
  for (const Candidate& c : roots) {
    if (&c == best) continue;
    int cmp = BigFloat::compare(c.norm, best->norm);
    if (cmp > 0) continue;
    if (cmp < 0) {
      best = &c;
      continue;
    }
    for (size_t i = 0; i < n; ++i) {
      int cr = BigFloat::compare(c.x[i].re, best->x[i].re);
      if (cr != 0) {
        if (cr < 0) best = &c;
        break;
      }
      int ci = BigFloat::compare(c.x[i].im, best->x[i].im);
      if (ci != 0) {
        if (ci < 0) best = &c;
        break;
      }
    }
  }
  return best->x;
}

TrackSegment track_epsilon(const PolynomialMap& f, const CVector& z,
                           const LiouvilleSequence& seq, size_t d,
                           const CVector& x_at_zero, const Complex& eps_target,
                           const TrackerConfig& config) {
  config.validate();
  if (z.size() != f.r() || x_at_zero.size() != f.n())
    throw InputError("track_epsilon: dimension mismatch");
  const unsigned prec = config.precision_bits;

  TrackSegment seg;
  seg.x = x_at_zero;
  if (eps_target.is_zero()) return seg;

  const ComposedSystem base(f, seq, z, d, Complex::zero(prec));

  // Dyadic clock: t and dt stay exactly representable, so eps(t) is an exact
  // multiple of eps_target and the final substep lands on it bit for bit.
  const unsigned tprec = 96;
  const BigFloat one_t = BigFloat::from_int(1, tprec);
  const BigFloat dt_floor = BigFloat::pow2(BigInt(-60), tprec);
  BigFloat t = BigFloat::zero(tprec);
  BigFloat dt = one_t;

  CVector x = x_at_zero;
  size_t attempts = 0;
  bool last_was_singular = false;
  std::string last_message = "none";
  const BigFloat one_p = BigFloat::from_int(1, prec);
  // predictor displacement cap per substep, relative to the point scale
  const BigFloat trust_frac = BigFloat::pow2(BigInt(-3), kTolBits);

  auto halve = [&](bool singular, std::string msg) {
    last_was_singular = singular;
    last_message = std::move(msg);
    dt = dt.ldexp(BigInt(-1));
    if (dt < dt_floor) {
      if (last_was_singular)
        throw SingularJacobian("track_epsilon: corrector stays singular at the minimum "
                               "step width (" + last_message + ")");
      throw SubstepLimit("track_epsilon: step width collapsed (" + last_message + ")");
    }
  };

  while (t < one_t) {
    if (attempts >= config.max_substeps_per_epsilon)
      throw SubstepLimit("track_epsilon: substep budget exhausted (last failure: " +
                         last_message + ")");
    ++attempts;

    BigFloat t_next = BigFloat::add(t, dt, tprec);
    if (t_next > one_t) {
      dt = BigFloat::sub(one_t, t, tprec);
      t_next = one_t;
    }
    const Complex eps_next = Complex::scale(eps_target, t_next, prec);

    // Euler predictor along dPhi/deps; keep the frozen point when the
    // velocity solve is unavailable
    CVector x_pred = x;
    bool trusted = true;
    try {
      ComposedSystem here = base.with(d, Complex::scale(eps_target, t, prec));
      CMatrix jac = compose_jacobian(here, x, prec);
      CVector vel = lu_solve(jac, vec_neg(compose_eps_derivative(here, x, prec)), prec);
      const Complex eps_step = Complex::scale(eps_target, dt, prec);
      CVector shift;
      shift.reserve(vel.size());
      for (const Complex& v : vel) shift.push_back(Complex::mul(v, eps_step, prec));
      // the Euler error grows with the square of the displacement; refuse
      // jumps past an eighth of the point scale so the corrector cannot
      // slide into a neighboring root basin
      BigFloat reach = BigFloat::mul(
          trust_frac, BigFloat::add(one_p, vec_norm(x, prec), prec), prec);
      if (vec_norm(shift, prec) > reach)
        trusted = false;
      else
        x_pred = vec_add(x, shift, prec);
    } catch (const SingularJacobian&) {
    }
    if (!trusted) {
      halve(false, "predictor displacement exceeded the trust region");
      continue;
    }

    bool accepted = false;
    try {
      NewtonOutcome o = newton_correct(base.with(d, eps_next), x_pred, config);
      BigFloat norm_x = vec_norm(o.x, prec);
      if (norm_x > config.r_max)
        throw PathEscapedBall("track_epsilon: accepted point left the working ball");
      x = std::move(o.x);
      t = t_next;
      seg.states.push_back(
          PathState{d, eps_next, x, o.iters, std::move(norm_x), std::move(o.residual)});
      accepted = true;
    } catch (const PathEscapedBall&) {
      throw;
    } catch (const SingularJacobian& e) {
      halve(true, e.what());
      continue;
    } catch (const NoConvergence& e) {
      halve(false, e.what());
      continue;
    }

    if (accepted && t < one_t) {
      BigFloat rem = BigFloat::sub(one_t, t, tprec);
      dt = dt.ldexp(BigInt(1));
      if (dt > rem) dt = rem;
    }
  }

  seg.x = std::move(x);
  return seg;
}

LimitRoot solve(const PolynomialMap& f, const CVector& z, const LiouvilleSequence& seq,
                const TrackerConfig& config) {
  config.validate();
  if (z.size() != f.r()) throw InputError("solve: wrong parameter count");
  const unsigned prec = config.precision_bits;
  const size_t n = f.n();
  const BigFloat one = BigFloat::from_int(1, prec);

  size_t d = 0;
  CVector x;
  if (config.d_start == 0) {
    for (size_t cand = 1; cand <= config.d_max && d == 0; ++cand) {
      try {
        x = find_start_root(f, z, seq, cand, config);
        d = cand;
      } catch (const StartNotFound&) {
      }
    }
    if (d == 0)
      throw StartNotFound("solve: no start root at any degree up to " +
                          std::to_string(config.d_max));
  } else {
    x = find_start_root(f, z, seq, config.d_start, config);
    d = config.d_start;
  }

  std::vector<BigFloat> zmag;
  zmag.reserve(z.size());
  for (const Complex& c : z) zmag.push_back(c.abs(prec, RoundMode::Away));

  LimitRoot out;
  {
    ComposedSystem sys(f, seq, z, d, Complex::zero(prec));
    BigFloat res = vec_norm(compose_eval(sys, x, prec), prec);
    out.trace.push_back(PathState{d, Complex::zero(prec), x, 0, vec_norm(x, prec), res});
  }

  const BigFloat sqrt_n =
      BigFloat::sqrt(BigFloat::from_int(long(n), prec), prec, RoundMode::Away);
  BigFloat tail_term = BigFloat::zero(kTolBits);
  BigFloat ball = one;
  BigFloat ry = one;

  for (;;) {
    ball = BigFloat::add(vec_norm(x, prec, RoundMode::Away), one, prec, RoundMode::Away);
    bool have_tail = false;
    try {
      BigFloat tail = tail_bound(seq, d, ball, 6, prec);
      BigFloat s_up = partial_sum_mag_up(seq, d, ball, prec);
      ry = BigFloat::add(s_up, tail, prec, RoundMode::Away);
      BigFloat ly = dy_frobenius_up(f, zmag, ball, ry, prec);
      tail_term = BigFloat::mul(BigFloat::mul(ly, sqrt_n, prec, RoundMode::Away), tail,
                                prec, RoundMode::Away);
      have_tail = true;
    } catch (const RatioTestFailed&) {
      // the ball is still too large for this degree; raising d shrinks the
      // leading tail term, so keep tracking unless the ceiling is reached
      if (d >= config.d_max) throw;
    }
    if (have_tail && tail_term.ldexp(BigInt(1)) < config.residual_tol) {
      out.stopped_by_tail_rule = true;
      break;
    }
    if (d >= config.d_max) {
      out.stopped_by_tail_rule = false;
      break;
    }

    const Complex eps_target = coefficient(seq, d + 1, prec);
    TrackSegment stage = track_epsilon(f, z, seq, d, x, eps_target, config);
    out.cauchy_history.push_back(vec_norm(vec_sub(stage.x, x, prec), prec));
    for (PathState& st : stage.states) out.trace.push_back(std::move(st));
    x = std::move(stage.x);
    ++d;
    // relabel the endpoint as the start of the next degree; the composed
    // values agree bit for bit, so the residual carries over
    const PathState& end = out.trace.back();
    out.trace.push_back(PathState{d, Complex::zero(prec), x, 0, end.norm_x, end.residual});
  }

  ComposedSystem fin(f, seq, z, d, Complex::zero(prec));
  BigFloat measured = vec_norm(compose_eval(fin, x, prec), prec, RoundMode::Away);
  BigFloat slack = eval_slack_up(f, zmag, d, ball, ry, prec);
  out.residual_truncated = BigFloat::add(measured, slack, prec, RoundMode::Away);
  out.tail_term = tail_term;
  out.total_residual_bound =
      BigFloat::add(out.residual_truncated, tail_term, prec, RoundMode::Away);
  out.a = std::move(x);
  out.final_d = d;
  return out;
}

}  // namespace liosolve
