// liosolve: audit Liouville sequences, evaluate truncated series, certify
// well balanced zeros, and track roots of composed systems to their limit.
//
// Every run prints exactly one RunReport as JSON to stdout. Timings live
// only in that report; files written through --out and --trace are fully
// determined by the inputs and the seed, so identical runs produce
// byte-identical artifacts.
//
// Exit codes: 0 success (for certify: well balanced), 2 certification
// negative, 3 tracking or solving failure, 4 input error, 1 unexpected.

#include <chrono>
#include <cstdint>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "liosolve/certify.hpp"
#include "liosolve/errors.hpp"
#include "liosolve/io.hpp"
#include "liosolve/liouville.hpp"
#include "liosolve/polynomial.hpp"
#include "liosolve/tracker.hpp"

using namespace liosolve;
using ordered_json = nlohmann::ordered_json;

namespace {

struct Run {
  ordered_json config = ordered_json::object();
  ordered_json inputs = ordered_json::object();
  ordered_json outcome = ordered_json::object();
  ordered_json artifacts = ordered_json::object();
};

LiouvilleSequence resolve_sequence(const std::string& choice) {
  if (choice == "default_tower")
    return LiouvilleSequence::make(LiouvilleSequence::Kind::DefaultTower);
  if (choice == "factorial_pow2")
    return LiouvilleSequence::make(LiouvilleSequence::Kind::FactorialPow2);
  return load_sequence(choice);  // anything else is a file path
}

void note_input(Run& run, const char* role, const std::string& path) {
  ordered_json e;
  e["path"] = path;
  e["fnv1a"] = fnv1a_file_hex(path);
  run.inputs[role] = std::move(e);
}

ordered_json complex_json(const Complex& c) {
  ordered_json j;
  j["re"] = c.re.is_zero() ? "0" : c.re.to_string();
  j["im"] = c.im.is_zero() ? "0" : c.im.to_string();
  return j;
}

ordered_json point_json(const CVector& v) {
  ordered_json a = ordered_json::array();
  for (const Complex& c : v) a.push_back(complex_json(c));
  return a;
}

std::string real_str(const BigFloat& v) { return v.is_zero() ? "0" : v.to_string(); }

long tol_log2(const BigFloat& tol) { return tol.exponent().convert_to<long>(); }

void fail(Run& run, const char* kind, const char* what) {
  run.outcome = ordered_json::object();
  run.outcome["status"] = "error";
  run.outcome["error"] = kind;
  run.outcome["message"] = what;
}

// Runs a command body, mapping library exceptions onto the exit-code
// contract and recording the concrete error type in the report.
int guarded(Run& run, const std::function<int(Run&)>& body) {
#define LIOSOLVE_CATCH(TYPE, CODE)   \
  catch (const TYPE& e) {            \
    fail(run, #TYPE, e.what());      \
    return CODE;                     \
  }
  try {
    return body(run);
  }
  LIOSOLVE_CATCH(InvalidSequence, 4)
  LIOSOLVE_CATCH(InvalidIndex, 4)
  LIOSOLVE_CATCH(ZeroPolynomial, 4)
  LIOSOLVE_CATCH(InputError, 4)
  LIOSOLVE_CATCH(GrowthUnverified, 4)
  LIOSOLVE_CATCH(NotAZero, 2)
  LIOSOLVE_CATCH(DistinctnessViolated, 2)
  LIOSOLVE_CATCH(PrecisionExhausted, 2)
  LIOSOLVE_CATCH(StartNotFound, 3)
  LIOSOLVE_CATCH(PathEscapedBall, 3)
  LIOSOLVE_CATCH(SubstepLimit, 3)
  LIOSOLVE_CATCH(NoConvergence, 3)
  LIOSOLVE_CATCH(SingularJacobian, 3)
  LIOSOLVE_CATCH(RatioTestFailed, 3)
  LIOSOLVE_CATCH(ArithmeticError, 3)
  LIOSOLVE_CATCH(Error, 1)
  catch (const std::exception& e) {
    fail(run, "exception", e.what());
    return 1;
  }
#undef LIOSOLVE_CATCH
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"polynomial systems over a Liouville function: audit, evaluate,"
               " certify, solve, track"};
  app.require_subcommand(1);

  unsigned prec = 256;
  std::uint64_t seed = 1;
  std::string out_path;
  bool quiet = false;
  app.add_option("--prec", prec, "working precision in bits")->capture_default_str();
  app.add_option("--seed", seed, "seed for the multistart search")->capture_default_str();
  app.add_option("--out", out_path, "write the command's artifact to this file");
  app.add_flag("--quiet", quiet, "print the run report compactly on one line");

  std::string cmd_name;
  std::function<int(Run&)> body;

  // seq audit
  auto* seq_cmd = app.add_subcommand("seq", "sequence utilities");
  seq_cmd->require_subcommand(1);
  seq_cmd->fallthrough();
  auto* audit = seq_cmd->add_subcommand(
      "audit", "check the superexponential growth condition index by index");
  audit->fallthrough();
  std::vector<unsigned> audit_l;
  std::size_t audit_max_i = 8;
  std::string audit_seq = "default_tower";
  audit->add_option("--l", audit_l, "exponent offsets to audit (repeatable)");
  audit->add_option("--max-i", audit_max_i, "last index to audit")->capture_default_str();
  audit->add_option("--sequence", audit_seq,
                    "default_tower, factorial_pow2, or a sequence file")
      ->capture_default_str();
  audit->callback([&] {
    cmd_name = "seq audit";
    body = [&](Run& run) {
      if (audit_l.empty()) audit_l = {3};
      LiouvilleSequence seq = resolve_sequence(audit_seq);
      run.config["prec"] = prec;
      run.config["sequence"] = audit_seq;
      run.config["max_i"] = audit_max_i;
      run.config["l"] = audit_l;
      ordered_json audits = ordered_json::array();
      bool all_admissible = true;
      for (unsigned l : audit_l) {
        AuditReport rep = audit_growth(seq, l, audit_max_i);
        ordered_json a;
        a["l"] = l;
        ordered_json rows = ordered_json::array();
        std::size_t first_false = 0;
        for (std::size_t i = 1; i <= audit_max_i; ++i) {
          ordered_json row;
          row["i"] = i;
          row["ok"] = bool(rep.ok[i - 1]);
          rows.push_back(std::move(row));
          if (!rep.ok[i - 1] && first_false == 0) first_false = i;
        }
        a["rows"] = std::move(rows);
        a["first_all_true"] = rep.first_all_true;
        a["first_false"] = first_false;
        a["admissible"] = rep.first_all_true != 0;
        all_admissible = all_admissible && rep.first_all_true != 0;
        audits.push_back(std::move(a));
      }
      run.outcome["status"] = "ok";
      run.outcome["admissible"] = all_admissible;
      run.outcome["audits"] = std::move(audits);
      if (!out_path.empty()) {
        save_text(out_path, run.outcome.dump(2) + "\n");
        run.artifacts["out"] = out_path;
      }
      return 0;
    };
  });

  // eval
  auto* eval = app.add_subcommand(
      "eval", "evaluate the truncated series H_{d,eps} and its derivative");
  eval->fallthrough();
  std::size_t eval_d = 6;
  std::string eval_eps = "0";
  std::string eval_x;
  std::string eval_seq = "default_tower";
  eval->add_option("--d", eval_d, "truncation degree")->capture_default_str();
  eval->add_option("--eps", eval_eps, "coefficient of x^(d+1), a complex literal")
      ->capture_default_str();
  eval->add_option("--x", eval_x, "evaluation point, a complex literal")->required();
  eval->add_option("--sequence", eval_seq,
                   "default_tower, factorial_pow2, or a sequence file")
      ->capture_default_str();
  eval->callback([&] {
    cmd_name = "eval";
    body = [&](Run& run) {
      LiouvilleSequence seq = resolve_sequence(eval_seq);
      Complex x = parse_complex(eval_x, prec);
      Complex eps = parse_complex(eval_eps, prec);
      run.config["prec"] = prec;
      run.config["sequence"] = eval_seq;
      run.config["d"] = eval_d;
      run.config["eps"] = complex_json(eps);
      run.config["x"] = complex_json(x);
      Complex value = eval_partial_sum(seq, eval_d, eps, x, prec);
      Complex deriv = eval_partial_sum_derivative(seq, eval_d, eps, x, prec);
      run.outcome["status"] = "ok";
      run.outcome["value"] = complex_json(value);
      run.outcome["derivative"] = complex_json(deriv);
      if (!out_path.empty()) {
        save_text(out_path, run.outcome.dump(2) + "\n");
        run.artifacts["out"] = out_path;
      }
      return 0;
    };
  });

  // certify
  auto* certify = app.add_subcommand(
      "certify", "certify a point as a well balanced zero of F(x, y, z)");
  certify->fallthrough();
  std::string sys_path, z_path, point_path;
  std::string cert_seq = "default_tower";
  std::size_t cert_d = 0;
  certify->add_option("--system", sys_path, "system file")->required();
  certify->add_option("--z", z_path, "parameter file")->required();
  certify->add_option("--point", point_path,
                      "point file with 2n coordinates (x then y), or n with --d")
      ->required();
  certify->add_option("--d", cert_d,
                      "lift an n-coordinate point by y_i = H_d(x_i) before certifying");
  certify->add_option("--sequence", cert_seq, "sequence used for the --d lift")
      ->capture_default_str();
  certify->callback([&] {
    cmd_name = "certify";
    body = [&](Run& run) {
      PolynomialMap f = load_system(sys_path);
      CVector z = load_params(z_path, prec);
      CVector point = load_point(point_path, prec);
      note_input(run, "system", sys_path);
      note_input(run, "z", z_path);
      note_input(run, "point", point_path);
      const std::size_t n = f.n();
      if (point.size() == n && cert_d > 0) {
        LiouvilleSequence seq = resolve_sequence(cert_seq);
        Complex zero_eps{BigFloat::zero(prec), BigFloat::zero(prec)};
        for (std::size_t i = 0; i < n; ++i)
          point.push_back(eval_partial_sum(seq, cert_d, zero_eps, point[i], prec));
      }
      if (point.size() != 2 * n)
        throw InputError("certify: point must have 2n coordinates, or n with --d");
      CertifyTolerances tol = CertifyTolerances::defaults(prec);
      run.config["prec"] = prec;
      run.config["d_lift"] = cert_d;
      run.config["residual_tol_log2"] = tol_log2(tol.residual_tol);
      run.config["rank_rel_tol_log2"] = tol_log2(tol.rank_rel_tol);
      run.config["det_tol_log2"] = tol_log2(tol.det_tol);
      run.config["distinctness_tol_log2"] = tol_log2(tol.distinctness_tol);
      run.config["tangent_tol_log2"] = tol_log2(tol.tangent_tol);

      ZeroCertificate cert = certify_well_balanced(f, z, point, tol, prec);
      run.outcome["status"] = cert.well_balanced ? "well_balanced" : "not_well_balanced";
      run.outcome["regular"] = cert.regular;
      run.outcome["balanced"] = cert.balanced;
      run.outcome["well_balanced"] = cert.well_balanced;
      run.outcome["jacobian_rank"] = cert.jacobian_rank;
      run.outcome["residual"] = real_str(cert.residual_norm);
      if (cert.witness) {
        ordered_json w;
        ordered_json I = ordered_json::array();
        ordered_json J = ordered_json::array();
        for (std::size_t i : cert.witness->I) I.push_back(i + 1);
        for (std::size_t i : cert.witness->J) J.push_back(i + 1);
        w["I"] = std::move(I);
        w["J"] = std::move(J);
        run.outcome["witness"] = std::move(w);
      }
      if (!out_path.empty()) {
        save_text(out_path, certificate_json(cert));
        run.artifacts["out"] = out_path;
      }
      return cert.well_balanced ? 0 : 2;
    };
  });

  // solve
  auto* solve_cmd = app.add_subcommand(
      "solve", "track a root of the truncated system to the analytic limit");
  solve_cmd->fallthrough();
  std::string solve_sys, solve_z, solve_seq = "default_tower", solve_rmax, solve_trace;
  std::size_t solve_d_start = 0, solve_d_max = 8, solve_budget = 200;
  std::size_t solve_substeps = 64, solve_newton = 50;
  solve_cmd->add_option("--system", solve_sys, "system file")->required();
  solve_cmd->add_option("--z", solve_z, "parameter file")->required();
  solve_cmd->add_option("--sequence", solve_seq,
                        "default_tower, factorial_pow2, or a sequence file")
      ->capture_default_str();
  solve_cmd->add_option("--d-start", solve_d_start,
                        "first truncation degree (0 picks the lowest that works)")
      ->capture_default_str();
  solve_cmd->add_option("--d-max", solve_d_max, "largest truncation degree")
      ->capture_default_str();
  solve_cmd->add_option("--budget", solve_budget, "multistart sample budget")
      ->capture_default_str();
  solve_cmd->add_option("--substeps", solve_substeps, "substep limit per epsilon leg")
      ->capture_default_str();
  solve_cmd->add_option("--newton-iters", solve_newton, "Newton iteration cap")
      ->capture_default_str();
  solve_cmd->add_option("--r-max", solve_rmax, "working ball radius (decimal)");
  solve_cmd->add_option("--trace", solve_trace, "write the accepted path states as CSV");
  solve_cmd->callback([&] {
    cmd_name = "solve";
    body = [&](Run& run) {
      PolynomialMap f = load_system(solve_sys);
      CVector z = load_params(solve_z, prec);
      note_input(run, "system", solve_sys);
      note_input(run, "z", solve_z);
      LiouvilleSequence seq = resolve_sequence(solve_seq);
      TrackerConfig cfg = TrackerConfig::defaults(prec);
      cfg.d_start = solve_d_start;
      cfg.d_max = solve_d_max;
      cfg.multistart_budget = solve_budget;
      cfg.max_substeps_per_epsilon = solve_substeps;
      cfg.max_newton_iters = solve_newton;
      cfg.rng_seed = seed;
      if (!solve_rmax.empty()) cfg.r_max = BigFloat::parse(solve_rmax, 64);
      run.config["prec"] = cfg.precision_bits;
      run.config["seed"] = cfg.rng_seed;
      run.config["sequence"] = solve_seq;
      run.config["d_start"] = cfg.d_start;
      run.config["d_max"] = cfg.d_max;
      run.config["multistart_budget"] = cfg.multistart_budget;
      run.config["max_substeps_per_epsilon"] = cfg.max_substeps_per_epsilon;
      run.config["max_newton_iters"] = cfg.max_newton_iters;
      run.config["r_max"] = real_str(cfg.r_max);
      run.config["residual_tol_log2"] = tol_log2(cfg.residual_tol);
      run.config["newton_tol_log2"] = tol_log2(cfg.newton_tol);
      run.config["distinctness_tol_log2"] = tol_log2(cfg.distinctness_tol);

      LimitRoot lim = solve(f, z, seq, cfg);
      run.outcome["status"] = "ok";
      run.outcome["final_d"] = lim.final_d;
      run.outcome["stopped_by_tail_rule"] = lim.stopped_by_tail_rule;
      run.outcome["residual_truncated"] = real_str(lim.residual_truncated);
      run.outcome["tail_term"] = real_str(lim.tail_term);
      run.outcome["total_residual_bound"] = real_str(lim.total_residual_bound);
      run.outcome["point"] = point_json(lim.a);
      if (!out_path.empty()) {
        save_text(out_path, limit_root_json(lim));
        run.artifacts["out"] = out_path;
      }
      if (!solve_trace.empty()) {
        save_text(solve_trace, trace_csv(lim.trace));
        run.artifacts["trace"] = solve_trace;
      }
      return 0;
    };
  });

  // track
  auto* track = app.add_subcommand(
      "track", "track one epsilon leg from a known root of the truncated system");
  track->fallthrough();
  std::string track_sys, track_z, track_seq = "default_tower";
  std::string track_start, track_eps, track_trace;
  std::size_t track_d = 1, track_substeps = 64, track_newton = 50;
  std::string track_rmax;
  track->add_option("--system", track_sys, "system file")->required();
  track->add_option("--z", track_z, "parameter file")->required();
  track->add_option("--sequence", track_seq,
                    "default_tower, factorial_pow2, or a sequence file")
      ->capture_default_str();
  track->add_option("--d", track_d, "truncation degree")->required();
  track->add_option("--eps", track_eps, "target epsilon, a complex literal")->required();
  track->add_option("--start", track_start, "point file: a root at epsilon = 0")
      ->required();
  track->add_option("--substeps", track_substeps, "substep limit")->capture_default_str();
  track->add_option("--newton-iters", track_newton, "Newton iteration cap")
      ->capture_default_str();
  track->add_option("--r-max", track_rmax, "working ball radius (decimal)");
  track->add_option("--trace", track_trace, "write the accepted path states as CSV");
  track->callback([&] {
    cmd_name = "track";
    body = [&](Run& run) {
      PolynomialMap f = load_system(track_sys);
      CVector z = load_params(track_z, prec);
      CVector x0 = load_point(track_start, prec);
      note_input(run, "system", track_sys);
      note_input(run, "z", track_z);
      note_input(run, "start", track_start);
      LiouvilleSequence seq = resolve_sequence(track_seq);
      Complex eps = parse_complex(track_eps, prec);
      TrackerConfig cfg = TrackerConfig::defaults(prec);
      cfg.d_max = std::max<std::size_t>(track_d, 1);
      cfg.max_substeps_per_epsilon = track_substeps;
      cfg.max_newton_iters = track_newton;
      cfg.rng_seed = seed;
      if (!track_rmax.empty()) cfg.r_max = BigFloat::parse(track_rmax, 64);
      run.config["prec"] = cfg.precision_bits;
      run.config["d"] = track_d;
      run.config["sequence"] = track_seq;
      run.config["eps"] = complex_json(eps);
      run.config["max_substeps_per_epsilon"] = cfg.max_substeps_per_epsilon;
      run.config["max_newton_iters"] = cfg.max_newton_iters;
      run.config["r_max"] = real_str(cfg.r_max);

      TrackSegment seg = track_epsilon(f, z, seq, track_d, x0, eps, cfg);
      run.outcome["status"] = "ok";
      run.outcome["point"] = point_json(seg.x);
      run.outcome["accepted_substeps"] = seg.states.size();
      if (!seg.states.empty())
        run.outcome["residual"] = real_str(seg.states.back().residual);
      if (!out_path.empty()) {
        ordered_json ep;
        ep["d"] = track_d;
        ep["eps"] = complex_json(eps);
        ep["point"] = point_json(seg.x);
        save_text(out_path, ep.dump(2) + "\n");
        run.artifacts["out"] = out_path;
      }
      if (!track_trace.empty()) {
        save_text(track_trace, trace_csv(seg.states));
        run.artifacts["trace"] = track_trace;
      }
      return 0;
    };
  });

  // bounds
  auto* bounds = app.add_subcommand(
      "bounds", "print the inductive and finiteness degree thresholds");
  bounds->fallthrough();
  unsigned bounds_n = 1, bounds_r = 0;
  bounds->add_option("--n", bounds_n, "number of variable pairs")->required();
  bounds->add_option("--r", bounds_r, "number of parameters")->required();
  bounds->callback([&] {
    cmd_name = "bounds";
    body = [&](Run& run) {
      DegreeBounds b = degree_bounds(bounds_n, bounds_r);
      run.config["n"] = bounds_n;
      run.config["r"] = bounds_r;
      run.outcome["status"] = "ok";
      run.outcome["inductive"] = b.inductive.str();
      run.outcome["finiteness"] = b.finiteness.str();
      if (!out_path.empty()) {
        save_text(out_path, run.outcome.dump(2) + "\n");
        run.artifacts["out"] = out_path;
      }
      return 0;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 4;
  }

  Run run;
  auto t0 = std::chrono::steady_clock::now();
  int code = guarded(run, body);
  auto t1 = std::chrono::steady_clock::now();
  auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();

  ordered_json report;
  report["command"] = cmd_name;
  report["config"] = std::move(run.config);
  report["inputs"] = std::move(run.inputs);
  report["outcome"] = std::move(run.outcome);
  report["elapsed_ms"] = ms;
  report["artifacts"] = std::move(run.artifacts);
  report["exit_code"] = code;
  std::cout << (quiet ? report.dump() : report.dump(2)) << "\n";
  return code;
}
