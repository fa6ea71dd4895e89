#include "liosolve/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "liosolve/errors.hpp"

namespace liosolve {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

ordered_json parse_file(const std::string& path) {
  try {
    return ordered_json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path + ": " + e.what());
  }
}

BigInt bigint_from(const std::string& s, const std::string& where) {
  try {
    return BigInt(s);
  } catch (const std::exception&) {
    throw InputError(where + ": '" + s + "' is not an integer");
  }
}

Rational rational_from(const ordered_json& pair, const std::string& where) {
  if (!pair.is_array() || pair.size() != 2 || !pair[0].is_string() || !pair[1].is_string())
    throw InputError(where + ": expected [\"numerator\", \"denominator\"]");
  BigInt num = bigint_from(pair[0].get<std::string>(), where);
  BigInt den = bigint_from(pair[1].get<std::string>(), where);
  if (den == 0) throw InputError(where + ": zero denominator");
  return Rational(num, den);
}

std::vector<unsigned> exponents_from(const ordered_json& j, size_t want,
                                     const std::string& where) {
  std::vector<unsigned> out(want, 0);
  if (j.is_null()) return out;  // omitted: all zero
  if (!j.is_array() || j.size() != want)
    throw InputError(where + ": expected an exponent array of length " +
                     std::to_string(want));
  for (size_t i = 0; i < want; ++i) {
    if (!j[i].is_number_integer() || j[i].get<long long>() < 0)
      throw InputError(where + ": exponents must be non-negative integers");
    out[i] = unsigned(j[i].get<long long>());
  }
  return out;
}

BigFloat real_from(const ordered_json& j, unsigned prec, const std::string& where) {
  if (!j.is_string()) throw InputError(where + ": numbers are decimal strings");
  try {
    return BigFloat::parse(j.get<std::string>(), prec);
  } catch (const Error&) {
    throw InputError(where + ": cannot parse '" + j.get<std::string>() + "'");
  }
}

Complex complex_from(const ordered_json& j, unsigned prec, const std::string& where) {
  if (!j.is_object()) throw InputError(where + ": expected {\"re\": ..., \"im\": ...}");
  BigFloat re = j.contains("re") ? real_from(j["re"], prec, where + ".re")
                                 : BigFloat::zero(prec);
  BigFloat im = j.contains("im") ? real_from(j["im"], prec, where + ".im")
                                 : BigFloat::zero(prec);
  return Complex(std::move(re), std::move(im));
}

CVector complex_list(const ordered_json& j, unsigned prec, const std::string& where) {
  if (!j.is_array()) throw InputError(where + ": expected an array");
  CVector out;
  out.reserve(j.size());
  for (size_t i = 0; i < j.size(); ++i)
    out.push_back(complex_from(j[i], prec, where + "[" + std::to_string(i) + "]"));
  return out;
}

ordered_json complex_to_json(const Complex& c) {
  ordered_json j;
  j["re"] = c.re.is_zero() ? "0" : c.re.to_string();
  j["im"] = c.im.is_zero() ? "0" : c.im.to_string();
  return j;
}

std::string real_to_string(const BigFloat& v) { return v.is_zero() ? "0" : v.to_string(); }

long log2_of_tolerance(const BigFloat& tol) {
  // tolerances are exact powers of two by construction
  return tol.exponent().convert_to<long>();
}

}  // namespace

PolynomialMap load_system(const std::string& path) {
  ordered_json j = parse_file(path);
  if (!j.is_object() || !j.contains("n") || !j.contains("r") || !j.contains("components"))
    throw InputError(path + ": expected {\"n\", \"r\", \"components\"}");
  if (!j["n"].is_number_integer() || j["n"].get<long long>() < 1)
    throw InputError(path + ": n must be a positive integer");
  if (!j["r"].is_number_integer() || j["r"].get<long long>() < 0)
    throw InputError(path + ": r must be a non-negative integer");
  const size_t n = size_t(j["n"].get<long long>());
  const size_t r = size_t(j["r"].get<long long>());

  const ordered_json& comps = j["components"];
  if (!comps.is_array() || comps.size() != n)
    throw InputError(path + ": expected " + std::to_string(n) + " components");

  std::vector<std::vector<Term>> components(n);
  for (size_t ci = 0; ci < n; ++ci) {
    const ordered_json& clist = comps[ci];
    if (!clist.is_array())
      throw InputError(path + ": component " + std::to_string(ci + 1) +
                       " must be an array of terms");
    for (size_t ti = 0; ti < clist.size(); ++ti) {
      const ordered_json& tj = clist[ti];
      std::string where = path + ": component " + std::to_string(ci + 1) + ", term " +
                          std::to_string(ti + 1);
      if (!tj.is_object() || !tj.contains("re"))
        throw InputError(where + ": expected an object with at least \"re\"");
      Term t;
      Rational re = rational_from(tj["re"], where + ".re");
      Rational im = tj.contains("im") ? rational_from(tj["im"], where + ".im") : Rational(0);
      t.coeff = GaussianRational{std::move(re), std::move(im)};
      t.xe = exponents_from(tj.contains("x") ? tj["x"] : ordered_json(), n, where + ".x");
      t.ye = exponents_from(tj.contains("y") ? tj["y"] : ordered_json(), n, where + ".y");
      t.ze = exponents_from(tj.contains("z") ? tj["z"] : ordered_json(), r, where + ".z");
      components[ci].push_back(std::move(t));
    }
  }
  return PolynomialMap::make(n, r, std::move(components));
}

CVector load_params(const std::string& path, unsigned prec) {
  ordered_json j = parse_file(path);
  if (!j.is_object() || !j.contains("z"))
    throw InputError(path + ": expected {\"z\": [...]}");
  return complex_list(j["z"], prec, path + ": z");
}

CVector load_point(const std::string& path, unsigned prec) {
  ordered_json j = parse_file(path);
  if (!j.is_object() || !j.contains("point"))
    throw InputError(path + ": expected {\"point\": [...]}");
  return complex_list(j["point"], prec, path + ": point");
}

LiouvilleSequence load_sequence(const std::string& path) {
  ordered_json j = parse_file(path);
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    throw InputError(path + ": expected {\"kind\": ...}");
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "default_tower")
    return LiouvilleSequence::make(LiouvilleSequence::Kind::DefaultTower);
  if (kind == "factorial_pow2")
    return LiouvilleSequence::make(LiouvilleSequence::Kind::FactorialPow2);
  if (kind == "user") {
    if (!j.contains("values") || !j["values"].is_array() || j["values"].empty())
      throw InputError(path + ": user sequences need a non-empty \"values\" array");
    std::vector<BigInt> values;
    for (const auto& v : j["values"]) {
      if (!v.is_string()) throw InputError(path + ": values are integer strings");
      values.push_back(bigint_from(v.get<std::string>(), path + ": values"));
    }
    return LiouvilleSequence::make(LiouvilleSequence::Kind::UserSupplied, values);
  }
  throw InputError(path + ": unknown sequence kind '" + kind + "'");
}

std::string certificate_json(const ZeroCertificate& cert) {
  ordered_json j;
  j["regular"] = cert.regular;
  j["balanced"] = cert.balanced;
  j["well_balanced"] = cert.well_balanced;
  j["jacobian_rank"] = cert.jacobian_rank;
  j["residual"] = real_to_string(cert.residual_norm);
  j["sigma_min"] = real_to_string(cert.sigma_min);
  j["sigma_max"] = real_to_string(cert.sigma_max);
  if (cert.witness) {
    ordered_json w;
    ordered_json I = ordered_json::array();
    ordered_json J = ordered_json::array();
    for (size_t i : cert.witness->I) I.push_back(i + 1);
    for (size_t i : cert.witness->J) J.push_back(i + 1);
    w["I"] = std::move(I);
    w["J"] = std::move(J);
    w["det_magnitude"] = real_to_string(cert.witness->det_magnitude);
    j["witness"] = std::move(w);
  }
  ordered_json pt = ordered_json::array();
  for (const Complex& c : cert.point) pt.push_back(complex_to_json(c));
  j["point"] = std::move(pt);
  ordered_json zs = ordered_json::array();
  for (const Complex& c : cert.z) zs.push_back(complex_to_json(c));
  j["z"] = std::move(zs);
  ordered_json tol;
  tol["residual"] = log2_of_tolerance(cert.tolerances.residual_tol);
  tol["rank_rel"] = log2_of_tolerance(cert.tolerances.rank_rel_tol);
  tol["det"] = log2_of_tolerance(cert.tolerances.det_tol);
  tol["distinctness"] = log2_of_tolerance(cert.tolerances.distinctness_tol);
  tol["tangent"] = log2_of_tolerance(cert.tolerances.tangent_tol);
  j["tolerances_log2"] = std::move(tol);
  return j.dump(2) + "\n";
}

std::string limit_root_json(const LimitRoot& lim) {
  ordered_json j;
  ordered_json pt = ordered_json::array();
  for (const Complex& c : lim.a) pt.push_back(complex_to_json(c));
  j["point"] = std::move(pt);
  j["final_d"] = lim.final_d;
  j["stopped_by_tail_rule"] = lim.stopped_by_tail_rule;
  j["residual_truncated"] = real_to_string(lim.residual_truncated);
  j["tail_term"] = real_to_string(lim.tail_term);
  j["total_residual_bound"] = real_to_string(lim.total_residual_bound);
  ordered_json hist = ordered_json::array();
  for (const BigFloat& h : lim.cauchy_history) hist.push_back(real_to_string(h));
  j["cauchy_history"] = std::move(hist);
  return j.dump(2) + "\n";
}

std::string trace_csv(const std::vector<PathState>& trace) {
  std::ostringstream out;
  const size_t n = trace.empty() ? 0 : trace.front().x.size();
  out << "d,eps_re,eps_im";
  for (size_t i = 1; i <= n; ++i) out << ",x" << i << "_re,x" << i << "_im";
  out << ",residual,newton_iters\n";
  for (const PathState& st : trace) {
    out << st.d << ',' << real_to_string(st.eps.re) << ',' << real_to_string(st.eps.im);
    for (const Complex& c : st.x)
      out << ',' << real_to_string(c.re) << ',' << real_to_string(c.im);
    out << ',' << real_to_string(st.residual) << ',' << st.newton_iters << '\n';
  }
  return out.str();
}

void save_text(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write " + path);
  out << body;
  out.flush();
  if (!out) throw Error("short write to " + path);
}

std::uint64_t fnv1a(const void* data, size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 14695981039346656037ULL;
  for (size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

std::string fnv1a_file_hex(const std::string& path) {
  std::string body = read_file(path);
  std::uint64_t h = fnv1a(body.data(), body.size());
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

Complex parse_complex(const std::string& text, unsigned prec) {
  if (text.empty()) throw InputError("empty complex literal");
  // top-level sign: not the leading one and not an exponent marker's
  const size_t npos = std::string::npos;
  size_t split = npos;
  for (size_t i = 1; i < text.size(); ++i) {
    char c = text[i];
    char prev = text[i - 1];
    if ((c == '+' || c == '-') && prev != 'e' && prev != 'E' && prev != 'p' && prev != 'P')
      split = i;
  }

  auto parse_real = [&](std::string s, const char* what) {
    if (!s.empty() && s.front() == '+') s.erase(0, 1);
    if (s.empty()) s = "1";  // bare "i" or "+i" / "-i" handled by caller sign
    try {
      return BigFloat::parse(s, prec);
    } catch (const Error&) {
      throw InputError(std::string("cannot parse ") + what + " part of complex literal '" +
                       text + "'");
    }
  };

  if (text.back() == 'i') {
    std::string re_part = (split == npos) ? "0" : text.substr(0, split);
    std::string im_part = (split == npos) ? text.substr(0, text.size() - 1)
                                          : text.substr(split, text.size() - 1 - split);
    if (im_part == "-") im_part = "-1";
    return Complex(parse_real(re_part, "real"), parse_real(im_part, "imaginary"));
  }
  if (split != npos)
    throw InputError("complex literal '" + text + "' has two parts but no trailing i");
  return Complex(parse_real(text, "real"), BigFloat::zero(prec));
}

}  // namespace liosolve
