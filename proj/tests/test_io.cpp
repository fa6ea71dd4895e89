#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <string>

#include "liosolve/errors.hpp"
#include "liosolve/io.hpp"
#include "liosolve/liouville.hpp"
#include "liosolve/polynomial.hpp"

using namespace liosolve;

namespace {

// Writes body to a unique temp file and deletes it on scope exit.
struct TempFile {
  std::filesystem::path path;

  explicit TempFile(const std::string& body, const char* tag = "io") {
    static int counter = 0;
    path = std::filesystem::temp_directory_path() /
           ("liosolve_test_" + std::string(tag) + "_" + std::to_string(++counter) + ".json");
    save_text(path.string(), body);
  }
  ~TempFile() {
    std::error_code ec;
    std::filesystem::remove(path, ec);
  }
  std::string str() const { return path.string(); }
};

BigFloat creal(long num, long den, unsigned prec = 256) {
  return BigFloat::from_rational(Rational(num, den), prec);
}

bool within_pow2(const BigFloat& a, const BigFloat& b, long log2_bound,
                 unsigned prec = 512) {
  BigFloat diff = BigFloat::sub(a, b, prec, RoundMode::Away);
  if (diff.is_zero()) return true;
  return diff.exponent() <= BigInt(log2_bound);
}

}  // namespace

TEST_CASE("load_system reads a sparse system and evaluates like the direct build") {
  // x1^2 * z1 - y1 + (0 + 1/2 i)
  TempFile f(R"({
    "n": 1,
    "r": 1,
    "components": [[
      {"re": ["1", "1"], "x": [2], "z": [1]},
      {"re": ["-1", "1"], "y": [1]},
      {"re": ["0", "1"], "im": ["1", "2"]}
    ]]
  })");
  PolynomialMap loaded = load_system(f.str());

  Term t1;
  t1.coeff = GaussianRational{Rational(1), Rational(0)};
  t1.xe = {2};
  t1.ye = {0};
  t1.ze = {1};
  Term t2;
  t2.coeff = GaussianRational{Rational(-1), Rational(0)};
  t2.xe = {0};
  t2.ye = {1};
  t2.ze = {0};
  Term t3;
  t3.coeff = GaussianRational{Rational(0), Rational(1, 2)};
  t3.xe = {0};
  t3.ye = {0};
  t3.ze = {0};
  PolynomialMap direct = PolynomialMap::make(1, 1, {{t1, t2, t3}});

  LiouvilleSequence seq = LiouvilleSequence::make(LiouvilleSequence::Kind::DefaultTower);
  CVector z{Complex(creal(3, 1), creal(-1, 4))};
  ComposedSystem a(loaded, seq, z, 2, Complex(creal(1, 8)));
  ComposedSystem b(direct, seq, z, 2, Complex(creal(1, 8)));
  CVector x{Complex(creal(5, 4), creal(1, 3))};
  CVector va = compose_eval(a, x, 256);
  CVector vb = compose_eval(b, x, 256);
  CHECK(va[0].re == vb[0].re);
  CHECK(va[0].im == vb[0].im);
}

TEST_CASE("load_system rejects malformed input") {
  auto bad = [](const std::string& body) {
    TempFile f(body);
    CHECK_THROWS_AS(load_system(f.str()), InputError);
  };
  bad("not json at all");
  bad(R"({"r": 0, "components": []})");                           // missing n
  bad(R"({"n": 1, "r": 0, "components": []})");                   // wrong component count
  bad(R"({"n": 0, "r": 0, "components": []})");                   // n must be positive
  bad(R"({"n": 1, "r": 0, "components": [[{"re": ["1"]}]]})");    // rational needs a pair
  bad(R"({"n": 1, "r": 0, "components": [[{"re": ["1", "0"]}]]})");      // zero denominator
  bad(R"({"n": 1, "r": 0, "components": [[{"re": ["x", "1"]}]]})");      // not an integer
  bad(R"({"n": 1, "r": 0, "components": [[{"re": ["1", "1"], "x": [-1]}]]})");
  bad(R"({"n": 1, "r": 0, "components": [[{"re": ["1", "1"], "x": [1, 2]}]]})");
  bad(R"({"n": 1, "r": 0, "components": [[{"re": ["1", "1"], "z": [1]}]]})");  // r = 0
  CHECK_THROWS_AS(load_system("/nonexistent/system.json"), InputError);
}

TEST_CASE("load_params and load_point parse decimal and p-notation reals") {
  TempFile pf(R"({"z": [{"re": "0.1", "im": "0"}, {"re": "-2", "im": "1p-4"}]})");
  CVector z = load_params(pf.str(), 256);
  REQUIRE(z.size() == 2);
  CHECK(z[0].re == BigFloat::parse("0.1", 256));
  CHECK(z[0].im.is_zero());
  CHECK(z[1].re == creal(-2, 1));
  CHECK(z[1].im == creal(1, 16));

  TempFile qf(R"({"point": [{"re": "1.5"}]})");  // im defaults to zero
  CVector p = load_point(qf.str(), 128);
  REQUIRE(p.size() == 1);
  CHECK(p[0].re == creal(3, 2, 128));
  CHECK(p[0].im.is_zero());

  TempFile bad1(R"({"point": "nope"})");
  CHECK_THROWS_AS(load_point(bad1.str(), 128), InputError);
  TempFile bad2(R"({"z": [{"re": 0.1}]})");  // numbers must be strings
  CHECK_THROWS_AS(load_params(bad2.str(), 128), InputError);
  TempFile bad3(R"({"wrong": []})");
  CHECK_THROWS_AS(load_params(bad3.str(), 128), InputError);
}

TEST_CASE("load_sequence covers the three kinds") {
  TempFile tower(R"({"kind": "default_tower"})");
  LiouvilleSequence a = load_sequence(tower.str());
  CHECK(a.coefficient_exact(3) == Rational(1, 16));

  TempFile fact(R"({"kind": "factorial_pow2"})");
  LiouvilleSequence b = load_sequence(fact.str());
  CHECK(b.coefficient_exact(3) == Rational(1, 64));  // a_3 = 2^(3!)

  TempFile user(R"({"kind": "user", "values": ["2", "-16", "512"]})");
  LiouvilleSequence c = load_sequence(user.str());
  CHECK(c.coefficient_exact(2) == Rational(-1, 16));

  TempFile bad1(R"({"kind": "tower_of_hanoi"})");
  CHECK_THROWS_AS(load_sequence(bad1.str()), InputError);
  TempFile bad2(R"({"kind": "user", "values": []})");
  CHECK_THROWS_AS(load_sequence(bad2.str()), InputError);
  TempFile bad3(R"({"kind": "user", "values": [16]})");
  CHECK_THROWS_AS(load_sequence(bad3.str()), InputError);
}

TEST_CASE("certificate_json has fixed field order and renders the witness one-based") {
  ZeroCertificate cert;
  cert.point = {Complex(creal(2, 1)), Complex(creal(4, 1))};
  cert.z = {Complex(creal(1, 10), creal(0, 1))};
  cert.residual_norm = BigFloat::zero(256);
  cert.jacobian_rank = 1;
  cert.sigma_min = creal(1, 1);
  cert.sigma_max = creal(4, 1);
  WitnessPartition w;
  w.I = {0};
  w.J = {};
  w.det_magnitude = creal(4, 1);
  cert.witness = w;
  cert.regular = true;
  cert.balanced = true;
  cert.well_balanced = true;
  cert.tolerances = CertifyTolerances::defaults(256);

  std::string text = certificate_json(cert);
  std::string again = certificate_json(cert);
  CHECK(text == again);
  CHECK(text.find("\"regular\": true") != std::string::npos);
  CHECK(text.find("\"well_balanced\": true") != std::string::npos);
  CHECK(text.find("\"jacobian_rank\": 1") != std::string::npos);
  CHECK(text.find("\"I\": [\n      1\n    ]") != std::string::npos);
  CHECK(text.find("\"J\": []") != std::string::npos);
  CHECK(text.find("\"residual\": \"0\"") != std::string::npos);
  CHECK(text.find("\"residual\": -120") != std::string::npos);      // tolerances_log2
  CHECK(text.find("\"distinctness\": -128") != std::string::npos);  // 2^(-prec/2)
  // field order is part of the contract: flags first, then the numbers
  CHECK(text.find("\"regular\"") < text.find("\"balanced\""));
  CHECK(text.find("\"balanced\"") < text.find("\"well_balanced\""));
  CHECK(text.find("\"well_balanced\"") < text.find("\"jacobian_rank\""));
  CHECK(text.find("\"witness\"") < text.find("\"point\""));
  CHECK(text.find("\"point\"") < text.find("\"tolerances_log2\""));
  CHECK(text.back() == '\n');

  cert.witness.reset();
  std::string bare = certificate_json(cert);
  CHECK(bare.find("\"witness\"") == std::string::npos);
}

TEST_CASE("limit_root_json carries the tail accounting and nothing time-dependent") {
  LimitRoot lim;
  lim.a = {Complex(creal(1, 2), creal(-1, 4))};
  lim.final_d = 4;
  lim.residual_truncated = creal(1, 1).ldexp(BigInt(-200));
  lim.tail_term = creal(1, 1).ldexp(BigInt(-27000));
  lim.total_residual_bound = BigFloat::add(lim.residual_truncated, lim.tail_term, 256,
                                           RoundMode::Away);
  lim.cauchy_history = {creal(1, 8), creal(1, 1024)};
  lim.stopped_by_tail_rule = true;

  std::string text = limit_root_json(lim);
  CHECK(text == limit_root_json(lim));
  CHECK(text.find("\"final_d\": 4") != std::string::npos);
  CHECK(text.find("\"stopped_by_tail_rule\": true") != std::string::npos);
  CHECK(text.find("\"re\": \"0.5\"") != std::string::npos);
  CHECK(text.find("\"im\": \"-0.25\"") != std::string::npos);
  CHECK(text.find("\"cauchy_history\"") != std::string::npos);
  CHECK(text.find("0.0009765625") != std::string::npos);  // 2^-10 in decimal
  CHECK(text.find("time") == std::string::npos);
  CHECK(text.find("elapsed") == std::string::npos);

  // rendered values parse back to well within a correctly rounded last digit
  size_t at = text.find("\"tail_term\": \"");
  REQUIRE(at != std::string::npos);
  at += 14;
  std::string tail = text.substr(at, text.find('"', at) - at);
  CHECK(within_pow2(BigFloat::parse(tail, 256), lim.tail_term, -27100));
}

TEST_CASE("trace_csv lays out one row per state") {
  PathState s0;
  s0.d = 1;
  s0.eps = Complex(BigFloat::zero(256));
  s0.x = {Complex(creal(2, 1)), Complex(creal(0, 1), creal(-3, 8))};
  s0.newton_iters = 0;
  s0.norm_x = creal(2, 1);
  s0.residual = BigFloat::zero(256);
  PathState s1 = s0;
  s1.eps = Complex(creal(1, 32));
  s1.newton_iters = 3;
  s1.residual = creal(1, 1).ldexp(BigInt(-150));

  std::string csv = trace_csv({s0, s1});
  CHECK(csv.rfind("d,eps_re,eps_im,x1_re,x1_im,x2_re,x2_im,residual,newton_iters\n", 0) == 0);
  CHECK(csv.find("\n1,0,0,2,0,0,-0.375,0,0\n") != std::string::npos);
  CHECK(csv.find(",0.03125,0,") != std::string::npos);
  size_t rows = 0;
  for (char ch : csv)
    if (ch == '\n') ++rows;
  CHECK(rows == 3);

  CHECK(trace_csv({}) == "d,eps_re,eps_im,residual,newton_iters\n");
}

TEST_CASE("fnv1a matches the reference vectors and hashes files") {
  CHECK(fnv1a("", 0) == 0xcbf29ce484222325ULL);
  CHECK(fnv1a("a", 1) == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a("hello", 5) == 0xa430d84680aabd0bULL);

  TempFile f("{\"z\": []}\n", "fnv");
  CHECK(fnv1a_file_hex(f.str()) == "189feebc01fb21c9");
  CHECK_THROWS_AS(fnv1a_file_hex("/nonexistent/file"), InputError);
}

TEST_CASE("save_text writes exactly the body") {
  TempFile f("", "save");
  save_text(f.str(), "line one\nline two\n");
  std::string hex = fnv1a_file_hex(f.str());
  std::string body = "line one\nline two\n";
  std::uint64_t h = fnv1a(body.data(), body.size());
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  CHECK(hex == buf);
  CHECK_THROWS_AS(save_text("/nonexistent/dir/file.txt", "x"), InputError);
}

TEST_CASE("parse_complex accepts the documented forms") {
  unsigned p = 256;
  Complex a = parse_complex("3", p);
  CHECK(a.re == creal(3, 1));
  CHECK(a.im.is_zero());

  Complex b = parse_complex("-2.5i", p);
  CHECK(b.re.is_zero());
  CHECK(b.im == creal(-5, 2));

  Complex c = parse_complex("0.1+0.2i", p);
  CHECK(c.re == BigFloat::parse("0.1", p));
  CHECK(c.im == BigFloat::parse("0.2", p));

  Complex d = parse_complex("1e-3-2i", p);
  CHECK(d.re == BigFloat::parse("0.001", p));
  CHECK(d.im == creal(-2, 1));

  CHECK(parse_complex("i", p).im == creal(1, 1));
  CHECK(parse_complex("-i", p).im == creal(-1, 1));
  CHECK(parse_complex("+i", p).im == creal(1, 1));
  CHECK(parse_complex("1+i", p).im == creal(1, 1));
  CHECK(parse_complex("1-i", p).im == creal(-1, 1));
  CHECK(parse_complex("1-i", p).re == creal(1, 1));
  CHECK(parse_complex("2.5e+3", p).re == creal(2500, 1));
  CHECK(parse_complex("2.5e+3", p).im.is_zero());
  CHECK(parse_complex("1p-4+1p-5i", p).re == creal(1, 16));
  CHECK(parse_complex("1p-4+1p-5i", p).im == creal(1, 32));

  CHECK_THROWS_AS(parse_complex("", p), InputError);
  CHECK_THROWS_AS(parse_complex("1+2", p), InputError);
  CHECK_THROWS_AS(parse_complex("abc", p), InputError);
  CHECK_THROWS_AS(parse_complex("1+zi", p), InputError);
}
