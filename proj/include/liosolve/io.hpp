#pragma once

// JSON and CSV input/output: polynomial systems, parameter vectors, points,
// sequence configurations, certificates, tracking results and traces, plus
// the FNV-1a digest that ties a run report to its input files.
//
// Artifact writers are deterministic: field order is fixed, values are
// rendered through BigFloat::to_string, and no timestamps or timings appear
// in any file (run timing lives only in the CLI's stdout report).

#include <cstdint>
#include <string>
#include <vector>

#include "liosolve/certify.hpp"
#include "liosolve/complex.hpp"
#include "liosolve/liouville.hpp"
#include "liosolve/polynomial.hpp"
#include "liosolve/tracker.hpp"

namespace liosolve {

// {"n": 2, "r": 1, "components": [[{"re": ["1","2"], "im": ["0","1"],
//  "x": [1,0], "y": [0,0], "z": [1]}, ...], ...]} with exact rational
// coefficients as ["numerator", "denominator"] strings.
PolynomialMap load_system(const std::string& path);

// {"z": [{"re": "0.1", "im": "0"}, ...]} with decimal (or p-notation) reals.
CVector load_params(const std::string& path, unsigned prec);

// {"point": [{"re": "...", "im": "..."}, ...]}.
CVector load_point(const std::string& path, unsigned prec);

// {"kind": "default_tower" | "factorial_pow2" | "user",
//  "values": ["2", "-16", ...]}   (values only for "user")
LiouvilleSequence load_sequence(const std::string& path);

std::string certificate_json(const ZeroCertificate& cert);
std::string limit_root_json(const LimitRoot& lim);
std::string trace_csv(const std::vector<PathState>& trace);

void save_text(const std::string& path, const std::string& body);

// FNV-1a 64-bit digest, rendered as 16 hex digits.
std::uint64_t fnv1a(const void* data, size_t len);
std::string fnv1a_file_hex(const std::string& path);

// "a", "-2.5i", "0.1+0.2i", "1e-3-2i"; whitespace-free.
Complex parse_complex(const std::string& text, unsigned prec);

}  // namespace liosolve
