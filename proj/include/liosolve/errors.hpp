#pragma once

#include <stdexcept>
#include <string>

namespace liosolve {

// Base class for everything thrown by this library.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input: bad JSON, inconsistent dimensions, unparsable numbers.
struct InputError : Error {
  explicit InputError(const std::string& msg) : Error(msg) {}
};

// Domain violations in arithmetic: division by zero, sqrt of a negative,
// conversion of a non-finite double.
struct ArithmeticError : Error {
  explicit ArithmeticError(const std::string& msg) : Error(msg) {}
};

// A linear solve hit an exactly singular pivot.
struct SingularJacobian : Error {
  explicit SingularJacobian(const std::string& msg) : Error(msg) {}
};

// A certification test landed inside the ambiguity band around its
// tolerance: the answer would change under a small precision bump, so we
// refuse to report either verdict at this precision.
struct PrecisionExhausted : Error {
  explicit PrecisionExhausted(const std::string& msg) : Error(msg) {}
};

// A tail bound was requested for a user sequence whose growth could not be
// verified over the probe window.
struct GrowthUnverified : Error {
  explicit GrowthUnverified(const std::string& msg) : Error(msg) {}
};

// Sequence construction rejected (zero entry, empty user list).
struct InvalidSequence : InputError {
  explicit InvalidSequence(const std::string& msg) : InputError(msg) {}
};

// Index outside the sequence (i = 0, or past a user-supplied list).
struct InvalidIndex : InputError {
  explicit InvalidIndex(const std::string& msg) : InputError(msg) {}
};

// The tail-bound ratio test found a term pair decaying slower than 1/2;
// the caller must raise the truncation degree.
struct RatioTestFailed : Error {
  explicit RatioTestFailed(const std::string& msg) : Error(msg) {}
};

// Certification was asked for a point whose residual exceeds the residual
// tolerance: there is nothing to certify.
struct NotAZero : Error {
  explicit NotAZero(const std::string& msg) : Error(msg) {}
};

// Witness search rejected the point: some x-coordinate is (numerically)
// zero or two x-coordinates coincide.
struct DistinctnessViolated : Error {
  explicit DistinctnessViolated(const std::string& msg) : Error(msg) {}
};

// The augmentation polynomial P is identically zero.
struct ZeroPolynomial : InputError {
  explicit ZeroPolynomial(const std::string& msg) : InputError(msg) {}
};

// Newton refused the point: iterates stopped contracting before reaching
// the target tolerance.
struct NoConvergence : Error {
  explicit NoConvergence(const std::string& msg) : Error(msg) {}
};

// The multistart budget ran out without finding a root of the truncated
// system inside the ball.
struct StartNotFound : Error {
  explicit StartNotFound(const std::string& msg) : Error(msg) {}
};

// A tracked path left the working ball |x| <= r_max.
struct PathEscapedBall : Error {
  explicit PathEscapedBall(const std::string& msg) : Error(msg) {}
};

// Step halving hit the substep limit without an accepted step.
struct SubstepLimit : Error {
  explicit SubstepLimit(const std::string& msg) : Error(msg) {}
};

}  // namespace liosolve
