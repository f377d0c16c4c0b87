#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace repunit {

// Arbitrary-precision integer; the library keeps all public values >= 0.
using Natural = mpz_class;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside an operation's domain (bad index, violated precondition).
class DomainError : public Error {
 public:
  using Error::Error;
};

// The request would materialize values past the configured digit/iteration bound.
class BoundExceeded : public Error {
 public:
  using Error::Error;
};

// gcd(base, modulus) > 1 where a unit was required.
class NotCoprime : public Error {
 public:
  using Error::Error;
};

// A result would require work past the configured effort (e.g. an unfactorable
// group exponent); refusing beats returning a possibly-wrong answer.
class NotComputable : public Error {
 public:
  using Error::Error;
};

// A check was invoked on inputs that fail its hypothesis.
class HypothesisViolated : public Error {
 public:
  using Error::Error;
};

// Checkpoint file missing, unreadable, or inconsistent with the requested run.
class CheckpointError : public Error {
 public:
  using Error::Error;
};

// A cross-check that can only fail on an implementation defect did fail.
class InternalCheck : public Error {
 public:
  using Error::Error;
};

// Budget knob for bounded searches (factoring, structured divisor probes).
enum class Effort { Light, Standard, High };

inline const char* effort_name(Effort e) {
  switch (e) {
    case Effort::Light: return "light";
    case Effort::Standard: return "standard";
    case Effort::High: return "high";
  }
  return "standard";
}

inline Effort parse_effort(const std::string& name) {
  if (name == "light") return Effort::Light;
  if (name == "standard") return Effort::Standard;
  if (name == "high") return Effort::High;
  throw DomainError("unknown effort level '" + name + "' (expected light|standard|high)");
}

}  // namespace repunit
