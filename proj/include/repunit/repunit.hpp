#pragma once

#include <cctype>
#include <cstdint>
#include <string>

#include "repunit/common.hpp"

namespace repunit {

// Values longer than this render as head...tail plus a digit count.
inline constexpr uint64_t kRenderDigitThreshold = 64;

// Oracles refuse to materialize numbers longer than this many decimal digits.
inline constexpr uint64_t kOracleDigitBound = 200'000;

inline Natural pow10(uint64_t n) {
  if (n > 1'000'000'000ULL)
    throw BoundExceeded("decimal exponent " + std::to_string(n) + " beyond the supported size");
  Natural r;
  mpz_ui_pow_ui(r.get_mpz_t(), 10, n);
  return r;
}

// R_n = (10^n - 1)/9: the n-digit all-ones number. Indices start at 1.
inline Natural repunit_value(uint64_t n) {
  if (n == 0) throw DomainError("repunit index must be >= 1 (R_0 is not defined)");
  Natural r = pow10(n) - 1;
  mpz_divexact_ui(r.get_mpz_t(), r.get_mpz_t(), 9);
  return r;
}

// E(n, k) = (10^{(k+1)(n+1)} - 1) / (10^{k+1} - 1): the block "1 0^k" written
// n times, then a closing 1. E(0, k) = 1 for every k.
inline Natural initial_value(uint64_t n, uint64_t k) {
  if (n == UINT64_MAX || k == UINT64_MAX)
    throw BoundExceeded("initial number index overflow: (k+1)(n+1) exceeds 2^64");
  const uint64_t period = k + 1;
  if (n + 1 > UINT64_MAX / period)
    throw BoundExceeded("initial number index overflow: (k+1)(n+1) exceeds 2^64");
  const Natural denom = pow10(period) - 1;
  const Natural num = pow10(period * (n + 1)) - 1;
  Natural q;
  mpz_divexact(q.get_mpz_t(), num.get_mpz_t(), denom.get_mpz_t());
  return q;
}

// (10^p + 1)/11, exact precisely when p is odd.
inline Natural repunit_plus_value(uint64_t p) {
  if (p == 0 || p % 2 == 0)
    throw DomainError("(10^p + 1)/11 is an integer only for odd p");
  Natural v = pow10(p) + 1;
  mpz_divexact_ui(v.get_mpz_t(), v.get_mpz_t(), 11);
  return v;
}

// R_a / R_d for d | a: the sum 1 + 10^d + ... + 10^{d(a/d - 1)}.
inline Natural cofactor(uint64_t a, uint64_t d) {
  if (a == 0 || d == 0 || a % d != 0)
    throw DomainError("cofactor requires divisor index d >= 1 with d | a");
  const Natural num = pow10(a) - 1;
  const Natural den = pow10(d) - 1;
  Natural q;
  mpz_divexact(q.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  return q;
}

// A digit pattern: `block` written `repetitions` times, then `suffix`.
struct DigitRecord {
  std::string block;
  uint64_t repetitions = 0;
  std::string suffix;
};

inline std::string render_digit_record(const DigitRecord& rec) {
  const auto all_digits = [](const std::string& s) {
    for (const char c : s)
      if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
  };
  if (!all_digits(rec.block) || !all_digits(rec.suffix))
    throw DomainError("digit record blocks may contain digits only");
  if (rec.repetitions > 0 && rec.block.size() > (1ULL << 30) / rec.repetitions)
    throw BoundExceeded("digit record would exceed 2^30 characters");
  std::string out;
  out.reserve(rec.block.size() * rec.repetitions + rec.suffix.size());
  for (uint64_t i = 0; i < rec.repetitions; ++i) out += rec.block;
  out += rec.suffix;
  if (out.empty())
    throw DomainError("empty digit record has no numeric value");
  return out;
}

inline uint64_t decimal_digits(const Natural& v) {
  if (v == 0) return 1;
  const size_t estimate = mpz_sizeinbase(v.get_mpz_t(), 10);  // exact or one high
  if (estimate == 1) return 1;
  return v >= pow10(estimate - 1) ? estimate : estimate - 1;
}

// Canonical rendering for reports: full digits up to the threshold, otherwise
// the leading and trailing 8 digits plus a digit count.
inline std::string truncated_decimal(const Natural& v, uint64_t digit_threshold = kRenderDigitThreshold) {
  const uint64_t digits = decimal_digits(v);
  if (digits <= digit_threshold || digits <= 16) return v.get_str();
  const Natural head = v / pow10(digits - 8);
  const Natural tail = v % pow10(8);
  std::string tail_str = tail.get_str();
  tail_str.insert(0, 8 - tail_str.size(), '0');
  return head.get_str() + "..." + tail_str + "[" + std::to_string(digits) + " digits]";
}

struct RepunitIndex {
  uint64_t n = 0;
};

// Descriptor for the numbers under study; the index pair is the identity,
// the value is materialized on demand.
struct Subject {
  enum class Kind { Repunit, Initial, RepunitPlus };

  Kind kind = Kind::Repunit;
  uint64_t n = 0;  // R index / E first index / R+ index
  uint64_t k = 0;  // E second index

  static Subject repunit(uint64_t n) { return {Kind::Repunit, n, 0}; }
  static Subject initial(uint64_t n, uint64_t k) { return {Kind::Initial, n, k}; }
  static Subject repunit_plus(uint64_t p) { return {Kind::RepunitPlus, p, 0}; }

  Natural value() const {
    switch (kind) {
      case Kind::Repunit: return repunit_value(n);
      case Kind::Initial: return initial_value(n, k);
      case Kind::RepunitPlus: return repunit_plus_value(n);
    }
    throw DomainError("unknown subject kind");
  }

  std::string label() const {
    switch (kind) {
      case Kind::Repunit: return "R(" + std::to_string(n) + ")";
      case Kind::Initial: return "E(" + std::to_string(n) + "," + std::to_string(k) + ")";
      case Kind::RepunitPlus: return "Rplus(" + std::to_string(n) + ")";
    }
    return "?";
  }
};

}  // namespace repunit
