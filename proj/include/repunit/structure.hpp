#pragma once

#include <cstdint>
#include <numeric>
#include <optional>
#include <string>

#include "repunit/common.hpp"
#include "repunit/numkernel.hpp"
#include "repunit/repunit.hpp"
#include "repunit/valuation.hpp"

namespace repunit {

struct GcdReport {
  uint64_t a = 0, b = 0;
  Natural fast_result;                   // value claimed by the index identity
  std::optional<Natural> oracle_result;  // Euclid on materialized values
  std::optional<bool> agreement;
  std::string note;
};

// Certificate that divisor * quotient reassembles the subject exactly.
struct DivisorWitness {
  Subject subject;
  Natural divisor;
  Natural quotient;

  bool verify() const { return divisor * quotient == subject.value(); }
};

// gcd(R_a, R_b) = R_{gcd(a,b)}: the whole computation happens on indices.
inline RepunitIndex gcd_repunit_fast(uint64_t a, uint64_t b) {
  if (a == 0 || b == 0) throw DomainError("repunit indices must be >= 1");
  return RepunitIndex{std::gcd(a, b)};
}

// Euclid on the materialized values; the independent route used to check the
// index identity.
inline Natural gcd_repunit_oracle(uint64_t a, uint64_t b,
                                  uint64_t digit_bound = kOracleDigitBound) {
  if (a == 0 || b == 0) throw DomainError("repunit indices must be >= 1");
  if (a > digit_bound || b > digit_bound)
    throw BoundExceeded("oracle digit bound " + std::to_string(digit_bound) +
                        " exceeded by R index");
  Natural g;
  const Natural ra = repunit_value(a);
  const Natural rb = repunit_value(b);
  mpz_gcd(g.get_mpz_t(), ra.get_mpz_t(), rb.get_mpz_t());
  return g;
}

inline GcdReport gcd_repunit_report(uint64_t a, uint64_t b, bool run_oracle = true,
                                    uint64_t digit_bound = kOracleDigitBound) {
  GcdReport rep;
  rep.a = a;
  rep.b = b;
  rep.fast_result = repunit_value(gcd_repunit_fast(a, b).n);
  if (run_oracle) {
    rep.oracle_result = gcd_repunit_oracle(a, b, digit_bound);
    rep.agreement = *rep.oracle_result == rep.fast_result;
  }
  return rep;
}

// gcd(E(n,k), E(m,k)) = E(gcd(n+1, m+1) - 1, k), computed purely on indices.
inline Natural gcd_initial(uint64_t n, uint64_t m, uint64_t k) {
  if (n == 0 || m == 0) throw DomainError("initial-number gcd requires n, m >= 1");
  const uint64_t g = std::gcd(n + 1, m + 1);
  return initial_value(g - 1, k);
}

inline Natural gcd_initial_oracle(uint64_t n, uint64_t m, uint64_t k,
                                  uint64_t digit_bound = kOracleDigitBound) {
  if (n == 0 || m == 0) throw DomainError("initial-number gcd requires n, m >= 1");
  if ((n + 1) > digit_bound / (k + 1) || (m + 1) > digit_bound / (k + 1))
    throw BoundExceeded("oracle digit bound exceeded by initial-number index");
  Natural g;
  const Natural en = initial_value(n, k);
  const Natural em = initial_value(m, k);
  mpz_gcd(g.get_mpz_t(), en.get_mpz_t(), em.get_mpz_t());
  return g;
}

// Every prime divisor q of R_p (p prime > 3) has the shape 1 + 2px.
// Returns the shape check; a false would be a finding, not an error.
inline bool divisor_form_check(uint64_t p, const Natural& q) {
  if (p <= 3 || !is_probable_prime(Natural(static_cast<unsigned long>(p))).prime_like())
    throw DomainError("divisor_form_check requires a prime p > 3");
  if (!is_probable_prime(q).prime_like())
    throw DomainError("divisor_form_check requires a prime divisor q");
  if (!divides_repunit(p, q))
    throw DomainError("divisor_form_check: q does not divide R_p");
  return q % (2 * Natural(static_cast<unsigned long>(p))) == 1;
}

// gcd(R_{p^k}/R_{p^t}, R_{p^s}) = 1 for prime p > 3, k >= t >= 1, t >= s >= 1.
// fast_result carries the identity's claim, oracle_result the Euclid check.
inline GcdReport prime_power_gcd_check(uint64_t p, unsigned k, unsigned t, unsigned s,
                                       uint64_t digit_bound = kOracleDigitBound) {
  if (p <= 3 || !is_probable_prime(Natural(static_cast<unsigned long>(p))).prime_like())
    throw DomainError("prime_power_gcd_check requires a prime p > 3");
  if (!(k >= t && t >= 1 && t >= s && s >= 1))
    throw DomainError("prime_power_gcd_check requires k >= t >= 1 and t >= s >= 1");

  uint64_t pk = 1;
  for (unsigned i = 0; i < k; ++i) {
    if (pk > UINT64_MAX / p) throw BoundExceeded("p^k exceeds 2^64");
    pk *= p;
  }
  if (pk > digit_bound)
    throw BoundExceeded("oracle digit bound " + std::to_string(digit_bound) +
                        " exceeded by R(p^k)");
  uint64_t pt = 1, ps = 1;
  for (unsigned i = 0; i < t; ++i) pt *= p;
  for (unsigned i = 0; i < s; ++i) ps *= p;

  GcdReport rep;
  rep.a = pk;
  rep.b = ps;
  rep.note = "gcd(R(" + std::to_string(pk) + ")/R(" + std::to_string(pt) + "), R(" +
             std::to_string(ps) + "))";
  rep.fast_result = 1;
  const Natural quotient = cofactor(pk, pt);
  const Natural rs = repunit_value(ps);
  Natural g;
  mpz_gcd(g.get_mpz_t(), quotient.get_mpz_t(), rs.get_mpz_t());
  rep.oracle_result = g;
  rep.agreement = g == rep.fast_result;
  return rep;
}

// R_{ab}/(R_a R_b) is an integer exactly when gcd(a,b) = 1. The coprime case
// yields an exact witness; otherwise the two-sided bound
// R_a R_b / R_{(a,b)} <= gcd(R_{ab}, R_a R_b) < R_a R_b is checked and the
// conjectured closed form is reported alongside (not asserted).
struct ProductSplit {
  uint64_t a = 0, b = 0;
  bool coprime = false;
  std::optional<DivisorWitness> witness;

  struct Refusal {
    Natural gcd_value;
    Natural lower_bound;  // R_a R_b / R_{(a,b)}
    Natural upper_bound;  // R_a R_b
    bool bounds_hold = false;
    Natural conjectured;
    bool conjecture_matches = false;
  };
  std::optional<Refusal> refusal;
};

inline ProductSplit product_divisibility(uint64_t a, uint64_t b,
                                         uint64_t digit_bound = kOracleDigitBound) {
  if (a == 0 || b == 0) throw DomainError("indices must be >= 1");
  if (a > digit_bound / b)
    throw BoundExceeded("oracle digit bound " + std::to_string(digit_bound) +
                        " exceeded by R(ab)");
  ProductSplit out;
  out.a = a;
  out.b = b;
  const uint64_t d = std::gcd(a, b);
  const Natural rab = repunit_value(a * b);
  const Natural prod = repunit_value(a) * repunit_value(b);
  if (d == 1) {
    out.coprime = true;
    Natural q;
    mpz_divexact(q.get_mpz_t(), rab.get_mpz_t(), prod.get_mpz_t());
    out.witness = DivisorWitness{Subject::repunit(a * b), prod, q};
    if (!out.witness->verify()) throw InternalCheck("product witness failed to reassemble");
  } else {
    ProductSplit::Refusal ref;
    mpz_gcd(ref.gcd_value.get_mpz_t(), rab.get_mpz_t(), prod.get_mpz_t());
    Natural lower;
    mpz_divexact(lower.get_mpz_t(), prod.get_mpz_t(), repunit_value(d).get_mpz_t());
    ref.lower_bound = lower;
    ref.upper_bound = prod;
    ref.bounds_hold = ref.lower_bound <= ref.gcd_value && ref.gcd_value < ref.upper_bound;
    ref.conjectured = conjectured_product_gcd(a, b);
    ref.conjecture_matches = ref.conjectured == ref.gcd_value;
    out.refusal = std::move(ref);
  }
  return out;
}

// R_x > x, by digit count alone: R_x has x digits while x has at most 20.
inline bool repunit_dominates_index(uint64_t x) {
  if (x < 2) throw DomainError("repunit_dominates_index requires x >= 2");
  uint64_t digits = 1;
  for (uint64_t v = x; v >= 10; v /= 10) ++digits;
  return digits <= x - 1;
}

}  // namespace repunit
