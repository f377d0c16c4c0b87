#pragma once

#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "repunit/common.hpp"
#include "repunit/numkernel.hpp"
#include "repunit/repunit.hpp"

namespace repunit {

// m | R_a  <=>  10^a = 1 (mod 9m), since 9 R_a = 10^a - 1. Works for every
// m >= 1, including powers of 3 (where the bare modulus m would be wrong).
inline bool divides_repunit(uint64_t a, const Natural& m) {
  if (a == 0) throw DomainError("repunit index must be >= 1");
  if (m < 1) throw DomainError("divisor must be >= 1");
  return pow_mod(Natural(10), Natural(static_cast<unsigned long>(a)), Natural(9 * m)) == 1;
}

inline bool divides_repunit(uint64_t a, uint64_t m) {
  return divides_repunit(a, Natural(static_cast<unsigned long>(m)));
}

// Exact q-adic valuation of R_a, by modular tests only (R_a never materialized).
inline uint64_t repunit_valuation_oracle(uint64_t a, const Natural& q) {
  if (q < 2) throw DomainError("valuation base must be >= 2");
  uint64_t e = 0;
  Natural qe = q;
  while (divides_repunit(a, qe)) {
    ++e;
    qe *= q;
  }
  return e;
}

// Which closed-form prediction produced the expected exponent.
enum class ValuationRule {
  ThreeAdicOfIndex,   // v3(R_a) = v3(a)
  ElevenAdicOddIndex, // odd a: 11 never divides R_a
  ElevenAdicEvenIndex,// a = 2 * 11^n * b, (b,11)=1: exponent n+1
  OracleOnly,         // no prediction; exponent measured directly
};

inline const char* valuation_rule_name(ValuationRule r) {
  switch (r) {
    case ValuationRule::ThreeAdicOfIndex: return "three-adic-of-index";
    case ValuationRule::ElevenAdicOddIndex: return "eleven-adic-odd-index";
    case ValuationRule::ElevenAdicEvenIndex: return "eleven-adic-even-index";
    case ValuationRule::OracleOnly: return "oracle-only";
  }
  return "oracle-only";
}

struct ValuationReport {
  uint64_t index = 0;
  Natural base_prime;
  std::optional<uint64_t> predicted;
  uint64_t oracle = 0;
  ValuationRule rule = ValuationRule::OracleOnly;

  bool agreement() const { return !predicted.has_value() || *predicted == oracle; }
};

namespace detail {

inline uint64_t adic_valuation(uint64_t value, uint64_t p) {
  uint64_t e = 0;
  while (value % p == 0) {
    value /= p;
    ++e;
  }
  return e;
}

}  // namespace detail

// v3(R_a) = v3(a), checked against the modular oracle.
inline ValuationReport valuation_3(uint64_t a) {
  if (a == 0) throw DomainError("repunit index must be >= 1");
  ValuationReport r;
  r.index = a;
  r.base_prime = 3;
  r.rule = ValuationRule::ThreeAdicOfIndex;
  r.predicted = detail::adic_valuation(a, 3);
  r.oracle = repunit_valuation_oracle(a, Natural(3));
  return r;
}

// v11(R_a): 0 for odd a; n+1 when a = 2 * 11^n * b with (b, 11) = 1.
inline ValuationReport valuation_11(uint64_t a) {
  if (a == 0) throw DomainError("repunit index must be >= 1");
  ValuationReport r;
  r.index = a;
  r.base_prime = 11;
  if (a % 2 == 1) {
    r.rule = ValuationRule::ElevenAdicOddIndex;
    r.predicted = 0;
  } else {
    r.rule = ValuationRule::ElevenAdicEvenIndex;
    r.predicted = detail::adic_valuation(a, 11) + 1;
  }
  r.oracle = repunit_valuation_oracle(a, Natural(11));
  return r;
}

// Measured valuation with no closed-form prediction attached.
inline ValuationReport valuation_oracle_report(uint64_t a, const Natural& q) {
  ValuationReport r;
  r.index = a;
  r.base_prime = q;
  r.rule = ValuationRule::OracleOnly;
  r.oracle = repunit_valuation_oracle(a, q);
  return r;
}

// The tower numbers t_n = 10^(11^n) + 1 carry 11-adic valuation exactly n+1.
struct TowerCheck {
  uint64_t n = 0;
  uint64_t valuation = 0;           // measured 11-adic valuation (n+1 on pass)
  bool pass = false;
  std::optional<Natural> value;     // materialized for small n only
};

inline TowerCheck eleven_tower_check(uint64_t n) {
  if (n > 12) throw BoundExceeded("tower exponent budget: 11^n must fit in 64 bits (n <= 12)");
  uint64_t exponent = 1;
  for (uint64_t i = 0; i < n; ++i) exponent *= 11;

  Natural mod;  // 11^{n+2}
  mpz_ui_pow_ui(mod.get_mpz_t(), 11, n + 2);
  const Natural residue = pow_mod(Natural(10), Natural(static_cast<unsigned long>(exponent)), mod) + 1;

  TowerCheck out;
  out.n = n;
  // the residue determines the valuation up to n+2; a measurement of n+2
  // means "at least n+2"
  Natural r = residue;
  uint64_t measured = 0;
  while (measured < n + 2 && mpz_divisible_ui_p(r.get_mpz_t(), 11)) {
    mpz_divexact_ui(r.get_mpz_t(), r.get_mpz_t(), 11);
    ++measured;
  }
  out.valuation = measured;
  out.pass = measured == n + 1;
  if (n <= 4) out.value = pow10(exponent) + 1;
  return out;
}

struct ClaimVerdict {
  std::string claim;   // human-readable statement of the single check
  uint64_t index = 0;  // the r or n the check instantiates
  bool pass = false;
};

// Hypothesis: q | R_p and q^2 does not divide R_p. Then q^2 divides neither
// R_{p r} for 0 < r < q nor R_{p^n}; both families checked modularly.
inline std::vector<ClaimVerdict> square_barrier_check(uint64_t p, const Natural& q,
                                                      uint64_t r_bound, uint64_t n_bound) {
  if (p == 0) throw DomainError("square_barrier_check requires p >= 1");
  const Natural q2 = q * q;
  if (!divides_repunit(p, q))
    throw HypothesisViolated("square_barrier_check: q does not divide R_p");
  if (divides_repunit(p, q2))
    throw HypothesisViolated("square_barrier_check: q^2 already divides R_p");

  std::vector<ClaimVerdict> out;
  const uint64_t r_stop = q.fits_ulong_p() ? std::min<uint64_t>(r_bound + 1, mpz_get_ui(q.get_mpz_t()))
                                           : r_bound + 1;
  for (uint64_t r = 1; r < r_stop; ++r) {
    ClaimVerdict v;
    v.claim = "q^2 does not divide R(p*r)";
    v.index = r;
    v.pass = !divides_repunit(p * r, q2);
    out.push_back(std::move(v));
  }
  uint64_t pn = 1;
  for (uint64_t n = 1; n <= n_bound; ++n) {
    if (pn > UINT64_MAX / p) throw BoundExceeded("square_barrier_check: p^n exceeds 2^64");
    pn *= p;
    ClaimVerdict v;
    v.claim = "q^2 does not divide R(p^n)";
    v.index = n;
    v.pass = !divides_repunit(pn, q2);
    out.push_back(std::move(v));
  }
  return out;
}

// Hypothesis: q | R_p. Then q^{n+1} | R_{p q^n}; verified as
// 10^{p q^n} = 1 (mod 9 q^{n+1}) without materializing anything.
inline ClaimVerdict valuation_lift_check(uint64_t p, const Natural& q, uint64_t n) {
  if (p == 0) throw DomainError("valuation_lift_check requires p >= 1");
  if (!divides_repunit(p, q))
    throw HypothesisViolated("valuation_lift_check: q does not divide R_p");

  Natural qn;
  mpz_pow_ui(qn.get_mpz_t(), q.get_mpz_t(), n);
  Natural qn1;
  mpz_pow_ui(qn1.get_mpz_t(), q.get_mpz_t(), n + 1);
  if (decimal_digits(qn1) > kOracleDigitBound)
    throw BoundExceeded("valuation_lift_check: q^{n+1} exceeds the oracle digit bound");

  const Natural exponent = Natural(static_cast<unsigned long>(p)) * qn;
  const bool pass = pow_mod(Natural(10), exponent, Natural(9 * qn1)) == 1;
  ClaimVerdict v;
  v.claim = "q^{n+1} divides R(p*q^n)";
  v.index = n;
  v.pass = pass;
  return v;
}

// Conjectured closed form for gcd(R_{ab}, R_a R_b): with d = gcd(a,b) written
// as 3^L 11^S c, (c,33)=1, the gcd is (R_a R_b / R_d) * 3^L, times 11^S when
// c is even. Checked against the materialized gcd; mismatches are reported,
// never suppressed.
struct ConjectureRecord {
  uint64_t a = 0, b = 0, d = 0;
  unsigned three_exp = 0;   // L
  unsigned eleven_exp = 0;  // S
  uint64_t cofactor_c = 1;  // d / (3^L 11^S)
  Natural predicted;
  Natural actual;
  bool match = false;
};

inline Natural conjectured_product_gcd(uint64_t a, uint64_t b) {
  if (a == 0 || b == 0) throw DomainError("indices must be >= 1");
  uint64_t d = std::gcd(a, b);
  const unsigned L = static_cast<unsigned>(detail::adic_valuation(d, 3));
  const unsigned S = static_cast<unsigned>(detail::adic_valuation(d, 11));
  uint64_t c = d;
  for (unsigned i = 0; i < L; ++i) c /= 3;
  for (unsigned i = 0; i < S; ++i) c /= 11;

  Natural base = repunit_value(a) * repunit_value(b);
  mpz_divexact(base.get_mpz_t(), base.get_mpz_t(), repunit_value(d).get_mpz_t());
  Natural scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 3, L);
  base *= scale;
  if (c % 2 == 0) {
    mpz_ui_pow_ui(scale.get_mpz_t(), 11, S);
    base *= scale;
  }
  return base;
}

inline ConjectureRecord conjecture_check(uint64_t a, uint64_t b) {
  if (a == 0 || b == 0) throw DomainError("indices must be >= 1");
  if (a > kOracleDigitBound / b)
    throw BoundExceeded("conjecture_check: R_{ab} would exceed the oracle digit bound of " +
                        std::to_string(kOracleDigitBound) + " digits");
  ConjectureRecord rec;
  rec.a = a;
  rec.b = b;
  rec.d = std::gcd(a, b);
  rec.three_exp = static_cast<unsigned>(detail::adic_valuation(rec.d, 3));
  rec.eleven_exp = static_cast<unsigned>(detail::adic_valuation(rec.d, 11));
  rec.cofactor_c = rec.d;
  for (unsigned i = 0; i < rec.three_exp; ++i) rec.cofactor_c /= 3;
  for (unsigned i = 0; i < rec.eleven_exp; ++i) rec.cofactor_c /= 11;

  rec.predicted = conjectured_product_gcd(a, b);
  Natural g;
  const Natural rab = repunit_value(a * b);
  const Natural prod = repunit_value(a) * repunit_value(b);
  mpz_gcd(g.get_mpz_t(), rab.get_mpz_t(), prod.get_mpz_t());
  rec.actual = g;
  rec.match = rec.predicted == rec.actual;
  return rec;
}

}  // namespace repunit
