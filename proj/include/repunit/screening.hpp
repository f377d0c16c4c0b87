#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <type_traits>
#include <vector>

#include "repunit/common.hpp"
#include "repunit/numkernel.hpp"
#include "repunit/repunit.hpp"
#include "repunit/structure.hpp"
#include "repunit/valuation.hpp"

namespace repunit {

// Applies fn to every key on up to `shards` threads. Results land in key
// order, so the output is independent of the shard count.
template <class Fn>
auto sharded_map(const std::vector<uint64_t>& keys, unsigned shards, Fn&& fn)
    -> std::vector<std::invoke_result_t<Fn&, uint64_t>> {
  using R = std::invoke_result_t<Fn&, uint64_t>;
  std::vector<R> out(keys.size());
  if (shards <= 1 || keys.size() <= 1) {
    for (size_t i = 0; i < keys.size(); ++i) out[i] = fn(keys[i]);
    return out;
  }
  shards = static_cast<unsigned>(std::min<size_t>(shards, keys.size()));
  std::atomic<size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(shards);
  for (unsigned s = 0; s < shards; ++s) {
    pool.emplace_back([&] {
      try {
        for (size_t i = next.fetch_add(1); i < keys.size(); i = next.fetch_add(1))
          out[i] = fn(keys[i]);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
  return out;
}

struct ScanConfig {
  unsigned rounds = kDefaultSprpRounds;
  uint64_t sieve_x_bound = 1000;   // 1 + 2px pre-sieve inside the primes scan
  uint64_t trial_bound = 10'000;   // small-prime modular screen inside the primes scan
  unsigned shards = 1;
};

enum class ScreenOutcome {
  CompositeByRule,
  CompositeWithFactor,
  CompositeByTest,
  ProbablePrime,
  Unresolved,
};

inline const char* screen_outcome_name(ScreenOutcome o) {
  switch (o) {
    case ScreenOutcome::CompositeByRule: return "composite-by-rule";
    case ScreenOutcome::CompositeWithFactor: return "composite-with-factor";
    case ScreenOutcome::CompositeByTest: return "composite-by-test";
    case ScreenOutcome::ProbablePrime: return "probable-prime";
    case ScreenOutcome::Unresolved: return "unresolved";
  }
  return "unresolved";
}

struct ScreenVerdict {
  Subject subject;
  ScreenOutcome outcome = ScreenOutcome::Unresolved;
  unsigned rule = 0;                    // 1..4 when CompositeByRule
  std::optional<Natural> factor;        // proper divisor when one is known
  std::optional<Natural> witness_base;  // failing strong-pseudoprime base
  std::string evidence;
};

namespace detail {

// The four compositeness rules for E(n,k) with n > 1, k > 0, in fixed order;
// each returns its constructive proper divisor when it applies.
inline std::optional<std::pair<unsigned, Natural>> screen_rule_divisor(uint64_t n, uint64_t k) {
  if (n % 2 == 1)  // rule 1: n odd => E((n+1)/2 - 1, k) divides
    return std::make_pair(1u, initial_value((n + 1) / 2 - 1, k));
  if (k % 2 == 1)  // rule 2: k odd (n even here) => E(n, (k+1)/2 - 1) divides
    return std::make_pair(2u, initial_value(n, (k + 1) / 2 - 1));
  if ((n + 1) % 3 == 0)  // rule 3: digit sum n+1 is a multiple of 3
    return std::make_pair(3u, Natural(3));
  if (std::gcd(n + 1, k + 1) == 1)  // rule 4: R(n+1) splits off exactly
    return std::make_pair(4u, repunit_value(n + 1));
  return std::nullopt;
}

inline ScreenVerdict verdict_from_primality(Subject subject, const PrimalityVerdict& pv,
                                            std::string evidence_prefix) {
  ScreenVerdict v;
  v.subject = subject;
  if (pv.prime_like()) {
    v.outcome = ScreenOutcome::ProbablePrime;
    v.evidence = evidence_prefix + primality_name(pv.verdict);
    return v;
  }
  if (pv.witness && mpz_divisible_p(pv.value.get_mpz_t(), pv.witness->get_mpz_t()) &&
      *pv.witness != pv.value && *pv.witness > 1) {
    v.outcome = ScreenOutcome::CompositeWithFactor;
    v.factor = pv.witness;
    v.evidence = evidence_prefix + "factor " + pv.witness->get_str();
    return v;
  }
  v.outcome = ScreenOutcome::CompositeByTest;
  v.witness_base = pv.witness;
  v.evidence = evidence_prefix +
               (pv.witness ? "strong-pseudoprime base " + pv.witness->get_str() : "strong lucas");
  return v;
}

}  // namespace detail

// Compositeness screen for E(n,k), n > 1, k > 0. Rules are tried in fixed
// order 1..4 and the first match wins; each rule's constructive divisor is
// re-verified by exact division before the verdict is emitted. When no rule
// applies, falls through to bounded trial division and a probable-prime test.
inline ScreenVerdict screen_initial(uint64_t n, uint64_t k, const ScanConfig& cfg = {}) {
  if (n <= 1 || k == 0)
    throw DomainError(
        "screen_initial hypothesis needs n > 1 and k > 0 "
        "(k = 0 is the repunit problem, n = 1 the generalized Fermat problem)");
  const Subject subject = Subject::initial(n, k);

  if (const auto rule = detail::screen_rule_divisor(n, k)) {
    const Natural value = subject.value();
    const auto& [id, divisor] = *rule;
    if (divisor <= 1 || divisor >= value || !mpz_divisible_p(value.get_mpz_t(), divisor.get_mpz_t()))
      throw InternalCheck("screen rule " + std::to_string(id) + " produced a bad divisor for " +
                          subject.label());
    ScreenVerdict v;
    v.subject = subject;
    v.outcome = ScreenOutcome::CompositeByRule;
    v.rule = id;
    v.factor = divisor;
    switch (id) {
      case 1: v.evidence = "rule 1: n odd"; break;
      case 2: v.evidence = "rule 2: k odd"; break;
      case 3: v.evidence = "rule 3: n+1 divisible by 3"; break;
      case 4: v.evidence = "rule 4: gcd(n+1, k+1) = 1"; break;
    }
    return v;
  }

  const Natural value = subject.value();
  const Factorization f = bounded_factor(value, kDefaultTrialBound, Effort::Light);
  if (!f.factors.empty() && !(f.factors.size() == 1 && f.factors[0].first == value)) {
    ScreenVerdict v;
    v.subject = subject;
    v.outcome = ScreenOutcome::CompositeWithFactor;
    v.factor = f.factors.front().first;
    v.evidence = "trial division";
    return v;
  }
  return detail::verdict_from_primality(subject, is_probable_prime(value, cfg.rounds),
                                        "primality test: ");
}

struct PrimeRepunitResult {
  uint64_t index = 0;
  PrimalityVerdict verdict;
  std::string evidence;
  std::optional<uint64_t> sieve_x;  // set when the 1+2px sieve found the factor
};

// Tests R_p for one prime index p: structured 1+2px divisor sieve first, then
// a small-prime modular screen, then the deterministic probable-prime test.
// Every emitted factor of R_p with p > 3 is re-checked against the 1+2px form.
inline PrimeRepunitResult probe_prime_repunit(uint64_t p, const ScanConfig& cfg = {}) {
  if (!is_probable_prime(Natural(static_cast<unsigned long>(p))).prime_like())
    throw DomainError("probe_prime_repunit requires a prime index");
  PrimeRepunitResult out;
  out.index = p;
  const Natural rp = repunit_value(p);

  const auto emit_factor = [&](const Natural& q, std::string evidence,
                               std::optional<uint64_t> x) {
    if (!divides_repunit(p, q)) throw InternalCheck("emitted factor fails the divisibility recheck");
    if (p > 3 && q % (2 * Natural(static_cast<unsigned long>(p))) != 1)
      throw InternalCheck("prime divisor of R_p escaped the 1+2px form");
    out.verdict = {rp, Primality::CompositeWithWitness, q};
    out.evidence = std::move(evidence);
    out.sieve_x = x;
  };

  if (p > 3) {
    for (uint64_t x = 1; x <= cfg.sieve_x_bound; ++x) {
      const Natural q = Natural(2 * static_cast<unsigned long>(p)) * x + 1;
      if (q >= rp) break;
      if (pow_mod(Natural(10), Natural(static_cast<unsigned long>(p)), q) != 1) continue;
      if (!is_probable_prime(q, cfg.rounds).prime_like()) continue;
      emit_factor(q, "sieve 1+2px at x=" + std::to_string(x), x);
      return out;
    }
  }

  for (const uint32_t q : small_primes()) {
    if (q > cfg.trial_bound) break;
    if (q == 2 || q == 5) continue;
    const Natural qn(static_cast<unsigned long>(q));
    if (qn >= rp) break;
    if (divides_repunit(p, qn)) {
      emit_factor(qn, "trial division", std::nullopt);
      return out;
    }
  }

  out.verdict = is_probable_prime(rp, cfg.rounds);
  if (!out.verdict.prime_like()) {
    out.evidence = out.verdict.witness
                       ? "strong-pseudoprime base " + out.verdict.witness->get_str()
                       : "strong lucas";
    // The witness here is a base, not a factor; the 1+2px recheck does not apply.
  }
  return out;
}

// R_p over the prime indices p in (lo, hi]; composite indices are skipped
// outright since R_n with composite n inherits the divisor R_d for d | n.
inline std::vector<PrimeRepunitResult> scan_prime_repunits_range(uint64_t lo, uint64_t hi,
                                                                 const ScanConfig& cfg = {}) {
  std::vector<uint64_t> keys;
  for (const uint64_t p : primes_up_to(hi))
    if (p > lo) keys.push_back(p);
  return sharded_map(keys, cfg.shards, [&](uint64_t p) { return probe_prime_repunit(p, cfg); });
}

inline std::vector<PrimeRepunitResult> scan_prime_repunits(uint64_t max_index,
                                                           const ScanConfig& cfg = {}) {
  if (max_index < 2) throw DomainError("scan_prime_repunits requires max_index >= 2");
  return scan_prime_repunits_range(0, max_index, cfg);
}

// Candidate divisors q = 1 + 2px of R_p for x = 1..x_bound; emits an exact
// witness for every prime hit. x = 1 and x = 2 are the 2p+1 / 4p+1 families.
inline std::vector<DivisorWitness> sieve_divisors(uint64_t p, uint64_t x_bound,
                                                  unsigned rounds = kDefaultSprpRounds) {
  if (p <= 3 || !is_probable_prime(Natural(static_cast<unsigned long>(p))).prime_like())
    throw DomainError("sieve_divisors requires a prime p > 3");
  std::vector<DivisorWitness> hits;
  const Natural rp = repunit_value(p);
  for (uint64_t x = 1; x <= x_bound; ++x) {
    const Natural q = Natural(2 * static_cast<unsigned long>(p)) * x + 1;
    if (q >= rp) break;
    if (pow_mod(Natural(10), Natural(static_cast<unsigned long>(p)), q) != 1) continue;
    if (!is_probable_prime(q, rounds).prime_like()) continue;
    Natural quotient;
    mpz_divexact(quotient.get_mpz_t(), rp.get_mpz_t(), q.get_mpz_t());
    DivisorWitness w{Subject::repunit(p), q, quotient};
    if (!w.verify()) throw InternalCheck("sieve witness failed to reassemble");
    hits.push_back(std::move(w));
  }
  return hits;
}

struct SquarefreeResult {
  uint64_t p = 0;
  uint64_t q_bound = 0;
  std::vector<uint64_t> square_divisors;  // primes q with q^2 | R_p; expected empty
};

// Squarefree probe of R_p: for every prime q <= q_bound with q not dividing
// 10, test q^2 | R_p modularly. No hit means "squarefree up to q_bound" only.
inline SquarefreeResult probe_squarefree(uint64_t p, uint64_t q_bound) {
  if (!is_probable_prime(Natural(static_cast<unsigned long>(p))).prime_like())
    throw DomainError("probe_squarefree requires a prime index");
  SquarefreeResult out;
  out.p = p;
  out.q_bound = q_bound;
  for (const uint64_t q : primes_up_to(q_bound)) {
    if (q == 2 || q == 5) continue;
    const Natural q2 = Natural(static_cast<unsigned long>(q)) * q;
    if (divides_repunit(p, q2)) out.square_divisors.push_back(q);
  }
  return out;
}

// Probes E(p-1, p-1) = R_{p^2}/R_p for a prime p. Any prime divisor q coprime
// to R_p gives 10 multiplicative order p^2 mod q, hence q = 1 mod 2p^2; those
// structured candidates are sieved first, then small primes, then one
// deterministic compositeness test sized by the effort level.
inline ScreenVerdict probe_epp(uint64_t p, Effort effort = Effort::Standard) {
  if (!is_probable_prime(Natural(static_cast<unsigned long>(p))).prime_like())
    throw DomainError("probe_epp requires a prime index");
  const Subject subject = Subject::initial(p - 1, p - 1);
  const Natural value = subject.value();

  if (p == 2)
    return detail::verdict_from_primality(subject, is_probable_prime(value), "p=2 edge case: ");

  const uint64_t x_bound =
      effort == Effort::Light ? 1'000 : effort == Effort::Standard ? 10'000 : 100'000;
  const Natural p2(static_cast<unsigned long>(p * p));
  for (uint64_t x = 1; x <= x_bound; ++x) {
    const Natural q = 2 * p2 * x + 1;
    if (q >= value) break;
    if (pow_mod(Natural(10), p2, q) != 1) continue;
    if (pow_mod(Natural(10), Natural(static_cast<unsigned long>(p)), q) == 1) continue;
    if (!is_probable_prime(q).prime_like()) continue;
    if (!mpz_divisible_p(value.get_mpz_t(), q.get_mpz_t()))
      throw InternalCheck("structured candidate passed the order test but fails division");
    ScreenVerdict v;
    v.subject = subject;
    v.outcome = ScreenOutcome::CompositeWithFactor;
    v.factor = q;
    v.evidence = "structured sieve 1+2p^2x at x=" + std::to_string(x);
    return v;
  }

  for (const uint32_t q : small_primes()) {
    if (q > 10'000) break;
    const Natural qn(static_cast<unsigned long>(q));
    if (qn >= value) break;
    if (mpz_divisible_ui_p(value.get_mpz_t(), q)) {
      ScreenVerdict v;
      v.subject = subject;
      v.outcome = ScreenOutcome::CompositeWithFactor;
      v.factor = qn;
      v.evidence = "trial division";
      return v;
    }
  }

  const uint64_t digit_cap = effort == Effort::Light    ? 2'000
                             : effort == Effort::Standard ? 8'000
                                                          : UINT64_MAX;
  const uint64_t digits = p * p - p;
  if (digits > digit_cap) {
    ScreenVerdict v;
    v.subject = subject;
    v.outcome = ScreenOutcome::Unresolved;
    v.evidence = "value has " + std::to_string(digits) + " digits; over the " +
                 std::string(effort_name(effort)) + "-effort cap";
    return v;
  }
  return detail::verdict_from_primality(subject, is_probable_prime(value, 2),
                                        "compositeness test: ");
}

struct FermatResult {
  uint64_t n = 0;
  uint64_t base = 10;
  PrimalityVerdict verdict;
};

inline void validate_fermat_request(uint64_t base, uint64_t n) {
  if (base <= 2 || base % 2 != 0)
    throw DomainError("generalized Fermat base must be even and > 2");
  if (n > 24) throw BoundExceeded("generalized Fermat exponent budget: n <= 24");
  const uint64_t base_digits = decimal_digits(Natural(static_cast<unsigned long>(base)));
  if ((1ULL << n) > kOracleDigitBound / base_digits)
    throw BoundExceeded("generalized Fermat value would exceed the oracle digit bound of " +
                        std::to_string(kOracleDigitBound) + " digits");
}

// f_n(base) = base^(2^n) + 1 for even base > 2.
inline FermatResult fermat_number_verdict(uint64_t base, uint64_t n,
                                          unsigned rounds = kDefaultSprpRounds) {
  validate_fermat_request(base, n);
  Natural v;
  mpz_ui_pow_ui(v.get_mpz_t(), base, 1ULL << n);
  v += 1;
  return FermatResult{n, base, is_probable_prime(v, rounds)};
}

inline std::vector<FermatResult> scan_generalized_fermat(uint64_t base, uint64_t max_n,
                                                         const ScanConfig& cfg = {}) {
  validate_fermat_request(base, max_n);
  std::vector<uint64_t> keys;
  for (uint64_t n = 0; n <= max_n; ++n) keys.push_back(n);
  return sharded_map(keys, cfg.shards,
                     [&](uint64_t n) { return fermat_number_verdict(base, n, cfg.rounds); });
}

struct SophieGermainVerdict {
  uint64_t p = 0;
  uint64_t safe_prime = 0;  // 2p + 1
  bool applicable = false;  // 2p + 1 prime
  bool divides_repunit = false;       // 2p+1 | R_p
  bool divides_repunit_plus = false;  // 2p+1 | (10^p + 1)/11
};

// For p > 5 with 2p+1 prime, 10^p = +-1 (mod 2p+1) forces exactly one of
// R_p, (10^p+1)/11 to be divisible by 2p+1. One modular exponentiation decides.
inline SophieGermainVerdict sophie_germain_check(uint64_t p) {
  if (p <= 5 || !is_probable_prime(Natural(static_cast<unsigned long>(p))).prime_like())
    throw DomainError("sophie_germain_check requires a prime p > 5");
  SophieGermainVerdict out;
  out.p = p;
  out.safe_prime = 2 * p + 1;
  const Natural m(static_cast<unsigned long>(out.safe_prime));
  if (!is_probable_prime(m).prime_like()) return out;  // not applicable
  out.applicable = true;
  const Natural r = pow_mod(Natural(10), Natural(static_cast<unsigned long>(p)), m);
  out.divides_repunit = r == 1;
  out.divides_repunit_plus = r == m - 1;
  if (out.divides_repunit == out.divides_repunit_plus)
    throw InternalCheck("safe-prime branch test must pick exactly one side");
  return out;
}

}  // namespace repunit
