#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "repunit/common.hpp"

namespace repunit {

// Trial-division ceiling shared by the factoring and primality paths.
inline constexpr uint64_t kDefaultTrialBound = 100'000;

// Below this, primality is settled by complete trial division over the sieve
// primes (sqrt(1e10) = 1e5) and the verdict is a proof, not a probable-prime.
inline constexpr uint64_t kSieveProofBound = 10'000'000'000ULL;

// Strong-pseudoprime rounds used when callers do not pick their own count.
// Bases are always the first `rounds` primes, so verdicts never drift.
inline constexpr unsigned kDefaultSprpRounds = 8;

inline constexpr const char* kWitnessScheduleId = "first-primes+strong-lucas/v1";

inline std::vector<uint64_t> primes_up_to(uint64_t bound) {
  std::vector<uint64_t> out;
  if (bound < 2) return out;
  std::vector<bool> composite(bound + 1, false);
  for (uint64_t p = 2; p * p <= bound; ++p) {
    if (composite[p]) continue;
    for (uint64_t m = p * p; m <= bound; m += p) composite[m] = true;
  }
  for (uint64_t p = 2; p <= bound; ++p)
    if (!composite[p]) out.push_back(p);
  return out;
}

// Shared read-only sieve; built once, safe for concurrent readers.
inline const std::vector<uint32_t>& small_primes() {
  static const std::vector<uint32_t> primes = [] {
    std::vector<uint32_t> v;
    for (uint64_t p : primes_up_to(kDefaultTrialBound)) v.push_back(static_cast<uint32_t>(p));
    return v;
  }();
  return primes;
}

class Modulus {
 public:
  explicit Modulus(Natural m) : value_(std::move(m)) {
    if (value_ < 2) throw DomainError("modulus must be >= 2");
  }
  explicit Modulus(uint64_t m) : Modulus(Natural(static_cast<unsigned long>(m))) {}

  const Natural& value() const { return value_; }

 private:
  Natural value_;
};

inline Natural pow_mod(const Natural& base, const Natural& exponent, const Natural& modulus) {
  if (modulus < 2) throw DomainError("pow_mod modulus must be >= 2");
  if (exponent < 0) throw DomainError("pow_mod exponent must be >= 0");
  Natural r;
  mpz_powm(r.get_mpz_t(), base.get_mpz_t(), exponent.get_mpz_t(), modulus.get_mpz_t());
  return r;
}

inline Natural pow_mod(const Natural& base, const Natural& exponent, const Modulus& m) {
  return pow_mod(base, exponent, m.value());
}

inline Natural pow_mod(uint64_t base, uint64_t exponent, const Natural& modulus) {
  return pow_mod(Natural(static_cast<unsigned long>(base)),
                 Natural(static_cast<unsigned long>(exponent)), modulus);
}

enum class Primality {
  Unit,                 // the number 1: neither prime nor composite
  CompositeWithWitness,
  ProbablePrime,
  ProvenPrimeBelowSieveBound,
};

inline const char* primality_name(Primality p) {
  switch (p) {
    case Primality::Unit: return "unit";
    case Primality::CompositeWithWitness: return "composite-with-witness";
    case Primality::ProbablePrime: return "probable-prime";
    case Primality::ProvenPrimeBelowSieveBound: return "proven-prime-below-sieve-bound";
  }
  return "unit";
}

struct PrimalityVerdict {
  Natural value;
  Primality verdict = Primality::Unit;
  // A dividing factor, or a strong-pseudoprime base the value fails; absent for
  // 0, 1 and for strong-Lucas rejections.
  std::optional<Natural> witness;

  bool prime_like() const {
    return verdict == Primality::ProbablePrime || verdict == Primality::ProvenPrimeBelowSieveBound;
  }
};

namespace detail {

// One strong-pseudoprime round; n odd, n > base.
inline bool strong_probable_prime(const Natural& n, unsigned long base) {
  Natural d = n - 1;
  const mp_bitcnt_t s = mpz_scan1(d.get_mpz_t(), 0);
  mpz_tdiv_q_2exp(d.get_mpz_t(), d.get_mpz_t(), s);
  Natural x;
  const Natural b(base);
  mpz_powm(x.get_mpz_t(), b.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
  if (x == 1 || x == n - 1) return true;
  for (mp_bitcnt_t r = 1; r < s; ++r) {
    mpz_powm_ui(x.get_mpz_t(), x.get_mpz_t(), 2, n.get_mpz_t());
    if (x == n - 1) return true;
    if (x == 1) return false;
  }
  return false;
}

// Strong Lucas test with the standard discriminant search (5, -7, 9, -11, ...).
// Caller guarantees: n odd, n > 3, not a perfect square, no tiny prime factors.
inline bool strong_lucas_probable_prime(const Natural& n) {
  Natural D;
  long d_abs = 5;
  int sign = 1;
  while (true) {
    D = sign > 0 ? Natural(d_abs) : Natural(-d_abs);
    const int j = mpz_jacobi(D.get_mpz_t(), n.get_mpz_t());
    if (j == -1) break;
    if (j == 0) return false;  // shares a factor with D, and n > |D|
    d_abs += 2;
    sign = -sign;
    if (d_abs > 1'000'000) throw InternalCheck("lucas discriminant search exhausted");
  }
  // P = 1, Q = (1 - D)/4; every candidate D is 1 mod 4 so the division is exact.
  const Natural Q = (1 - D) / 4;

  const auto mod_n = [&](Natural x) {
    x %= n;
    if (x < 0) x += n;
    return x;
  };
  const auto halve_mod_n = [&](Natural x) {
    x = mod_n(std::move(x));
    if (mpz_odd_p(x.get_mpz_t())) x += n;  // n odd, so this makes x even
    x >>= 1;
    return x;
  };

  Natural delta = n + 1;
  const mp_bitcnt_t s = mpz_scan1(delta.get_mpz_t(), 0);
  Natural d = delta >> s;

  // Left-to-right ladder for U_d, V_d, Q^d (mod n), starting at index 1.
  Natural U(1), V(1);
  Natural Qk = mod_n(Q);
  const size_t bits = mpz_sizeinbase(d.get_mpz_t(), 2);
  for (size_t i = bits - 1; i-- > 0;) {
    U = mod_n(U * V);
    V = mod_n(V * V - 2 * Qk);
    Qk = mod_n(Qk * Qk);
    if (mpz_tstbit(d.get_mpz_t(), i)) {
      const Natural nU = halve_mod_n(U + V);
      const Natural nV = halve_mod_n(D * U + V);
      U = nU;
      V = nV;
      Qk = mod_n(Qk * Q);
    }
  }

  if (U == 0 || V == 0) return true;
  for (mp_bitcnt_t r = 1; r < s; ++r) {
    V = mod_n(V * V - 2 * Qk);
    Qk = mod_n(Qk * Qk);
    if (V == 0) return true;
  }
  return false;
}

}  // namespace detail

// Deterministic primality classification: complete trial division below
// kSieveProofBound, then fixed prime bases (the first `rounds` primes) plus one
// strong Lucas round. No per-call randomness; verdicts are stable across runs
// and thread counts.
inline PrimalityVerdict is_probable_prime(const Natural& value, unsigned rounds = kDefaultSprpRounds) {
  if (value < 0) throw DomainError("is_probable_prime requires value >= 0");
  if (rounds < 1) throw DomainError("is_probable_prime requires rounds >= 1");
  if (value == 0) return {value, Primality::CompositeWithWitness, std::nullopt};
  if (value == 1) return {value, Primality::Unit, std::nullopt};
  if (value == 2) return {value, Primality::ProvenPrimeBelowSieveBound, std::nullopt};
  if (mpz_even_p(value.get_mpz_t()))
    return {value, Primality::CompositeWithWitness, Natural(2)};

  if (mpz_cmp_ui(value.get_mpz_t(), kSieveProofBound) < 0) {
    const uint64_t v = mpz_get_ui(value.get_mpz_t());
    for (const uint32_t p : small_primes()) {
      const uint64_t pp = static_cast<uint64_t>(p) * p;
      if (pp > v) break;
      if (v % p == 0) return {value, Primality::CompositeWithWitness, Natural(static_cast<unsigned long>(p))};
    }
    return {value, Primality::ProvenPrimeBelowSieveBound, std::nullopt};
  }

  // Quick factor screen before the expensive rounds.
  for (const uint32_t p : small_primes()) {
    if (p > 1000) break;
    if (mpz_divisible_ui_p(value.get_mpz_t(), p))
      return {value, Primality::CompositeWithWitness, Natural(static_cast<unsigned long>(p))};
  }

  const auto& bases = small_primes();
  const unsigned base_count = std::min<unsigned>(rounds, static_cast<unsigned>(bases.size()));
  for (unsigned i = 0; i < base_count; ++i) {
    if (!detail::strong_probable_prime(value, bases[i]))
      return {value, Primality::CompositeWithWitness, Natural(static_cast<unsigned long>(bases[i]))};
  }

  // A perfect square would defeat the Lucas discriminant search.
  if (mpz_perfect_square_p(value.get_mpz_t())) {
    Natural root;
    mpz_sqrt(root.get_mpz_t(), value.get_mpz_t());
    return {value, Primality::CompositeWithWitness, root};
  }
  if (!detail::strong_lucas_probable_prime(value))
    return {value, Primality::CompositeWithWitness, std::nullopt};
  return {value, Primality::ProbablePrime, std::nullopt};
}

struct Factorization {
  enum class Remainder { None, ProbablePrime, Composite };

  std::vector<std::pair<Natural, unsigned>> factors;  // ascending bases
  Natural remainder{1};
  Remainder remainder_kind = Remainder::None;

  Natural reassembled() const {
    Natural v = remainder;
    for (const auto& [p, e] : factors)
      for (unsigned i = 0; i < e; ++i) v *= p;
    return v;
  }
};

namespace detail {

// Brent-cycle rho with a fixed polynomial schedule; returns 0 when the
// iteration budget runs out. No randomness, so repeated runs agree.
inline Natural rho_brent(const Natural& n, unsigned long poly_shift, uint64_t budget) {
  const auto step = [&](const Natural& v) { return Natural((v * v + poly_shift) % n); };
  Natural y(2), d(1), q(1), x, ys;
  uint64_t r = 1;
  uint64_t steps = 0;
  const uint64_t block = 64;
  while (d == 1) {
    x = y;
    for (uint64_t i = 0; i < r; ++i) y = step(y);
    uint64_t k = 0;
    while (k < r && d == 1) {
      ys = y;
      const uint64_t lim = std::min(block, r - k);
      for (uint64_t i = 0; i < lim; ++i) {
        y = step(y);
        Natural diff = x - y;
        mpz_abs(diff.get_mpz_t(), diff.get_mpz_t());
        if (diff != 0) q = (q * diff) % n;
      }
      mpz_gcd(d.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
      k += lim;
      steps += lim;
      if (steps > budget) return Natural(0);
    }
    r <<= 1;
  }
  if (d == n) {
    // The block accumulated several factors at once; retrace one step at a time.
    d = 1;
    while (d == 1) {
      ys = step(ys);
      Natural diff = x - ys;
      mpz_abs(diff.get_mpz_t(), diff.get_mpz_t());
      mpz_gcd(d.get_mpz_t(), diff.get_mpz_t(), n.get_mpz_t());
      if (++steps > budget) return Natural(0);
    }
  }
  if (d == n) return Natural(0);
  return d;
}

}  // namespace detail

// Trial division up to trial_bound, then a budgeted rho stage. The product of
// factors^exponents times remainder always reassembles the input; the
// remainder, when not 1, is flagged probable-prime or composite.
inline Factorization bounded_factor(const Natural& value, uint64_t trial_bound = kDefaultTrialBound,
                                    Effort effort = Effort::Standard) {
  if (value < 1) throw DomainError("bounded_factor requires value >= 1");
  Factorization out;
  Natural v = value;
  if (v == 1) return out;

  std::map<Natural, unsigned> found;
  const auto trial = [&](uint64_t p) {
    unsigned e = 0;
    while (mpz_divisible_ui_p(v.get_mpz_t(), p)) {
      mpz_divexact_ui(v.get_mpz_t(), v.get_mpz_t(), p);
      ++e;
    }
    if (e) found[Natural(static_cast<unsigned long>(p))] += e;
  };

  // The sqrt cutoff proves the tail prime without exhausting the sieve; the
  // tail is still handed to the second stage so light runs keep it in the
  // remainder as documented.
  bool tail_known_prime = false;
  const auto run_trial_stage = [&](auto&& primes) {
    for (const uint64_t p : primes) {
      if (p > trial_bound || v == 1) break;
      if (Natural(static_cast<unsigned long>(p)) * p > v) {
        tail_known_prime = true;
        break;
      }
      trial(p);
    }
  };
  if (trial_bound <= kDefaultTrialBound)
    run_trial_stage(small_primes());
  else
    run_trial_stage(primes_up_to(trial_bound));

  if (v > 1) {
    if (effort == Effort::Light) {
      out.remainder = v;
      out.remainder_kind = (tail_known_prime || is_probable_prime(v).prime_like())
                               ? Factorization::Remainder::ProbablePrime
                               : Factorization::Remainder::Composite;
    } else if (tail_known_prime) {
      found[v] += 1;
    } else {
      const uint64_t budget = effort == Effort::High ? (1ULL << 21) : (1ULL << 17);
      const unsigned attempts = effort == Effort::High ? 6 : 3;
      std::vector<Natural> pending{v};
      std::vector<Natural> stuck;
      while (!pending.empty()) {
        Natural c = pending.back();
        pending.pop_back();
        if (is_probable_prime(c).prime_like()) {
          found[c] += 1;
          continue;
        }
        Natural f(0);
        for (unsigned a = 0; a < attempts && f == 0; ++a)
          f = detail::rho_brent(c, 1 + 2 * a, budget);
        if (f == 0) {
          stuck.push_back(std::move(c));
          continue;
        }
        pending.push_back(c / f);
        pending.push_back(std::move(f));
      }
      if (!stuck.empty()) {
        out.remainder = 1;
        for (const Natural& c : stuck) out.remainder *= c;
        out.remainder_kind = Factorization::Remainder::Composite;
      }
    }
  }

  out.factors.assign(found.begin(), found.end());
  return out;
}

struct OrderResult {
  Natural base;
  Natural modulus;
  Natural order;  // least d >= 1 with base^d = 1 (mod modulus)
};

namespace detail {

inline Natural carmichael_exponent(const std::vector<std::pair<Natural, unsigned>>& modulus_factors) {
  Natural lambda(1);
  for (const auto& [p, e] : modulus_factors) {
    Natural comp;
    if (p == 2) {
      if (e == 1)
        comp = 1;
      else if (e == 2)
        comp = 2;
      else {
        mpz_ui_pow_ui(comp.get_mpz_t(), 2, e - 2);
      }
    } else {
      Natural pk;
      mpz_pow_ui(pk.get_mpz_t(), p.get_mpz_t(), e - 1);
      comp = (p - 1) * pk;
    }
    mpz_lcm(lambda.get_mpz_t(), lambda.get_mpz_t(), comp.get_mpz_t());
  }
  return lambda;
}

}  // namespace detail

// Least d with base^d = 1 (mod m), found by factoring the Carmichael exponent
// and peeling prime factors. Refuses (NotComputable) when factoring stalls at
// the requested effort instead of guessing.
inline OrderResult multiplicative_order(const Natural& base, const Modulus& m,
                                        Effort effort = Effort::High) {
  Natural g;
  mpz_gcd(g.get_mpz_t(), base.get_mpz_t(), m.value().get_mpz_t());
  if (g != 1) throw NotCoprime("multiplicative_order requires gcd(base, modulus) = 1");

  const Factorization fm = bounded_factor(m.value(), kDefaultTrialBound, effort);
  if (fm.remainder != 1)
    throw NotComputable("multiplicative_order: modulus does not factor at this effort");
  const Natural lambda = detail::carmichael_exponent(fm.factors);

  const Factorization fl = bounded_factor(lambda, kDefaultTrialBound, effort);
  if (fl.remainder != 1)
    throw NotComputable("multiplicative_order: group exponent does not factor at this effort");

  Natural order = lambda;
  for (const auto& [s, e] : fl.factors) {
    (void)e;
    while (mpz_divisible_p(order.get_mpz_t(), s.get_mpz_t())) {
      const Natural candidate = order / s;
      if (pow_mod(base, candidate, m) != 1) break;
      order = candidate;
    }
  }
  if (pow_mod(base, order, m) != 1) throw InternalCheck("order descent lost the identity");
  return {base, m.value(), order};
}

inline OrderResult multiplicative_order(uint64_t base, uint64_t modulus,
                                        Effort effort = Effort::High) {
  return multiplicative_order(Natural(static_cast<unsigned long>(base)), Modulus(modulus), effort);
}

}  // namespace repunit
