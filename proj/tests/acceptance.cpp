// Acceptance suite: every criterion below runs at its exact tolerance and
// prints one PASS/FAIL line. The process exits nonzero if any gating
// criterion fails. --extended additionally runs the non-gating high-effort
// probe of E(p-1,p-1) up to p = 127.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "repunit/report.hpp"

using namespace repunit;

namespace {

struct Criterion {
  int id;
  std::string description;
  std::function<std::string()> run;  // empty string on pass, failure detail otherwise
};

std::set<uint64_t> prime_like_set(const std::vector<PrimeRepunitResult>& results) {
  std::set<uint64_t> out;
  for (const auto& r : results)
    if (r.verdict.prime_like()) out.insert(r.index);
  return out;
}

std::string set_to_string(const std::set<uint64_t>& s) {
  std::string out = "{";
  for (const uint64_t v : s) out += std::to_string(v) + ",";
  if (out.size() > 1) out.pop_back();
  return out + "}";
}

// -- criterion bodies ---------------------------------------------------------

std::string gcd_identity_sweep() {
  for (uint64_t a = 1; a <= 200; ++a)
    for (uint64_t b = 1; b <= 200; ++b) {
      const Natural expect = repunit_value(std::gcd(a, b));
      if (gcd_repunit_oracle(a, b) != expect)
        return "gcd(R_" + std::to_string(a) + ", R_" + std::to_string(b) + ") != R_gcd";
    }
  return "";
}

std::string product_split_sweep() {
  for (uint64_t a = 1; a <= 60; ++a)
    for (uint64_t b = 1; b <= 60; ++b) {
      const ProductSplit s = product_divisibility(a, b);
      const bool coprime = std::gcd(a, b) == 1;
      if (s.coprime != coprime)
        return "coprimality mismatch at (" + std::to_string(a) + "," + std::to_string(b) + ")";
      if (coprime) {
        if (!s.witness || !s.witness->verify())
          return "integer quotient missing at coprime (" + std::to_string(a) + "," +
                 std::to_string(b) + ")";
      } else {
        if (!s.refusal || !s.refusal->bounds_hold)
          return "two-sided gcd bound fails at (" + std::to_string(a) + "," + std::to_string(b) +
                 ")";
        // R_ab/(R_a R_b) must NOT be an integer here
        if (mpz_divisible_p(repunit_value(a * b).get_mpz_t(),
                            s.refusal->upper_bound.get_mpz_t()))
          return "unexpected exact division at (" + std::to_string(a) + "," + std::to_string(b) +
                 ")";
      }
    }
  return "";
}

std::string initial_gcd_sweep() {
  for (uint64_t k = 0; k <= 5; ++k)
    for (uint64_t n = 2; n <= 40; ++n)
      for (uint64_t m = 1; m < n; ++m) {
        const uint64_t g = std::gcd(n + 1, m + 1);
        const Natural expect = initial_value(g - 1, k);
        if (gcd_initial_oracle(n, m, k) != expect)
          return "gcd(E(" + std::to_string(n) + "," + std::to_string(k) + "), E(" +
                 std::to_string(m) + "," + std::to_string(k) + ")) != E(" + std::to_string(g - 1) +
                 "," + std::to_string(k) + ")";
      }
  return "";
}

std::string prime_power_quotient_sweep() {
  for (const uint64_t p : {7ULL, 11ULL, 13ULL})
    for (unsigned k = 1; k <= 3; ++k)
      for (unsigned t = 1; t <= k; ++t)
        for (unsigned s = 1; s <= t; ++s) {
          const GcdReport rep = prime_power_gcd_check(p, k, t, s);
          if (!rep.agreement.value_or(false))
            return "nontrivial gcd at p=" + std::to_string(p) + " k=" + std::to_string(k) +
                   " t=" + std::to_string(t) + " s=" + std::to_string(s);
        }
  return "";
}

std::string valuation_sweep() {
  for (uint64_t a = 1; a <= 2000; ++a) {
    if (!valuation_3(a).agreement()) return "3-adic prediction fails at a=" + std::to_string(a);
    if (!valuation_11(a).agreement()) return "11-adic prediction fails at a=" + std::to_string(a);
  }
  for (uint64_t n = 0; n <= 4; ++n) {
    const TowerCheck t = eleven_tower_check(n);
    if (!t.pass) return "tower valuation fails at n=" + std::to_string(n);
  }
  return "";
}

std::string barrier_and_lift() {
  const std::vector<std::pair<uint64_t, uint64_t>> pairs{{7, 239}, {41, 83}, {2, 11}};
  for (const auto& [p, q] : pairs) {
    const Natural qn(static_cast<unsigned long>(q));
    for (const auto& v : square_barrier_check(p, qn, 50, 4))
      if (!v.pass)
        return "square barrier fails at p=" + std::to_string(p) + " q=" + std::to_string(q) +
               " (" + v.claim + ", index " + std::to_string(v.index) + ")";
    for (uint64_t n = 0; n <= 2; ++n)
      if (!valuation_lift_check(p, qn, n).pass)
        return "valuation lift fails at p=" + std::to_string(p) + " q=" + std::to_string(q) +
               " n=" + std::to_string(n);
  }
  return "";
}

ScanConfig scan_cfg(unsigned shards) {
  ScanConfig cfg;
  cfg.shards = shards;
  return cfg;
}

std::string prime_repunit_reproduction() {
  const auto results = scan_prime_repunits(400, scan_cfg(8));
  const std::set<uint64_t> got = prime_like_set(results);
  const std::set<uint64_t> expect{2, 19, 23, 317};
  if (got != expect) return "prime-like indices " + set_to_string(got) + " != {2,19,23,317}";
  return "";
}

std::string structured_divisor_claims() {
  const std::vector<std::pair<uint64_t, uint64_t>> claims{
      {41, 83}, {53, 107}, {13, 53}, {43, 173}, {79, 317}};
  for (const auto& [p, q] : claims) {
    if (!divides_repunit(p, Natural(static_cast<unsigned long>(q))))
      return std::to_string(q) + " does not divide R_" + std::to_string(p);
    if (q % (2 * p) != 1)
      return std::to_string(q) + " escapes the 1+2px form for p=" + std::to_string(p);
  }
  return "";
}

std::string fermat_reproduction() {
  const auto results = scan_generalized_fermat(10, 10, scan_cfg(8));
  std::set<uint64_t> got;
  for (const auto& r : results)
    if (r.verdict.prime_like()) got.insert(r.n);
  if (got != std::set<uint64_t>{0, 1})
    return "prime-like exponents " + set_to_string(got) + " != {0,1}";
  return "";
}

std::string squarefree_reproduction() {
  for (const uint64_t p : primes_up_to(96)) {
    const SquarefreeResult r = probe_squarefree(p, 100'000);
    if (!r.square_divisors.empty())
      return "square divisor found: q=" + std::to_string(r.square_divisors.front()) +
             " with q^2 | R_" + std::to_string(p) + " -- a publishable finding; aborting";
  }
  return "";
}

std::string epp_default_probe() {
  for (const uint64_t p : primes_up_to(61)) {
    if (p == 2) continue;  // E(1,1) = 101 is prime; the flagged edge case
    const ScreenVerdict v = probe_epp(p, Effort::Standard);
    if (v.outcome != ScreenOutcome::CompositeWithFactor &&
        v.outcome != ScreenOutcome::CompositeByTest)
      return "no composite verdict for p=" + std::to_string(p) + " (" +
             screen_outcome_name(v.outcome) + ")";
  }
  return "";
}

std::string screen_vs_factoring() {
  for (uint64_t n = 2; n <= 8; ++n)
    for (uint64_t k = 1; k <= 8; ++k) {
      const ScreenVerdict v = screen_initial(n, k);
      if (v.outcome != ScreenOutcome::CompositeByRule) continue;
      const Natural value = initial_value(n, k);
      if (!v.factor || *v.factor <= 1 || *v.factor >= value ||
          !mpz_divisible_p(value.get_mpz_t(), v.factor->get_mpz_t()))
        return "rule divisor fails exact division at (" + std::to_string(n) + "," +
               std::to_string(k) + ")";
      const Factorization f = bounded_factor(value);
      const bool confirmed_composite =
          (!f.factors.empty() && !(f.factors.size() == 1 && f.factors[0].first == value &&
                                   f.factors[0].second == 1)) ||
          f.remainder_kind == Factorization::Remainder::Composite;
      if (!confirmed_composite)
        return "bounded factoring cannot confirm compositeness at (" + std::to_string(n) + "," +
               std::to_string(k) + ")";
    }
  return "";
}

std::string conjecture_completeness() {
  size_t records = 0;
  size_t mismatches = 0;
  for (uint64_t a = 1; a <= 40; ++a)
    for (uint64_t b = 1; b <= 40; ++b) {
      const ConjectureRecord rec = conjecture_check(a, b);
      ++records;
      // internal consistency: decomposition exact, gcd divides both arguments
      Natural rebuilt(static_cast<unsigned long>(rec.cofactor_c));
      for (unsigned i = 0; i < rec.three_exp; ++i) rebuilt *= 3;
      for (unsigned i = 0; i < rec.eleven_exp; ++i) rebuilt *= 11;
      if (rebuilt != Natural(static_cast<unsigned long>(rec.d)))
        return "decomposition broken at (" + std::to_string(a) + "," + std::to_string(b) + ")";
      if (rec.cofactor_c % 3 == 0 || rec.cofactor_c % 11 == 0)
        return "cofactor not coprime to 33 at (" + std::to_string(a) + "," + std::to_string(b) +
               ")";
      const Natural rab = repunit_value(a * b);
      const Natural prod = repunit_value(a) * repunit_value(b);
      if (!mpz_divisible_p(rab.get_mpz_t(), rec.actual.get_mpz_t()) ||
          !mpz_divisible_p(prod.get_mpz_t(), rec.actual.get_mpz_t()))
        return "oracle gcd does not divide its arguments at (" + std::to_string(a) + "," +
               std::to_string(b) + ")";
      if (!rec.match) {
        ++mismatches;
        const ResultRecord r = make_record(rec);
        std::printf("    counterexample record: %s\n", to_json_line(r).c_str());
      }
    }
  if (records != 1600) return "expected 1600 records, saw " + std::to_string(records);
  // Mismatches are reported, never suppressed; they do not fail this criterion.
  if (mismatches > 0)
    std::printf("    note: %zu conjecture counterexample(s) recorded\n", mismatches);
  return "";
}

std::string shard_determinism() {
  const json config{{"command", "acceptance-determinism"}};
  const auto render_primes = [&](unsigned shards) {
    std::vector<ResultRecord> records;
    for (const auto& r : scan_prime_repunits(400, scan_cfg(shards))) records.push_back(make_record(r));
    return render_jsonl(config, records);
  };
  const auto render_fermat = [&](unsigned shards) {
    std::vector<ResultRecord> records;
    for (const auto& r : scan_generalized_fermat(10, 10, scan_cfg(shards)))
      records.push_back(make_record(r));
    return render_jsonl(config, records);
  };
  const auto render_squarefree = [&](unsigned shards) {
    std::vector<uint64_t> keys = primes_up_to(96);
    std::vector<ResultRecord> records;
    const auto batches = sharded_map(keys, shards, [](uint64_t p) {
      return make_record(probe_squarefree(p, 100'000));
    });
    for (const auto& r : batches) records.push_back(r);
    return render_jsonl(config, records);
  };

  const std::string p1 = render_primes(1);
  if (render_primes(2) != p1 || render_primes(8) != p1) return "primes scan differs across shards";
  const std::string f1 = render_fermat(1);
  if (render_fermat(2) != f1 || render_fermat(8) != f1) return "fermat scan differs across shards";
  const std::string s1 = render_squarefree(1);
  if (render_squarefree(2) != s1 || render_squarefree(8) != s1)
    return "squarefree scan differs across shards";
  return "";
}

void extended_epp_probe() {
  std::printf("[info] extended run: E(p-1,p-1) at high effort for primes up to 127 (non-gating)\n");
  for (const uint64_t p : primes_up_to(127)) {
    if (p == 2) continue;
    const auto t0 = std::chrono::steady_clock::now();
    const ScreenVerdict v = probe_epp(p, Effort::High);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[info]   p=%llu: %s%s (%.1fs)\n", static_cast<unsigned long long>(p),
                screen_outcome_name(v.outcome),
                v.factor ? (" factor " + v.factor->get_str()).c_str() : "", secs);
  }
}

}  // namespace

int main(int argc, char** argv) {
  bool extended = false;
  for (int i = 1; i < argc; ++i)
    if (std::strcmp(argv[i], "--extended") == 0) extended = true;

  const std::vector<Criterion> criteria{
      {1, "gcd(R_a, R_b) = R_gcd(a,b) for all a, b <= 200 (Euclid oracle, exact)",
       gcd_identity_sweep},
      {2, "R_ab/(R_a R_b) integer iff gcd(a,b)=1, with the two-sided gcd bound, a, b <= 60",
       product_split_sweep},
      {3, "gcd(E(n,k), E(m,k)) = E(gcd(n+1,m+1)-1, k) for m < n <= 40, k <= 5",
       initial_gcd_sweep},
      {4, "gcd(R_{p^k}/R_{p^t}, R_{p^s}) = 1 for p in {7,11,13}, k <= 3",
       prime_power_quotient_sweep},
      {5, "3-adic and 11-adic valuation predictions match the oracle to a = 2000; towers n <= 4",
       valuation_sweep},
      {6, "square-barrier and lift checks for (p,q) in {(7,239),(41,83),(2,11)}",
       barrier_and_lift},
      {7, "prime repunit scan to 400 finds prime-like indices exactly {2,19,23,317}",
       prime_repunit_reproduction},
      {8, "structured divisors: 83|R_41, 107|R_53, 53|R_13, 173|R_43, 317|R_79",
       structured_divisor_claims},
      {9, "generalized Fermat base 10: prime-like exactly n in {0,1} for n <= 10",
       fermat_reproduction},
      {10, "no square divisor q^2 | R_p for prime p < 97, q <= 100000",
       squarefree_reproduction},
      {11, "E(p-1,p-1) composite for every odd prime p <= 61 at standard effort",
       epp_default_probe},
      {12, "screen rule verdicts confirmed by exact division and bounded factoring, n,k <= 8",
       screen_vs_factoring},
      {13, "conjectured product-gcd records complete and internally consistent, a, b <= 40",
       conjecture_completeness},
      {14, "scans for criteria 7, 9, 10 are byte-identical across shard counts 1, 2, 8",
       shard_determinism},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    std::string detail;
    try {
      detail = c.run();
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (detail.empty()) {
      std::printf("[PASS] criterion %2d: %s (%.1fs)\n", c.id, c.description.c_str(), secs);
    } else {
      std::printf("[FAIL] criterion %2d: %s (%.1fs)\n       %s\n", c.id, c.description.c_str(),
                  secs, detail.c_str());
      ++failures;
    }
    std::fflush(stdout);
  }

  if (extended) extended_epp_probe();

  if (failures) {
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
  }
  std::printf("all %zu criteria passed\n", criteria.size());
  return 0;
}
