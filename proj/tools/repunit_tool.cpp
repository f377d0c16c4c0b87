// repunit-tool: exact-arithmetic checks and desk-scale scans over repunits
// R_n, initial numbers E(n,k), plus-repunits (10^p+1)/11 and generalized
// Fermat numbers. Every command emits self-describing JSON-lines records;
// scans are resumable from checkpoints and deterministic for a fixed config.
//
// Exit status: 0 success; 1 a verified mathematical counterexample was
// recorded; 2 usage error; 3 internal assertion failure.

#include <chrono>
#include <cstdint>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "repunit/report.hpp"

namespace {

using namespace repunit;

struct CommonOpts {
  std::string output;
  std::string csv;
  bool full = false;
  uint64_t threshold = kRenderDigitThreshold;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--output", opts.output, "write the run as JSON-lines to this path")
      ->envname("REPUNIT_OUTPUT");
  cmd->add_option("--csv", opts.csv, "also export the records as CSV to this path")
      ->envname("REPUNIT_CSV");
  cmd->add_flag("--full", opts.full, "render full digits instead of truncating");
  cmd->add_option("--digit-threshold", opts.threshold,
                  "truncate rendered values beyond this many digits")
      ->envname("REPUNIT_DIGIT_THRESHOLD");
}

RenderOptions render_opts(const CommonOpts& opts) {
  return RenderOptions{opts.full ? UINT64_MAX : opts.threshold};
}

json make_config(const std::string& command, json params, const CommonOpts& opts) {
  // Only semantic knobs go in the header: shard counts and file paths cannot
  // change record content and would break byte-identical reruns.
  return json{{"command", command},
              {"witness_schedule", kWitnessScheduleId},
              {"digit_threshold", opts.full ? json("full") : json(opts.threshold)},
              {"params", std::move(params)}};
}

// Writes files, prints a human summary, and returns the process exit code.
int emit_run(const std::string& command, const json& params,
             const std::vector<ResultRecord>& records, const CommonOpts& opts) {
  const json config = make_config(command, params, opts);
  if (!opts.output.empty()) write_text_file(opts.output, render_jsonl(config, records));
  if (!opts.csv.empty()) write_text_file(opts.csv, to_csv(records));

  size_t counterexamples = 0;
  for (const auto& rec : records)
    if (flags_counterexample(rec)) ++counterexamples;

  const size_t print_cap = 200;
  size_t printed = 0;
  for (const auto& rec : records) {
    const bool important = flags_counterexample(rec);
    if (printed >= print_cap && !important) continue;
    std::string line = rec.kind;
    for (const auto& [k, v] : rec.payload.items())
      line += " " + k + "=" + (v.is_string() ? v.get<std::string>() : v.dump());
    if (important) line = "!! " + line;
    std::cout << line << "\n";
    ++printed;
  }
  if (records.size() > printed)
    std::cout << "... (" << records.size() - printed
              << " more records; use --output to capture the full stream)\n";
  std::cout << command << ": " << records.size() << " record(s), " << counterexamples
            << " counterexample(s)\n";
  return counterexamples ? 1 : 0;
}

// ---- scan driver -----------------------------------------------------------

struct ScanJob {
  std::string scan_id;
  json params;        // per-key evaluation parameters; must match on resume
  json range;         // range bound; grows freely across resumes
  std::vector<uint64_t> keys;  // ascending
  std::function<std::vector<ResultRecord>(uint64_t)> eval;
};

struct ScanOpts {
  std::string checkpoint;
  bool resume = false;
  uint64_t checkpoint_every = 64;
  unsigned shards = 1;
};

void add_scan_opts(CLI::App* cmd, ScanOpts& opts) {
  cmd->add_option("--checkpoint", opts.checkpoint, "checkpoint file for resumable runs")
      ->envname("REPUNIT_CHECKPOINT");
  cmd->add_flag("--resume", opts.resume, "continue from the checkpoint file");
  cmd->add_option("--checkpoint-every", opts.checkpoint_every,
                  "write the checkpoint after this many keys")
      ->envname("REPUNIT_CHECKPOINT_EVERY");
  cmd->add_option("--shards", opts.shards, "worker threads; never changes the output")
      ->envname("REPUNIT_SHARDS");
}

int drive_scan(const ScanJob& job, const ScanOpts& scan_opts, const CommonOpts& opts) {
  std::vector<ResultRecord> records;
  double wall_before = 0.0;
  uint64_t start_after = 0;
  bool have_progress = false;

  if (scan_opts.resume) {
    if (scan_opts.checkpoint.empty())
      throw DomainError("--resume requires --checkpoint");
    const Checkpoint cp = load_checkpoint(scan_opts.checkpoint);
    if (cp.scan_id != job.scan_id)
      throw CheckpointError("checkpoint belongs to scan '" + cp.scan_id + "', not '" +
                            job.scan_id + "'");
    if (cp.params != job.params)
      throw CheckpointError("checkpoint parameters differ from the requested run: " +
                            cp.params.dump() + " vs " + job.params.dump());
    records = cp.hits;
    start_after = cp.last_index;
    wall_before = cp.wall_seconds;
    have_progress = true;
  }

  std::vector<uint64_t> todo;
  for (const uint64_t k : job.keys)
    if (!have_progress || k > start_after) todo.push_back(k);

  const auto t0 = std::chrono::steady_clock::now();
  const auto wall_now = [&] {
    return wall_before +
           std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  const uint64_t chunk_size = std::max<uint64_t>(1, scan_opts.checkpoint_every);
  for (size_t off = 0; off < todo.size(); off += chunk_size) {
    const size_t end = std::min(todo.size(), off + chunk_size);
    const std::vector<uint64_t> chunk(todo.begin() + off, todo.begin() + end);
    const auto chunk_records = sharded_map(chunk, scan_opts.shards, job.eval);
    for (const auto& batch : chunk_records)
      records.insert(records.end(), batch.begin(), batch.end());
    if (!scan_opts.checkpoint.empty()) {
      Checkpoint cp;
      cp.scan_id = job.scan_id;
      cp.params = job.params;
      cp.last_index = chunk.back();
      cp.wall_seconds = wall_now();
      cp.hits = records;
      write_checkpoint(cp, scan_opts.checkpoint);
    }
    std::cerr << job.scan_id << ": " << std::min(off + chunk_size, todo.size()) << "/"
              << todo.size() << " keys\n";
  }

  json header_params = job.params;
  for (const auto& [k, v] : job.range.items()) header_params[k] = v;
  return emit_run("scan-" + job.scan_id, header_params, records, opts);
}

std::vector<uint64_t> primes_between(uint64_t lo_exclusive, uint64_t hi_inclusive) {
  std::vector<uint64_t> keys;
  for (const uint64_t p : primes_up_to(hi_inclusive))
    if (p > lo_exclusive) keys.push_back(p);
  return keys;
}

// ---- commands --------------------------------------------------------------

int run_eval(const std::string& kind, uint64_t i, std::optional<uint64_t> j, uint64_t fermat_base,
             const CommonOpts& opts) {
  Natural value;
  std::string label;
  json params{{"kind", kind}, {"i", i}};
  if (kind == "R") {
    value = repunit_value(i);
    label = Subject::repunit(i).label();
  } else if (kind == "E") {
    if (!j) throw DomainError("eval E needs two indices: eval E <n> <k>");
    value = initial_value(i, *j);
    label = Subject::initial(i, *j).label();
    params["j"] = *j;
  } else if (kind == "Rplus") {
    value = repunit_plus_value(i);
    label = Subject::repunit_plus(i).label();
  } else if (kind == "F") {
    validate_fermat_request(fermat_base, i);
    Natural v;
    mpz_ui_pow_ui(v.get_mpz_t(), fermat_base, 1ULL << i);
    value = v + 1;
    label = "F(" + std::to_string(i) + ";" + std::to_string(fermat_base) + ")";
    params["base"] = fermat_base;
  } else {
    throw DomainError("eval kind must be one of R, E, Rplus, F");
  }

  ResultRecord rec;
  rec.kind = "eval";
  rec.payload["subject"] = label;
  rec.payload["digits"] = decimal_digits(value);
  rec.payload["value"] = render_value(value, render_opts(opts));
  return emit_run("eval", params, {rec}, opts);
}

void require_pair(const std::optional<uint64_t>& x, const std::optional<uint64_t>& y,
                  const char* first, const char* second) {
  if (x.has_value() != y.has_value())
    throw DomainError(std::string(first) + " and " + second + " must be given together");
}

int run_gcd_check(std::optional<uint64_t> a, std::optional<uint64_t> b, uint64_t max,
                  const CommonOpts& opts) {
  require_pair(a, b, "--a", "--b");
  std::vector<ResultRecord> records;
  const RenderOptions ropt = render_opts(opts);
  json params;
  if (a && b) {
    params = json{{"a", *a}, {"b", *b}};
    records.push_back(make_record(gcd_repunit_report(*a, *b), ropt));
  } else {
    params = json{{"max", max}};
    for (uint64_t x = 1; x <= max; ++x)
      for (uint64_t y = 1; y <= max; ++y)
        records.push_back(make_record(gcd_repunit_report(x, y), ropt));
  }
  return emit_run("gcd-check", params, records, opts);
}

int run_product_div(std::optional<uint64_t> a, std::optional<uint64_t> b, uint64_t max,
                    const CommonOpts& opts) {
  require_pair(a, b, "--a", "--b");
  std::vector<ResultRecord> records;
  const RenderOptions ropt = render_opts(opts);
  json params;
  if (a && b) {
    params = json{{"a", *a}, {"b", *b}};
    records.push_back(make_record(product_divisibility(*a, *b), ropt));
  } else {
    params = json{{"max", max}};
    for (uint64_t x = 1; x <= max; ++x)
      for (uint64_t y = 1; y <= max; ++y)
        records.push_back(make_record(product_divisibility(x, y), ropt));
  }
  return emit_run("product-div", params, records, opts);
}

int run_valuation(uint64_t base, std::optional<uint64_t> index, uint64_t max,
                  const CommonOpts& opts) {
  const Natural q(static_cast<unsigned long>(base));
  if (!is_probable_prime(q).prime_like())
    throw DomainError("valuation base must be prime (3 and 11 have predictions; other primes "
                      "use the oracle only)");
  const auto report_for = [&](uint64_t a) {
    if (base == 3) return valuation_3(a);
    if (base == 11) return valuation_11(a);
    return valuation_oracle_report(a, q);
  };
  std::vector<ResultRecord> records;
  const RenderOptions ropt = render_opts(opts);
  json params{{"base", base}};
  if (index) {
    params["index"] = *index;
    records.push_back(make_record(report_for(*index), ropt));
  } else {
    params["max"] = max;
    for (uint64_t a = 1; a <= max; ++a) records.push_back(make_record(report_for(a), ropt));
  }
  return emit_run("valuation", params, records, opts);
}

int run_lemma_tower(uint64_t max_n, const CommonOpts& opts) {
  std::vector<ResultRecord> records;
  const RenderOptions ropt = render_opts(opts);
  for (uint64_t n = 0; n <= max_n; ++n) records.push_back(make_record(eleven_tower_check(n), ropt));
  return emit_run("lemma-check-tower", json{{"max_n", max_n}}, records, opts);
}

int run_lemma_barrier(uint64_t p, uint64_t q, uint64_t r_bound, uint64_t n_bound,
                      const CommonOpts& opts) {
  std::vector<ResultRecord> records;
  const RenderOptions ropt = render_opts(opts);
  for (const auto& v : square_barrier_check(p, Natural(static_cast<unsigned long>(q)), r_bound, n_bound))
    records.push_back(make_record(v, ropt));
  return emit_run("lemma-check-barrier",
                  json{{"p", p}, {"q", q}, {"r_bound", r_bound}, {"n_bound", n_bound}}, records,
                  opts);
}

int run_lemma_lift(uint64_t p, uint64_t q, uint64_t n, const CommonOpts& opts) {
  const auto v = valuation_lift_check(p, Natural(static_cast<unsigned long>(q)), n);
  return emit_run("lemma-check-lift", json{{"p", p}, {"q", q}, {"n", n}},
                  {make_record(v, render_opts(opts))}, opts);
}

int run_conjecture(std::optional<uint64_t> a, std::optional<uint64_t> b, uint64_t max,
                   const CommonOpts& opts) {
  require_pair(a, b, "--a", "--b");
  std::vector<ResultRecord> records;
  const RenderOptions ropt = render_opts(opts);
  json params;
  if (a && b) {
    params = json{{"a", *a}, {"b", *b}};
    records.push_back(make_record(conjecture_check(*a, *b), ropt));
  } else {
    params = json{{"max", max}};
    for (uint64_t x = 1; x <= max; ++x)
      for (uint64_t y = 1; y <= max; ++y)
        records.push_back(make_record(conjecture_check(x, y), ropt));
  }
  return emit_run("conjecture-check", params, records, opts);
}

int run_screen(std::optional<uint64_t> n, std::optional<uint64_t> k, uint64_t max_n, uint64_t max_k,
               const CommonOpts& opts) {
  require_pair(n, k, "--n", "--k");
  std::vector<ResultRecord> records;
  const RenderOptions ropt = render_opts(opts);
  json params;
  if (n && k) {
    params = json{{"n", *n}, {"k", *k}};
    records.push_back(make_record(screen_initial(*n, *k), ropt));
  } else {
    params = json{{"max_n", max_n}, {"max_k", max_k}};
    for (uint64_t nn = 2; nn <= max_n; ++nn)
      for (uint64_t kk = 1; kk <= max_k; ++kk)
        records.push_back(make_record(screen_initial(nn, kk), ropt));
  }
  return emit_run("screen", params, records, opts);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "repunit-tool: exact checks and desk-scale scans for repunits, initial numbers "
      "and their divisors"};
  app.require_subcommand(1);

  int exit_code = 0;

  // ---- eval ----
  auto* eval_cmd = app.add_subcommand("eval", "materialize R_n, E(n,k), (10^p+1)/11 or f_n(base)");
  static CommonOpts eval_opts;
  static std::string eval_kind;
  static uint64_t eval_i = 0;
  static std::optional<uint64_t> eval_j;
  static uint64_t eval_base = 10;
  eval_cmd->add_option("kind", eval_kind, "R | E | Rplus | F")->required();
  eval_cmd->add_option("i", eval_i, "first index")->required();
  eval_cmd->add_option("j", eval_j, "second index (E only)");
  eval_cmd->add_option("--base", eval_base, "generalized Fermat base (F only)")
      ->envname("REPUNIT_FERMAT_BASE");
  add_common(eval_cmd, eval_opts);
  eval_cmd->callback([&] { exit_code = run_eval(eval_kind, eval_i, eval_j, eval_base, eval_opts); });

  // ---- gcd-check ----
  auto* gcd_cmd = app.add_subcommand("gcd-check", "gcd(R_a, R_b) = R_gcd(a,b), identity vs Euclid");
  static CommonOpts gcd_opts;
  static std::optional<uint64_t> gcd_a, gcd_b;
  static uint64_t gcd_max = 200;
  gcd_cmd->add_option("--a", gcd_a, "single pair: first index");
  gcd_cmd->add_option("--b", gcd_b, "single pair: second index");
  gcd_cmd->add_option("--max", gcd_max, "sweep all pairs up to this index")
      ->envname("REPUNIT_MAX");
  add_common(gcd_cmd, gcd_opts);
  gcd_cmd->callback([&] { exit_code = run_gcd_check(gcd_a, gcd_b, gcd_max, gcd_opts); });

  // ---- product-div ----
  auto* prod_cmd = app.add_subcommand(
      "product-div", "is R_ab/(R_a R_b) an integer? witness or bounded refusal");
  static CommonOpts prod_opts;
  static std::optional<uint64_t> prod_a, prod_b;
  static uint64_t prod_max = 60;
  prod_cmd->add_option("--a", prod_a, "single pair: first index");
  prod_cmd->add_option("--b", prod_b, "single pair: second index");
  prod_cmd->add_option("--max", prod_max, "sweep all pairs up to this index")
      ->envname("REPUNIT_MAX");
  add_common(prod_cmd, prod_opts);
  prod_cmd->callback([&] { exit_code = run_product_div(prod_a, prod_b, prod_max, prod_opts); });

  // ---- valuation ----
  auto* val_cmd = app.add_subcommand("valuation", "q-adic valuation of R_a, prediction vs oracle");
  static CommonOpts val_opts;
  static uint64_t val_base = 3;
  static std::optional<uint64_t> val_index;
  static uint64_t val_max = 2000;
  val_cmd->add_option("--base", val_base, "prime base (3 and 11 carry predictions)")
      ->envname("REPUNIT_VALUATION_BASE");
  val_cmd->add_option("--index", val_index, "single repunit index");
  val_cmd->add_option("--max", val_max, "sweep indices 1..max")->envname("REPUNIT_MAX");
  add_common(val_cmd, val_opts);
  val_cmd->callback([&] { exit_code = run_valuation(val_base, val_index, val_max, val_opts); });

  // ---- lemma-check ----
  auto* lemma_cmd = app.add_subcommand("lemma-check", "divisibility lemma checks");
  lemma_cmd->require_subcommand(1);

  auto* tower_cmd = lemma_cmd->add_subcommand(
      "tower", "11-adic valuation of 10^(11^n)+1 is exactly n+1");
  static CommonOpts tower_opts;
  static uint64_t tower_max_n = 4;
  tower_cmd->add_option("--max-n", tower_max_n, "check n = 0..max")->envname("REPUNIT_MAX_N");
  add_common(tower_cmd, tower_opts);
  tower_cmd->callback([&] { exit_code = run_lemma_tower(tower_max_n, tower_opts); });

  auto* barrier_cmd = lemma_cmd->add_subcommand(
      "barrier", "q^2 divides neither R_pr (r < q) nor R_p^n when q || R_p");
  static CommonOpts barrier_opts;
  static uint64_t barrier_p = 7, barrier_q = 239, barrier_r = 50, barrier_n = 4;
  barrier_cmd->add_option("--p", barrier_p, "prime p with q | R_p")->required();
  barrier_cmd->add_option("--q", barrier_q, "prime q dividing R_p exactly once")->required();
  barrier_cmd->add_option("--r-bound", barrier_r, "check r = 1..min(q-1, bound)");
  barrier_cmd->add_option("--n-bound", barrier_n, "check exponents n = 1..bound");
  add_common(barrier_cmd, barrier_opts);
  barrier_cmd->callback(
      [&] { exit_code = run_lemma_barrier(barrier_p, barrier_q, barrier_r, barrier_n, barrier_opts); });

  auto* lift_cmd = lemma_cmd->add_subcommand(
      "lift", "q^{n+1} divides R_{p q^n} whenever q | R_p");
  static CommonOpts lift_opts;
  static uint64_t lift_p = 7, lift_q = 239, lift_n = 1;
  lift_cmd->add_option("--p", lift_p, "prime p with q | R_p")->required();
  lift_cmd->add_option("--q", lift_q, "prime q dividing R_p")->required();
  lift_cmd->add_option("--n", lift_n, "lift exponent");
  add_common(lift_cmd, lift_opts);
  lift_cmd->callback([&] { exit_code = run_lemma_lift(lift_p, lift_q, lift_n, lift_opts); });

  // ---- conjecture-check ----
  auto* conj_cmd = app.add_subcommand(
      "conjecture-check", "compare gcd(R_ab, R_a R_b) with the conjectured closed form");
  static CommonOpts conj_opts;
  static std::optional<uint64_t> conj_a, conj_b;
  static uint64_t conj_max = 40;
  conj_cmd->add_option("--a", conj_a, "single pair: first index");
  conj_cmd->add_option("--b", conj_b, "single pair: second index");
  conj_cmd->add_option("--max", conj_max, "sweep all pairs up to this index")
      ->envname("REPUNIT_MAX");
  add_common(conj_cmd, conj_opts);
  conj_cmd->callback([&] { exit_code = run_conjecture(conj_a, conj_b, conj_max, conj_opts); });

  // ---- screen ----
  auto* screen_cmd = app.add_subcommand(
      "screen", "compositeness screen for E(n,k), n > 1, k > 0");
  static CommonOpts screen_opts;
  static std::optional<uint64_t> screen_n, screen_k;
  static uint64_t screen_max_n = 8, screen_max_k = 8;
  screen_cmd->add_option("--n", screen_n, "single subject: first index");
  screen_cmd->add_option("--k", screen_k, "single subject: second index");
  screen_cmd->add_option("--max-n", screen_max_n, "sweep n = 2..max")->envname("REPUNIT_MAX_N");
  screen_cmd->add_option("--max-k", screen_max_k, "sweep k = 1..max")->envname("REPUNIT_MAX_K");
  add_common(screen_cmd, screen_opts);
  screen_cmd->callback(
      [&] { exit_code = run_screen(screen_n, screen_k, screen_max_n, screen_max_k, screen_opts); });

  // ---- scan ----
  auto* scan_cmd = app.add_subcommand("scan", "resumable deterministic searches");
  scan_cmd->require_subcommand(1);

  auto* primes_cmd = scan_cmd->add_subcommand("primes", "probable-prime repunits R_p, p prime");
  static CommonOpts primes_common;
  static ScanOpts primes_scan;
  static uint64_t primes_max = 400;
  static uint64_t primes_x_bound = 1000, primes_trial = 10'000;
  static unsigned primes_rounds = kDefaultSprpRounds;
  primes_cmd->add_option("--max-index", primes_max, "test prime indices up to this bound")
      ->envname("REPUNIT_MAX_INDEX");
  primes_cmd->add_option("--x-bound", primes_x_bound, "1+2px pre-sieve depth")
      ->envname("REPUNIT_X_BOUND");
  primes_cmd->add_option("--trial-bound", primes_trial, "small-prime screen bound")
      ->envname("REPUNIT_TRIAL_BOUND");
  primes_cmd->add_option("--rounds", primes_rounds, "strong-pseudoprime rounds")
      ->envname("REPUNIT_ROUNDS");
  add_scan_opts(primes_cmd, primes_scan);
  add_common(primes_cmd, primes_common);
  primes_cmd->callback([&] {
    if (primes_max < 2) throw DomainError("--max-index must be >= 2");
    ScanConfig cfg;
    cfg.rounds = primes_rounds;
    cfg.sieve_x_bound = primes_x_bound;
    cfg.trial_bound = primes_trial;
    ScanJob job;
    job.scan_id = "primes";
    job.params = json{{"x_bound", primes_x_bound},
                      {"trial_bound", primes_trial},
                      {"rounds", primes_rounds},
                      {"digit_threshold", primes_common.full ? json("full") : json(primes_common.threshold)}};
    job.range = json{{"max_index", primes_max}};
    job.keys = primes_between(1, primes_max);
    const RenderOptions ropt = render_opts(primes_common);
    job.eval = [cfg, ropt](uint64_t p) {
      return std::vector<ResultRecord>{make_record(probe_prime_repunit(p, cfg), ropt)};
    };
    exit_code = drive_scan(job, primes_scan, primes_common);
  });

  auto* sqfree_cmd = scan_cmd->add_subcommand("squarefree", "square divisors q^2 | R_p");
  static CommonOpts sqfree_common;
  static ScanOpts sqfree_scan;
  static uint64_t sqfree_max_p = 96, sqfree_q_bound = 100'000;
  sqfree_cmd->add_option("--max-p", sqfree_max_p, "probe prime indices up to this bound")
      ->envname("REPUNIT_MAX_P");
  sqfree_cmd->add_option("--q-bound", sqfree_q_bound, "test primes q up to this bound")
      ->envname("REPUNIT_Q_BOUND");
  add_scan_opts(sqfree_cmd, sqfree_scan);
  add_common(sqfree_cmd, sqfree_common);
  sqfree_cmd->callback([&] {
    ScanJob job;
    job.scan_id = "squarefree";
    job.params = json{{"q_bound", sqfree_q_bound}};
    job.range = json{{"max_p", sqfree_max_p}};
    job.keys = primes_between(1, sqfree_max_p);
    const RenderOptions ropt = render_opts(sqfree_common);
    const uint64_t qb = sqfree_q_bound;
    job.eval = [qb, ropt](uint64_t p) {
      return std::vector<ResultRecord>{make_record(probe_squarefree(p, qb), ropt)};
    };
    exit_code = drive_scan(job, sqfree_scan, sqfree_common);
  });

  auto* div_cmd = scan_cmd->add_subcommand("divisors", "structured divisors 1+2px of R_p");
  static CommonOpts div_common;
  static ScanOpts div_scan;
  static std::optional<uint64_t> div_p;
  static uint64_t div_max_p = 100, div_x_bound = 10'000;
  div_cmd->add_option("--p", div_p, "single prime index");
  div_cmd->add_option("--max-p", div_max_p, "sweep prime indices 5..max")
      ->envname("REPUNIT_MAX_P");
  div_cmd->add_option("--x-bound", div_x_bound, "candidate depth x = 1..bound")
      ->envname("REPUNIT_X_BOUND");
  add_scan_opts(div_cmd, div_scan);
  add_common(div_cmd, div_common);
  div_cmd->callback([&] {
    ScanJob job;
    job.scan_id = "divisors";
    job.params = json{{"x_bound", div_x_bound},
                      {"digit_threshold", div_common.full ? json("full") : json(div_common.threshold)}};
    if (div_p) {
      job.range = json{{"p", *div_p}};
      job.keys = {*div_p};
    } else {
      job.range = json{{"max_p", div_max_p}};
      job.keys = primes_between(4, div_max_p);
    }
    const RenderOptions ropt = render_opts(div_common);
    const uint64_t xb = div_x_bound;
    job.eval = [xb, ropt](uint64_t p) {
      std::vector<ResultRecord> out;
      for (const auto& w : sieve_divisors(p, xb)) out.push_back(make_record(w, ropt));
      return out;
    };
    exit_code = drive_scan(job, div_scan, div_common);
  });

  auto* epp_cmd = scan_cmd->add_subcommand("epp", "compositeness of E(p-1, p-1) = R_{p^2}/R_p");
  static CommonOpts epp_common;
  static ScanOpts epp_scan;
  static std::optional<uint64_t> epp_p;
  static uint64_t epp_max_p = 61;
  static std::string epp_effort = "standard";
  epp_cmd->add_option("--p", epp_p, "single prime");
  epp_cmd->add_option("--max-p", epp_max_p, "sweep primes up to this bound")
      ->envname("REPUNIT_MAX_P");
  epp_cmd->add_option("--effort", epp_effort, "light | standard | high")
      ->envname("REPUNIT_EFFORT");
  add_scan_opts(epp_cmd, epp_scan);
  add_common(epp_cmd, epp_common);
  epp_cmd->callback([&] {
    const Effort effort = parse_effort(epp_effort);
    ScanJob job;
    job.scan_id = "epp";
    job.params = json{{"effort", effort_name(effort)},
                      {"digit_threshold", epp_common.full ? json("full") : json(epp_common.threshold)}};
    if (epp_p) {
      job.range = json{{"p", *epp_p}};
      job.keys = {*epp_p};
    } else {
      job.range = json{{"max_p", epp_max_p}};
      job.keys = primes_between(1, epp_max_p);
    }
    const RenderOptions ropt = render_opts(epp_common);
    job.eval = [effort, ropt](uint64_t p) {
      return std::vector<ResultRecord>{make_record(probe_epp(p, effort), ropt)};
    };
    exit_code = drive_scan(job, epp_scan, epp_common);
  });

  auto* fermat_cmd = scan_cmd->add_subcommand("fermat", "generalized Fermat numbers base^(2^n)+1");
  static CommonOpts fermat_common;
  static ScanOpts fermat_scan;
  static uint64_t fermat_base = 10, fermat_max_n = 10;
  static unsigned fermat_rounds = kDefaultSprpRounds;
  fermat_cmd->add_option("--base", fermat_base, "even base > 2")->envname("REPUNIT_FERMAT_BASE");
  fermat_cmd->add_option("--max-n", fermat_max_n, "test n = 0..max")->envname("REPUNIT_MAX_N");
  fermat_cmd->add_option("--rounds", fermat_rounds, "strong-pseudoprime rounds")
      ->envname("REPUNIT_ROUNDS");
  add_scan_opts(fermat_cmd, fermat_scan);
  add_common(fermat_cmd, fermat_common);
  fermat_cmd->callback([&] {
    validate_fermat_request(fermat_base, fermat_max_n);
    ScanJob job;
    job.scan_id = "fermat";
    job.params = json{{"base", fermat_base},
                      {"rounds", fermat_rounds},
                      {"digit_threshold", fermat_common.full ? json("full") : json(fermat_common.threshold)}};
    job.range = json{{"max_n", fermat_max_n}};
    for (uint64_t n = 0; n <= fermat_max_n; ++n) job.keys.push_back(n);
    const RenderOptions ropt = render_opts(fermat_common);
    const uint64_t base = fermat_base;
    const unsigned rounds = fermat_rounds;
    job.eval = [base, rounds, ropt](uint64_t n) {
      return std::vector<ResultRecord>{make_record(fermat_number_verdict(base, n, rounds), ropt)};
    };
    exit_code = drive_scan(job, fermat_scan, fermat_common);
  });

  auto* sophie_cmd = scan_cmd->add_subcommand(
      "sophie", "which of R_p, (10^p+1)/11 the safe prime 2p+1 divides");
  static CommonOpts sophie_common;
  static ScanOpts sophie_scan;
  static uint64_t sophie_max_p = 1000;
  sophie_cmd->add_option("--max-p", sophie_max_p, "sweep primes 7..max")
      ->envname("REPUNIT_MAX_P");
  add_scan_opts(sophie_cmd, sophie_scan);
  add_common(sophie_cmd, sophie_common);
  sophie_cmd->callback([&] {
    ScanJob job;
    job.scan_id = "sophie";
    job.params = json::object();
    job.range = json{{"max_p", sophie_max_p}};
    job.keys = primes_between(5, sophie_max_p);
    const RenderOptions ropt = render_opts(sophie_common);
    job.eval = [ropt](uint64_t p) {
      return std::vector<ResultRecord>{make_record(sophie_germain_check(p), ropt)};
    };
    exit_code = drive_scan(job, sophie_scan, sophie_common);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const InternalCheck& e) {
    std::cerr << "internal check failed: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 3;
  }
  return exit_code;
}
