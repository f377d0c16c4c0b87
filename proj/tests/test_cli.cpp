#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>

#include "repunit/report.hpp"

using namespace repunit;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;  // stdout + stderr
};

std::string tool_path() {
  const char* p = std::getenv("REPUNIT_TOOL_BIN");
  REQUIRE(p != nullptr);
  return p;
}

RunResult run_tool(const std::string& args) {
  const std::string cmd = tool_path() + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult res;
  char buf[4096];
  while (size_t n = fread(buf, 1, sizeof(buf), pipe)) res.output.append(buf, n);
  const int status = pclose(pipe);
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return res;
}

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("repunit-cli-" + std::to_string(std::rand()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("eval prints the materialized value") {
  const RunResult r = run_tool("eval R 2");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("value=11") != std::string::npos);

  CHECK(run_tool("eval E 3 1").output.find("value=1010101") != std::string::npos);
  CHECK(run_tool("eval Rplus 5").output.find("value=9091") != std::string::npos);
  CHECK(run_tool("eval F 1").output.find("value=101") != std::string::npos);
}

TEST_CASE("usage errors exit with status 2 and name the problem") {
  CHECK(run_tool("no-such-command").exit_code == 2);
  const RunResult r = run_tool("eval R 0");
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("index must be >= 1") != std::string::npos);
  const RunResult bound = run_tool("gcd-check --a 300000 --b 2");
  CHECK(bound.exit_code == 2);
  CHECK(bound.output.find("digit bound") != std::string::npos);
  CHECK(run_tool("--help").exit_code == 0);
}

TEST_CASE("gcd-check sweep writes one record per ordered pair") {
  TempDir dir;
  const std::string out = dir.file("gcd.jsonl");
  const RunResult r = run_tool("gcd-check --max 20 --output " + out);
  REQUIRE(r.exit_code == 0);
  const ParsedRun run = parse_jsonl(read_text_file(out));
  CHECK(run.config["command"] == "gcd-check");
  REQUIRE(run.records.size() == 400);
  for (const auto& rec : run.records) {
    REQUIRE(rec.kind == "gcd-report");
    REQUIRE(rec.payload["agreement"].get<bool>());
  }
}

TEST_CASE("primes scan reproduces the known prime indices up to 30") {
  TempDir dir;
  const std::string out = dir.file("primes.jsonl");
  const RunResult r = run_tool("scan primes --max-index 30 --output " + out);
  REQUIRE(r.exit_code == 0);
  const ParsedRun run = parse_jsonl(read_text_file(out));
  std::vector<uint64_t> prime_like;
  for (const auto& rec : run.records) {
    const std::string verdict = rec.payload["verdict"].get<std::string>();
    if (verdict == "probable-prime" || verdict == "proven-prime-below-sieve-bound")
      prime_like.push_back(rec.payload["index"].get<uint64_t>());
  }
  CHECK(prime_like == std::vector<uint64_t>{2, 19, 23});
}

TEST_CASE("interrupted scans resume to byte-identical output") {
  TempDir dir;
  const std::string cp = dir.file("cp.json");
  const std::string resumed = dir.file("resumed.jsonl");
  const std::string fresh = dir.file("fresh.jsonl");

  REQUIRE(run_tool("scan primes --max-index 50 --checkpoint " + cp +
                   " --checkpoint-every 3 --output " + dir.file("first.jsonl"))
              .exit_code == 0);
  REQUIRE(run_tool("scan primes --max-index 110 --checkpoint " + cp +
                   " --resume --checkpoint-every 3 --output " + resumed)
              .exit_code == 0);
  REQUIRE(run_tool("scan primes --max-index 110 --output " + fresh).exit_code == 0);
  CHECK(read_text_file(resumed) == read_text_file(fresh));
}

TEST_CASE("shard count never changes the output bytes") {
  TempDir dir;
  const std::string s1 = dir.file("s1.jsonl");
  const std::string s8 = dir.file("s8.jsonl");
  REQUIRE(run_tool("scan squarefree --max-p 30 --q-bound 2000 --shards 1 --output " + s1)
              .exit_code == 0);
  REQUIRE(run_tool("scan squarefree --max-p 30 --q-bound 2000 --shards 8 --output " + s8)
              .exit_code == 0);
  CHECK(read_text_file(s1) == read_text_file(s8));
}

TEST_CASE("corrupt checkpoints are refused with an explicit cause") {
  TempDir dir;
  const std::string cp = dir.file("bad.json");
  write_text_file(cp, "{ this is not json");
  const RunResult r = run_tool("scan primes --max-index 30 --checkpoint " + cp + " --resume");
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("checkpoint unreadable") != std::string::npos);
}

TEST_CASE("checkpoint parameter drift is refused") {
  TempDir dir;
  const std::string cp = dir.file("cp.json");
  REQUIRE(run_tool("scan primes --max-index 30 --checkpoint " + cp).exit_code == 0);
  const RunResult r =
      run_tool("scan primes --max-index 60 --rounds 3 --checkpoint " + cp + " --resume");
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("parameters differ") != std::string::npos);
}

TEST_CASE("a counterexample record in the stream forces exit status 1") {
  TempDir dir;
  const std::string cp = dir.file("cp.json");
  // Seed a checkpoint whose stored hit is a counterexample record; resuming
  // emits it verbatim and the exit contract must fire.
  Checkpoint seeded;
  seeded.scan_id = "squarefree";
  seeded.params = json{{"q_bound", 100}};
  seeded.last_index = 7;
  ResultRecord hit;
  hit.kind = "scan-hit";
  hit.payload["scan"] = "squarefree";
  hit.payload["p"] = 5;
  hit.payload["q_bound"] = 100;
  hit.payload["square_divisors"] = "41";
  hit.payload["verdict"] = "counterexample";
  seeded.hits.push_back(hit);
  write_checkpoint(seeded, cp);

  const RunResult r =
      run_tool("scan squarefree --max-p 7 --q-bound 100 --checkpoint " + cp + " --resume");
  CHECK(r.exit_code == 1);
  CHECK(r.output.find("counterexample") != std::string::npos);
}

TEST_CASE("flags take precedence over environment variables") {
  TempDir dir;
  const std::string with_env = "REPUNIT_MAX=5 " + tool_path();
  const auto run_raw = [&](const std::string& args) {
    const std::string cmd = with_env + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string output;
    char buf[4096];
    while (size_t n = fread(buf, 1, sizeof(buf), pipe)) output.append(buf, n);
    pclose(pipe);
    return output;
  };
  // env only: 5*5 = 25 records
  CHECK(run_raw("gcd-check").find("25 record(s)") != std::string::npos);
  // flag wins: 3*3 = 9 records
  CHECK(run_raw("gcd-check --max 3").find("9 record(s)") != std::string::npos);
}

TEST_CASE("csv export carries the same payload fields") {
  TempDir dir;
  const std::string out = dir.file("v.jsonl");
  const std::string csv = dir.file("v.csv");
  REQUIRE(run_tool("valuation --base 3 --max 50 --output " + out + " --csv " + csv).exit_code == 0);
  const ParsedRun run = parse_jsonl(read_text_file(out));
  const std::string csv_text = read_text_file(csv);
  // spot check: one line per record plus the header
  CHECK(static_cast<size_t>(std::count(csv_text.begin(), csv_text.end(), '\n')) ==
        run.records.size() + 1);
  CHECK(csv_text.find("three-adic-of-index") != std::string::npos);
}

TEST_CASE("fermat scan through the cli reproduces the prime exponent set") {
  TempDir dir;
  const std::string out = dir.file("fermat.jsonl");
  REQUIRE(run_tool("scan fermat --base 10 --max-n 6 --output " + out).exit_code == 0);
  const ParsedRun run = parse_jsonl(read_text_file(out));
  std::vector<uint64_t> prime_like;
  for (const auto& rec : run.records) {
    const std::string verdict = rec.payload["verdict"].get<std::string>();
    if (verdict == "probable-prime" || verdict == "proven-prime-below-sieve-bound")
      prime_like.push_back(rec.payload["n"].get<uint64_t>());
  }
  CHECK(prime_like == std::vector<uint64_t>{0, 1});
}

TEST_CASE("single checks run end to end") {
  CHECK(run_tool("valuation --base 11 --index 22").output.find("oracle=2") != std::string::npos);
  CHECK(run_tool("valuation --base 7 --index 6").output.find("rule=oracle-only") !=
        std::string::npos);
  CHECK(run_tool("valuation --base 6 --index 6").exit_code == 2);  // base must be prime
  CHECK(run_tool("lemma-check tower --max-n 3").exit_code == 0);
  CHECK(run_tool("lemma-check barrier --p 7 --q 239 --r-bound 20 --n-bound 3").exit_code == 0);
  CHECK(run_tool("lemma-check lift --p 41 --q 83 --n 2").exit_code == 0);
  CHECK(run_tool("lemma-check lift --p 7 --q 11 --n 1").exit_code == 2);  // hypothesis fails
  const RunResult screen = run_tool("screen --n 3 --k 1");
  CHECK(screen.exit_code == 0);
  CHECK(screen.output.find("rule=1") != std::string::npos);
  CHECK(run_tool("product-div --a 2 --b 3").output.find("quotient=91") != std::string::npos);
  CHECK(run_tool("scan sophie --max-p 60").exit_code == 0);
  CHECK(run_tool("scan divisors --p 13 --x-bound 2").output.find("divisor=53") != std::string::npos);
  CHECK(run_tool("scan epp --p 5").output.find("21401") != std::string::npos);
  CHECK(run_tool("scan fermat --max-n 2").exit_code == 0);
}
