#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "repunit/common.hpp"
#include "repunit/repunit.hpp"
#include "repunit/screening.hpp"
#include "repunit/structure.hpp"
#include "repunit/valuation.hpp"

namespace repunit {

using json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

// One output line: a kind tag, the schema version, and a flat payload of
// scalars. Big values are pre-rendered through truncated_decimal, so records
// serialize identically regardless of shard count or platform.
struct ResultRecord {
  std::string kind;
  int schema = kSchemaVersion;
  json payload = json::object();

  bool operator==(const ResultRecord& other) const = default;
};

inline json to_json(const ResultRecord& rec) {
  return json{{"kind", rec.kind}, {"schema", rec.schema}, {"payload", rec.payload}};
}

inline ResultRecord record_from_json(const json& j) {
  ResultRecord rec;
  rec.kind = j.at("kind").get<std::string>();
  rec.schema = j.at("schema").get<int>();
  rec.payload = j.at("payload");
  return rec;
}

inline std::string to_json_line(const ResultRecord& rec) { return to_json(rec).dump(); }

// A record counts as a counterexample when a checked mathematical claim
// failed its verification; these drive the exit-status contract.
inline bool flags_counterexample(const ResultRecord& rec) {
  const auto& p = rec.payload;
  if (p.contains("verdict") && p["verdict"].is_string() &&
      p["verdict"].get<std::string>() == "counterexample")
    return true;
  if (p.contains("agreement") && p["agreement"].is_boolean() && !p["agreement"].get<bool>())
    return true;
  if (p.contains("pass") && p["pass"].is_boolean() && !p["pass"].get<bool>()) return true;
  if (p.contains("bounds_hold") && p["bounds_hold"].is_boolean() && !p["bounds_hold"].get<bool>())
    return true;
  return false;
}

struct RenderOptions {
  uint64_t digit_threshold = kRenderDigitThreshold;
};

inline std::string render_value(const Natural& v, const RenderOptions& opt) {
  return truncated_decimal(v, opt.digit_threshold);
}

inline ResultRecord make_record(const GcdReport& rep, const RenderOptions& opt = {}) {
  ResultRecord rec;
  rec.kind = "gcd-report";
  rec.payload["a"] = rep.a;
  rec.payload["b"] = rep.b;
  rec.payload["fast"] = render_value(rep.fast_result, opt);
  if (rep.oracle_result) rec.payload["oracle"] = render_value(*rep.oracle_result, opt);
  if (rep.agreement) rec.payload["agreement"] = *rep.agreement;
  if (!rep.note.empty()) rec.payload["note"] = rep.note;
  return rec;
}

inline ResultRecord make_record(const ValuationReport& rep, const RenderOptions& = {}) {
  ResultRecord rec;
  rec.kind = "valuation";
  rec.payload["check"] = "repunit-valuation";
  rec.payload["index"] = rep.index;
  rec.payload["base"] = rep.base_prime.get_str();
  if (rep.predicted) rec.payload["predicted"] = *rep.predicted;
  rec.payload["oracle"] = rep.oracle;
  rec.payload["rule"] = valuation_rule_name(rep.rule);
  rec.payload["agreement"] = rep.agreement();
  return rec;
}

inline ResultRecord make_record(const TowerCheck& t, const RenderOptions& opt = {}) {
  ResultRecord rec;
  rec.kind = "valuation";
  rec.payload["check"] = "eleven-tower";
  rec.payload["n"] = t.n;
  rec.payload["valuation"] = t.valuation;
  rec.payload["pass"] = t.pass;
  if (t.value) rec.payload["value"] = render_value(*t.value, opt);
  return rec;
}

inline ResultRecord make_record(const ClaimVerdict& v, const RenderOptions& = {}) {
  ResultRecord rec;
  rec.kind = "valuation";
  rec.payload["check"] = v.claim;
  rec.payload["index"] = v.index;
  rec.payload["pass"] = v.pass;
  return rec;
}

inline ResultRecord make_record(const ConjectureRecord& c, const RenderOptions& opt = {}) {
  ResultRecord rec;
  rec.kind = "conjecture-record";
  rec.payload["a"] = c.a;
  rec.payload["b"] = c.b;
  rec.payload["d"] = c.d;
  rec.payload["three_exp"] = c.three_exp;
  rec.payload["eleven_exp"] = c.eleven_exp;
  rec.payload["c"] = c.cofactor_c;
  rec.payload["predicted"] = render_value(c.predicted, opt);
  rec.payload["actual"] = render_value(c.actual, opt);
  rec.payload["verdict"] = c.match ? "match" : "counterexample";
  return rec;
}

inline ResultRecord make_record(const ScreenVerdict& v, const RenderOptions& opt = {}) {
  ResultRecord rec;
  rec.kind = "screen-verdict";
  rec.payload["subject"] = v.subject.label();
  rec.payload["outcome"] = screen_outcome_name(v.outcome);
  if (v.rule) rec.payload["rule"] = v.rule;
  if (v.factor) rec.payload["factor"] = render_value(*v.factor, opt);
  if (v.witness_base) rec.payload["witness_base"] = render_value(*v.witness_base, opt);
  if (!v.evidence.empty()) rec.payload["evidence"] = v.evidence;
  return rec;
}

inline ResultRecord make_record(const DivisorWitness& w, const RenderOptions& opt = {}) {
  ResultRecord rec;
  rec.kind = "divisor-witness";
  rec.payload["subject"] = w.subject.label();
  rec.payload["divisor"] = render_value(w.divisor, opt);
  rec.payload["quotient"] = render_value(w.quotient, opt);
  return rec;
}

inline ResultRecord make_record(const PrimeRepunitResult& r, const RenderOptions& opt = {}) {
  ResultRecord rec;
  rec.kind = "scan-hit";
  rec.payload["scan"] = "primes";
  rec.payload["index"] = r.index;
  rec.payload["digits"] = r.index;  // R_p has exactly p digits
  rec.payload["verdict"] = primality_name(r.verdict.verdict);
  if (r.verdict.witness) rec.payload["witness"] = render_value(*r.verdict.witness, opt);
  if (r.sieve_x) rec.payload["sieve_x"] = *r.sieve_x;
  if (!r.evidence.empty()) rec.payload["evidence"] = r.evidence;
  return rec;
}

inline ResultRecord make_record(const FermatResult& r, const RenderOptions& opt = {}) {
  ResultRecord rec;
  rec.kind = "scan-hit";
  rec.payload["scan"] = "fermat";
  rec.payload["n"] = r.n;
  rec.payload["base"] = r.base;
  rec.payload["value"] = render_value(r.verdict.value, opt);
  rec.payload["verdict"] = primality_name(r.verdict.verdict);
  if (r.verdict.witness) rec.payload["witness"] = render_value(*r.verdict.witness, opt);
  return rec;
}

inline ResultRecord make_record(const SquarefreeResult& r, const RenderOptions& = {}) {
  ResultRecord rec;
  rec.kind = "scan-hit";
  rec.payload["scan"] = "squarefree";
  rec.payload["p"] = r.p;
  rec.payload["q_bound"] = r.q_bound;
  std::string hits;
  for (const uint64_t q : r.square_divisors) {
    if (!hits.empty()) hits += ",";
    hits += std::to_string(q);
  }
  rec.payload["square_divisors"] = hits;
  rec.payload["verdict"] = r.square_divisors.empty() ? "squarefree-up-to-bound" : "counterexample";
  return rec;
}

inline ResultRecord make_record(const SophieGermainVerdict& v, const RenderOptions& = {}) {
  ResultRecord rec;
  rec.kind = "scan-hit";
  rec.payload["scan"] = "sophie";
  rec.payload["p"] = v.p;
  rec.payload["safe_prime"] = v.safe_prime;
  rec.payload["applicable"] = v.applicable;
  if (v.applicable) {
    rec.payload["divides_repunit"] = v.divides_repunit;
    rec.payload["divides_repunit_plus"] = v.divides_repunit_plus;
  }
  return rec;
}

inline ResultRecord make_record(const ProductSplit& s, const RenderOptions& opt = {}) {
  if (s.coprime) {
    ResultRecord rec = make_record(*s.witness, opt);
    rec.payload["a"] = s.a;
    rec.payload["b"] = s.b;
    rec.payload["coprime"] = true;
    return rec;
  }
  ResultRecord rec;
  rec.kind = "gcd-report";
  rec.payload["note"] = "product-split";
  rec.payload["a"] = s.a;
  rec.payload["b"] = s.b;
  rec.payload["coprime"] = false;
  rec.payload["gcd"] = render_value(s.refusal->gcd_value, opt);
  rec.payload["lower_bound"] = render_value(s.refusal->lower_bound, opt);
  rec.payload["upper_bound"] = render_value(s.refusal->upper_bound, opt);
  rec.payload["bounds_hold"] = s.refusal->bounds_hold;
  rec.payload["conjectured"] = render_value(s.refusal->conjectured, opt);
  rec.payload["conjecture_matches"] = s.refusal->conjecture_matches;
  return rec;
}

// Full JSON-lines stream: one header line carrying the semantic config, then
// one line per record. Runtime knobs (shard count, paths) stay out of the
// header so reruns with different parallelism produce identical bytes.
inline std::string render_jsonl(const json& config, const std::vector<ResultRecord>& records) {
  std::string out;
  json header{{"kind", "header"}, {"schema", kSchemaVersion}, {"config", config}};
  out += header.dump();
  out += '\n';
  for (const auto& rec : records) {
    out += to_json_line(rec);
    out += '\n';
  }
  return out;
}

struct ParsedRun {
  json config;
  std::vector<ResultRecord> records;
};

inline ParsedRun parse_jsonl(const std::string& text) {
  ParsedRun run;
  std::istringstream in(text);
  std::string line;
  bool saw_header = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    if (!saw_header) {
      if (j.value("kind", "") != "header") throw Error("jsonl stream must start with a header line");
      run.config = j.at("config");
      saw_header = true;
      continue;
    }
    run.records.push_back(record_from_json(j));
  }
  if (!saw_header) throw Error("jsonl stream has no header line");
  return run;
}

namespace detail {

inline std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (const char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline std::string csv_scalar(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

}  // namespace detail

// CSV view of the same records: one column per payload key (sorted union),
// field-for-field equal to the JSON-lines payloads.
inline std::string to_csv(const std::vector<ResultRecord>& records) {
  std::vector<std::string> keys;
  for (const auto& rec : records)
    for (const auto& [k, v] : rec.payload.items()) {
      (void)v;
      if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);
    }
  std::sort(keys.begin(), keys.end());

  std::string out = "kind,schema";
  for (const auto& k : keys) out += "," + detail::csv_escape(k);
  out += '\n';
  for (const auto& rec : records) {
    out += detail::csv_escape(rec.kind) + "," + std::to_string(rec.schema);
    for (const auto& k : keys) {
      out += ",";
      if (rec.payload.contains(k)) out += detail::csv_escape(detail::csv_scalar(rec.payload[k]));
    }
    out += '\n';
  }
  return out;
}

// Resumable scan state. Hits are complete ResultRecords, so resuming and
// rerunning produce byte-identical output streams.
struct Checkpoint {
  std::string scan_id;
  json params = json::object();
  uint64_t last_index = 0;
  double wall_seconds = 0.0;
  std::vector<ResultRecord> hits;
};

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out << text;
  out.close();
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Atomic replace: write a sibling temp file, then rename over the target.
inline void write_checkpoint(const Checkpoint& cp, const std::filesystem::path& path) {
  json j{{"kind", "checkpoint"},
         {"schema", kSchemaVersion},
         {"scan_id", cp.scan_id},
         {"params", cp.params},
         {"last_index", cp.last_index},
         {"wall_seconds", cp.wall_seconds}};
  json hits = json::array();
  for (const auto& rec : cp.hits) hits.push_back(to_json(rec));
  j["hits"] = std::move(hits);

  const std::filesystem::path tmp = path.string() + ".tmp";
  write_text_file(tmp, j.dump() + "\n");
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec)
    throw Error("cannot move checkpoint into place at '" + path.string() + "': " + ec.message());
}

inline Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const Error& e) {
    throw CheckpointError("checkpoint unreadable: " + std::string(e.what()));
  }
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw CheckpointError("checkpoint unreadable: '" + path.string() + "' is not valid JSON: " +
                          e.what());
  }
  try {
    if (j.value("kind", "") != "checkpoint" || j.value("schema", 0) != kSchemaVersion)
      throw CheckpointError("checkpoint unreadable: '" + path.string() +
                            "' has the wrong kind or schema version");
    Checkpoint cp;
    cp.scan_id = j.at("scan_id").get<std::string>();
    cp.params = j.at("params");
    cp.last_index = j.at("last_index").get<uint64_t>();
    cp.wall_seconds = j.at("wall_seconds").get<double>();
    for (const auto& h : j.at("hits")) cp.hits.push_back(record_from_json(h));
    return cp;
  } catch (const json::exception& e) {
    throw CheckpointError("checkpoint unreadable: '" + path.string() +
                          "' is missing required fields: " + e.what());
  }
}

}  // namespace repunit
