// End-to-end checks of the polrhet binary: exit codes, stdout JSON summaries,
// the stderr error envelope, file provenance, and agreement between CLI
// output and direct library calls on the same inputs.
#include <sys/wait.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "json.hpp"
#include "polrhet/annotation.hpp"
#include "polrhet/dates.hpp"
#include "polrhet/econest.hpp"
#include "polrhet/io.hpp"
#include "polrhet/persuasion.hpp"
#include "polrhet/rng.hpp"
#include "polrhet/table.hpp"

namespace {

using namespace polrhet;
using nlohmann::json;

struct CliResult {
  int code = -1;
  std::string out, err;
};

CliResult run_cli(const std::string& args, const TempDir& dir) {
  static std::atomic<int> calls{0};
  std::string id = std::to_string(calls.fetch_add(1));
  auto outp = dir.file("cli-out-" + id);
  auto errp = dir.file("cli-err-" + id);
  std::string cmd = std::string("\"") + POLRHET_CLI_PATH + "\" " + args + " > \"" +
                    outp.string() + "\" 2> \"" + errp.string() + "\"";
  int status = std::system(cmd.c_str());
  CliResult r;
  r.code = status == -1 ? -1 : (WIFEXITED(status) ? WEXITSTATUS(status) : -2);
  r.out = slurp(outp);
  r.err = slurp(errp);
  return r;
}

std::string trimmed(std::string s) {
  while (!s.empty() && (s.back() == '\n' || s.back() == '\r' || s.back() == ' ')) s.pop_back();
  return s;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  size_t start = 0;
  while (start < text.size()) {
    size_t nl = text.find('\n', start);
    if (nl == std::string::npos) nl = text.size();
    lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

bool hex16(const std::string& s) {
  return s.size() == 16 && std::all_of(s.begin(), s.end(), [](char c) {
           return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
         });
}

// The stderr error envelope: one line of JSON {"error":{"type":...,"message":...}}.
json error_of(const CliResult& r) {
  REQUIRE(r.code == 1);
  json j = json::parse(r.err);
  REQUIRE(j.contains("error"));
  REQUIRE(j["error"].contains("type"));
  REQUIRE(j["error"].contains("message"));
  return j["error"];
}

std::string q(const std::filesystem::path& p) { return "\"" + p.string() + "\""; }

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("version flag, usage errors, and the error envelope") {
  TempDir tmp;

  auto version = run_cli("--version", tmp);
  CHECK(version.code == 0);
  CHECK(trimmed(version.out) == std::string("polrhet 0.1.0"));

  CHECK(run_cli("", tmp).code != 0);              // a subcommand is required
  CHECK(run_cli("frobnicate", tmp).code != 0);    // unknown subcommand
  CHECK(run_cli("persuasion --beta-bar 0.02 --yc 0.1 --et 0.3 --bogus 1", tmp).code != 0);

  // Runtime failures report a typed one-line JSON object on stderr.
  auto domain = run_cli("persuasion --beta-bar 0.022 --yc 1.5 --et 0.32", tmp);
  CHECK(domain.out.empty());
  auto derr = error_of(domain);
  CHECK(derr["type"].get<std::string>() == "domain");
  CHECK(!derr["message"].get<std::string>().empty());

  auto gain = run_cli("persuasion --beta-bar 0.022 --yc 0.16 --et 0.2 --ec 0.2", tmp);
  auto gerr = error_of(gain);
  CHECK(gerr["type"].get<std::string>() == "domain");
  CHECK(gerr["message"].get<std::string>().find("exposure") != std::string::npos);

  auto missing = run_cli("estimate --data " + q(tmp.file("absent.tsv")) + " --spec " +
                             q(tmp.file("absent.json")) + " --output " + q(tmp.file("o.tsv")),
                         tmp);
  auto merr = error_of(missing);
  CHECK(merr["type"].get<std::string>() == "schema");
  CHECK(merr["message"].get<std::string>().find("cannot open") != std::string::npos);

  // classify demands exactly one probability source.
  auto neither = run_cli("classify --tweets " + q(tmp.file("t.tsv")) + " --output " +
                             q(tmp.file("p.tsv")),
                         tmp);
  auto nerr = error_of(neither);
  CHECK(nerr["type"].get<std::string>() == "config");
  CHECK(nerr["message"].get<std::string>().find("--model or --probabilities") !=
        std::string::npos);
  auto both = run_cli("classify --tweets " + q(tmp.file("t.tsv")) + " --model " +
                          q(tmp.file("m.tsv")) + " --probabilities " + q(tmp.file("q.tsv")) +
                          " --output " + q(tmp.file("p.tsv")),
                      tmp);
  CHECK(both.code != 0);
}

TEST_CASE("persuasion prints rates, sweeps a grid, and stamps provenance") {
  TempDir tmp;

  auto headline = run_cli("persuasion --beta-bar 0.022 --yc 0.16 --et 0.32 --r 1.0", tmp);
  CHECK(headline.code == 0);
  CHECK(trimmed(headline.out) == std::string("0.0131"));

  auto tenth = run_cli("persuasion --beta-bar 0.022 --yc 0.16 --et 0.32 --r 0.1", tmp);
  CHECK(trimmed(tenth.out) == std::string("0.131"));

  persuasion::PersuasionInputs inputs;
  inputs.effect = 0.022;
  inputs.y_control = 0.16;
  inputs.e_treat = 0.32;
  inputs.e_control = 0;
  inputs.receptive = 1.0;
  double f1 = persuasion::persuasion_rate(inputs);

  auto grid_path = tmp.file("grid.tsv");
  auto sweep = run_cli("persuasion --beta-bar 0.022 --yc 0.16 --et 0.32"
                       " --r-grid 1,0.5,0.25,0.1 --output " + q(grid_path), tmp);
  REQUIRE(sweep.code == 0);
  auto rows = lines_of(sweep.out);
  REQUIRE(rows.size() == 5);
  CHECK(rows[0] == std::string("r\tf"));
  std::vector<double> rs, fs;
  for (size_t i = 1; i < rows.size(); ++i) {
    size_t tab = rows[i].find('\t');
    REQUIRE(tab != std::string::npos);
    rs.push_back(std::stod(rows[i].substr(0, tab)));
    fs.push_back(std::stod(rows[i].substr(tab + 1)));
  }
  CHECK(rs == std::vector<double>{1, 0.5, 0.25, 0.1});
  for (size_t i = 0; i < rs.size(); ++i)
    CHECK(near_rel(rs[i] * fs[i], f1, 1e-12));  // with no control exposure r*f is constant
  CHECK(near_rel(fs[1], 2 * fs[0], 1e-12));

  TableFile grid = read_table_file(grid_path);
  REQUIRE(grid.schema.size() == 2);
  CHECK(grid.schema[0].name == "r");
  CHECK(grid.schema[1].name == "f");
  REQUIRE(grid.rows.size() == 4);
  CHECK(parse_real(grid.rows[0][1], "f") == f1);  // full-precision values in the file
  CHECK(grid.provenance.at("tool") == "polrhet 0.1.0");
  CHECK(grid.provenance.at("command") == "persuasion");
  CHECK(hex16(grid.provenance.at("config_hash")));

  // Identical invocations are byte-identical; changing any option changes the hash.
  auto one = tmp.file("point.tsv");
  std::string point_cmd =
      "persuasion --beta-bar 0.022 --yc 0.16 --et 0.32 --r 1.0 --output " + q(one);
  REQUIRE(run_cli(point_cmd, tmp).code == 0);
  std::string first = slurp(one);
  REQUIRE(run_cli(point_cmd, tmp).code == 0);
  CHECK(slurp(one) == first);
  std::string hash_before = read_table_file(one).provenance.at("config_hash");
  REQUIRE(run_cli("persuasion --beta-bar 0.022 --yc 0.16 --et 0.32 --r 0.5 --output " + q(one),
                  tmp).code == 0);
  CHECK(read_table_file(one).provenance.at("config_hash") != hash_before);
}

TEST_CASE("ingest maps raw columns onto the canonical tweet schema") {
  TempDir tmp;

  TableFile raw;
  raw.schema = {{"tid", "string"}, {"who", "string"}, {"ts", "timestamp"},
                {"body", "string"}, {"rt", "bool"}};
  raw.rows = {{"a1", "p1", "2020-05-01 10:00:00", "hello world", "0"},
              {"a2", "p1", "2020-05-02 11:30:00", "they ruined the economy", "0"},
              {"a3", "p2", "2020-06-03 09:15:00", "good jobs report", "1"},
              {"a4", "p2", "2020-06-04 20:45:00", "thanks to the team", "0"}};
  auto raw_path = tmp.file("raw.tsv");
  write_table_file(raw_path, raw);
  auto config_path = tmp.file("mapping.json");
  spit(config_path, R"({"id":"tid","politician":"who","timestamp":"ts","text":"body","is_retweet":"rt"})");

  auto canon_path = tmp.file("canon.tsv");
  auto r = run_cli("ingest --input " + q(raw_path) + " --output " + q(canon_path) +
                       " --config " + q(config_path),
                   tmp);
  REQUIRE(r.code == 0);
  json j = json::parse(r.out);
  CHECK(j["rows_read"].get<size_t>() == 4);
  CHECK(j["kept"].get<size_t>() == 3);
  CHECK(j["retweets_dropped"].get<size_t>() == 1);
  CHECK(j["malformed_dropped"].get<size_t>() == 0);

  TableFile canon = read_table_file(canon_path);
  REQUIRE(canon.rows.size() == 3);
  size_t idc = canon.column("id"), pc = canon.column("politician");
  canon.column("timestamp");
  canon.column("text");
  std::vector<std::string> ids;
  for (const auto& row : canon.rows) ids.push_back(row[idc]);
  CHECK(ids == std::vector<std::string>{"a1", "a2", "a4"});
  CHECK(canon.rows[2][pc] == "p2");
  CHECK(canon.provenance.at("command") == "ingest");
  CHECK(hex16(canon.provenance.at("config_hash")));

  // Without a mapping file only the politician column name is configurable.
  TableFile plain;
  plain.schema = {{"id", "string"}, {"politician_id", "string"},
                  {"timestamp", "timestamp"}, {"text", "string"}};
  plain.rows = {{"b1", "p9", "2021-01-01 08:00:00", "first post"},
                {"b2", "p9", "2021-01-02 09:00:00", "second post"}};
  auto plain_path = tmp.file("plain.tsv");
  write_table_file(plain_path, plain);
  auto out2 = tmp.file("canon2.tsv");
  auto r2 = run_cli("ingest --input " + q(plain_path) + " --output " + q(out2), tmp);
  REQUIRE(r2.code == 0);
  CHECK(json::parse(r2.out)["kept"].get<size_t>() == 2);

  // The canonical file feeds every downstream reader.
  auto feat_path = tmp.file("features.tsv");
  auto rf = run_cli("features --tweets " + q(canon_path) + " --output " + q(feat_path), tmp);
  REQUIRE(rf.code == 0);
  TableFile feats = read_table_file(feat_path);
  CHECK(feats.rows.size() == 3);
  for (const auto& row : feats.rows)
    for (size_t c = 1; c < row.size(); ++c)
      CHECK(std::isfinite(parse_real(row[c], feats.schema[c].name)));
}

TEST_CASE("agreement reports unanimity and writes resolved labels") {
  TempDir tmp;

  std::vector<annotation::AnnotationRecord> records;
  std::vector<std::string> expected_style(12);
  for (int d = 0; d < 12; ++d) {
    char id[8];
    std::snprintf(id, sizeof id, "d%02d", d);
    bool causal = d < 8;
    int tone = d < 4 ? -1 : (d < 8 ? 1 : 0);
    expected_style[d] = d < 4 ? "blame" : (d < 8 ? "merit" : "none");
    for (int c = 0; c < 3; ++c)
      records.push_back({id, "coder" + std::to_string(c), causal, tone});
  }
  auto ann_path = tmp.file("annotations.tsv");
  annotation::write_annotations(ann_path, records);

  auto report_path = tmp.file("agreement.kv");
  auto labels_path = tmp.file("gold.tsv");
  auto r = run_cli("agreement --annotations " + q(ann_path) + " --output " + q(report_path) +
                       " --labels-out " + q(labels_path) + " --seed 7",
                   tmp);
  REQUIRE(r.code == 0);
  json j = json::parse(r.out);
  CHECK(j["kappa"].get<double>() == 1.0);
  CHECK(j["unanimous_rate"].get<double>() == 1.0);
  CHECK(j["kappa_items"].get<size_t>() == 12);
  CHECK(j["kappa_raters"].get<size_t>() == 3);
  CHECK(j["labels"].get<size_t>() == 12);

  auto kv = read_kv_file(report_path);
  CHECK(kv.at("kappa") == "1");
  CHECK(kv.at("unanimous_rate") == "1");
  CHECK(kv.at("provenance.seed") == "7");
  CHECK(kv.at("provenance.command") == "agreement");
  CHECK(hex16(kv.at("provenance.config_hash")));

  TableFile gold = read_table_file(labels_path);
  REQUIRE(gold.rows.size() == 12);
  size_t idc = gold.column("doc_id"), sc = gold.column("style"), tc = gold.column("tie_broken");
  for (const auto& row : gold.rows) {
    int d = std::stoi(row[idc].substr(1));
    CHECK(row[sc] == expected_style[d]);
    CHECK(row[tc] == "0");
  }
}

TEST_CASE("synthetic corpus feeds train, classify, sample, distinct, and panel month") {
  TempDir tmp;
  auto corpus_dir = tmp.file("corpus");
  std::string gen_cmd = "synth corpus --out " + q(corpus_dir) +
                        " --seed 5 --n-docs 600 --n-politicians 12";

  auto gen = run_cli(gen_cmd, tmp);
  REQUIRE(gen.code == 0);
  json gj = json::parse(gen.out);
  CHECK(gj["tweets"].get<size_t>() == 600);
  CHECK(gj["politicians"].get<size_t>() == 12);
  auto tweets_path = corpus_dir / "tweets.tsv";
  auto labels_path = corpus_dir / "labels.tsv";
  auto roster_path = corpus_dir / "roster.tsv";
  std::string tweets_bytes = slurp(tweets_path);
  std::string labels_bytes = slurp(labels_path);
  std::string roster_bytes = slurp(roster_path);
  CHECK(!tweets_bytes.empty());

  // Reruns of the same invocation are byte-identical; a new seed is not.
  REQUIRE(run_cli(gen_cmd, tmp).code == 0);
  CHECK(slurp(tweets_path) == tweets_bytes);
  CHECK(slurp(labels_path) == labels_bytes);
  CHECK(slurp(roster_path) == roster_bytes);
  auto other_dir = tmp.file("corpus-b");
  REQUIRE(run_cli("synth corpus --out " + q(other_dir) +
                      " --seed 6 --n-docs 600 --n-politicians 12",
                  tmp).code == 0);
  CHECK(slurp(other_dir / "tweets.tsv") != tweets_bytes);

  auto model_path = tmp.file("model.tsv");
  auto tr = run_cli("train --tweets " + q(tweets_path) + " --labels " + q(labels_path) +
                        " --model-out " + q(model_path),
                    tmp);
  REQUIRE(tr.code == 0);
  json tj = json::parse(tr.out);
  CHECK(tj["docs"].get<size_t>() == 600);
  CHECK(tj["train_accuracy"].get<double>() >= 0.9);
  CHECK(tj["train_macro_f1"].get<double>() >= 0.9);

  auto pred_path = tmp.file("predicted.tsv");
  auto cl = run_cli("classify --tweets " + q(tweets_path) + " --model " + q(model_path) +
                        " --output " + q(pred_path),
                    tmp);
  REQUIRE(cl.code == 0);
  CHECK(json::parse(cl.out)["classified"].get<size_t>() == 600);

  TableFile gold = read_table_file(labels_path);
  TableFile pred = read_table_file(pred_path);
  REQUIRE(pred.rows.size() == 600);
  std::unordered_map<std::string, std::string> gold_style;
  size_t gid = gold.column("doc_id"), gsc = gold.column("style");
  for (const auto& row : gold.rows) gold_style[row[gid]] = row[gsc];
  size_t pid = pred.column("doc_id"), psc = pred.column("style");
  size_t agree = 0;
  for (const auto& row : pred.rows) agree += gold_style.at(row[pid]) == row[psc];
  CHECK(agree >= 540);  // marker-driven corpus is nearly separable
  for (const auto& row : pred.rows) {
    double total = parse_real(row[pred.column("p_blame")], "p_blame") +
                   parse_real(row[pred.column("p_merit")], "p_merit") +
                   parse_real(row[pred.column("p_none")], "p_none");
    CHECK(near(total, 1.0, 1e-9));
  }

  TableFile bench;
  bench.schema = {{"text", "string"}, {"party", "string"}, {"style", "string"}};
  bench.rows = {{"they ruined the economy and jobs", "D", "blame"},
                {"thanks for the jobs boost", "R", "merit"}};
  auto bench_path = tmp.file("benchmarks.tsv");
  write_table_file(bench_path, bench);
  auto sample_path = tmp.file("batch.tsv");
  auto sa = run_cli("sample --tweets " + q(tweets_path) + " --benchmarks " + q(bench_path) +
                        " --output " + q(sample_path) + " --n 20 --seed 3",
                    tmp);
  REQUIRE(sa.code == 0);
  CHECK(json::parse(sa.out)["selected"].get<size_t>() == 20);
  TableFile batch = read_table_file(sample_path);
  REQUIRE(batch.rows.size() == 20);
  std::set<std::string> picked;
  for (const auto& row : batch.rows) picked.insert(row[0]);
  CHECK(picked.size() == 20);
  for (const auto& id : picked) CHECK(gold_style.count(id) == 1);

  auto distinct_path = tmp.file("bigrams.tsv");
  auto di = run_cli("distinct --tweets " + q(tweets_path) + " --labels " + q(labels_path) +
                        " --target blame --top 8 --output " + q(distinct_path),
                    tmp);
  REQUIRE(di.code == 0);
  TableFile bigrams = read_table_file(distinct_path);
  REQUIRE(!bigrams.rows.empty());
  CHECK(bigrams.rows.size() <= 8);
  double prev = std::numeric_limits<double>::infinity();
  for (const auto& row : bigrams.rows) {
    double score = parse_real(row[bigrams.column("score")], "score");
    CHECK(std::isfinite(score));
    CHECK(score <= prev);
    prev = score;
    CHECK(row[bigrams.column("bigram")].find(' ') != std::string::npos);
  }

  auto panel_path = tmp.file("panel.tsv");
  auto pm = run_cli("panel month --tweets " + q(tweets_path) + " --labels " + q(labels_path) +
                        " --output " + q(panel_path),
                    tmp);
  REQUIRE(pm.code == 0);
  TableFile panel = read_table_file(panel_path);
  CHECK(json::parse(pm.out)["cells"].get<size_t>() == panel.rows.size());
  size_t polc = panel.column("politician"), mc = panel.column("month"), nc = panel.column("n");
  size_t bc = panel.column("blame_share"), mec = panel.column("merit_share"),
         cc = panel.column("causal_share");
  size_t total_n = 0;
  std::pair<std::string, std::string> prev_key;
  for (size_t i = 0; i < panel.rows.size(); ++i) {
    const auto& row = panel.rows[i];
    total_n += size_t(parse_int(row[nc], "n"));
    double blame = parse_real(row[bc], "blame_share");
    double merit = parse_real(row[mec], "merit_share");
    double causal = parse_real(row[cc], "causal_share");
    CHECK(near(causal, blame + merit, 1e-12));
    std::pair<std::string, std::string> key{row[polc], row[mc]};
    if (i > 0) CHECK(prev_key < key);  // sorted by politician then month
    prev_key = key;
  }
  CHECK(total_n == 600);
}

TEST_CASE("panel donations aggregates gifts with caps and unknowns reported") {
  TempDir tmp;

  TableFile rec;
  rec.schema = {{"donor_id", "string"}, {"politician_id", "string"}, {"fips", "string"},
                {"date", "date"}, {"amount", "real"}};
  rec.rows = {{"d1", "p1", "06037", "2020-01-10", "50"},
              {"d2", "p1", "06037", "2020-01-15", "100"},
              {"d1", "p1", "06037", "2020-01-20", "30"},
              {"d3", "p2", "17031", "2020-02-05", "999"},
              {"d4", "p2", "17031", "2020-02-05", "1000"},
              {"d5", "p9", "06037", "2020-01-01", "10"},
              {"d6", "p1", "99999", "2020-01-01", "10"},
              {"d7", "p1", "06037", "2019-12-31", "10"}};
  auto rec_path = tmp.file("records.tsv");
  write_table_file(rec_path, rec);

  TableFile pols;
  pols.schema = {{"id", "string"}};
  pols.rows = {{"p1"}, {"p2"}};
  auto pols_path = tmp.file("politicians.tsv");
  write_table_file(pols_path, pols);
  TableFile counties;
  counties.schema = {{"fips", "string"}};
  counties.rows = {{"06037"}, {"17031"}};
  auto counties_path = tmp.file("counties.tsv");
  write_table_file(counties_path, counties);

  auto out_path = tmp.file("donations.tsv");
  auto r = run_cli("panel donations --records " + q(rec_path) + " --politicians " +
                       q(pols_path) + " --counties " + q(counties_path) +
                       " --from 2020-01 --to 2020-02 --cap 1000 --output " + q(out_path),
                   tmp);
  REQUIRE(r.code == 0);
  json j = json::parse(r.out);
  CHECK(j["cells"].get<size_t>() == 8);
  CHECK(j["nonzero"].get<size_t>() == 2);
  CHECK(j["records_read"].get<size_t>() == 8);
  CHECK(j["excluded_at_or_above_cap"].get<size_t>() == 1);
  CHECK(j["unknown_politician"].get<size_t>() == 1);
  CHECK(j["unknown_county"].get<size_t>() == 1);
  CHECK(j["out_of_month_range"].get<size_t>() == 1);

  TableFile out = read_table_file(out_path);
  REQUIRE(out.rows.size() == 8);
  size_t revc = out.column("log_revenue"), donc = out.column("log_donors");
  double dollars = 0;
  for (const auto& row : out.rows) dollars += std::expm1(parse_real(row[revc], "log_revenue"));
  CHECK(near(dollars, 180.0 + 999.0, 1e-6));  // kept gifts: 50+100+30 and 999
  for (const auto& row : out.rows) {
    double donors = std::expm1(parse_real(row[donc], "log_donors"));
    CHECK(near(donors, std::round(donors), 1e-9));  // donor counts stay integral
  }
}

TEST_CASE("estimate reproduces the library fit on a synthetic panel") {
  TempDir tmp;

  auto data_path = tmp.file("panel.tsv");
  auto gen = run_cli("synth panel --out " + q(data_path) +
                         " --seed 9 --units 15 --groups 12 --periods 10",
                     tmp);
  REQUIRE(gen.code == 0);
  CHECK(json::parse(gen.out)["rows"].get<size_t>() == 1800);

  auto spec_path = tmp.file("spec.json");
  spit(spec_path, R"({
    "outcome": "y",
    "exogenous": ["x1", "x2"],
    "fixed_effects": ["unit x group", "unit x period", "group x period"],
    "cluster": "unit"
  })");

  auto est_path = tmp.file("estimates.tsv");
  std::string est_cmd = "estimate --data " + q(data_path) + " --spec " + q(spec_path) +
                        " --output " + q(est_path);
  auto est = run_cli(est_cmd, tmp);
  REQUIRE(est.code == 0);
  json j = json::parse(est.out);
  CHECK(j["estimator"].get<std::string>() == "ols");
  CHECK(j["n_obs"].get<size_t>() == 1800);
  CHECK(j["n_clusters"].get<size_t>() == 15);
  double cli_x1 = j["coefficients"]["x1"]["estimate"].get<double>();
  double cli_x2 = j["coefficients"]["x2"]["estimate"].get<double>();
  CHECK(near(cli_x1, 0.5, 0.2));
  CHECK(near(cli_x2, -0.2, 0.2));

  // The CLI and a direct library call on the same file agree bit for bit.
  auto table = DataTable::from_file(read_table_file(data_path));
  auto spec = econest::read_spec(spec_path);
  econest::FitOptions opts;
  opts.absorb.threads = 1;
  auto fit = econest::ols(spec, table, opts);
  CHECK(cli_x1 == fit.coef("x1").estimate);
  CHECK(cli_x2 == fit.coef("x2").estimate);
  CHECK(j["coefficients"]["x1"]["std_error"].get<double>() == fit.coef("x1").std_error);
  CHECK(j["r2_within"].get<double>() == fit.r2_within);

  TableFile out = read_table_file(est_path);
  std::map<std::string, std::string> by_term;
  for (const auto& row : out.rows) by_term[row[0]] = row[1];
  CHECK(parse_real(by_term.at("x1"), "estimate") == fit.coef("x1").estimate);
  CHECK(by_term.at("n_obs") == "1800");
  CHECK(by_term.at("n_clusters") == "15");
  CHECK(std::isfinite(parse_real(by_term.at("r2_within"), "r2_within")));
  CHECK(out.provenance.at("command") == "estimate");
  CHECK(hex16(out.provenance.at("config_hash")));

  // Rerun determinism, and thread-count invariance of every reported number.
  std::string bytes = slurp(est_path);
  REQUIRE(run_cli(est_cmd, tmp).code == 0);
  CHECK(slurp(est_path) == bytes);
  auto est3_path = tmp.file("estimates-t3.tsv");
  REQUIRE(run_cli("estimate --data " + q(data_path) + " --spec " + q(spec_path) +
                      " --output " + q(est3_path) + " --threads 3",
                  tmp).code == 0);
  CHECK(read_table_file(est3_path).rows == out.rows);

  auto bad_spec = tmp.file("bad-spec.json");
  spit(bad_spec, R"({"outcome": "y", "exogenous": ["zilch"]})");
  auto bad = run_cli("estimate --data " + q(data_path) + " --spec " + q(bad_spec) +
                         " --output " + q(tmp.file("unused.tsv")),
                     tmp);
  auto berr = error_of(bad);
  CHECK(berr["type"].get<std::string>() == "schema");
  CHECK(berr["message"].get<std::string>().find("zilch") != std::string::npos);
}

TEST_CASE("estimate runs 2SLS and exposes the endogeneity gap") {
  TempDir tmp;

  auto data_path = tmp.file("iv.tsv");
  auto gen = run_cli("synth iv --out " + q(data_path) + " --n 4000 --seed 3", tmp);
  REQUIRE(gen.code == 0);
  CHECK(json::parse(gen.out)["rows"].get<size_t>() == 4000);

  auto iv_spec = tmp.file("iv-spec.json");
  spit(iv_spec, R"({"outcome": "y", "endogenous": ["x"], "instruments": ["z"]})");
  auto iv_out = tmp.file("iv-est.tsv");
  auto iv = run_cli("estimate --data " + q(data_path) + " --spec " + q(iv_spec) +
                        " --output " + q(iv_out),
                    tmp);
  REQUIRE(iv.code == 0);
  json ij = json::parse(iv.out);
  CHECK(ij["estimator"].get<std::string>() == "tsls");
  double tsls_x = ij["coefficients"]["x"]["estimate"].get<double>();
  CHECK(near(tsls_x, 1.0, 0.15));  // true effect is 1

  auto table = DataTable::from_file(read_table_file(data_path));
  auto fit = econest::tsls(econest::read_spec(iv_spec), table, {});
  CHECK(tsls_x == fit.coef("x").estimate);

  TableFile out = read_table_file(iv_out);
  bool saw_partial_f = false;
  for (const auto& row : out.rows) {
    if (row[0] == "partial_f x") {
      saw_partial_f = true;
      CHECK(parse_real(row[1], "partial_f") > 100.0);  // strong first stage by design
    }
  }
  CHECK(saw_partial_f);

  auto ols_spec = tmp.file("naive-spec.json");
  spit(ols_spec, R"({"outcome": "y", "exogenous": ["x"]})");
  auto naive = run_cli("estimate --data " + q(data_path) + " --spec " + q(ols_spec) +
                           " --output " + q(tmp.file("naive-est.tsv")),
                       tmp);
  REQUIRE(naive.code == 0);
  json nj = json::parse(naive.out);
  CHECK(nj["estimator"].get<std::string>() == "ols");
  double naive_x = nj["coefficients"]["x"]["estimate"].get<double>();
  CHECK(near(naive_x, 1.3, 0.1));  // endogeneity inflates the naive slope
  CHECK(naive_x - tsls_x > 0.1);
}

TEST_CASE("eventstudy and rdd commands drive the estimators end to end") {
  TempDir tmp;

  TableFile panel;
  panel.schema = {{"unit", "string"}, {"period", "int"}, {"y", "real"}};
  for (int p = 1; p <= 3; ++p) {
    panel.rows.push_back({"a", std::to_string(p), "0.2"});
    panel.rows.push_back({"b", std::to_string(p), "0.2"});
    if (p >= 2) panel.rows.push_back({"c", std::to_string(p), "0.8"});
  }
  auto panel_path = tmp.file("events.tsv");
  write_table_file(panel_path, panel);

  auto es_path = tmp.file("eventstudy.tsv");
  auto es = run_cli("eventstudy --data " + q(panel_path) +
                        " --outcome y --period period --base 1 --fe none --fe unit"
                        " --cluster unit --output " + q(es_path),
                    tmp);
  REQUIRE(es.code == 0);
  CHECK(json::parse(es.out)["curves"].get<size_t>() == 2);

  auto table = DataTable::from_file(read_table_file(panel_path));
  std::vector<std::vector<std::string>> fe_sets{{}, {"unit"}};
  auto curves = econest::event_study(table, "y", "period", 1, fe_sets, "unit", {});
  REQUIRE(curves.size() == 2);

  TableFile es_out = read_table_file(es_path);
  REQUIRE(es_out.rows.size() == 4);  // two curves x periods {2, 3}
  size_t fec = es_out.column("fe"), perc = es_out.column("period"),
         estc = es_out.column("estimate");
  std::map<std::pair<std::string, int>, double> got;
  for (const auto& row : es_out.rows)
    got[std::make_pair(row[fec], int(parse_int(row[perc], "period")))] =
        parse_real(row[estc], "estimate");
  auto curve_est = [&](const std::string& label, int period) {
    return got.at(std::make_pair(label, period));
  };
  for (size_t k = 0; k < 2; ++k) {
    std::string label = k == 0 ? "none" : "unit";
    for (size_t i = 0; i < curves[k].periods.size(); ++i)
      CHECK(curve_est(label, curves[k].periods[i]) == curves[k].coefficients[i].estimate);
  }
  // Raw curve shows the cohort-composition jump; unit FE absorb it.
  CHECK(near(curve_est("none", 2), 0.2, 1e-12));
  CHECK(near(curve_est("none", 3), 0.2, 1e-12));
  CHECK(near(curve_est("unit", 2), 0.0, 1e-9));
  CHECK(near(curve_est("unit", 3), 0.0, 1e-9));

  TableFile series;
  series.schema = {{"date", "date"}, {"value", "real"}};
  Date cutoff{2017, 1, 20};
  int64_t cut_day = days_from_civil(cutoff);
  Rng rng(11);
  for (int t = -120; t <= 120; ++t) {
    double value = 0.3 + 0.0005 * t + (t >= 0 ? 0.1 : 0.0) + rng.normal(0, 0.01);
    series.rows.push_back({format_date(civil_from_days(cut_day + t)), format_real(value)});
  }
  auto series_path = tmp.file("series.tsv");
  write_table_file(series_path, series);

  auto rdd_kv = tmp.file("rdd.kv");
  auto rd = run_cli("rdd --data " + q(series_path) +
                        " --cutoff 2017-01-20 --bandwidth 90 --order 1 --output " + q(rdd_kv),
                    tmp);
  REQUIRE(rd.code == 0);
  json rj = json::parse(rd.out);
  CHECK(rj["n_left"].get<int>() == 90);
  CHECK(rj["n_right"].get<int>() == 91);
  double jump = rj["jump"].get<double>();
  CHECK(near(jump, 0.1, 0.01));
  CHECK(rj["p_value"].get<double>() < 1e-3);
  CHECK(std::isfinite(rj["z"].get<double>()));

  auto kv = read_kv_file(rdd_kv);
  CHECK(parse_real(kv.at("jump"), "jump") == jump);
  CHECK(kv.at("n_left") == "90");
  CHECK(kv.at("n_right") == "91");
  CHECK(kv.at("provenance.command") == "rdd");
  CHECK(hex16(kv.at("provenance.config_hash")));

  auto far = run_cli("rdd --data " + q(series_path) + " --cutoff 2025-01-01 --bandwidth 90",
                     tmp);
  auto ferr = error_of(far);
  CHECK(ferr["type"].get<std::string>() == "estimation");
  CHECK(ferr["message"].get<std::string>().find("too few") != std::string::npos);
}

}  // TEST_SUITE("cli")
