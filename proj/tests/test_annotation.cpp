// Annotation sampling, majority-vote label resolution, and agreement stats.
#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "polrhet/annotation.hpp"
#include "polrhet/corpus.hpp"
#include "polrhet/embedding.hpp"
#include "polrhet/errors.hpp"
#include "polrhet/oracles.hpp"
#include "polrhet/rhetoric.hpp"
#include "polrhet/rng.hpp"

using namespace polrhet;
using namespace polrhet::annotation;
using rhetoric::Style;

namespace {

AnnotationRecord rec(std::string doc, std::string coder, bool causal, int tone) {
  AnnotationRecord r;
  r.doc_id = std::move(doc);
  r.coder_id = std::move(coder);
  r.causal = causal;
  r.tone = tone;
  return r;
}

corpus::Tweet tweet(std::string id, std::string text) {
  corpus::Tweet t;
  t.id = std::move(id);
  t.politician_id = "p1";
  t.text = std::move(text);
  return t;
}

// Emit a representative (causal, tone) pair for each style.
AnnotationRecord styled(std::string doc, std::string coder, Style s) {
  switch (s) {
    case Style::Blame: return rec(std::move(doc), std::move(coder), true, -1);
    case Style::Merit: return rec(std::move(doc), std::move(coder), true, 1);
    default: return rec(std::move(doc), std::move(coder), false, 0);
  }
}

const ResolvedLabel& find_label(const std::vector<ResolvedLabel>& labels, const std::string& doc) {
  for (const auto& l : labels)
    if (l.doc_id == doc) return l;
  REQUIRE(false);
  static ResolvedLabel dummy;
  return dummy;
}

}  // namespace

TEST_SUITE("annotation") {

TEST_CASE("annotation files round-trip") {
  TempDir dir;
  std::vector<AnnotationRecord> records = {
      rec("d1", "alice", true, -1),
      rec("d1", "bob", false, 0),
      rec("d2", "alice", true, 1),
  };
  auto path = dir.file("ann.tsv");
  write_annotations(path, records, {{"batch", "7"}});
  auto back = read_annotations(path);
  REQUIRE(back.size() == records.size());
  for (size_t i = 0; i < records.size(); ++i) {
    CHECK(back[i].doc_id == records[i].doc_id);
    CHECK(back[i].coder_id == records[i].coder_id);
    CHECK(back[i].causal == records[i].causal);
    CHECK(back[i].tone == records[i].tone);
  }

  // Out-of-range tone is rejected at read time.
  auto bad = dir.file("bad.tsv");
  spit(bad,
       "#schema\tdoc_id:string\tcoder_id:string\tcausal:bool\ttone:int\n"
       "d1\talice\t1\t2\n");
  CHECK_THROWS_WITH_AS(read_annotations(bad), doctest::Contains("tone"), ValidationError);
}

TEST_CASE("sampling selects benchmark-similar tweets first") {
  // Two benchmark groups with disjoint vocabularies; filler shares no tokens
  // with either, so its similarity to both groups is zero.
  std::vector<Benchmark> benchmarks = {
      {"praise tokens alpha bravo charlie delta", "R", "merit"},
      {"blame tokens echo foxtrot golf hotel", "D", "blame"},
  };
  std::vector<corpus::Tweet> tweets;
  // Five planted near-duplicates per group.
  for (int i = 0; i < 5; ++i) {
    tweets.push_back(tweet("m" + std::to_string(i),
                           "praise tokens alpha bravo charlie extra" + std::to_string(i)));
    tweets.push_back(tweet("b" + std::to_string(i),
                           "blame tokens echo foxtrot golf spare" + std::to_string(i)));
  }
  for (int i = 0; i < 40; ++i)
    tweets.push_back(tweet("f" + std::to_string(i),
                           "filler noise w" + std::to_string(i) + " q" + std::to_string(i % 7)));

  HashedEmbedder embedder(16);  // 65536 axes
  SampleConfig config;
  config.n = 20;
  config.similar_fraction = 0.5;
  config.seed = 11;
  auto ids = sample_for_annotation(tweets, benchmarks, embedder, config);

  REQUIRE(ids.size() == 20);
  CHECK(std::is_sorted(ids.begin(), ids.end()));
  std::set<std::string> got(ids.begin(), ids.end());
  CHECK(got.size() == 20);
  for (int i = 0; i < 5; ++i) {
    CHECK(got.count("m" + std::to_string(i)) == 1);
    CHECK(got.count("b" + std::to_string(i)) == 1);
  }

  // Deterministic given the seed; the similarity-forced half survives a seed
  // change because the rankings are strict.
  CHECK(sample_for_annotation(tweets, benchmarks, embedder, config) == ids);
  config.seed = 12;
  auto other = sample_for_annotation(tweets, benchmarks, embedder, config);
  for (int i = 0; i < 5; ++i) {
    CHECK(std::count(other.begin(), other.end(), "m" + std::to_string(i)) == 1);
    CHECK(std::count(other.begin(), other.end(), "b" + std::to_string(i)) == 1);
  }

  // A verbatim copy of a benchmark has cosine 1 and must be chosen.
  tweets.push_back(tweet("verbatim", benchmarks[0].text));
  config.seed = 11;
  auto with_copy = sample_for_annotation(tweets, benchmarks, embedder, config);
  CHECK(std::count(with_copy.begin(), with_copy.end(), "verbatim") == 1);
}

TEST_CASE("sampling quota split favors the first groups and ranks within group") {
  // Three groups in lexicographic (party, style) order; a quota of 4 gives
  // the first group two slots and the others one each.
  std::vector<Benchmark> benchmarks = {
      {"redcar redtree redlake redhill", "D", "blame"},
      {"bluecar bluetree bluelake bluehill", "D", "merit"},
      {"greencar greentree greenlake greenhill", "R", "blame"},
  };
  std::vector<corpus::Tweet> tweets;
  auto plant = [&](const std::string& prefix, const std::string& stem) {
    // Three candidates per group with strictly decreasing similarity.
    tweets.push_back(tweet(prefix + "0", stem + "car " + stem + "tree " + stem + "lake " + stem + "hill"));
    tweets.push_back(tweet(prefix + "1", stem + "car " + stem + "tree " + stem + "lake zz" + prefix));
    tweets.push_back(tweet(prefix + "2", stem + "car " + stem + "tree yy" + prefix + " zz" + prefix));
  };
  plant("r", "red");
  plant("u", "blue");
  plant("g", "green");
  for (int i = 0; i < 6; ++i)
    tweets.push_back(tweet("x" + std::to_string(i), "noise n" + std::to_string(i)));

  HashedEmbedder embedder(16);  // 65536 axes
  SampleConfig config;
  config.n = 4;
  config.similar_fraction = 1.0;
  auto ids = sample_for_annotation(tweets, benchmarks, embedder, config);
  CHECK(ids == std::vector<std::string>{"g0", "r0", "r1", "u0"});
}

TEST_CASE("sampling degenerate fraction and errors") {
  std::vector<corpus::Tweet> tweets;
  for (int i = 0; i < 30; ++i)
    tweets.push_back(tweet("t" + std::to_string(i), "word w" + std::to_string(i)));
  HashedEmbedder embedder(12);

  SampleConfig config;
  config.n = 10;
  config.similar_fraction = 0.0;
  config.seed = 5;
  // No benchmarks needed when the similar share is zero.
  auto ids = sample_for_annotation(tweets, {}, embedder, config);
  REQUIRE(ids.size() == 10);
  CHECK(std::is_sorted(ids.begin(), ids.end()));
  CHECK(sample_for_annotation(tweets, {}, embedder, config) == ids);
  config.seed = 6;
  auto other = sample_for_annotation(tweets, {}, embedder, config);
  CHECK(other.size() == 10);
  CHECK(other != ids);  // 10-of-30 draws collide with probability ~1e-8

  config.similar_fraction = 0.5;
  CHECK_THROWS_AS(sample_for_annotation(tweets, {}, embedder, config), ConfigError);
  config.similar_fraction = 1.5;
  CHECK_THROWS_AS(sample_for_annotation(tweets, {}, embedder, config), ConfigError);
  config.similar_fraction = -0.1;
  CHECK_THROWS_AS(sample_for_annotation(tweets, {}, embedder, config), ConfigError);
  config.similar_fraction = 0.0;
  config.n = 31;
  CHECK_THROWS_AS(sample_for_annotation(tweets, {}, embedder, config), ValidationError);
}

TEST_CASE("label resolution: strict majorities, resolved independently") {
  std::vector<AnnotationRecord> records = {
      rec("d1", "a", true, -1), rec("d1", "b", true, -1), rec("d1", "c", false, -1),
  };
  auto labels = resolve_labels(records, 1);
  REQUIRE(labels.size() == 1);
  CHECK(labels[0].causal == true);
  CHECK(labels[0].tone == -1);
  CHECK(labels[0].style == Style::Blame);
  CHECK(labels[0].tie_broken == false);

  // The causal and tone majorities come from different coder subsets: the
  // resolved pair need not match any single coder's answer.
  records = {
      rec("d2", "a", true, 1),  rec("d2", "b", true, 1),   rec("d2", "c", false, -1),
      rec("d2", "d", false, -1), rec("d2", "e", true, -1),
  };
  labels = resolve_labels(records, 1);
  CHECK(labels[0].causal == true);   // 3 of 5
  CHECK(labels[0].tone == -1);       // 3 of 5
  CHECK(labels[0].style == Style::Blame);
  CHECK(labels[0].tie_broken == false);

  // Causal-neutral resolves to None even with full agreement.
  records = {rec("d3", "a", true, 0), rec("d3", "b", true, 0)};
  labels = resolve_labels(records, 1);
  CHECK(labels[0].causal == true);
  CHECK(labels[0].tone == 0);
  CHECK(labels[0].style == Style::None);
}

TEST_CASE("label resolution: seeded ties keyed by document") {
  std::vector<AnnotationRecord> three_way = {
      rec("t", "a", false, -1), rec("t", "b", false, 0), rec("t", "c", false, 1),
  };
  std::set<int> seen;
  for (uint64_t seed = 0; seed < 60; ++seed) {
    auto labels = resolve_labels(three_way, seed);
    REQUIRE(labels.size() == 1);
    CHECK(labels[0].tie_broken == true);
    CHECK(labels[0].causal == false);
    seen.insert(labels[0].tone);
    // Repeated resolution is bit-stable.
    CHECK(resolve_labels(three_way, seed)[0].tone == labels[0].tone);
  }
  CHECK(seen == std::set<int>{-1, 0, 1});

  std::set<bool> causal_seen;
  std::vector<AnnotationRecord> coin = {
      rec("c", "a", true, 1), rec("c", "b", false, 1),
  };
  for (uint64_t seed = 0; seed < 40; ++seed) {
    auto labels = resolve_labels(coin, seed);
    CHECK(labels[0].tie_broken == true);
    CHECK(labels[0].tone == 1);
    causal_seen.insert(labels[0].causal);
  }
  CHECK(causal_seen.size() == 2);

  // The tie draw depends only on (seed, doc_id): neither record order nor the
  // rest of the batch moves it.
  auto alone = resolve_labels(three_way, 9)[0];
  std::vector<AnnotationRecord> batch = three_way;
  batch.push_back(rec("aardvark", "a", true, -1));
  batch.push_back(rec("zebra", "a", false, 1));
  std::reverse(batch.begin(), batch.end());
  auto in_batch = find_label(resolve_labels(batch, 9), "t");
  CHECK(in_batch.tone == alone.tone);
  CHECK(in_batch.causal == alone.causal);

  // Duplicate (doc, coder) pairs are rejected.
  std::vector<AnnotationRecord> dup = {
      rec("d", "a", true, 1), rec("d", "a", false, 1),
  };
  CHECK_THROWS_WITH_AS(resolve_labels(dup, 1), doctest::Contains("twice"), ValidationError);
}

TEST_CASE("label resolution matches the vote table on 530 planted splits") {
  // Every document gets three coders with planted 2-vs-1 splits on both
  // questions, so strict majorities decide everything.
  Rng rng(530);
  std::vector<AnnotationRecord> records;
  std::map<std::string, std::pair<bool, int>> expected;
  for (int i = 0; i < 530; ++i) {
    std::string doc = "doc" + std::to_string(1000 + i);
    bool causal_major = rng.uniform_below(2) == 1;
    size_t causal_dissent = rng.uniform_below(3);
    int tone_major = int(rng.uniform_below(3)) - 1;
    int others[2];
    int k = 0;
    for (int t = -1; t <= 1; ++t)
      if (t != tone_major) others[k++] = t;
    int tone_minor = others[rng.uniform_below(2)];
    size_t tone_dissent = rng.uniform_below(3);
    for (size_t c = 0; c < 3; ++c)
      records.push_back(rec(doc, "coder" + std::to_string(c),
                            c == causal_dissent ? !causal_major : causal_major,
                            c == tone_dissent ? tone_minor : tone_major));
    expected[doc] = {causal_major, tone_major};
  }
  // Shuffle so resolution cannot lean on input order.
  for (size_t i = records.size(); i > 1; --i)
    std::swap(records[i - 1], records[rng.uniform_below(i)]);

  auto labels = resolve_labels(records, 77);
  REQUIRE(labels.size() == 530);
  for (const auto& label : labels) {
    auto [causal, tone] = expected.at(label.doc_id);
    CHECK(label.causal == causal);
    CHECK(label.tone == tone);
    CHECK(label.tie_broken == false);
    CHECK(label.style == rhetoric::synthesize_style(causal, tone));
  }
}

TEST_CASE("fleiss kappa closed forms") {
  bool degenerate = true;
  CHECK(fleiss_kappa({{3, 0, 0}, {0, 3, 0}, {0, 0, 3}}, &degenerate) == doctest::Approx(1.0));
  CHECK(degenerate == false);

  // Two coders, two items, full disagreement: observed agreement 0, chance
  // 1/2, so kappa = -1.
  CHECK(near(fleiss_kappa({{1, 1}, {1, 1}}), -1.0, 1e-15));

  // All ratings in one category: observed and chance agreement both 1.
  CHECK(fleiss_kappa({{3, 0}, {3, 0}}, &degenerate) == 1.0);
  CHECK(degenerate == true);

  // Category relabeling cannot move the statistic.
  std::vector<std::vector<int>> table = {{2, 1, 0}, {0, 2, 1}, {1, 1, 1}, {3, 0, 0}};
  std::vector<std::vector<int>> permuted;
  for (const auto& row : table) permuted.push_back({row[2], row[0], row[1]});
  CHECK(near(fleiss_kappa(table), fleiss_kappa(permuted), 1e-12));
}

TEST_CASE("fleiss kappa input validation") {
  CHECK_THROWS_AS(fleiss_kappa({}), ValidationError);
  CHECK_THROWS_AS(fleiss_kappa({{3}}), ValidationError);                  // one category
  CHECK_THROWS_AS(fleiss_kappa({{1, 0}, {0, 1}}), ValidationError);      // m = 1
  CHECK_THROWS_AS(fleiss_kappa({{2, 0}, {1, 1, 0}}), ValidationError);   // ragged
  CHECK_THROWS_AS(fleiss_kappa({{2, 0}, {2, 1}}), ValidationError);      // unequal m
  CHECK_THROWS_AS(fleiss_kappa({{2, 1}, {4, -1}}), ValidationError);     // negative
}

TEST_CASE("fleiss kappa matches the pairwise oracle on random tables") {
  Rng rng(404);
  for (int trial = 0; trial < 200; ++trial) {
    size_t m = 2 + rng.uniform_below(5);
    size_t items = 1 + rng.uniform_below(40);
    std::vector<std::vector<int>> table(items, std::vector<int>(3, 0));
    for (auto& row : table)
      for (size_t r = 0; r < m; ++r) row[rng.uniform_below(3)] += 1;
    double got = fleiss_kappa(table);
    double want = oracles::kappa_pairwise(table);
    CHECK_MESSAGE(near(got, want, 1e-12), "trial ", trial, ": ", got, " vs ", want);
  }
}

TEST_CASE("agreement report bookkeeping on a hand-built batch") {
  // Eight documents rated by all of c1..c3 (letters give the style each coder
  // derives), plus two documents with only two raters.
  const char* plan[8] = {"NNN", "BBB", "MMM", "NBM", "BBM", "NNM", "MMB", "NBB"};
  std::vector<AnnotationRecord> records;
  auto style_of = [](char ch) {
    return ch == 'B' ? Style::Blame : ch == 'M' ? Style::Merit : Style::None;
  };
  for (int d = 0; d < 8; ++d)
    for (int c = 0; c < 3; ++c)
      records.push_back(styled("d" + std::to_string(d), "c" + std::to_string(c + 1),
                               style_of(plan[d][c])));
  records.push_back(styled("d8", "c1", Style::Blame));
  records.push_back(styled("d8", "c2", Style::Merit));
  records.push_back(styled("d9", "c2", Style::None));
  records.push_back(styled("d9", "c3", Style::None));

  auto report = agreement_report(records);
  CHECK(report.kappa_items == 8);
  CHECK(report.kappa_raters == 3);
  CHECK(report.items_dropped_unequal == 2);
  CHECK(report.kappa_degenerate == false);
  CHECK(near(report.unanimous_rate, 3.0 / 8.0, 1e-15));

  // Chance unanimity from the category marginals of the kept items.
  double pn = 7.0 / 24.0, pb = 9.0 / 24.0, pm = 8.0 / 24.0;
  CHECK(near(report.chance_unanimous_rate, pn * pn * pn + pb * pb * pb + pm * pm * pm, 1e-12));

  // Kappa equals a direct evaluation on the same counts table.
  std::vector<std::vector<int>> counts;
  for (const auto* row : plan) {
    std::vector<int> r(3, 0);
    for (int c = 0; c < 3; ++c) r[size_t(rhetoric::style_code(style_of(row[c])) + 1)] += 1;
    counts.push_back(r);
  }
  CHECK(near(report.kappa, fleiss_kappa(counts), 1e-15));
  CHECK(near(report.kappa, oracles::kappa_pairwise(counts), 1e-12));

  // Pairwise correlations use all co-rated documents, dropped items included.
  auto code_of = [&](char ch) { return double(rhetoric::style_code(style_of(ch))); };
  std::vector<double> c1, c2;
  for (const auto* row : plan) {
    c1.push_back(code_of(row[0]));
    c2.push_back(code_of(row[1]));
  }
  c1.push_back(code_of('B'));  // d8
  c2.push_back(code_of('M'));
  double r12 = oracles::pearson(c1, c2);
  std::vector<double> a13, b13;
  for (const auto* row : plan) {
    a13.push_back(code_of(row[0]));
    b13.push_back(code_of(row[2]));
  }
  double r13 = oracles::pearson(a13, b13);
  std::vector<double> a23, b23;
  for (const auto* row : plan) {
    a23.push_back(code_of(row[1]));
    b23.push_back(code_of(row[2]));
  }
  a23.push_back(code_of('N'));  // d9
  b23.push_back(code_of('N'));
  double r23 = oracles::pearson(a23, b23);
  CHECK(report.pairs_used == 3);
  CHECK(report.pairs_skipped_zero_variance == 0);
  CHECK(near(report.mean_pairwise_r, (r12 + r13 + r23) / 3.0, 1e-12));
}

TEST_CASE("agreement report pairwise extremes and skipped pairs") {
  // Two coders in lockstep give r = 1.
  std::vector<AnnotationRecord> same;
  Style cycle[4] = {Style::Blame, Style::Merit, Style::None, Style::Merit};
  for (int d = 0; d < 4; ++d) {
    same.push_back(styled("d" + std::to_string(d), "a", cycle[d]));
    same.push_back(styled("d" + std::to_string(d), "b", cycle[d]));
  }
  auto report = agreement_report(same);
  CHECK(near(report.mean_pairwise_r, 1.0, 1e-12));
  CHECK(report.pairs_used == 1);
  CHECK(near(report.unanimous_rate, 1.0, 1e-15));

  // Style codes negated pairwise give r = -1.
  std::vector<AnnotationRecord> flipped;
  for (int d = 0; d < 4; ++d) {
    Style s = d % 2 == 0 ? Style::Blame : Style::Merit;
    Style t = d % 2 == 0 ? Style::Merit : Style::Blame;
    flipped.push_back(styled("d" + std::to_string(d), "a", s));
    flipped.push_back(styled("d" + std::to_string(d), "b", t));
  }
  report = agreement_report(flipped);
  CHECK(near(report.mean_pairwise_r, -1.0, 1e-12));
  CHECK(near(report.kappa, -1.0, 1e-12));

  // A constant coder has zero variance: every pair through it is skipped.
  std::vector<AnnotationRecord> with_constant = same;
  for (int d = 0; d < 4; ++d)
    with_constant.push_back(styled("d" + std::to_string(d), "c", Style::None));
  report = agreement_report(with_constant);
  CHECK(report.pairs_used == 1);
  CHECK(report.pairs_skipped_zero_variance == 2);
  CHECK(near(report.mean_pairwise_r, 1.0, 1e-12));
  CHECK(report.kappa_raters == 3);

  // Degenerate batch: everyone says None everywhere.
  std::vector<AnnotationRecord> all_none;
  for (int d = 0; d < 3; ++d)
    for (int c = 0; c < 2; ++c)
      all_none.push_back(styled("d" + std::to_string(d), "c" + std::to_string(c), Style::None));
  report = agreement_report(all_none);
  CHECK(report.kappa == 1.0);
  CHECK(report.kappa_degenerate == true);
  CHECK(report.pairs_used == 0);
  CHECK(report.pairs_skipped_zero_variance == 1);
}

TEST_CASE("uniform styles drive chance agreement to one ninth") {
  // Three coders drawing styles uniformly: unanimity happens at rate 1/9 and
  // the marginal-based chance rate converges there too.
  Rng rng(99);
  std::vector<AnnotationRecord> records;
  const size_t n_docs = 2000;
  for (size_t d = 0; d < n_docs; ++d)
    for (int c = 0; c < 3; ++c) {
      Style s = Style(int(rng.uniform_below(3)) - 1);
      records.push_back(styled("doc" + std::to_string(d), "c" + std::to_string(c), s));
    }
  auto report = agreement_report(records);
  CHECK(report.kappa_items == n_docs);
  CHECK(report.items_dropped_unequal == 0);
  double p = 1.0 / 9.0;
  double sd = std::sqrt(p * (1 - p) / double(n_docs));
  CHECK(std::abs(report.unanimous_rate - p) <= 3 * sd);
  CHECK(std::abs(report.chance_unanimous_rate - p) <= 0.01);
  CHECK(std::abs(report.kappa) < 0.05);
  CHECK(report.pairs_used == 3);
}

}  // TEST_SUITE
