#include "polrhet/annotation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <unordered_map>

#include "polrhet/errors.hpp"
#include "polrhet/io.hpp"
#include "polrhet/rng.hpp"
#include "polrhet/textfeat.hpp"

namespace polrhet::annotation {

std::vector<AnnotationRecord> read_annotations(const std::filesystem::path& path) {
  TableFile file = read_table_file(path);
  size_t doc = file.column("doc_id"), coder = file.column("coder_id");
  size_t causal = file.column("causal"), tone = file.column("tone");
  std::vector<AnnotationRecord> out;
  out.reserve(file.rows.size());
  for (const auto& row : file.rows) {
    AnnotationRecord r;
    r.doc_id = row[doc];
    r.coder_id = row[coder];
    r.causal = parse_bool(row[causal], "causal");
    r.tone = int(parse_int(row[tone], "tone"));
    if (r.tone < -1 || r.tone > 1)
      throw ValidationError("tone out of range for doc '" + r.doc_id + "'");
    out.push_back(std::move(r));
  }
  return out;
}

void write_annotations(const std::filesystem::path& path, std::span<const AnnotationRecord> records,
                       const std::map<std::string, std::string>& provenance) {
  TableFile file;
  file.schema = {{"doc_id", "string"}, {"coder_id", "string"}, {"causal", "bool"}, {"tone", "int"}};
  file.provenance = provenance;
  for (const auto& r : records)
    file.rows.push_back({r.doc_id, r.coder_id, r.causal ? "1" : "0", std::to_string(r.tone)});
  write_table_file(path, file);
}

// ---------------------------------------------------------------------------

std::vector<std::string> sample_for_annotation(std::span<const corpus::Tweet> tweets,
                                               std::span<const Benchmark> benchmarks,
                                               const Embedder& embedder,
                                               const SampleConfig& config) {
  if (config.n > tweets.size())
    throw ValidationError("cannot sample " + std::to_string(config.n) + " of " +
                          std::to_string(tweets.size()) + " tweets");
  if (config.similar_fraction < 0 || config.similar_fraction > 1)
    throw ConfigError("similar_fraction must lie in [0, 1]");
  if (benchmarks.empty() && config.similar_fraction > 0)
    throw ConfigError("similarity sampling needs at least one benchmark");

  // Group benchmarks by (party, style) and embed them.
  std::map<std::pair<std::string, std::string>, std::vector<SparseVec>> groups;
  for (const auto& b : benchmarks)
    groups[{b.party, b.style}].push_back(embedder.embed_document(textfeat::tokenize(b.text)));

  std::vector<SparseVec> tweet_vecs(tweets.size());
  for (size_t i = 0; i < tweets.size(); ++i)
    tweet_vecs[i] = embedder.embed_document(textfeat::tokenize(tweets[i].text));

  size_t n_similar = size_t(std::llround(config.similar_fraction * double(config.n)));
  std::set<size_t> chosen;

  if (n_similar > 0) {
    size_t g_count = groups.size();
    size_t base = n_similar / g_count, rem = n_similar % g_count;
    size_t g_idx = 0;
    for (const auto& [key, vecs] : groups) {
      size_t quota = base + (g_idx < rem ? 1 : 0);
      ++g_idx;
      // Rank every unchosen tweet by max similarity to this group.
      std::vector<std::pair<double, size_t>> ranked;
      ranked.reserve(tweets.size());
      for (size_t i = 0; i < tweets.size(); ++i) {
        if (chosen.count(i)) continue;
        double best = -2.0;
        for (const auto& bv : vecs) best = std::max(best, cosine(tweet_vecs[i], bv));
        ranked.emplace_back(best, i);
      }
      std::sort(ranked.begin(), ranked.end(), [&](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return tweets[a.second].id < tweets[b.second].id;
      });
      for (size_t k = 0; k < quota && k < ranked.size(); ++k) chosen.insert(ranked[k].second);
    }
  }

  // Random remainder, drawn from the unchosen pool in id order.
  Rng rng(mix_seed(config.seed, "annotation-sample"));
  std::vector<size_t> pool;
  for (size_t i = 0; i < tweets.size(); ++i)
    if (!chosen.count(i)) pool.push_back(i);
  std::sort(pool.begin(), pool.end(),
            [&](size_t a, size_t b) { return tweets[a].id < tweets[b].id; });
  while (chosen.size() < config.n && !pool.empty()) {
    size_t pick = size_t(rng.uniform_below(pool.size()));
    chosen.insert(pool[pick]);
    pool.erase(pool.begin() + long(pick));
  }

  std::vector<std::string> ids;
  ids.reserve(chosen.size());
  for (size_t i : chosen) ids.push_back(tweets[i].id);
  std::sort(ids.begin(), ids.end());
  return ids;
}

// ---------------------------------------------------------------------------

namespace {

// doc_id -> records, with (doc, coder) uniqueness enforced.
std::map<std::string, std::vector<const AnnotationRecord*>> group_by_doc(
    std::span<const AnnotationRecord> records) {
  std::map<std::string, std::vector<const AnnotationRecord*>> by_doc;
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& r : records) {
    if (!seen.emplace(r.doc_id, r.coder_id).second)
      throw ValidationError("coder '" + r.coder_id + "' rated doc '" + r.doc_id + "' twice");
    by_doc[r.doc_id].push_back(&r);
  }
  return by_doc;
}

size_t style_slot(rhetoric::Style s) { return size_t(rhetoric::style_code(s) + 1); }

double pearson_r(std::span<const double> a, std::span<const double> b) {
  size_t n = a.size();
  double ma = 0, mb = 0;
  for (size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= double(n);
  mb /= double(n);
  double sab = 0, saa = 0, sbb = 0;
  for (size_t i = 0; i < n; ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

}  // namespace

std::vector<ResolvedLabel> resolve_labels(std::span<const AnnotationRecord> records,
                                          uint64_t seed) {
  auto by_doc = group_by_doc(records);
  std::vector<ResolvedLabel> out;
  out.reserve(by_doc.size());
  for (const auto& [doc_id, recs] : by_doc) {
    long causal_votes[2] = {0, 0};          // false, true
    long tone_votes[3] = {0, 0, 0};         // -1, 0, +1
    for (const AnnotationRecord* r : recs) {
      causal_votes[r->causal ? 1 : 0] += 1;
      tone_votes[size_t(r->tone + 1)] += 1;
    }

    ResolvedLabel label;
    label.doc_id = doc_id;
    // Seeded draws keyed by the doc id alone: reordering the records or
    // changing the batch cannot move the outcome.  Causality is drawn before
    // tone so a double tie consumes the stream in a fixed order.
    Rng rng(mix_seed(mix_seed(seed, "label-tie"), doc_id));
    if (causal_votes[0] != causal_votes[1]) {
      label.causal = causal_votes[1] > causal_votes[0];
    } else {
      label.causal = rng.uniform_below(2) == 1;
      label.tie_broken = true;
    }
    long best = std::max({tone_votes[0], tone_votes[1], tone_votes[2]});
    std::vector<int> tied;
    for (int t = -1; t <= 1; ++t)
      if (tone_votes[size_t(t + 1)] == best) tied.push_back(t);
    if (tied.size() == 1) {
      label.tone = tied[0];
    } else {
      label.tone = tied[size_t(rng.uniform_below(tied.size()))];
      label.tie_broken = true;
    }
    label.style = rhetoric::synthesize_style(label.causal, label.tone);
    out.push_back(std::move(label));
  }
  return out;
}

// ---------------------------------------------------------------------------

double fleiss_kappa(const std::vector<std::vector<int>>& item_category_counts, bool* degenerate) {
  if (degenerate) *degenerate = false;
  size_t n_items = item_category_counts.size();
  if (n_items == 0) throw ValidationError("fleiss_kappa: no items");
  size_t n_cat = item_category_counts[0].size();
  if (n_cat < 2) throw ValidationError("fleiss_kappa: need at least two categories");

  long long m = 0;
  for (int c : item_category_counts[0]) m += c;
  if (m < 2) throw ValidationError("fleiss_kappa: need at least two ratings per item");

  double p_bar = 0.0;
  std::vector<double> p_cat(n_cat, 0.0);
  for (const auto& row : item_category_counts) {
    if (row.size() != n_cat) throw ValidationError("fleiss_kappa: ragged counts matrix");
    long long row_m = 0, sq = 0;
    for (size_t j = 0; j < n_cat; ++j) {
      if (row[j] < 0) throw ValidationError("fleiss_kappa: negative count");
      row_m += row[j];
      sq += (long long)(row[j]) * row[j];
      p_cat[j] += row[j];
    }
    if (row_m != m)
      throw ValidationError("fleiss_kappa: unequal rating counts across items");
    p_bar += double(sq - m) / double(m * (m - 1));
  }
  p_bar /= double(n_items);

  double p_e = 0.0;
  for (size_t j = 0; j < n_cat; ++j) {
    double share = p_cat[j] / double(n_items * size_t(m));
    p_e += share * share;
  }
  if (p_e >= 1.0) {
    // Every rating in one category: observed and expected agreement are both
    // 1, so the ratio is indeterminate; report perfect agreement, flagged.
    if (degenerate) *degenerate = true;
    return 1.0;
  }
  return (p_bar - p_e) / (1.0 - p_e);
}

AgreementReport agreement_report(std::span<const AnnotationRecord> records) {
  auto by_doc = group_by_doc(records);
  if (by_doc.empty()) throw ValidationError("agreement_report: no records");

  // Modal rating count decides which items enter kappa and unanimity.
  std::map<size_t, size_t> m_freq;
  for (const auto& [doc, recs] : by_doc) m_freq[recs.size()] += 1;
  size_t modal_m = 0, modal_freq = 0;
  for (const auto& [m, freq] : m_freq)
    if (freq > modal_freq || (freq == modal_freq && m > modal_m)) {
      modal_m = m;
      modal_freq = freq;
    }
  if (modal_m < 2) throw ValidationError("agreement_report: modal rating count below two");

  AgreementReport report;
  report.kappa_raters = modal_m;

  std::vector<std::vector<int>> counts;
  size_t unanimous = 0;
  for (const auto& [doc, recs] : by_doc) {
    if (recs.size() != modal_m) {
      ++report.items_dropped_unequal;
      continue;
    }
    std::vector<int> row(3, 0);
    for (const AnnotationRecord* r : recs)
      row[style_slot(rhetoric::synthesize_style(r->causal, r->tone))] += 1;
    if (*std::max_element(row.begin(), row.end()) == int(modal_m)) ++unanimous;
    counts.push_back(std::move(row));
  }
  if (counts.empty()) throw ValidationError("agreement_report: no items at the modal rating count");
  report.kappa_items = counts.size();
  report.kappa = fleiss_kappa(counts, &report.kappa_degenerate);
  report.unanimous_rate = double(unanimous) / double(counts.size());

  double share[3] = {0, 0, 0};
  for (const auto& row : counts)
    for (size_t j = 0; j < 3; ++j) share[j] += row[j];
  double chance = 0.0;
  for (size_t j = 0; j < 3; ++j) {
    double p = share[j] / double(counts.size() * modal_m);
    chance += std::pow(p, double(modal_m));
  }
  report.chance_unanimous_rate = chance;

  // Pairwise correlations use every record, not only modal-count items.
  std::map<std::string, std::map<std::string, int>> by_coder;  // coder -> doc -> code
  for (const auto& r : records)
    by_coder[r.coder_id][r.doc_id] =
        rhetoric::style_code(rhetoric::synthesize_style(r.causal, r.tone));
  std::vector<const std::map<std::string, int>*> coders;
  for (const auto& [coder, docs] : by_coder) coders.push_back(&docs);

  double r_sum = 0.0;
  for (size_t a = 0; a < coders.size(); ++a) {
    for (size_t b = a + 1; b < coders.size(); ++b) {
      std::vector<double> xa, xb;
      for (const auto& [doc, code] : *coders[a]) {
        auto it = coders[b]->find(doc);
        if (it != coders[b]->end()) {
          xa.push_back(double(code));
          xb.push_back(double(it->second));
        }
      }
      if (xa.size() < 2) continue;
      bool const_a = std::all_of(xa.begin(), xa.end(), [&](double v) { return v == xa[0]; });
      bool const_b = std::all_of(xb.begin(), xb.end(), [&](double v) { return v == xb[0]; });
      if (const_a || const_b) {
        ++report.pairs_skipped_zero_variance;
        continue;
      }
      r_sum += pearson_r(xa, xb);
      ++report.pairs_used;
    }
  }
  report.mean_pairwise_r = report.pairs_used > 0 ? r_sum / double(report.pairs_used) : 0.0;
  return report;
}

}  // namespace polrhet::annotation
