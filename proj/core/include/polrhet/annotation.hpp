#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "polrhet/corpus.hpp"
#include "polrhet/embedding.hpp"
#include "polrhet/rhetoric.hpp"

namespace polrhet::annotation {

// One coder's answers for one document: is the text causal attribution, and
// what is its tone (-1, 0, +1)?
struct AnnotationRecord {
  std::string doc_id;
  std::string coder_id;
  bool causal = false;
  int tone = 0;
};

std::vector<AnnotationRecord> read_annotations(const std::filesystem::path& path);
void write_annotations(const std::filesystem::path& path, std::span<const AnnotationRecord> records,
                       const std::map<std::string, std::string>& provenance = {});

// ---------------------------------------------------------------------------
// Annotation batch selection: a mix of benchmark-similar and random tweets,
// balanced across the declared benchmark groups.

struct Benchmark {
  std::string text;
  std::string party;  // group key, first component
  std::string style;  // group key, second component
};

struct SampleConfig {
  size_t n = 1000;
  double similar_fraction = 0.5;  // share chosen by similarity, rest at random
  uint64_t seed = 1;
};

// Similarity of a tweet to a group is its max cosine against that group's
// benchmark embeddings.  The similar quota is split evenly across groups
// (remainder to the lexicographically first groups); within a group tweets
// are ranked by (similarity desc, id asc).  The random remainder is drawn
// without replacement from the still-unselected pool.  Returns sorted ids.
std::vector<std::string> sample_for_annotation(std::span<const corpus::Tweet> tweets,
                                               std::span<const Benchmark> benchmarks,
                                               const Embedder& embedder,
                                               const SampleConfig& config);

// ---------------------------------------------------------------------------
// Gold-label resolution: the causality flag and the tone are each resolved
// independently by strict majority over the coders; exact ties are broken by
// a seeded draw that depends only on (seed, doc_id), so record order and
// batch composition cannot change the outcome.  The style is synthesized
// from the resolved pair.

struct ResolvedLabel {
  std::string doc_id;
  bool causal = false;
  int tone = 0;
  rhetoric::Style style = rhetoric::Style::None;
  bool tie_broken = false;  // either resolution needed a random draw
};

std::vector<ResolvedLabel> resolve_labels(std::span<const AnnotationRecord> records,
                                          uint64_t seed);

// ---------------------------------------------------------------------------
// Agreement statistics.

// Chance-corrected agreement across multiple raters (three style categories).
// Requires every item to have the same number of ratings.  In the degenerate
// case where every rating lands in one category the statistic is 1 with
// *degenerate set, since observed and chance agreement coincide at 1.
double fleiss_kappa(const std::vector<std::vector<int>>& item_category_counts,
                    bool* degenerate = nullptr);

struct AgreementReport {
  // Fleiss' kappa over items with the modal rating count.
  double kappa = 0;
  bool kappa_degenerate = false;
  size_t kappa_items = 0;
  size_t kappa_raters = 0;
  size_t items_dropped_unequal = 0;

  // Mean pairwise Pearson correlation of style codes over coder pairs with
  // at least two co-rated items; constant-rating pairs are skipped.
  double mean_pairwise_r = 0;
  size_t pairs_used = 0;
  size_t pairs_skipped_zero_variance = 0;

  // Share of kappa items rated identically by every coder, and the rate a
  // coder pool rating at the observed category shares would reach by chance.
  double unanimous_rate = 0;
  double chance_unanimous_rate = 0;
};

AgreementReport agreement_report(std::span<const AnnotationRecord> records);

}  // namespace polrhet::annotation
