#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "polrhet/embedding.hpp"
#include "polrhet/lexicons.hpp"

namespace polrhet::textfeat {

// Tokenization, applied in order:
//   1. split on whitespace;
//   2. URLs (http://, https://, www., or the literal placeholder "URL")
//      become the single token "<url>";
//   3. @mentions become "<user>";
//   4. a leading '#' is stripped from hashtags;
//   5. everything is lowercased;
//   6. punctuation is stripped, keeping apostrophes between word characters;
//   7. tokens that end up empty are dropped.
std::vector<std::string> tokenize(std::string_view text);

struct TokenizedDoc {
  std::string id;
  std::vector<std::string> tokens;
};

// Adjacent token pairs as "a b" strings.
std::vector<std::string> bigrams(std::span<const std::string> tokens);

// How strongly a bigram's document-level presence separates in-class from
// out-of-class documents, measured by the 2x2 Matthews/phi coefficient.
// Bigrams present in fewer than min_doc_count documents are skipped; a
// degenerate margin (bigram in every document, or a single class) scores 0.
// Results are sorted by score descending, ties broken lexicographically.
struct BigramScore {
  std::string bigram;
  double score;
  long docs_in_class;
  long docs_out_class;
};
std::vector<BigramScore> distinctive_bigrams(std::span<const TokenizedDoc> docs,
                                             std::span<const char> in_class,
                                             long min_doc_count = 2);

// (second- + third-person pronouns - first-person) / max(1, all pronouns).
double self_other_score(std::span<const std::string> tokens,
                        const PronounLexicon& lex = builtin_pronouns());

// (future markers - past markers) / max(1, future + past).  Future: marker
// tokens plus the bigram "going to"; past: irregular forms plus the -ed
// suffix heuristic (length >= 4).
double tense_balance(std::span<const std::string> tokens,
                     const TenseLexicon& lex = builtin_tense());

// Signed lexicon sum W (a weight flips sign when the previous token is a
// negator) squashed to (-1, 1) as W / sqrt(W^2 + alpha).
double sentiment_score(std::span<const std::string> tokens,
                       const SentimentLexicon& lex = builtin_sentiment());

// (1 + cos(doc, emotional centroid)) / (1 + cos(doc, reasoning centroid)).
// Centroids are embed_document() of the seed lists.  When the document
// embedding has zero norm both cosines are 0 and the score is 1; the flag
// reports that case.
double emotionality(std::span<const std::string> tokens, const Embedder& embedder,
                    const EmotionSeeds& seeds = builtin_emotion_seeds(),
                    bool* zero_norm = nullptr);

// Sum over moral values of mean(virtue hits, vice hits), divided by the
// number of non-stopword tokens.  Zero (with flag) when every token is a
// stopword.
double moral_terminology(std::span<const std::string> tokens,
                         const MoralLexicon& lex = builtin_moral(),
                         const std::unordered_set<std::string>& stopwords = builtin_stopwords(),
                         bool* all_stopwords = nullptr);

// Convenience bundle used by the feature pipeline.
struct FeatureRow {
  double sentiment = 0;
  double emotionality = 0;
  double moral = 0;
  double self_other = 0;
  double tense_balance = 0;
};
FeatureRow compute_features(std::span<const std::string> tokens, const Embedder& embedder);

}  // namespace polrhet::textfeat
