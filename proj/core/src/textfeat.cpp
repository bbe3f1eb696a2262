#include "polrhet/textfeat.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <unordered_map>

#include "polrhet/errors.hpp"

namespace polrhet::textfeat {

namespace {

bool is_word_char(unsigned char c) {
  // Bytes >= 0x80 are UTF-8 continuation/lead bytes; pass them through so
  // non-ASCII words survive.
  return std::isalnum(c) || c >= 0x80;
}

bool starts_with_ci(std::string_view s, std::string_view prefix) {
  if (s.size() < prefix.size()) return false;
  for (size_t i = 0; i < prefix.size(); ++i)
    if (std::tolower((unsigned char)s[i]) != prefix[i]) return false;
  return true;
}

bool is_url_token(std::string_view raw) {
  if (starts_with_ci(raw, "http://") || starts_with_ci(raw, "https://") ||
      starts_with_ci(raw, "www."))
    return true;
  // The literal placeholder some corpora substitute for links.
  std::string_view body = raw;
  while (!body.empty() && !is_word_char((unsigned char)body.back())) body.remove_suffix(1);
  return body == "URL";
}

// Lowercases and strips punctuation, keeping apostrophes flanked by word
// characters on both sides.  The U+2019 sequence (0xe2 0x80 0x99) counts as
// an apostrophe; other three-byte 0xe2 0x80 sequences are General
// Punctuation (curly quotes, dashes) and are stripped.  This block must be
// handled before the generic word-char test, which passes bytes >= 0x80.
std::string clean_token(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  for (size_t i = 0; i < raw.size(); ++i) {
    unsigned char c = (unsigned char)raw[i];
    if (c == 0xe2 && i + 2 < raw.size() && (unsigned char)raw[i + 1] == 0x80) {
      if ((unsigned char)raw[i + 2] == 0x99 && i > 0 && i + 3 < raw.size() &&
          is_word_char((unsigned char)raw[i - 1]) && is_word_char((unsigned char)raw[i + 3])) {
        out += '\'';
      }
      i += 2;
      continue;
    }
    if (is_word_char(c)) {
      out += char(std::tolower(c));
    } else if (c == '\'' && i > 0 && i + 1 < raw.size() &&
               is_word_char((unsigned char)raw[i - 1]) &&
               is_word_char((unsigned char)raw[i + 1])) {
      out += '\'';
    }
  }
  return out;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace((unsigned char)text[i])) ++i;
    size_t start = i;
    while (i < text.size() && !std::isspace((unsigned char)text[i])) ++i;
    if (i == start) break;
    std::string_view raw = text.substr(start, i - start);
    if (is_url_token(raw)) {
      tokens.emplace_back("<url>");
      continue;
    }
    if (raw.size() > 1 && raw[0] == '@') {
      tokens.emplace_back("<user>");
      continue;
    }
    if (raw.size() > 1 && raw[0] == '#') raw.remove_prefix(1);
    std::string tok = clean_token(raw);
    if (!tok.empty()) tokens.push_back(std::move(tok));
  }
  return tokens;
}

std::vector<std::string> bigrams(std::span<const std::string> tokens) {
  std::vector<std::string> out;
  if (tokens.size() < 2) return out;
  out.reserve(tokens.size() - 1);
  for (size_t i = 0; i + 1 < tokens.size(); ++i) out.push_back(tokens[i] + ' ' + tokens[i + 1]);
  return out;
}

std::vector<BigramScore> distinctive_bigrams(std::span<const TokenizedDoc> docs,
                                             std::span<const char> in_class,
                                             long min_doc_count) {
  if (docs.size() != in_class.size())
    throw ValidationError("distinctive_bigrams: class mask length mismatch");
  long n_in = 0;
  for (char c : in_class) n_in += (c != 0);
  long n_out = long(docs.size()) - n_in;

  // Document frequency per bigram, split by class.
  std::unordered_map<std::string, std::pair<long, long>> freq;
  std::vector<std::string> doc_bigrams;
  for (size_t d = 0; d < docs.size(); ++d) {
    doc_bigrams = bigrams(docs[d].tokens);
    std::sort(doc_bigrams.begin(), doc_bigrams.end());
    doc_bigrams.erase(std::unique(doc_bigrams.begin(), doc_bigrams.end()), doc_bigrams.end());
    for (auto& bg : doc_bigrams) {
      auto& counts = freq[bg];
      (in_class[d] ? counts.first : counts.second) += 1;
    }
  }

  std::vector<BigramScore> out;
  out.reserve(freq.size());
  for (const auto& [bg, counts] : freq) {
    auto [a, c] = counts;  // in-class present, out-class present
    if (a + c < min_doc_count) continue;
    long b = n_in - a;   // in-class absent
    long d = n_out - c;  // out-class absent
    double denom = double(a + b) * double(c + d) * double(a + c) * double(b + d);
    double score = denom <= 0.0 ? 0.0
                                : (double(a) * double(d) - double(b) * double(c)) /
                                      std::sqrt(denom);
    out.push_back({bg, score, a, c});
  }
  std::sort(out.begin(), out.end(), [](const BigramScore& x, const BigramScore& y) {
    if (x.score != y.score) return x.score > y.score;
    return x.bigram < y.bigram;
  });
  return out;
}

double self_other_score(std::span<const std::string> tokens, const PronounLexicon& lex) {
  long first = 0, other = 0;
  for (const auto& tok : tokens) {
    if (lex.first.count(tok)) ++first;
    else if (lex.second.count(tok) || lex.third.count(tok)) ++other;
  }
  return double(other - first) / double(std::max<long>(1, first + other));
}

double tense_balance(std::span<const std::string> tokens, const TenseLexicon& lex) {
  long future = 0, past = 0;
  for (size_t i = 0; i < tokens.size(); ++i) {
    const std::string& tok = tokens[i];
    if (lex.future_markers.count(tok) ||
        (tok == "going" && i + 1 < tokens.size() && tokens[i + 1] == "to")) {
      ++future;
      continue;
    }
    if (lex.irregular_past.count(tok) ||
        (tok.size() >= 4 && tok.compare(tok.size() - 2, 2, "ed") == 0)) {
      ++past;
    }
  }
  return double(future - past) / double(std::max<long>(1, future + past));
}

double sentiment_score(std::span<const std::string> tokens, const SentimentLexicon& lex) {
  double W = 0.0;
  for (size_t i = 0; i < tokens.size(); ++i) {
    auto it = lex.weights.find(tokens[i]);
    if (it == lex.weights.end()) continue;
    bool negated = i > 0 && lex.negators.count(tokens[i - 1]) > 0;
    W += negated ? -it->second : it->second;
  }
  return W / std::sqrt(W * W + lex.alpha);
}

double emotionality(std::span<const std::string> tokens, const Embedder& embedder,
                    const EmotionSeeds& seeds, bool* zero_norm) {
  std::vector<std::string> toks(tokens.begin(), tokens.end());
  SparseVec doc = embedder.embed_document(toks);
  SparseVec emo = embedder.embed_document(seeds.emotional);
  SparseVec reason = embedder.embed_document(seeds.reasoning);
  bool dz = false;
  double ce = cosine(doc, emo, &dz);
  double cr = cosine(doc, reason);
  if (zero_norm) *zero_norm = dz;
  return (1.0 + ce) / (1.0 + cr);
}

double moral_terminology(std::span<const std::string> tokens, const MoralLexicon& lex,
                         const std::unordered_set<std::string>& stopwords,
                         bool* all_stopwords) {
  std::vector<std::pair<long, long>> hits(lex.value_names.size(), {0, 0});
  long content_tokens = 0;
  for (const auto& tok : tokens) {
    if (!stopwords.count(tok)) ++content_tokens;
    auto it = lex.tokens.find(tok);
    if (it == lex.tokens.end()) continue;
    auto [value, virtue] = it->second;
    (virtue ? hits[size_t(value)].first : hits[size_t(value)].second) += 1;
  }
  if (all_stopwords) *all_stopwords = !tokens.empty() && content_tokens == 0;
  if (content_tokens == 0) return 0.0;
  double total = 0.0;
  for (const auto& [virtue, vice] : hits) total += 0.5 * (double(virtue) + double(vice));
  return total / double(content_tokens);
}

FeatureRow compute_features(std::span<const std::string> tokens, const Embedder& embedder) {
  FeatureRow row;
  row.sentiment = sentiment_score(tokens);
  row.emotionality = emotionality(tokens, embedder);
  row.moral = moral_terminology(tokens);
  row.self_other = self_other_score(tokens);
  row.tense_balance = tense_balance(tokens);
  return row;
}

}  // namespace polrhet::textfeat
