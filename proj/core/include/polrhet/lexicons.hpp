#pragma once

#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace polrhet::textfeat {

// Compiled-in word lists.  Each accessor returns a process-lifetime constant;
// resource_version() identifies the shipped revision so downstream outputs
// can record which lists produced them.

const char* resource_version();

struct PronounLexicon {
  std::unordered_set<std::string> first;   // singular + plural
  std::unordered_set<std::string> second;
  std::unordered_set<std::string> third;
  bool is_pronoun(const std::string& tok) const {
    return first.count(tok) || second.count(tok) || third.count(tok);
  }
};
const PronounLexicon& builtin_pronouns();

struct TenseLexicon {
  std::unordered_set<std::string> future_markers;  // single tokens
  std::unordered_set<std::string> irregular_past;
  // Regular past is matched by the "-ed" suffix heuristic (length >= 4).
};
const TenseLexicon& builtin_tense();

struct SentimentLexicon {
  std::unordered_map<std::string, double> weights;
  std::unordered_set<std::string> negators;
  double alpha = 15.0;  // normalization constant in W / sqrt(W^2 + alpha)
};
const SentimentLexicon& builtin_sentiment();

struct MoralLexicon {
  std::vector<std::string> value_names;
  // token -> (value index, true when the token expresses the virtue pole)
  std::unordered_map<std::string, std::pair<int, bool>> tokens;
};
const MoralLexicon& builtin_moral();

struct EmotionSeeds {
  std::vector<std::string> emotional;
  std::vector<std::string> reasoning;
};
const EmotionSeeds& builtin_emotion_seeds();

const std::unordered_set<std::string>& builtin_stopwords();

}  // namespace polrhet::textfeat
