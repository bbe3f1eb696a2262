#include "polrhet/lexicons.hpp"

namespace polrhet::textfeat {

const char* resource_version() { return "builtin-1"; }

const PronounLexicon& builtin_pronouns() {
  static const PronounLexicon lex{
      // first
      {"i", "me", "my", "mine", "myself", "we", "us", "our", "ours", "ourselves",
       "i'm", "i've", "i'll", "i'd", "we're", "we've", "we'll", "we'd"},
      // second
      {"you", "your", "yours", "yourself", "yourselves", "you're", "you've", "you'll", "you'd"},
      // third
      {"he", "him", "his", "himself", "she", "her", "hers", "herself", "they", "them",
       "their", "theirs", "themselves", "it", "its", "itself", "he's", "she's", "they're",
       "they've", "they'll", "they'd", "it's"}};
  return lex;
}

const TenseLexicon& builtin_tense() {
  static const TenseLexicon lex{
      // future markers (single tokens; the bigram "going to" is matched separately)
      {"will", "won't", "shall", "gonna", "i'll", "we'll", "you'll", "he'll", "she'll",
       "they'll", "it'll", "that'll", "there'll"},
      // irregular past forms
      {"was",    "were",   "had",    "did",     "said",  "went",    "got",    "made",
       "knew",   "thought", "took",  "saw",     "came",  "gave",    "found",  "told",
       "became", "left",   "put",    "meant",   "kept",  "began",   "brought", "wrote",
       "stood",  "heard",  "let",    "set",     "met",   "ran",     "paid",   "sat",
       "spoke",  "lay",    "led",    "grew",    "lost",  "fell",    "sent",   "built",
       "understood", "drew", "broke", "spent",  "cut",   "rose",    "drove",  "bought",
       "wore",   "chose",  "ate",    "fought",  "threw", "caught",  "taught", "sold",
       "struck", "felt",   "held",   "read",    "won",   "sought",  "voted"}};
  return lex;
}

const SentimentLexicon& builtin_sentiment() {
  static const SentimentLexicon lex{
      {
          // positive
          {"good", 1.9},     {"great", 3.1},    {"excellent", 2.7}, {"best", 3.2},
          {"love", 3.2},     {"loved", 2.9},    {"happy", 2.7},     {"proud", 2.1},
          {"win", 2.8},      {"winning", 2.4},  {"success", 2.7},   {"successful", 2.6},
          {"strong", 2.3},   {"hope", 1.9},     {"thank", 1.9},     {"thanks", 1.9},
          {"grateful", 3.1}, {"support", 1.7},  {"greatest", 3.2},  {"honor", 2.4},
          {"honored", 2.5},  {"congratulations", 2.9}, {"beautiful", 2.9}, {"smart", 1.7},
          {"safe", 1.9},     {"fair", 2.1},     {"right", 1.5},     {"better", 1.9},
          {"progress", 1.8}, {"prosperity", 2.4},
          // negative
          {"bad", -2.5},     {"terrible", -3.0}, {"horrible", -2.5}, {"worst", -3.1},
          {"hate", -2.7},    {"sad", -2.1},      {"angry", -2.3},    {"fail", -2.5},
          {"failed", -2.3},  {"failure", -2.4},  {"weak", -1.9},     {"corrupt", -3.1},
          {"corruption", -2.9}, {"crisis", -2.4}, {"disaster", -3.1}, {"broken", -2.2},
          {"wrong", -2.1},   {"worse", -2.1},    {"crime", -2.5},    {"illegal", -2.6},
          {"lies", -2.6},    {"lying", -2.7},    {"dishonest", -2.8}, {"dangerous", -2.4},
          {"threat", -2.1},  {"attack", -2.1},   {"killed", -3.5},   {"destroy", -2.9},
          {"destroyed", -2.9}, {"loss", -1.9},
      },
      {"not", "no", "never", "don't", "doesn't", "didn't", "won't", "can't", "isn't",
       "aren't", "wasn't", "weren't", "couldn't", "wouldn't", "shouldn't", "ain't", "cannot"},
      15.0};
  return lex;
}

const MoralLexicon& builtin_moral() {
  static const MoralLexicon lex = [] {
    MoralLexicon m;
    m.value_names = {"care", "fairness", "loyalty", "authority", "sanctity"};
    auto add = [&m](int value, bool virtue, std::initializer_list<const char*> toks) {
      for (const char* t : toks) m.tokens.emplace(t, std::make_pair(value, virtue));
    };
    add(0, true, {"care", "caring", "protect", "protected", "protecting", "compassion",
                  "safe", "safety", "shelter", "nurture"});
    add(0, false, {"harm", "harmed", "hurt", "suffer", "suffering", "cruel", "cruelty",
                   "abuse", "violence", "killed"});
    add(1, true, {"fair", "fairness", "equal", "equality", "justice", "rights", "honest",
                  "impartial", "unbiased", "deserve"});
    add(1, false, {"unfair", "unjust", "cheat", "cheated", "fraud", "discriminate",
                   "discrimination", "bias", "prejudice", "dishonest"});
    add(2, true, {"loyal", "loyalty", "patriot", "patriotic", "unity", "united", "together",
                  "solidarity", "devoted", "ally"});
    add(2, false, {"betray", "betrayal", "traitor", "treason", "disloyal", "desert",
                   "deserted", "abandon", "abandoned", "backstab"});
    add(3, true, {"authority", "obey", "duty", "respect", "lawful", "order", "leadership",
                  "honor", "tradition", "legitimate"});
    add(3, false, {"defy", "defiance", "rebel", "rebellion", "chaos", "lawless", "riot",
                   "disobey", "subvert", "insubordinate"});
    add(4, true, {"sacred", "pure", "purity", "holy", "clean", "wholesome", "decent",
                  "virtuous", "dignity", "sanctity"});
    add(4, false, {"disgust", "disgusting", "filthy", "sick", "profane", "defile",
                   "contaminate", "depraved", "obscene", "degrade"});
    return m;
  }();
  return lex;
}

const EmotionSeeds& builtin_emotion_seeds() {
  static const EmotionSeeds seeds{
      {"afraid", "angry", "anger", "fear", "furious", "outraged", "outrage", "terrified",
       "disgusted", "heartbroken", "devastated", "thrilled", "excited", "ashamed", "proud",
       "scared", "worried", "anxious", "love", "hate"},
      {"think", "thinking", "reason", "reasoning", "because", "therefore", "analyze",
       "analysis", "evidence", "data", "fact", "facts", "logic", "logical", "conclude",
       "consider", "evaluate", "assess", "estimate", "argument"}};
  return seeds;
}

const std::unordered_set<std::string>& builtin_stopwords() {
  static const std::unordered_set<std::string> words{
      "a",     "an",    "the",   "and",  "or",    "but",   "if",    "then",  "else",
      "of",    "at",    "by",    "for",  "with",  "about", "into",  "to",    "from",
      "in",    "on",    "over",  "under", "again", "once",  "here",  "there", "when",
      "where", "why",   "how",   "all",  "any",   "both",  "each",  "few",   "more",
      "most",  "other", "some",  "such", "only",  "own",   "same",  "so",    "than",
      "too",   "very",  "can",   "just", "should", "now",   "is",    "am",    "are",
      "was",   "were",  "be",    "been", "being", "have",  "has",   "had",   "having",
      "do",    "does",  "did",   "doing", "will",  "would", "could", "ought", "i",
      "me",    "my",    "we",    "us",   "our",   "you",   "your",  "he",    "him",
      "his",   "she",   "her",   "it",   "its",   "they",  "them",  "their", "what",
      "which", "who",   "whom",  "this", "that",  "these", "those", "as",    "not",
      "no",    "nor",   "up",    "down", "out",   "off",   "while", "during", "before",
      "after", "above", "below", "between", "through", "until", "against", "further"};
  return words;
}

}  // namespace polrhet::textfeat
