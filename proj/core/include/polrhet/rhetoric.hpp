#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "polrhet/textfeat.hpp"

namespace polrhet::rhetoric {

// Rhetorical style of a document: attribution of credit or blame.
enum class Style : int {
  Blame = -1,
  None = 0,
  Merit = 1,
};

int style_code(Style s);
Style style_from_code(int code);           // throws ValidationError for other ints
const char* style_name(Style s);           // "blame" / "none" / "merit"
Style style_from_name(std::string_view s);

// Combines the two annotation questions.  `tone` is -1, 0, or +1.  A
// document shows Merit when it is causal with positive tone, Blame when
// causal with negative tone, and None otherwise (including causal-neutral).
Style synthesize_style(bool causal, int tone);

// True for Blame and Merit.
bool causal_indicator(Style s);

struct ClassProbabilities {
  double blame = 0;
  double merit = 0;
  double none = 0;
};

struct Classification {
  Style style;
  bool ambiguous;  // top-two probabilities within tie_epsilon
};

// Argmax over class probabilities.  If the two largest probabilities are
// within tie_epsilon of each other the call refuses to pick a side:
// the result is None with ambiguous = true.
Classification classify(const ClassProbabilities& p, double tie_epsilon = 1e-9);

// ---------------------------------------------------------------------------
// Baseline text classifier: multinomial logistic regression on unigram and
// bigram counts, trained with full-batch gradient descent from zero-
// initialized weights.  Deterministic for a fixed configuration and input
// order.

struct TrainConfig {
  double l2 = 1e-4;           // ridge penalty on non-intercept weights
  double learning_rate = 0.5;
  int epochs = 300;
  long min_token_count = 1;   // vocabulary threshold over training docs
};

struct BaselineModel {
  std::vector<std::string> vocabulary;  // unigrams and "a b" bigrams
  std::unordered_map<std::string, int32_t> vocab_index;
  std::vector<int> class_codes;         // sorted style codes seen in training
  // n_classes x (vocabulary + 1); the last column is the intercept.
  Eigen::MatrixXd weights;
  TrainConfig config;
  double final_loss = 0;
};

// Featurized documents ready for the optimizer; exposed so the loss and
// gradient can be checked independently.
struct BaselineDataset {
  std::vector<std::vector<std::pair<int32_t, double>>> rows;  // (feature, count)
  std::vector<int32_t> labels;                                // class indices
  size_t n_features = 0;  // without intercept
  size_t n_classes = 0;
};

BaselineDataset featurize(std::span<const textfeat::TokenizedDoc> docs,
                          std::span<const Style> gold, const BaselineModel& model);

// Mean cross-entropy plus (l2/2) * squared non-intercept weights; writes the
// gradient (same shape as weights) when grad is non-null.
double loss_and_gradient(const BaselineDataset& data, const Eigen::MatrixXd& weights,
                         double l2, Eigen::MatrixXd* grad);

BaselineModel train_baseline(std::span<const textfeat::TokenizedDoc> docs,
                             std::span<const Style> gold, const TrainConfig& config = {});

ClassProbabilities predict_baseline(const BaselineModel& model,
                                    const textfeat::TokenizedDoc& doc);

// Provenance entries are written as "meta" lines; readers skip them.
void save_model(const std::filesystem::path& path, const BaselineModel& model,
                const std::map<std::string, std::string>& provenance = {});
BaselineModel load_model(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Evaluation.

struct EvalReport {
  double accuracy = 0;
  double macro_f1 = 0;
  double mcc = 0;  // multiclass Matthews correlation from the confusion matrix
  // Confusion counts indexed [gold][pred] over kStyleOrder = blame,none,merit.
  long confusion[3][3] = {};
  // Classes absent from both gold and predictions are excluded from the
  // macro-F1 average; their names are listed here.
  std::vector<std::string> f1_excluded;
};

inline constexpr Style kStyleOrder[3] = {Style::Blame, Style::None, Style::Merit};

EvalReport evaluate(std::span<const Style> predicted, std::span<const Style> gold);

// ---------------------------------------------------------------------------
// Externally produced per-document class probabilities.
//
// File schema: doc_id:string, p_blame:real, p_merit:real, p_none:real.
// Rows must have non-negative entries summing to 1 within 1e-6; conforming
// rows are renormalized to sum exactly 1.  Violations, duplicate ids, and
// (when a universe is supplied) unknown ids raise ValidationError.

struct ProbIngestReport {
  size_t rows_read = 0;
  size_t renormalized = 0;  // rows whose sum differed from 1 at all
};

std::map<std::string, ClassProbabilities> ingest_probabilities(
    const std::filesystem::path& path, const std::set<std::string>* known_ids = nullptr,
    ProbIngestReport* report = nullptr);

void write_probabilities(const std::filesystem::path& path,
                         const std::vector<std::pair<std::string, ClassProbabilities>>& rows,
                         const std::map<std::string, std::string>& provenance = {});

}  // namespace polrhet::rhetoric
