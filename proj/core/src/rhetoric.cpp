#include "polrhet/rhetoric.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "polrhet/errors.hpp"
#include "polrhet/io.hpp"

namespace polrhet::rhetoric {

int style_code(Style s) { return int(s); }

Style style_from_code(int code) {
  if (code < -1 || code > 1) throw ValidationError("bad style code " + std::to_string(code));
  return Style(code);
}

const char* style_name(Style s) {
  switch (s) {
    case Style::Blame: return "blame";
    case Style::Merit: return "merit";
    case Style::None: return "none";
  }
  throw ValidationError("bad style value");
}

Style style_from_name(std::string_view s) {
  if (s == "blame") return Style::Blame;
  if (s == "merit") return Style::Merit;
  if (s == "none") return Style::None;
  throw ValidationError("bad style name '" + std::string(s) + "'");
}

Style synthesize_style(bool causal, int tone) {
  if (tone < -1 || tone > 1) throw ValidationError("tone must be -1, 0, or +1");
  if (!causal || tone == 0) return Style::None;
  return tone < 0 ? Style::Blame : Style::Merit;
}

bool causal_indicator(Style s) { return s != Style::None; }

Classification classify(const ClassProbabilities& p, double tie_epsilon) {
  struct Entry {
    double prob;
    Style style;
  };
  Entry entries[3] = {{p.blame, Style::Blame}, {p.none, Style::None}, {p.merit, Style::Merit}};
  std::sort(std::begin(entries), std::end(entries),
            [](const Entry& a, const Entry& b) { return a.prob > b.prob; });
  if (entries[0].prob - entries[1].prob <= tie_epsilon) return {Style::None, true};
  return {entries[0].style, false};
}

// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> doc_features(const textfeat::TokenizedDoc& doc) {
  std::vector<std::string> feats(doc.tokens.begin(), doc.tokens.end());
  auto bg = textfeat::bigrams(doc.tokens);
  feats.insert(feats.end(), bg.begin(), bg.end());
  return feats;
}

int32_t class_index(const std::vector<int>& class_codes, Style s) {
  auto it = std::lower_bound(class_codes.begin(), class_codes.end(), style_code(s));
  if (it == class_codes.end() || *it != style_code(s))
    throw ValidationError("label " + std::string(style_name(s)) + " not seen in training");
  return int32_t(it - class_codes.begin());
}

}  // namespace

BaselineDataset featurize(std::span<const textfeat::TokenizedDoc> docs,
                          std::span<const Style> gold, const BaselineModel& model) {
  if (docs.size() != gold.size()) throw ValidationError("featurize: label count mismatch");
  BaselineDataset data;
  data.n_features = model.vocabulary.size();
  data.n_classes = model.class_codes.size();
  data.rows.reserve(docs.size());
  data.labels.reserve(docs.size());
  std::unordered_map<int32_t, double> counts;
  for (size_t i = 0; i < docs.size(); ++i) {
    counts.clear();
    for (const auto& f : doc_features(docs[i])) {
      auto it = model.vocab_index.find(f);
      if (it != model.vocab_index.end()) counts[it->second] += 1.0;
    }
    std::vector<std::pair<int32_t, double>> row(counts.begin(), counts.end());
    std::sort(row.begin(), row.end());
    data.rows.push_back(std::move(row));
    data.labels.push_back(class_index(model.class_codes, gold[i]));
  }
  return data;
}

double loss_and_gradient(const BaselineDataset& data, const Eigen::MatrixXd& weights,
                         double l2, Eigen::MatrixXd* grad) {
  const auto K = Eigen::Index(data.n_classes);
  const auto V = Eigen::Index(data.n_features);
  if (weights.rows() != K || weights.cols() != V + 1)
    throw ValidationError("loss_and_gradient: weight shape mismatch");
  if (grad) grad->setZero(K, V + 1);

  const size_t n = data.rows.size();
  double loss = 0.0;
  Eigen::VectorXd scores(K), probs(K);
  for (size_t i = 0; i < n; ++i) {
    scores = weights.col(V);  // intercept
    for (const auto& [f, v] : data.rows[i]) scores += weights.col(f) * v;
    double max_score = scores.maxCoeff();
    probs = (scores.array() - max_score).exp();
    double z = probs.sum();
    probs /= z;
    loss -= std::log(std::max(probs[data.labels[i]], 1e-300));
    if (grad) {
      probs[data.labels[i]] -= 1.0;
      for (const auto& [f, v] : data.rows[i]) grad->col(f) += probs * v;
      grad->col(V) += probs;
    }
  }
  loss /= double(n);
  if (grad) *grad /= double(n);
  if (l2 > 0.0) {
    loss += 0.5 * l2 * weights.leftCols(V).squaredNorm();
    if (grad) grad->leftCols(V) += l2 * weights.leftCols(V);
  }
  return loss;
}

BaselineModel train_baseline(std::span<const textfeat::TokenizedDoc> docs,
                             std::span<const Style> gold, const TrainConfig& config) {
  if (docs.empty()) throw ValidationError("train_baseline: no documents");
  if (docs.size() != gold.size()) throw ValidationError("train_baseline: label count mismatch");

  BaselineModel model;
  model.config = config;

  std::unordered_map<std::string, long> counts;
  for (const auto& doc : docs)
    for (auto& f : doc_features(doc)) counts[f] += 1;
  for (const auto& [f, c] : counts)
    if (c >= config.min_token_count) model.vocabulary.push_back(f);
  // Lexicographic vocabulary order keeps training independent of hash-map
  // iteration order.
  std::sort(model.vocabulary.begin(), model.vocabulary.end());
  for (size_t i = 0; i < model.vocabulary.size(); ++i)
    model.vocab_index.emplace(model.vocabulary[i], int32_t(i));

  std::vector<int> codes;
  for (Style s : gold) codes.push_back(style_code(s));
  std::sort(codes.begin(), codes.end());
  codes.erase(std::unique(codes.begin(), codes.end()), codes.end());
  if (codes.size() < 2) throw ConfigError("train_baseline: need at least two classes");
  model.class_codes = codes;

  BaselineDataset data = featurize(docs, gold, model);
  const auto K = Eigen::Index(data.n_classes);
  const auto V = Eigen::Index(data.n_features);
  model.weights.setZero(K, V + 1);
  Eigen::MatrixXd grad(K, V + 1);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    model.final_loss = loss_and_gradient(data, model.weights, config.l2, &grad);
    model.weights -= config.learning_rate * grad;
  }
  model.final_loss = loss_and_gradient(data, model.weights, config.l2, nullptr);
  return model;
}

ClassProbabilities predict_baseline(const BaselineModel& model,
                                    const textfeat::TokenizedDoc& doc) {
  const auto K = Eigen::Index(model.class_codes.size());
  const auto V = Eigen::Index(model.vocabulary.size());
  Eigen::VectorXd scores = model.weights.col(V);
  std::unordered_map<int32_t, double> counts;
  for (const auto& f : doc_features(doc)) {
    auto it = model.vocab_index.find(f);
    if (it != model.vocab_index.end()) counts[it->second] += 1.0;
  }
  for (const auto& [f, v] : counts) scores += model.weights.col(f) * v;
  Eigen::VectorXd probs = (scores.array() - scores.maxCoeff()).exp();
  probs /= probs.sum();
  ClassProbabilities out;
  for (Eigen::Index k = 0; k < K; ++k) {
    switch (model.class_codes[size_t(k)]) {
      case -1: out.blame = probs[k]; break;
      case 0: out.none = probs[k]; break;
      case 1: out.merit = probs[k]; break;
      default: throw ValidationError("bad class code in model");
    }
  }
  return out;
}

void save_model(const std::filesystem::path& path, const BaselineModel& model,
                const std::map<std::string, std::string>& provenance) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SchemaError("cannot write '" + path.string() + "'");
  out << "baseline-model\t1\n";
  for (const auto& [key, value] : provenance)
    out << "meta\t" << escape_field(key) << '\t' << escape_field(value) << '\n';
  out << "classes";
  for (int c : model.class_codes) out << '\t' << c;
  out << '\n';
  out << "config\t" << format_real(model.config.l2) << '\t'
      << format_real(model.config.learning_rate) << '\t' << model.config.epochs << '\t'
      << model.config.min_token_count << '\n';
  out << "loss\t" << format_real(model.final_loss) << '\n';
  out << "intercept";
  for (Eigen::Index k = 0; k < model.weights.rows(); ++k)
    out << '\t' << format_real(model.weights(k, model.weights.cols() - 1));
  out << '\n';
  for (size_t f = 0; f < model.vocabulary.size(); ++f) {
    out << "w\t" << escape_field(model.vocabulary[f]);
    for (Eigen::Index k = 0; k < model.weights.rows(); ++k)
      out << '\t' << format_real(model.weights(k, Eigen::Index(f)));
    out << '\n';
  }
  if (!out) throw SchemaError("write failed for '" + path.string() + "'");
}

BaselineModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line) || line != "baseline-model\t1")
    throw SchemaError("'" + path.string() + "' is not a version-1 model file");

  BaselineModel model;
  std::vector<std::vector<double>> feature_weights;
  std::vector<double> intercept;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    size_t start = 0;
    while (true) {
      size_t tab = line.find('\t', start);
      cells.push_back(line.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    const std::string& tag = cells[0];
    if (tag == "classes") {
      for (size_t i = 1; i < cells.size(); ++i)
        model.class_codes.push_back(int(parse_int(cells[i], "classes")));
    } else if (tag == "config") {
      if (cells.size() != 5) throw SchemaError("bad config line in model file");
      model.config.l2 = parse_real(cells[1], "config");
      model.config.learning_rate = parse_real(cells[2], "config");
      model.config.epochs = int(parse_int(cells[3], "config"));
      model.config.min_token_count = parse_int(cells[4], "config");
    } else if (tag == "loss") {
      model.final_loss = parse_real(cells[1], "loss");
    } else if (tag == "intercept") {
      for (size_t i = 1; i < cells.size(); ++i)
        intercept.push_back(parse_real(cells[i], "intercept"));
    } else if (tag == "meta") {
      // provenance; not part of the model
    } else if (tag == "w") {
      if (cells.size() < 3) throw SchemaError("bad weight line in model file");
      model.vocabulary.push_back(unescape_field(cells[1]));
      std::vector<double> w;
      for (size_t i = 2; i < cells.size(); ++i) w.push_back(parse_real(cells[i], "w"));
      feature_weights.push_back(std::move(w));
    } else {
      throw SchemaError("unknown line tag '" + tag + "' in model file");
    }
  }
  size_t K = model.class_codes.size();
  if (K < 2 || intercept.size() != K) throw SchemaError("model file lacks classes/intercept");
  model.weights.setZero(Eigen::Index(K), Eigen::Index(model.vocabulary.size() + 1));
  for (size_t f = 0; f < feature_weights.size(); ++f) {
    if (feature_weights[f].size() != K) throw SchemaError("ragged weight line in model file");
    for (size_t k = 0; k < K; ++k) model.weights(Eigen::Index(k), Eigen::Index(f)) = feature_weights[f][k];
    model.vocab_index.emplace(model.vocabulary[f], int32_t(f));
  }
  for (size_t k = 0; k < K; ++k)
    model.weights(Eigen::Index(k), model.weights.cols() - 1) = intercept[k];
  return model;
}

// ---------------------------------------------------------------------------

EvalReport evaluate(std::span<const Style> predicted, std::span<const Style> gold) {
  if (predicted.size() != gold.size() || gold.empty())
    throw ValidationError("evaluate: prediction/gold size mismatch or empty");
  EvalReport report;
  auto idx = [](Style s) { return size_t(style_code(s) + 1); };  // blame,none,merit -> 0,1,2
  for (size_t i = 0; i < gold.size(); ++i) report.confusion[idx(gold[i])][idx(predicted[i])] += 1;

  double total = double(gold.size());
  long diag = 0;
  for (int k = 0; k < 3; ++k) diag += report.confusion[k][k];
  report.accuracy = double(diag) / total;

  double f1_sum = 0.0;
  int f1_classes = 0;
  for (int k = 0; k < 3; ++k) {
    long tp = report.confusion[k][k];
    long fn = -tp, fp = -tp;
    for (int j = 0; j < 3; ++j) {
      fn += report.confusion[k][j];
      fp += report.confusion[j][k];
    }
    if (tp + fp + fn == 0) {
      report.f1_excluded.push_back(style_name(kStyleOrder[k]));
      continue;
    }
    f1_sum += 2.0 * double(tp) / double(2 * tp + fp + fn);
    ++f1_classes;
  }
  report.macro_f1 = f1_classes > 0 ? f1_sum / double(f1_classes) : 0.0;

  // Multiclass Matthews correlation from confusion counts.
  double c = double(diag), s = total;
  double sum_tp = 0, sum_pp = 0, sum_tt = 0;
  for (int k = 0; k < 3; ++k) {
    double t_k = 0, p_k = 0;
    for (int j = 0; j < 3; ++j) {
      t_k += report.confusion[k][j];
      p_k += report.confusion[j][k];
    }
    sum_tp += t_k * p_k;
    sum_pp += p_k * p_k;
    sum_tt += t_k * t_k;
  }
  double denom = std::sqrt((s * s - sum_pp) * (s * s - sum_tt));
  report.mcc = denom == 0.0 ? 0.0 : (c * s - sum_tp) / denom;
  return report;
}

// ---------------------------------------------------------------------------

std::map<std::string, ClassProbabilities> ingest_probabilities(
    const std::filesystem::path& path, const std::set<std::string>* known_ids,
    ProbIngestReport* report) {
  TableFile file = read_table_file(path);
  size_t id_col = file.column("doc_id");
  size_t blame_col = file.column("p_blame");
  size_t merit_col = file.column("p_merit");
  size_t none_col = file.column("p_none");

  std::map<std::string, ClassProbabilities> out;
  ProbIngestReport local;
  for (size_t r = 0; r < file.rows.size(); ++r) {
    const auto& row = file.rows[r];
    ++local.rows_read;
    const std::string& id = row[id_col];
    ClassProbabilities p;
    p.blame = parse_real(row[blame_col], "p_blame");
    p.merit = parse_real(row[merit_col], "p_merit");
    p.none = parse_real(row[none_col], "p_none");
    if (p.blame < 0 || p.merit < 0 || p.none < 0)
      throw ValidationError("row " + std::to_string(r + 1) + " (doc " + id +
                            "): negative probability");
    double sum = p.blame + p.merit + p.none;
    if (std::abs(sum - 1.0) > 1e-6)
      throw ValidationError("row " + std::to_string(r + 1) + " (doc " + id +
                            "): probabilities sum to " + format_real(sum));
    if (sum != 1.0) {
      p.blame /= sum;
      p.merit /= sum;
      p.none /= sum;
      ++local.renormalized;
    }
    if (known_ids && !known_ids->count(id))
      throw ValidationError("row " + std::to_string(r + 1) + ": unknown doc id '" + id + "'");
    if (!out.emplace(id, p).second)
      throw ValidationError("duplicate doc id '" + id + "'");
  }
  if (report) *report = local;
  return out;
}

void write_probabilities(const std::filesystem::path& path,
                         const std::vector<std::pair<std::string, ClassProbabilities>>& rows,
                         const std::map<std::string, std::string>& provenance) {
  TableFile file;
  file.schema = {{"doc_id", "string"}, {"p_blame", "real"}, {"p_merit", "real"}, {"p_none", "real"}};
  file.provenance = provenance;
  file.rows.reserve(rows.size());
  for (const auto& [id, p] : rows)
    file.rows.push_back({id, format_real(p.blame), format_real(p.merit), format_real(p.none)});
  write_table_file(path, file);
}

}  // namespace polrhet::rhetoric
