// polrhet: command-line driver for the causal-rhetoric pipeline.
//
// Commands compose through flat files: each one reads its declared inputs,
// writes its declared outputs, and never mutates anything it read.  Every
// output file carries the invocation's config hash and seed so downstream
// artifacts can be traced to the exact configuration that produced them.
// Runtime failures print a one-line JSON error report to stderr.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "polrhet/annotation.hpp"
#include "polrhet/corpus.hpp"
#include "polrhet/dates.hpp"
#include "polrhet/econest.hpp"
#include "polrhet/embedding.hpp"
#include "polrhet/errors.hpp"
#include "polrhet/io.hpp"
#include "polrhet/panelize.hpp"
#include "polrhet/persuasion.hpp"
#include "polrhet/rhetoric.hpp"
#include "polrhet/rng.hpp"
#include "polrhet/synth.hpp"
#include "polrhet/table.hpp"
#include "polrhet/textfeat.hpp"

namespace {

using namespace polrhet;
using nlohmann::json;

constexpr const char* kToolVersion = "polrhet 0.1.0";

// Canonical digest of a parsed command line: the command path plus every
// option that received values, in declaration order.
uint64_t config_hash_of(const std::string& command, const CLI::App* cmd) {
  std::string canon = command;
  for (const CLI::Option* opt : cmd->get_options()) {
    if (opt->results().empty()) continue;
    canon += '\n';
    canon += opt->get_name();
    canon += '=';
    bool first = true;
    for (const auto& r : opt->results()) {
      if (!first) canon += '\x1f';
      canon += r;
      first = false;
    }
  }
  return fnv1a64(canon);
}

std::map<std::string, std::string> provenance_for(const std::string& command,
                                                  const CLI::App* cmd, uint64_t seed) {
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx",
                static_cast<unsigned long long>(config_hash_of(command, cmd)));
  return {{"tool", kToolVersion},
          {"command", command},
          {"config_hash", hash},
          {"seed", std::to_string(seed)}};
}

std::vector<std::pair<std::string, std::string>> kv_with_provenance(
    const std::map<std::string, std::string>& provenance,
    std::vector<std::pair<std::string, std::string>> entries) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [k, v] : provenance) out.emplace_back("provenance." + k, v);
  for (auto& e : entries) out.push_back(std::move(e));
  return out;
}

// Canonical tweet files as written by `ingest` and `synth corpus`.
std::vector<corpus::Tweet> read_canonical_tweets(const std::filesystem::path& path) {
  corpus::TweetSchema schema;
  schema.politician = "politician";
  schema.retweet_count = "retweet_count";
  schema.is_retweet = "is_retweet";
  schema.is_quote = "is_quote";
  return corpus::ingest_tweets(path, schema);
}

std::vector<textfeat::TokenizedDoc> tokenize_tweets(std::span<const corpus::Tweet> tweets) {
  std::vector<textfeat::TokenizedDoc> docs;
  docs.reserve(tweets.size());
  for (const auto& t : tweets) docs.push_back({t.id, textfeat::tokenize(t.text)});
  return docs;
}

// Label files: doc_id + style name per row (extra columns are ignored, so
// classifier outputs work directly).
std::unordered_map<std::string, rhetoric::Style> read_labels(const std::filesystem::path& path) {
  TableFile file = read_table_file(path);
  size_t idc = file.column("doc_id"), sc = file.column("style");
  std::unordered_map<std::string, rhetoric::Style> out;
  out.reserve(file.rows.size());
  for (const auto& row : file.rows) {
    if (!out.emplace(row[idc], rhetoric::style_from_name(row[sc])).second)
      throw ValidationError("duplicate doc_id '" + row[idc] + "' in '" + path.string() + "'");
  }
  return out;
}

void write_labels(const std::filesystem::path& path,
                  std::span<const std::string> ids, std::span<const rhetoric::Style> styles,
                  const std::map<std::string, std::string>& provenance) {
  TableFile file;
  file.schema = {{"doc_id", "string"}, {"style", "string"}};
  file.provenance = provenance;
  for (size_t i = 0; i < ids.size(); ++i)
    file.rows.push_back({ids[i], rhetoric::style_name(styles[i])});
  write_table_file(path, file);
}

// Styles aligned with a tweet span; every tweet must be labeled.
std::vector<rhetoric::Style> align_labels(
    std::span<const corpus::Tweet> tweets,
    const std::unordered_map<std::string, rhetoric::Style>& labels) {
  std::vector<rhetoric::Style> styles;
  styles.reserve(tweets.size());
  size_t missing = 0;
  for (const auto& t : tweets) {
    auto it = labels.find(t.id);
    if (it == labels.end()) {
      ++missing;
      styles.push_back(rhetoric::Style::None);
    } else {
      styles.push_back(it->second);
    }
  }
  if (missing > 0)
    throw ValidationError(std::to_string(missing) + " tweets have no label");
  return styles;
}

void emit(const json& report) { std::cout << report.dump() << "\n"; }

// ---------------------------------------------------------------------------
// ingest

struct IngestArgs {
  std::string input, output, config, politician_col = "politician_id";
};

corpus::TweetSchema schema_from_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  json j = json::parse(in, nullptr, true, true);
  corpus::TweetSchema schema;
  schema.politician.clear();
  for (const auto& [key, value] : j.items()) {
    if (key == "id") schema.id = value.get<std::string>();
    else if (key == "politician") schema.politician = value.get<std::string>();
    else if (key == "account") schema.account = value.get<std::string>();
    else if (key == "timestamp") schema.timestamp = value.get<std::string>();
    else if (key == "text") schema.text = value.get<std::string>();
    else if (key == "retweet_count") schema.retweet_count = value.get<std::string>();
    else if (key == "is_retweet") schema.is_retweet = value.get<std::string>();
    else if (key == "is_quote") schema.is_quote = value.get<std::string>();
    else if (key == "account_map") {
      for (const auto& [acct, pol] : value.items())
        schema.account_to_politician[acct] = pol.get<std::string>();
    } else {
      throw ConfigError("unknown ingest config field '" + key + "'");
    }
  }
  return schema;
}

void run_ingest(const IngestArgs& args, const CLI::App* cmd) {
  corpus::TweetSchema schema;
  if (!args.config.empty()) {
    schema = schema_from_config(args.config);
  } else {
    schema.politician = args.politician_col;
  }
  corpus::IngestReport report;
  auto tweets = corpus::ingest_tweets(args.input, schema, &report);
  corpus::write_tweets(args.output, tweets, provenance_for("ingest", cmd, 0));
  emit(json{{"rows_read", report.rows_read},
            {"kept", tweets.size()},
            {"malformed_dropped", report.malformed_dropped},
            {"retweets_dropped", report.retweets_dropped},
            {"unmatched_dropped", report.unmatched_dropped},
            {"output", args.output}});
}

// ---------------------------------------------------------------------------
// sample

struct SampleArgs {
  std::string tweets, benchmarks, output;
  size_t n = 1000;
  double similar_fraction = 0.5;
  uint64_t seed = 1;
};

void run_sample(const SampleArgs& args, const CLI::App* cmd) {
  auto tweets = read_canonical_tweets(args.tweets);
  TableFile bench_file = read_table_file(args.benchmarks);
  size_t tc = bench_file.column("text"), pc = bench_file.column("party"),
         sc = bench_file.column("style");
  std::vector<annotation::Benchmark> benchmarks;
  benchmarks.reserve(bench_file.rows.size());
  for (const auto& row : bench_file.rows) benchmarks.push_back({row[tc], row[pc], row[sc]});

  annotation::SampleConfig config;
  config.n = args.n;
  config.similar_fraction = args.similar_fraction;
  config.seed = args.seed;
  HashedEmbedder embedder;
  auto ids = annotation::sample_for_annotation(tweets, benchmarks, embedder, config);

  TableFile out;
  out.schema = {{"doc_id", "string"}};
  out.provenance = provenance_for("sample", cmd, args.seed);
  for (const auto& id : ids) out.rows.push_back({id});
  write_table_file(args.output, out);
  emit(json{{"selected", ids.size()}, {"output", args.output}});
}

// ---------------------------------------------------------------------------
// agreement

struct AgreementArgs {
  std::string annotations, output, labels_out;
  uint64_t seed = 1;
};

void run_agreement(const AgreementArgs& args, const CLI::App* cmd) {
  auto records = annotation::read_annotations(args.annotations);
  auto report = annotation::agreement_report(records);
  json summary{{"kappa", report.kappa},
               {"kappa_degenerate", report.kappa_degenerate},
               {"kappa_items", report.kappa_items},
               {"kappa_raters", report.kappa_raters},
               {"items_dropped_unequal", report.items_dropped_unequal},
               {"mean_pairwise_r", report.mean_pairwise_r},
               {"pairs_used", report.pairs_used},
               {"pairs_skipped_zero_variance", report.pairs_skipped_zero_variance},
               {"unanimous_rate", report.unanimous_rate},
               {"chance_unanimous_rate", report.chance_unanimous_rate}};

  auto provenance = provenance_for("agreement", cmd, args.seed);
  if (!args.output.empty()) {
    write_kv_file(args.output,
                  kv_with_provenance(
                      provenance,
                      {{"kappa", format_real(report.kappa)},
                       {"kappa_degenerate", report.kappa_degenerate ? "1" : "0"},
                       {"kappa_items", std::to_string(report.kappa_items)},
                       {"kappa_raters", std::to_string(report.kappa_raters)},
                       {"items_dropped_unequal", std::to_string(report.items_dropped_unequal)},
                       {"mean_pairwise_r", format_real(report.mean_pairwise_r)},
                       {"pairs_used", std::to_string(report.pairs_used)},
                       {"pairs_skipped_zero_variance",
                        std::to_string(report.pairs_skipped_zero_variance)},
                       {"unanimous_rate", format_real(report.unanimous_rate)},
                       {"chance_unanimous_rate", format_real(report.chance_unanimous_rate)}}));
  }
  if (!args.labels_out.empty()) {
    auto resolved = annotation::resolve_labels(records, args.seed);
    TableFile file;
    file.schema = {{"doc_id", "string"}, {"style", "string"}, {"tie_broken", "bool"}};
    file.provenance = provenance;
    for (const auto& r : resolved)
      file.rows.push_back({r.doc_id, rhetoric::style_name(r.style), r.tie_broken ? "1" : "0"});
    write_table_file(args.labels_out, file);
    summary["labels_out"] = args.labels_out;
    summary["labels"] = resolved.size();
  }
  emit(summary);
}

// ---------------------------------------------------------------------------
// train

struct TrainArgs {
  std::string tweets, labels, model_out;
  rhetoric::TrainConfig config;
};

void run_train(const TrainArgs& args, const CLI::App* cmd) {
  auto tweets = read_canonical_tweets(args.tweets);
  auto labels = read_labels(args.labels);

  std::vector<textfeat::TokenizedDoc> docs;
  std::vector<rhetoric::Style> gold;
  for (const auto& t : tweets) {
    auto it = labels.find(t.id);
    if (it == labels.end()) continue;
    docs.push_back({t.id, textfeat::tokenize(t.text)});
    gold.push_back(it->second);
  }
  if (docs.empty()) throw ValidationError("no labeled tweets to train on");

  auto model = rhetoric::train_baseline(docs, gold, args.config);
  rhetoric::save_model(args.model_out, model, provenance_for("train", cmd, 0));

  std::vector<rhetoric::Style> predicted;
  predicted.reserve(docs.size());
  for (const auto& d : docs)
    predicted.push_back(rhetoric::classify(rhetoric::predict_baseline(model, d)).style);
  auto eval = rhetoric::evaluate(predicted, gold);
  emit(json{{"docs", docs.size()},
            {"classes", model.class_codes.size()},
            {"vocabulary", model.vocabulary.size()},
            {"final_loss", model.final_loss},
            {"train_accuracy", eval.accuracy},
            {"train_macro_f1", eval.macro_f1},
            {"model_out", args.model_out}});
}

// ---------------------------------------------------------------------------
// classify

struct ClassifyArgs {
  std::string tweets, model, probabilities, output;
  double tie_epsilon = 1e-9;
};

void run_classify(const ClassifyArgs& args, const CLI::App* cmd) {
  auto tweets = read_canonical_tweets(args.tweets);

  std::vector<std::pair<std::string, rhetoric::ClassProbabilities>> rows;
  rows.reserve(tweets.size());
  rhetoric::ProbIngestReport ingest_report;
  if (!args.model.empty()) {
    auto model = rhetoric::load_model(args.model);
    for (const auto& t : tweets)
      rows.emplace_back(t.id,
                        rhetoric::predict_baseline(model, {t.id, textfeat::tokenize(t.text)}));
  } else {
    std::set<std::string> universe;
    for (const auto& t : tweets) universe.insert(t.id);
    auto probs = rhetoric::ingest_probabilities(args.probabilities, &universe, &ingest_report);
    size_t missing = 0;
    for (const auto& t : tweets) {
      auto it = probs.find(t.id);
      if (it == probs.end()) {
        ++missing;
        continue;
      }
      rows.emplace_back(t.id, it->second);
    }
    if (missing > 0)
      throw ValidationError(std::to_string(missing) + " tweets have no probability row");
  }

  TableFile out;
  out.schema = {{"doc_id", "string"}, {"p_blame", "real"}, {"p_merit", "real"},
                {"p_none", "real"},   {"style", "string"}, {"ambiguous", "bool"}};
  out.provenance = provenance_for("classify", cmd, 0);
  size_t ambiguous = 0;
  for (const auto& [id, p] : rows) {
    auto c = rhetoric::classify(p, args.tie_epsilon);
    ambiguous += c.ambiguous;
    out.rows.push_back({id, format_real(p.blame), format_real(p.merit), format_real(p.none),
                        rhetoric::style_name(c.style), c.ambiguous ? "1" : "0"});
  }
  write_table_file(args.output, out);
  json summary{{"classified", rows.size()}, {"ambiguous", ambiguous}, {"output", args.output}};
  if (!args.probabilities.empty()) summary["renormalized"] = ingest_report.renormalized;
  emit(summary);
}

// ---------------------------------------------------------------------------
// features

struct FeaturesArgs {
  std::string tweets, output;
};

void run_features(const FeaturesArgs& args, const CLI::App* cmd) {
  auto tweets = read_canonical_tweets(args.tweets);
  HashedEmbedder embedder;
  TableFile out;
  out.schema = {{"doc_id", "string"},   {"sentiment", "real"},  {"emotionality", "real"},
                {"moral", "real"},      {"self_other", "real"}, {"tense_balance", "real"}};
  out.provenance = provenance_for("features", cmd, 0);
  for (const auto& t : tweets) {
    auto tokens = textfeat::tokenize(t.text);
    auto row = textfeat::compute_features(tokens, embedder);
    out.rows.push_back({t.id, format_real(row.sentiment), format_real(row.emotionality),
                        format_real(row.moral), format_real(row.self_other),
                        format_real(row.tense_balance)});
  }
  write_table_file(args.output, out);
  emit(json{{"rows", out.rows.size()}, {"output", args.output}});
}

// ---------------------------------------------------------------------------
// distinct

struct DistinctArgs {
  std::string tweets, labels, target = "blame", output;
  size_t min_doc_count = 2;
  size_t top = 0;  // 0 keeps everything
};

void run_distinct(const DistinctArgs& args, const CLI::App* cmd) {
  auto tweets = read_canonical_tweets(args.tweets);
  auto labels = read_labels(args.labels);
  auto styles = align_labels(tweets, labels);
  rhetoric::Style target = rhetoric::style_from_name(args.target);

  auto docs = tokenize_tweets(tweets);
  std::vector<char> in_class(tweets.size());
  for (size_t i = 0; i < styles.size(); ++i) in_class[i] = styles[i] == target;

  auto scored = textfeat::distinctive_bigrams(docs, in_class, args.min_doc_count);
  if (args.top > 0 && scored.size() > args.top) scored.resize(args.top);

  TableFile out;
  out.schema = {{"bigram", "string"}, {"score", "real"},
                {"docs_in_class", "int"}, {"docs_out_class", "int"}};
  out.provenance = provenance_for("distinct", cmd, 0);
  for (const auto& s : scored)
    out.rows.push_back({s.bigram, format_real(s.score), std::to_string(s.docs_in_class),
                        std::to_string(s.docs_out_class)});
  write_table_file(args.output, out);
  emit(json{{"bigrams", scored.size()}, {"target", args.target}, {"output", args.output}});
}

// ---------------------------------------------------------------------------
// panel

struct PanelMonthArgs {
  std::string tweets, labels, output;
};

void run_panel_month(const PanelMonthArgs& args, const CLI::App* cmd) {
  auto tweets = read_canonical_tweets(args.tweets);
  auto styles = align_labels(tweets, read_labels(args.labels));
  auto cells = panelize::politician_month_shares(tweets, styles);

  TableFile out;
  out.schema = {{"politician", "string"},  {"month", "string"},      {"n", "int"},
                {"blame_share", "real"},   {"merit_share", "real"},  {"causal_share", "real"}};
  out.provenance = provenance_for("panel month", cmd, 0);
  for (const auto& c : cells)
    out.rows.push_back({c.politician_id, format_year_month(c.month), std::to_string(c.n),
                        format_real(c.blame_share), format_real(c.merit_share),
                        format_real(c.causal_share)});
  write_table_file(args.output, out);
  emit(json{{"cells", cells.size()}, {"output", args.output}});
}

struct PanelDonationsArgs {
  std::string records, politicians, counties, from, to, output;
  double cap = 1000.0;
};

void run_panel_donations(const PanelDonationsArgs& args, const CLI::App* cmd) {
  TableFile rec_file = read_table_file(args.records);
  size_t dc = rec_file.column("donor_id"), pc = rec_file.column("politician_id"),
         fc = rec_file.column("fips"), datec = rec_file.column("date"),
         ac = rec_file.column("amount");
  std::vector<panelize::DonationRecord> records;
  records.reserve(rec_file.rows.size());
  for (const auto& row : rec_file.rows)
    records.push_back({row[dc], row[pc], row[fc], parse_date(row[datec]),
                       parse_real(row[ac], "amount")});

  auto ids_of = [](const std::filesystem::path& path, const char* column) {
    TableFile file = read_table_file(path);
    size_t c = file.column(column);
    std::vector<std::string> out;
    out.reserve(file.rows.size());
    for (const auto& row : file.rows) out.push_back(row[c]);
    return out;
  };
  auto politicians = ids_of(args.politicians, "id");
  auto counties = ids_of(args.counties, "fips");

  YearMonth from = parse_year_month(args.from), to = parse_year_month(args.to);
  if (to < from) throw ConfigError("panel donations: --to precedes --from");
  std::vector<YearMonth> months;
  for (YearMonth m = from; m <= to; m = add_months(m, 1)) months.push_back(m);

  panelize::DonationsPanelOptions options;
  options.cap = args.cap;
  panelize::DonationsPanelReport report;
  auto panel = panelize::donations_panel(records, politicians, counties, months, options, &report);
  write_table_file(args.output, panel.to_table().to_file(provenance_for("panel donations", cmd, 0)));
  emit(json{{"cells", panel.n_cells()},
            {"nonzero", panel.n_nonzero()},
            {"records_read", report.records_read},
            {"excluded_at_or_above_cap", report.excluded_at_or_above_cap},
            {"unknown_politician", report.unknown_politician},
            {"unknown_county", report.unknown_county},
            {"out_of_month_range", report.out_of_month_range},
            {"output", args.output}});
}

// ---------------------------------------------------------------------------
// estimate

struct EstimateArgs {
  std::string data, spec, output;
  int threads = 1;
  double absorb_tol = 1e-8;
};

void append_fit_rows(TableFile& out, const std::string& prefix, const econest::FitResult& fit) {
  for (const auto& c : fit.coefficients)
    out.rows.push_back({prefix + c.name, format_real(c.estimate), format_real(c.std_error),
                        format_real(c.t_stat), format_real(c.p_value)});
  auto stat = [&](const std::string& name, const std::string& value) {
    out.rows.push_back({prefix + name, value, "", "", ""});
  };
  stat("n_obs", std::to_string(fit.n_obs));
  stat("n_clusters", std::to_string(fit.n_clusters));
  stat("dof_model", std::to_string(fit.dof_model));
  stat("singletons_dropped", std::to_string(fit.singletons_dropped));
  stat("absorb_iterations", std::to_string(fit.absorb_iterations));
  stat("r2_within", format_real(fit.r2_within));
  stat("joint_f", format_real(fit.joint_f));
  for (const auto& [endo, f] : fit.partial_f) stat("partial_f " + endo, format_real(f));
  for (const auto& name : fit.dropped_collinear)
    out.rows.push_back({prefix + "dropped " + name, "", "", "", ""});
}

void run_estimate(const EstimateArgs& args, const CLI::App* cmd) {
  auto table = DataTable::from_file(read_table_file(args.data));
  auto spec = econest::read_spec(args.spec);
  econest::FitOptions opts;
  opts.absorb.threads = args.threads;
  opts.absorb.tol = args.absorb_tol;
  auto fit = spec.endogenous.empty() ? econest::ols(spec, table, opts)
                                     : econest::tsls(spec, table, opts);

  TableFile out;
  out.schema = {{"term", "string"}, {"estimate", "real"}, {"std_error", "real"},
                {"t_stat", "real"}, {"p_value", "real"}};
  out.provenance = provenance_for("estimate", cmd, 0);
  append_fit_rows(out, "", fit);
  write_table_file(args.output, out);

  json coefs = json::object();
  for (const auto& c : fit.coefficients)
    coefs[c.name] = json{{"estimate", c.estimate}, {"std_error", c.std_error}};
  emit(json{{"estimator", spec.endogenous.empty() ? "ols" : "tsls"},
            {"n_obs", fit.n_obs},
            {"n_clusters", fit.n_clusters},
            {"r2_within", fit.r2_within},
            {"coefficients", coefs},
            {"output", args.output}});
}

// ---------------------------------------------------------------------------
// eventstudy

struct EventStudyArgs {
  std::string data, outcome, period, cluster, output;
  int base = 0;
  std::vector<std::string> fe_sets;
  int threads = 1;
};

void run_eventstudy(const EventStudyArgs& args, const CLI::App* cmd) {
  auto table = DataTable::from_file(read_table_file(args.data));
  std::vector<std::vector<std::string>> fe_sets;
  for (const auto& spec : args.fe_sets.empty() ? std::vector<std::string>{"none"} : args.fe_sets) {
    std::vector<std::string> dims;
    if (spec != "none" && !spec.empty()) {
      size_t start = 0;
      while (start <= spec.size()) {
        size_t comma = spec.find(',', start);
        if (comma == std::string::npos) {
          dims.push_back(spec.substr(start));
          break;
        }
        dims.push_back(spec.substr(start, comma - start));
        start = comma + 1;
      }
    }
    fe_sets.push_back(std::move(dims));
  }

  econest::FitOptions opts;
  opts.absorb.threads = args.threads;
  auto curves = econest::event_study(table, args.outcome, args.period, args.base, fe_sets,
                                     args.cluster, opts);

  TableFile out;
  out.schema = {{"fe", "string"},       {"period", "int"},    {"estimate", "real"},
                {"std_error", "real"},  {"t_stat", "real"},   {"p_value", "real"}};
  out.provenance = provenance_for("eventstudy", cmd, 0);
  for (const auto& curve : curves) {
    std::string label = "none";
    for (size_t i = 0; i < curve.fixed_effects.size(); ++i)
      label = i == 0 ? curve.fixed_effects[i] : label + "+" + curve.fixed_effects[i];
    for (size_t i = 0; i < curve.periods.size(); ++i) {
      const auto& c = curve.coefficients[i];
      out.rows.push_back({label, std::to_string(curve.periods[i]), format_real(c.estimate),
                          format_real(c.std_error), format_real(c.t_stat),
                          format_real(c.p_value)});
    }
  }
  write_table_file(args.output, out);
  emit(json{{"curves", curves.size()}, {"output", args.output}});
}

// ---------------------------------------------------------------------------
// rdd

struct RddArgs {
  std::string data, cutoff, date_col = "date", value_col = "value", output;
  int bandwidth = 90;
  int order = 1;
};

void run_rdd(const RddArgs& args, const CLI::App* cmd) {
  TableFile file = read_table_file(args.data);
  size_t dc = file.column(args.date_col), vc = file.column(args.value_col);
  std::vector<std::pair<Date, double>> series;
  series.reserve(file.rows.size());
  for (const auto& row : file.rows)
    series.emplace_back(parse_date(row[dc]), parse_real(row[vc], args.value_col));

  auto result = econest::rdd(series, parse_date(args.cutoff), args.bandwidth, args.order);
  json summary{{"jump", result.jump},
               {"std_error", result.std_error},
               {"z", result.z},
               {"p_value", result.p_value},
               {"left_intercept", result.left_intercept},
               {"right_intercept", result.right_intercept},
               {"n_left", result.n_left},
               {"n_right", result.n_right},
               {"bandwidth_days", result.bandwidth_days},
               {"polynomial_order", result.polynomial_order}};
  if (!args.output.empty()) {
    write_kv_file(args.output,
                  kv_with_provenance(provenance_for("rdd", cmd, 0),
                                     {{"jump", format_real(result.jump)},
                                      {"std_error", format_real(result.std_error)},
                                      {"z", format_real(result.z)},
                                      {"p_value", format_real(result.p_value)},
                                      {"left_intercept", format_real(result.left_intercept)},
                                      {"right_intercept", format_real(result.right_intercept)},
                                      {"n_left", std::to_string(result.n_left)},
                                      {"n_right", std::to_string(result.n_right)},
                                      {"bandwidth_days", std::to_string(result.bandwidth_days)},
                                      {"polynomial_order", std::to_string(result.polynomial_order)}}));
    summary["output"] = args.output;
  }
  emit(summary);
}

// ---------------------------------------------------------------------------
// persuasion

struct PersuasionArgs {
  double beta_bar = 0, yc = 0, et = 0, ec = 0, r = 1.0, y0 = -1.0;
  std::vector<double> r_grid;
  std::string output;
};

void run_persuasion(const PersuasionArgs& args, const CLI::App* cmd) {
  persuasion::PersuasionInputs inputs;
  inputs.effect = args.beta_bar;
  inputs.y_control = args.yc;
  inputs.e_treat = args.et;
  inputs.e_control = args.ec;
  inputs.receptive = args.r;
  inputs.y0 = args.y0;

  if (args.r_grid.empty()) {
    std::printf("%.4g\n", persuasion::persuasion_rate(inputs));
    if (!args.output.empty()) {
      TableFile out;
      out.schema = {{"r", "real"}, {"f", "real"}};
      out.provenance = provenance_for("persuasion", cmd, 0);
      out.rows.push_back({format_real(args.r), format_real(persuasion::persuasion_rate(inputs))});
      write_table_file(args.output, out);
    }
    return;
  }

  auto sweep = persuasion::persuasion_sweep(inputs, args.r_grid);
  std::printf("r\tf\n");
  for (const auto& [r, f] : sweep)
    std::printf("%s\t%s\n", format_real(r).c_str(), format_real(f).c_str());
  if (!args.output.empty()) {
    TableFile out;
    out.schema = {{"r", "real"}, {"f", "real"}};
    out.provenance = provenance_for("persuasion", cmd, 0);
    for (const auto& [r, f] : sweep) out.rows.push_back({format_real(r), format_real(f)});
    write_table_file(args.output, out);
  }
}

// ---------------------------------------------------------------------------
// synth

struct SynthCorpusArgs {
  std::string out;
  synth::CorpusDGP dgp;
};

void run_synth_corpus(const SynthCorpusArgs& args, const CLI::App* cmd) {
  auto corpus = synth::gen_corpus(args.dgp);
  std::filesystem::create_directories(args.out);
  auto provenance = provenance_for("synth corpus", cmd, args.dgp.seed);
  std::filesystem::path dir = args.out;
  corpus::write_tweets(dir / "tweets.tsv", corpus.tweets, provenance);
  corpus::write_politicians(dir / "roster.tsv", corpus.roster, provenance);
  std::vector<std::string> ids;
  ids.reserve(corpus.tweets.size());
  for (const auto& t : corpus.tweets) ids.push_back(t.id);
  write_labels(dir / "labels.tsv", ids, corpus.styles, provenance);
  emit(json{{"tweets", corpus.tweets.size()},
            {"politicians", corpus.roster.size()},
            {"out", args.out}});
}

struct SynthPanelArgs {
  std::string out;
  synth::PanelDGP dgp;
};

void run_synth_panel(const SynthPanelArgs& args, const CLI::App* cmd) {
  auto panel = synth::gen_panel(args.dgp);
  write_table_file(args.out,
                   panel.table.to_file(provenance_for("synth panel", cmd, args.dgp.seed)));
  emit(json{{"rows", panel.table.n_rows()},
            {"beta_x1", panel.beta_x1},
            {"beta_x2", panel.beta_x2},
            {"out", args.out}});
}

struct SynthIvArgs {
  std::string out;
  size_t n = 5000;
  double beta = 1.0, rho = 0.6, pi = 1.0, sigma = 1.0;
  uint64_t seed = 1;
};

void run_synth_iv(const SynthIvArgs& args, const CLI::App* cmd) {
  auto draws = synth::gen_iv_draws(args.n, args.beta, args.rho, args.pi, args.sigma, args.seed);
  TableFile out;
  out.schema = {{"y", "real"}, {"x", "real"}, {"z", "real"}};
  out.provenance = provenance_for("synth iv", cmd, args.seed);
  for (size_t i = 0; i < draws.y.size(); ++i)
    out.rows.push_back({format_real(draws.y[i]), format_real(draws.x[i]),
                        format_real(draws.z[i])});
  write_table_file(args.out, out);
  emit(json{{"rows", draws.y.size()}, {"beta", draws.beta}, {"out", args.out}});
}

// ---------------------------------------------------------------------------

const char* error_kind(const std::exception& e) {
  if (dynamic_cast<const SchemaError*>(&e)) return "schema";
  if (dynamic_cast<const ValidationError*>(&e)) return "validation";
  if (dynamic_cast<const ConfigError*>(&e)) return "config";
  if (dynamic_cast<const EstimationError*>(&e)) return "estimation";
  if (dynamic_cast<const DomainError*>(&e)) return "domain";
  if (dynamic_cast<const Error*>(&e)) return "error";
  return "internal";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"causal-rhetoric pipeline"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  IngestArgs ingest_args;
  auto* ingest = app.add_subcommand("ingest", "normalize a raw tweet table");
  ingest->add_option("--input", ingest_args.input, "raw table")->required();
  ingest->add_option("--output", ingest_args.output, "canonical tweet file")->required();
  ingest->add_option("--config", ingest_args.config, "column-mapping JSON");
  ingest->add_option("--politician-col", ingest_args.politician_col,
                     "politician id column when no config is given");
  ingest->callback([&] { run_ingest(ingest_args, ingest); });

  SampleArgs sample_args;
  auto* sample = app.add_subcommand("sample", "select an annotation batch");
  sample->add_option("--tweets", sample_args.tweets)->required();
  sample->add_option("--benchmarks", sample_args.benchmarks, "text/party/style table")->required();
  sample->add_option("--output", sample_args.output)->required();
  sample->add_option("--n", sample_args.n);
  sample->add_option("--similar-fraction", sample_args.similar_fraction);
  sample->add_option("--seed", sample_args.seed);
  sample->callback([&] { run_sample(sample_args, sample); });

  AgreementArgs agreement_args;
  auto* agreement = app.add_subcommand("agreement", "inter-coder agreement and label resolution");
  agreement->add_option("--annotations", agreement_args.annotations)->required();
  agreement->add_option("--output", agreement_args.output, "agreement report (key=value)");
  agreement->add_option("--labels-out", agreement_args.labels_out, "resolved gold labels");
  agreement->add_option("--seed", agreement_args.seed, "tie-break seed");
  agreement->callback([&] { run_agreement(agreement_args, agreement); });

  TrainArgs train_args;
  auto* train = app.add_subcommand("train", "fit the baseline style classifier");
  train->add_option("--tweets", train_args.tweets)->required();
  train->add_option("--labels", train_args.labels)->required();
  train->add_option("--model-out", train_args.model_out)->required();
  train->add_option("--l2", train_args.config.l2);
  train->add_option("--learning-rate", train_args.config.learning_rate);
  train->add_option("--epochs", train_args.config.epochs);
  train->add_option("--min-token-count", train_args.config.min_token_count);
  train->callback([&] { run_train(train_args, train); });

  ClassifyArgs classify_args;
  auto* classify = app.add_subcommand("classify", "score tweets with a model or external probabilities");
  classify->add_option("--tweets", classify_args.tweets)->required();
  auto* model_opt = classify->add_option("--model", classify_args.model, "baseline model file");
  classify->add_option("--probabilities", classify_args.probabilities,
                       "externally produced probability table")
      ->excludes(model_opt);
  classify->add_option("--tie-epsilon", classify_args.tie_epsilon);
  classify->add_option("--output", classify_args.output)->required();
  classify->callback([&] {
    if (classify_args.model.empty() && classify_args.probabilities.empty())
      throw ConfigError("classify needs --model or --probabilities");
    run_classify(classify_args, classify);
  });

  FeaturesArgs features_args;
  auto* features = app.add_subcommand("features", "per-document text features");
  features->add_option("--tweets", features_args.tweets)->required();
  features->add_option("--output", features_args.output)->required();
  features->callback([&] { run_features(features_args, features); });

  DistinctArgs distinct_args;
  auto* distinct = app.add_subcommand("distinct", "class-distinctive bigrams");
  distinct->add_option("--tweets", distinct_args.tweets)->required();
  distinct->add_option("--labels", distinct_args.labels)->required();
  distinct->add_option("--target", distinct_args.target, "blame / merit / none");
  distinct->add_option("--min-doc-count", distinct_args.min_doc_count);
  distinct->add_option("--top", distinct_args.top, "keep the top N (0 = all)");
  distinct->add_option("--output", distinct_args.output)->required();
  distinct->callback([&] { run_distinct(distinct_args, distinct); });

  auto* panel = app.add_subcommand("panel", "aggregate documents or records into panels");
  panel->require_subcommand(1);
  PanelMonthArgs panel_month_args;
  auto* panel_month = panel->add_subcommand("month", "politician x month style shares");
  panel_month->add_option("--tweets", panel_month_args.tweets)->required();
  panel_month->add_option("--labels", panel_month_args.labels)->required();
  panel_month->add_option("--output", panel_month_args.output)->required();
  panel_month->callback([&] { run_panel_month(panel_month_args, panel_month); });
  PanelDonationsArgs panel_don_args;
  auto* panel_don = panel->add_subcommand("donations", "politician x county x month gift panel");
  panel_don->add_option("--records", panel_don_args.records)->required();
  panel_don->add_option("--politicians", panel_don_args.politicians, "table with an id column")
      ->required();
  panel_don->add_option("--counties", panel_don_args.counties, "table with a fips column")
      ->required();
  panel_don->add_option("--from", panel_don_args.from, "first month, YYYY-MM")->required();
  panel_don->add_option("--to", panel_don_args.to, "last month, YYYY-MM")->required();
  panel_don->add_option("--cap", panel_don_args.cap, "strictly-below gift cap");
  panel_don->add_option("--output", panel_don_args.output)->required();
  panel_don->callback([&] { run_panel_donations(panel_don_args, panel_don); });

  EstimateArgs estimate_args;
  auto* estimate = app.add_subcommand("estimate", "fixed-effects OLS / 2SLS from a spec file");
  estimate->add_option("--data", estimate_args.data)->required();
  estimate->add_option("--spec", estimate_args.spec, "regression spec JSON")->required();
  estimate->add_option("--output", estimate_args.output)->required();
  estimate->add_option("--threads", estimate_args.threads);
  estimate->add_option("--absorb-tol", estimate_args.absorb_tol);
  estimate->callback([&] { run_estimate(estimate_args, estimate); });

  EventStudyArgs eventstudy_args;
  auto* eventstudy = app.add_subcommand("eventstudy", "period coefficients under each FE set");
  eventstudy->add_option("--data", eventstudy_args.data)->required();
  eventstudy->add_option("--outcome", eventstudy_args.outcome)->required();
  eventstudy->add_option("--period", eventstudy_args.period)->required();
  eventstudy->add_option("--base", eventstudy_args.base, "omitted base period")->required();
  eventstudy->add_option("--fe", eventstudy_args.fe_sets,
                         "comma-joined FE dims per curve; 'none' for no absorption");
  eventstudy->add_option("--cluster", eventstudy_args.cluster);
  eventstudy->add_option("--threads", eventstudy_args.threads);
  eventstudy->add_option("--output", eventstudy_args.output)->required();
  eventstudy->callback([&] { run_eventstudy(eventstudy_args, eventstudy); });

  RddArgs rdd_args;
  auto* rdd_cmd = app.add_subcommand("rdd", "discontinuity check on a daily series");
  rdd_cmd->add_option("--data", rdd_args.data)->required();
  rdd_cmd->add_option("--cutoff", rdd_args.cutoff, "YYYY-MM-DD")->required();
  rdd_cmd->add_option("--date-col", rdd_args.date_col);
  rdd_cmd->add_option("--value-col", rdd_args.value_col);
  rdd_cmd->add_option("--bandwidth", rdd_args.bandwidth, "days on each side");
  rdd_cmd->add_option("--order", rdd_args.order, "polynomial order per side");
  rdd_cmd->add_option("--output", rdd_args.output, "key=value report");
  rdd_cmd->callback([&] { run_rdd(rdd_args, rdd_cmd); });

  PersuasionArgs persuasion_args;
  auto* persuasion_cmd = app.add_subcommand("persuasion", "persuasion-rate arithmetic");
  persuasion_cmd->add_option("--beta-bar", persuasion_args.beta_bar, "relative effect")->required();
  persuasion_cmd->add_option("--yc", persuasion_args.yc, "control outcome share")->required();
  persuasion_cmd->add_option("--et", persuasion_args.et, "treated exposure share")->required();
  persuasion_cmd->add_option("--ec", persuasion_args.ec, "control exposure share");
  persuasion_cmd->add_option("--r", persuasion_args.r, "receptive share");
  persuasion_cmd->add_option("--y0", persuasion_args.y0, "prior behavior share");
  persuasion_cmd->add_option("--r-grid", persuasion_args.r_grid, "comma-separated receptive shares")
      ->delimiter(',');
  persuasion_cmd->add_option("--output", persuasion_args.output, "(r, f) table");
  persuasion_cmd->callback([&] { run_persuasion(persuasion_args, persuasion_cmd); });

  auto* synth_cmd = app.add_subcommand("synth", "deterministic synthetic inputs");
  synth_cmd->require_subcommand(1);
  SynthCorpusArgs synth_corpus_args;
  auto* synth_corpus = synth_cmd->add_subcommand("corpus", "tweets + gold labels + roster");
  synth_corpus->add_option("--out", synth_corpus_args.out, "output directory")->required();
  synth_corpus->add_option("--seed", synth_corpus_args.dgp.seed);
  synth_corpus->add_option("--n-docs", synth_corpus_args.dgp.n_docs);
  synth_corpus->add_option("--n-politicians", synth_corpus_args.dgp.n_politicians);
  synth_corpus->add_option("--marker-rate", synth_corpus_args.dgp.marker_rate);
  synth_corpus->add_option("--leak-rate", synth_corpus_args.dgp.leak_rate);
  synth_corpus->callback([&] { run_synth_corpus(synth_corpus_args, synth_corpus); });
  SynthPanelArgs synth_panel_args;
  auto* synth_panel = synth_cmd->add_subcommand("panel", "unit x group x period outcome grid");
  synth_panel->add_option("--out", synth_panel_args.out)->required();
  synth_panel->add_option("--seed", synth_panel_args.dgp.seed);
  synth_panel->add_option("--units", synth_panel_args.dgp.n_units);
  synth_panel->add_option("--groups", synth_panel_args.dgp.n_groups);
  synth_panel->add_option("--periods", synth_panel_args.dgp.n_periods);
  synth_panel->add_option("--beta-x1", synth_panel_args.dgp.beta_x1);
  synth_panel->add_option("--beta-x2", synth_panel_args.dgp.beta_x2);
  synth_panel->callback([&] { run_synth_panel(synth_panel_args, synth_panel); });
  SynthIvArgs synth_iv_args;
  auto* synth_iv = synth_cmd->add_subcommand("iv", "endogenous-regressor draws");
  synth_iv->add_option("--out", synth_iv_args.out)->required();
  synth_iv->add_option("--n", synth_iv_args.n);
  synth_iv->add_option("--beta", synth_iv_args.beta);
  synth_iv->add_option("--rho", synth_iv_args.rho);
  synth_iv->add_option("--pi", synth_iv_args.pi);
  synth_iv->add_option("--sigma", synth_iv_args.sigma);
  synth_iv->add_option("--seed", synth_iv_args.seed);
  synth_iv->callback([&] { run_synth_iv(synth_iv_args, synth_iv); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << json{{"error", {{"type", error_kind(e)}, {"message", e.what()}}}}.dump() << "\n";
    return 1;
  }
  return 0;
}
