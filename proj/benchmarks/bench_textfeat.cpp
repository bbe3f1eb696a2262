#include <benchmark/benchmark.h>

#include <vector>

#include "polrhet/rhetoric.hpp"
#include "polrhet/synth.hpp"
#include "polrhet/textfeat.hpp"

using namespace polrhet;

namespace {

synth::SyntheticCorpus corpus_of(size_t n_docs) {
  synth::CorpusDGP dgp;
  dgp.seed = 9;
  dgp.n_docs = n_docs;
  return synth::gen_corpus(dgp);
}

std::vector<textfeat::TokenizedDoc> tokenized(const synth::SyntheticCorpus& corpus) {
  std::vector<textfeat::TokenizedDoc> docs;
  docs.reserve(corpus.tweets.size());
  for (const auto& t : corpus.tweets) docs.push_back({t.id, textfeat::tokenize(t.text)});
  return docs;
}

}  // namespace

static void BM_Tokenize(benchmark::State& state) {
  auto corpus = corpus_of(size_t(state.range(0)));
  for (auto _ : state) {
    size_t total = 0;
    for (const auto& t : corpus.tweets) total += textfeat::tokenize(t.text).size();
    benchmark::DoNotOptimize(total);
  }
  state.SetItemsProcessed(int64_t(state.iterations()) * state.range(0));
}
BENCHMARK(BM_Tokenize)->Range(1000, 64000)->Unit(benchmark::kMillisecond);

static void BM_DistinctiveBigrams(benchmark::State& state) {
  auto corpus = corpus_of(size_t(state.range(0)));
  auto docs = tokenized(corpus);
  std::vector<char> in_class(docs.size());
  for (size_t i = 0; i < docs.size(); ++i)
    in_class[i] = corpus.styles[i] == rhetoric::Style::Blame;
  for (auto _ : state) {
    auto scored = textfeat::distinctive_bigrams(docs, in_class, 2);
    benchmark::DoNotOptimize(scored.data());
  }
  state.SetItemsProcessed(int64_t(state.iterations()) * state.range(0));
}
BENCHMARK(BM_DistinctiveBigrams)->Range(1000, 16000)->Unit(benchmark::kMillisecond);

static void BM_PredictBaseline(benchmark::State& state) {
  auto corpus = corpus_of(size_t(state.range(0)));
  auto docs = tokenized(corpus);
  rhetoric::TrainConfig tc;
  tc.epochs = 20;
  auto model = rhetoric::train_baseline(docs, corpus.styles, tc);
  for (auto _ : state) {
    size_t ambiguous = 0;
    for (const auto& d : docs)
      ambiguous += rhetoric::classify(rhetoric::predict_baseline(model, d)).ambiguous;
    benchmark::DoNotOptimize(ambiguous);
  }
  state.SetItemsProcessed(int64_t(state.iterations()) * state.range(0));
}
BENCHMARK(BM_PredictBaseline)->Range(1000, 16000)->Unit(benchmark::kMillisecond);
