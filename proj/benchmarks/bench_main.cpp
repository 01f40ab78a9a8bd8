#include <benchmark/benchmark.h>

#include "pec/graph.hpp"
#include "pec/reconstruct.hpp"
#include "pec/rng.hpp"
#include "pec/seqmodel.hpp"

using namespace pec;

namespace {

Corpus make_corpus(std::size_t conversations, std::size_t length) {
  Rng rng(1);
  Corpus corpus;
  corpus.label_set = EmotionLabelSet::preset("dailydialog");
  const SpeakerId a = corpus.speakers.intern("A");
  const SpeakerId b = corpus.speakers.intern("B");
  for (std::size_t c = 0; c < conversations; ++c) {
    Conversation conv;
    conv.id = std::to_string(c);
    for (std::size_t t = 0; t < length; ++t) {
      Utterance u;
      u.speaker = t % 2 ? b : a;
      u.emotion = static_cast<LabelId>(rng.index(corpus.label_set.size()));
      u.turn_index = t;
      conv.utterances.push_back(u);
    }
    corpus.conversations.push_back(std::move(conv));
  }
  corpus.kind = CorpusKind::dyadic;
  return corpus;
}

void BM_ExtractWindows(benchmark::State& state) {
  const auto corpus = make_corpus(1000, 12);
  const auto dep = static_cast<Dependency>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(extract(corpus, static_cast<std::size_t>(state.range(0)), dep));
  state.SetItemsProcessed(state.iterations() * 12000);
}
BENCHMARK(BM_ExtractWindows)->ArgsProduct({{1, 4}, {0, 1, 2}});

void BM_SeqModelStep(benchmark::State& state) {
  const auto w = static_cast<std::size_t>(state.range(0));
  const auto corpus = make_corpus(20, 12);
  const auto set = extract_wlb(corpus, w);
  SeqModelConfig config;
  config.w = w;
  config.num_labels = 7;
  config.hidden = static_cast<std::size_t>(state.range(1));
  SeqModel model(config);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.accumulate(set.samples[i], 1.0, 1.0));
    i = (i + 1) % set.size();
  }
}
BENCHMARK(BM_SeqModelStep)->ArgsProduct({{2, 8}, {64, 300}});

void BM_RgcnForwardBackward(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const std::size_t d = 128;
  std::vector<SpeakerId> speakers(n);
  for (std::size_t i = 0; i < n; ++i) speakers[i] = static_cast<SpeakerId>(i % 2);
  Rng rng(2);
  RelationRegistry reg;
  const auto graph = build_graph(nn::Tensor(n, d), speakers, 3, 1, reg);
  nn::ModelState params;
  const auto layer = Rgcn::create(params, "g", d, d, reg.bank_size(), rng);
  nn::Tensor h(n, d), dy(n, d);
  for (auto& v : h.values()) v = rng.uniform(-1, 1);
  for (auto& v : dy.values()) v = rng.uniform(-1, 1);
  for (auto _ : state) {
    const auto trace = layer.forward(params, graph, h);
    benchmark::DoNotOptimize(layer.backward(params, graph, h, trace, dy));
  }
}
BENCHMARK(BM_RgcnForwardBackward)->Arg(4)->Arg(8);

}  // namespace
BENCHMARK_MAIN();
