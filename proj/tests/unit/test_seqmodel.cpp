#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "pec/error.hpp"
#include "pec/metrics.hpp"
#include "pec/nn/gradcheck.hpp"
#include "pec/reconstruct.hpp"
#include "pec/seqmodel.hpp"
#include "synthetic.hpp"

using namespace pec;

namespace {

SampleSet toy_samples(std::size_t w, Dependency dep = Dependency::all, std::size_t conversations = 30) {
  const auto corpus = testing::self_dependent_corpus(5, {.conversations = conversations, .length = 8});
  return extract(corpus, w, dep);
}

SeqModelConfig e_config(std::size_t w, std::size_t k, std::size_t hidden = 8) {
  SeqModelConfig c;
  c.seq_type = SeqType::E;
  c.w = w;
  c.num_labels = k;
  c.hidden = hidden;
  c.seed = 3;
  return c;
}

Sample window_of(std::vector<LabelId> emotions) {
  Sample s;
  s.conversation_id = "x";
  for (std::size_t t = 0; t < emotions.size(); ++t) {
    WindowTurn turn;
    turn.emotion = emotions[t];
    turn.speaker = static_cast<SpeakerId>(t % 2);
    turn.turn = t;
    s.window.push_back(turn);
  }
  s.target_turn = emotions.size();
  return s;
}

}  // namespace

TEST_CASE("encode_emotions") {
  const auto x = encode_emotions(window_of({2}), 7);
  CHECK(x.rows() == 1);
  CHECK(x.cols() == 7);
  for (std::size_t j = 0; j < 7; ++j) CHECK(x(0, j) == (j == 2 ? 1.0 : 0.0));

  Rng rng(1);
  for (int round = 0; round < 50; ++round) {
    std::vector<LabelId> e(1 + rng.index(6));
    for (auto& v : e) v = static_cast<LabelId>(rng.index(5));
    const auto enc = encode_emotions(window_of(e), 5);
    for (std::size_t r = 0; r < enc.rows(); ++r) {
      double sum = 0;
      for (double v : enc.row(r)) sum += v;
      CHECK(sum == 1.0);
    }
    CHECK(decode_emotions(enc) == e);
  }
  CHECK_THROWS_AS(encode_emotions(window_of({9}), 5), ConfigError);
}

TEST_CASE("encode_text") {
  const auto table = testing::synthetic_embeddings(4, 300, 2);
  auto sample = window_of({0, 1});
  sample.window[0].text = "t1 f2";
  sample.window[0].tokens = {"t1", "f2"};
  TextConfig text;
  text.table = &table;
  const auto x = encode_text(sample, text);
  CHECK(x.rows() == 2);
  CHECK(x.cols() == 6000);
  for (double v : x.row(1)) CHECK(v == 0.0);
  double norm = 0;
  for (double v : x.row(0)) norm += v * v;
  CHECK(norm > 0.0);

  CHECK_THROWS_AS(encode_text(sample, TextConfig{}), ConfigError);
}

TEST_CASE("config validation") {
  auto c = e_config(1, 4);
  CHECK_NOTHROW(c.validate());
  CHECK(e_config(1, 4, 0).resolved_hidden() == 64);
  CHECK_FALSE(c.resolved_attention());
  c.seq_type = SeqType::T;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = e_config(0, 4);
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("zero output layer gives uniform predictions") {
  SeqModel model(e_config(2, 5));
  model.zero_output_layer();
  const auto p = model.predict(window_of({1, 3}));
  for (double v : p.distribution) CHECK(v == doctest::Approx(0.2));
  CHECK(p.label == 0);
}

TEST_CASE("window length must match w") {
  SeqModel model(e_config(2, 5));
  CHECK_THROWS_AS(model.predict(window_of({1})), ConfigError);
}

TEST_CASE("determinism") {
  const auto set = toy_samples(2);
  SeqModel a(e_config(2, 4));
  SeqModel b(e_config(2, 4));
  for (const auto& s : set.samples) CHECK(a.predict(s).distribution == b.predict(s).distribution);

  const auto [train, test] = split(set, 0.8, 1);
  TrainOptions opts;
  opts.epochs = 3;
  opts.seed = 9;
  const auto ha = fit(a, train, test, opts);
  const auto hb = fit(b, train, test, opts);
  std::ostringstream ca, cb;
  write_history_csv(ha.history, ca);
  write_history_csv(hb.history, cb);
  CHECK(ca.str() == cb.str());
  CHECK(ha.history.size() == 3);
}

TEST_CASE("distributions are valid") {
  const auto set = toy_samples(3);
  SeqModel model(e_config(3, 4));
  for (const auto& s : set.samples) {
    const auto p = model.predict(s);
    double sum = 0;
    for (double v : p.distribution) {
      CHECK(v > 0.0);
      sum += v;
    }
    CHECK(std::abs(sum - 1.0) < 1e-9);
  }
}

TEST_CASE("gradient checks") {
  const auto table = testing::synthetic_embeddings(4, 3, 7);
  const auto set = toy_samples(2);
  for (auto type : {SeqType::E, SeqType::T, SeqType::ET}) {
    for (bool attention : {false, true}) {
      auto config = e_config(2, 4, 3);
      config.seq_type = type;
      config.attention = attention;
      config.text.table = &table;
      config.text.pipeline = testing::raw_pipeline(2);
      SeqModel model(config);
      Rng rng(13);
      for (nn::ParamId p = 0; p < model.state().size(); ++p)
        for (auto& v : model.state()[p].values()) v += rng.uniform(-0.1, 0.1);
      const auto& sample = set.samples[3];
      const auto result = nn::grad_check(model.state(), [&](bool backward) {
        return backward ? model.accumulate(sample, 1.7, 1.0) : model.loss(sample, 1.7);
      });
      INFO("seq type " << to_string(type) << " attention " << attention << " worst " << result.worst_parameter);
      CHECK(result.max_relative_error < 1e-4);
    }
  }
}

TEST_CASE("label permutation equivariance for the E model") {
  const std::size_t k = 4;
  const std::vector<LabelId> perm{2, 0, 3, 1};
  SeqModel a(e_config(3, k));
  SeqModel b(e_config(3, k));

  // b's parameters are a's with the label axis permuted
  for (const char* dir : {"emotion.bilstm.fwd.Wx", "emotion.bilstm.bwd.Wx"}) {
    const auto& src = a.state().get(dir);
    auto& dst = b.state().get(dir);
    for (std::size_t l = 0; l < k; ++l)
      for (std::size_t c = 0; c < src.cols(); ++c) dst(perm[l], c) = src(l, c);
  }
  {
    const auto& src = a.state().get("head.out.W");
    auto& dst = b.state().get("head.out.W");
    for (std::size_t r = 0; r < src.rows(); ++r)
      for (std::size_t l = 0; l < k; ++l) dst(r, perm[l]) = src(r, l);
    const auto& sb = a.state().get("head.out.b");
    auto& db = b.state().get("head.out.b");
    for (std::size_t l = 0; l < k; ++l) db[perm[l]] = sb[l];
  }

  Rng rng(4);
  for (int round = 0; round < 20; ++round) {
    std::vector<LabelId> e(3), pe(3);
    for (std::size_t t = 0; t < 3; ++t) {
      e[t] = static_cast<LabelId>(rng.index(k));
      pe[t] = perm[e[t]];
    }
    const auto pa = a.predict(window_of(e)).distribution;
    const auto pb = b.predict(window_of(pe)).distribution;
    for (std::size_t l = 0; l < k; ++l) CHECK(pb[perm[l]] == doctest::Approx(pa[l]).epsilon(1e-12));
  }
}

TEST_CASE("fit preconditions and history") {
  const auto set = toy_samples(1);
  SeqModel model(e_config(1, 4));
  TrainOptions opts;
  opts.epochs = 0;
  CHECK_THROWS_AS(fit(model, set, set, opts), ConfigError);
  opts.epochs = 2;
  CHECK_THROWS_AS(fit(model, set.like(), set, opts), ConfigError);
  const auto result = fit(model, set, set, opts);
  CHECK(result.history.size() == 2);
  CHECK(result.history.epochs[1].epoch == 2);
}

TEST_CASE("single-sample loss decreases") {
  auto set = toy_samples(2);
  set.samples.resize(1);
  SeqModel model(e_config(2, 4));
  TrainOptions opts;
  opts.epochs = 12;
  opts.lr = 0.01;
  const auto result = fit(model, set, set, opts);
  for (std::size_t e = 1; e < 10; ++e)
    CHECK(result.history.epochs[e].train_loss < result.history.epochs[e - 1].train_loss);
}

TEST_CASE("twenty distinct samples are memorised") {
  SampleSet set;
  set.w = 3;
  set.label_set = testing::numbered_labels(4);
  Rng rng(21);
  std::set<std::vector<LabelId>> seen;
  while (set.size() < 20) {
    std::vector<LabelId> e(3);
    for (auto& v : e) v = static_cast<LabelId>(rng.index(4));
    if (!seen.insert(e).second) continue;
    auto s = window_of(e);
    s.target_emotion = static_cast<LabelId>(rng.index(4));
    set.samples.push_back(s);
  }
  SeqModel model(e_config(3, 4, 16));
  TrainOptions opts;
  opts.lr = 0.02;
  opts.batch = 4;
  Trainer trainer(model, set, opts);
  for (int e = 0; e < 500 && trainer.train_accuracy() < 1.0; ++e) trainer.run_epoch();
  CHECK(trainer.train_accuracy() == 1.0);
}

TEST_CASE("majority baseline") {
  SampleSet set;
  set.label_set = testing::numbered_labels(7);
  for (LabelId l : {0, 0, 0, 2, 5}) {
    Sample s;
    s.target_emotion = l;
    set.samples.push_back(s);
  }
  const auto m = majority_baseline(set);
  CHECK(m.label == 0);
  const auto report = evaluate(m, set);
  CHECK(report.macro_f1 == doctest::Approx(report.per_class[0].f1 / 7.0));
  CHECK(report.per_class[0].f1 == doctest::Approx(2 * 0.6 / 1.6));

  set.samples.resize(4);
  set.samples[3].target_emotion = 4;
  set.samples[2].target_emotion = 4;
  CHECK(majority_baseline(set).label == 0);
  set.samples[1].target_emotion = 4;
  CHECK(majority_baseline(set).label == 4);
}
