#include <doctest.h>

#include <map>
#include <sstream>

#include "pec/analytics.hpp"
#include "pec/error.hpp"
#include "synthetic.hpp"

using namespace pec;

namespace {

Corpus from_turns(const std::vector<std::vector<std::pair<std::string, std::string>>>& convs) {
  Corpus c;
  c.label_set = EmotionLabelSet::preset("dailydialog");
  for (std::size_t i = 0; i < convs.size(); ++i) {
    Conversation conv;
    conv.id = "c" + std::to_string(i);
    for (const auto& [speaker, emotion] : convs[i]) {
      Utterance u;
      u.speaker = c.speakers.intern(speaker);
      u.emotion = c.label_set.id(emotion);
      u.turn_index = conv.utterances.size();
      conv.utterances.push_back(u);
    }
    c.conversations.push_back(conv);
  }
  return c;
}

std::vector<std::vector<std::int64_t>> brute_counts(const Corpus& corpus, std::size_t gap) {
  const auto k = corpus.label_set.size();
  std::vector<std::vector<std::int64_t>> counts(k, std::vector<std::int64_t>(k, 0));
  for (const auto& conv : corpus.conversations)
    for (std::size_t i = 0; i < conv.size(); ++i)
      for (std::size_t j = 0; j < conv.size(); ++j)
        if (j == i + gap) ++counts[conv.utterances[i].emotion][conv.utterances[j].emotion];
  return counts;
}

}  // namespace

TEST_CASE("transition examples") {
  const auto c = from_turns({{{"A", "neutral"}, {"B", "anger"}, {"A", "neutral"}, {"B", "anger"}}});
  const auto n = c.label_set.id("neutral");
  const auto a = c.label_set.id("anger");

  const auto g1 = transition_matrix(c, 1);
  CHECK(g1.probabilities[n][a] == 1.0);
  CHECK(g1.probabilities[a][n] == 1.0);
  CHECK(g1.support[n] == 2);
  CHECK(g1.support[a] == 1);
  CHECK(g1.row_empty(c.label_set.id("fear")));

  const auto g2 = transition_matrix(c, 2);
  CHECK(g2.probabilities[n][n] == 1.0);
  CHECK(g2.probabilities[a][a] == 1.0);
  CHECK(g2.row_argmax(n) == n);

  CHECK_THROWS_AS(transition_matrix(c, 0), ConfigError);
}

TEST_CASE("transitions match a brute-force pair counter") {
  Rng rng(5);
  const auto corpus = testing::random_corpus(rng, 25, 15, 3, 6);
  for (std::size_t gap = 1; gap <= 4; ++gap) {
    const auto m = transition_matrix(corpus, gap);
    CHECK(m.counts == brute_counts(corpus, gap));
    for (std::size_t r = 0; r < m.size(); ++r) {
      double sum = 0;
      for (double p : m.probabilities[r]) sum += p;
      if (m.support[r] > 0) {
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
      } else {
        CHECK(sum == 0.0);
      }
    }
  }
}

TEST_CASE("transitions never cross conversations") {
  const auto c = from_turns({{{"A", "neutral"}}, {{"A", "anger"}}});
  const auto m = transition_matrix(c, 1);
  for (auto s : m.support) CHECK(s == 0);
}

TEST_CASE("gap parity on alternating dyads") {
  const auto corpus = testing::self_dependent_corpus(3, {.conversations = 20, .length = 9});
  for (const auto& conv : corpus.conversations) {
    CHECK(strictly_alternating_dyadic(conv));
    for (std::size_t i = 0; i + 2 < conv.size(); ++i) {
      CHECK(conv.utterances[i].speaker != conv.utterances[i + 1].speaker);
      CHECK(conv.utterances[i].speaker == conv.utterances[i + 2].speaker);
    }
  }
  // own-emotion persistence shows up on the diagonal at gap 2 only
  const auto g2 = transition_matrix(corpus, 2);
  for (std::size_t r = 0; r < g2.size(); ++r) CHECK(g2.row_argmax(r) == r);
}

TEST_CASE("same-speaker pairing and alternating filter") {
  const auto c = from_turns({{{"A", "neutral"}, {"B", "anger"}, {"C", "fear"}, {"A", "happiness"}},
                             {{"A", "sadness"}, {"B", "sadness"}, {"A", "surprise"}}});
  TransitionOptions same;
  same.pairing = TransitionPairing::same_speaker;
  const auto m = transition_matrix(c, same);
  const auto& L = c.label_set;
  CHECK(m.counts[L.id("neutral")][L.id("happiness")] == 1);
  CHECK(m.counts[L.id("sadness")][L.id("surprise")] == 1);
  std::int64_t total = 0;
  for (auto s : m.support) total += s;
  CHECK(total == 2);

  TransitionOptions alt;
  alt.alternating_dyadic_only = true;
  const auto a = transition_matrix(c, alt);
  total = 0;
  for (auto s : a.support) total += s;
  CHECK(total == 2);
}

TEST_CASE("speaker_distribution") {
  const auto c = from_turns({{{"A", "neutral"}, {"B", "anger"}, {"A", "happiness"}}});
  const auto d = speaker_distribution(c, "A");
  CHECK(d.counts[c.label_set.id("neutral")] == 1);
  CHECK(d.counts[c.label_set.id("happiness")] == 1);
  CHECK(d.total() == 2);
  CHECK(speaker_distribution(c, "Zoe").total() == 0);

  Rng rng(8);
  const auto r = testing::random_corpus(rng, 30, 10, 4, 5);
  LabelDistribution sum(r.label_set.size());
  for (std::size_t s = 0; s < r.speakers.size(); ++s) sum += speaker_distribution(r, static_cast<SpeakerId>(s));
  CHECK(sum == class_distribution(r));
}

TEST_CASE("transition writers") {
  const auto c = from_turns({{{"A", "neutral"}, {"B", "anger"}, {"A", "neutral"}}});
  const auto m = transition_matrix(c, 1);
  std::ostringstream csv;
  write_transition_csv(m, c.label_set, csv);
  CHECK(csv.str().rfind("from\\to,neutral,anger", 0) == 0);
  std::ostringstream js;
  write_transition_json(m, c.label_set, TransitionOptions{}, js);
  CHECK(js.str().find("\"empty_rows\"") != std::string::npos);
}
