#include <doctest.h>

#include <sstream>

#include "pec/corpus.hpp"
#include "pec/error.hpp"
#include "pec/importers.hpp"
#include "synthetic.hpp"

using namespace pec;

namespace {

Corpus parse(const std::string& text, const EmotionLabelSet& labels = EmotionLabelSet::preset("dailydialog"),
             Diagnostics* diag = nullptr) {
  std::istringstream in(text);
  return parse_corpus(in, labels, CorpusKind::group, diag);
}

}  // namespace

TEST_CASE("label presets") {
  const auto dd = EmotionLabelSet::preset("dailydialog");
  CHECK(dd.names() ==
        std::vector<std::string>{"neutral", "anger", "disgust", "fear", "happiness", "sadness", "surprise"});
  CHECK(EmotionLabelSet::preset("meld").size() == 7);
  CHECK(EmotionLabelSet::preset("friends").size() == 8);
  CHECK(EmotionLabelSet::preset("iemocap").size() == 11);
  CHECK(dd.id("fear") == 3);
  CHECK_FALSE(dd.find("joy").has_value());
  CHECK_THROWS_AS(EmotionLabelSet::preset("nope"), ConfigError);
  CHECK_THROWS_AS(EmotionLabelSet({"a", "a"}), ConfigError);
  CHECK_THROWS_AS(EmotionLabelSet({"a", ""}), ConfigError);
  CHECK_THROWS_AS(EmotionLabelSet(std::vector<std::string>{}), ConfigError);

  std::istringstream custom(R"(["calm", "angry"])");
  const auto set = EmotionLabelSet::from_json(custom);
  CHECK(set.size() == 2);
  CHECK(set.id("angry") == 1);
}

TEST_CASE("parse_corpus: empty input warns") {
  Diagnostics diag;
  const auto c = parse("", EmotionLabelSet::preset("dailydialog"), &diag);
  CHECK(c.conversations.empty());
  CHECK(diag.warnings.size() == 1);
}

TEST_CASE("parse_corpus: two turns") {
  const auto c = parse(
      R"({"id": "c1", "turns": [{"speaker": "A", "text": "hi", "emotion": "neutral"}, )"
      R"({"speaker": "B", "text": "no", "emotion": "anger"}]})"
      "\n");
  REQUIRE(c.conversations.size() == 1);
  const auto& conv = c.conversations[0];
  CHECK(conv.id == "c1");
  REQUIRE(conv.utterances.size() == 2);
  CHECK(c.speakers.size() == 2);
  CHECK(c.speakers.name(conv.utterances[0].speaker) == "A");
  CHECK(c.speakers.name(conv.utterances[1].speaker) == "B");
  CHECK(conv.utterances[1].emotion == 1);
  CHECK(conv.utterances[1].turn_index == 1);
  CHECK(conv.utterances[0].tokens == std::vector<std::string>{"hi"});
}

TEST_CASE("parse_corpus: unknown label names the label and line") {
  const std::string text =
      "\n"
      R"({"id": "c1", "turns": [{"speaker": "A", "text": "yay", "emotion": "joy"}]})";
  try {
    parse(text);
    FAIL("expected UnknownLabelError");
  } catch (const UnknownLabelError& e) {
    CHECK(e.label() == "joy");
    CHECK(e.line() == 2);
    CHECK(std::string(e.what()).find("joy") != std::string::npos);
  }
}

TEST_CASE("parse_corpus: malformed records carry line numbers") {
  auto line_of = [](const std::string& text) {
    try {
      parse(text);
    } catch (const ParseError& e) {
      return e.line();
    }
    return std::size_t{0};
  };
  CHECK(line_of(R"({"id": "a", "turns": [{"speaker": "A", "emotion": "neutral"}]})"
                "\n{not json}\n") == 2);
  CHECK(line_of(R"({"id": "a", "turns": []})") == 1);
  CHECK(line_of(R"({"turns": [{"speaker": "A", "emotion": "neutral"}]})") == 1);
  CHECK(line_of(R"({"id": "a", "turns": [{"emotion": "neutral"}]})") == 1);
}

TEST_CASE("emotion-only records are accepted") {
  const auto c = parse(R"({"id": "a", "turns": [{"speaker": "A", "emotion": "fear"}]})");
  CHECK(c.emotion_only());
  CHECK(c.conversations[0].utterances[0].tokens.empty());
}

TEST_CASE("class_distribution") {
  const auto c = parse(
      R"({"id": "x", "turns": [{"speaker": "A", "emotion": "neutral"}, {"speaker": "B", "emotion": "neutral"}, )"
      R"({"speaker": "A", "emotion": "anger"}]})");
  const auto d = class_distribution(c);
  CHECK(d.counts == std::vector<std::int64_t>{2, 1, 0, 0, 0, 0, 0});

  Rng rng(5);
  auto r = testing::random_corpus(rng, 30, 9, 3, 5);
  auto doubled = r;
  for (auto conv : r.conversations) {
    conv.id += "-copy";
    doubled.conversations.push_back(conv);
  }
  auto twice = class_distribution(r);
  twice += class_distribution(r);
  CHECK(class_distribution(doubled) == twice);
  CHECK(class_distribution(r).total() == static_cast<std::int64_t>(r.utterance_count()));
}

TEST_CASE("serialize then parse is the identity") {
  Rng rng(11);
  for (int round = 0; round < 20; ++round) {
    const auto original = testing::random_corpus(rng, 8, 7, 4, 6);
    std::ostringstream out;
    serialize_corpus(original, out);
    std::istringstream in(out.str());
    const auto back = parse_corpus(in, original.label_set);
    std::ostringstream again;
    serialize_corpus(back, again);
    CHECK(again.str() == out.str());
    REQUIRE(back.conversations.size() == original.conversations.size());
    for (std::size_t i = 0; i < back.conversations.size(); ++i) {
      const auto& a = original.conversations[i];
      const auto& b = back.conversations[i];
      CHECK(a.id == b.id);
      REQUIRE(a.utterances.size() == b.utterances.size());
      for (std::size_t t = 0; t < a.utterances.size(); ++t) {
        CHECK(a.utterances[t].emotion == b.utterances[t].emotion);
        CHECK(a.utterances[t].text == b.utterances[t].text);
        CHECK(original.speakers.name(a.utterances[t].speaker) == back.speakers.name(b.utterances[t].speaker));
      }
    }
  }
}

TEST_CASE("speaker ids follow first appearance") {
  const std::string text =
      R"({"id": "1", "turns": [{"speaker": "Zed", "emotion": "neutral"}, {"speaker": "amy", "emotion": "neutral"}]})"
      "\n"
      R"({"id": "2", "turns": [{"speaker": "Amy", "emotion": "neutral"}, {"speaker": "Zed", "emotion": "neutral"}]})";
  const auto a = parse(text);
  const auto b = parse(text);
  CHECK(a.speakers.names() == std::vector<std::string>{"Zed", "amy", "Amy"});
  CHECK(a.speakers.names() == b.speakers.names());
}

TEST_CASE("validate") {
  auto good = testing::self_dependent_corpus(1, {.conversations = 5, .length = 6});
  CHECK(validate(good).ok());

  SUBCASE("three speakers in a dyadic corpus") {
    auto c = good;
    c.conversations[2].utterances[4].speaker = c.speakers.intern("C");
    const auto report = validate(c);
    REQUIRE(report.violations.size() == 1);
    CHECK(report.violations[0].conversation_id == "syn-2");
  }
  SUBCASE("single speaker in a dyadic corpus") {
    auto c = good;
    for (auto& u : c.conversations[0].utterances) u.speaker = 0;
    CHECK_FALSE(validate(c).ok());
  }
  SUBCASE("turn index gap") {
    auto c = good;
    c.conversations[1].utterances[3].turn_index = 7;
    const auto report = validate(c);
    REQUIRE(report.violations.size() == 1);
    CHECK(report.violations[0].conversation_id == "syn-1");
  }
  SUBCASE("duplicate ids") {
    auto c = good;
    c.conversations[1].id = c.conversations[0].id;
    CHECK_FALSE(validate(c).ok());
  }
  SUBCASE("label out of range") {
    auto c = good;
    c.conversations[0].utterances[0].emotion = 99;
    CHECK_FALSE(validate(c).ok());
  }
}

TEST_CASE("importers: dailydialog") {
  std::istringstream text("Hi there . __eou__ Hello ! __eou__ Bye . __eou__\nHow are you ? __eou__ Fine . __eou__\n");
  std::istringstream emo("0 4 0\n3 0\n");
  const auto c = importers::dailydialog(text, emo);
  REQUIRE(c.conversations.size() == 2);
  CHECK(c.kind == CorpusKind::dyadic);
  CHECK(c.conversations[0].id == "dd-0");
  CHECK(c.conversations[0].utterances.size() == 3);
  CHECK(c.conversations[0].utterances[1].text == "Hello !");
  CHECK(c.label_set.name(c.conversations[0].utterances[1].emotion) == "happiness");
  CHECK(c.label_set.name(c.conversations[1].utterances[0].emotion) == "fear");
  CHECK(c.speakers.name(c.conversations[1].utterances[1].speaker) == "B");
  CHECK(validate(c).ok());

  std::istringstream bad_text("A __eou__ B __eou__\n");
  std::istringstream bad_emo("0\n");
  CHECK_THROWS_AS(importers::dailydialog(bad_text, bad_emo), ParseError);
}

TEST_CASE("importers: meld csv with quoted fields") {
  std::istringstream csv(
      "Sr No.,Utterance,Speaker,Emotion,Sentiment,Dialogue_ID,Utterance_ID\n"
      "1,\"Oh, really?\",Joey,surprise,positive,0,0\n"
      "2,\"He said \"\"no\"\"\",Rachel,anger,negative,0,1\n"
      "3,Hi,Monica,joy,positive,1,0\n");
  const auto c = importers::meld_csv(csv, EmotionLabelSet::preset("meld"));
  REQUIRE(c.conversations.size() == 2);
  CHECK(c.conversations[0].id == "meld-0");
  CHECK(c.conversations[0].utterances[0].text == "Oh, really?");
  CHECK(c.conversations[0].utterances[1].text == "He said \"no\"");
  CHECK(c.speakers.name(c.conversations[1].utterances[0].speaker) == "Monica");

  std::istringstream unknown("Utterance,Speaker,Emotion,Dialogue_ID\nx,A,bored,0\n");
  CHECK_THROWS_AS(importers::meld_csv(unknown, EmotionLabelSet::preset("meld")), UnknownLabelError);
}

TEST_CASE("importers: emotionlines json") {
  std::istringstream js(
      R"([[{"speaker": "Ross", "utterance": "Hi", "emotion": "neutral"},)"
      R"( {"speaker": "Joey", "utterance": "Hey!", "emotion": "joy"}]])");
  const auto c = importers::emotionlines_json(js, EmotionLabelSet::preset("friends"));
  REQUIRE(c.conversations.size() == 1);
  CHECK(c.conversations[0].id == "el-0");
  CHECK(c.conversations[0].utterances.size() == 2);
}
