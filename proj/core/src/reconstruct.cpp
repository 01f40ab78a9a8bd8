#include "pec/reconstruct.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "pec/rng.hpp"

namespace pec {

std::string_view to_string(Dependency d) {
  switch (d) {
    case Dependency::all: return "all";
    case Dependency::self: return "self";
    case Dependency::other: return "other";
  }
  return "all";
}

Dependency parse_dependency(std::string_view text) {
  if (text == "all") return Dependency::all;
  if (text == "self") return Dependency::self;
  if (text == "other") return Dependency::other;
  throw ConfigError("dependency must be all, self or other, got \"" + std::string(text) + "\"");
}

std::string_view model_suffix(Dependency d) {
  switch (d) {
    case Dependency::all: return "LB";
    case Dependency::self: return "SLB";
    case Dependency::other: return "OLB";
  }
  return "LB";
}

std::string_view to_string(SplitMode m) { return m == SplitMode::sample ? "sample" : "conversation"; }

SplitMode parse_split_mode(std::string_view text) {
  if (text == "sample") return SplitMode::sample;
  if (text == "conversation") return SplitMode::conversation;
  throw ConfigError("split mode must be sample or conversation, got \"" + std::string(text) + "\"");
}

SampleSet SampleSet::like() const {
  SampleSet out;
  out.w = w;
  out.dependency = dependency;
  out.label_set = label_set;
  out.speakers = speakers;
  return out;
}

namespace {

WindowTurn to_window_turn(const Utterance& u) {
  return WindowTurn{u.speaker, u.text, u.tokens, u.emotion, u.turn_index};
}

bool admits(Dependency d, SpeakerId candidate, SpeakerId target) {
  switch (d) {
    case Dependency::all: return true;
    case Dependency::self: return candidate == target;
    case Dependency::other: return candidate != target;
  }
  return false;
}

}  // namespace

SampleSet extract(const Corpus& corpus, std::size_t w, Dependency dependency) {
  if (w == 0) throw ConfigError("lookback w must be >= 1");
  SampleSet set;
  set.w = w;
  set.dependency = dependency;
  set.label_set = corpus.label_set;
  set.speakers = corpus.speakers;

  std::vector<std::size_t> picked;
  for (const auto& conv : corpus.conversations) {
    const auto& utts = conv.utterances;
    for (std::size_t t = 0; t < utts.size(); ++t) {
      const SpeakerId target = utts[t].speaker;
      // Walk backwards collecting the w most recent admissible turns.
      picked.clear();
      for (std::size_t j = t; j-- > 0 && picked.size() < w;) {
        if (admits(dependency, utts[j].speaker, target)) picked.push_back(j);
      }
      if (picked.size() < w) continue;

      Sample s;
      s.conversation_id = conv.id;
      s.target_emotion = utts[t].emotion;
      s.target_speaker = target;
      s.target_turn = t;
      s.dependency = dependency;
      s.window.reserve(w);
      for (auto it = picked.rbegin(); it != picked.rend(); ++it) s.window.push_back(to_window_turn(utts[*it]));
      set.samples.push_back(std::move(s));
    }
  }
  return set;
}

SampleSet extract_wlb(const Corpus& corpus, std::size_t w) { return extract(corpus, w, Dependency::all); }
SampleSet extract_wslb(const Corpus& corpus, std::size_t w) { return extract(corpus, w, Dependency::self); }
SampleSet extract_wolb(const Corpus& corpus, std::size_t w) { return extract(corpus, w, Dependency::other); }

bool sample_invariants_hold(const Sample& sample, std::size_t w) {
  if (sample.window.size() != w) return false;
  for (std::size_t i = 0; i < sample.window.size(); ++i) {
    const auto& turn = sample.window[i];
    if (turn.turn >= sample.target_turn) return false;
    if (i > 0 && sample.window[i - 1].turn >= turn.turn) return false;
    if (sample.dependency == Dependency::self && turn.speaker != sample.target_speaker) return false;
    if (sample.dependency == Dependency::other && turn.speaker == sample.target_speaker) return false;
  }
  if (sample.dependency == Dependency::all && !sample.window.empty()) {
    // contiguous block ending right before the target
    if (sample.window.back().turn + 1 != sample.target_turn) return false;
    if (sample.window.back().turn + 1 - sample.window.front().turn != w) return false;
  }
  return true;
}

std::pair<SampleSet, SampleSet> split(const SampleSet& set, double train_fraction, std::uint64_t seed,
                                      SplitMode mode) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ConfigError("split fraction must lie in (0, 1)");
  }
  if (set.size() < 2) throw ConfigError("cannot split a sample set with fewer than 2 samples");

  Rng rng(seed);
  SampleSet train = set.like();
  SampleSet test = set.like();

  if (mode == SplitMode::sample) {
    std::vector<std::size_t> order(set.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.shuffle(std::span<std::size_t>(order));
    const auto cut = static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(set.size())));
    for (std::size_t i = 0; i < order.size(); ++i) {
      (i < cut ? train : test).samples.push_back(set.samples[order[i]]);
    }
    return {std::move(train), std::move(test)};
  }

  std::vector<std::string> ids;
  std::unordered_set<std::string> seen;
  for (const auto& s : set.samples)
    if (seen.insert(s.conversation_id).second) ids.push_back(s.conversation_id);
  if (ids.size() < 2) throw ConfigError("conversation split needs samples from at least 2 conversations");
  rng.shuffle(std::span<std::string>(ids));
  const auto cut = static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(ids.size())));
  std::unordered_set<std::string> train_ids(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(cut));
  for (const auto& s : set.samples) (train_ids.count(s.conversation_id) ? train : test).samples.push_back(s);
  return {std::move(train), std::move(test)};
}

LabelDistribution label_distribution(const SampleSet& set) {
  LabelDistribution dist(set.label_set.size());
  for (const auto& s : set.samples) dist.add(s.target_emotion);
  return dist;
}

void serialize_samples(const SampleSet& set, std::ostream& out) {
  for (const auto& s : set.samples) {
    nlohmann::ordered_json rec;
    rec["cid"] = s.conversation_id;
    rec["target_turn"] = s.target_turn;
    rec["target_emotion"] = set.label_set.name(s.target_emotion);
    rec["target_speaker"] = set.speakers.name(s.target_speaker);
    auto window = nlohmann::ordered_json::array();
    for (const auto& t : s.window) {
      nlohmann::ordered_json turn;
      turn["turn"] = t.turn;
      turn["speaker"] = set.speakers.name(t.speaker);
      turn["text"] = t.text;
      turn["emotion"] = set.label_set.name(t.emotion);
      window.push_back(std::move(turn));
    }
    rec["window"] = std::move(window);
    out << rec.dump() << '\n';
  }
}

}  // namespace pec
