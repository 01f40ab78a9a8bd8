#pragma once

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pec/corpus.hpp"

namespace pec {

/// Which prior turns feed the lookback window.
///   all   - the w immediately preceding turns (wLB)
///   self  - the target speaker's own w most recent turns (wSLB)
///   other - the w most recent turns by anyone else (wOLB)
enum class Dependency { all, self, other };

std::string_view to_string(Dependency d);
Dependency parse_dependency(std::string_view text);
/// "LB", "SLB", "OLB".
std::string_view model_suffix(Dependency d);

struct WindowTurn {
  SpeakerId speaker = 0;
  std::string text;
  std::vector<std::string> tokens;
  LabelId emotion = 0;
  std::size_t turn = 0;
};

struct Sample {
  std::string conversation_id;
  /// Conversation order, all turns strictly before target_turn.
  std::vector<WindowTurn> window;
  LabelId target_emotion = 0;
  SpeakerId target_speaker = 0;
  std::size_t target_turn = 0;
  Dependency dependency = Dependency::all;
};

struct SampleSet {
  std::vector<Sample> samples;
  std::size_t w = 1;
  Dependency dependency = Dependency::all;
  EmotionLabelSet label_set;
  /// Speaker names for the ids used in samples.
  SpeakerRegistry speakers;

  std::size_t size() const noexcept { return samples.size(); }
  bool empty() const noexcept { return samples.empty(); }
  /// Same w, dependency, labels and speakers; no samples.
  SampleSet like() const;
};

/// Conversations of length L <= w contribute nothing.
SampleSet extract_wlb(const Corpus& corpus, std::size_t w);
/// Targets whose speaker has fewer than w earlier turns are skipped.
SampleSet extract_wslb(const Corpus& corpus, std::size_t w);
/// Targets with fewer than w earlier turns by other speakers are skipped.
SampleSet extract_wolb(const Corpus& corpus, std::size_t w);
SampleSet extract(const Corpus& corpus, std::size_t w, Dependency dependency);

/// True if the sample satisfies every Sample invariant for its mode and w.
bool sample_invariants_hold(const Sample& sample, std::size_t w);

enum class SplitMode { sample, conversation };
std::string_view to_string(SplitMode m);
SplitMode parse_split_mode(std::string_view text);

/// Seeded shuffle then prefix/suffix split at floor(fraction * N).
/// Conversation mode shuffles conversation ids instead and cuts at
/// floor(fraction * #conversations), keeping each conversation on one side.
std::pair<SampleSet, SampleSet> split(const SampleSet& set, double train_fraction, std::uint64_t seed,
                                      SplitMode mode = SplitMode::sample);

/// Counts of target_emotion.
LabelDistribution label_distribution(const SampleSet& set);

/// One JSON record per line:
///   {"cid", "target_turn", "target_emotion", "target_speaker", "window": [...]}
void serialize_samples(const SampleSet& set, std::ostream& out);

}  // namespace pec
