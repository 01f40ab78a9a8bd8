#pragma once

#include <cstdint>
#include <ostream>
#include <string_view>
#include <vector>

#include "pec/corpus.hpp"

namespace pec {

/// How source/destination utterances are paired.
///   positional   - e_i -> e_{i+gap} inside one conversation
///   same_speaker - each utterance -> the same speaker's next utterance
enum class TransitionPairing { positional, same_speaker };

std::string_view to_string(TransitionPairing p);
TransitionPairing parse_pairing(std::string_view text);

struct TransitionOptions {
  std::size_t gap = 1;
  TransitionPairing pairing = TransitionPairing::positional;
  /// Restrict to two-speaker conversations whose speakers strictly alternate.
  bool alternating_dyadic_only = false;
};

struct TransitionMatrix {
  std::size_t gap = 1;
  /// counts[r][c] = number of (r -> c) pairs.
  std::vector<std::vector<std::int64_t>> counts;
  /// Row-normalised counts; rows without support are all zero.
  std::vector<std::vector<double>> probabilities;
  std::vector<std::int64_t> support;

  std::size_t size() const noexcept { return support.size(); }
  bool row_empty(std::size_t r) const { return support.at(r) == 0; }
  /// Lowest column index among the row maxima.
  std::size_t row_argmax(std::size_t r) const;
};

/// Never pairs across conversation boundaries. Throws ConfigError if gap == 0.
TransitionMatrix transition_matrix(const Corpus& corpus, const TransitionOptions& options);
TransitionMatrix transition_matrix(const Corpus& corpus, std::size_t gap);

bool strictly_alternating_dyadic(const Conversation& conv);

/// Emotion counts over one speaker's utterances; all zero if absent.
LabelDistribution speaker_distribution(const Corpus& corpus, SpeakerId speaker);
LabelDistribution speaker_distribution(const Corpus& corpus, std::string_view speaker_name);

/// Header row and column carry label names; cells are probabilities.
void write_transition_csv(const TransitionMatrix& m, const EmotionLabelSet& labels, std::ostream& out);
/// {"labels", "gap", "pairing", "matrix", "counts", "support", "empty_rows"}
void write_transition_json(const TransitionMatrix& m, const EmotionLabelSet& labels,
                           const TransitionOptions& options, std::ostream& out);

}  // namespace pec
