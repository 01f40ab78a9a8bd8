#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "pec/corpus.hpp"
#include "pec/embed.hpp"
#include "pec/rng.hpp"

namespace pec::testing {

/// Labels "e0".."e<k-1>".
EmotionLabelSet numbered_labels(std::size_t k);

struct DyadicOptions {
  std::size_t conversations = 200;
  std::size_t length = 10;
  std::size_t num_labels = 4;
  /// Probability that a speaker's next emotion follows their own rule.
  double persistence = 0.8;
  /// 0: repeat own previous emotion; 1: shift it by +1 (mod k).
  std::size_t shift = 0;
  /// Adds "t<emotion> f<noise>" as utterance text.
  bool with_text = true;
};

/// Strictly alternating two-speaker conversations where each speaker's
/// emotion depends only on their own previous emotion; the other speaker is
/// independent.
Corpus self_dependent_corpus(std::uint64_t seed, const DyadicOptions& options);

/// Arbitrary conversations: 1..max_speakers speakers drawn at random per
/// turn, lengths 1..max_length, uniform labels.
Corpus random_corpus(Rng& rng, std::size_t conversations, std::size_t max_length, std::size_t max_speakers,
                     std::size_t num_labels);

/// Vectors for the tokens used by self_dependent_corpus text: one-hot-ish
/// directions for "t<k>" and small noise for "f<n>".
EmbeddingTable synthetic_embeddings(std::size_t num_labels, std::size_t dim, std::uint64_t seed);

/// Token pipeline that keeps synthetic tokens intact.
TokenPipeline raw_pipeline(std::size_t max_tokens);

}  // namespace pec::testing
