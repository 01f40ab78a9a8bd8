#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "pec/error.hpp"
#include "pec/labels.hpp"

namespace pec {

using SpeakerId = std::uint32_t;

/// Speaker names interned in first-appearance order; case-sensitive.
class SpeakerRegistry {
 public:
  SpeakerId intern(const std::string& name);
  std::optional<SpeakerId> find(std::string_view name) const;
  const std::string& name(SpeakerId id) const { return names_.at(id); }
  std::size_t size() const noexcept { return names_.size(); }
  const std::vector<std::string>& names() const noexcept { return names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, SpeakerId> index_;
};

struct Utterance {
  SpeakerId speaker = 0;
  std::string text;
  /// Whitespace-split raw text; empty for emotion-only corpora.
  std::vector<std::string> tokens;
  LabelId emotion = 0;
  std::size_t turn_index = 0;
};

struct Conversation {
  std::string id;
  std::vector<Utterance> utterances;

  std::size_t size() const noexcept { return utterances.size(); }
  std::size_t distinct_speakers() const;
};

enum class CorpusKind { dyadic, group };

std::string_view to_string(CorpusKind kind);
CorpusKind parse_corpus_kind(std::string_view text);

struct Corpus {
  EmotionLabelSet label_set;
  SpeakerRegistry speakers;
  std::vector<Conversation> conversations;
  CorpusKind kind = CorpusKind::group;

  std::size_t utterance_count() const;
  /// True when no utterance carries text.
  bool emotion_only() const;
};

/// Splits on ASCII whitespace.
std::vector<std::string> split_whitespace(std::string_view text);

/// Reads line-delimited conversation records:
///   {"id": str, "turns": [{"speaker": str, "text": str, "emotion": str}, ...]}
/// Blank lines are skipped. Throws ParseError (with line number) on malformed
/// records or empty turn lists, UnknownLabelError for labels outside the set.
Corpus parse_corpus(std::istream& in, const EmotionLabelSet& label_set,
                    CorpusKind kind = CorpusKind::group, Diagnostics* diagnostics = nullptr);

/// Inverse of parse_corpus; one record per line in conversation order.
void serialize_corpus(const Corpus& corpus, std::ostream& out);

/// dyadic when every conversation has exactly two speakers.
CorpusKind infer_kind(const Corpus& corpus);

/// Utterance-level emotion counts.
LabelDistribution class_distribution(const Corpus& corpus);

struct Violation {
  std::string conversation_id;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const noexcept { return violations.empty(); }
};

ValidationReport validate(const Corpus& corpus);

}  // namespace pec
