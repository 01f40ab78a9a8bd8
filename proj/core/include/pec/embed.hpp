#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "pec/error.hpp"

namespace pec {

enum class OovPolicy { zero, mean };

std::string_view to_string(OovPolicy p);
OovPolicy parse_oov_policy(std::string_view text);

/// Pretrained word vectors in the standard text format.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  EmbeddingTable(std::size_t dim, OovPolicy oov);

  /// Appends a vector; returns false (and keeps the first) on duplicates.
  bool add(const std::string& token, std::span<const double> vector);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t vocab_size() const noexcept { return index_.size(); }
  OovPolicy oov_policy() const noexcept { return oov_; }
  void set_oov_policy(OovPolicy p) noexcept { oov_ = p; }

  std::optional<std::size_t> find(std::string_view token) const;
  /// Row for a known token, or the OOV vector (zeros or the mean of all rows).
  std::span<const double> lookup(std::string_view token) const;

 private:
  void refresh_mean();

  std::size_t dim_ = 0;
  OovPolicy oov_ = OovPolicy::zero;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<double> vectors_;
  std::vector<double> zeros_;
  std::vector<double> mean_;
  std::vector<double> sum_;
};

/// Each line: token followed by dim floats. Tokens may contain spaces; the
/// trailing dim fields are the vector. Duplicate tokens keep their first
/// row and emit a warning. Throws ParseError (with line number) on a wrong
/// float count or an unparsable number.
EmbeddingTable load_embeddings(std::istream& in, std::size_t dim, OovPolicy oov = OovPolicy::zero,
                               Diagnostics* diagnostics = nullptr);

enum class Stemmer { none, suffix };

struct TokenPipeline {
  bool lowercase = true;
  bool strip_punctuation = true;
  /// Empty optional disables stopword removal.
  std::optional<std::unordered_set<std::string>> stopwords = default_stopwords();
  Stemmer stemmer = Stemmer::suffix;
  std::size_t max_tokens = 20;

  static std::unordered_set<std::string> default_stopwords();
};

/// Loads a whitespace-separated stopword list.
std::unordered_set<std::string> load_stopwords(std::istream& in);

/// Rule-based plural stripper: -ies -> -y, -sses -> -ss, -xes/-ches/-shes
/// drop "es", otherwise a trailing "s" is dropped unless the word ends in
/// ss/us/is or is shorter than 4 characters. Idempotent.
std::string strip_suffix(std::string_view word);

/// lowercase -> punctuation strip -> split -> stopword removal -> stemmer
/// (stems that land on a stopword are dropped too).
/// Apostrophes are deleted; other ASCII punctuation becomes a space.
std::vector<std::string> preprocess(std::string_view text, const TokenPipeline& pipeline);

/// Concatenates per-token vectors in order, zero-padded (or truncated) to
/// max_tokens * dim.
std::vector<double> encode_utterance(std::span<const std::string> tokens, const EmbeddingTable& table,
                                     std::size_t max_tokens);

}  // namespace pec
