#include "pec/analytics.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <unordered_map>

namespace pec {

std::string_view to_string(TransitionPairing p) {
  return p == TransitionPairing::positional ? "positional" : "same-speaker";
}

TransitionPairing parse_pairing(std::string_view text) {
  if (text == "positional") return TransitionPairing::positional;
  if (text == "same-speaker") return TransitionPairing::same_speaker;
  throw ConfigError("pairing must be positional or same-speaker; got \"" + std::string(text) + "\"");
}

std::size_t TransitionMatrix::row_argmax(std::size_t r) const {
  const auto& row = counts.at(r);
  std::size_t best = 0;
  for (std::size_t c = 1; c < row.size(); ++c)
    if (row[c] > row[best]) best = c;
  return best;
}

bool strictly_alternating_dyadic(const Conversation& conv) {
  if (conv.distinct_speakers() != 2) return false;
  for (std::size_t i = 1; i < conv.utterances.size(); ++i)
    if (conv.utterances[i].speaker == conv.utterances[i - 1].speaker) return false;
  return true;
}

TransitionMatrix transition_matrix(const Corpus& corpus, const TransitionOptions& options) {
  if (options.gap == 0) throw ConfigError("transition gap must be >= 1");
  const std::size_t k = corpus.label_set.size();
  TransitionMatrix m;
  m.gap = options.gap;
  m.counts.assign(k, std::vector<std::int64_t>(k, 0));
  m.support.assign(k, 0);

  for (const auto& conv : corpus.conversations) {
    if (options.alternating_dyadic_only && !strictly_alternating_dyadic(conv)) continue;
    const auto& u = conv.utterances;
    if (options.pairing == TransitionPairing::positional) {
      for (std::size_t i = 0; i + options.gap < u.size(); ++i) ++m.counts[u[i].emotion][u[i + options.gap].emotion];
    } else {
      std::unordered_map<SpeakerId, LabelId> previous;
      for (const auto& utt : u) {
        auto it = previous.find(utt.speaker);
        if (it != previous.end()) ++m.counts[it->second][utt.emotion];
        previous[utt.speaker] = utt.emotion;
      }
    }
  }

  m.probabilities.assign(k, std::vector<double>(k, 0.0));
  for (std::size_t r = 0; r < k; ++r) {
    for (auto c : m.counts[r]) m.support[r] += c;
    if (m.support[r] == 0) continue;
    for (std::size_t c = 0; c < k; ++c) {
      m.probabilities[r][c] = static_cast<double>(m.counts[r][c]) / static_cast<double>(m.support[r]);
    }
  }
  return m;
}

TransitionMatrix transition_matrix(const Corpus& corpus, std::size_t gap) {
  return transition_matrix(corpus, TransitionOptions{gap, TransitionPairing::positional, false});
}

LabelDistribution speaker_distribution(const Corpus& corpus, SpeakerId speaker) {
  LabelDistribution dist(corpus.label_set.size());
  for (const auto& conv : corpus.conversations)
    for (const auto& u : conv.utterances)
      if (u.speaker == speaker) dist.add(u.emotion);
  return dist;
}

LabelDistribution speaker_distribution(const Corpus& corpus, std::string_view speaker_name) {
  auto id = corpus.speakers.find(speaker_name);
  if (!id) return LabelDistribution(corpus.label_set.size());
  return speaker_distribution(corpus, *id);
}

void write_transition_csv(const TransitionMatrix& m, const EmotionLabelSet& labels, std::ostream& out) {
  out << "from\\to";
  for (const auto& name : labels.names()) out << ',' << name;
  out << '\n';
  char buf[32];
  for (std::size_t r = 0; r < m.size(); ++r) {
    out << labels.name(static_cast<LabelId>(r));
    for (double p : m.probabilities[r]) {
      std::snprintf(buf, sizeof buf, "%.6f", p);
      out << ',' << buf;
    }
    out << '\n';
  }
}

void write_transition_json(const TransitionMatrix& m, const EmotionLabelSet& labels,
                           const TransitionOptions& options, std::ostream& out) {
  nlohmann::ordered_json j;
  j["labels"] = labels.names();
  j["gap"] = m.gap;
  j["pairing"] = to_string(options.pairing);
  j["alternating_dyadic_only"] = options.alternating_dyadic_only;
  j["matrix"] = m.probabilities;
  j["counts"] = m.counts;
  j["support"] = m.support;
  auto empty = nlohmann::ordered_json::array();
  for (std::size_t r = 0; r < m.size(); ++r)
    if (m.row_empty(r)) empty.push_back(labels.name(static_cast<LabelId>(r)));
  j["empty_rows"] = std::move(empty);
  out << j.dump(2) << '\n';
}

}  // namespace pec
