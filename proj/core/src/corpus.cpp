#include "pec/corpus.hpp"

#include <nlohmann/json.hpp>

#include <set>
#include <unordered_set>

namespace pec {

SpeakerId SpeakerRegistry::intern(const std::string& name) {
  auto [it, inserted] = index_.emplace(name, static_cast<SpeakerId>(names_.size()));
  if (inserted) names_.push_back(name);
  return it->second;
}

std::optional<SpeakerId> SpeakerRegistry::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t Conversation::distinct_speakers() const {
  std::set<SpeakerId> seen;
  for (const auto& u : utterances) seen.insert(u.speaker);
  return seen.size();
}

std::string_view to_string(CorpusKind kind) { return kind == CorpusKind::dyadic ? "dyadic" : "group"; }

CorpusKind parse_corpus_kind(std::string_view text) {
  if (text == "dyadic") return CorpusKind::dyadic;
  if (text == "group") return CorpusKind::group;
  throw ConfigError("corpus kind must be dyadic or group, got \"" + std::string(text) + "\"");
}

std::size_t Corpus::utterance_count() const {
  std::size_t n = 0;
  for (const auto& c : conversations) n += c.size();
  return n;
}

bool Corpus::emotion_only() const {
  for (const auto& c : conversations)
    for (const auto& u : c.utterances)
      if (!u.tokens.empty()) return false;
  return true;
}

std::vector<std::string> split_whitespace(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  const auto is_space = [](char ch) {
    return ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r' || ch == '\f' || ch == '\v';
  };
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t start = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    if (i > start) out.emplace_back(text.substr(start, i - start));
  }
  return out;
}

namespace {

const nlohmann::json& require(const nlohmann::json& obj, const char* key, std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(line, std::string("missing field \"") + key + "\"");
  return *it;
}

std::string require_string(const nlohmann::json& obj, const char* key, std::size_t line) {
  const auto& v = require(obj, key, line);
  if (!v.is_string()) throw ParseError(line, std::string("field \"") + key + "\" must be a string");
  return v.get<std::string>();
}

}  // namespace

Corpus parse_corpus(std::istream& in, const EmotionLabelSet& label_set, CorpusKind kind,
                    Diagnostics* diagnostics) {
  Corpus corpus;
  corpus.label_set = label_set;
  corpus.kind = kind;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;

    nlohmann::json record;
    try {
      record = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(line_no, std::string("malformed JSON: ") + e.what());
    }
    if (!record.is_object()) throw ParseError(line_no, "record must be a JSON object");

    Conversation conv;
    conv.id = require_string(record, "id", line_no);
    const auto& turns = require(record, "turns", line_no);
    if (!turns.is_array()) throw ParseError(line_no, "field \"turns\" must be an array");
    if (turns.empty()) throw ParseError(line_no, "conversation \"" + conv.id + "\" has no turns");

    conv.utterances.reserve(turns.size());
    for (const auto& turn : turns) {
      if (!turn.is_object()) throw ParseError(line_no, "turn must be a JSON object");
      Utterance u;
      u.speaker = corpus.speakers.intern(require_string(turn, "speaker", line_no));
      u.text = turn.contains("text") ? require_string(turn, "text", line_no) : std::string();
      u.tokens = split_whitespace(u.text);
      const std::string emotion = require_string(turn, "emotion", line_no);
      auto id = label_set.find(emotion);
      if (!id) throw UnknownLabelError(emotion, line_no);
      u.emotion = *id;
      u.turn_index = conv.utterances.size();
      conv.utterances.push_back(std::move(u));
    }
    corpus.conversations.push_back(std::move(conv));
  }

  if (corpus.conversations.empty() && diagnostics != nullptr) {
    diagnostics->warn("corpus contains no conversations");
  }
  return corpus;
}

void serialize_corpus(const Corpus& corpus, std::ostream& out) {
  for (const auto& conv : corpus.conversations) {
    nlohmann::ordered_json record;
    record["id"] = conv.id;
    auto turns = nlohmann::ordered_json::array();
    for (const auto& u : conv.utterances) {
      nlohmann::ordered_json turn;
      turn["speaker"] = corpus.speakers.name(u.speaker);
      turn["text"] = u.text;
      turn["emotion"] = corpus.label_set.name(u.emotion);
      turns.push_back(std::move(turn));
    }
    record["turns"] = std::move(turns);
    out << record.dump() << '\n';
  }
}

CorpusKind infer_kind(const Corpus& corpus) {
  if (corpus.conversations.empty()) return CorpusKind::group;
  for (const auto& c : corpus.conversations)
    if (c.distinct_speakers() != 2) return CorpusKind::group;
  return CorpusKind::dyadic;
}

LabelDistribution class_distribution(const Corpus& corpus) {
  LabelDistribution dist(corpus.label_set.size());
  for (const auto& c : corpus.conversations)
    for (const auto& u : c.utterances) dist.add(u.emotion);
  return dist;
}

ValidationReport validate(const Corpus& corpus) {
  ValidationReport report;
  auto flag = [&](const std::string& id, std::string msg) {
    report.violations.push_back({id, std::move(msg)});
  };

  std::unordered_set<std::string> ids;
  for (const auto& conv : corpus.conversations) {
    if (!ids.insert(conv.id).second) flag(conv.id, "duplicate conversation id");
    if (conv.utterances.empty()) {
      flag(conv.id, "conversation has no utterances");
      continue;
    }
    for (std::size_t i = 0; i < conv.utterances.size(); ++i) {
      const auto& u = conv.utterances[i];
      if (u.turn_index != i) {
        flag(conv.id, "turn_index " + std::to_string(u.turn_index) + " at position " + std::to_string(i));
      }
      if (u.emotion >= corpus.label_set.size()) {
        flag(conv.id, "emotion id " + std::to_string(u.emotion) + " out of range at turn " + std::to_string(i));
      }
      if (u.speaker >= corpus.speakers.size()) {
        flag(conv.id, "speaker id " + std::to_string(u.speaker) + " not registered at turn " + std::to_string(i));
      }
    }
    if (corpus.kind == CorpusKind::dyadic) {
      const auto n = conv.distinct_speakers();
      if (n != 2) flag(conv.id, "dyadic conversation has " + std::to_string(n) + " distinct speakers");
    }
  }
  return report;
}

}  // namespace pec
