#include "pec/importers.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <map>

namespace pec::importers {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

Utterance make_utterance(Corpus& corpus, const std::string& speaker, std::string text, LabelId emotion,
                         std::size_t turn) {
  Utterance u;
  u.speaker = corpus.speakers.intern(speaker);
  u.text = std::move(text);
  u.tokens = split_whitespace(u.text);
  u.emotion = emotion;
  u.turn_index = turn;
  return u;
}

}  // namespace

Corpus dailydialog(std::istream& text, std::istream& emotions) {
  Corpus corpus;
  corpus.label_set = EmotionLabelSet::preset("dailydialog");
  corpus.kind = CorpusKind::dyadic;

  std::string text_line;
  std::string emo_line;
  std::size_t line_no = 0;
  while (std::getline(text, text_line)) {
    ++line_no;
    if (!std::getline(emotions, emo_line)) {
      throw ParseError(line_no, "emotion file has fewer lines than text file");
    }
    if (trim(text_line).empty()) continue;

    std::vector<std::string> utterances;
    const std::string_view marker = "__eou__";
    std::string_view rest = text_line;
    while (true) {
      const auto pos = rest.find(marker);
      if (pos == std::string_view::npos) {
        if (!trim(rest).empty()) utterances.push_back(trim(rest));
        break;
      }
      utterances.push_back(trim(rest.substr(0, pos)));
      rest.remove_prefix(pos + marker.size());
    }
    const auto codes = split_whitespace(emo_line);
    if (codes.size() != utterances.size()) {
      throw ParseError(line_no, "text has " + std::to_string(utterances.size()) + " utterances but " +
                                    std::to_string(codes.size()) + " emotion codes");
    }

    Conversation conv;
    conv.id = "dd-" + std::to_string(line_no - 1);
    for (std::size_t i = 0; i < utterances.size(); ++i) {
      int code = -1;
      try {
        code = std::stoi(codes[i]);
      } catch (const std::exception&) {
      }
      if (code < 0 || code >= static_cast<int>(corpus.label_set.size())) {
        throw ParseError(line_no, "invalid emotion code \"" + codes[i] + "\"");
      }
      conv.utterances.push_back(make_utterance(corpus, i % 2 == 0 ? "A" : "B", utterances[i],
                                               static_cast<LabelId>(code), i));
    }
    corpus.conversations.push_back(std::move(conv));
  }
  return corpus;
}

bool read_csv_record(std::istream& in, std::vector<std::string>& fields) {
  fields.clear();
  if (in.peek() == std::char_traits<char>::eof()) return false;

  std::string field;
  bool quoted = false;
  bool any = false;
  char ch = 0;
  while (in.get(ch)) {
    any = true;
    if (quoted) {
      if (ch == '"') {
        if (in.peek() == '"') {
          in.get(ch);
          field.push_back('"');
        } else {
          quoted = false;
        }
      } else {
        field.push_back(ch);
      }
      continue;
    }
    if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (ch == '\n') {
      break;
    } else if (ch != '\r') {
      field.push_back(ch);
    }
  }
  if (!any) return false;
  fields.push_back(std::move(field));
  return true;
}

Corpus meld_csv(std::istream& csv, const EmotionLabelSet& labels) {
  Corpus corpus;
  corpus.label_set = labels;
  corpus.kind = CorpusKind::group;

  std::vector<std::string> header;
  if (!read_csv_record(csv, header)) return corpus;
  auto column = [&](std::string_view name) {
    auto it = std::find_if(header.begin(), header.end(), [&](const std::string& h) { return trim(h) == name; });
    if (it == header.end()) throw ParseError(1, "missing column \"" + std::string(name) + "\"");
    return static_cast<std::size_t>(it - header.begin());
  };
  const auto c_utt = column("Utterance");
  const auto c_spk = column("Speaker");
  const auto c_emo = column("Emotion");
  const auto c_dlg = column("Dialogue_ID");

  std::map<std::string, std::size_t> by_dialogue;
  std::vector<std::string> fields;
  std::size_t record_no = 1;
  while (read_csv_record(csv, fields)) {
    ++record_no;
    if (fields.size() == 1 && trim(fields[0]).empty()) continue;
    if (fields.size() < header.size()) {
      throw ParseError(record_no, "expected " + std::to_string(header.size()) + " fields, got " +
                                      std::to_string(fields.size()));
    }
    const std::string dialogue = trim(fields[c_dlg]);
    const std::string emotion = trim(fields[c_emo]);
    auto id = labels.find(emotion);
    if (!id) throw UnknownLabelError(emotion, record_no);

    auto [it, inserted] = by_dialogue.emplace(dialogue, corpus.conversations.size());
    if (inserted) {
      corpus.conversations.emplace_back();
      corpus.conversations.back().id = "meld-" + dialogue;
    }
    auto& conv = corpus.conversations[it->second];
    conv.utterances.push_back(
        make_utterance(corpus, trim(fields[c_spk]), trim(fields[c_utt]), *id, conv.utterances.size()));
  }
  return corpus;
}

Corpus emotionlines_json(std::istream& json, const EmotionLabelSet& labels) {
  Corpus corpus;
  corpus.label_set = labels;
  corpus.kind = CorpusKind::group;

  nlohmann::json doc;
  try {
    json >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(1, std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_array()) throw ParseError(1, "expected a top-level array of dialogues");

  std::size_t index = 0;
  for (const auto& dialogue : doc) {
    if (!dialogue.is_array()) throw ParseError(1, "dialogue " + std::to_string(index) + " is not an array");
    Conversation conv;
    conv.id = "el-" + std::to_string(index);
    for (const auto& turn : dialogue) {
      const auto emotion = turn.value("emotion", std::string());
      auto id = labels.find(emotion);
      if (!id) throw UnknownLabelError(emotion, 1);
      conv.utterances.push_back(make_utterance(corpus, turn.value("speaker", std::string()),
                                               turn.value("utterance", std::string()), *id,
                                               conv.utterances.size()));
    }
    if (!conv.utterances.empty()) corpus.conversations.push_back(std::move(conv));
    ++index;
  }
  return corpus;
}

}  // namespace pec::importers
