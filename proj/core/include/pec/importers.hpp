#pragma once

#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "pec/corpus.hpp"

namespace pec::importers {

/// DailyDialog release: dialogues_text.txt (utterances separated by
/// "__eou__") and dialogues_emotion.txt (0=no emotion..6=surprise).
/// Speakers alternate "A"/"B". Conversation ids are "dd-<line>".
Corpus dailydialog(std::istream& text, std::istream& emotions);

/// MELD csv (Sr No.,Utterance,Speaker,Emotion,...,Dialogue_ID,Utterance_ID,...).
/// Rows are grouped by Dialogue_ID in first-appearance order.
Corpus meld_csv(std::istream& csv, const EmotionLabelSet& labels);

/// EmotionLines json: array of dialogues, each an array of
/// {"speaker", "utterance", "emotion"} objects.
Corpus emotionlines_json(std::istream& json, const EmotionLabelSet& labels);

/// RFC 4180 record reader; handles quoted fields with embedded commas,
/// doubled quotes, and newlines. Returns false at end of input.
bool read_csv_record(std::istream& in, std::vector<std::string>& fields);

}  // namespace pec::importers
