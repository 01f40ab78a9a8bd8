#include "pec/labels.hpp"

#include <nlohmann/json.hpp>

#include <numeric>

#include "pec/error.hpp"

namespace pec {

EmotionLabelSet::EmotionLabelSet(std::vector<std::string> names) : names_(std::move(names)) {
  if (names_.empty()) throw ConfigError("emotion label set is empty");
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i].empty()) throw ConfigError("emotion label set contains an empty name");
    auto [it, inserted] = index_.emplace(names_[i], static_cast<LabelId>(i));
    if (!inserted) throw ConfigError("duplicate emotion label \"" + names_[i] + "\"");
  }
}

EmotionLabelSet EmotionLabelSet::preset(std::string_view name) {
  if (name == "dailydialog") {
    return EmotionLabelSet({"neutral", "anger", "disgust", "fear", "happiness", "sadness", "surprise"});
  }
  if (name == "meld") {
    return EmotionLabelSet({"neutral", "joy", "surprise", "anger", "sadness", "disgust", "fear"});
  }
  if (name == "friends") {
    return EmotionLabelSet(
        {"neutral", "joy", "surprise", "anger", "sadness", "disgust", "fear", "non-neutral"});
  }
  if (name == "iemocap") {
    return EmotionLabelSet({"neutral", "frustration", "anger", "sadness", "happiness", "excited",
                            "surprise", "fear", "disgust", "other", "xxx"});
  }
  throw ConfigError("unknown label-set preset \"" + std::string(name) + "\"");
}

std::vector<std::string> EmotionLabelSet::preset_names() {
  return {"dailydialog", "meld", "friends", "iemocap"};
}

EmotionLabelSet EmotionLabelSet::from_json(std::istream& in) {
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("label set file is not valid JSON: ") + e.what());
  }
  if (!j.is_array()) throw ConfigError("label set file must be a JSON array of strings");
  std::vector<std::string> names;
  for (const auto& item : j) {
    if (!item.is_string()) throw ConfigError("label set file must be a JSON array of strings");
    names.push_back(item.get<std::string>());
  }
  return EmotionLabelSet(std::move(names));
}

std::optional<LabelId> EmotionLabelSet::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

LabelId EmotionLabelSet::id(std::string_view name) const {
  if (auto found = find(name)) return *found;
  throw ConfigError("unknown emotion label \"" + std::string(name) + "\"");
}

std::int64_t LabelDistribution::total() const noexcept {
  return std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
}

LabelDistribution& LabelDistribution::operator+=(const LabelDistribution& other) {
  if (other.counts.size() != counts.size()) throw ConfigError("label distribution size mismatch");
  for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += other.counts[i];
  return *this;
}

}  // namespace pec
