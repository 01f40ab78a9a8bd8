#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace pec {

using LabelId = std::uint32_t;

/// Ordered, duplicate-free set of emotion names; ids are positions.
class EmotionLabelSet {
 public:
  EmotionLabelSet() = default;
  /// Throws ConfigError on empty or duplicate names.
  explicit EmotionLabelSet(std::vector<std::string> names);

  /// Presets: dailydialog, meld, friends, iemocap.
  static EmotionLabelSet preset(std::string_view name);
  static std::vector<std::string> preset_names();
  /// JSON array of strings.
  static EmotionLabelSet from_json(std::istream& in);

  std::size_t size() const noexcept { return names_.size(); }
  const std::string& name(LabelId id) const { return names_.at(id); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  std::optional<LabelId> find(std::string_view name) const;
  /// Throws ConfigError naming the label.
  LabelId id(std::string_view name) const;

  bool operator==(const EmotionLabelSet& other) const { return names_ == other.names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, LabelId> index_;
};

/// Per-label counts.
struct LabelDistribution {
  std::vector<std::int64_t> counts;

  LabelDistribution() = default;
  explicit LabelDistribution(std::size_t num_labels) : counts(num_labels, 0) {}
  explicit LabelDistribution(std::vector<std::int64_t> c) : counts(std::move(c)) {}

  std::size_t size() const noexcept { return counts.size(); }
  std::int64_t total() const noexcept;
  void add(LabelId label, std::int64_t n = 1) { counts.at(label) += n; }
  LabelDistribution& operator+=(const LabelDistribution& other);
  bool operator==(const LabelDistribution&) const = default;
};

}  // namespace pec
