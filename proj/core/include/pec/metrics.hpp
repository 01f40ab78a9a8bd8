#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pec/labels.hpp"
#include "pec/reconstruct.hpp"

namespace pec {

/// 2pr / (p + r), or 0 when p + r == 0.
double f1(double precision, double recall);

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::int64_t support = 0;
};

struct EvalReport {
  std::vector<ClassMetrics> per_class;
  /// Mean of per-class F1 over the whole label set; absent classes count as 0.
  double macro_f1 = 0.0;
  double accuracy = 0.0;
  /// confusion[gold][predicted]
  std::vector<std::vector<std::int64_t>> confusion;
  std::string fingerprint;
  /// 1-based epoch the report was taken at; 0 when not from training.
  std::size_t epoch = 0;

  std::size_t num_classes() const noexcept { return per_class.size(); }
};

/// Throws ConfigError on empty input or size mismatch.
EvalReport evaluate_labels(std::span<const LabelId> gold, std::span<const LabelId> predicted, std::size_t num_classes);

using LabelPredictor = std::function<LabelId(const Sample&)>;

EvalReport evaluate(const LabelPredictor& predictor, const SampleSet& test);

nlohmann::ordered_json to_json(const EvalReport& report, const EmotionLabelSet& labels);

}  // namespace pec
