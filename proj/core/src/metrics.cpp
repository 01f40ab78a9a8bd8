#include "pec/metrics.hpp"

#include "pec/error.hpp"

namespace pec {

double f1(double precision, double recall) {
  const double s = precision + recall;
  return s > 0.0 ? 2.0 * precision * recall / s : 0.0;
}

EvalReport evaluate_labels(std::span<const LabelId> gold, std::span<const LabelId> predicted, std::size_t num_classes) {
  if (gold.empty()) throw ConfigError("cannot evaluate on an empty test set");
  if (gold.size() != predicted.size()) throw ConfigError("gold and predicted label counts differ");

  EvalReport report;
  report.confusion.assign(num_classes, std::vector<std::int64_t>(num_classes, 0));
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i] >= num_classes || predicted[i] >= num_classes) throw ConfigError("label id out of range");
    ++report.confusion[gold[i]][predicted[i]];
  }

  report.per_class.resize(num_classes);
  std::int64_t correct = 0;
  double f1_sum = 0.0;
  for (std::size_t c = 0; c < num_classes; ++c) {
    const std::int64_t tp = report.confusion[c][c];
    std::int64_t gold_c = 0;
    std::int64_t pred_c = 0;
    for (std::size_t k = 0; k < num_classes; ++k) {
      gold_c += report.confusion[c][k];
      pred_c += report.confusion[k][c];
    }
    auto& m = report.per_class[c];
    m.support = gold_c;
    m.precision = pred_c > 0 ? static_cast<double>(tp) / static_cast<double>(pred_c) : 0.0;
    m.recall = gold_c > 0 ? static_cast<double>(tp) / static_cast<double>(gold_c) : 0.0;
    m.f1 = f1(m.precision, m.recall);
    f1_sum += m.f1;
    correct += tp;
  }
  report.macro_f1 = num_classes > 0 ? f1_sum / static_cast<double>(num_classes) : 0.0;
  report.accuracy = static_cast<double>(correct) / static_cast<double>(gold.size());
  return report;
}

EvalReport evaluate(const LabelPredictor& predictor, const SampleSet& test) {
  std::vector<LabelId> gold;
  std::vector<LabelId> pred;
  gold.reserve(test.size());
  pred.reserve(test.size());
  for (const auto& s : test.samples) {
    gold.push_back(s.target_emotion);
    pred.push_back(predictor(s));
  }
  return evaluate_labels(gold, pred, test.label_set.size());
}

nlohmann::ordered_json to_json(const EvalReport& report, const EmotionLabelSet& labels) {
  nlohmann::ordered_json j;
  j["macro_f1"] = report.macro_f1;
  j["accuracy"] = report.accuracy;
  j["epoch"] = report.epoch;
  j["fingerprint"] = report.fingerprint;
  auto classes = nlohmann::ordered_json::array();
  for (std::size_t c = 0; c < report.per_class.size(); ++c) {
    const auto& m = report.per_class[c];
    nlohmann::ordered_json row;
    row["label"] = c < labels.size() ? labels.name(static_cast<LabelId>(c)) : std::to_string(c);
    row["precision"] = m.precision;
    row["recall"] = m.recall;
    row["f1"] = m.f1;
    row["support"] = m.support;
    classes.push_back(std::move(row));
  }
  j["per_class"] = std::move(classes);
  j["confusion"] = report.confusion;
  return j;
}

}  // namespace pec
