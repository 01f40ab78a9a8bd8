#include "pec/training.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "pec/error.hpp"
#include "pec/nn/ops.hpp"

namespace pec {

std::string_view to_string(SeqType t) {
  switch (t) {
    case SeqType::E: return "E";
    case SeqType::T: return "T";
    case SeqType::ET: return "ET";
  }
  return "E";
}

SeqType parse_seq_type(std::string_view text) {
  if (text == "E") return SeqType::E;
  if (text == "T") return SeqType::T;
  if (text == "ET") return SeqType::ET;
  throw ConfigError("seq-type must be E, T or ET; got \"" + std::string(text) + "\"");
}

std::string_view to_string(MetricMode m) {
  switch (m) {
    case MetricMode::max_test: return "max";
    case MetricMode::final: return "final";
    case MetricMode::best_val: return "best-val";
  }
  return "max";
}

MetricMode parse_metric_mode(std::string_view text) {
  if (text == "max") return MetricMode::max_test;
  if (text == "final") return MetricMode::final;
  if (text == "best-val") return MetricMode::best_val;
  throw ConfigError("metric must be max, final or best-val; got \"" + std::string(text) + "\"");
}

Prediction make_prediction(std::vector<double> distribution) {
  Prediction p;
  p.label = static_cast<LabelId>(nn::argmax(distribution));
  p.distribution = std::move(distribution);
  return p;
}

std::size_t EpochHistory::max_test_epoch() const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < epochs.size(); ++i)
    if (epochs[i].test_macro_f1 > epochs[best].test_macro_f1) best = i;
  return epochs.empty() ? 0 : epochs[best].epoch;
}

double EpochHistory::max_test_macro_f1() const {
  return epochs.empty() ? 0.0 : epochs[max_test_epoch() - 1].test_macro_f1;
}

double EpochHistory::final_test_macro_f1() const { return epochs.empty() ? 0.0 : epochs.back().test_macro_f1; }

void write_history_csv(const EpochHistory& history, std::ostream& out) {
  out << "epoch,train_loss,train_accuracy,test_macro_f1,validation_macro_f1\n";
  char buf[160];
  for (const auto& r : history.epochs) {
    std::snprintf(buf, sizeof buf, "%zu,%.10f,%.6f,%.6f,%.6f\n", r.epoch, r.train_loss, r.train_accuracy,
                  r.test_macro_f1, r.validation_macro_f1);
    out << buf;
  }
}

Trainer::Trainer(Classifier& model, const SampleSet& train, TrainOptions options)
    : model_(model), train_(train), options_(std::move(options)), rng_(options_.seed) {
  if (train_.empty()) throw ConfigError("training set is empty");
  if (options_.batch == 0) throw ConfigError("batch size must be >= 1");
  if (options_.weights.size() == 0) options_.weights = uniform_weights(train_.label_set.size());
  if (options_.weights.size() != train_.label_set.size()) {
    throw ConfigError("class weight count does not match the label set");
  }
  order_.resize(train_.size());
  for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = i;
}

double Trainer::run_epoch() {
  ++epoch_;
  rng_.shuffle(std::span<std::size_t>(order_));
  nn::AdamOptions adam;
  adam.lr = options_.lr;

  double total = 0.0;
  auto& state = model_.state();
  for (std::size_t start = 0; start < order_.size(); start += options_.batch) {
    const std::size_t end = std::min(order_.size(), start + options_.batch);
    const double scale = 1.0 / static_cast<double>(end - start);
    state.zero_grad();
    for (std::size_t i = start; i < end; ++i) {
      const auto& s = train_.samples[order_[i]];
      const double loss = model_.accumulate(s, options_.weights[s.target_emotion], scale);
      if (!std::isfinite(loss)) {
        throw NumericError("training diverged (non-finite loss) at epoch " + std::to_string(epoch_));
      }
      total += loss;
    }
    nn::adam_step(state, adam);
  }
  return total / static_cast<double>(order_.size());
}

double Trainer::train_accuracy() const {
  std::size_t correct = 0;
  for (const auto& s : train_.samples)
    if (model_.predict(s).label == s.target_emotion) ++correct;
  return static_cast<double>(correct) / static_cast<double>(train_.size());
}

FitResult fit(Classifier& model, const SampleSet& train, const SampleSet& test, const TrainOptions& options) {
  if (options.epochs == 0) throw ConfigError("epochs must be >= 1");
  if (train.empty()) throw ConfigError("training set is empty");

  const SampleSet* fit_set = &train;
  SampleSet carved_train;
  SampleSet validation;
  if (options.metric == MetricMode::best_val) {
    auto halves = split(train, 1.0 - options.validation_fraction, Rng::derive(options.seed, 17));
    carved_train = std::move(halves.first);
    validation = std::move(halves.second);
    if (carved_train.empty() || validation.empty()) throw ConfigError("training set too small for a validation split");
    fit_set = &carved_train;
  }

  Trainer trainer(model, *fit_set, options);
  auto predictor = [&model](const Sample& s) { return model.predict(s).label; };

  FitResult result;
  double best_val = -1.0;
  for (std::size_t e = 1; e <= options.epochs; ++e) {
    EpochRecord rec;
    rec.epoch = e;
    rec.train_loss = trainer.run_epoch();
    rec.train_accuracy = trainer.train_accuracy();
    EvalReport report = evaluate(predictor, test);
    report.epoch = e;
    rec.test_macro_f1 = report.macro_f1;
    rec.validation_macro_f1 = std::numeric_limits<double>::quiet_NaN();
    if (options.metric == MetricMode::best_val) {
      rec.validation_macro_f1 = evaluate(predictor, validation).macro_f1;
      if (rec.validation_macro_f1 > best_val) {
        best_val = rec.validation_macro_f1;
        result.headline = report;
      }
    }
    if (e == 1 || report.macro_f1 > result.max_report.macro_f1) result.max_report = report;
    if (e == options.epochs) result.final_report = report;
    result.history.epochs.push_back(rec);
  }
  if (options.metric == MetricMode::max_test) result.headline = result.max_report;
  if (options.metric == MetricMode::final) result.headline = result.final_report;
  return result;
}

MajorityPredictor majority_baseline(const SampleSet& train) {
  const auto dist = label_distribution(train);
  MajorityPredictor p;
  for (std::size_t i = 1; i < dist.size(); ++i)
    if (dist.counts[i] > dist.counts[p.label]) p.label = static_cast<LabelId>(i);
  return p;
}

}  // namespace pec
