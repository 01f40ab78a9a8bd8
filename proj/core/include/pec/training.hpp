#pragma once

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <string_view>
#include <vector>

#include "pec/balance.hpp"
#include "pec/metrics.hpp"
#include "pec/nn/state.hpp"
#include "pec/reconstruct.hpp"

namespace pec {

/// Input signal per window turn: emotion one-hot (E), text (T) or both (ET).
enum class SeqType { E, T, ET };

std::string_view to_string(SeqType t);
SeqType parse_seq_type(std::string_view text);
inline bool uses_text(SeqType t) { return t != SeqType::E; }
inline bool uses_emotion(SeqType t) { return t != SeqType::T; }

struct Prediction {
  std::vector<double> distribution;
  /// argmax; ties go to the lowest id.
  LabelId label = 0;
};

Prediction make_prediction(std::vector<double> distribution);

/// A trainable next-emotion classifier.
class Classifier {
 public:
  virtual ~Classifier() = default;

  virtual Prediction predict(const Sample& sample) const = 0;
  /// Forward + backward on one sample. Adds scale * d(loss)/d(param) to the
  /// parameter gradients and returns the unscaled weighted loss.
  virtual double accumulate(const Sample& sample, double class_weight, double scale) = 0;
  /// Weighted loss without touching gradients.
  virtual double loss(const Sample& sample, double class_weight) const = 0;

  virtual nn::ModelState& state() = 0;
  virtual const nn::ModelState& state() const = 0;
};

/// Which epoch the headline metric comes from.
///   max_test  - max test macro-F1 over all epochs (optimistically biased)
///   final     - last epoch
///   best_val  - epoch with the best macro-F1 on a validation split carved
///               out of the training data
enum class MetricMode { max_test, final, best_val };

std::string_view to_string(MetricMode m);
MetricMode parse_metric_mode(std::string_view text);

struct TrainOptions {
  std::size_t epochs = 30;
  double lr = 1e-3;
  std::size_t batch = 32;
  std::uint64_t seed = 0;
  ClassWeights weights;
  MetricMode metric = MetricMode::max_test;
  double validation_fraction = 0.1;
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  double test_macro_f1 = 0.0;
  /// NaN unless metric == best_val.
  double validation_macro_f1 = 0.0;
};

struct EpochHistory {
  std::vector<EpochRecord> epochs;

  std::size_t size() const noexcept { return epochs.size(); }
  /// 1-based epoch with the highest test macro-F1 (earliest on ties).
  std::size_t max_test_epoch() const;
  double max_test_macro_f1() const;
  double final_test_macro_f1() const;
};

/// Columns: epoch,train_loss,train_accuracy,test_macro_f1,validation_macro_f1
void write_history_csv(const EpochHistory& history, std::ostream& out);

struct FitResult {
  EpochHistory history;
  EvalReport max_report;
  EvalReport final_report;
  /// Report selected by TrainOptions::metric.
  EvalReport headline;
};

/// Minibatch Adam on weighted cross-entropy. Batches average the per-sample
/// gradients. The training order is reshuffled every epoch from the seed.
class Trainer {
 public:
  Trainer(Classifier& model, const SampleSet& train, TrainOptions options);

  /// Runs one epoch and returns the mean weighted training loss. Throws
  /// NumericError if the loss becomes non-finite.
  double run_epoch();
  double train_accuracy() const;
  std::size_t epochs_run() const noexcept { return epoch_; }

 private:
  Classifier& model_;
  const SampleSet& train_;
  TrainOptions options_;
  Rng rng_;
  std::vector<std::size_t> order_;
  std::size_t epoch_ = 0;
};

/// Runs exactly options.epochs epochs, evaluating on `test` after each.
/// Throws ConfigError on epochs == 0 or an empty training set.
FitResult fit(Classifier& model, const SampleSet& train, const SampleSet& test, const TrainOptions& options);

/// Always predicts the modal training label (lowest id on ties).
struct MajorityPredictor {
  LabelId label = 0;
  LabelId operator()(const Sample&) const { return label; }
};

MajorityPredictor majority_baseline(const SampleSet& train);

}  // namespace pec
