#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "pec/embed.hpp"
#include "pec/nn/layers.hpp"
#include "pec/training.hpp"

namespace pec {

/// Text side of a model: embedding table plus token pipeline.
struct TextConfig {
  const EmbeddingTable* table = nullptr;
  TokenPipeline pipeline;
};

/// w x |E| one-hot rows, one per window turn.
nn::Tensor encode_emotions(const Sample& sample, std::size_t num_labels);
/// Row-wise argmax of a one-hot matrix.
std::vector<LabelId> decode_emotions(const nn::Tensor& onehot);
/// w x (max_tokens * dim); rows follow window order, empty turns are zero rows.
nn::Tensor encode_text(const Sample& sample, const TextConfig& text);

/// One BiLSTM branch: optional linear projection, BiLSTM, then either
/// additive attention or concatenated final states.
struct SequenceEncoder {
  std::optional<nn::Dense> projection;
  nn::BiLstm lstm;
  std::optional<nn::Attention> attention;

  static SequenceEncoder create(nn::ModelState& state, const std::string& name, std::size_t input,
                                std::optional<std::size_t> projected, std::size_t hidden, bool attention, Rng& rng);

  std::size_t output_size() const noexcept { return lstm.output_size(); }

  struct Trace {
    nn::Tensor projected;
    nn::BiLstm::Trace lstm;
    std::optional<nn::Attention::Trace> attention;
    std::vector<double> pooled;
  };

  Trace forward(const nn::ModelState& state, const nn::Tensor& x) const;
  void backward(nn::ModelState& state, const nn::Tensor& x, const Trace& trace, std::span<const double> dpooled) const;
};

struct SeqModelConfig {
  SeqType seq_type = SeqType::E;
  std::size_t w = 1;
  std::size_t num_labels = 0;
  /// 0 picks the default: 64 for E, 300 for T/ET.
  std::size_t hidden = 0;
  /// Unset picks the default: off for E, on for T/ET.
  std::optional<bool> attention;
  TextConfig text;
  std::uint64_t seed = 0;

  std::size_t resolved_hidden() const;
  bool resolved_attention() const;
  /// Throws ConfigError (naming the fields involved) on invalid combinations.
  void validate() const;
};

/// BiLSTM-PEC. E: one-hot rows -> encoder; T: flattened word vectors ->
/// projection -> encoder; ET: both encoders, pooled vectors concatenated.
/// Then a ReLU dense layer and a softmax output layer.
class SeqModel final : public Classifier {
 public:
  explicit SeqModel(SeqModelConfig config);

  Prediction predict(const Sample& sample) const override;
  double accumulate(const Sample& sample, double class_weight, double scale) override;
  double loss(const Sample& sample, double class_weight) const override;

  nn::ModelState& state() override { return state_; }
  const nn::ModelState& state() const override { return state_; }
  const SeqModelConfig& config() const noexcept { return config_; }

  /// Zeroes the output layer so every prediction is uniform.
  void zero_output_layer();

 private:
  struct Trace;
  Trace forward(const Sample& sample) const;
  void check_sample(const Sample& sample) const;

  SeqModelConfig config_;
  nn::ModelState state_;
  std::optional<SequenceEncoder> emotion_encoder_;
  std::optional<SequenceEncoder> text_encoder_;
  nn::Dense hidden_layer_;
  nn::Dense output_layer_;
};

}  // namespace pec
