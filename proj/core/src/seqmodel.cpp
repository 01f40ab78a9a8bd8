#include "pec/seqmodel.hpp"

#include <algorithm>

#include "pec/error.hpp"

namespace pec {

using nn::Tensor;

Tensor encode_emotions(const Sample& sample, std::size_t num_labels) {
  Tensor x(sample.window.size(), num_labels);
  for (std::size_t t = 0; t < sample.window.size(); ++t) {
    const auto e = sample.window[t].emotion;
    if (e >= num_labels) throw ConfigError("window emotion id out of range");
    x(t, e) = 1.0;
  }
  return x;
}

std::vector<LabelId> decode_emotions(const Tensor& onehot) {
  std::vector<LabelId> out;
  out.reserve(onehot.rows());
  for (std::size_t t = 0; t < onehot.rows(); ++t) out.push_back(static_cast<LabelId>(nn::argmax(onehot.row(t))));
  return out;
}

Tensor encode_text(const Sample& sample, const TextConfig& text) {
  if (text.table == nullptr) throw ConfigError("text encoding requires an embedding table");
  const std::size_t width = text.pipeline.max_tokens * text.table->dim();
  Tensor x(sample.window.size(), width);
  for (std::size_t t = 0; t < sample.window.size(); ++t) {
    const auto tokens = preprocess(sample.window[t].text, text.pipeline);
    const auto row = encode_utterance(tokens, *text.table, text.pipeline.max_tokens);
    std::copy(row.begin(), row.end(), x.row(t).begin());
  }
  return x;
}

SequenceEncoder SequenceEncoder::create(nn::ModelState& state, const std::string& name, std::size_t input,
                                        std::optional<std::size_t> projected, std::size_t hidden, bool attention,
                                        Rng& rng) {
  SequenceEncoder enc;
  std::size_t lstm_input = input;
  if (projected) {
    enc.projection = nn::Dense::create(state, name + ".proj", input, *projected, nn::Activation::none, rng);
    lstm_input = *projected;
  }
  enc.lstm = nn::BiLstm::create(state, name + ".bilstm", lstm_input, hidden, rng);
  if (attention) enc.attention = nn::Attention::create(state, name + ".attn", 2 * hidden, hidden, rng);
  return enc;
}

SequenceEncoder::Trace SequenceEncoder::forward(const nn::ModelState& state, const Tensor& x) const {
  Trace tr;
  if (projection) tr.projected = projection->forward(state, x);
  const Tensor& input = projection ? tr.projected : x;
  tr.lstm = lstm.forward(state, input);
  if (attention) {
    tr.attention = attention->forward(state, tr.lstm.outputs);
    tr.pooled = tr.attention->context;
  } else {
    tr.pooled = nn::BiLstm::final_states(tr.lstm);
  }
  return tr;
}

void SequenceEncoder::backward(nn::ModelState& state, const Tensor& x, const Trace& trace,
                               std::span<const double> dpooled) const {
  Tensor doutputs;
  if (attention) {
    doutputs = attention->backward(state, trace.lstm.outputs, *trace.attention, dpooled);
  } else {
    doutputs = Tensor(trace.lstm.outputs.rows(), trace.lstm.outputs.cols());
    nn::BiLstm::final_states_backward(dpooled, doutputs);
  }
  const Tensor& input = projection ? trace.projected : x;
  Tensor dinput = lstm.backward(state, input, trace.lstm, doutputs);
  if (projection) projection->backward(state, x, trace.projected, dinput);
}

std::size_t SeqModelConfig::resolved_hidden() const {
  if (hidden != 0) return hidden;
  return seq_type == SeqType::E ? 64 : 300;
}

bool SeqModelConfig::resolved_attention() const {
  if (attention) return *attention;
  return seq_type != SeqType::E;
}

void SeqModelConfig::validate() const {
  if (w == 0) throw ConfigError("lookback must be >= 1");
  if (num_labels < 2) throw ConfigError("label set must have at least 2 labels");
  if (uses_text(seq_type) && text.table == nullptr) {
    throw ConfigError("seq-type " + std::string(to_string(seq_type)) + " requires embeddings");
  }
  if (text.pipeline.max_tokens == 0) throw ConfigError("max-tokens must be >= 1");
}

struct SeqModel::Trace {
  Tensor emotion_input;
  Tensor text_input;
  std::optional<SequenceEncoder::Trace> emotion;
  std::optional<SequenceEncoder::Trace> text;
  Tensor pooled;
  Tensor hidden;
  Tensor probs;
};

SeqModel::SeqModel(SeqModelConfig config) : config_(std::move(config)) {
  config_.validate();
  Rng rng(config_.seed);
  const std::size_t hidden = config_.resolved_hidden();
  const bool attn = config_.resolved_attention();
  std::size_t pooled = 0;
  if (uses_emotion(config_.seq_type)) {
    emotion_encoder_ = SequenceEncoder::create(state_, "emotion", config_.num_labels, std::nullopt, hidden, attn, rng);
    pooled += emotion_encoder_->output_size();
  }
  if (uses_text(config_.seq_type)) {
    const std::size_t width = config_.text.pipeline.max_tokens * config_.text.table->dim();
    text_encoder_ = SequenceEncoder::create(state_, "text", width, hidden, hidden, attn, rng);
    pooled += text_encoder_->output_size();
  }
  hidden_layer_ = nn::Dense::create(state_, "head.hidden", pooled, hidden, nn::Activation::relu, rng);
  output_layer_ = nn::Dense::create(state_, "head.out", hidden, config_.num_labels, nn::Activation::softmax, rng);
}

void SeqModel::zero_output_layer() {
  state_[output_layer_.weight].fill(0.0);
  state_[output_layer_.bias].fill(0.0);
}

void SeqModel::check_sample(const Sample& sample) const {
  if (sample.window.size() != config_.w) {
    throw ConfigError("sample window length " + std::to_string(sample.window.size()) +
                      " does not match model lookback " + std::to_string(config_.w));
  }
}

SeqModel::Trace SeqModel::forward(const Sample& sample) const {
  check_sample(sample);
  Trace tr;
  std::vector<double> pooled;
  if (emotion_encoder_) {
    tr.emotion_input = encode_emotions(sample, config_.num_labels);
    tr.emotion = emotion_encoder_->forward(state_, tr.emotion_input);
    pooled.insert(pooled.end(), tr.emotion->pooled.begin(), tr.emotion->pooled.end());
  }
  if (text_encoder_) {
    tr.text_input = encode_text(sample, config_.text);
    tr.text = text_encoder_->forward(state_, tr.text_input);
    pooled.insert(pooled.end(), tr.text->pooled.begin(), tr.text->pooled.end());
  }
  tr.pooled = Tensor::row_vector(std::move(pooled));
  tr.hidden = hidden_layer_.forward(state_, tr.pooled);
  tr.probs = output_layer_.forward(state_, tr.hidden);
  return tr;
}

Prediction SeqModel::predict(const Sample& sample) const {
  auto tr = forward(sample);
  return make_prediction(std::vector<double>(tr.probs.values().begin(), tr.probs.values().end()));
}

double SeqModel::loss(const Sample& sample, double class_weight) const {
  auto tr = forward(sample);
  return nn::weighted_cross_entropy(tr.probs.values(), sample.target_emotion, class_weight);
}

double SeqModel::accumulate(const Sample& sample, double class_weight, double scale) {
  auto tr = forward(sample);
  const double value = nn::weighted_cross_entropy(tr.probs.values(), sample.target_emotion, class_weight);

  auto g = nn::weighted_cross_entropy_grad(tr.probs.values(), sample.target_emotion, class_weight * scale);
  const std::size_t k = g.size();
  Tensor dprobs({1, k}, std::move(g));

  Tensor dhidden = output_layer_.backward(state_, tr.hidden, tr.probs, dprobs);
  Tensor dpooled = hidden_layer_.backward(state_, tr.pooled, tr.hidden, dhidden);

  std::size_t offset = 0;
  auto dp = dpooled.values();
  if (emotion_encoder_) {
    const std::size_t n = emotion_encoder_->output_size();
    emotion_encoder_->backward(state_, tr.emotion_input, *tr.emotion, dp.subspan(offset, n));
    offset += n;
  }
  if (text_encoder_) {
    const std::size_t n = text_encoder_->output_size();
    text_encoder_->backward(state_, tr.text_input, *tr.text, dp.subspan(offset, n));
  }
  return value;
}

}  // namespace pec
