#include "pec/graphmodel.hpp"

#include <algorithm>

#include "pec/error.hpp"

namespace pec {

using nn::Tensor;

std::string_view to_string(PoolingMode m) { return m == PoolingMode::mean ? "mean" : "most-recent"; }

PoolingMode parse_pooling_mode(std::string_view text) {
  if (text == "mean") return PoolingMode::mean;
  if (text == "most-recent") return PoolingMode::most_recent;
  throw ConfigError("pooling must be mean or most-recent; got \"" + std::string(text) + "\"");
}

std::size_t GraphModelConfig::resolved_hidden() const {
  if (hidden != 0) return hidden;
  return seq_type == SeqType::E ? 64 : 300;
}

std::size_t GraphModelConfig::resolved_graph_hidden() const {
  return graph_hidden != 0 ? graph_hidden : resolved_hidden();
}

void GraphModelConfig::validate() const {
  if (w < 2) {
    throw ConfigError("model dgcn requires lookback >= 2 to build a graph (got lookback " + std::to_string(w) + ")");
  }
  if (pw + fw == 0) throw ConfigError("pw and fw cannot both be 0 (pw + fw must be >= 1)");
  if (num_labels < 2) throw ConfigError("label set must have at least 2 labels");
  if (uses_text(seq_type) && text.table == nullptr) {
    throw ConfigError("seq-type " + std::string(to_string(seq_type)) + " requires embeddings");
  }
  if (text.pipeline.max_tokens == 0) throw ConfigError("max-tokens must be >= 1");
}

RelationRegistry build_relation_registry(const SampleSet& train, std::size_t pw, std::size_t fw) {
  RelationRegistry reg;
  std::vector<SpeakerId> speakers;
  for (const auto& s : train.samples) {
    speakers.clear();
    for (const auto& t : s.window) speakers.push_back(t.speaker);
    build_graph(Tensor(), speakers, pw, fw, reg);
  }
  reg.freeze();
  return reg;
}

std::vector<std::size_t> pool_nodes(const Sample& sample, Dependency dependency) {
  std::vector<std::size_t> out;
  const std::size_t n = sample.window.size();
  if (n == 0) return out;
  if (dependency == Dependency::all) {
    out.push_back(n - 1);
    return out;
  }
  const bool want_self = dependency == Dependency::self;
  for (std::size_t i = 0; i < n; ++i)
    if ((sample.window[i].speaker == sample.target_speaker) == want_self) out.push_back(i);
  return out;
}

SampleSet filter_poolable(const SampleSet& set, Dependency dependency) {
  SampleSet out = set.like();
  for (const auto& s : set.samples)
    if (!pool_nodes(s, dependency).empty()) out.samples.push_back(s);
  return out;
}

struct GraphModel::Trace {
  Tensor text_input;
  Tensor projected;
  Tensor input;
  nn::BiLstm::Trace lstm;
  ConversationGraph graph;
  Rgcn::Trace rgcn;
  Tensor nodes;
  std::vector<std::size_t> pooled_nodes;
  Tensor pooled;
  Tensor hidden;
  Tensor probs;
};

GraphModel::GraphModel(GraphModelConfig config, RelationRegistry relations)
    : config_(std::move(config)), relations_(std::move(relations)) {
  config_.validate();
  relations_.freeze();
  Rng rng(config_.seed);
  const std::size_t hidden = config_.resolved_hidden();
  const std::size_t graph_hidden = config_.resolved_graph_hidden();

  std::size_t input = 0;
  if (uses_emotion(config_.seq_type)) input += config_.num_labels;
  if (uses_text(config_.seq_type)) {
    const std::size_t width = config_.text.pipeline.max_tokens * config_.text.table->dim();
    text_projection_ = nn::Dense::create(state_, "text.proj", width, hidden, nn::Activation::none, rng);
    input += hidden;
  }
  lstm_ = nn::BiLstm::create(state_, "seq.bilstm", input, hidden, rng);
  rgcn_ = Rgcn::create(state_, "graph.rgcn", lstm_.output_size(), graph_hidden, relations_.bank_size(), rng);
  const std::size_t node_width = lstm_.output_size() + graph_hidden;
  hidden_layer_ = nn::Dense::create(state_, "head.hidden", node_width, hidden, nn::Activation::relu, rng);
  output_layer_ = nn::Dense::create(state_, "head.out", hidden, config_.num_labels, nn::Activation::softmax, rng);
}

ConversationGraph GraphModel::graph_for(const Sample& sample) const {
  std::vector<SpeakerId> speakers;
  speakers.reserve(sample.window.size());
  for (const auto& t : sample.window) speakers.push_back(t.speaker);
  auto g = build_graph(Tensor(), speakers, config_.pw, config_.fw, relations_);
  return config_.same_speaker_edges_only ? same_speaker_filter(g) : g;
}

Tensor GraphModel::node_inputs(const Sample& sample, Trace& tr) const {
  const std::size_t n = sample.window.size();
  Tensor emotions;
  if (uses_emotion(config_.seq_type)) emotions = encode_emotions(sample, config_.num_labels);
  if (text_projection_) {
    tr.text_input = encode_text(sample, config_.text);
    tr.projected = text_projection_->forward(state_, tr.text_input);
  }
  const std::size_t ke = emotions.size() == 0 ? 0 : emotions.cols();
  const std::size_t kt = tr.projected.size() == 0 ? 0 : tr.projected.cols();
  Tensor x(n, ke + kt);
  for (std::size_t i = 0; i < n; ++i) {
    auto row = x.row(i);
    if (ke != 0) std::copy_n(emotions.row(i).begin(), ke, row.begin());
    if (kt != 0) std::copy_n(tr.projected.row(i).begin(), kt, row.begin() + static_cast<std::ptrdiff_t>(ke));
  }
  return x;
}

GraphModel::Trace GraphModel::forward(const Sample& sample) const {
  if (sample.window.size() != config_.w) {
    throw ConfigError("sample window length " + std::to_string(sample.window.size()) +
                      " does not match model lookback " + std::to_string(config_.w));
  }
  Trace tr;
  tr.pooled_nodes = pool_nodes(sample, config_.dependency);
  if (tr.pooled_nodes.empty()) {
    throw ConfigError("dependency " + std::string(to_string(config_.dependency)) +
                      " selects no window turns for this sample (conversation " + sample.conversation_id + ")");
  }
  if (config_.dependency != Dependency::all && config_.pooling == PoolingMode::most_recent) {
    tr.pooled_nodes = {tr.pooled_nodes.back()};
  }

  tr.input = node_inputs(sample, tr);
  tr.lstm = lstm_.forward(state_, tr.input);
  tr.graph = graph_for(sample);
  tr.rgcn = rgcn_.forward(state_, tr.graph, tr.lstm.outputs);

  const std::size_t n = sample.window.size();
  const std::size_t ds = tr.lstm.outputs.cols();
  const std::size_t dg = tr.rgcn.stage2.cols();
  tr.nodes = Tensor(n, ds + dg);
  for (std::size_t i = 0; i < n; ++i) {
    auto row = tr.nodes.row(i);
    std::copy_n(tr.lstm.outputs.row(i).begin(), ds, row.begin());
    std::copy_n(tr.rgcn.stage2.row(i).begin(), dg, row.begin() + static_cast<std::ptrdiff_t>(ds));
  }

  std::vector<double> pooled(ds + dg, 0.0);
  const double inv = 1.0 / static_cast<double>(tr.pooled_nodes.size());
  for (std::size_t i : tr.pooled_nodes) {
    const auto row = tr.nodes.row(i);
    for (std::size_t k = 0; k < pooled.size(); ++k) pooled[k] += row[k] * inv;
  }
  tr.pooled = Tensor::row_vector(std::move(pooled));
  tr.hidden = hidden_layer_.forward(state_, tr.pooled);
  tr.probs = output_layer_.forward(state_, tr.hidden);
  return tr;
}

Prediction GraphModel::predict(const Sample& sample) const {
  auto tr = forward(sample);
  return make_prediction(std::vector<double>(tr.probs.values().begin(), tr.probs.values().end()));
}

double GraphModel::loss(const Sample& sample, double class_weight) const {
  auto tr = forward(sample);
  return nn::weighted_cross_entropy(tr.probs.values(), sample.target_emotion, class_weight);
}

GraphModel::Inspection GraphModel::inspect(const Sample& sample) const {
  auto tr = forward(sample);
  Inspection out;
  out.graph = std::move(tr.graph);
  out.graph.node_features = tr.lstm.outputs;
  out.nodes = std::move(tr.nodes);
  out.pooled_nodes = std::move(tr.pooled_nodes);
  out.pooled.assign(tr.pooled.values().begin(), tr.pooled.values().end());
  out.distribution.assign(tr.probs.values().begin(), tr.probs.values().end());
  return out;
}

double GraphModel::accumulate(const Sample& sample, double class_weight, double scale) {
  auto tr = forward(sample);
  const double value = nn::weighted_cross_entropy(tr.probs.values(), sample.target_emotion, class_weight);

  auto g = nn::weighted_cross_entropy_grad(tr.probs.values(), sample.target_emotion, class_weight * scale);
  const std::size_t k = g.size();
  Tensor dprobs({1, k}, std::move(g));
  Tensor dhidden = output_layer_.backward(state_, tr.hidden, tr.probs, dprobs);
  Tensor dpooled = hidden_layer_.backward(state_, tr.pooled, tr.hidden, dhidden);

  const std::size_t n = tr.nodes.rows();
  const std::size_t ds = tr.lstm.outputs.cols();
  const std::size_t dg = tr.rgcn.stage2.cols();
  const double inv = 1.0 / static_cast<double>(tr.pooled_nodes.size());
  Tensor dseq(n, ds);
  Tensor dgraph(n, dg);
  for (std::size_t i : tr.pooled_nodes) {
    for (std::size_t c = 0; c < ds; ++c) dseq(i, c) += dpooled[c] * inv;
    for (std::size_t c = 0; c < dg; ++c) dgraph(i, c) += dpooled[ds + c] * inv;
  }
  Tensor dh = rgcn_.backward(state_, tr.graph, tr.lstm.outputs, tr.rgcn, dgraph);
  for (std::size_t i = 0; i < dseq.size(); ++i) dseq[i] += dh[i];

  Tensor dx = lstm_.backward(state_, tr.input, tr.lstm, dseq);
  if (text_projection_) {
    const std::size_t kt = tr.projected.cols();
    const std::size_t offset = dx.cols() - kt;
    Tensor dproj(n, kt);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t c = 0; c < kt; ++c) dproj(i, c) = dx(i, offset + c);
    text_projection_->backward(state_, tr.text_input, tr.projected, dproj);
  }
  return value;
}

}  // namespace pec
