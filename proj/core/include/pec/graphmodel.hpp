#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "pec/graph.hpp"
#include "pec/seqmodel.hpp"

namespace pec {

/// How the nodes selected by the dependency mode are reduced to one vector.
/// dependency=all always uses the last node.
enum class PoolingMode { mean, most_recent };

std::string_view to_string(PoolingMode m);
PoolingMode parse_pooling_mode(std::string_view text);

struct GraphModelConfig {
  SeqType seq_type = SeqType::E;
  std::size_t w = 2;
  std::size_t num_labels = 0;
  std::size_t pw = 3;
  std::size_t fw = 0;
  bool same_speaker_edges_only = false;
  Dependency dependency = Dependency::all;
  PoolingMode pooling = PoolingMode::mean;
  /// 0 picks the default: 64 for E, 300 for T/ET.
  std::size_t hidden = 0;
  /// 0 means equal to the resolved hidden size.
  std::size_t graph_hidden = 0;
  TextConfig text;
  std::uint64_t seed = 0;

  std::size_t resolved_hidden() const;
  std::size_t resolved_graph_hidden() const;
  /// Throws ConfigError naming the fields involved.
  void validate() const;
};

/// Registers every (speaker pair, direction) seen in the windows of `train`
/// and freezes the registry.
RelationRegistry build_relation_registry(const SampleSet& train, std::size_t pw, std::size_t fw);

/// Window positions selected by `dependency` relative to the target speaker.
std::vector<std::size_t> pool_nodes(const Sample& sample, Dependency dependency);
/// Samples for which pool_nodes is non-empty.
SampleSet filter_poolable(const SampleSet& set, Dependency dependency);

/// DGCN-PEC. Per-turn inputs (E: one-hot, T: projected text, ET: both
/// concatenated) feed a BiLSTM over the window; its outputs are the node
/// features of a speaker-relational graph. After the two-stage RGCN each
/// node carries [sequence feature ; graph feature], which is pooled over the
/// nodes chosen by the dependency mode and classified by a ReLU dense layer
/// and a softmax layer.
class GraphModel final : public Classifier {
 public:
  GraphModel(GraphModelConfig config, RelationRegistry relations);

  Prediction predict(const Sample& sample) const override;
  double accumulate(const Sample& sample, double class_weight, double scale) override;
  double loss(const Sample& sample, double class_weight) const override;

  nn::ModelState& state() override { return state_; }
  const nn::ModelState& state() const override { return state_; }
  const GraphModelConfig& config() const noexcept { return config_; }
  const RelationRegistry& relations() const noexcept { return relations_; }

  struct Inspection {
    ConversationGraph graph;
    nn::Tensor nodes;  // n x (2H + G), [sequence ; graph]
    std::vector<std::size_t> pooled_nodes;
    std::vector<double> pooled;
    std::vector<double> distribution;
  };
  Inspection inspect(const Sample& sample) const;

  /// Graph of a sample's window, after the optional same-speaker filter.
  ConversationGraph graph_for(const Sample& sample) const;

 private:
  struct Trace;
  Trace forward(const Sample& sample) const;
  nn::Tensor node_inputs(const Sample& sample, Trace& tr) const;

  GraphModelConfig config_;
  RelationRegistry relations_;
  nn::ModelState state_;
  std::optional<nn::Dense> text_projection_;
  nn::BiLstm lstm_;
  Rgcn rgcn_;
  nn::Dense hidden_layer_;
  nn::Dense output_layer_;
};

}  // namespace pec
