#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pec/corpus.hpp"
#include "pec/nn/state.hpp"
#include "pec/nn/tensor.hpp"
#include "pec/rng.hpp"

namespace pec {

using RelationId = std::uint32_t;

enum class EdgeDirection : std::uint8_t { past, future };

/// (source speaker, destination speaker, direction) -> relation id. Ids are
/// dense in insertion order. Once frozen, unseen keys map to the reserved
/// unknown relation, whose id equals the number of registered keys.
class RelationRegistry {
 public:
  struct Key {
    SpeakerId src;
    SpeakerId dst;
    EdgeDirection direction;
    auto operator<=>(const Key&) const = default;
  };

  RelationId resolve(SpeakerId src, SpeakerId dst, EdgeDirection direction);
  /// Lookup only; unknown() when absent.
  RelationId find(SpeakerId src, SpeakerId dst, EdgeDirection direction) const;

  void freeze() noexcept { frozen_ = true; }
  bool frozen() const noexcept { return frozen_; }

  std::size_t known() const noexcept { return keys_.size(); }
  RelationId unknown() const noexcept { return static_cast<RelationId>(keys_.size()); }
  /// Parameter-bank size: known relations plus the unknown slot.
  std::size_t bank_size() const noexcept { return keys_.size() + 1; }
  const std::vector<Key>& keys() const noexcept { return keys_; }

  /// [[src_name, dst_name, "past"|"future"], ...]
  nlohmann::json to_json(const SpeakerRegistry& speakers) const;
  /// Names missing from `speakers` are kept as placeholders that never match.
  static RelationRegistry from_json(const nlohmann::json& j, const SpeakerRegistry& speakers);

 private:
  std::vector<Key> keys_;
  std::map<Key, RelationId> index_;
  bool frozen_ = false;
};

struct Edge {
  std::size_t src = 0;
  std::size_t dst = 0;
  RelationId relation = 0;
  bool operator==(const Edge&) const = default;
};

struct ConversationGraph {
  nn::Tensor node_features;  // n x d
  std::vector<SpeakerId> speakers;
  std::vector<Edge> edges;
  std::size_t relation_count = 0;

  std::size_t num_nodes() const noexcept { return speakers.size(); }
};

/// Node i receives an edge from every j with i - pw <= j < i (past) and
/// i < j <= i + fw (future). Relations come from `registry` (inserted
/// unless frozen). Edges are ordered by destination, then source.
ConversationGraph build_graph(nn::Tensor node_features, std::span<const SpeakerId> speakers, std::size_t pw,
                              std::size_t fw, RelationRegistry& registry);
/// Lookup-only variant; pairs missing from `registry` get its unknown relation.
ConversationGraph build_graph(nn::Tensor node_features, std::span<const SpeakerId> speakers, std::size_t pw,
                              std::size_t fw, const RelationRegistry& registry);

/// Keeps exactly the edges whose endpoints share a speaker.
ConversationGraph same_speaker_filter(const ConversationGraph& graph);

/// Sum over nodes of min(i, pw) + min(n - 1 - i, fw).
std::size_t expected_edge_count(std::size_t n, std::size_t pw, std::size_t fw);

/// Edge-list JSON for debugging: {"nodes", "speakers", "edges": [[src, dst, rel], ...]}.
nlohmann::json graph_to_json(const ConversationGraph& graph);

/// Two-stage relational graph convolution.
///   stage 1: h'_i  = ReLU( sum_r sum_{j in N_r(i)} h_j W_r / |N_r(i)| + h_i W_self )
///   stage 2: h''_i = ReLU( sum_{j in N(i) + {i}} h'_j W / (|N(i)| + 1) )
struct Rgcn {
  std::vector<nn::ParamId> relation_weights;
  nn::ParamId self_weight = 0;
  nn::ParamId stage2_weight = 0;
  std::size_t input = 0;
  std::size_t output = 0;

  static Rgcn create(nn::ModelState& state, const std::string& name, std::size_t input, std::size_t output,
                     std::size_t relations, Rng& rng);

  struct Trace {
    nn::Tensor stage1;  // n x out
    nn::Tensor stage2;  // n x out
  };

  /// Throws NumericError when an edge relation is outside the bank.
  Trace forward(const nn::ModelState& state, const ConversationGraph& graph, const nn::Tensor& h) const;
  /// Returns dL/dh; accumulates parameter gradients.
  nn::Tensor backward(nn::ModelState& state, const ConversationGraph& graph, const nn::Tensor& h, const Trace& trace,
                      const nn::Tensor& dstage2) const;
};

/// Functional form: explicit weight tensors.
nn::Tensor rgcn_forward(const ConversationGraph& graph, const nn::Tensor& h, std::span<const nn::Tensor> relation_weights,
                        const nn::Tensor& self_weight, const nn::Tensor& stage2_weight);

}  // namespace pec
