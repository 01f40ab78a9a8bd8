#include "pec/graph.hpp"

#include <algorithm>
#include <limits>

#include "pec/error.hpp"
#include "pec/nn/ops.hpp"

namespace pec {

using nn::Tensor;

namespace {

std::string_view direction_name(EdgeDirection d) { return d == EdgeDirection::past ? "past" : "future"; }

EdgeDirection parse_direction(const std::string& s) {
  if (s == "past") return EdgeDirection::past;
  if (s == "future") return EdgeDirection::future;
  throw ConfigError("relation direction must be past or future; got \"" + s + "\"");
}

// Per-destination neighbourhoods grouped by relation.
struct Neighbourhood {
  // by_relation[i]: (relation, sources) in first-seen order
  std::vector<std::vector<std::pair<RelationId, std::vector<std::size_t>>>> by_relation;
  std::vector<std::vector<std::size_t>> all;
};

Neighbourhood neighbourhood(const ConversationGraph& g, std::size_t bank) {
  const std::size_t n = g.num_nodes();
  Neighbourhood nb;
  nb.by_relation.resize(n);
  nb.all.resize(n);
  for (const auto& e : g.edges) {
    if (e.src >= n || e.dst >= n) throw NumericError("rgcn: edge endpoint outside the graph");
    if (e.relation >= bank) {
      throw NumericError("rgcn: relation id " + std::to_string(e.relation) + " outside parameter bank of size " +
                         std::to_string(bank));
    }
    auto& groups = nb.by_relation[e.dst];
    auto it = std::find_if(groups.begin(), groups.end(), [&](const auto& p) { return p.first == e.relation; });
    if (it == groups.end()) {
      groups.push_back({e.relation, {}});
      it = std::prev(groups.end());
    }
    it->second.push_back(e.src);
    nb.all[e.dst].push_back(e.src);
  }
  return nb;
}

struct Weights {
  std::vector<const Tensor*> relation;
  const Tensor* self = nullptr;
  const Tensor* stage2 = nullptr;
};

void check_weights(const Weights& w, std::size_t in) {
  const std::size_t out = w.self->cols();
  expect_shape(*w.self, in, out, "rgcn self weight");
  expect_shape(*w.stage2, out, out, "rgcn stage-2 weight");
  for (const Tensor* r : w.relation) expect_shape(*r, in, out, "rgcn relation weight");
}

void relu_inplace(Tensor& t) {
  for (double& v : t.values()) v = std::max(v, 0.0);
}

// Stage-2 input: mean of stage-1 features over N(i) + {i}.
Tensor stage2_mix(const Neighbourhood& nb, const Tensor& s1) {
  const std::size_t n = s1.rows();
  const std::size_t d = s1.cols();
  Tensor mix(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    auto row = mix.row(i);
    const auto self = s1.row(i);
    std::copy(self.begin(), self.end(), row.begin());
    for (std::size_t j : nb.all[i]) {
      const auto src = s1.row(j);
      for (std::size_t k = 0; k < d; ++k) row[k] += src[k];
    }
    const double inv = 1.0 / static_cast<double>(nb.all[i].size() + 1);
    for (double& v : row) v *= inv;
  }
  return mix;
}

Rgcn::Trace forward_impl(const ConversationGraph& graph, const Tensor& h, const Weights& w) {
  const std::size_t n = graph.num_nodes();
  if (h.rows() != n) throw NumericError("rgcn: feature rows do not match node count");
  check_weights(w, h.cols());
  const std::size_t in = h.cols();
  const std::size_t out = w.self->cols();
  const auto nb = neighbourhood(graph, w.relation.size());

  Rgcn::Trace tr;
  tr.stage1 = Tensor(n, out);
  nn::matmul_acc(h.data(), w.self->data(), tr.stage1.data(), n, in, out);
  std::vector<double> mean(in);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& [rel, sources] : nb.by_relation[i]) {
      std::fill(mean.begin(), mean.end(), 0.0);
      for (std::size_t j : sources) {
        const auto src = h.row(j);
        for (std::size_t k = 0; k < in; ++k) mean[k] += src[k];
      }
      const double inv = 1.0 / static_cast<double>(sources.size());
      for (double& v : mean) v *= inv;
      nn::matmul_acc(mean.data(), w.relation[rel]->data(), tr.stage1.row(i).data(), 1, in, out);
    }
  }
  relu_inplace(tr.stage1);

  const Tensor mix = stage2_mix(nb, tr.stage1);
  tr.stage2 = Tensor(n, out);
  nn::matmul_acc(mix.data(), w.stage2->data(), tr.stage2.data(), n, out, out);
  relu_inplace(tr.stage2);
  return tr;
}

}  // namespace

RelationId RelationRegistry::resolve(SpeakerId src, SpeakerId dst, EdgeDirection direction) {
  const Key key{src, dst, direction};
  if (auto it = index_.find(key); it != index_.end()) return it->second;
  if (frozen_) return unknown();
  const auto id = static_cast<RelationId>(keys_.size());
  keys_.push_back(key);
  index_.emplace(key, id);
  return id;
}

RelationId RelationRegistry::find(SpeakerId src, SpeakerId dst, EdgeDirection direction) const {
  const auto it = index_.find(Key{src, dst, direction});
  return it == index_.end() ? unknown() : it->second;
}

nlohmann::json RelationRegistry::to_json(const SpeakerRegistry& speakers) const {
  auto out = nlohmann::json::array();
  for (const auto& k : keys_) {
    out.push_back({speakers.name(k.src), speakers.name(k.dst), std::string(direction_name(k.direction))});
  }
  return out;
}

RelationRegistry RelationRegistry::from_json(const nlohmann::json& j, const SpeakerRegistry& speakers) {
  if (!j.is_array()) throw ConfigError("relation registry must be a JSON array");
  RelationRegistry reg;
  SpeakerId placeholder = std::numeric_limits<SpeakerId>::max();
  auto lookup = [&](const std::string& name) {
    if (auto id = speakers.find(name)) return *id;
    return placeholder--;
  };
  for (const auto& entry : j) {
    if (!entry.is_array() || entry.size() != 3) throw ConfigError("relation entry must be [src, dst, direction]");
    const Key key{lookup(entry[0].get<std::string>()), lookup(entry[1].get<std::string>()),
                  parse_direction(entry[2].get<std::string>())};
    if (reg.index_.count(key) != 0) throw ConfigError("duplicate relation entry");
    reg.index_.emplace(key, static_cast<RelationId>(reg.keys_.size()));
    reg.keys_.push_back(key);
  }
  reg.frozen_ = true;
  return reg;
}

namespace {

template <typename Resolve>
ConversationGraph build_graph_impl(Tensor node_features, std::span<const SpeakerId> speakers, std::size_t pw,
                                   std::size_t fw, Resolve resolve) {
  const std::size_t n = speakers.size();
  if (node_features.size() != 0 && node_features.rows() != n) {
    throw NumericError("build_graph: feature rows do not match speaker count");
  }
  ConversationGraph g;
  g.node_features = std::move(node_features);
  g.speakers.assign(speakers.begin(), speakers.end());
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= pw ? i - pw : 0;
    for (std::size_t j = lo; j < i; ++j) g.edges.push_back({j, i, resolve(speakers[j], speakers[i], EdgeDirection::past)});
    const std::size_t hi = std::min(n - 1, i + fw);
    for (std::size_t j = i + 1; j <= hi; ++j) {
      g.edges.push_back({j, i, resolve(speakers[j], speakers[i], EdgeDirection::future)});
    }
  }
  return g;
}

}  // namespace

ConversationGraph build_graph(Tensor node_features, std::span<const SpeakerId> speakers, std::size_t pw,
                              std::size_t fw, RelationRegistry& registry) {
  auto g = build_graph_impl(std::move(node_features), speakers, pw, fw,
                            [&](SpeakerId s, SpeakerId d, EdgeDirection dir) { return registry.resolve(s, d, dir); });
  g.relation_count = registry.bank_size();
  return g;
}

ConversationGraph build_graph(Tensor node_features, std::span<const SpeakerId> speakers, std::size_t pw,
                              std::size_t fw, const RelationRegistry& registry) {
  auto g = build_graph_impl(std::move(node_features), speakers, pw, fw,
                            [&](SpeakerId s, SpeakerId d, EdgeDirection dir) { return registry.find(s, d, dir); });
  g.relation_count = registry.bank_size();
  return g;
}

ConversationGraph same_speaker_filter(const ConversationGraph& graph) {
  ConversationGraph out;
  out.node_features = graph.node_features;
  out.speakers = graph.speakers;
  out.relation_count = graph.relation_count;
  for (const auto& e : graph.edges)
    if (graph.speakers[e.src] == graph.speakers[e.dst]) out.edges.push_back(e);
  return out;
}

std::size_t expected_edge_count(std::size_t n, std::size_t pw, std::size_t fw) {
  std::size_t total = 0;
  for (std::size_t i = 0; i < n; ++i) total += std::min(i, pw) + std::min(n - 1 - i, fw);
  return total;
}

nlohmann::json graph_to_json(const ConversationGraph& graph) {
  nlohmann::json j;
  j["nodes"] = graph.num_nodes();
  j["speakers"] = graph.speakers;
  j["relations"] = graph.relation_count;
  auto edges = nlohmann::json::array();
  for (const auto& e : graph.edges) edges.push_back({e.src, e.dst, e.relation});
  j["edges"] = std::move(edges);
  return j;
}

Rgcn Rgcn::create(nn::ModelState& state, const std::string& name, std::size_t input, std::size_t output,
                  std::size_t relations, Rng& rng) {
  if (relations == 0) throw ConfigError("rgcn needs at least one relation slot");
  Rgcn layer;
  layer.input = input;
  layer.output = output;
  for (std::size_t r = 0; r < relations; ++r) {
    const auto id = state.add(name + ".W_r" + std::to_string(r), {input, output});
    nn::init_uniform(state[id], input, rng);
    layer.relation_weights.push_back(id);
  }
  layer.self_weight = state.add(name + ".W_self", {input, output});
  nn::init_uniform(state[layer.self_weight], input, rng);
  layer.stage2_weight = state.add(name + ".W2", {output, output});
  nn::init_uniform(state[layer.stage2_weight], output, rng);
  return layer;
}

Rgcn::Trace Rgcn::forward(const nn::ModelState& state, const ConversationGraph& graph, const Tensor& h) const {
  Weights w;
  for (auto id : relation_weights) w.relation.push_back(&state[id]);
  w.self = &state[self_weight];
  w.stage2 = &state[stage2_weight];
  return forward_impl(graph, h, w);
}

Tensor Rgcn::backward(nn::ModelState& state, const ConversationGraph& graph, const Tensor& h, const Trace& trace,
                      const Tensor& dstage2) const {
  const std::size_t n = graph.num_nodes();
  const std::size_t in = input;
  const std::size_t out = output;
  expect_shape(dstage2, n, out, "rgcn upstream gradient");
  const auto nb = neighbourhood(graph, relation_weights.size());

  Tensor dz2(n, out);
  for (std::size_t i = 0; i < n * out; ++i) dz2[i] = trace.stage2[i] > 0.0 ? dstage2[i] : 0.0;

  Tensor& w2 = state[stage2_weight];
  const Tensor mix = stage2_mix(nb, trace.stage1);
  nn::matmul_tn_acc(mix.data(), dz2.data(), w2.grad().data(), n, out, out);
  Tensor dmix(n, out);
  nn::matmul_nt_acc(dz2.data(), w2.data(), dmix.data(), n, out, out);

  Tensor ds1(n, out);
  for (std::size_t i = 0; i < n; ++i) {
    const double inv = 1.0 / static_cast<double>(nb.all[i].size() + 1);
    const auto g = dmix.row(i);
    auto self = ds1.row(i);
    for (std::size_t k = 0; k < out; ++k) self[k] += g[k] * inv;
    for (std::size_t j : nb.all[i]) {
      auto dst = ds1.row(j);
      for (std::size_t k = 0; k < out; ++k) dst[k] += g[k] * inv;
    }
  }
  for (std::size_t i = 0; i < n * out; ++i)
    if (trace.stage1[i] <= 0.0) ds1[i] = 0.0;

  Tensor dh(n, in);
  Tensor& ws = state[self_weight];
  nn::matmul_tn_acc(h.data(), ds1.data(), ws.grad().data(), n, in, out);
  nn::matmul_nt_acc(ds1.data(), ws.data(), dh.data(), n, out, in);

  std::vector<double> mean(in);
  std::vector<double> dmean(in);
  for (std::size_t i = 0; i < n; ++i) {
    const auto g = ds1.row(i);
    for (const auto& [rel, sources] : nb.by_relation[i]) {
      Tensor& wr = state[relation_weights[rel]];
      const double inv = 1.0 / static_cast<double>(sources.size());
      std::fill(mean.begin(), mean.end(), 0.0);
      for (std::size_t j : sources) {
        const auto src = h.row(j);
        for (std::size_t k = 0; k < in; ++k) mean[k] += src[k] * inv;
      }
      nn::matmul_tn_acc(mean.data(), g.data(), wr.grad().data(), 1, in, out);
      std::fill(dmean.begin(), dmean.end(), 0.0);
      nn::matmul_nt_acc(g.data(), wr.data(), dmean.data(), 1, out, in);
      for (std::size_t j : sources) {
        auto dst = dh.row(j);
        for (std::size_t k = 0; k < in; ++k) dst[k] += dmean[k] * inv;
      }
    }
  }
  return dh;
}

Tensor rgcn_forward(const ConversationGraph& graph, const Tensor& h, std::span<const Tensor> relation_weights,
                    const Tensor& self_weight, const Tensor& stage2_weight) {
  Weights w;
  for (const auto& t : relation_weights) w.relation.push_back(&t);
  w.self = &self_weight;
  w.stage2 = &stage2_weight;
  return forward_impl(graph, h, w).stage2;
}

}  // namespace pec
